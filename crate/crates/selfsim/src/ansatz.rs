//! The two-term ansatz `S_A` and the closed-form asymptotics of `K(S,S)` and
//! `I(S,S,S)`.
//!
//! [`ansatz_constants`] evaluates `F` from the stationary points of `J` with the
//! curvature `P''(2/3) = -1` and then fixes `B` by the matching relation
//! `3 i beta B = -3 i eps F / (4 pi^2)`. [`ansatz_constants_printed`] keeps the
//! literal closed forms `F = i (sqrt2 pi / 3) e^{i a ln3} |A|^2 A` and
//! `B = 3 e^{i a ln3} |A|^2 A / (16 pi sqrt2)` for comparison.

use crate::core_model::field::{ripple_carrier, Field, C3};
use crate::error::{Error, Result};
use crate::numerics::{cis, smoothstep};
use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;
use std::hash::{Hash, Hasher};

pub const BETA: f64 = -8.0 / 9.0;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[allow(non_snake_case)]
pub struct AnsatzParams {
    pub A: C64,
    pub epsilon: f64,
    pub a: f64,
    pub B: C64,
    pub beta: f64,
    pub E: C64,
    pub F: C64,
}

fn check(a: C64, epsilon: f64) -> Result<()> {
    if !(a.norm() < 1.0) {
        return Err(Error::Domain(format!("|A| must be < 1, got {}", a.norm())));
    }
    if epsilon != 1.0 && epsilon != -1.0 {
        return Err(Error::Domain(format!("epsilon must be +-1, got {epsilon}")));
    }
    Ok(())
}

/// Log-phase slope `a = -3 eps |A|^2 / (4 pi)`.
pub fn log_phase_slope(a: C64, epsilon: f64) -> f64 {
    -3.0 * epsilon * a.norm_sqr() / (4.0 * PI)
}

/// Constants used by the solver (see module docs).
#[allow(non_snake_case)]
pub fn ansatz_constants(A: C64, epsilon: f64) -> Result<AnsatzParams> {
    check(A, epsilon)?;
    let a = log_phase_slope(A, epsilon);
    let E = A * (PI * A.norm_sqr());
    let F = C64::new(0.0, PI / 3f64.sqrt()) * cis(-3.0 * a * 3f64.ln()) * A * A * A;
    let B = F * (-epsilon / (4.0 * PI * PI * BETA));
    Ok(AnsatzParams { A, epsilon, a, B, beta: BETA, E, F })
}

/// The literal closed forms for `B` and `F`.
#[allow(non_snake_case)]
pub fn ansatz_constants_printed(A: C64, epsilon: f64) -> Result<AnsatzParams> {
    check(A, epsilon)?;
    let a = log_phase_slope(A, epsilon);
    let m = A * A.norm_sqr() * cis(a * 3f64.ln());
    let E = A * (PI * A.norm_sqr());
    let F = C64::new(0.0, 2f64.sqrt() * PI / 3.0) * m;
    let B = m * (3.0 / (16.0 * PI * 2f64.sqrt()));
    Ok(AnsatzParams { A, epsilon, a, B, beta: BETA, E, F })
}

/// Cutoff `chi`: 0 below 1, 1 above 2; value and two derivatives.
pub fn chi(xi: f64) -> (f64, f64, f64) {
    smoothstep(xi - 1.0)
}

/// `S_A` as a field.
#[derive(Debug, Clone, Copy)]
pub struct Ansatz {
    pub p: AnsatzParams,
}

impl Ansatz {
    pub fn new(p: AnsatzParams) -> Ansatz {
        Ansatz { p }
    }

    /// Ripple amplitude `chi B e^{3 i a ln xi} / xi^3` and its derivative.
    pub fn ripple_amp(&self, xi: f64) -> (C64, C64) {
        let [r, dr, _] = self.pos_ripple(xi);
        (r, dr)
    }

    /// Full derivative `S_A'(xi)` for `xi > 0` (conjugate rule for `xi < 0`).
    pub fn deriv(&self, xi: f64) -> C64 {
        if xi.is_sign_negative() {
            return -self.deriv(-xi).conj();
        }
        let [_, ds, _] = self.pos_smooth(xi);
        let (r, dr) = self.ripple_amp(xi);
        let e = ripple_carrier(xi);
        ds + (dr - r * C64::new(0.0, 8.0 / 3.0 * xi * xi)) * e
    }
}

impl Field for Ansatz {
    fn pos(&self, xi: f64) -> C64 {
        if xi <= 1.0 {
            return C64::new(0.0, 0.0);
        }
        let (c, _, _) = chi(xi);
        let l = xi.ln();
        let lead = self.p.A * cis(self.p.a * l);
        let rip = self.p.B * cis(3.0 * self.p.a * l) / (xi * xi * xi) * ripple_carrier(xi);
        (lead + rip) * c
    }

    fn pos_smooth(&self, xi: f64) -> C3 {
        if xi <= 1.0 {
            return [C64::new(0.0, 0.0); 3];
        }
        let (c, dc, ddc) = chi(xi);
        let a = self.p.a;
        let g = self.p.A * cis(a * xi.ln());
        let ia = C64::new(0.0, a);
        let dg = g * ia / xi;
        let ddg = g * ia * (ia - 1.0) / (xi * xi);
        [g * c, dg * c + g * dc, ddg * c + dg * (2.0 * dc) + g * ddc]
    }

    fn rough_zones(&self) -> Vec<(f64, f64)> {
        if self.p.A == C64::new(0.0, 0.0) {
            Vec::new()
        } else {
            vec![(1.0, 2.0)]
        }
    }

    fn pos_ripple(&self, xi: f64) -> C3 {
        if xi <= 1.0 {
            return [C64::new(0.0, 0.0); 3];
        }
        let (c, dc, ddc) = chi(xi);
        // B xi^{-3 + 3 i a}
        let m = C64::new(-3.0, 3.0 * self.p.a);
        let g = self.p.B * (m * xi.ln()).exp();
        let dg = g * m / xi;
        let ddg = g * m * (m - 1.0) / (xi * xi);
        [g * c, dg * c + g * dc, ddg * c + dg * (2.0 * dc) + g * ddc]
    }

    fn has_ripple(&self) -> bool {
        self.p.B != C64::new(0.0, 0.0)
    }

    fn is_zero(&self) -> bool {
        self.p.A == C64::new(0.0, 0.0)
    }

    fn scale(&self, xi: f64) -> f64 {
        xi.max(1.0)
    }

    fn fingerprint(&self) -> Option<u64> {
        let mut h = std::hash::DefaultHasher::new();
        3u8.hash(&mut h);
        for v in [self.p.A.re, self.p.A.im, self.p.epsilon, self.p.a, self.p.B.re, self.p.B.im] {
            v.to_bits().hash(&mut h);
        }
        Some(h.finish())
    }
}

/// `S_A(xi)`.
pub fn s_eval(p: &AnsatzParams, xi: f64) -> C64 {
    Ansatz::new(*p).value(xi)
}

/// `S_A'(xi)`.
pub fn s_deriv(p: &AnsatzParams, xi: f64) -> C64 {
    Ansatz::new(*p).deriv(xi)
}

/// Leading term of `K(S,S)(eta)` for `|eta| >= 10`.
#[allow(non_snake_case)]
pub fn KSS_asym(p: &AnsatzParams, eta: f64) -> Result<C64> {
    if eta.abs() < 10.0 {
        return Err(Error::Domain(format!("KSS_asym needs |eta| >= 10, got {eta}")));
    }
    let t = eta.abs();
    let v = cis(PI / 4.0) * (4.0 * PI / 3.0).sqrt() * p.A * p.A * cis(p.a * (t * t / 4.0).ln()) / t.sqrt();
    Ok(if eta > 0.0 { v } else { v.conj() })
}

/// Leading terms of `I(S,S,S)(xi)` for `|xi| >= 10`.
#[allow(non_snake_case)]
pub fn ISSS_asym(p: &AnsatzParams, xi: f64) -> Result<C64> {
    if xi.abs() < 10.0 {
        return Err(Error::Domain(format!("ISSS_asym needs |xi| >= 10, got {xi}")));
    }
    let t = xi.abs();
    let l = t.ln();
    let v = cis(p.a * l) / t * (p.E + p.F * cis(2.0 * p.a * l) * ripple_carrier(t));
    Ok(if xi > 0.0 { v } else { v.conj() })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn zero_amplitude() {
        let p = ansatz_constants(C64::new(0.0, 0.0), 1.0).unwrap();
        assert_eq!(p.a, 0.0);
        assert_eq!(p.B, C64::new(0.0, 0.0));
        assert_eq!(p.E, C64::new(0.0, 0.0));
        assert_eq!(p.F, C64::new(0.0, 0.0));
        assert_eq!(ISSS_asym(&p, 12.0).unwrap(), C64::new(0.0, 0.0));
    }

    #[test]
    fn slope_and_printed_b_modulus() {
        let p = ansatz_constants_printed(C64::new(0.2, 0.0), 1.0).unwrap();
        assert!((p.a + 9.549_296_585_513_72e-3).abs() < 1e-15);
        assert!((p.B.norm() - 3.376_186_185_589_148e-4).abs() < 1e-15);
    }

    #[test]
    fn solver_b_modulus() {
        // |B| = 9 |F| / (32 pi^2) with |F| = pi |A|^3 / sqrt3
        let p = ansatz_constants(C64::new(0.2, 0.0), 1.0).unwrap();
        let expect = 9.0 * 0.008 / (32.0 * PI * 3f64.sqrt());
        assert!((p.B.norm() - expect).abs() < 1e-16);
        let q = ansatz_constants_printed(C64::new(0.2, 0.0), 1.0).unwrap();
        assert!((p.B.norm() / q.B.norm() - 6f64.sqrt() / 2.0).abs() < 1e-12);
    }

    #[test]
    fn rejects_large_amplitude() {
        assert!(ansatz_constants(C64::new(1.0, 0.0), 1.0).is_err());
    }

    #[test]
    fn s_values() {
        let p = ansatz_constants(C64::new(0.2, 0.0), 1.0).unwrap();
        assert_eq!(s_eval(&p, 0.5), C64::new(0.0, 0.0));
        let s = s_eval(&p, 10.0).norm();
        let b = p.B.norm();
        assert!(s >= 0.2 - b / 1000.0 && s <= 0.2 + b / 1000.0);
        assert_eq!(s_eval(&p, -3.3), s_eval(&p, 3.3).conj());
    }

    #[test]
    fn s_derivative_matches_differences() {
        let p = ansatz_constants(C64::new(0.15, -0.1), -1.0).unwrap();
        for &x in &[1.3, 1.7, 3.0, 5.0, 10.0] {
            let h = 1e-5;
            let fd = (s_eval(&p, x + h) - s_eval(&p, x - h)) / (2.0 * h);
            let d = s_deriv(&p, x);
            assert!((fd - d).norm() <= 1e-8, "x={x} {fd} {d}");
        }
        let a = Ansatz::new(p);
        for &x in &[1.4, 3.0] {
            let h = 1e-5;
            let [_, d1, d2] = a.pos_smooth(x);
            let fd1 = (a.pos_smooth(x + h)[0] - a.pos_smooth(x - h)[0]) / (2.0 * h);
            let fd2 = (a.pos_smooth(x + h)[1] - a.pos_smooth(x - h)[1]) / (2.0 * h);
            assert!((fd1 - d1).norm() < 1e-8);
            assert!((fd2 - d2).norm() < 1e-6);
        }
    }

    #[test]
    fn kss_phase_and_symmetry() {
        let p = ansatz_constants(C64::new(0.2, 0.0), -1.0).unwrap();
        let k = KSS_asym(&p, 16.0).unwrap();
        let expect = PI / 4.0 + p.a * 64f64.ln();
        assert!((k.arg() - expect).abs() < 1e-14);
        assert_eq!(KSS_asym(&p, -16.0).unwrap(), k.conj());
        assert!(KSS_asym(&p, 5.0).is_err());
    }

    #[test]
    fn isss_leading_modulus() {
        let p = ansatz_constants(C64::new(0.2, 0.0), 1.0).unwrap();
        assert!((p.E.norm() / 20.0 - 1.256_637e-3).abs() < 1e-9);
        let v = ISSS_asym(&p, 20.0).unwrap().norm();
        assert!((v - p.E.norm() / 20.0).abs() <= p.F.norm() / 20.0 + 1e-15);
    }

    proptest! {
        #[test]
        fn relations_hold_in_disk(r in 0.0f64..0.3, th in 0.0f64..(2.0 * PI), pos in proptest::bool::ANY) {
            let eps = if pos { 1.0 } else { -1.0 };
            let a = C64::from_polar(r, th);
            let p = ansatz_constants(a, eps).unwrap();
            prop_assert!((p.a + 3.0 * eps * r * r / (4.0 * PI)).abs() <= 1e-14);
            prop_assert_eq!(p.beta, -8.0 / 9.0);
            prop_assert!((p.E - a * PI * r * r).norm() <= 1e-14);
            let lhs = p.F * C64::new(0.0, -3.0 * eps / (4.0 * PI * PI));
            let rhs = p.B * C64::new(0.0, 3.0 * p.beta);
            prop_assert!((lhs - rhs).norm() <= 1e-14);
        }
    }
}
