//! `J(h, k)(xi) = int e^{-3 i Phi(xi, eta)} conj h(eta - xi) k(eta) d eta`.
//!
//! Brute mode integrates over the whole line in two channels: the weight
//! `omega2` isolates the stationary point `eta = 2 xi / 3`, whose phase
//! carries `e^{-8 i xi^3 / 9}`. The origin singularity of a tabulated kernel is
//! handled by square-root segments. Fast mode keeps only the leading local
//! terms.

use super::cutoff::{omega2, omega2_zones};
use super::kernel::{conj3, mul3, FieldKernel, Kernel, Mirror, ZERO};
use super::segment::{integrate, plan, Osc, PlanSpec, QuadStats, Zone};
use super::QuadPanelConfig;
use crate::core_model::field::{Field, C3};
use crate::error::{Error, Result};
use crate::numerics::cis;
use num_complex::Complex64 as C64;
use std::f64::consts::{FRAC_PI_4, PI, SQRT_2};

#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub enum Mode {
    Brute,
    Fast,
}

/// `J` split into the part without and with the `2 xi / 3` weight.
#[derive(Debug, Clone, Copy, Default)]
pub struct JParts {
    pub total: C64,
    pub main: C64,
    pub j2: C64,
    pub stats: QuadStats,
}

impl JParts {
    fn conj(self) -> JParts {
        JParts { total: self.total.conj(), main: self.main.conj(), j2: self.j2.conj(), stats: self.stats }
    }

    pub fn scaled(self, s: f64) -> JParts {
        JParts { total: self.total * s, main: self.main * s, j2: self.j2 * s, stats: self.stats }
    }
}

/// One channel of the `J` integrand: smooth part or ripple of `h`, against
/// the kernel's base or one of its extra components.
struct JChan<'a> {
    h: &'a dyn Field,
    k: &'a dyn Kernel,
    xi: f64,
    rh: bool,
    /// Extra component index and its cubic phase coefficient.
    kc: Option<(usize, f64)>,
}

impl JChan<'_> {
    fn split(&self) -> bool {
        !self.rh && self.kc.is_none()
    }
    fn kernel3(&self, eta: f64) -> C3 {
        match self.kc {
            None => self.k.base(eta),
            Some((i, _)) => self.k.chan(i, eta),
        }
    }
}

impl Osc<2> for JChan<'_> {
    fn phase(&self, eta: f64) -> [f64; 4] {
        let x = self.xi;
        let mut ph = [
            -3.0 * (eta * x * x - x * eta * eta + 0.25 * eta * eta * eta),
            -3.0 * (x * x - 2.0 * x * eta + 0.75 * eta * eta),
            -3.0 * (-2.0 * x + 1.5 * eta),
            -4.5,
        ];
        let mut add = |d: [f64; 4]| ph.iter_mut().zip(d).for_each(|(p, d)| *p += d);
        if self.rh {
            // conj of the ripple carrier at eta - xi
            let y = eta - x;
            add([8.0 / 9.0 * y * y * y, 8.0 / 3.0 * y * y, 16.0 / 3.0 * y, 16.0 / 3.0]);
        }
        if let Some((_, c)) = self.kc {
            add([c * eta * eta * eta, 3.0 * c * eta * eta, 6.0 * c * eta, 6.0 * c]);
        }
        ph
    }
    fn full(&self, eta: f64) -> [C64; 2] {
        let x = eta - self.xi;
        let hh = if self.rh { self.h.ripple(x)[0] } else { self.h.smooth(x)[0] };
        let v = hh.conj() * self.kernel3(eta)[0];
        if !self.split() {
            return [v, ZERO];
        }
        let w = omega2(self.xi, eta).0;
        [v * (1.0 - w), v * w]
    }
    fn smooth(&self, eta: f64) -> [C3; 2] {
        let x = eta - self.xi;
        let hh = if self.rh { self.h.ripple(x) } else { self.h.smooth(x) };
        let g = mul3(conj3(hh), self.kernel3(eta));
        if !self.split() {
            return [g, [ZERO; 3]];
        }
        let (w0, w1, w2) = omega2(self.xi, eta);
        let wg = mul3([C64::new(w0, 0.0), C64::new(w1, 0.0), C64::new(w2, 0.0)], g);
        [[g[0] - wg[0], g[1] - wg[1], g[2] - wg[2]], wg]
    }
}

fn h_zones(h: &dyn Field, xi: f64) -> Vec<Zone> {
    let mut z = Vec::new();
    for (a, b) in h.rough_zones() {
        z.push(Zone { a: xi + a, b: xi + b });
        z.push(Zone { a: xi - b, b: xi - a });
    }
    z
}

fn brute(h: &dyn Field, k: &dyn Kernel, xi: f64, cfg: &QuadPanelConfig) -> Result<JParts> {
    let q = cfg.q();
    let scale = |eta: f64| h.scale((eta - xi).abs()).min(k.scale(eta));
    let cores = if xi < 2.0 { vec![(-2.0, 2.0)] } else { Vec::new() };
    let singular = if k.singular() != (ZERO, ZERO) {
        let mut d = (q / (3.0 * xi * xi).max(1e-300)).clamp(1e-3, 0.9);
        if xi > 0.0 {
            d = d.min(0.5 * xi);
        }
        Some((0.0, d))
    } else {
        None
    };
    let radius = match h.support() {
        Some(r) => cfg.radius.min(xi + r),
        None => cfg.radius,
    };
    let mut kparts: Vec<Option<(usize, f64)>> = vec![None];
    kparts.extend(k.channels().into_iter().enumerate().map(Some));
    let (mut main, mut j2) = (ZERO, ZERO);
    let mut stats = QuadStats::default();
    for kc in kparts {
        let mut zones = h_zones(h, xi);
        let kz = match kc {
            None => k.zones(),
            Some((i, _)) => k.chan_zones(i),
        };
        zones.extend(kz.into_iter().map(|(a, b)| Zone { a, b }));
        if kc.is_none() {
            zones.extend(omega2_zones(xi).into_iter().map(|(a, b)| Zone { a, b }));
        }
        let sp = PlanSpec {
            breaks: vec![0.0, xi],
            zones,
            cores: cores.clone(),
            singular: if kc.is_none() { singular } else { None },
            scale: &scale,
            q,
            r: cfg.r(),
            radius,
        };
        for rh in [false, true] {
            if rh && !h.has_ripple() {
                continue;
            }
            let p = JChan { h, k, xi, rh, kc };
            let segs = plan(&p, &sp);
            let ([m, w], st) = integrate(&p, &segs, cfg.max_panels)?;
            main += m;
            j2 += w;
            stats.merge(&st);
        }
    }
    Ok(JParts { total: main + j2, main, j2, stats })
}

fn fast(h: &dyn Field, k: &dyn Kernel, xi: f64) -> JParts {
    let a = (PI / (3.0 * xi)).sqrt() * SQRT_2;
    let hc = |x: f64| h.value(x).conj();
    let x3 = xi * xi * xi;
    let mut main = a * cis(-FRAC_PI_4) * k.value(2.0 * xi) * hc(xi);
    let j2 = a * cis(FRAC_PI_4) * k.value(2.0 * xi / 3.0) * hc(-xi / 3.0) * cis(-8.0 * x3 / 9.0);
    let (kp, km) = k.singular();
    if (kp, km) != (ZERO, ZERO) {
        main += hc(-xi) * (PI / (3.0 * xi * xi)).sqrt() * (kp * cis(-FRAC_PI_4) + km * cis(FRAC_PI_4));
    } else {
        let dk = k.value(-0.0) - k.value(0.0);
        if dk != ZERO {
            main += hc(-xi) * dk / C64::new(0.0, -3.0 * xi * xi);
        }
    }
    let dh = hc(-0.0) - hc(0.0);
    if dh != ZERO {
        main += cis(-0.75 * x3) * k.value(xi) * dh / C64::new(0.0, 0.75 * xi * xi);
    }
    // stationary points of -3 Phi + c eta^3 for each extra component
    for (i, c) in k.channels().into_iter().enumerate() {
        let qa = 3.0 * c - 2.25;
        let roots: Vec<f64> = if qa.abs() < 1e-12 {
            vec![0.5 * xi]
        } else {
            let disc = 36.0 * xi * xi + 12.0 * qa * xi * xi;
            if disc < 0.0 {
                Vec::new()
            } else {
                vec![(-6.0 * xi + disc.sqrt()) / (2.0 * qa), (-6.0 * xi - disc.sqrt()) / (2.0 * qa)]
            }
        };
        for e in roots {
            let dd = 6.0 * xi + 2.0 * qa * e;
            if dd == 0.0 {
                continue;
            }
            let ph = -3.0 * (e * xi * xi - xi * e * e + 0.25 * e * e * e) + c * e * e * e;
            let w = (2.0 * PI / dd.abs()).sqrt() * cis(ph + FRAC_PI_4 * dd.signum());
            main += w * hc(e - xi) * k.chan(i, e)[0];
        }
    }
    JParts { total: main + j2, main, j2, stats: QuadStats::default() }
}

/// `J(h, k)(xi)` for a general kernel, with channel split and work counters.
pub fn j_kernel(h: &dyn Field, k: &dyn Kernel, xi: f64, cfg: &QuadPanelConfig, mode: Mode) -> Result<JParts> {
    if !xi.is_finite() {
        return Err(Error::Domain(format!("J needs a finite xi, got {xi}")));
    }
    if xi < 0.0 {
        return Ok(j_kernel(h, &Mirror(k), -xi, cfg, mode)?.conj());
    }
    if h.is_zero() || k.is_zero() {
        return Ok(JParts::default());
    }
    match mode {
        Mode::Fast if xi <= 2.0 => Err(Error::FastModeRange(xi)),
        Mode::Fast => Ok(fast(h, k, xi)),
        Mode::Brute => brute(h, k, xi, cfg),
    }
}

/// `J(f, g)(xi) = int e^{-3 i Phi} conj f(eta - xi) g(eta) d eta`.
#[allow(non_snake_case)]
pub fn J_eval(f: &dyn Field, g: &dyn Field, xi: f64, cfg: &QuadPanelConfig, mode: Mode) -> Result<C64> {
    if mode == Mode::Fast && xi.abs() <= 2.0 {
        return Err(Error::FastModeRange(xi));
    }
    Ok(j_kernel(f, &FieldKernel(g), xi, cfg, mode)?.total)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::core_model::field::{FnField, ZeroField};
    use crate::numerics::gauss8;

    /// Smooth, conjugate-symmetric, algebraically decaying.
    fn alg_field(p: f64, c: f64) -> FnField {
        FnField::new(move |x: f64| {
            let r = 1.0 + x * x;
            let m = r.powf(-p);
            let dm = -2.0 * p * x * r.powf(-p - 1.0);
            let ddm = -2.0 * p * r.powf(-p - 1.0) + 4.0 * p * (p + 1.0) * x * x * r.powf(-p - 2.0);
            let t = x / r.sqrt();
            let dt = r.powf(-1.5);
            let ddt = -3.0 * x * r.powf(-2.5);
            let u = C64::new(1.0, c * t);
            let du = C64::new(0.0, c * dt);
            let ddu = C64::new(0.0, c * ddt);
            [u * m, du * m + u * dm, ddu * m + 2.0 * du * dm + u * ddm]
        })
    }

    fn dense(f: &dyn Field, g: &dyn Field, xi: f64, half: f64, n: usize) -> C64 {
        let h = 2.0 * half / n as f64;
        let mut acc = ZERO;
        for i in 0..n {
            let a = -half + i as f64 * h;
            for (eta, w) in gauss8(a, a + h) {
                let ph = -3.0 * (eta * xi * xi - xi * eta * eta + 0.25 * eta * eta * eta);
                acc += cis(ph) * f.value(eta - xi).conj() * g.value(eta) * w;
            }
        }
        acc
    }

    fn gauss(c: f64) -> FnField {
        FnField::new(move |x: f64| {
            let e = (-(x - c) * (x - c)).exp();
            let d = -2.0 * (x - c);
            [C64::new(e, 0.0), C64::new(d * e, 0.0), C64::new((d * d - 2.0) * e, 0.0)]
        })
    }

    #[test]
    fn brute_matches_dense_on_compact_fields() {
        let f = gauss(0.5);
        let g = gauss(1.5);
        let cfg = QuadPanelConfig::default();
        for &xi in &[0.7, 1.9, -1.3] {
            let v = J_eval(&f, &g, xi, &cfg, Mode::Brute).unwrap();
            let r = dense(&f, &g, xi, 12.0, 60_000);
            assert!((v - r).norm() < 1e-9, "xi={xi} {v} {r}");
        }
    }

    #[test]
    fn fast_uses_sqrt2_weights() {
        let f = alg_field(0.25, 0.4);
        let g = alg_field(0.5, -0.3);
        let xi = 16.0;
        let v = J_eval(&f, &g, xi, &QuadPanelConfig::default(), Mode::Fast).unwrap();
        let a = (PI / (3.0 * xi)).sqrt() * SQRT_2;
        let w = a
            * (cis(-FRAC_PI_4) * g.value(2.0 * xi) * f.value(xi).conj()
                + cis(FRAC_PI_4) * g.value(2.0 * xi / 3.0) * f.value(-xi / 3.0).conj() * cis(-8.0 * xi.powi(3) / 9.0));
        assert!((v - w).norm() < 1e-14);
        assert!(J_eval(&f, &g, 1.5, &QuadPanelConfig::default(), Mode::Fast).is_err());
    }

    #[test]
    fn brute_minus_fast_decays() {
        let f = alg_field(0.25, 0.4);
        let g = alg_field(0.5, -0.3);
        let cfg = QuadPanelConfig::default();
        let d: Vec<f64> = [10.0, 20.0, 40.0]
            .iter()
            .map(|&xi| {
                let b = J_eval(&f, &g, xi, &cfg, Mode::Brute).unwrap();
                let s = J_eval(&f, &g, xi, &cfg, Mode::Fast).unwrap();
                (b - s).norm()
            })
            .collect();
        let slope = (d[2] / d[0]).ln() / 4f64.ln();
        assert!(slope <= -2.0, "{d:?} slope {slope}");
    }

    #[test]
    fn zero_kernel_gives_zero() {
        let f = gauss(0.5);
        assert_eq!(J_eval(&f, &ZeroField, 3.0, &QuadPanelConfig::default(), Mode::Brute).unwrap(), ZERO);
    }
}
