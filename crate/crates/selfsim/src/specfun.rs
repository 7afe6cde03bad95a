//! Airy function in the `(1/pi) int cos(xi^3 + y xi)` normalization, the
//! Fresnel tail `int_lambda^inf exp(i eta^2)`, and a complex log-gamma.
//!
//! The Airy function here is `3^{-1/3} Ai_std(3^{-1/3} y)`; `Ai_std` comes from
//! its Maclaurin series for `|x| <= 7` and from the asymptotic expansions beyond.

use crate::error::{Error, Result};
use crate::numerics::cis;
use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

const AI0: f64 = 0.355_028_053_887_817_24;
const AIP0: f64 = -0.258_819_403_792_806_8;
const SERIES_LIMIT: f64 = 7.0;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AiryValue {
    pub y: f64,
    pub ai: f64,
    pub ai_prime: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FresnelTail {
    pub lambda: f64,
    pub value: C64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    Plus,
    Minus,
}

/// Airy function and derivative; `|y| <= 40`.
pub fn airy(y: f64) -> Result<AiryValue> {
    if !(y.abs() <= 40.0) {
        return Err(Error::Domain(format!("airy needs |y| <= 40, got {y}")));
    }
    let s = 3f64.powf(-1.0 / 3.0);
    let (a, ap) = airy_std(s * y);
    Ok(AiryValue { y, ai: s * a, ai_prime: s * s * ap })
}

/// Standard Airy `Ai(x)` and `Ai'(x)`.
pub fn airy_std(x: f64) -> (f64, f64) {
    if x.abs() <= SERIES_LIMIT {
        airy_series(x)
    } else if x > 0.0 {
        airy_asym_pos(x)
    } else {
        airy_asym_neg(-x)
    }
}

fn airy_series(x: f64) -> (f64, f64) {
    let x3 = x * x * x;
    // f, g and their derivatives
    let (mut f, mut tf) = (1.0, 1.0);
    let (mut g, mut tg) = (x, x);
    let (mut fp, mut tfp) = (0.5 * x * x, 0.5 * x * x);
    let (mut gp, mut tgp) = (1.0, 1.0);
    for k in 0..200 {
        let kf = k as f64;
        tf *= x3 / ((3.0 * kf + 2.0) * (3.0 * kf + 3.0));
        tg *= x3 / ((3.0 * kf + 3.0) * (3.0 * kf + 4.0));
        tfp *= x3 / ((3.0 * kf + 3.0) * (3.0 * kf + 5.0));
        tgp *= x3 / ((3.0 * kf + 1.0) * (3.0 * kf + 3.0));
        f += tf;
        g += tg;
        fp += tfp;
        gp += tgp;
        let big = f.abs().max(g.abs()).max(fp.abs()).max(gp.abs()).max(1.0);
        if tf.abs().max(tg.abs()).max(tfp.abs()).max(tgp.abs()) < 1e-18 * big {
            break;
        }
    }
    (AI0 * f + AIP0 * g, AI0 * fp + AIP0 * gp)
}

/// Coefficients u_k, v_k of the Airy asymptotic series.
fn uv_coeffs(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut u = vec![1.0; n];
    let mut v = vec![1.0; n];
    for k in 1..n {
        let kf = k as f64;
        u[k] = u[k - 1] * (6.0 * kf - 5.0) * (6.0 * kf - 3.0) * (6.0 * kf - 1.0)
            / ((2.0 * kf - 1.0) * 216.0 * kf);
        v[k] = -u[k] * (6.0 * kf + 1.0) / (6.0 * kf - 1.0);
    }
    (u, v)
}

/// Sum `sum_k sign_k c_k / zeta^k` over k in `ks`, stopping at the smallest term.
fn asym_sum(c: &[f64], zeta: f64, ks: impl Iterator<Item = usize>, alternate: bool) -> f64 {
    let mut acc = 0.0;
    let mut last = f64::INFINITY;
    for (j, k) in ks.enumerate() {
        let sign = if alternate && j % 2 == 1 { -1.0 } else { 1.0 };
        let t = c[k] / zeta.powi(k as i32);
        if t.abs() > last {
            break;
        }
        acc += sign * t;
        last = t.abs();
        if t.abs() < 1e-17 * acc.abs().max(1e-300) {
            break;
        }
    }
    acc
}

fn airy_asym_pos(x: f64) -> (f64, f64) {
    let zeta = 2.0 / 3.0 * x.powf(1.5);
    let (u, v) = uv_coeffs(60);
    let su = asym_sum(&u, zeta, 0..60, true);
    let sv = asym_sum(&v, zeta, 0..60, true);
    let e = (-zeta).exp() / (2.0 * PI.sqrt());
    (e * su / x.powf(0.25), -e * sv * x.powf(0.25))
}

fn airy_asym_neg(t: f64) -> (f64, f64) {
    let zeta = 2.0 / 3.0 * t.powf(1.5);
    let (u, v) = uv_coeffs(80);
    let p = asym_sum(&u, zeta, (0..80).step_by(2), true);
    let q = asym_sum(&u, zeta, (1..80).step_by(2), true);
    let r = asym_sum(&v, zeta, (0..80).step_by(2), true);
    let s = asym_sum(&v, zeta, (1..80).step_by(2), true);
    let ph = zeta - PI / 4.0;
    let (sn, cs) = ph.sin_cos();
    let ai = (cs * p + sn * q) / (PI.sqrt() * t.powf(0.25));
    let aip = t.powf(0.25) * (sn * r - cs * s) / PI.sqrt();
    (ai, aip)
}

/// Leading-order Airy model as displayed alongside the Painleve asymptotics:
/// `exp(-(2/(3 sqrt3)) y^{3/2}) / (sqrt(pi) (3y)^{1/4})` for `y -> +inf` and
/// `cos((2/(3 sqrt3))|y|^{3/2} - pi/4) / (sqrt(pi)|3y|^{1/4})` for `y -> -inf`.
pub fn airy_asym(y: f64, side: Side) -> Result<f64> {
    if y.abs() < 5.0 {
        return Err(Error::Domain(format!("airy_asym needs |y| >= 5, got {y}")));
    }
    let t = y.abs();
    let pre = 1.0 / (PI.sqrt() * (3.0 * t).powf(0.25));
    let ph = 2.0 / (3.0 * 3f64.sqrt()) * t.powf(1.5);
    Ok(match side {
        Side::Plus => pre * (-ph).exp(),
        Side::Minus => pre * (ph - PI / 4.0).cos(),
    })
}

/// `int_lambda^inf exp(i eta^2) d eta` for `lambda >= 0`.
pub fn fresnel_tail(lambda: f64) -> FresnelTail {
    assert!(lambda >= 0.0, "fresnel_tail needs lambda >= 0");
    let x = lambda * (2.0 / PI).sqrt();
    let tail = if x <= 1.5 {
        let (c, s) = fresnel_cs_series(x);
        C64::new(0.5 - c, 0.5 - s)
    } else {
        fresnel_tail_cf(x)
    };
    FresnelTail { lambda, value: tail * (PI / 2.0).sqrt() }
}

/// Standard Fresnel integrals `C(x)`, `S(x)` (kernel `pi t^2 / 2`) by series.
fn fresnel_cs_series(x: f64) -> (f64, f64) {
    let h = PI / 2.0;
    let x2 = x * x;
    let mut c = 0.0;
    let mut s = 0.0;
    // term_n = (-1)^n (pi/2)^n x^{2n+1} / n!, even n feed C, odd n feed S
    let mut term = x;
    for n in 0..80 {
        let denom = (2 * n + 1) as f64;
        if n % 2 == 0 {
            c += term / denom;
        } else {
            s += term / denom;
        }
        let next = term * h * x2 / (n + 1) as f64;
        term = if n % 2 == 0 { next } else { -next };
        if term.abs() < 1e-19 {
            break;
        }
    }
    (c, s)
}

/// `int_x^inf exp(i pi t^2/2) dt` for `x > 1.5` by a continued fraction
/// (modified Lentz).
fn fresnel_tail_cf(x: f64) -> C64 {
    let pix2 = PI * x * x;
    let tiny = 1e-300;
    let mut b = C64::new(1.0, -pix2);
    let mut cc = C64::new(1.0 / tiny, 0.0);
    let mut d = b.inv();
    let mut h = d;
    let mut n = -1.0f64;
    for _ in 0..1000 {
        n += 2.0;
        let a = -n * (n + 1.0);
        b += 4.0;
        d = (d * a + b).inv();
        cc = b + cc.inv() * a;
        let del = cc * d;
        h *= del;
        if (del - 1.0).norm() < 1e-16 {
            break;
        }
    }
    h *= C64::new(x, -x);
    C64::new(0.5, 0.5) * cis(0.5 * pix2) * h
}

const LANCZOS: [f64; 9] = [
    0.999_999_999_999_809_9,
    676.520_368_121_885_1,
    -1_259.139_216_722_402_8,
    771.323_428_777_653_1,
    -176.615_029_162_140_6,
    12.507_343_278_686_905,
    -0.138_571_095_265_720_12,
    9.984_369_578_019_572e-6,
    1.505_632_735_149_311_6e-7,
];

/// Principal-branch-free `ln Gamma(z)` (Lanczos, g = 7) with reflection.
pub fn ln_gamma(z: C64) -> C64 {
    if z.re < 0.5 {
        let s = (z * PI).sin();
        return C64::new(PI.ln(), 0.0) - s.ln() - ln_gamma(C64::new(1.0, 0.0) - z);
    }
    let z = z - 1.0;
    let mut x = C64::new(LANCZOS[0], 0.0);
    for (i, &c) in LANCZOS.iter().enumerate().skip(1) {
        x += c / (z + i as f64);
    }
    let t = z + 7.5;
    C64::new(0.5 * (2.0 * PI).ln(), 0.0) + (z + 0.5) * t.ln() - t + x.ln()
}
