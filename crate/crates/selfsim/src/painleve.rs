//! The profile equation `V'' = y V / 3 - eps V^3 + alpha` in physical space:
//! shooting from Airy data at large `y`, and the oscillation parameters
//! `(rho, theta)` of the decaying solutions as `y -> -inf`.

use crate::error::{Error, Result};
use crate::specfun::{airy, ln_gamma};
use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PainleveConfig {
    pub kappa: f64,
    pub epsilon: f64,
    pub alpha: f64,
    pub y_start: f64,
    pub y_end: f64,
    pub rk_tol: f64,
    /// Spacing of the dense-output checkpoints.
    pub checkpoint: f64,
}

impl Default for PainleveConfig {
    fn default() -> Self {
        PainleveConfig { kappa: 0.3, epsilon: -1.0, alpha: 0.0, y_start: 8.0, y_end: -60.0, rk_tol: 1e-10, checkpoint: 0.01 }
    }
}

impl PainleveConfig {
    pub fn with_kappa(kappa: f64) -> Self {
        PainleveConfig { kappa, ..Default::default() }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.kappa.abs() < 1.0) {
            return Err(Error::InvalidConfig(format!("|kappa| must be < 1, got {}", self.kappa)));
        }
        if self.epsilon != 1.0 && self.epsilon != -1.0 {
            return Err(Error::InvalidConfig(format!("epsilon must be +-1, got {}", self.epsilon)));
        }
        if !(self.y_start >= 8.0 && self.y_start <= 40.0) {
            return Err(Error::InvalidConfig(format!("y_start must lie in [8, 40], got {}", self.y_start)));
        }
        if !(self.y_end <= -60.0) || !self.y_end.is_finite() {
            return Err(Error::InvalidConfig(format!("y_end must be <= -60, got {}", self.y_end)));
        }
        if !(self.rk_tol > 0.0 && self.rk_tol < 1e-3) {
            return Err(Error::InvalidConfig(format!("rk_tol must lie in (0, 1e-3), got {}", self.rk_tol)));
        }
        if !(self.checkpoint > 0.0 && self.checkpoint <= 0.05) {
            return Err(Error::InvalidConfig(format!("checkpoint spacing must lie in (0, 0.05], got {}", self.checkpoint)));
        }
        Ok(())
    }
}

/// Samples of `V` on decreasing abscissas.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PhysicalProfile {
    pub ys: Vec<f64>,
    pub vs: Vec<f64>,
    pub dvs: Vec<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EnvelopeFit {
    pub rho: f64,
    pub theta: f64,
    pub residual: f64,
    pub window: (f64, f64),
}

// Dormand-Prince 5(4) tableau
const C2: f64 = 1.0 / 5.0;
const C3: f64 = 3.0 / 10.0;
const C4: f64 = 4.0 / 5.0;
const C5: f64 = 8.0 / 9.0;
const A21: f64 = 1.0 / 5.0;
const A31: f64 = 3.0 / 40.0;
const A32: f64 = 9.0 / 40.0;
const A41: f64 = 44.0 / 45.0;
const A42: f64 = -56.0 / 15.0;
const A43: f64 = 32.0 / 9.0;
const A51: f64 = 19372.0 / 6561.0;
const A52: f64 = -25360.0 / 2187.0;
const A53: f64 = 64448.0 / 6561.0;
const A54: f64 = -212.0 / 729.0;
const A61: f64 = 9017.0 / 3168.0;
const A62: f64 = -355.0 / 33.0;
const A63: f64 = 46732.0 / 5247.0;
const A64: f64 = 49.0 / 176.0;
const A65: f64 = -5103.0 / 18656.0;
const A71: f64 = 35.0 / 384.0;
const A73: f64 = 500.0 / 1113.0;
const A74: f64 = 125.0 / 192.0;
const A75: f64 = -2187.0 / 6784.0;
const A76: f64 = 11.0 / 84.0;
const E1: f64 = 71.0 / 57600.0;
const E3: f64 = -71.0 / 16695.0;
const E4: f64 = 71.0 / 1920.0;
const E5: f64 = -17253.0 / 339200.0;
const E6: f64 = 22.0 / 525.0;
const E7: f64 = -1.0 / 40.0;
// dense output (Hairer's contd5)
const D1: f64 = -12715105075.0 / 11282082432.0;
const D3: f64 = 87487479700.0 / 32700410799.0;
const D4: f64 = -10690763975.0 / 1880347072.0;
const D5: f64 = 701980252875.0 / 199316789632.0;
const D6: f64 = -1453857185.0 / 822651844.0;
const D7: f64 = 69997945.0 / 29380423.0;

type V2 = [f64; 2];

fn lin(y: V2, terms: &[(f64, V2)], h: f64) -> V2 {
    let mut o = y;
    for &(c, k) in terms {
        o[0] += h * c * k[0];
        o[1] += h * c * k[1];
    }
    o
}

/// Adaptive Dormand-Prince 5(4) for a 2-d system from `t0` to `t1` (either
/// direction), with dense output at `outs` (monotone in the direction of travel).
pub fn dp45(
    f: impl Fn(f64, V2) -> V2,
    t0: f64,
    y0: V2,
    t1: f64,
    tol: f64,
    hmax: impl Fn(f64) -> f64,
    outs: &[f64],
) -> Result<Vec<V2>> {
    let dir = if t1 >= t0 { 1.0 } else { -1.0 };
    let mut t = t0;
    let mut y = y0;
    let mut k1 = f(t, y);
    let mut h = dir * hmax(t).min(0.01);
    let mut res = Vec::with_capacity(outs.len());
    let mut oi = 0;
    while oi < outs.len() && (outs[oi] - t0) * dir <= 0.0 {
        res.push(y0);
        oi += 1;
    }
    let mut steps = 0usize;
    while (t1 - t) * dir > 0.0 {
        let hm = hmax(t);
        if h.abs() > hm {
            h = dir * hm;
        }
        if (t + h - t1) * dir > 0.0 {
            h = t1 - t;
        }
        let k2 = f(t + C2 * h, lin(y, &[(A21, k1)], h));
        let k3 = f(t + C3 * h, lin(y, &[(A31, k1), (A32, k2)], h));
        let k4 = f(t + C4 * h, lin(y, &[(A41, k1), (A42, k2), (A43, k3)], h));
        let k5 = f(t + C5 * h, lin(y, &[(A51, k1), (A52, k2), (A53, k3), (A54, k4)], h));
        let k6 = f(t + h, lin(y, &[(A61, k1), (A62, k2), (A63, k3), (A64, k4), (A65, k5)], h));
        let yn = lin(y, &[(A71, k1), (A73, k3), (A74, k4), (A75, k5), (A76, k6)], h);
        let k7 = f(t + h, yn);
        let mut err: f64 = 0.0;
        for i in 0..2 {
            let e = h * (E1 * k1[i] + E3 * k3[i] + E4 * k4[i] + E5 * k5[i] + E6 * k6[i] + E7 * k7[i]);
            let sc = tol * (1.0 + y[i].abs().max(yn[i].abs()));
            err = err.max((e / sc).abs());
        }
        if !err.is_finite() {
            return Err(Error::StepCollapse(t));
        }
        if err <= 1.0 {
            let tn = t + h;
            while oi < outs.len() && (outs[oi] - tn) * dir <= 0.0 {
                let th = (outs[oi] - t) / h;
                let th1 = 1.0 - th;
                let mut o = [0.0; 2];
                for i in 0..2 {
                    let r1 = y[i];
                    let r2 = yn[i] - y[i];
                    let r3 = h * k1[i] - r2;
                    let r4 = r2 - h * k7[i] - r3;
                    let r5 = h * (D1 * k1[i] + D3 * k3[i] + D4 * k4[i] + D5 * k5[i] + D6 * k6[i] + D7 * k7[i]);
                    o[i] = r1 + th * (r2 + th1 * (r3 + th * (r4 + th1 * r5)));
                }
                res.push(o);
                oi += 1;
            }
            t = tn;
            y = yn;
            k1 = k7;
        }
        let fac = (0.9 * err.max(1e-10).powf(-0.2)).clamp(0.2, 5.0);
        h *= fac;
        steps += 1;
        if h.abs() < 1e-12 * (1.0 + t.abs()) || steps > 50_000_000 {
            return Err(Error::StepCollapse(t));
        }
    }
    while oi < outs.len() {
        res.push(y);
        oi += 1;
    }
    Ok(res)
}

/// `V_kappa` on `[y_end, y_start]`, integrated leftward from `kappa Ai`.
pub fn integrate_profile(cfg: &PainleveConfig) -> Result<PhysicalProfile> {
    cfg.validate()?;
    let n = ((cfg.y_start - cfg.y_end) / cfg.checkpoint).round() as usize;
    let ys: Vec<f64> = (0..=n).map(|j| cfg.y_start - j as f64 * cfg.checkpoint).collect();
    if cfg.kappa == 0.0 && cfg.alpha == 0.0 {
        return Ok(PhysicalProfile { vs: vec![0.0; ys.len()], dvs: vec![0.0; ys.len()], ys });
    }
    let a = airy(cfg.y_start)?;
    let (eps, al) = (cfg.epsilon, cfg.alpha);
    let rhs = move |y: f64, u: V2| [u[1], y * u[0] / 3.0 - eps * u[0] * u[0] * u[0] + al];
    let hmax = |y: f64| if y < -20.0 { 0.02 } else if y < -5.0 { 0.05 } else { 0.1 };
    let out = dp45(rhs, cfg.y_start, [cfg.kappa * a.ai, cfg.kappa * a.ai_prime], *ys.last().unwrap(), cfg.rk_tol, hmax, &ys)?;
    Ok(PhysicalProfile { vs: out.iter().map(|u| u[0]).collect(), dvs: out.iter().map(|u| u[1]).collect(), ys })
}

/// `|V'' - (y V / 3 - eps V^3 + alpha)|` at interior checkpoints, with `V''`
/// from a five-point difference of the stored `V'`.
pub fn ode_residual(p: &PhysicalProfile, epsilon: f64, alpha: f64) -> Vec<f64> {
    let n = p.ys.len();
    let mut r = Vec::new();
    for j in 2..n.saturating_sub(2) {
        let h = p.ys[j + 1] - p.ys[j];
        let d2 = (p.dvs[j - 2] - 8.0 * p.dvs[j - 1] + 8.0 * p.dvs[j + 1] - p.dvs[j + 2]) / (12.0 * h);
        let v = p.vs[j];
        r.push((d2 - (p.ys[j] * v / 3.0 - epsilon * v * v * v + alpha)).abs());
    }
    r
}

/// `(2/(3 sqrt3)) |y|^{3/2}`.
fn base_phase(y: f64) -> f64 {
    2.0 / (3.0 * 3f64.sqrt()) * y.abs().powf(1.5)
}

/// The oscillatory model `2 sqrt(rho) / |3y|^{1/4} cos(base - 1.5 rho ln|y| + theta)`.
pub fn envelope_model(rho: f64, theta: f64, y: f64) -> f64 {
    2.0 * rho.max(0.0).sqrt() / (3.0 * y.abs()).powf(0.25) * (base_phase(y) - 1.5 * rho * y.abs().ln() + theta).cos()
}

/// Least-squares fit of `(rho, theta)` over the checkpoints inside `window`.
pub fn envelope_fit(p: &PhysicalProfile, window: (f64, f64)) -> Result<EnvelopeFit> {
    let (lo, hi) = (window.0.min(window.1), window.0.max(window.1));
    if !(hi <= -20.0) {
        return Err(Error::Domain(format!("fit window must lie in y <= -20, got [{lo}, {hi}]")));
    }
    let pts: Vec<(f64, f64)> = p.ys.iter().zip(&p.vs).filter(|(y, _)| **y >= lo && **y <= hi).map(|(y, v)| (*y, *v)).collect();
    let periods = (base_phase(lo) - base_phase(hi)) / (2.0 * PI);
    if pts.len() < 50 || periods < 10.0 {
        return Err(Error::Domain(format!("fit window holds {} points and {periods:.1} periods", pts.len())));
    }
    let mean_sq: f64 = pts.iter().map(|(y, v)| (3.0 * y.abs()).sqrt() * v * v).sum::<f64>() / pts.len() as f64;
    let mut rho = 0.5 * mean_sq;
    if rho == 0.0 {
        return Err(Error::FitResidual("profile vanishes on the fit window".into()));
    }
    let demod: C64 = pts
        .iter()
        .map(|(y, v)| C64::from_polar(v * (3.0 * y.abs()).powf(0.25), -(base_phase(*y) - 1.5 * rho * y.abs().ln())))
        .sum();
    let mut theta = demod.arg();
    let sse = |rho: f64, theta: f64| pts.iter().map(|(y, v)| (v - envelope_model(rho, theta, *y)).powi(2)).sum::<f64>();
    let mut cur = sse(rho, theta);
    let mut lambda = 1e-3;
    for _ in 0..200 {
        // Jacobian in (rho, theta)
        let (mut jtj, mut jtr) = ([[0.0; 2]; 2], [0.0; 2]);
        for (y, v) in &pts {
            let l = y.abs().ln();
            let amp = 2.0 * rho.sqrt() / (3.0 * y.abs()).powf(0.25);
            let ph = base_phase(*y) - 1.5 * rho * l + theta;
            let (s, c) = ph.sin_cos();
            let g = [amp * c / (2.0 * rho) + amp * s * 1.5 * l, -amp * s];
            let r = v - amp * c;
            for i in 0..2 {
                jtr[i] += g[i] * r;
                for k in 0..2 {
                    jtj[i][k] += g[i] * g[k];
                }
            }
        }
        let mut improved = false;
        for _ in 0..20 {
            let a = [[jtj[0][0] * (1.0 + lambda), jtj[0][1]], [jtj[1][0], jtj[1][1] * (1.0 + lambda)]];
            let det = a[0][0] * a[1][1] - a[0][1] * a[1][0];
            let d = [(a[1][1] * jtr[0] - a[0][1] * jtr[1]) / det, (a[0][0] * jtr[1] - a[1][0] * jtr[0]) / det];
            let (nr, nt) = (rho + d[0], theta + d[1]);
            if nr > 0.0 {
                let s = sse(nr, nt);
                if s < cur {
                    let rel = (cur - s) / cur.max(1e-300);
                    rho = nr;
                    theta = nt;
                    cur = s;
                    lambda = (lambda * 0.3).max(1e-12);
                    improved = rel > 1e-15;
                    break;
                }
            }
            lambda *= 10.0;
        }
        if !improved {
            break;
        }
    }
    let residual = (cur / pts.len() as f64).sqrt();
    let mean_env = pts.iter().map(|(y, _)| 2.0 * rho.sqrt() / (3.0 * y.abs()).powf(0.25)).sum::<f64>() / pts.len() as f64;
    if residual > 0.05 * mean_env {
        return Err(Error::FitResidual(format!("rms {residual:e} above 5% of the envelope {mean_env:e}")));
    }
    Ok(EnvelopeFit { rho, theta: theta.rem_euclid(2.0 * PI), residual, window: (lo, hi) })
}

/// `rho = ln(1 / (1 - kappa^2)) / (2 pi)`.
pub fn rho_of_kappa(kappa: f64) -> Result<f64> {
    if !(kappa.abs() < 1.0) {
        return Err(Error::Domain(format!("|kappa| must be < 1, got {kappa}")));
    }
    Ok(-(-kappa * kappa).ln_1p() / (2.0 * PI))
}

/// Candidate phase `-3 rho (ln 2 + ln3 / 4) + Im ln Gamma(i rho) + (pi/2) sgn kappa - pi/4`,
/// reduced mod `2 pi`. Reported next to fits, never asserted.
pub fn theta_candidate(kappa: f64) -> Result<f64> {
    let rho = rho_of_kappa(kappa)?;
    if rho == 0.0 {
        return Err(Error::Domain("theta is undefined at kappa = 0".into()));
    }
    let lg = ln_gamma(C64::new(0.0, rho)).im;
    let t = -3.0 * rho * (2f64.ln() + 0.25 * 3f64.ln()) + lg + 0.5 * PI * kappa.signum() - 0.25 * PI;
    Ok(t.rem_euclid(2.0 * PI))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn integrator_reproduces_harmonic_motion() {
        let ts: Vec<f64> = (0..=100).map(|j| j as f64 * 0.1).collect();
        let out = dp45(|_, u| [u[1], -u[0]], 0.0, [0.0, 1.0], 10.0, 1e-12, |_| 0.5, &ts).unwrap();
        for (t, u) in ts.iter().zip(&out) {
            assert!((u[0] - t.sin()).abs() < 1e-9, "t={t}");
            assert!((u[1] - t.cos()).abs() < 1e-9);
        }
    }

    #[test]
    fn zero_kappa_gives_zero_profile() {
        let p = integrate_profile(&PainleveConfig::with_kappa(0.0)).unwrap();
        assert!(p.vs.iter().all(|v| *v == 0.0));
        assert_eq!(p.ys[0], 8.0);
    }

    #[test]
    fn airy_regime_is_linear() {
        let p = integrate_profile(&PainleveConfig::with_kappa(0.1)).unwrap();
        let j = p.ys.iter().position(|y| (y - 6.0).abs() < 1e-9).unwrap();
        let r = p.vs[j] / airy(6.0).unwrap().ai;
        assert!((r - 0.1).abs() < 1e-6, "{r}");
    }

    #[test]
    fn profile_is_bounded_and_odd_in_kappa() {
        let p = integrate_profile(&PainleveConfig::with_kappa(0.3)).unwrap();
        let m = p.vs.iter().fold(0.0f64, |a, v| a.max(v.abs()));
        assert!(m < 1.0 && m > 0.01);
        let q = integrate_profile(&PainleveConfig::with_kappa(-0.3)).unwrap();
        for (a, b) in p.vs.iter().zip(&q.vs) {
            assert!((a + b).abs() < 1e-12);
        }
        let r = ode_residual(&p, -1.0, 0.0);
        let worst = r.iter().cloned().fold(0.0, f64::max);
        assert!(worst < 1e-6, "{worst}");
    }

    #[test]
    fn tolerance_halving_is_stable() {
        let mut c = PainleveConfig::with_kappa(0.3);
        let p = integrate_profile(&c).unwrap();
        c.rk_tol *= 0.5;
        let q = integrate_profile(&c).unwrap();
        let j = p.ys.iter().position(|y| (y + 40.0).abs() < 1e-9).unwrap();
        assert!((p.vs[j] - q.vs[j]).abs() < 10.0 * 1e-10 * 1e3, "{}", (p.vs[j] - q.vs[j]).abs());
    }

    #[test]
    fn fit_recovers_its_own_model() {
        let ys: Vec<f64> = (0..=4000).map(|j| -20.0 - j as f64 * 0.01).collect();
        let vs: Vec<f64> = ys.iter().map(|&y| envelope_model(0.015, 1.0, y)).collect();
        let p = PhysicalProfile { dvs: vec![0.0; ys.len()], ys, vs };
        let f = envelope_fit(&p, (-55.0, -30.0)).unwrap();
        assert!((f.rho - 0.015).abs() < 1e-6, "{f:?}");
        assert!((f.theta - 1.0).abs() < 1e-6, "{f:?}");
    }

    #[test]
    fn rho_formula_values() {
        assert_eq!(rho_of_kappa(0.0).unwrap(), 0.0);
        // ln(1/0.91)/(2 pi) and ln(1/0.0199)/(2 pi), evaluated in extended precision
        assert!((rho_of_kappa(0.3).unwrap() - 0.015_010_010_824_203_376).abs() < 1e-15);
        assert!((rho_of_kappa(0.99).unwrap() - 0.623_415_569_611_773_7).abs() < 1e-13);
        assert!(rho_of_kappa(1.0).is_err());
    }
}
