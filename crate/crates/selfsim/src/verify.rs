//! Brute-vs-asymptotic sweeps with log-log decay fits.

use crate::ansatz::{ansatz_constants, Ansatz, ISSS_asym, KSS_asym};
use crate::core_model::field::{FnField, C3};
use crate::error::{Error, Result};
use crate::fixedpoint::coupling;
use crate::numerics::cis;
use crate::oscquad::{i_eval_table, k_table, J_eval, K_eval, Mode, QuadPanelConfig};
use crate::specfun::{airy, fresnel_tail};
use crate::transform::{inverse_profile, InverseMethod, InverseTransformSpec};
use num_complex::Complex64 as C64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;
use std::str::FromStr;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Which {
    K,
    I,
    J,
    Airy,
    Fresnel,
}

impl FromStr for Which {
    type Err = Error;
    fn from_str(s: &str) -> Result<Which> {
        match s {
            "K" | "k" => Ok(Which::K),
            "I" | "i" => Ok(Which::I),
            "J" | "j" => Ok(Which::J),
            "airy" => Ok(Which::Airy),
            "fresnel" => Ok(Which::Fresnel),
            _ => Err(Error::Parse(format!("unknown sweep '{s}' (K, I, J, airy, fresnel)"))),
        }
    }
}

impl Which {
    pub const ALL: [Which; 5] = [Which::Airy, Which::Fresnel, Which::J, Which::K, Which::I];

    pub fn name(self) -> &'static str {
        match self {
            Which::K => "K",
            Which::I => "I",
            Which::J => "J",
            Which::Airy => "airy",
            Which::Fresnel => "fresnel",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub x: f64,
    pub brute: C64,
    pub model: C64,
    pub diff: f64,
    /// `diff` times the expected decay power.
    pub scaled: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Sweep {
    pub name: String,
    pub rows: Vec<SweepRow>,
    /// Least-squares slope of `ln diff` against `ln x`.
    pub slope: Option<f64>,
}

/// Least-squares slope of `ln y` against `ln x` (positive entries only).
pub fn loglog_slope(xs: &[f64], ys: &[f64]) -> Option<f64> {
    let pts: Vec<(f64, f64)> = xs.iter().zip(ys).filter(|(x, y)| **x > 0.0 && **y > 0.0).map(|(x, y)| (x.ln(), y.ln())).collect();
    if pts.len() < 2 {
        return None;
    }
    let n = pts.len() as f64;
    let (mx, my) = (pts.iter().map(|p| p.0).sum::<f64>() / n, pts.iter().map(|p| p.1).sum::<f64>() / n);
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    Some(sxy / sxx)
}

fn finish(name: &str, rows: Vec<SweepRow>, fit: bool) -> Sweep {
    let slope = if fit {
        loglog_slope(&rows.iter().map(|r| r.x).collect::<Vec<_>>(), &rows.iter().map(|r| r.diff).collect::<Vec<_>>())
    } else {
        None
    };
    Sweep { name: name.into(), rows, slope }
}

pub const ASYM_ABSCISSAS: [f64; 5] = [10.0, 14.0, 20.0, 28.0, 40.0];
pub const K_ABSCISSAS: [f64; 5] = [10.0, 15.0, 20.0, 30.0, 40.0];
pub const FRESNEL_LAMBDAS: [f64; 7] = [0.01, 0.1, 1.0, 2.0, 5.0, 10.0, 20.0];

/// Real-axis quadrature of the defining integral against the series/asymptotic evaluator.
pub fn airy_sweep() -> Result<Sweep> {
    let ys = vec![-2.0, -1.0, 0.0, 1.0, 2.0];
    let one = FnField::new(|_| [C64::new(1.0, 0.0), C64::new(0.0, 0.0), C64::new(0.0, 0.0)]);
    let spec = InverseTransformSpec { field: &one, y_targets: ys.clone(), method: InverseMethod::Brute, xi_max: 30.0 };
    let p = inverse_profile(&spec)?;
    let mut rows = Vec::new();
    for (y, q) in ys.iter().zip(&p.vs) {
        let a = airy(*y)?.ai;
        rows.push(SweepRow { x: *y, brute: C64::new(*q, 0.0), model: C64::new(a, 0.0), diff: (q - a).abs(), scaled: (q - a).abs() });
    }
    Ok(finish("airy", rows, false))
}

/// The two tail bounds; `brute` holds the value, `diff` and `scaled` the two
/// bound slacks `bound - |deviation|` (non-negative when the bound holds).
pub fn fresnel_sweep() -> Sweep {
    let rows = FRESNEL_LAMBDAS
        .iter()
        .map(|&l| {
            let v = fresnel_tail(l).value;
            let full = PI.sqrt() / 2.0 * cis(PI / 4.0);
            let model = C64::new(0.0, -1.0 / (2.0 * l));
            SweepRow { x: l, brute: v, model, diff: l - (v - full).norm(), scaled: l.powi(-3) - (v - model).norm() }
        })
        .collect();
    finish("fresnel", rows, false)
}

/// Smooth, conjugate-symmetric, algebraically decaying test field
/// `(1 + x^2)^{-p} (1 + i c x / sqrt(1 + x^2))`.
pub fn algebraic_field(p: f64, c: f64) -> FnField {
    FnField::new(move |x: f64| -> C3 {
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

/// `|J brute - J fast|` on smooth decaying fields; `scaled` is `diff * xi^{5/2}`.
pub fn j_sweep(cfg: &QuadPanelConfig) -> Result<Sweep> {
    let f = algebraic_field(0.25, 0.4);
    let g = algebraic_field(0.5, -0.3);
    let rows: Result<Vec<SweepRow>> = ASYM_ABSCISSAS
        .par_iter()
        .map(|&x| {
            let b = J_eval(&f, &g, x, cfg, Mode::Brute)?;
            let s = J_eval(&f, &g, x, cfg, Mode::Fast)?;
            let d = (b - s).norm();
            Ok(SweepRow { x, brute: b, model: s, diff: d, scaled: d * x.powf(2.5) })
        })
        .collect();
    Ok(finish("J", rows?, true))
}

/// `|K(S,S) - KSS_asym| * eta^2` at `A`, `eps`.
#[allow(non_snake_case)]
pub fn k_sweep(A: C64, epsilon: f64, cfg: &QuadPanelConfig) -> Result<Sweep> {
    let s = Ansatz::new(ansatz_constants(A, epsilon)?);
    let rows: Result<Vec<SweepRow>> = K_ABSCISSAS
        .par_iter()
        .map(|&e| {
            let b = K_eval(&s, &s, e, cfg)?;
            let m = KSS_asym(&s.p, e)?;
            let d = (b - m).norm();
            Ok(SweepRow { x: e, brute: b, model: m, diff: d, scaled: d * e * e })
        })
        .collect();
    Ok(finish("K", rows?, true))
}

/// Two sweeps: `|I(S,S,S) - ISSS_asym| * xi^{2 - gamma/2}`, and the residual
/// `-(3 i eps / 4 pi^2) I(S,S,S) - S'` (its `model` is zero).
#[allow(non_snake_case)]
pub fn i_sweeps(A: C64, epsilon: f64, gamma: f64, cfg: &QuadPanelConfig) -> Result<(Sweep, Sweep)> {
    let s = Ansatz::new(ansatz_constants(A, epsilon)?);
    let t = k_table(&s, &s, cfg, 40.0)?;
    let vals: Result<Vec<C64>> =
        ASYM_ABSCISSAS.par_iter().map(|&x| Ok(i_eval_table(&t, &s, &s, &s, x, cfg, Mode::Brute)?.total)).collect();
    let vals = vals?;
    let w = 2.0 - gamma / 2.0;
    let mut asym = Vec::new();
    let mut resid = Vec::new();
    for (&x, &b) in ASYM_ABSCISSAS.iter().zip(&vals) {
        let m = ISSS_asym(&s.p, x)?;
        let d = (b - m).norm();
        asym.push(SweepRow { x, brute: b, model: m, diff: d, scaled: d * x.powf(w) });
        let r = -coupling(epsilon) * b - s.deriv(x);
        resid.push(SweepRow { x, brute: r, model: C64::new(0.0, 0.0), diff: r.norm(), scaled: r.norm() * x.powf(w) });
    }
    Ok((finish("I", asym, true), finish("I_residual", resid, true)))
}

/// Runs the sweeps for `which` at the standard amplitude `A = 0.2`, `eps = -1`.
pub fn run(which: Which, cfg: &QuadPanelConfig, gamma: f64) -> Result<Vec<Sweep>> {
    let a = C64::new(0.2, 0.0);
    Ok(match which {
        Which::Airy => vec![airy_sweep()?],
        Which::Fresnel => vec![fresnel_sweep()],
        Which::J => vec![j_sweep(cfg)?],
        Which::K => vec![k_sweep(a, -1.0, cfg)?],
        Which::I => {
            let (x, y) = i_sweeps(a, -1.0, gamma, cfg)?;
            vec![x, y]
        }
    })
}
