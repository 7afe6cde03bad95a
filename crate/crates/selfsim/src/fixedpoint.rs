//! Picard iteration for the remainder `z` around `S_A`, and the inverse of the
//! boundary map `A -> (c, alpha)`.
//!
//! `I(v, v, v)` with `v = S_A + z` is evaluated as `J(v, K(S,S)) / 2 +
//! J(v, K(z, S + v)) / 2`, so the `K(S,S)` table is built once per `A`.
//! The part of `J` carried by the `2 xi / 3` stationary point rides on
//! `exp(-8 i xi^3 / 9)`; its antiderivative is taken in closed form through the
//! ripple channel and only the small leftover is integrated on a resolved grid.

use crate::ansatz::{ansatz_constants, Ansatz, AnsatzParams};
use crate::core_model::config::{BoundaryData, ModelConfig};
use crate::core_model::field::{ripple_carrier, Field, SpectralField, SumField, TailModel};
use crate::core_model::grid::{make_grid, resolved_refinement};
use crate::core_model::norm::zk_norm;
use crate::error::{Error, Result};
use crate::numerics::{gauss8, smoothstep, CSpline};
use crate::oscquad::{i_eval_table, k_table, JParts, Mode, QuadPanelConfig};
use num_complex::Complex64 as C64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

const ZERO: C64 = C64 { re: 0.0, im: 0.0 };
const MAX_ITER: usize = 50;

/// `3 i eps / (4 pi^2)`.
pub fn coupling(epsilon: f64) -> C64 {
    C64::new(0.0, 3.0 * epsilon / (4.0 * PI * PI))
}

/// Grid, quadrature controls and mode shared by all Picard steps.
#[derive(Debug, Clone)]
pub struct Setup {
    pub config: ModelConfig,
    pub quad: QuadPanelConfig,
    pub grid: Vec<f64>,
    pub mode: Mode,
}

impl Setup {
    pub fn new(config: ModelConfig) -> Result<Setup> {
        config.validate()?;
        let grid = make_grid(&config, config.n_low, config.n_high)?;
        let quad = QuadPanelConfig::for_xi_max(config.tol_quad, config.xi_max);
        Ok(Setup { config, quad, grid, mode: Mode::Brute })
    }

    pub fn xi_max(&self) -> f64 {
        self.config.xi_max
    }
}

#[derive(Debug, Clone)]
#[allow(non_snake_case)]
pub struct FixedPointState {
    pub params: AnsatzParams,
    pub z: SpectralField,
    pub calI: C64,
    pub c: f64,
    pub alpha: f64,
    pub iteration: usize,
    pub residual_history: Vec<f64>,
    pub contraction_ratio: f64,
    /// `I(v, v, v)` on the grid at the last step.
    pub itilde: Vec<C64>,
}

impl FixedPointState {
    pub fn boundary(&self) -> BoundaryData {
        BoundaryData { c: self.c, alpha: self.alpha }
    }

    /// `v = S_A + z` at `xi` (conjugate rule for `xi < 0`).
    pub fn v(&self, xi: f64) -> C64 {
        Ansatz::new(self.params).value(xi) + self.z.value(xi)
    }
}

/// One row of the per-iteration log.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct IterLog {
    pub iteration: usize,
    pub residual: f64,
    pub ratio: f64,
    pub c: f64,
    pub alpha: f64,
}

fn add_parts(a: JParts, b: JParts) -> JParts {
    let mut stats = a.stats;
    stats.merge(&b.stats);
    JParts { total: a.total + b.total, main: a.main + b.main, j2: a.j2 + b.j2, stats }
}

/// `I(v, v, v)` at each `xi` with `v = S_A + z`, expanded around `K(S,S)`.
pub fn itilde_parts(p: &AnsatzParams, z: &SpectralField, xs: &[f64], setup: &Setup) -> Result<Vec<JParts>> {
    let s = Ansatz::new(*p);
    let v = SumField { a: &s, b: z };
    if v.is_zero() {
        return Ok(vec![JParts::default(); xs.len()]);
    }
    let w = SumField { a: &s, b: &v };
    let quad = &setup.quad;
    let tss = if s.is_zero() { None } else { Some(k_table(&s, &s, quad, setup.xi_max())?) };
    let tz = if z.is_zero() { None } else { Some(k_table(z, &w, quad, setup.xi_max())?) };
    xs.par_iter()
        .map(|&x| {
            let mut r = JParts::default();
            if let Some(t) = &tss {
                r = add_parts(r, i_eval_table(t, &s, &s, &v, x, quad, setup.mode)?);
            }
            if let Some(t) = &tz {
                r = add_parts(r, i_eval_table(t, z, &w, &v, x, quad, setup.mode)?);
            }
            Ok(r)
        })
        .collect()
}

/// `I(v, v, v)(xi)` for `v = S_A + z`.
#[allow(non_snake_case)]
pub fn I_tilde(p: &AnsatzParams, z: &SpectralField, xi: f64, setup: &Setup) -> Result<C64> {
    Ok(itilde_parts(p, z, &[xi], setup)?[0].total)
}

/// Cumulative `int_0^xi coupling * I` on the grid, from the channel split.
struct Antiderivative {
    /// Values at the grid nodes.
    cum: Vec<C64>,
    /// Demodulated ripple of the integral at the nodes.
    ripple: Vec<C64>,
    /// Smooth integrand `coupling * main` at the last node, plus the leftover there.
    end_slope: C64,
}

fn ripple_blend(xi: f64) -> (f64, f64, f64) {
    smoothstep(xi - 2.0)
}

fn antiderivative(grid: &[f64], parts: &[JParts], kappa: C64) -> Antiderivative {
    let n = grid.len();
    let m: Vec<C64> = parts.iter().map(|q| kappa * q.main).collect();
    let o: Vec<C64> = grid.iter().zip(parts).map(|(&x, q)| kappa * q.j2 * ripple_carrier(x).conj()).collect();
    // Z = -3 i o w / (8 xi^2) so that (Z e)' = o w e + Z' e
    let zr: Vec<C64> = grid
        .iter()
        .zip(&o)
        .map(|(&x, &ov)| {
            let w = ripple_blend(x).0;
            if w == 0.0 {
                ZERO
            } else {
                C64::new(0.0, -3.0 / (8.0 * x * x)) * ov * w
            }
        })
        .collect();
    let ms = CSpline::with_estimated_ends(grid, &m);
    let os = CSpline::with_estimated_ends(grid, &o);
    let zs = CSpline::with_estimated_ends(grid, &zr);
    let left = |x: f64| -> C64 {
        let w = ripple_blend(x).0;
        (os.eval(x) * (1.0 - w) - zs.eval3(x).1) * ripple_carrier(x)
    };
    let fine = resolved_refinement(grid);
    let mut cum = Vec::with_capacity(n);
    cum.push(ZERO);
    let mut acc = ZERO;
    let mut fi = 0;
    for j in 1..n {
        let (a, b) = (grid[j - 1], grid[j]);
        for (t, wt) in gauss8(a, b) {
            acc += ms.eval(t) * wt;
        }
        while fi + 1 < fine.len() && fine[fi + 1] <= b {
            for (t, wt) in gauss8(fine[fi], fine[fi + 1]) {
                acc += left(t) * wt;
            }
            fi += 1;
        }
        cum.push(acc + zr[j] * ripple_carrier(b));
    }
    let x = grid[n - 1];
    Antiderivative { cum, ripple: zr, end_slope: m[n - 1] + left(x) }
}

/// `int_X^inf F eta^{-1 + 3 i a} e^{-8 i eta^3 / 9} d eta` by two integrations by parts.
fn f_tail(p: &AnsatzParams, x: f64) -> C64 {
    if p.F == ZERO {
        return ZERO;
    }
    let m = C64::new(-1.0, 3.0 * p.a);
    // u = g / (i phi'), phi' = -8 x^2 / 3; integral = -e^{i phi} (u - u' / (i phi'))
    let ip = C64::new(0.0, -8.0 * x * x / 3.0);
    let u = p.F * (m * x.ln()).exp() / ip;
    let du = u * (m - 2.0) / x;
    -(u - du / ip) * ripple_carrier(x)
}

/// `int_1^X E e^{i a ln eta} / eta d eta`, using `E / (i a) = 4 pi^2 i A / (3 eps)`.
fn e_integral(p: &AnsatzParams, x: f64) -> C64 {
    let e_over_ia = C64::new(0.0, 4.0 * PI * PI / (3.0 * p.epsilon)) * p.A;
    (C64::new(0.0, p.a * x.ln()).exp() - 1.0) * e_over_ia
}

fn cal_i_from(p: &AnsatzParams, grid: &[f64], ad: &Antiderivative, kappa: C64) -> C64 {
    let x = *grid.last().unwrap();
    ad.cum[grid.len() - 1] / kappa - e_integral(p, x) + f_tail(p, x)
}

/// `(c, alpha)` from `c + 3 i alpha / (2 pi) = A + coupling * calI`.
pub fn boundary_from(p: &AnsatzParams, cal_i: C64) -> BoundaryData {
    let c0 = p.A + coupling(p.epsilon) * cal_i;
    BoundaryData { c: c0.re, alpha: 2.0 * PI / 3.0 * c0.im }
}

/// `calI(A, z)`: the regularized integral of `I(S_A + z)` over `(0, inf)`.
#[allow(non_snake_case)]
pub fn cal_I(p: &AnsatzParams, z: &SpectralField, setup: &Setup) -> Result<C64> {
    if p.A == ZERO && z.is_zero() {
        return Ok(ZERO);
    }
    let parts = itilde_parts(p, z, &setup.grid, setup)?;
    let kappa = coupling(p.epsilon);
    let ad = antiderivative(&setup.grid, &parts, kappa);
    Ok(cal_i_from(p, &setup.grid, &ad, kappa))
}

/// Result of one application of the map.
#[derive(Debug, Clone)]
pub struct PsiOutput {
    pub z: SpectralField,
    pub cal_i: C64,
    pub boundary: BoundaryData,
    pub itilde: Vec<C64>,
}

/// `z -> Psi_{c(A,z), alpha(A,z)}(S_A + z) - S_A` on the grid.
pub fn psi_apply(p: &AnsatzParams, z: &SpectralField, setup: &Setup) -> Result<PsiOutput> {
    let grid = &setup.grid;
    let n = grid.len();
    let parts = itilde_parts(p, z, grid, setup)?;
    let kappa = coupling(p.epsilon);
    let ad = antiderivative(grid, &parts, kappa);
    let cal_i = cal_i_from(p, grid, &ad, kappa);
    let bd = boundary_from(p, cal_i);
    let c0 = C64::new(bd.c, 3.0 * bd.alpha / (2.0 * PI));
    let s = Ansatz::new(*p);
    let mut values = Vec::with_capacity(n);
    let mut deriv = Vec::with_capacity(n);
    let mut ripple = Vec::with_capacity(n);
    for (j, &x) in grid.iter().enumerate() {
        values.push(if j == 0 { c0 } else { c0 - ad.cum[j] - s.pos(x) });
        deriv.push(if j == 0 { -kappa * parts[0].total } else { -kappa * parts[j].total - s.deriv(x) });
        ripple.push(-(ad.ripple[j] + s.pos_ripple(x)[0]));
    }
    let x = grid[n - 1];
    let e = ripple_carrier(x);
    let sm = values[n - 1] - ripple[n - 1] * e;
    let dsm = -ad.end_slope - s.pos_smooth(x)[1];
    let tail = TailModel::matching(x, sm, dsm, 0.5, 4.0);
    let has_ripple = ripple.iter().any(|r| *r != ZERO);
    let zn = SpectralField::with_ripple(grid.clone(), values, Some(deriv), tail, has_ripple.then_some(ripple))?
        .with_rough(vec![(0.0, 3.0)]);
    Ok(PsiOutput { z: zn, cal_i, boundary: bd, itilde: parts.iter().map(|q| q.total).collect() })
}

/// Z^k norm of `a - b` from the value and derivative samples.
pub fn increment_norm(a: &SpectralField, b: &SpectralField, config: &ModelConfig) -> Result<f64> {
    let da = a.deriv.as_ref().ok_or(Error::MissingDerivative)?;
    let db = b.deriv.as_ref().ok_or(Error::MissingDerivative)?;
    let values = a.values.iter().zip(&b.values).map(|(x, y)| x - y).collect();
    let deriv = da.iter().zip(db).map(|(x, y)| x - y).collect();
    let d = SpectralField::new(a.grid.clone(), values, Some(deriv), TailModel::zero(a.xi_max()))?;
    Ok(zk_norm(&d, config, None)?.zk_norm)
}

/// Largest ratio of consecutive residuals that both sit above the noise floor.
fn contraction(hist: &[f64], floor: f64) -> f64 {
    let mut r: f64 = 0.0;
    let mut any = false;
    for w in hist.windows(2).skip(1) {
        if w[1] > floor && w[0] > 0.0 {
            r = r.max(w[1] / w[0]);
            any = true;
        }
    }
    if !any {
        if let [.., a, b] = hist {
            if *a > 0.0 {
                return b / a;
            }
        }
    }
    r
}

/// Fixed point `z_A` from `z0 = 0`.
#[allow(non_snake_case)]
pub fn solve_fixed_point(A: C64, config: &ModelConfig) -> Result<FixedPointState> {
    let setup = Setup::new(*config)?;
    solve_from(A, &setup, None, None)
}

/// Fixed point from an optional warm start, logging each iteration.
#[allow(non_snake_case)]
pub fn solve_from(
    A: C64,
    setup: &Setup,
    z0: Option<&SpectralField>,
    mut log: Option<&mut Vec<IterLog>>,
) -> Result<FixedPointState> {
    let config = &setup.config;
    if !(A.norm() <= config.smallness) {
        return Err(Error::Domain(format!("|A| = {} exceeds the smallness radius {}", A.norm(), config.smallness)));
    }
    let p = ansatz_constants(A, config.epsilon)?;
    let mut z = match z0 {
        Some(z) if z.grid == setup.grid => z.clone(),
        _ => SpectralField::zero(setup.grid.clone()),
    };
    let mut hist = Vec::new();
    for it in 1..=MAX_ITER {
        let out = psi_apply(&p, &z, setup)?;
        let r = increment_norm(&out.z, &z, config)?;
        hist.push(r);
        let ratio = if hist.len() >= 2 && hist[hist.len() - 2] > 0.0 { r / hist[hist.len() - 2] } else { f64::NAN };
        if let Some(l) = log.as_deref_mut() {
            l.push(IterLog { iteration: it, residual: r, ratio, c: out.boundary.c, alpha: out.boundary.alpha });
        }
        z = out.z;
        if r < config.tol_fixed_point {
            return Ok(FixedPointState {
                params: p,
                z,
                calI: out.cal_i,
                c: out.boundary.c,
                alpha: out.boundary.alpha,
                iteration: it,
                contraction_ratio: contraction(&hist, 100.0 * config.tol_fixed_point),
                residual_history: hist,
                itilde: out.itilde,
            });
        }
    }
    Err(Error::NonConvergence { iterations: MAX_ITER, last: *hist.last().unwrap() })
}

/// `A` with `(c(A, z_A), alpha(A, z_A)) = target`, by Broyden's method.
pub fn invert_boundary(target: BoundaryData, epsilon: f64, config: &ModelConfig) -> Result<C64> {
    invert_boundary_with(target, &Setup::new(config.with_epsilon(epsilon))?)
}

pub fn invert_boundary_with(target: BoundaryData, setup: &Setup) -> Result<C64> {
    target.validate(setup.config.smallness)?;
    if target.c == 0.0 && target.alpha == 0.0 {
        return Ok(ZERO);
    }
    let mut warm: Option<SpectralField> = None;
    let mut eval = |x: [f64; 2]| -> Result<[f64; 2]> {
        let st = solve_from(C64::new(x[0], x[1]), setup, warm.as_ref(), None)?;
        warm = Some(st.z);
        Ok([st.c - target.c, st.alpha - target.alpha])
    };
    // linear part: c = Re A, alpha = (2 pi / 3) Im A
    let mut x = [target.c, 3.0 * target.alpha / (2.0 * PI)];
    let mut b = [[1.0, 0.0], [0.0, 2.0 * PI / 3.0]];
    let mut f = eval(x)?;
    let norm = |v: [f64; 2]| v[0].hypot(v[1]);
    for _ in 0..40 {
        if norm(f) < 1e-8 {
            return Ok(C64::new(x[0], x[1]));
        }
        let det = b[0][0] * b[1][1] - b[0][1] * b[1][0];
        if det.abs() < 1e-300 {
            return Err(Error::Stagnation("singular Broyden matrix".into()));
        }
        let dx = [-(b[1][1] * f[0] - b[0][1] * f[1]) / det, -(-b[1][0] * f[0] + b[0][0] * f[1]) / det];
        let xn = [x[0] + dx[0], x[1] + dx[1]];
        let fn_ = eval(xn)?;
        let df = [fn_[0] - f[0], fn_[1] - f[1]];
        let dd = dx[0] * dx[0] + dx[1] * dx[1];
        if dd == 0.0 {
            return Err(Error::Stagnation(format!("zero step with residual {:e}", norm(f))));
        }
        for i in 0..2 {
            let u = df[i] - (b[i][0] * dx[0] + b[i][1] * dx[1]);
            for j in 0..2 {
                b[i][j] += u * dx[j] / dd;
            }
        }
        x = xn;
        f = fn_;
    }
    Err(Error::Stagnation(format!("residual {:e} after 40 Broyden steps", norm(f))))
}
