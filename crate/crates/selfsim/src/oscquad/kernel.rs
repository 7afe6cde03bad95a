//! The quadratic-phase operator `K(f, g)` and its tabulation.
//!
//! Splitting each field into smooth part and ripple gives four products,
//! each with a cubic phase in `nu`. Their stationary points make `K` a sum
//! `K0 + e^{-3 i eta^3/16} K1 + e^{-2 i eta^3/9} K2` of slowly varying
//! components, tabulated separately on `s = sqrt|eta|` as `kappa = K s`
//! (`K0` behaves like `kappa_pm |eta|^{-1/2}` at the origin).
//!
//! When `f` or `g` jumps at zero, `K` also carries `e^{3 i eta^3 / 4} a(eta)`
//! from the endpoints `nu = +-eta`; its leading term is removed from `K0`
//! and handed to `J` as one more component.

use super::segment::{integrate, plan, Osc, PlanSpec, QuadStats, Zone};
use super::QuadPanelConfig;
use crate::core_model::field::{Field, C3};
use crate::error::{Error, Result};
use crate::numerics::{cis, smoothstep, CSpline};
use num_complex::Complex64 as C64;
use rayon::prelude::*;

pub(crate) const ZERO: C64 = C64 { re: 0.0, im: 0.0 };

/// Cubic phase coefficients of the `K1` and `K2` components.
pub const K1_PHASE: f64 = -3.0 / 16.0;
pub const K2_PHASE: f64 = -2.0 / 9.0;
/// Cubic phase coefficient of the jump component.
pub const JUMP_PHASE: f64 = 0.75;

/// Leibniz rule for value and two derivatives.
pub(crate) fn mul3(a: C3, b: C3) -> C3 {
    [a[0] * b[0], a[1] * b[0] + a[0] * b[1], a[2] * b[0] + 2.0 * a[1] * b[1] + a[0] * b[2]]
}

pub(crate) fn conj3(a: C3) -> C3 {
    [a[0].conj(), a[1].conj(), a[2].conj()]
}

pub(crate) fn scale3(a: C3, k: f64) -> C3 {
    [a[0], a[1] * k, a[2] * k * k]
}

fn real3(v: (f64, f64, f64)) -> C3 {
    [C64::new(v.0, 0.0), C64::new(v.1, 0.0), C64::new(v.2, 0.0)]
}

fn mirror3(v: C3) -> C3 {
    [v[0].conj(), -v[1].conj(), v[2].conj()]
}

/// A function of `eta` that `J` integrates against:
/// `base + sum_i e^{i c_i eta^3} a_i(eta)`.
pub trait Kernel: Sync {
    /// Regular part with two derivatives; `-0.0` selects the left limit.
    fn base(&self, eta: f64) -> C3;
    /// Coefficients of `|eta|^{-1/2}` in `base` as `eta -> 0+` and `eta -> 0-`.
    fn singular(&self) -> (C64, C64) {
        (ZERO, ZERO)
    }
    fn zones(&self) -> Vec<(f64, f64)> {
        Vec::new()
    }
    fn scale(&self, _eta: f64) -> f64 {
        1.0
    }
    fn is_zero(&self) -> bool {
        false
    }
    /// Cubic phase coefficients `c_i` of the extra components.
    fn channels(&self) -> Vec<f64> {
        Vec::new()
    }
    /// Amplitude `a_i` with two derivatives.
    fn chan(&self, _i: usize, _eta: f64) -> C3 {
        [ZERO; 3]
    }
    fn chan_zones(&self, _i: usize) -> Vec<(f64, f64)> {
        self.zones()
    }

    /// Point value of the whole kernel.
    fn value(&self, eta: f64) -> C64 {
        let mut v = self.base(eta)[0];
        for (i, c) in self.channels().into_iter().enumerate() {
            v += self.chan(i, eta)[0] * cis(c * eta * eta * eta);
        }
        v
    }
}

/// A field used directly as the second argument of `J`.
pub struct FieldKernel<'a>(pub &'a dyn Field);

impl Kernel for FieldKernel<'_> {
    fn base(&self, eta: f64) -> C3 {
        self.0.smooth(eta)
    }
    fn zones(&self) -> Vec<(f64, f64)> {
        let mut z = Vec::new();
        for (a, b) in self.0.rough_zones() {
            z.push((a, b));
            z.push((-b, -a));
        }
        z
    }
    fn scale(&self, eta: f64) -> f64 {
        self.0.scale(eta.abs())
    }
    fn is_zero(&self) -> bool {
        self.0.is_zero()
    }
    fn channels(&self) -> Vec<f64> {
        if self.0.has_ripple() {
            vec![-8.0 / 9.0]
        } else {
            Vec::new()
        }
    }
    fn chan(&self, _i: usize, eta: f64) -> C3 {
        self.0.ripple(eta)
    }
}

/// `eta -> conj k(-eta)`.
pub struct Mirror<'a>(pub &'a dyn Kernel);

impl Kernel for Mirror<'_> {
    fn base(&self, eta: f64) -> C3 {
        mirror3(self.0.base(-eta))
    }
    fn singular(&self) -> (C64, C64) {
        let (p, m) = self.0.singular();
        (m.conj(), p.conj())
    }
    fn zones(&self) -> Vec<(f64, f64)> {
        self.0.zones().into_iter().map(|(a, b)| (-b, -a)).collect()
    }
    fn scale(&self, eta: f64) -> f64 {
        self.0.scale(-eta)
    }
    fn is_zero(&self) -> bool {
        self.0.is_zero()
    }
    fn channels(&self) -> Vec<f64> {
        self.0.channels()
    }
    fn chan(&self, i: usize, eta: f64) -> C3 {
        mirror3(self.0.chan(i, -eta))
    }
    fn chan_zones(&self, i: usize) -> Vec<(f64, f64)> {
        self.0.chan_zones(i).into_iter().map(|(a, b)| (-b, -a)).collect()
    }
}

/// Window sending the `nu = eta/2` stationary point of a ripple product to `K1`.
fn k1_window(t: f64) -> (f64, f64, f64) {
    let (s, d1, d2) = smoothstep((t - 0.9) / 0.5);
    (1.0 - s, -d1 / 0.5, -d2 / 0.25)
}

/// One (smooth | ripple) x (smooth | ripple) product in the `K` integrand,
/// split into the part that stays in `K0` and the part for `K1`/`K2`.
struct KChan<'a> {
    f: &'a dyn Field,
    g: &'a dyn Field,
    eta: f64,
    rf: bool,
    rg: bool,
}

impl KChan<'_> {
    fn args(&self, nu: f64) -> (f64, f64) {
        (0.5 * (self.eta + nu), 0.5 * (self.eta - nu))
    }
    /// Weight of the oscillating component with derivatives in `nu`.
    fn weight(&self, nu: f64) -> C3 {
        let e = self.eta;
        match (self.rf, self.rg) {
            (false, false) => [ZERO; 3],
            (true, true) => [C64::new(1.0, 0.0), ZERO, ZERO],
            (true, false) => {
                let (w, d1, d2) = k1_window(nu / e);
                real3((w, d1 / e, d2 / (e * e)))
            }
            (false, true) => {
                let (w, d1, d2) = k1_window(-nu / e);
                real3((w, -d1 / e, d2 / (e * e)))
            }
        }
    }
}

impl Osc<2> for KChan<'_> {
    fn phase(&self, nu: f64) -> [f64; 4] {
        let e = self.eta;
        let (u1, u2) = self.args(nu);
        let mut ph = [0.75 * e * nu * nu, 1.5 * e * nu, 1.5 * e, 0.0];
        if self.rf {
            let d = [-8.0 / 9.0 * u1 * u1 * u1, -4.0 / 3.0 * u1 * u1, -4.0 / 3.0 * u1, -2.0 / 3.0];
            ph.iter_mut().zip(d).for_each(|(p, d)| *p += d);
        }
        if self.rg {
            let d = [-8.0 / 9.0 * u2 * u2 * u2, 4.0 / 3.0 * u2 * u2, -4.0 / 3.0 * u2, 2.0 / 3.0];
            ph.iter_mut().zip(d).for_each(|(p, d)| *p += d);
        }
        ph
    }
    fn full(&self, nu: f64) -> [C64; 2] {
        let (u1, u2) = self.args(nu);
        let a = if self.rf { self.f.ripple(u1)[0] } else { self.f.smooth(u1)[0] };
        let b = if self.rg { self.g.ripple(u2)[0] } else { self.g.smooth(u2)[0] };
        let v = a * b;
        let w = self.weight(nu)[0];
        [v * (1.0 - w), v * w]
    }
    fn smooth(&self, nu: f64) -> [C3; 2] {
        let (u1, u2) = self.args(nu);
        let a = if self.rf { self.f.ripple(u1) } else { self.f.smooth(u1) };
        let b = if self.rg { self.g.ripple(u2) } else { self.g.smooth(u2) };
        let v = mul3(scale3(a, 0.5), scale3(b, -0.5));
        let wv = mul3(self.weight(nu), v);
        [[v[0] - wv[0], v[1] - wv[1], v[2] - wv[2]], wv]
    }
}

/// Components `[K0, K1, K2]` of `K(f, g)(eta)` (demodulated), with work counters.
pub fn k_components(f: &dyn Field, g: &dyn Field, eta: f64, cfg: &QuadPanelConfig) -> Result<([C64; 3], QuadStats)> {
    if eta == 0.0 || !eta.is_finite() {
        return Err(Error::Domain(format!("K needs a finite nonzero eta, got {eta}")));
    }
    let mut out = [ZERO; 3];
    let mut stats = QuadStats::default();
    if f.is_zero() || g.is_zero() {
        return Ok((out, stats));
    }
    let q = cfg.q();
    let mut zones = Vec::new();
    for (a, b) in f.rough_zones() {
        zones.push(Zone { a: 2.0 * a - eta, b: 2.0 * b - eta });
        zones.push(Zone { a: -2.0 * b - eta, b: -2.0 * a - eta });
    }
    for (a, b) in g.rough_zones() {
        zones.push(Zone { a: eta - 2.0 * b, b: eta - 2.0 * a });
        zones.push(Zone { a: eta + 2.0 * a, b: eta + 2.0 * b });
    }
    let mut cores = Vec::new();
    if eta.abs() < 8.0 {
        let c = 2.0 * eta.abs() + 2.0;
        cores.push((-c, c));
    }
    let scale = |nu: f64| 2.0 * f.scale((0.5 * (eta + nu)).abs()).min(g.scale((0.5 * (eta - nu)).abs()));
    // nu-range where both factors can be non-negligible
    let radius = match (f.support(), g.support()) {
        (Some(a), Some(b)) => (2.0 * a + eta.abs()).min(2.0 * b + eta.abs()),
        (Some(a), None) | (None, Some(a)) => 2.0 * a + eta.abs(),
        _ => 1e9,
    };
    let (w1, w2) = (0.9 * eta, 1.4 * eta);
    for (rf, rg) in [(false, false), (true, false), (false, true), (true, true)] {
        if (rf && !f.has_ripple()) || (rg && !g.has_ripple()) {
            continue;
        }
        let mut z = zones.clone();
        if rf != rg {
            let (a, b) = if rf { (w1, w2) } else { (-w2, -w1) };
            z.push(Zone { a: a.min(b), b: a.max(b) });
        }
        let sp = PlanSpec { breaks: vec![0.0, eta, -eta], zones: z, cores: cores.clone(), singular: None, scale: &scale, q, r: cfg.r(), radius };
        let p = KChan { f, g, eta, rf, rg };
        let segs = plan(&p, &sp);
        let ([a, b], st) = integrate(&p, &segs, cfg.max_panels)?;
        stats.merge(&st);
        out[0] += a;
        let e3 = eta * eta * eta;
        if rf && rg {
            out[2] += b * cis(-K2_PHASE * e3);
        } else if rf || rg {
            out[1] += b * cis(-K1_PHASE * e3);
        }
    }
    Ok((out, stats))
}

/// `K(f, g)(eta)` for `eta != 0`.
#[allow(non_snake_case)]
pub fn K_eval(f: &dyn Field, g: &dyn Field, eta: f64, cfg: &QuadPanelConfig) -> Result<C64> {
    let ([k0, k1, k2], _) = k_components(f, g, eta, cfg)?;
    let e3 = eta * eta * eta;
    Ok(k0 + k1 * cis(K1_PHASE * e3) + k2 * cis(K2_PHASE * e3))
}

/// Blend that switches the jump component on for `|eta| >= 2.5`.
fn blend(eta: f64) -> (f64, f64, f64) {
    let (b, d1, d2) = smoothstep(eta.abs() - 1.5);
    (b, if eta < 0.0 { -d1 } else { d1 }, d2)
}

/// Jump size `f(0+) - f(0-)`.
fn jump_of(f: &dyn Field) -> C64 {
    C64::new(0.0, 2.0 * f.pos(0.0).im)
}

/// Blended jump amplitude `a(eta)` (the component is `e^{3 i eta^3/4} a`).
fn jump_amp(f: &dyn Field, g: &dyn Field, df: C64, dg: C64, eta: f64) -> C3 {
    let b = blend(eta);
    if b.0 == 0.0 && b.1 == 0.0 {
        return [ZERO; 3];
    }
    let c = C64::new(0.0, -1.0) / (1.5 * eta * eta);
    let c3 = [c, -2.0 * c / eta, 6.0 * c / (eta * eta)];
    let fs = f.smooth(eta);
    let gs = g.smooth(eta);
    let mut inner = [ZERO; 3];
    for i in 0..3 {
        inner[i] = fs[i] * dg + df * gs[i];
    }
    mul3(mul3(real3(b), c3), inner)
}

/// One side of one component. `singular` sides interpolate `kappa = K s`
/// in `s`; regular sides interpolate `K` in `|eta|`.
#[derive(Debug, Clone)]
struct KSide {
    s_last: f64,
    spline: CSpline,
    singular: bool,
    kappa0: C64,
    end_eta: f64,
    end_k: C64,
}

impl KSide {
    fn new(s: &[f64], kap: Vec<C64>, singular: bool) -> KSide {
        let n = s.len();
        let (end_eta, end_k) = (s[n - 1] * s[n - 1], kap[n - 1] / s[n - 1]);
        if singular {
            let spline = CSpline::with_estimated_ends(s, &kap);
            let kappa0 = spline.eval(0.0);
            KSide { s_last: s[n - 1], spline, singular, kappa0, end_eta, end_k }
        } else {
            let t: Vec<f64> = s.iter().map(|x| x * x).collect();
            let k: Vec<C64> = kap.iter().zip(s).map(|(k, x)| k / x).collect();
            let spline = CSpline::with_estimated_ends(&t, &k);
            KSide { s_last: s[n - 1], spline, singular, kappa0: ZERO, end_eta, end_k }
        }
    }

    /// Component and two derivatives with respect to `|eta|`.
    fn eval3(&self, t: f64) -> C3 {
        let s = t.sqrt();
        if s > self.s_last {
            // |eta|^{-1/2} continuation; a fixed exponent keeps the table linear in its data
            let k = self.end_k * (self.end_eta / t).sqrt();
            return [k, -0.5 * k / t, 0.75 * k / (t * t)];
        }
        if !self.singular {
            let (a, b, c) = self.spline.eval3(t);
            return [a, b, c];
        }
        let (kp, dkp, ddkp) = self.spline.eval3(s);
        let k = kp / s;
        let ks = dkp / s - kp / (s * s);
        let kss = ddkp / s - 2.0 * dkp / (s * s) + 2.0 * kp / (s * s * s);
        let sp = 0.5 / s;
        let spp = -0.25 / (s * s * s);
        [k, ks * sp, kss * sp * sp + ks * spp]
    }
}

/// Tabulated components of `K(f, g)` on both sides of the origin.
#[derive(Debug, Clone)]
pub struct KTable {
    /// `(pos, neg)` per component `K0, K1, K2`; `K1`/`K2` only with ripple.
    comps: Vec<(KSide, KSide)>,
    pub s_max: f64,
    pub stats: QuadStats,
}

/// Node spacing of [`KTable`] in `s`.
pub const TABLE_DS: f64 = 0.00625;

/// The `s = sqrt|eta|` nodes used by [`KTable`].
pub fn table_nodes(s_max: f64) -> Vec<f64> {
    let n = ((s_max - 0.01) / TABLE_DS).ceil() as usize;
    (0..=n).map(|k| 0.01 + k as f64 * TABLE_DS).collect()
}

impl KTable {
    /// Tabulate the components of `K(f, g)` (minus the blended jump term) on
    /// `|eta| <= s_max^2`. With `same` the fields coincide and the negative side
    /// follows by conjugation.
    pub fn build(f: &dyn Field, g: &dyn Field, cfg: &QuadPanelConfig, s_max: f64, same: bool) -> Result<KTable> {
        let nodes = table_nodes(s_max);
        let (df, dg) = (jump_of(f), jump_of(g));
        let mut jobs: Vec<f64> = nodes.iter().map(|&s| s * s).collect();
        if !same {
            jobs.extend(nodes.iter().map(|&s| -s * s));
        }
        let vals: Vec<Result<([C64; 3], QuadStats)>> = jobs
            .par_iter()
            .map(|&eta| {
                let (mut k, st) = k_components(f, g, eta, cfg)?;
                if df != ZERO || dg != ZERO {
                    k[0] -= cis(JUMP_PHASE * eta * eta * eta) * jump_amp(f, g, df, dg, eta)[0];
                }
                let s = eta.abs().sqrt();
                Ok((k.map(|v| v * s), st))
            })
            .collect();
        let mut stats = QuadStats::default();
        let mut kap = Vec::with_capacity(vals.len());
        for v in vals {
            let (k, st) = v?;
            stats.merge(&st);
            kap.push(k);
        }
        let n = nodes.len();
        let ncomp = if f.has_ripple() || g.has_ripple() { 3 } else { 1 };
        let mut comps = Vec::with_capacity(ncomp);
        for c in 0..ncomp {
            let pos: Vec<C64> = kap[..n].iter().map(|k| k[c]).collect();
            let neg: Vec<C64> = if same { pos.iter().map(|k| k.conj()).collect() } else { kap[n..].iter().map(|k| k[c]).collect() };
            comps.push((KSide::new(&nodes, pos, c == 0), KSide::new(&nodes, neg, c == 0)));
        }
        Ok(KTable { comps, s_max, stats })
    }

    pub fn n_components(&self) -> usize {
        self.comps.len()
    }

    /// Component `c` and two `eta`-derivatives.
    pub fn eval3(&self, c: usize, eta: f64) -> C3 {
        let (pos, neg) = &self.comps[c];
        if eta.is_sign_negative() {
            mirror_sign(neg.eval3(-eta))
        } else {
            pos.eval3(eta)
        }
    }

    /// Sum of the tabulated components at `eta`.
    pub fn value(&self, eta: f64) -> C64 {
        let e3 = eta * eta * eta;
        let mut v = self.eval3(0, eta)[0];
        if self.comps.len() == 3 {
            v += self.eval3(1, eta)[0] * cis(K1_PHASE * e3) + self.eval3(2, eta)[0] * cis(K2_PHASE * e3);
        }
        v
    }

    /// `(kappa_+, kappa_-)` of `K0`.
    pub fn kappa(&self) -> (C64, C64) {
        (self.comps[0].0.kappa0, self.comps[0].1.kappa0)
    }
}

fn mirror_sign(v: C3) -> C3 {
    [v[0], -v[1], v[2]]
}

/// `K(f, g)` as a kernel: table components plus the analytic jump component.
pub struct KView<'a> {
    pub table: &'a KTable,
    pub f: &'a dyn Field,
    pub g: &'a dyn Field,
    df: C64,
    dg: C64,
}

impl<'a> KView<'a> {
    pub fn new(table: &'a KTable, f: &'a dyn Field, g: &'a dyn Field) -> KView<'a> {
        KView { table, f, g, df: jump_of(f), dg: jump_of(g) }
    }

    fn has_jump(&self) -> bool {
        self.df != ZERO || self.dg != ZERO
    }
}

impl Kernel for KView<'_> {
    fn base(&self, eta: f64) -> C3 {
        self.table.eval3(0, eta)
    }
    fn singular(&self) -> (C64, C64) {
        self.table.kappa()
    }
    fn zones(&self) -> Vec<(f64, f64)> {
        vec![(-3.0, -1.0), (1.0, 3.0)]
    }
    fn scale(&self, eta: f64) -> f64 {
        (0.5 * eta.abs()).max(1.0)
    }
    fn is_zero(&self) -> bool {
        self.f.is_zero() || self.g.is_zero()
    }
    fn channels(&self) -> Vec<f64> {
        let mut c = Vec::new();
        if self.table.n_components() == 3 {
            c.extend([K1_PHASE, K2_PHASE]);
        }
        if self.has_jump() {
            c.push(JUMP_PHASE);
        }
        c
    }
    fn chan(&self, i: usize, eta: f64) -> C3 {
        let nt = self.table.n_components() - 1;
        if i < nt {
            self.table.eval3(i + 1, eta)
        } else {
            jump_amp(self.f, self.g, self.df, self.dg, eta)
        }
    }
    fn chan_zones(&self, i: usize) -> Vec<(f64, f64)> {
        if i < self.table.n_components() - 1 {
            return self.zones();
        }
        let mut z = vec![(-2.5, -1.5), (1.5, 2.5)];
        for (a, b) in self.f.rough_zones().into_iter().chain(self.g.rough_zones()) {
            z.push((a, b));
            z.push((-b, -a));
        }
        z
    }
}
