//! Conjugate-symmetric fields on the frequency line.
//!
//! A field is described on `xi >= 0`; `xi = 0` stands for the `0+` limit and
//! negative frequencies are conjugates. Every field splits into a smooth part
//! (with two derivatives, used by asymptotic tails) and an optional ripple
//! riding on `exp(-8 i xi^3 / 9)`.

use crate::error::{Error, Result};
use crate::numerics::{cis, CSpline};
use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};
use std::hash::{Hash, Hasher};

pub type C3 = [C64; 3];

const ZERO: C64 = C64 { re: 0.0, im: 0.0 };

pub trait Field: Send + Sync {
    /// Full value at `xi >= 0`. `value(-0.0)` is the `0-` limit.
    fn pos(&self, xi: f64) -> C64;
    /// Smooth part and its first two derivatives at `xi >= 0`.
    fn pos_smooth(&self, xi: f64) -> C3;
    /// Intervals of `(0, inf)` where the smooth part varies on an O(1) scale.
    fn rough_zones(&self) -> Vec<(f64, f64)> {
        Vec::new()
    }
    /// Ripple amplitude and two derivatives at `xi >= 0`; the full value is
    /// `smooth + ripple * exp(-8 i xi^3 / 9)`.
    fn pos_ripple(&self, _xi: f64) -> C3 {
        [ZERO; 3]
    }
    fn has_ripple(&self) -> bool {
        false
    }
    fn is_zero(&self) -> bool {
        false
    }
    /// Length over which the smooth part varies near `xi >= 0` (outside rough zones).
    fn scale(&self, _xi: f64) -> f64 {
        1.0
    }
    /// Content hash for caching; `None` disables caching.
    fn fingerprint(&self) -> Option<u64> {
        None
    }
    /// Radius beyond which the field is negligible, if it has one.
    fn support(&self) -> Option<f64> {
        None
    }

    fn value(&self, xi: f64) -> C64 {
        if !xi.is_sign_negative() {
            self.pos(xi)
        } else {
            self.pos(-xi).conj()
        }
    }

    fn smooth(&self, xi: f64) -> C3 {
        if !xi.is_sign_negative() {
            self.pos_smooth(xi)
        } else {
            let [a, b, c] = self.pos_smooth(-xi);
            [a.conj(), -b.conj(), c.conj()]
        }
    }

    /// Ripple amplitude on the whole line (same carrier for both signs).
    fn ripple(&self, xi: f64) -> C3 {
        if !xi.is_sign_negative() {
            self.pos_ripple(xi)
        } else {
            let [a, b, c] = self.pos_ripple(-xi);
            [a.conj(), -b.conj(), c.conj()]
        }
    }
}

/// `exp(-8 i xi^3 / 9)`.
#[inline]
pub fn ripple_carrier(xi: f64) -> C64 {
    cis(-8.0 / 9.0 * xi * xi * xi)
}

/// Behavior past the last node: `amplitude * (xi/x0)^(-decay + i phase_slope)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TailModel {
    pub amplitude: C64,
    pub phase_slope: f64,
    pub decay: f64,
    pub x0: f64,
}

impl TailModel {
    pub fn zero(x0: f64) -> TailModel {
        TailModel { amplitude: ZERO, phase_slope: 0.0, decay: 1.0, x0 }
    }

    /// Tail matching value and log-derivative at `x0`, decay clamped to `[lo, hi]`.
    pub fn matching(x0: f64, f: C64, df: C64, lo: f64, hi: f64) -> TailModel {
        if f.norm() < 1e-300 || !f.is_finite() || !df.is_finite() {
            return TailModel::zero(x0);
        }
        let w = df * x0 / f;
        TailModel { amplitude: f, phase_slope: w.im, decay: (-w.re).clamp(lo, hi), x0 }
    }

    pub fn eval3(&self, xi: f64) -> C3 {
        if self.amplitude == ZERO {
            return [ZERO; 3];
        }
        let p = C64::new(-self.decay, self.phase_slope);
        let f = self.amplitude * (p * (xi / self.x0).ln()).exp();
        [f, f * p / xi, f * p * (p - 1.0) / (xi * xi)]
    }
}

/// Sampled field with cubic interpolation, tail model and optional ripple channel.
#[derive(Debug, Clone)]
pub struct SpectralField {
    pub grid: Vec<f64>,
    pub values: Vec<C64>,
    pub deriv: Option<Vec<C64>>,
    pub tail: TailModel,
    pub ripple: Option<Vec<C64>>,
    pub rough: Vec<(f64, f64)>,
    smooth_spline: CSpline,
    ripple_spline: Option<CSpline>,
}

impl SpectralField {
    pub fn new(grid: Vec<f64>, values: Vec<C64>, deriv: Option<Vec<C64>>, tail: TailModel) -> Result<Self> {
        Self::with_ripple(grid, values, deriv, tail, None)
    }

    pub fn with_ripple(
        grid: Vec<f64>,
        values: Vec<C64>,
        deriv: Option<Vec<C64>>,
        tail: TailModel,
        ripple: Option<Vec<C64>>,
    ) -> Result<Self> {
        let n = grid.len();
        if n < 2 || grid[0] != 0.0 || !grid.windows(2).all(|w| w[1] > w[0]) {
            return Err(Error::InvalidConfig("grid must start at 0 and increase strictly".into()));
        }
        if values.len() != n || deriv.as_ref().is_some_and(|d| d.len() != n) || ripple.as_ref().is_some_and(|r| r.len() != n) {
            return Err(Error::InvalidConfig("sample count does not match grid".into()));
        }
        let finite = |v: &[C64]| v.iter().all(|z| z.is_finite());
        if !finite(&values) || deriv.as_deref().is_some_and(|d| !finite(d)) || ripple.as_deref().is_some_and(|r| !finite(r)) {
            return Err(Error::InvalidConfig("non-finite samples".into()));
        }
        let (smooth_spline, ripple_spline) = match &ripple {
            None => {
                let s = match &deriv {
                    Some(d) => CSpline::clamped(&grid, &values, d[0], d[n - 1]),
                    None => CSpline::with_estimated_ends(&grid, &values),
                };
                (s, None)
            }
            Some(r) => {
                let sm: Vec<C64> = grid.iter().zip(&values).zip(r).map(|((&x, &v), &a)| v - a * ripple_carrier(x)).collect();
                (CSpline::with_estimated_ends(&grid, &sm), Some(CSpline::with_estimated_ends(&grid, r)))
            }
        };
        Ok(SpectralField { grid, values, deriv, tail, ripple, rough: Vec::new(), smooth_spline, ripple_spline })
    }

    pub fn zero(grid: Vec<f64>) -> SpectralField {
        let n = grid.len();
        let x0 = *grid.last().unwrap();
        SpectralField::new(grid, vec![ZERO; n], Some(vec![ZERO; n]), TailModel::zero(x0)).expect("valid zero field")
    }

    pub fn with_rough(mut self, zones: Vec<(f64, f64)>) -> Self {
        self.rough = zones;
        self
    }

    pub fn xi_max(&self) -> f64 {
        *self.grid.last().unwrap()
    }

    /// Smooth part of the stored samples (ripple removed).
    pub fn smooth_samples(&self) -> Vec<C64> {
        match &self.ripple {
            None => self.values.clone(),
            Some(r) => self.grid.iter().zip(&self.values).zip(r).map(|((&x, &v), &a)| v - a * ripple_carrier(x)).collect(),
        }
    }
}

impl Field for SpectralField {
    fn pos(&self, xi: f64) -> C64 {
        let x_max = self.xi_max();
        if xi > x_max {
            return self.tail.eval3(xi)[0];
        }
        let j = self.grid.partition_point(|&g| g < xi);
        if j < self.grid.len() && self.grid[j] == xi {
            return self.values[j];
        }
        let mut v = self.smooth_spline.eval(xi);
        if let Some(r) = &self.ripple_spline {
            v += r.eval(xi) * ripple_carrier(xi);
        }
        v
    }

    fn pos_smooth(&self, xi: f64) -> C3 {
        if xi > self.xi_max() {
            return self.tail.eval3(xi);
        }
        let (a, b, c) = self.smooth_spline.eval3(xi);
        [a, b, c]
    }

    fn rough_zones(&self) -> Vec<(f64, f64)> {
        self.rough.clone()
    }

    fn pos_ripple(&self, xi: f64) -> C3 {
        match &self.ripple_spline {
            Some(r) if xi <= self.xi_max() => {
                let (a, b, c) = r.eval3(xi);
                [a, b, c]
            }
            _ => [ZERO; 3],
        }
    }

    fn has_ripple(&self) -> bool {
        self.ripple.as_ref().is_some_and(|r| r.iter().any(|v| *v != ZERO))
    }

    fn is_zero(&self) -> bool {
        self.values.iter().all(|v| *v == ZERO)
            && self.ripple.as_ref().is_none_or(|r| r.iter().all(|v| *v == ZERO))
            && self.tail.amplitude == ZERO
    }

    fn scale(&self, xi: f64) -> f64 {
        xi.max(1.0)
    }

    fn fingerprint(&self) -> Option<u64> {
        let mut h = std::hash::DefaultHasher::new();
        1u8.hash(&mut h);
        for x in &self.grid {
            x.to_bits().hash(&mut h);
        }
        let mut put = |v: &[C64]| {
            for z in v {
                z.re.to_bits().hash(&mut h);
                z.im.to_bits().hash(&mut h);
            }
        };
        put(&self.values);
        if let Some(r) = &self.ripple {
            put(r);
        }
        put(&[self.tail.amplitude, C64::new(self.tail.phase_slope, self.tail.decay), C64::new(self.tail.x0, 0.0)]);
        for (a, b) in &self.rough {
            a.to_bits().hash(&mut h);
            b.to_bits().hash(&mut h);
        }
        Some(h.finish())
    }
}

/// Evaluate a sampled field, conjugating for negative `xi`.
pub fn eval_field(f: &SpectralField, xi: f64) -> C64 {
    f.value(xi)
}

/// The zero field.
#[derive(Debug, Clone, Copy, Default)]
pub struct ZeroField;

impl Field for ZeroField {
    fn pos(&self, _xi: f64) -> C64 {
        ZERO
    }
    fn pos_smooth(&self, _xi: f64) -> C3 {
        [ZERO; 3]
    }
    fn is_zero(&self) -> bool {
        true
    }
    fn scale(&self, _xi: f64) -> f64 {
        f64::INFINITY
    }
    fn fingerprint(&self) -> Option<u64> {
        Some(0)
    }
}

/// Sum of two fields.
pub struct SumField<'a> {
    pub a: &'a dyn Field,
    pub b: &'a dyn Field,
}

impl Field for SumField<'_> {
    fn pos(&self, xi: f64) -> C64 {
        self.a.pos(xi) + self.b.pos(xi)
    }
    fn pos_smooth(&self, xi: f64) -> C3 {
        let p = self.a.pos_smooth(xi);
        let q = self.b.pos_smooth(xi);
        [p[0] + q[0], p[1] + q[1], p[2] + q[2]]
    }
    fn rough_zones(&self) -> Vec<(f64, f64)> {
        let mut z = self.a.rough_zones();
        z.extend(self.b.rough_zones());
        z
    }
    fn pos_ripple(&self, xi: f64) -> C3 {
        let p = self.a.pos_ripple(xi);
        let q = self.b.pos_ripple(xi);
        [p[0] + q[0], p[1] + q[1], p[2] + q[2]]
    }
    fn has_ripple(&self) -> bool {
        self.a.has_ripple() || self.b.has_ripple()
    }
    fn is_zero(&self) -> bool {
        self.a.is_zero() && self.b.is_zero()
    }
    fn scale(&self, xi: f64) -> f64 {
        self.a.scale(xi).min(self.b.scale(xi))
    }
    fn fingerprint(&self) -> Option<u64> {
        let mut h = std::hash::DefaultHasher::new();
        (2u8, self.a.fingerprint()?, self.b.fingerprint()?).hash(&mut h);
        Some(h.finish())
    }
    fn support(&self) -> Option<f64> {
        Some(self.a.support()?.max(self.b.support()?))
    }
}

type SmoothFn = dyn Fn(f64) -> C3 + Send + Sync;

/// Field given by a closure returning value and two derivatives on `xi >= 0`.
pub struct FnField {
    f: Box<SmoothFn>,
    rough: Vec<(f64, f64)>,
    support: Option<f64>,
}

impl FnField {
    pub fn new(f: impl Fn(f64) -> C3 + Send + Sync + 'static) -> FnField {
        FnField { f: Box::new(f), rough: Vec::new(), support: None }
    }

    pub fn with_support(mut self, r: f64) -> Self {
        self.support = Some(r);
        self
    }

    pub fn with_rough(mut self, zones: Vec<(f64, f64)>) -> Self {
        self.rough = zones;
        self
    }
}

impl Field for FnField {
    fn pos(&self, xi: f64) -> C64 {
        (self.f)(xi)[0]
    }
    fn pos_smooth(&self, xi: f64) -> C3 {
        (self.f)(xi)
    }
    fn rough_zones(&self) -> Vec<(f64, f64)> {
        self.rough.clone()
    }
    fn support(&self) -> Option<f64> {
        self.support
    }
}

/// Sample any field onto `grid` (values, derivatives, matched tail).
pub fn sample_field(f: &dyn Field, grid: &[f64]) -> Result<SpectralField> {
    let values: Vec<C64> = grid.iter().map(|&x| f.pos(x)).collect();
    let deriv: Vec<C64> = grid.iter().map(|&x| f.pos_smooth(x)[1]).collect();
    let x0 = *grid.last().unwrap();
    let [v, d, _] = f.pos_smooth(x0);
    let tail = TailModel::matching(x0, v, d, 0.0, 4.0);
    SpectralField::new(grid.to_vec(), values, Some(deriv), tail)
}
