//! Piecewise evaluation of `int e^{i phi(x)} G(x) dx` over the real line.
//!
//! The line is cut at breakpoints into segments. A panel segment uses 8-point
//! Gauss panels, each spanning at most half a local period. An asymptotic
//! segment contributes `B(b-) - B(a+)` with `B` the three-term
//! integration-by-parts antiderivative built from the smooth amplitude.
//! Square-root segments carry an inverse square-root endpoint singularity.

use crate::core_model::field::C3;
use crate::error::{Error, Result};
use crate::numerics::{cis, gauss8};
use num_complex::Complex64 as C64;
use std::f64::consts::PI;

const I: C64 = C64 { re: 0.0, im: 1.0 };
const ZERO: C64 = C64 { re: 0.0, im: 0.0 };

/// An oscillatory integrand with `N` amplitude channels sharing one phase.
pub trait Osc<const N: usize>: Sync {
    /// `phi` and its first three derivatives; `phi` is a polynomial of degree <= 3.
    fn phase(&self, x: f64) -> [f64; 4];
    /// Amplitude including any ripple, used on panels.
    fn full(&self, x: f64) -> [C64; N];
    /// Smooth amplitude with two derivatives, used by the asymptotic rule.
    fn smooth(&self, x: f64) -> [C3; N];
    /// Oscillation rate of `full` on top of the phase.
    fn extra_rate(&self, _x: f64) -> f64 {
        0.0
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SegKind {
    Panels { hmax: f64 },
    Asym,
    /// `x = a + s^2`: singular at the left end.
    SqrtLeft { hmax: f64 },
    /// `x = b - s^2`: singular at the right end.
    SqrtRight { hmax: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Segment {
    pub a: f64,
    pub b: f64,
    pub kind: SegKind,
}

/// Work counters and a crude error estimate.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct QuadStats {
    pub panels: usize,
    pub boundary_evals: usize,
    /// Sum of the magnitudes of the last retained asymptotic terms.
    pub err_est: f64,
}

impl QuadStats {
    pub fn merge(&mut self, o: &QuadStats) {
        self.panels += o.panels;
        self.boundary_evals += o.boundary_evals;
        self.err_est += o.err_est;
    }
}

fn one_sided(x: f64, toward: f64) -> f64 {
    let d = 1e-13 * x.abs().max(1.0);
    if toward > x {
        x + d
    } else {
        x - d
    }
}

/// Three-term antiderivative `e^{i phi} (T0 - T1 + T2)` at `x`; also returns `|T2|`.
pub fn ibp_boundary<const N: usize>(p: &impl Osc<N>, x: f64) -> ([C64; N], f64) {
    let [ph, d1, d2, d3] = p.phase(x);
    let w = 1.0 / (I * d1);
    let dw = -I * d2 * w * w;
    let ddw = -I * d3 * w * w - 2.0 * d2 * d2 * w * w * w;
    let e = cis(ph);
    let mut out = [ZERO; N];
    let mut last = 0.0;
    for (o, [g0, g1, g2]) in out.iter_mut().zip(p.smooth(x)) {
        let t0 = g0 * w;
        let t0p = g1 * w + g0 * dw;
        let t1 = t0p * w;
        let t1p = (g2 * w + 2.0 * g1 * dw + g0 * ddw) * w + t0p * dw;
        let t2 = t1p * w;
        last += t2.norm();
        *o = e * (t0 - t1 + t2);
    }
    (out, last)
}

fn add<const N: usize>(acc: &mut [C64; N], v: [C64; N], s: C64) {
    for (a, b) in acc.iter_mut().zip(v) {
        *a += b * s;
    }
}

fn rate<const N: usize>(p: &impl Osc<N>, x: f64) -> f64 {
    p.phase(x)[1].abs() + p.extra_rate(x)
}

/// Integrate over the given segments.
pub fn integrate<const N: usize>(p: &impl Osc<N>, segs: &[Segment], max_panels: usize) -> Result<([C64; N], QuadStats)> {
    let mut acc = [ZERO; N];
    let mut st = QuadStats::default();
    for s in segs {
        if !(s.b > s.a) {
            continue;
        }
        match s.kind {
            SegKind::Asym => {
                if s.b.is_finite() {
                    let (v, e) = ibp_boundary(p, one_sided(s.b, s.a));
                    add(&mut acc, v, C64::new(1.0, 0.0));
                    st.err_est += e;
                    st.boundary_evals += 1;
                }
                if s.a.is_finite() {
                    let (v, e) = ibp_boundary(p, one_sided(s.a, s.b));
                    add(&mut acc, v, C64::new(-1.0, 0.0));
                    st.err_est += e;
                    st.boundary_evals += 1;
                }
            }
            SegKind::Panels { hmax } => {
                if !(s.a.is_finite() && s.b.is_finite()) {
                    return Err(Error::NonConvergentTail(format!("panel segment [{}, {}] is unbounded", s.a, s.b)));
                }
                let mut x = s.a;
                while x < s.b {
                    let mut h = hmax.min(PI / rate(p, x)).min(s.b - x);
                    let r1 = rate(p, x + h);
                    h = h.min(PI / r1);
                    if s.b - (x + h) < 1e-3 * h {
                        h = s.b - x;
                    }
                    for (t, wt) in gauss8(x, x + h) {
                        add(&mut acc, p.full(t), cis(p.phase(t)[0]) * wt);
                    }
                    x += h;
                    st.panels += 1;
                    if st.panels > max_panels {
                        return Err(Error::NonConvergentTail(format!("panel budget {max_panels} exceeded")));
                    }
                }
            }
            SegKind::SqrtLeft { hmax } | SegKind::SqrtRight { hmax } => {
                let left = matches!(s.kind, SegKind::SqrtLeft { .. });
                let map = |u: f64| if left { s.a + u * u } else { s.b - u * u };
                let total = (s.b - s.a).sqrt();
                let floor = total * 1e-9;
                let mut u = 0.0;
                while u < total {
                    let r0 = rate(p, map(u)) * 2.0 * u.max(floor);
                    let mut h = hmax.min(PI / r0).min(u.max(floor)).min(total - u);
                    let r1 = rate(p, map(u + h)) * 2.0 * (u + h);
                    h = h.min(PI / r1);
                    if total - (u + h) < 1e-3 * h {
                        h = total - u;
                    }
                    for (t, wt) in gauss8(u, u + h) {
                        let x = map(t);
                        add(&mut acc, p.full(x), cis(p.phase(x)[0]) * (2.0 * t * wt));
                    }
                    u += h;
                    st.panels += 1;
                    if st.panels > max_panels {
                        return Err(Error::NonConvergentTail(format!("panel budget {max_panels} exceeded")));
                    }
                }
            }
        }
    }
    Ok((acc, st))
}

/// A rough zone with its transition width.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Zone {
    pub a: f64,
    pub b: f64,
}

/// Inputs to [`plan`].
pub struct PlanSpec<'a> {
    /// Points where the amplitude jumps or loses smoothness.
    pub breaks: Vec<f64>,
    /// Intervals where the smooth amplitude varies on the zone width.
    pub zones: Vec<Zone>,
    /// Windows that are always paneled (stationary points).
    pub cores: Vec<(f64, f64)>,
    /// Square-root singular point, with the half-width of its substitution segments.
    pub singular: Option<(f64, f64)>,
    /// Scale on which the smooth amplitude varies near `x` outside zones.
    pub scale: &'a dyn Fn(f64) -> f64,
    /// IBP quality threshold for smooth stretches.
    pub q: f64,
    /// Threshold on `|phi'| * width` inside zones.
    pub r: f64,
    /// Hard limit on `|x|`.
    pub radius: f64,
}

fn suitable<const N: usize>(p: &impl Osc<N>, sp: &PlanSpec, x: f64, zone_w: Option<f64>) -> bool {
    let [_, d1, d2, _] = p.phase(x);
    let d1 = d1.abs();
    match zone_w {
        Some(w) => d1 * w >= sp.r && d1 * d1 >= sp.q * d2.abs(),
        None => d1 * (sp.scale)(x).max(1.0) >= sp.q && d1 * d1 >= sp.q * d2.abs(),
    }
}

/// Windows around the real stationary points of a cubic phase.
pub fn stationary_cores<const N: usize>(p: &impl Osc<N>, q: f64) -> Vec<(f64, f64)> {
    let [_, d1, d2, d3] = p.phase(0.0);
    let dd = |x: f64| (d2 + d3 * x).abs();
    let mut roots = Vec::new();
    let mut out = Vec::new();
    if d3 == 0.0 {
        if d2 != 0.0 {
            roots.push(-d1 / d2);
        }
    } else {
        let x0 = -d2 / d3;
        let m = d1 - 0.5 * d2 * d2 / d3;
        let flat = 2.0 * (q / d3.abs()).cbrt();
        if m * d3 < 0.0 {
            let r = (-2.0 * m / d3).sqrt();
            roots.extend([x0 - r, x0 + r]);
        }
        // near-degenerate pair: phase stays slow around the inflection
        if m.abs() < (q * q * d3.abs()).cbrt() {
            out.push((x0 - flat, x0 + flat));
        }
    }
    for r in roots {
        let w = 1.05 * (q / dd(r).max(1e-300)).sqrt();
        let w = if d3 != 0.0 { w.min(2.0 * (q / d3.abs()).cbrt()) } else { w };
        if w.is_finite() {
            out.push((r - w, r + w));
        }
    }
    out
}

/// Cut the line and classify each piece.
pub fn plan<const N: usize>(p: &impl Osc<N>, sp: &PlanSpec) -> Vec<Segment> {
    let mut cores = sp.cores.clone();
    cores.extend(stationary_cores(p, sp.q));
    let cores = &cores;
    let mut pts: Vec<f64> = sp.breaks.clone();
    for z in &sp.zones {
        pts.push(z.a);
        pts.push(z.b);
    }
    for c in cores {
        pts.push(c.0);
        pts.push(c.1);
    }
    if let Some((x0, d)) = sp.singular {
        pts.extend([x0 - d, x0, x0 + d]);
    }
    pts.retain(|x| x.is_finite() && x.abs() <= sp.radius);
    if let Some((x0, d)) = sp.singular {
        pts.retain(|&x| x == x0 || (x - x0).abs() >= d);
    }
    pts.sort_by(|a, b| a.total_cmp(b));
    pts.dedup_by(|a, b| (*a - *b).abs() <= 1e-12 * a.abs().max(1.0));

    let zone_at = |x: f64| -> Option<f64> {
        sp.zones.iter().filter(|z| x >= z.a && x <= z.b).map(|z| z.b - z.a).reduce(f64::min)
    };
    // extend outward until the tails are asymptotic
    // a tail that never becomes asymptotic inside the radius is truncated
    let grow = |mut x: f64, dir: f64| -> (f64, bool) {
        for _ in 0..400 {
            let probe = x + dir * 1e-9 * x.abs().max(1.0);
            if suitable(p, sp, probe, zone_at(probe)) {
                return (x, true);
            }
            if x.abs() >= sp.radius {
                break;
            }
            x = (x + dir * (0.25 * x.abs()).max(1.0)).clamp(-sp.radius, sp.radius);
        }
        (x, false)
    };
    if pts.is_empty() {
        pts.push(0.0);
    }
    let (lo, lo_ok) = grow(pts[0], -1.0);
    let (hi, hi_ok) = grow(*pts.last().unwrap(), 1.0);
    if lo < pts[0] {
        pts.insert(0, lo);
    }
    if hi > *pts.last().unwrap() {
        pts.push(hi);
    }

    let mut segs = Vec::with_capacity(pts.len() + 1);
    if lo_ok {
        segs.push(Segment { a: f64::NEG_INFINITY, b: pts[0], kind: SegKind::Asym });
    }
    for w in pts.windows(2) {
        let (a, b) = (w[0], w[1]);
        let mid = 0.5 * (a + b);
        let zw = zone_at(mid);
        let in_core = cores.iter().any(|c| mid > c.0 && mid < c.1);
        let hmax = match zw {
            Some(w) => w / 8.0,
            None => 0.25 * (sp.scale)(mid).max(1.0),
        };
        let kind = match sp.singular {
            Some((x0, d)) if a == x0 && (b - (x0 + d)).abs() <= 1e-12 * b.abs().max(1.0) => SegKind::SqrtLeft { hmax: hmax.sqrt() },
            Some((x0, d)) if b == x0 && (a - (x0 - d)).abs() <= 1e-12 * a.abs().max(1.0) => SegKind::SqrtRight { hmax: hmax.sqrt() },
            _ => {
                let ends_ok = suitable(p, sp, one_sided(a, b), zw) && suitable(p, sp, one_sided(b, a), zw);
                if !in_core && ends_ok {
                    SegKind::Asym
                } else {
                    SegKind::Panels { hmax }
                }
            }
        };
        segs.push(Segment { a, b, kind });
    }
    if hi_ok {
        segs.push(Segment { a: *pts.last().unwrap(), b: f64::INFINITY, kind: SegKind::Asym });
    }
    segs
}

#[cfg(test)]
mod tests {
    use super::*;

    /// `e^{i x^2} / (1 + x^2)` on the line.
    struct Lorentz;
    impl Osc<1> for Lorentz {
        fn phase(&self, x: f64) -> [f64; 4] {
            [x * x, 2.0 * x, 2.0, 0.0]
        }
        fn full(&self, x: f64) -> [C64; 1] {
            [C64::new(1.0 / (1.0 + x * x), 0.0)]
        }
        fn smooth(&self, x: f64) -> [C3; 1] {
            let d = 1.0 + x * x;
            [[C64::new(1.0 / d, 0.0), C64::new(-2.0 * x / (d * d), 0.0), C64::new((6.0 * x * x - 2.0) / (d * d * d), 0.0)]]
        }
    }

    /// Reference value by dense panels on [-L, L] and a long asymptotic tail.
    fn lorentz_reference() -> C64 {
        let segs = [
            Segment { a: f64::NEG_INFINITY, b: -400.0, kind: SegKind::Asym },
            Segment { a: -400.0, b: 400.0, kind: SegKind::Panels { hmax: 0.01 } },
            Segment { a: 400.0, b: f64::INFINITY, kind: SegKind::Asym },
        ];
        integrate(&Lorentz, &segs, 10_000_000).unwrap().0[0]
    }

    #[test]
    fn planned_matches_dense() {
        let scale = |x: f64| x.abs();
        let sp = PlanSpec {
            breaks: vec![0.0],
            zones: vec![],
            cores: vec![(-2.0, 2.0)],
            singular: None,
            scale: &scale,
            q: 1000.0,
            r: 2000.0,
            radius: 1e6,
        };
        let segs = plan(&Lorentz, &sp);
        let (v, st) = integrate(&Lorentz, &segs, 1_000_000).unwrap();
        let r = lorentz_reference();
        assert!((v[0] - r).norm() < 1e-10, "{} vs {}", v[0], r);
        assert!(st.panels < 2000);
    }

    #[test]
    fn fresnel_integral_exact() {
        struct One;
        impl Osc<1> for One {
            fn phase(&self, x: f64) -> [f64; 4] {
                [x * x, 2.0 * x, 2.0, 0.0]
            }
            fn full(&self, _x: f64) -> [C64; 1] {
                [C64::new(1.0, 0.0)]
            }
            fn smooth(&self, _x: f64) -> [C3; 1] {
                [[C64::new(1.0, 0.0), ZERO, ZERO]]
            }
        }
        let scale = |_x: f64| 1e9;
        let sp = PlanSpec {
            breaks: vec![0.0],
            zones: vec![],
            cores: vec![],
            singular: None,
            scale: &scale,
            q: 3000.0,
            r: 2000.0,
            radius: 1e6,
        };
        let (v, _) = integrate(&One, &plan(&One, &sp), 1_000_000).unwrap();
        let exact = cis(PI / 4.0) * PI.sqrt();
        assert!((v[0] - exact).norm() < 1e-10, "{}", v[0]);
    }

    #[test]
    fn sqrt_segment_integrates_singularity() {
        // int_0^1 e^{i x} / sqrt(x) dx
        struct S;
        impl Osc<1> for S {
            fn phase(&self, x: f64) -> [f64; 4] {
                [x, 1.0, 0.0, 0.0]
            }
            fn full(&self, x: f64) -> [C64; 1] {
                [C64::new(1.0 / x.sqrt(), 0.0)]
            }
            fn smooth(&self, _x: f64) -> [C3; 1] {
                [[ZERO; 3]]
            }
        }
        let segs = [Segment { a: 0.0, b: 1.0, kind: SegKind::SqrtLeft { hmax: 0.1 } }];
        let (v, _) = integrate(&S, &segs, 100_000).unwrap();
        // 2 * int_0^1 e^{i s^2} ds
        let mut r = ZERO;
        let n = 2000;
        for k in 0..n {
            let (a, b) = (k as f64 / n as f64, (k + 1) as f64 / n as f64);
            for (t, w) in gauss8(a, b) {
                r += cis(t * t) * (2.0 * w);
            }
        }
        assert!((v[0] - r).norm() < 1e-13);
    }
}
