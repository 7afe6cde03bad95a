//! Oracles written independently of the library: own Gauss-Legendre rule,
//! contour-rotated Airy integral, Fresnel tail by the complementary integral,
//! least-squares slopes and the closed-form constants.
#![allow(dead_code)]

use num_complex::Complex64 as C64;
use std::f64::consts::PI;

/// Gauss-Legendre nodes and weights on `[-1, 1]` by Newton iteration.
pub fn gauss_legendre(n: usize) -> Vec<(f64, f64)> {
    let mut out = Vec::with_capacity(n);
    for i in 0..n {
        let mut x = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, x);
            for k in 2..=n {
                let p2 = ((2 * k - 1) as f64 * x * p1 - (k - 1) as f64 * p0) / k as f64;
                p0 = p1;
                p1 = p2;
            }
            dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
            let dx = p1 / dp;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        out.push((x, 2.0 / ((1.0 - x * x) * dp * dp)));
    }
    out
}

/// `int_a^b f` with `panels` equal panels of a 12-point rule.
pub fn integrate(f: impl Fn(f64) -> C64, a: f64, b: f64, panels: usize) -> C64 {
    let rule = gauss_legendre(12);
    let h = (b - a) / panels as f64;
    let mut acc = C64::new(0.0, 0.0);
    for p in 0..panels {
        let (lo, hi) = (a + p as f64 * h, a + (p + 1) as f64 * h);
        let (m, r) = (0.5 * (lo + hi), 0.5 * (hi - lo));
        for &(x, w) in &rule {
            acc += f(m + r * x) * (w * r);
        }
    }
    acc
}

/// `(Ai, Ai')` with `Ai(y) = (1/pi) int_0^inf cos(xi^3 + y xi) d xi`, on the ray
/// `xi = t e^{i pi/6}` where the integrand decays like `e^{-t^3}`.
pub fn airy_contour(y: f64) -> (f64, f64) {
    let rot = C64::from_polar(1.0, PI / 6.0);
    let g = |t: f64| (C64::new(-t * t * t, 0.0) + C64::new(0.0, y * t) * rot).exp() * rot;
    let v = integrate(g, 0.0, 8.0, 400);
    let d = integrate(|t| g(t) * C64::new(0.0, t) * rot, 0.0, 8.0, 400);
    (v.re / PI, d.re / PI)
}

/// `int_lambda^inf e^{i eta^2} d eta = (sqrt(pi)/2) e^{i pi/4} - int_0^lambda e^{i eta^2}`.
pub fn fresnel_oracle(lambda: f64) -> C64 {
    let full = C64::from_polar(PI.sqrt() / 2.0, PI / 4.0);
    let panels = (4.0 * lambda * lambda).ceil() as usize + 4;
    full - integrate(|t| C64::from_polar(1.0, t * t), 0.0, lambda, panels)
}

/// Least-squares slope of `ln y` against `ln x`.
pub fn loglog_slope(xs: &[f64], ys: &[f64]) -> f64 {
    let n = xs.len() as f64;
    let lx: Vec<f64> = xs.iter().map(|x| x.ln()).collect();
    let ly: Vec<f64> = ys.iter().map(|y| y.ln()).collect();
    let (mx, my) = (lx.iter().sum::<f64>() / n, ly.iter().sum::<f64>() / n);
    let sxy: f64 = lx.iter().zip(&ly).map(|(a, b)| (a - mx) * (b - my)).sum();
    let sxx: f64 = lx.iter().map(|a| (a - mx) * (a - mx)).sum();
    sxy / sxx
}

/// Least-squares slope of `y` against `x`.
pub fn linear_slope(xs: &[f64], ys: &[f64]) -> f64 {
    let n = xs.len() as f64;
    let (mx, my) = (xs.iter().sum::<f64>() / n, ys.iter().sum::<f64>() / n);
    let sxy: f64 = xs.iter().zip(ys).map(|(a, b)| (a - mx) * (b - my)).sum();
    let sxx: f64 = xs.iter().map(|a| (a - mx) * (a - mx)).sum();
    sxy / sxx
}

/// `rho = ln(1/(1 - kappa^2)) / (2 pi)`.
pub fn rho_formula(kappa: f64) -> f64 {
    (1.0 / (1.0 - kappa * kappa)).ln() / (2.0 * PI)
}

/// `a = -3 eps |A|^2 / (4 pi)`.
pub fn a_formula(abs_a: f64, eps: f64) -> f64 {
    -3.0 * eps * abs_a * abs_a / (4.0 * PI)
}

/// `|B| = 3 |A|^3 / (16 pi sqrt 2)`.
pub fn b_printed(abs_a: f64) -> f64 {
    3.0 * abs_a.powi(3) / (16.0 * PI * 2f64.sqrt())
}

/// Continuous phase from a sequence of complex samples.
pub fn unwrap_phase(zs: &[C64]) -> Vec<f64> {
    let mut out = Vec::with_capacity(zs.len());
    let mut prev = zs[0].arg();
    let mut acc = prev;
    out.push(acc);
    for z in &zs[1..] {
        let a = z.arg();
        let mut d = a - prev;
        while d > PI {
            d -= 2.0 * PI;
        }
        while d < -PI {
            d += 2.0 * PI;
        }
        acc += d;
        prev = a;
        out.push(acc);
    }
    out
}

/// One line per criterion, written straight to the process stderr so it shows
/// up in the test log whether or not the harness captures output.
pub fn report(n: usize, pass: bool, text: &str) {
    use std::io::Write;
    let line = format!("[criterion {n:>2}] {} {text}\n", if pass { "PASS" } else { "FAIL" });
    let _ = std::io::stderr().write_all(line.as_bytes());
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rule_integrates_polynomials() {
        let r = gauss_legendre(12);
        let s: f64 = r.iter().map(|(x, w)| w * x.powi(22)).sum();
        assert!((s - 2.0 / 23.0).abs() < 1e-14);
    }
}
