//! Small numerical building blocks: Gauss-Legendre panels, pairwise sums,
//! the C-infinity smoothstep and clamped cubic splines.

use num_complex::Complex64 as C64;

/// 8-point Gauss-Legendre nodes on [-1, 1] (positive half).
const GL8_X: [f64; 4] = [
    0.183_434_642_495_649_8,
    0.525_532_409_916_329,
    0.796_666_477_413_626_7,
    0.960_289_856_497_536_3,
];
const GL8_W: [f64; 4] = [
    0.362_683_783_378_362,
    0.313_706_645_877_887_3,
    0.222_381_034_453_374_5,
    0.101_228_536_290_376_3,
];

/// Nodes and weights of the 8-point rule mapped to `[a, b]`.
pub fn gauss8(a: f64, b: f64) -> [(f64, f64); 8] {
    let m = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let mut out = [(0.0, 0.0); 8];
    for i in 0..4 {
        out[2 * i] = (m - h * GL8_X[i], h * GL8_W[i]);
        out[2 * i + 1] = (m + h * GL8_X[i], h * GL8_W[i]);
    }
    out
}

/// Integrate `f` over `[a, b]` with one 8-point panel.
pub fn gauss8_panel<F: FnMut(f64) -> C64>(a: f64, b: f64, mut f: F) -> C64 {
    let mut acc = C64::new(0.0, 0.0);
    for (x, w) in gauss8(a, b) {
        acc += f(x) * w;
    }
    acc
}

/// Fixed-tree pairwise summation; the result does not depend on how the
/// terms were produced, only on their order.
pub fn pairwise_sum(xs: &[C64]) -> C64 {
    match xs.len() {
        0 => C64::new(0.0, 0.0),
        1 => xs[0],
        n if n <= 8 => xs.iter().fold(C64::new(0.0, 0.0), |a, &b| a + b),
        n => {
            let (l, r) = xs.split_at(n / 2);
            pairwise_sum(l) + pairwise_sum(r)
        }
    }
}

/// Smoothstep built from `exp(-1/t)`: 0 for t <= 0, 1 for t >= 1, monotone,
/// C-infinity. Returns value, first and second derivative.
pub fn smoothstep(t: f64) -> (f64, f64, f64) {
    if t <= 0.0 {
        return (0.0, 0.0, 0.0);
    }
    if t >= 1.0 {
        return (1.0, 0.0, 0.0);
    }
    let u = 1.0 - t;
    let q = 1.0 / t - 1.0 / u;
    if q > 700.0 {
        return (0.0, 0.0, 0.0);
    }
    if q < -700.0 {
        return (1.0, 0.0, 0.0);
    }
    let s = 1.0 / (1.0 + q.exp());
    let p = s * (1.0 - s);
    let w = 1.0 / (t * t) + 1.0 / (u * u);
    let dw = -2.0 / (t * t * t) + 2.0 / (u * u * u);
    let d1 = p * w;
    let d2 = d1 * (1.0 - 2.0 * s) * w + p * dw;
    (s, d1, d2)
}

/// Cubic spline through `(x_i, y_i)` with prescribed end slopes.
#[derive(Debug, Clone)]
pub struct Spline {
    x: Vec<f64>,
    y: Vec<f64>,
    m: Vec<f64>,
}

impl Spline {
    /// Clamped spline; `x` strictly increasing with at least two points.
    pub fn clamped(x: &[f64], y: &[f64], d0: f64, dn: f64) -> Spline {
        let n = x.len();
        assert!(n >= 2 && y.len() == n);
        // Tridiagonal system for second derivatives m_i.
        let mut a = vec![0.0; n];
        let mut b = vec![0.0; n];
        let mut c = vec![0.0; n];
        let mut r = vec![0.0; n];
        let h0 = x[1] - x[0];
        b[0] = h0 / 3.0;
        c[0] = h0 / 6.0;
        r[0] = (y[1] - y[0]) / h0 - d0;
        for i in 1..n - 1 {
            let hl = x[i] - x[i - 1];
            let hr = x[i + 1] - x[i];
            a[i] = hl / 6.0;
            b[i] = (hl + hr) / 3.0;
            c[i] = hr / 6.0;
            r[i] = (y[i + 1] - y[i]) / hr - (y[i] - y[i - 1]) / hl;
        }
        let hn = x[n - 1] - x[n - 2];
        a[n - 1] = hn / 6.0;
        b[n - 1] = hn / 3.0;
        r[n - 1] = dn - (y[n - 1] - y[n - 2]) / hn;
        for i in 1..n {
            let w = a[i] / b[i - 1];
            b[i] -= w * c[i - 1];
            r[i] -= w * r[i - 1];
        }
        let mut m = vec![0.0; n];
        m[n - 1] = r[n - 1] / b[n - 1];
        for i in (0..n - 1).rev() {
            m[i] = (r[i] - c[i] * m[i + 1]) / b[i];
        }
        Spline { x: x.to_vec(), y: y.to_vec(), m }
    }

    /// Clamped spline with end slopes from three-point one-sided differences.
    pub fn with_estimated_ends(x: &[f64], y: &[f64]) -> Spline {
        let (d0, dn) = end_slopes(x, y);
        Spline::clamped(x, y, d0, dn)
    }

    pub fn knots(&self) -> &[f64] {
        &self.x
    }

    fn interval(&self, t: f64) -> usize {
        let n = self.x.len();
        let j = self.x.partition_point(|&v| v <= t);
        j.clamp(1, n - 1) - 1
    }

    /// Value, first and second derivative at `t` (cubic extension outside).
    pub fn eval3(&self, t: f64) -> (f64, f64, f64) {
        let i = self.interval(t);
        let (x0, x1) = (self.x[i], self.x[i + 1]);
        let h = x1 - x0;
        let a = (x1 - t) / h;
        let b = (t - x0) / h;
        let (m0, m1) = (self.m[i], self.m[i + 1]);
        let (y0, y1) = (self.y[i], self.y[i + 1]);
        let v = a * y0 + b * y1 + ((a * a * a - a) * m0 + (b * b * b - b) * m1) * h * h / 6.0;
        let d = (y1 - y0) / h + ((1.0 - 3.0 * a * a) * m0 + (3.0 * b * b - 1.0) * m1) * h / 6.0;
        let dd = a * m0 + b * m1;
        (v, d, dd)
    }

    pub fn eval(&self, t: f64) -> f64 {
        let i = self.interval(t);
        if t == self.x[i] {
            return self.y[i];
        }
        if t == self.x[i + 1] {
            return self.y[i + 1];
        }
        self.eval3(t).0
    }
}

fn end_slopes(x: &[f64], y: &[f64]) -> (f64, f64) {
    let n = x.len();
    if n < 3 {
        let s = (y[n - 1] - y[0]) / (x[n - 1] - x[0]);
        return (s, s);
    }
    let d0 = three_point(x[0], x[1], x[2], y[0], y[1], y[2], x[0]);
    let dn = three_point(
        x[n - 3],
        x[n - 2],
        x[n - 1],
        y[n - 3],
        y[n - 2],
        y[n - 1],
        x[n - 1],
    );
    (d0, dn)
}

/// Derivative at `t` of the quadratic through three points.
fn three_point(x0: f64, x1: f64, x2: f64, y0: f64, y1: f64, y2: f64, t: f64) -> f64 {
    let l0 = ((t - x1) + (t - x2)) / ((x0 - x1) * (x0 - x2));
    let l1 = ((t - x0) + (t - x2)) / ((x1 - x0) * (x1 - x2));
    let l2 = ((t - x0) + (t - x1)) / ((x2 - x0) * (x2 - x1));
    y0 * l0 + y1 * l1 + y2 * l2
}

/// Complex spline: independent real splines for the two parts.
#[derive(Debug, Clone)]
pub struct CSpline {
    re: Spline,
    im: Spline,
}

impl CSpline {
    pub fn clamped(x: &[f64], y: &[C64], d0: C64, dn: C64) -> CSpline {
        let re: Vec<f64> = y.iter().map(|z| z.re).collect();
        let im: Vec<f64> = y.iter().map(|z| z.im).collect();
        CSpline {
            re: Spline::clamped(x, &re, d0.re, dn.re),
            im: Spline::clamped(x, &im, d0.im, dn.im),
        }
    }

    pub fn with_estimated_ends(x: &[f64], y: &[C64]) -> CSpline {
        let re: Vec<f64> = y.iter().map(|z| z.re).collect();
        let im: Vec<f64> = y.iter().map(|z| z.im).collect();
        CSpline {
            re: Spline::with_estimated_ends(x, &re),
            im: Spline::with_estimated_ends(x, &im),
        }
    }

    pub fn knots(&self) -> &[f64] {
        self.re.knots()
    }

    pub fn eval(&self, t: f64) -> C64 {
        C64::new(self.re.eval(t), self.im.eval(t))
    }

    pub fn eval3(&self, t: f64) -> (C64, C64, C64) {
        let (a, b, c) = self.re.eval3(t);
        let (d, e, f) = self.im.eval3(t);
        (C64::new(a, d), C64::new(b, e), C64::new(c, f))
    }
}

/// `exp(i x)`.
#[inline]
pub fn cis(x: f64) -> C64 {
    let (s, c) = x.sin_cos();
    C64::new(c, s)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gauss8_integrates_degree_15_exactly() {
        let v = gauss8_panel(-0.3, 1.7, |x| C64::new(x.powi(15) + x.powi(6), 0.0));
        let exact = (1.7f64.powi(16) - 0.3f64.powi(16)) / 16.0 + (1.7f64.powi(7) + 0.3f64.powi(7)) / 7.0;
        assert!((v.re - exact).abs() < 1e-11 * exact.abs());
    }

    #[test]
    fn smoothstep_is_monotone_and_matches_derivatives() {
        let mut prev = 0.0;
        for i in 1..200 {
            let t = i as f64 / 200.0;
            let (s, d, dd) = smoothstep(t);
            assert!(s >= prev);
            prev = s;
            let h = 1e-5;
            let fd = (smoothstep(t + h).0 - smoothstep(t - h).0) / (2.0 * h);
            let fdd = (smoothstep(t + h).1 - smoothstep(t - h).1) / (2.0 * h);
            assert!((fd - d).abs() < 1e-6 * (1.0 + d.abs()));
            assert!((fdd - dd).abs() < 1e-4 * (1.0 + dd.abs()));
        }
        assert!((smoothstep(0.5).0 - 0.5).abs() < 1e-15);
        assert!((smoothstep(0.5).1 - 2.0).abs() < 1e-12);
    }

    #[test]
    fn clamped_spline_reproduces_cubics() {
        let x: Vec<f64> = (0..12).map(|i| (i as f64 * 0.37).powf(1.3)).collect();
        let f = |t: f64| 1.0 - 2.0 * t + 0.5 * t * t - 0.1 * t * t * t;
        let df = |t: f64| -2.0 + t - 0.3 * t * t;
        let y: Vec<f64> = x.iter().map(|&t| f(t)).collect();
        let s = Spline::clamped(&x, &y, df(x[0]), df(x[11]));
        for k in 0..50 {
            let t = x[11] * k as f64 / 49.0;
            let (v, d, _) = s.eval3(t);
            assert!((v - f(t)).abs() < 1e-10);
            assert!((d - df(t)).abs() < 1e-9);
        }
        assert_eq!(s.eval(x[4]), y[4]);
    }

    #[test]
    fn pairwise_sum_matches_naive() {
        let xs: Vec<C64> = (0..1000).map(|i| C64::new(i as f64, -(i as f64))).collect();
        let s = pairwise_sum(&xs);
        assert_eq!(s, C64::new(499500.0, -499500.0));
    }
}
