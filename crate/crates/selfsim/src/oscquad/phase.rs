//! The cubic phase `Phi(xi, eta) = xi^3 P(eta / xi)` and the three local charts.

use crate::error::{Error, Result};

/// `P(X) = X - X^2 + X^3 / 4`.
#[derive(Debug, Clone, Copy, Default)]
pub struct PhasePoly;

impl PhasePoly {
    /// Coefficients of `P` in increasing degree.
    pub const COEFFS: [f64; 4] = [0.0, 1.0, -1.0, 0.25];

    pub fn p(x: f64) -> f64 {
        x * (1.0 - x + 0.25 * x * x)
    }
    pub fn dp(x: f64) -> f64 {
        1.0 - 2.0 * x + 0.75 * x * x
    }
    pub fn ddp(x: f64) -> f64 {
        -2.0 + 1.5 * x
    }

    /// `Phi(xi, eta) = eta xi^2 - xi eta^2 + eta^3 / 4`.
    pub fn phi(xi: f64, eta: f64) -> f64 {
        eta * xi * xi - xi * eta * eta + 0.25 * eta * eta * eta
    }

    /// `Phi` and its first three `eta`-derivatives.
    pub fn phi_eta(xi: f64, eta: f64) -> [f64; 4] {
        [
            Self::phi(xi, eta),
            xi * xi - 2.0 * xi * eta + 0.75 * eta * eta,
            -2.0 * xi + 1.5 * eta,
            1.5,
        ]
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ChartKind {
    /// `P(psi(mu)) = mu^2` near `X = 2`.
    Two,
    /// `P(psi(mu)) = 8/27 - mu^2` near `X = 2/3`.
    TwoThirds,
    /// `P(psi(nu)) = nu` near `X = 0`.
    Origin,
}

/// One chart; evaluation solves `P(X) = target` by safeguarded Newton.
#[derive(Debug, Clone, Copy)]
pub struct PhaseChart {
    pub kind: ChartKind,
    /// Validity interval in the chart variable.
    pub lo: f64,
    pub hi: f64,
}

impl PhaseChart {
    pub fn target(&self, m: f64) -> f64 {
        match self.kind {
            ChartKind::Two => m * m,
            ChartKind::TwoThirds => 8.0 / 27.0 - m * m,
            ChartKind::Origin => m,
        }
    }

    /// `psi(m)` and `psi'(m)`.
    ///
    /// Near `X = 2` and `X = 2/3` the chart is solved in the local form
    /// `y sqrt(1/2 +- y/4) = m`, `X = x0 + y`, which stays well conditioned at `m = 0`.
    pub fn eval(&self, m: f64) -> Result<(f64, f64)> {
        if !(m >= self.lo && m <= self.hi) {
            return Err(Error::Domain(format!("chart variable {m} outside [{}, {}]", self.lo, self.hi)));
        }
        let (x0, sg, mut a, mut b) = match self.kind {
            ChartKind::Two => (2.0, 1.0, -4.0 / 3.0, 4.0 * (1.0 + m.abs())),
            ChartKind::TwoThirds => (2.0 / 3.0, -1.0, -4.0 * (1.0 + m.abs()), 4.0 / 3.0),
            ChartKind::Origin => (0.0, 0.0, -4.0 * (1.0 + m.abs()).cbrt() - 1.0, 2.0 / 3.0),
        };
        // increasing function of y on (a, b) whose root is the chart value
        let f = |y: f64| -> (f64, f64) {
            if sg == 0.0 {
                (PhasePoly::p(y) - m, PhasePoly::dp(y))
            } else {
                let r = (0.5 + sg * y / 4.0).max(0.0).sqrt();
                (y * r - m, r + sg * y / (8.0 * r.max(1e-300)))
            }
        };
        let mut y = if sg == 0.0 { m } else { (std::f64::consts::SQRT_2 * m).clamp(a, b) };
        for _ in 0..200 {
            let (r, d) = f(y);
            if r == 0.0 {
                break;
            }
            if r > 0.0 {
                b = y;
            } else {
                a = y;
            }
            let mut ny = y - r / d;
            if !(ny > a && ny < b) || !(d > 0.0) {
                ny = 0.5 * (a + b);
            }
            if (ny - y).abs() <= 1e-16 * (1.0 + y.abs()) {
                y = ny;
                break;
            }
            y = ny;
        }
        Ok((x0 + y, 1.0 / f(y).1))
    }
}

/// The charts `psi_1` (about `X = 2`), `psi_2` (about `X = 2/3`) and `psi_3`
/// (about the origin), each on the part of `[-e, e]` where it is defined.
pub fn phase_charts(e: f64) -> Result<[PhaseChart; 3]> {
    if !(e > 0.0) {
        return Err(Error::Domain(format!("chart half-width must be positive, got {e}")));
    }
    let r = (8.0f64 / 27.0).sqrt();
    let inner = 0.999_999 * r;
    Ok([
        PhaseChart { kind: ChartKind::Two, lo: (-e).max(-inner), hi: e },
        PhaseChart { kind: ChartKind::TwoThirds, lo: -e, hi: e.min(inner) },
        PhaseChart { kind: ChartKind::Origin, lo: -e, hi: e.min(0.999_999 * 8.0 / 27.0) },
    ])
}
