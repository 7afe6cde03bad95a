use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};

/// Scalar inputs of the problem.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ModelConfig {
    /// +1 focusing, -1 defocusing.
    pub epsilon: f64,
    /// Weight exponent of Z^k.
    pub k: f64,
    /// Split exponent of the I(S,S,S) remainder.
    pub gamma: f64,
    pub xi_max: f64,
    pub tol_fixed_point: f64,
    pub tol_quad: f64,
    pub n_low: usize,
    pub n_high: usize,
    /// Smallness radius for |A| and for (c, alpha).
    pub smallness: f64,
}

impl Default for ModelConfig {
    fn default() -> Self {
        ModelConfig {
            epsilon: -1.0,
            k: 0.55,
            gamma: 0.9,
            xi_max: 30.0,
            tol_fixed_point: 1e-10,
            tol_quad: 1e-10,
            n_low: 100,
            n_high: 300,
            smallness: 0.3,
        }
    }
}

impl ModelConfig {
    pub fn with_epsilon(mut self, eps: f64) -> Self {
        self.epsilon = eps;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.epsilon != 1.0 && self.epsilon != -1.0 {
            return Err(Error::InvalidConfig(format!("epsilon must be +-1, got {}", self.epsilon)));
        }
        if !(self.k > 0.5 && self.k < 4.0 / 7.0) {
            return Err(Error::InvalidConfig(format!("k must lie in (1/2, 4/7), got {}", self.k)));
        }
        if !(self.gamma > 6.0 / 7.0 && self.gamma < 1.0) {
            return Err(Error::InvalidConfig(format!("gamma must lie in (6/7, 1), got {}", self.gamma)));
        }
        if !(self.xi_max >= 10.0) || !self.xi_max.is_finite() {
            return Err(Error::InvalidConfig(format!("xi_max must be >= 10, got {}", self.xi_max)));
        }
        if !(self.tol_fixed_point > 0.0 && self.tol_quad > 0.0) {
            return Err(Error::InvalidConfig("tolerances must be positive".into()));
        }
        if !(self.smallness > 0.0) {
            return Err(Error::InvalidConfig("smallness radius must be positive".into()));
        }
        Ok(())
    }
}

/// Initial-data parameters: Dirac mass `c` and principal-value coefficient `alpha`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BoundaryData {
    pub c: f64,
    pub alpha: f64,
}

impl BoundaryData {
    pub fn validate(&self, radius: f64) -> Result<()> {
        if !(self.c * self.c + self.alpha * self.alpha < radius * radius) {
            return Err(Error::Domain(format!(
                "(c, alpha) = ({}, {}) outside the smallness radius {radius}",
                self.c, self.alpha
            )));
        }
        Ok(())
    }
}
