//! Oscillatory quadrature for the operators `K`, `J` and `I = J(h, K(f, g)) / 2`.

pub mod cutoff;
pub mod iop;
pub mod jop;
pub mod kernel;
pub mod phase;
pub mod segment;

pub use iop::{i_eval_parts, i_eval_table, k_table, I_eval};
pub use jop::{j_kernel, JParts, J_eval, Mode};
pub use kernel::{FieldKernel, K_eval, KTable, KView, Kernel, Mirror};
pub use phase::{phase_charts, ChartKind, PhaseChart, PhasePoly};
pub use segment::QuadStats;

use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};

/// Quadrature controls shared by `K`, `J` and `I`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QuadPanelConfig {
    /// Target absolute tolerance per call.
    pub tol: f64,
    pub max_panels: usize,
    /// Truncation radius for `J` tails that never become asymptotic.
    pub radius: f64,
}

impl Default for QuadPanelConfig {
    fn default() -> Self {
        QuadPanelConfig { tol: 1e-10, max_panels: 2_000_000, radius: 400.0 }
    }
}

impl QuadPanelConfig {
    pub fn for_xi_max(tol: f64, xi_max: f64) -> Self {
        QuadPanelConfig { tol, radius: (10.0 * xi_max).max(400.0), ..Default::default() }
    }

    pub fn validate(&self, xi_max: f64) -> Result<()> {
        if !(self.tol > 0.0) {
            return Err(Error::InvalidConfig("quadrature tolerance must be positive".into()));
        }
        if !(self.radius >= 10.0 * xi_max) {
            return Err(Error::InvalidConfig(format!("radius {} below 10 xi_max = {}", self.radius, 10.0 * xi_max)));
        }
        if self.max_panels == 0 {
            return Err(Error::InvalidConfig("max_panels must be positive".into()));
        }
        Ok(())
    }

    /// Threshold for switching a smooth stretch to the asymptotic rule.
    pub fn q(&self) -> f64 {
        (0.5 * self.tol.powf(-1.0 / 3.0)).clamp(100.0, 1e5)
    }

    /// Same threshold inside rough zones.
    pub fn r(&self) -> f64 {
        2.0 * self.q()
    }
}
