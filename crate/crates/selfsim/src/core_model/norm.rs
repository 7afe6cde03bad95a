use super::config::{BoundaryData, ModelConfig};
use super::field::SpectralField;
use crate::error::{Error, Result};
use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NormPieces {
    /// sup |z| (1 + xi^k)
    pub value: f64,
    /// sup |z'| (1 + xi^(k+1)) on xi > 0
    pub deriv_pos: f64,
    /// the same on xi < 0
    pub deriv_neg: f64,
    /// sup_(0,1) |z - c0| / xi
    pub low_near: f64,
    /// sup_[1,inf) |z| xi^k
    pub low_far: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NormReport {
    pub zk_norm: f64,
    pub low_seminorm: f64,
    pub pieces: NormPieces,
}

/// Discrete Z^k norm over the grid and the low-frequency seminorm around
/// `c0 = c + 3 i alpha / (2 pi)` (defaults to the stored `0+` value).
pub fn zk_norm(f: &SpectralField, config: &ModelConfig, boundary: Option<BoundaryData>) -> Result<NormReport> {
    let deriv = f.deriv.as_ref().ok_or(Error::MissingDerivative)?;
    let k = config.k;
    let c0 = match boundary {
        Some(b) => C64::new(b.c, 3.0 * b.alpha / (2.0 * std::f64::consts::PI)),
        None => f.values[0],
    };
    let mut p = NormPieces { value: 0.0, deriv_pos: 0.0, deriv_neg: 0.0, low_near: 0.0, low_far: 0.0 };
    for (j, &x) in f.grid.iter().enumerate() {
        let v = f.values[j];
        p.value = p.value.max(v.norm() * (1.0 + x.powf(k)));
        if x > 0.0 {
            let d = deriv[j].norm() * (1.0 + x.powf(k + 1.0));
            p.deriv_pos = p.deriv_pos.max(d);
            // mirrored copy: |conj z'(-xi)| has the same modulus
            p.deriv_neg = p.deriv_neg.max(d);
            if x < 1.0 {
                p.low_near = p.low_near.max((v - c0).norm() / x);
            } else {
                p.low_far = p.low_far.max(v.norm() * x.powf(k));
            }
        }
    }
    Ok(NormReport {
        zk_norm: p.value + p.deriv_pos + p.deriv_neg,
        low_seminorm: p.low_near + p.low_far + p.deriv_pos,
        pieces: p,
    })
}
