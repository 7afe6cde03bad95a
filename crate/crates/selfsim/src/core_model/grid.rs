use super::config::ModelConfig;
use crate::error::{Error, Result};

/// `n_low` uniform nodes on `[0, 2)` followed by `n_high` log-uniform nodes on
/// `[2, xi_max]`.
pub fn make_grid(config: &ModelConfig, n_low: usize, n_high: usize) -> Result<Vec<f64>> {
    config.validate()?;
    if n_low < 16 || n_high < 16 {
        return Err(Error::InvalidConfig(format!(
            "grid needs n_low, n_high >= 16 (got {n_low}, {n_high})"
        )));
    }
    let mut g = Vec::with_capacity(n_low + n_high);
    let h = 2.0 / n_low as f64;
    for i in 0..n_low {
        g.push(i as f64 * h);
    }
    let l0 = 2f64.ln();
    let l1 = config.xi_max.ln();
    for j in 0..n_high {
        let t = j as f64 / (n_high - 1) as f64;
        g.push((l0 + t * (l1 - l0)).exp());
    }
    *g.last_mut().unwrap() = config.xi_max;
    g[n_low] = 2.0;
    Ok(g)
}

/// Largest step near `xi` keeping the phase `8 xi^3 / 9` within `pi / 4`.
pub fn ripple_step(xi: f64) -> f64 {
    (3.0 * std::f64::consts::PI / 32.0) / (xi * xi).max(1e-300)
}

/// Refinement of `grid` whose consecutive spacing resolves `exp(-8 i xi^3 / 9)`:
/// every step satisfies `(8/9) * (b^3 - a^3) <= pi / 4`.
pub fn resolved_refinement(grid: &[f64]) -> Vec<f64> {
    let mut out = Vec::with_capacity(grid.len() * 4);
    out.push(grid[0]);
    let limit = std::f64::consts::PI / 4.0;
    for w in grid.windows(2) {
        let (a, b) = (w[0], w[1]);
        let dphi = 8.0 / 9.0 * (b * b * b - a * a * a);
        let n = (dphi / limit).ceil().max(1.0) as usize;
        // equal phase increments
        for j in 1..=n {
            let c3 = a * a * a + (b * b * b - a * a * a) * j as f64 / n as f64;
            out.push(if j == n { b } else { c3.cbrt() });
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_grid_shape() {
        let mut c = ModelConfig::default();
        c.xi_max = 10.0;
        let g = make_grid(&c, 16, 16).unwrap();
        assert_eq!(g.len(), 32);
        assert_eq!(g[0], 0.0);
        assert_eq!(*g.last().unwrap(), 10.0);
        assert!(g.windows(2).all(|w| w[1] > w[0]));
    }

    #[test]
    fn rejects_tiny_counts() {
        assert!(make_grid(&ModelConfig::default(), 8, 16).is_err());
    }

    #[test]
    fn refinement_resolves_ripple() {
        let mut c = ModelConfig::default();
        c.xi_max = 10.0;
        let g = make_grid(&c, 16, 16).unwrap();
        let f = resolved_refinement(&g);
        for w in f.windows(2) {
            assert!(w[1] > w[0]);
            assert!(8.0 / 9.0 * (w[1].powi(3) - w[0].powi(3)) <= std::f64::consts::PI / 4.0 + 1e-12);
        }
        let n = f.len();
        let near_end = f[n - 1] - f[n - 2];
        assert!(near_end <= 8.8e-3);
        assert!(near_end <= ripple_step(9.99) * 1.01);
        for x in &g {
            assert!(f.contains(x));
        }
    }
}
