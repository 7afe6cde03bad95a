//! Cutoffs: the base `phi`, the five-piece partition of unity and `chi`.

use crate::numerics::smoothstep;

/// Values with two derivatives.
pub type R3 = (f64, f64, f64);

/// Base cutoff: 1 on `[0, 1]`, 0 beyond `7/6`.
pub fn phi(r: f64) -> R3 {
    let (s, d1, d2) = smoothstep(6.0 * (r.abs() - 1.0));
    let sg = if r < 0.0 { -1.0 } else { 1.0 };
    (1.0 - s, -6.0 * d1 * sg, -36.0 * d2)
}

fn phi_scaled(r: f64, k: f64) -> R3 {
    let (a, b, c) = phi(k * r);
    (a, k * b, k * k * c)
}

fn sub(a: R3, b: R3) -> R3 {
    (a.0 - b.0, a.1 - b.1, a.2 - b.2)
}

/// Ring `phi(r) - phi(2r)`.
pub fn ring(r: f64) -> R3 {
    sub(phi(r), phi_scaled(r, 2.0))
}

/// `phi_j(r)` for `j = 1..=5`.
pub fn phi_j(j: usize, r: f64) -> R3 {
    match j {
        1 => phi_scaled(r, 8.0 / 3.0),
        2 => sub(phi_scaled(r, 4.0 / 3.0), phi_scaled(r, 8.0 / 3.0)),
        3 => sub(phi_scaled(r, 2.0 / 3.0), phi_scaled(r, 4.0 / 3.0)),
        4 => sub(phi_scaled(r, 1.0 / 3.0), phi_scaled(r, 2.0 / 3.0)),
        5 => {
            let (a, b, c) = phi_scaled(r, 1.0 / 3.0);
            (1.0 - a, -b, -c)
        }
        _ => panic!("partition index {j} out of range"),
    }
}

/// Transition intervals of `phi_j` in `r >= 0`.
pub fn transitions(j: usize) -> Vec<(f64, f64)> {
    let edge = |k: f64| (1.0 / k, 7.0 / (6.0 * k));
    match j {
        1 => vec![edge(8.0 / 3.0)],
        2 => vec![edge(8.0 / 3.0), edge(4.0 / 3.0)],
        3 => vec![edge(4.0 / 3.0), edge(2.0 / 3.0)],
        4 => vec![edge(2.0 / 3.0), edge(1.0 / 3.0)],
        5 => vec![edge(1.0 / 3.0)],
        _ => panic!("partition index {j} out of range"),
    }
}

/// `chi`: 0 below 1, 1 above 2.
pub fn chi(xi: f64) -> R3 {
    smoothstep(xi - 1.0)
}

/// Weight of the `eta = 2 xi / 3` piece as a function of `eta` at fixed `xi > 0`.
pub fn omega2(xi: f64, eta: f64) -> R3 {
    if xi <= 0.0 || eta <= 0.0 {
        return (0.0, 0.0, 0.0);
    }
    let (a, b, c) = phi_j(2, eta / xi);
    (a, b / xi, c / (xi * xi))
}

/// The `eta`-intervals where `omega2(xi, .)` is not constant.
pub fn omega2_zones(xi: f64) -> Vec<(f64, f64)> {
    if xi <= 0.0 {
        return Vec::new();
    }
    transitions(2).into_iter().map(|(a, b)| (a * xi, b * xi)).collect()
}
