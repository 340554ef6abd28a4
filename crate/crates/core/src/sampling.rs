//! Seeded random test fields.

use std::f64::consts::PI;
use std::sync::Arc;

use rand::Rng;

use crate::radial::{RadialField, RadialGrid};

/// `Σ_k c_k cos((k − ½) π r / r_max)` with `c_k ~ U(−1, 1) / k²`.
///
/// Every mode is even in `r` and vanishes at `r_max`.
pub fn random_smooth_field<R: Rng + ?Sized>(
    grid: &Arc<RadialGrid>,
    rng: &mut R,
    modes: usize,
) -> RadialField {
    let coeffs: Vec<f64> = (1..=modes.max(1))
        .map(|k| rng.gen_range(-1.0..1.0) / (k * k) as f64)
        .collect();
    let scale = PI / grid.r_max();
    let values = grid
        .nodes()
        .iter()
        .map(|&r| {
            coeffs
                .iter()
                .enumerate()
                .map(|(k, c)| c * ((k as f64 + 0.5) * scale * r).cos())
                .sum()
        })
        .collect();
    RadialField::new(Arc::clone(grid), values).expect("finite by construction")
}

/// Independent `U(−1, 1)` nodal values.
pub fn random_nodal_field<R: Rng + ?Sized>(grid: &Arc<RadialGrid>, rng: &mut R) -> RadialField {
    let values = (0..grid.len()).map(|_| rng.gen_range(-1.0..1.0)).collect();
    RadialField::new(Arc::clone(grid), values).expect("finite by construction")
}
