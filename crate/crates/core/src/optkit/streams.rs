//! Seeded synthetic activation streams.

use rand::Rng;
use rand_distr::{Distribution, Normal};

use crate::error::{Error, Result};

/// Each word is zero with probability `zero_fraction`, otherwise uniform on
/// `1..=u16::MAX`.
pub fn sparse_stream<R: Rng>(n: usize, zero_fraction: f64, rng: &mut R) -> Result<Vec<u16>> {
    if !(0.0..=1.0).contains(&zero_fraction) {
        return Err(Error::InvalidArgument(format!(
            "sparsity must be in [0, 1], got {zero_fraction}"
        )));
    }
    Ok((0..n)
        .map(|_| {
            if rng.random_bool(zero_fraction) {
                0
            } else {
                rng.random_range(1..=u16::MAX)
            }
        })
        .collect())
}

/// Pre-activation mean; puts roughly 60% of the outputs at zero.
pub const RELU_MEAN: f64 = -0.25;
/// Fixed-point scale of the 16-bit words (4.12 format).
pub const RELU_SCALE: f64 = 4096.0;

/// ReLU of `N(RELU_MEAN, 1)` samples in unsigned 4.12 fixed point.
pub fn relu_stream<R: Rng>(n: usize, rng: &mut R) -> Vec<u16> {
    let normal = Normal::new(RELU_MEAN, 1.0).expect("unit variance is valid");
    (0..n)
        .map(|_| {
            let x: f64 = normal.sample(rng);
            (x.max(0.0) * RELU_SCALE).round().min(f64::from(u16::MAX)) as u16
        })
        .collect()
}
