//! Shared fixtures for the criterion benches.

use dnncost::DenseTensor;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Seeded `[c, h, w]` input and `[m, c, k, k]` filters.
pub fn conv_case(seed: u64, c: usize, m: usize, hw: usize, k: usize) -> (DenseTensor, DenseTensor) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let input = DenseTensor::random(&[c, hw, hw], &mut rng);
    let filters = DenseTensor::random(&[m, c, k, k], &mut rng);
    (input, filters)
}
