//! Algorithm/hardware co-design tools: magnitude pruning, uniform
//! quantization, sparsity statistics and a run-length codec for activation
//! streams.

mod prune;
mod quant;
pub mod rle;
pub mod streams;

pub use prune::{energy_prune_order, prune_magnitude, LayerPruneKey};
pub use quant::quantize_uniform;
pub use rle::{compression_ratio, rle_decode, rle_encode, RleEncoder, RlePair};

use serde::Serialize;

use crate::tensor::DenseTensor;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SparseStats {
    pub elements: usize,
    pub zeros: usize,
    /// Fraction of non-zero elements.
    pub density: f64,
}

impl SparseStats {
    fn from_counts(elements: usize, zeros: usize) -> Self {
        let density = if elements == 0 {
            0.0
        } else {
            1.0 - zeros as f64 / elements as f64
        };
        Self {
            elements,
            zeros,
            density,
        }
    }

    pub fn of_values(values: &[f64]) -> Self {
        Self::from_counts(values.len(), values.iter().filter(|v| **v == 0.0).count())
    }

    pub fn of_tensor(t: &DenseTensor) -> Self {
        Self::of_values(t.data())
    }

    pub fn of_words(words: &[u16]) -> Self {
        Self::from_counts(words.len(), words.iter().filter(|w| **w == 0).count())
    }
}
