use crate::error::{Error, Result};
use crate::tensor::DenseTensor;

/// Symmetric uniform quantization to `bits` with step
/// `max|t| / (2^(bits-1) - 1)`, values rounded to the nearest step.
///
/// The extremes map back to exactly `±max|t|`, which keeps the step of a
/// re-quantization identical and makes the operation idempotent. One bit
/// has no non-zero level under the formula, so it is treated like two bits
/// (levels {-max, 0, max}).
pub fn quantize_uniform(t: &DenseTensor, bits: u32) -> Result<DenseTensor> {
    if !(1..=16).contains(&bits) {
        return Err(Error::InvalidArgument(format!("bits must be in [1, 16], got {bits}")));
    }
    let max = t.max_abs();
    if max == 0.0 {
        return Ok(t.map(|_| 0.0));
    }
    let levels = ((1i64 << (bits - 1)) - 1).max(1) as f64;
    let step = max / levels;
    Ok(t.map(|v| {
        let k = (v / step).round().clamp(-levels, levels);
        if k.abs() == levels {
            k.signum() * max
        } else {
            k * step
        }
    }))
}
