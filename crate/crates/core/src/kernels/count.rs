use std::fmt;
use std::str::FromStr;

use serde::Serialize;

use super::fft::fft_size;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum TransformMethod {
    Direct,
    Fft,
    Strassen,
    Winograd,
}

impl TransformMethod {
    pub const ALL: [TransformMethod; 4] = [
        TransformMethod::Direct,
        TransformMethod::Fft,
        TransformMethod::Strassen,
        TransformMethod::Winograd,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            TransformMethod::Direct => "direct",
            TransformMethod::Fft => "fft",
            TransformMethod::Strassen => "strassen",
            TransformMethod::Winograd => "winograd",
        }
    }
}

impl fmt::Display for TransformMethod {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for TransformMethod {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|m| m.as_str() == s)
            .ok_or_else(|| Error::InvalidArgument(format!("unknown transform method '{s}'")))
    }
}

/// Multiplication count of one method, with the direct-method baseline for
/// the same problem.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct MultCount {
    pub method: TransformMethod,
    pub count: u64,
    pub baseline: u64,
    pub output_size: u64,
    pub filter_size: u64,
    pub matrix_size: u64,
}

impl MultCount {
    /// Baseline multiplications per multiplication of this method.
    pub fn reduction(&self) -> f64 {
        self.baseline as f64 / self.count as f64
    }
}

/// Multiplications for an `output_size`² output and `filter_size`² filter
/// (direct, FFT, Winograd), or for an `matrix_size`² matrix product (Strassen).
///
/// - direct: `No²·Nf²`
/// - fft: `3·n²·log₂n + n²` with `n = next_pow2(No + Nf - 1)`: two forward
///   and one inverse 2-D transform plus the point-wise product
/// - strassen: `7^log₂N` against `N³`
/// - winograd F(2x2, 3x3): 16 per 2x2 tile, i.e. `4·No²` for `Nf = 3`
pub fn mult_count(method: TransformMethod, output_size: u64, filter_size: u64, matrix_size: u64) -> Result<MultCount> {
    let unsupported = |m: String| Err(Error::Unsupported(m));
    let direct = || -> Result<u64> {
        if output_size == 0 || filter_size == 0 {
            return Err(Error::InvalidArgument("output and filter sizes must be >= 1".into()));
        }
        Ok(output_size.pow(2) * filter_size.pow(2))
    };
    let (count, baseline) = match method {
        TransformMethod::Direct => (direct()?, direct()?),
        TransformMethod::Fft => {
            let base = direct()?;
            let n = fft_size(output_size as usize, filter_size as usize) as u64;
            let log = n.trailing_zeros() as u64;
            (3 * n * n * log + n * n, base)
        }
        TransformMethod::Strassen => {
            if !matrix_size.is_power_of_two() {
                return unsupported(format!("Strassen needs a power-of-two matrix size, got {matrix_size}"));
            }
            (7u64.pow(matrix_size.trailing_zeros()), matrix_size.pow(3))
        }
        TransformMethod::Winograd => {
            if filter_size != 3 {
                return unsupported(format!(
                    "Winograd F(2x2, 3x3) needs a 3x3 filter, got {filter_size}x{filter_size}"
                ));
            }
            (4 * output_size.pow(2), direct()?)
        }
    };
    Ok(MultCount {
        method,
        count,
        baseline,
        output_size,
        filter_size,
        matrix_size,
    })
}
