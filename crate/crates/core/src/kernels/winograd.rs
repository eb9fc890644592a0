//! Winograd minimal filtering F(2x2, 3x3).
//!
//! Each 2x2 output tile is computed from a 4x4 input tile as
//! `Y = Aᵀ [ (G g Gᵀ) ⊙ (Bᵀ d B) ] A`, using interpolation points {0, 1, -1}.
//! The element-wise product is the only place data meets weights: 16
//! multiplications per tile against 36 for the direct method.

use super::conv_geometry;
use crate::error::{Error, Result};
use crate::tensor::DenseTensor;

/// Multiplications per 2x2 output tile, per input channel.
pub const WINOGRAD_TILE_MULTS: u64 = 16;
/// Direct multiplications for the same tile: 4 outputs x 9 taps.
pub const DIRECT_TILE_MULTS: u64 = 36;

const BT: [[f64; 4]; 4] = [
    [1.0, 0.0, -1.0, 0.0],
    [0.0, 1.0, 1.0, 0.0],
    [0.0, -1.0, 1.0, 0.0],
    [0.0, 1.0, 0.0, -1.0],
];

const G: [[f64; 3]; 4] = [[1.0, 0.0, 0.0], [0.5, 0.5, 0.5], [0.5, -0.5, 0.5], [0.0, 0.0, 1.0]];

const AT: [[f64; 4]; 2] = [[1.0, 1.0, 1.0, 0.0], [0.0, 1.0, -1.0, -1.0]];

fn filter_transform(g: &[[f64; 3]; 3]) -> [[f64; 4]; 4] {
    let mut tmp = [[0.0; 3]; 4];
    for i in 0..4 {
        for j in 0..3 {
            tmp[i][j] = (0..3).map(|k| G[i][k] * g[k][j]).sum();
        }
    }
    let mut u = [[0.0; 4]; 4];
    for i in 0..4 {
        for j in 0..4 {
            u[i][j] = (0..3).map(|k| tmp[i][k] * G[j][k]).sum();
        }
    }
    u
}

fn input_transform(d: &[[f64; 4]; 4]) -> [[f64; 4]; 4] {
    let mut tmp = [[0.0; 4]; 4];
    for i in 0..4 {
        for j in 0..4 {
            tmp[i][j] = (0..4).map(|k| BT[i][k] * d[k][j]).sum();
        }
    }
    let mut v = [[0.0; 4]; 4];
    for i in 0..4 {
        for j in 0..4 {
            v[i][j] = (0..4).map(|k| tmp[i][k] * BT[j][k]).sum();
        }
    }
    v
}

fn output_transform(m: &[[f64; 4]; 4]) -> [[f64; 2]; 2] {
    let mut tmp = [[0.0; 4]; 2];
    for i in 0..2 {
        for j in 0..4 {
            tmp[i][j] = (0..4).map(|k| AT[i][k] * m[k][j]).sum();
        }
    }
    let mut y = [[0.0; 2]; 2];
    for i in 0..2 {
        for j in 0..2 {
            y[i][j] = (0..4).map(|k| tmp[i][k] * AT[j][k]).sum();
        }
    }
    y
}

/// Stride-1, unpadded 3x3 convolution via F(2x2, 3x3).
///
/// Odd output extents are handled by zero-extending the input to whole tiles
/// and cropping the result.
pub fn conv_winograd_f22_33(input: &DenseTensor, filters: &DenseTensor) -> Result<DenseTensor> {
    let geo = conv_geometry(input, filters, 1, 0)?;
    if (geo.kernel_h, geo.kernel_w) != (3, 3) {
        return Err(Error::Unsupported(format!(
            "F(2x2, 3x3) needs 3x3 filters, got {}x{}",
            geo.kernel_h, geo.kernel_w
        )));
    }
    let tiles_h = geo.out_h.div_ceil(2);
    let tiles_w = geo.out_w.div_ceil(2);

    let transformed: Vec<[[f64; 4]; 4]> = (0..geo.filters * geo.channels)
        .map(|mc| {
            let (m, c) = (mc / geo.channels, mc % geo.channels);
            let g = std::array::from_fn(|r| std::array::from_fn(|s| filters.at(&[m, c, r, s])));
            filter_transform(&g)
        })
        .collect();

    let sample = |c: usize, y: usize, x: usize| {
        if y < geo.height && x < geo.width {
            input.at(&[c, y, x])
        } else {
            0.0
        }
    };

    let mut out = DenseTensor::zeros(&[geo.filters, geo.out_h, geo.out_w]);
    let mut tile_inputs = vec![[[0.0; 4]; 4]; geo.channels];
    for ty in 0..tiles_h {
        for tx in 0..tiles_w {
            for (c, v) in tile_inputs.iter_mut().enumerate() {
                let d = std::array::from_fn(|i| std::array::from_fn(|j| sample(c, 2 * ty + i, 2 * tx + j)));
                *v = input_transform(&d);
            }
            for m in 0..geo.filters {
                let mut acc = [[0.0; 4]; 4];
                for (c, v) in tile_inputs.iter().enumerate() {
                    let u = &transformed[m * geo.channels + c];
                    for i in 0..4 {
                        for j in 0..4 {
                            acc[i][j] += u[i][j] * v[i][j];
                        }
                    }
                }
                let y = output_transform(&acc);
                for (i, row) in y.iter().enumerate() {
                    for (j, &val) in row.iter().enumerate() {
                        let (e, f) = (2 * ty + i, 2 * tx + j);
                        if e < geo.out_h && f < geo.out_w {
                            out.set(&[m, e, f], val);
                        }
                    }
                }
            }
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kernels::conv_direct;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn tile_ratio() {
        assert_eq!(DIRECT_TILE_MULTS as f64 / WINOGRAD_TILE_MULTS as f64, 2.25);
    }

    #[test]
    fn zero_filter_gives_zero() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let input = DenseTensor::random(&[2, 6, 6], &mut rng);
        let out = conv_winograd_f22_33(&input, &DenseTensor::zeros(&[3, 2, 3, 3])).unwrap();
        assert!(out.data().iter().all(|&v| v == 0.0));
    }

    #[test]
    fn matches_direct_on_8x8() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let input = DenseTensor::random(&[1, 8, 8], &mut rng);
        let w = DenseTensor::random(&[1, 1, 3, 3], &mut rng);
        let direct = conv_direct(&input, &w, 1, 0).unwrap();
        let wino = conv_winograd_f22_33(&input, &w).unwrap();
        assert!(wino.max_rel_diff(&direct).unwrap() <= 1e-9);
    }

    #[test]
    fn odd_extent() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let input = DenseTensor::random(&[3, 7, 10], &mut rng);
        let w = DenseTensor::random(&[2, 3, 3, 3], &mut rng);
        let direct = conv_direct(&input, &w, 1, 0).unwrap();
        let wino = conv_winograd_f22_33(&input, &w).unwrap();
        assert_eq!(wino.shape(), &[2, 5, 8]);
        assert!(wino.max_rel_diff(&direct).unwrap() <= 1e-9);
    }

    #[test]
    fn rejects_other_filters() {
        let input = DenseTensor::zeros(&[1, 8, 8]);
        let err = conv_winograd_f22_33(&input, &DenseTensor::zeros(&[1, 1, 5, 5])).unwrap_err();
        assert!(matches!(err, Error::Unsupported(_)));
    }
}
