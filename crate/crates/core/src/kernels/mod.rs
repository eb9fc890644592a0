//! Reference convolution kernels and multiplication-count estimators.
//!
//! These are correctness oracles in `f64`, not fast kernels. All of them
//! compute the DNN convention (cross-correlation):
//!
//! `out[m, e, f] = sum over c, r, s of in[c, e*U + r - pad, f*U + s - pad] * w[m, c, r, s]`
//!
//! with zeros outside the input.

mod count;
mod fft;
mod winograd;

pub use count::{mult_count, MultCount, TransformMethod};
pub use fft::{conv_fft, fft_in_place, fft_size};
pub use winograd::{conv_winograd_f22_33, DIRECT_TILE_MULTS, WINOGRAD_TILE_MULTS};

use crate::error::{Error, Result};
use crate::tensor::DenseTensor;

/// Output extent of a conv over `[C, H, W]` with `[M, C, R, S]` filters.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ConvGeometry {
    pub channels: usize,
    pub height: usize,
    pub width: usize,
    pub filters: usize,
    pub kernel_h: usize,
    pub kernel_w: usize,
    pub out_h: usize,
    pub out_w: usize,
}

pub fn conv_geometry(input: &DenseTensor, filters: &DenseTensor, stride: usize, pad: usize) -> Result<ConvGeometry> {
    let [c, h, w] = input.dims3()?;
    let [m, fc, r, s] = filters.dims4()?;
    if fc != c {
        return Err(Error::ShapeMismatch(format!(
            "input has {c} channels, filters expect {fc}"
        )));
    }
    if stride == 0 {
        return Err(Error::ShapeMismatch("stride must be >= 1".into()));
    }
    let (ph, pw) = (h + 2 * pad, w + 2 * pad);
    if r > ph || s > pw {
        return Err(Error::ShapeMismatch(format!(
            "{r}x{s} filter larger than padded input {ph}x{pw}"
        )));
    }
    Ok(ConvGeometry {
        channels: c,
        height: h,
        width: w,
        filters: m,
        kernel_h: r,
        kernel_w: s,
        out_h: (ph - r) / stride + 1,
        out_w: (pw - s) / stride + 1,
    })
}

/// Direct seven-loop convolution (batch of one).
pub fn conv_direct(input: &DenseTensor, filters: &DenseTensor, stride: usize, pad: usize) -> Result<DenseTensor> {
    let g = conv_geometry(input, filters, stride, pad)?;
    let mut out = DenseTensor::zeros(&[g.filters, g.out_h, g.out_w]);
    for m in 0..g.filters {
        for e in 0..g.out_h {
            for f in 0..g.out_w {
                let mut acc = 0.0;
                for c in 0..g.channels {
                    for r in 0..g.kernel_h {
                        let y = (e * stride + r) as isize - pad as isize;
                        if y < 0 || y >= g.height as isize {
                            continue;
                        }
                        for s in 0..g.kernel_w {
                            let x = (f * stride + s) as isize - pad as isize;
                            if x < 0 || x >= g.width as isize {
                                continue;
                            }
                            acc += input.at(&[c, y as usize, x as usize]) * filters.at(&[m, c, r, s]);
                        }
                    }
                }
                out.set(&[m, e, f], acc);
            }
        }
    }
    Ok(out)
}

/// Toeplitz lowering: a `(C*R*S) x (E*F)` matrix whose column `e*F + f`
/// holds the receptive field of output `(e, f)`.
pub fn im2col(input: &DenseTensor, kernel_h: usize, kernel_w: usize, stride: usize, pad: usize) -> Result<DenseTensor> {
    let probe = DenseTensor::zeros(&[1, input.shape()[0], kernel_h, kernel_w]);
    let g = conv_geometry(input, &probe, stride, pad)?;
    let cols = g.out_h * g.out_w;
    let rows = g.channels * kernel_h * kernel_w;
    let mut patches = DenseTensor::zeros(&[rows, cols]);
    let data = patches.data_mut();
    for c in 0..g.channels {
        for r in 0..kernel_h {
            for s in 0..kernel_w {
                let row = (c * kernel_h + r) * kernel_w + s;
                for e in 0..g.out_h {
                    let y = (e * stride + r) as isize - pad as isize;
                    if y < 0 || y >= g.height as isize {
                        continue;
                    }
                    for f in 0..g.out_w {
                        let x = (f * stride + s) as isize - pad as isize;
                        if x >= 0 && x < g.width as isize {
                            data[row * cols + e * g.out_w + f] = input.at(&[c, y as usize, x as usize]);
                        }
                    }
                }
            }
        }
    }
    Ok(patches)
}

/// Convolution as `filters[M, C*R*S] x patches[C*R*S, E*F]`.
pub fn conv_im2col(input: &DenseTensor, filters: &DenseTensor, stride: usize, pad: usize) -> Result<DenseTensor> {
    let g = conv_geometry(input, filters, stride, pad)?;
    let patches = im2col(input, g.kernel_h, g.kernel_w, stride, pad)?;
    let k = g.channels * g.kernel_h * g.kernel_w;
    let n = g.out_h * g.out_w;
    let (a, b) = (filters.data(), patches.data());
    let mut out = vec![0.0; g.filters * n];
    for m in 0..g.filters {
        let row = &mut out[m * n..(m + 1) * n];
        for (j, dst) in row.iter_mut().enumerate() {
            *dst = (0..k).map(|i| a[m * k + i] * b[i * n + j]).sum();
        }
    }
    DenseTensor::new(vec![g.filters, g.out_h, g.out_w], out)
}
