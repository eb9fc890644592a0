//! Convolution through a radix-2 FFT.

use num_complex::Complex64;

use super::conv_geometry;
use crate::error::{Error, Result};
use crate::tensor::DenseTensor;

/// Transform length for linear convolution of an `extent`-long signal with a
/// `kernel`-long filter: the next power of two at or above `extent + kernel - 1`.
pub fn fft_size(extent: usize, kernel: usize) -> usize {
    (extent + kernel - 1).next_power_of_two()
}

/// Iterative Cooley-Tukey transform. `buf.len()` must be a power of two.
/// The inverse is unnormalized.
pub fn fft_in_place(buf: &mut [Complex64], inverse: bool) {
    let n = buf.len();
    assert!(n.is_power_of_two(), "fft length {n} is not a power of two");
    if n < 2 {
        return;
    }
    let bits = n.trailing_zeros();
    for i in 0..n {
        let j = i.reverse_bits() >> (usize::BITS - bits);
        if i < j {
            buf.swap(i, j);
        }
    }
    let sign = if inverse { 1.0 } else { -1.0 };
    let mut len = 2;
    while len <= n {
        let step = Complex64::from_polar(1.0, sign * 2.0 * std::f64::consts::PI / len as f64);
        for start in (0..n).step_by(len) {
            let mut w = Complex64::new(1.0, 0.0);
            for k in 0..len / 2 {
                let a = buf[start + k];
                let b = buf[start + k + len / 2] * w;
                buf[start + k] = a + b;
                buf[start + k + len / 2] = a - b;
                w *= step;
            }
        }
        len <<= 1;
    }
}

/// Row-major `rows x cols` 2-D transform.
fn fft2d(buf: &mut [Complex64], rows: usize, cols: usize, inverse: bool) {
    for row in buf.chunks_mut(cols) {
        fft_in_place(row, inverse);
    }
    let mut column = vec![Complex64::default(); rows];
    for c in 0..cols {
        for r in 0..rows {
            column[r] = buf[r * cols + c];
        }
        fft_in_place(&mut column, inverse);
        for r in 0..rows {
            buf[r * cols + c] = column[r];
        }
    }
}

fn spectrum(plane: impl Fn(usize, usize) -> f64, h: usize, w: usize, rows: usize, cols: usize) -> Vec<Complex64> {
    let mut buf = vec![Complex64::default(); rows * cols];
    for y in 0..h {
        for x in 0..w {
            buf[y * cols + x] = Complex64::new(plane(y, x), 0.0);
        }
    }
    fft2d(&mut buf, rows, cols, false);
    buf
}

/// Stride-1, unpadded convolution via point-wise products of spectra.
///
/// Cross-correlation with a real filter is `IFFT(X · conj(K))`; the transform
/// is long enough that the valid region never wraps.
pub fn conv_fft(input: &DenseTensor, filters: &DenseTensor) -> Result<DenseTensor> {
    let geo = conv_geometry(input, filters, 1, 0)?;
    let rows = fft_size(geo.height, geo.kernel_h);
    let cols = fft_size(geo.width, geo.kernel_w);
    if rows.checked_mul(cols).is_none() {
        return Err(Error::Unsupported("FFT plane too large".into()));
    }

    let inputs: Vec<Vec<Complex64>> = (0..geo.channels)
        .map(|c| spectrum(|y, x| input.at(&[c, y, x]), geo.height, geo.width, rows, cols))
        .collect();

    let norm = 1.0 / (rows * cols) as f64;
    let mut out = DenseTensor::zeros(&[geo.filters, geo.out_h, geo.out_w]);
    for m in 0..geo.filters {
        let mut acc = vec![Complex64::default(); rows * cols];
        for (c, x) in inputs.iter().enumerate() {
            let k = spectrum(|r, s| filters.at(&[m, c, r, s]), geo.kernel_h, geo.kernel_w, rows, cols);
            for ((a, xv), kv) in acc.iter_mut().zip(x).zip(&k) {
                *a += xv * kv.conj();
            }
        }
        fft2d(&mut acc, rows, cols, true);
        for e in 0..geo.out_h {
            for f in 0..geo.out_w {
                out.set(&[m, e, f], acc[e * cols + f].re * norm);
            }
        }
    }
    Ok(out)
}
