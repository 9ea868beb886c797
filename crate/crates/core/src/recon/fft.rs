//! Thin helpers over `rustfft` for the strided transforms the pipeline needs.

use num_complex::Complex;
use rustfft::{Fft, FftDirection, FftPlanner};
use std::sync::Arc;

use crate::scalar::Real;

pub(crate) fn plan<T: Real>(len: usize, direction: FftDirection) -> Arc<dyn Fft<T>> {
    FftPlanner::new().plan_fft(len, direction)
}

/// Harmonic carried by bin `b` of an `n`-point DFT in natural order.
#[inline]
pub(crate) fn bin_harmonic(b: usize, n: usize) -> i64 {
    let h = b as i64;
    if b < n.div_ceil(2) {
        h
    } else {
        h - n as i64
    }
}

/// Natural-order bin holding harmonic `h` of an `n`-point DFT.
#[inline]
pub(crate) fn harmonic_bin(h: i64, n: usize) -> usize {
    h.rem_euclid(n as i64) as usize
}

/// In-place 2-D transform of a row-major `rows × cols` array.
pub(crate) fn fft2_inplace<T: Real>(
    data: &mut [Complex<T>],
    rows: usize,
    cols: usize,
    direction: FftDirection,
) {
    debug_assert_eq!(data.len(), rows * cols);
    if cols > 1 {
        plan::<T>(cols, direction).process(data);
    }
    if rows > 1 {
        let mut t = transpose(data, rows, cols);
        plan::<T>(rows, direction).process(&mut t);
        let back = transpose(&t, cols, rows);
        data.copy_from_slice(&back);
    }
}

pub(crate) fn transpose<T: Copy>(data: &[T], rows: usize, cols: usize) -> Vec<T> {
    let mut out = Vec::with_capacity(data.len());
    for c in 0..cols {
        for r in 0..rows {
            out.push(data[r * cols + c]);
        }
    }
    out
}

/// Symmetric Hann taper; a single sample gets weight 1.
pub(crate) fn hann<T: Real>(n: usize) -> Vec<T> {
    if n < 2 {
        return vec![T::one(); n];
    }
    let denom = T::from_usize_lossy(n - 1);
    (0..n)
        .map(|i| {
            let x = T::TAU() * T::from_usize_lossy(i) / denom;
            T::lit(0.5) - T::lit(0.5) * x.cos()
        })
        .collect()
}
