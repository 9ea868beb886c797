//! Spectral azimuth filter `G(Θ, k_r)`, the θ-DFT of `e^{j k_r R₀ cos θ}`.

use num_complex::Complex;
use rustfft::FftDirection;

use super::fft::{bin_harmonic, harmonic_bin, plan};
use crate::scalar::Real;

/// DFT over the sampled rotation grid of `g(θ) = e^{j k_r R₀ cos(θ - θ₀)}`.
///
/// Output is in natural FFT order: index 0 holds the zero harmonic.
pub fn make_azimuth_filter<T: Real>(theta_grid: &[T], k_r: T, r0: T) -> Vec<Complex<T>> {
    let Some(&theta0) = theta_grid.first() else {
        return Vec::new();
    };
    let mut g: Vec<Complex<T>> = theta_grid
        .iter()
        .map(|&th| {
            let (s, c) = (k_r * r0 * (th - theta0).cos()).sin_cos();
            Complex::new(c, s)
        })
        .collect();
    plan::<T>(g.len(), FftDirection::Forward).process(&mut g);
    g
}

/// Same filter evaluated on an `oversample`-times finer θ grid and folded
/// back to the `n_theta` harmonics of the data record.
///
/// When `k_r·R₀·Δθ` exceeds π the plain DFT of `g` aliases; the finer grid
/// recovers the Fourier-series coefficients instead. With `oversample = 1`
/// this reduces exactly to [`make_azimuth_filter`] on a uniform grid.
pub fn azimuth_filter_oversampled<T: Real>(
    n_theta: usize,
    delta_theta: T,
    k_r: T,
    r0: T,
    oversample: usize,
) -> Vec<Complex<T>> {
    let m = oversample.max(1);
    let fine_n = n_theta * m;
    let fine_step = delta_theta / T::from_usize_lossy(m);
    let mut g: Vec<Complex<T>> = (0..fine_n)
        .map(|i| {
            let (s, c) = (k_r * r0 * (T::from_usize_lossy(i) * fine_step).cos()).sin_cos();
            Complex::new(c, s)
        })
        .collect();
    plan::<T>(fine_n, FftDirection::Forward).process(&mut g);
    if m == 1 {
        return g;
    }
    let scale = T::one() / T::from_usize_lossy(m);
    (0..n_theta)
        .map(|b| g[harmonic_bin(bin_harmonic(b, n_theta), fine_n)] * scale)
        .collect()
}

/// Smallest power-of-two oversampling that keeps the filter unaliased for
/// wavenumbers up to `k_r_max`.
pub fn auto_filter_oversample<T: Real>(n_theta: usize, k_r_max: T, r0: T) -> usize {
    let need = (T::lit(2.0) * k_r_max * r0 + T::lit(32.0)) / T::from_usize_lossy(n_theta.max(1));
    let need = need.to_f64_lossless().ceil().max(1.0) as usize;
    need.next_power_of_two()
}
