use crate::error::{Error, Result};
use crate::scalar::Real;
use crate::types::{ApertureConfig, RadarParams};

/// Bessel function of the first kind, order one.
pub fn bessel_j1<T: Real>(x: T) -> T {
    T::lit(libm::j1(x.to_f64_lossless()))
}

/// Vertical resolution `λ_c·R₀ / (2·D_y)` for the scanned aperture height.
pub fn resolution_vertical<T: Real>(params: &RadarParams<T>, cfg: &ApertureConfig<T>) -> Result<T> {
    let span = cfg.scan_height();
    if !(span > T::zero()) {
        return Err(Error::param(
            "aperture.num_y",
            "vertical aperture has zero height",
        ));
    }
    Ok(params.lambda_center() * cfg.r0 / (T::lit(2.0) * span))
}

/// Radial (x–z) resolution `2.4 / (k_max + k_min)`.
pub fn resolution_radial<T: Real>(params: &RadarParams<T>) -> T {
    T::lit(2.4) / (params.k_max() + params.k_min())
}

/// Analytic point-spread function of the annular wavenumber support
/// `2k ∈ [2k_min, 2k_max]` at radius `r` from the point.
pub fn psf_analytic<T: Real>(r: T, params: &RadarParams<T>) -> T {
    let (kmin, kmax) = (params.k_min(), params.k_max());
    let r = r.abs();
    if r == T::zero() {
        return (kmax * kmax - kmin * kmin) / T::PI();
    }
    let two = T::lit(2.0);
    let pr = T::PI() * r;
    kmax * bessel_j1(two * kmax * r) / pr - kmin * bessel_j1(two * kmin * r) / pr
}
