use serde::Serialize;

use crate::error::{Error, Result};
use crate::scalar::Real;
use crate::types::{ApertureConfig, RadarParams};

/// One spacing criterion: the actual spacing must be strictly below the limit.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Criterion<T> {
    pub limit: T,
    pub actual: T,
    pub pass: bool,
}

impl<T: Real> Criterion<T> {
    fn new(limit: T, actual: T) -> Self {
        Self {
            limit,
            actual,
            pass: actual < limit,
        }
    }
}

/// Alias-free sampling check for the wavenumber, vertical and angular grids.
///
/// Unbounded limits are reported as `+inf`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SamplingReport<T> {
    /// rad/m
    pub dk: Criterion<T>,
    /// m, against the effective virtual-element spacing
    pub dy: Criterion<T>,
    /// rad
    pub dtheta: Criterion<T>,
}

impl<T: Real> SamplingReport<T> {
    pub fn all_pass(&self) -> bool {
        self.dk.pass && self.dy.pass && self.dtheta.pass
    }
}

/// Evaluates the three sampling limits for a target of horizontal radius
/// `target_radius` and vertical extent `target_height`.
///
/// The vertical limit uses the shortest wavelength of the sweep.
pub fn check_sampling<T: Real>(
    params: &RadarParams<T>,
    cfg: &ApertureConfig<T>,
    target_radius: T,
    target_height: T,
) -> Result<SamplingReport<T>> {
    params.validate()?;
    cfg.validate()?;
    if !(target_radius >= T::zero()) || !target_radius.is_finite() {
        return Err(Error::param("target_radius", "must be >= 0"));
    }
    if !(target_height >= T::zero()) || !target_height.is_finite() {
        return Err(Error::param("target_height", "must be >= 0"));
    }
    let two = T::lit(2.0);
    let pi = T::PI();
    let r0 = cfg.r0;
    let rt = target_radius;

    let dk_limit = if rt > T::zero() { pi / (two * rt) } else { T::infinity() };

    let span = cfg.scan_height() + target_height;
    let dy_limit = if span > T::zero() {
        params.lambda_min() * (span * span / T::lit(4.0) + r0 * r0).sqrt() / (two * span)
    } else {
        T::infinity()
    };

    let dtheta_limit = if rt > T::zero() {
        pi * (r0 * r0 + rt * rt).sqrt() / (two * params.k_max() * r0 * rt)
    } else {
        T::infinity()
    };

    Ok(SamplingReport {
        dk: Criterion::new(dk_limit, params.delta_k()),
        dy: Criterion::new(dy_limit, cfg.effective_spacing()),
        dtheta: Criterion::new(dtheta_limit, cfg.delta_theta()),
    })
}
