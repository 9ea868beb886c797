//! Stolt resampling of the polar spectrum `P̂(θ, k, k_y)` onto a Cartesian
//! `(k_x, k_y, k_z)` grid.
//!
//! For each Cartesian target the source coordinates are
//! `θ* = atan2(k_z, k_x)` and `k* = ½·√(k_x² + k_y² + k_z²)`; the value is
//! bilinear in `(θ, k)` within one `k_y` slice, circular in θ for a full
//! rotation, and zero outside the swept band.

use num_complex::Complex;

use crate::error::{Error, Result};
use crate::scalar::Real;
use crate::types::{AxisDomain, SpectrumAxis, SpectrumGrid, SpectrumStage};

/// One `k_y` slice of the polar spectrum, laid out `[k][θ]`.
#[derive(Debug, Clone, Copy)]
pub struct PolarSlice<'a, T> {
    pub data: &'a [Complex<T>],
    pub theta0: T,
    pub dtheta: T,
    pub n_theta: usize,
    pub k0: T,
    pub dk: T,
    pub nk: usize,
    /// Whether the θ record closes on itself (full rotation).
    pub circular: bool,
}

impl<T: Real> PolarSlice<'_, T> {
    #[inline]
    fn at(&self, ik: usize, it: usize) -> Complex<T> {
        self.data[ik * self.n_theta + it]
    }

    /// Fractional k index, or `None` outside the swept band.
    #[inline]
    fn k_coord(&self, k: T, tol: T) -> Option<(usize, usize, T)> {
        if self.nk == 1 {
            return ((k - self.k0).abs() <= tol).then_some((0, 0, T::zero()));
        }
        let u = (k - self.k0) / self.dk;
        let last = T::from_usize_lossy(self.nk - 1);
        let eps = T::epsilon() * T::lit(64.0) * last.max(T::one());
        if u < -eps || u > last + eps {
            return None;
        }
        let u = u.max(T::zero()).min(last);
        let j0 = u.floor().to_usize().unwrap_or(0).min(self.nk - 2);
        Some((j0, j0 + 1, u - T::from_usize_lossy(j0)))
    }

    #[inline]
    fn theta_coord(&self, theta: T) -> Option<(usize, usize, T)> {
        let tau = T::TAU();
        let rel = (theta - self.theta0) % tau;
        let rel = if rel < T::zero() { rel + tau } else { rel };
        let n = self.n_theta;
        let mut t = rel / self.dtheta;
        let nf = T::from_usize_lossy(n);
        if t >= nf {
            t -= nf;
        }
        if !self.circular && t > T::from_usize_lossy(n - 1) {
            return None;
        }
        let i0 = t.floor().to_usize().unwrap_or(0).min(n - 1);
        let a = t - T::from_usize_lossy(i0);
        let i1 = if i0 + 1 == n { if self.circular { 0 } else { i0 } } else { i0 + 1 };
        Some((i0, i1, a))
    }

    /// Bilinear sample at `(θ, k)`.
    pub fn sample(&self, theta: T, k: T, k_tol: T) -> Complex<T> {
        let zero = Complex::new(T::zero(), T::zero());
        let Some((j0, j1, b)) = self.k_coord(k, k_tol) else {
            return zero;
        };
        let Some((i0, i1, a)) = self.theta_coord(theta) else {
            return zero;
        };
        let one = T::one();
        let lo = self.at(j0, i0) * (one - a) + self.at(j0, i1) * a;
        if b == T::zero() {
            return lo;
        }
        let hi = self.at(j1, i0) * (one - a) + self.at(j1, i1) * a;
        lo * (one - b) + hi * b
    }
}

/// Resamples one slice onto the `(k_x, k_z)` grid, appending the non-zero
/// cells as `(ix·n_z + iz, value)`.
pub(crate) fn stolt_slice<T: Real>(
    polar: &PolarSlice<'_, T>,
    ky: T,
    kx: &SpectrumAxis<T>,
    kz: &SpectrumAxis<T>,
    out: &mut Vec<(u32, Complex<T>)>,
) {
    let half = T::lit(0.5);
    let k_lo = polar.k0;
    let k_hi = polar.k0 + polar.dk * T::from_usize_lossy(polar.nk.saturating_sub(1));
    // single-tone sweeps keep a shell one Cartesian cell thick
    let k_tol = half * half * kx.step.abs().max(kz.step.abs());
    let k2lo = (T::lit(2.0) * (k_lo - k_tol)).max(T::zero());
    let k2hi = T::lit(2.0) * (k_hi + k_tol);
    let (lo2, hi2) = (k2lo * k2lo, k2hi * k2hi);
    let ky2 = ky * ky;
    for ix in 0..kx.len {
        let kxv = kx.value(ix);
        let base = kxv * kxv + ky2;
        if base > hi2 {
            continue;
        }
        for iz in 0..kz.len {
            let kzv = kz.value(iz);
            let q = base + kzv * kzv;
            if q < lo2 || q > hi2 {
                continue;
            }
            let k = half * q.sqrt();
            let theta = kzv.atan2(kxv);
            let v = polar.sample(theta, k, k_tol);
            if v.re != T::zero() || v.im != T::zero() {
                out.push(((ix * kz.len + iz) as u32, v));
            }
        }
    }
}

/// Cartesian target axis centred on zero: `(i − ⌊n/2⌋)·step`.
pub fn centered_axis<T: Real>(domain: AxisDomain, n: usize, step: T) -> SpectrumAxis<T> {
    SpectrumAxis {
        domain,
        start: -T::from_usize_lossy(n / 2) * step,
        step,
        len: n,
    }
}

/// Full-grid Stolt interpolation of a polar spectrum `[θ][k][k_y]` onto the
/// Cartesian grid `[k_x][k_y][k_z]`; the `k_y` axis is carried over.
pub fn stolt_interpolate<T: Real>(
    phat: &SpectrumGrid<T>,
    kx: SpectrumAxis<T>,
    kz: SpectrumAxis<T>,
    circular: bool,
) -> Result<SpectrumGrid<T>> {
    if phat.stage != SpectrumStage::PolarSpectrum {
        return Err(Error::DimensionMismatch(format!(
            "Stolt interpolation needs a polar spectrum, got {:?}",
            phat.stage
        )));
    }
    phat.validate()?;
    if kx.domain != AxisDomain::Kx || kz.domain != AxisDomain::Kz {
        return Err(Error::DimensionMismatch("target axes must be k_x and k_z".into()));
    }
    let [nt, nk, nky] = phat.dims();
    let ky_axis = phat.axes[2];
    let mut out = SpectrumGrid::zeros(SpectrumStage::Cartesian, [kx, ky_axis, kz]);
    let mut slice = vec![Complex::new(T::zero(), T::zero()); nk * nt];
    let mut cells = Vec::new();
    for m in 0..nky {
        for it in 0..nt {
            for ik in 0..nk {
                slice[ik * nt + it] = phat.data[phat.index(it, ik, m)];
            }
        }
        let polar = PolarSlice {
            data: &slice,
            theta0: phat.axes[0].start,
            dtheta: phat.axes[0].step,
            n_theta: nt,
            k0: phat.axes[1].start,
            dk: phat.axes[1].step,
            nk,
            circular,
        };
        cells.clear();
        stolt_slice(&polar, ky_axis.value(m), &kx, &kz, &mut cells);
        for &(idx, v) in &cells {
            let (ix, iz) = (idx as usize / kz.len, idx as usize % kz.len);
            let o = out.index(ix, m, iz);
            out.data[o] = v;
        }
    }
    Ok(out)
}
