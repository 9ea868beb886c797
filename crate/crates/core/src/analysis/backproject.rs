use num_complex::Complex;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::scalar::Real;
use crate::types::{check_uniform, ApertureConfig, EchoCube, EchoKind, ImageVolume};

/// Uniform voxel grid: `dims` voxels starting at `origin` with `pitch`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridSpec<T> {
    pub dims: [usize; 3],
    pub origin: [T; 3],
    pub pitch: [T; 3],
}

impl<T: Real> GridSpec<T> {
    /// Grid with voxel `i` at `-h + i·2h/N` on each axis, the layout used by
    /// the FFT reconstruction.
    pub fn centered(dims: [usize; 3], half_extent: [T; 3]) -> Self {
        Self {
            dims,
            origin: std::array::from_fn(|a| -half_extent[a]),
            pitch: std::array::from_fn(|a| {
                T::lit(2.0) * half_extent[a] / T::from_usize_lossy(dims[a])
            }),
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.dims.contains(&0) {
            return Err(Error::param("grid", "dimensions must be >= 1"));
        }
        if self.pitch.iter().any(|&p| !(p > T::zero()) || !p.is_finite()) {
            return Err(Error::param("grid", "pitch must be > 0"));
        }
        Ok(())
    }
}

/// Brute-force matched-filter image: every voxel sums all echo samples
/// times the conjugate two-way phase to that voxel.
///
/// Summation runs in fixed `(θ, element, k)` order per voxel, so the result
/// does not depend on the thread count.
pub fn backproject<T: Real>(
    echo: &EchoCube<T>,
    cfg: &ApertureConfig<T>,
    grid: &GridSpec<T>,
) -> Result<ImageVolume<T>> {
    echo.validate()?;
    grid.validate()?;
    if !(cfg.r0 > T::zero()) {
        return Err(Error::param("aperture.r0_m", "must be > 0"));
    }
    check_uniform("k", &echo.k)?;

    // Element pairs as (tx y, rx y) absolute positions, in cube lane order.
    let pairs: Vec<(T, T)> = match echo.kind {
        EchoKind::Monostatic => echo.y.iter().map(|&y| (y, y)).collect(),
        EchoKind::Multistatic => echo
            .y
            .iter()
            .flat_map(|&c| {
                echo.tx_offsets.iter().flat_map(move |&t| {
                    echo.rx_offsets.iter().map(move |&r| (c + t, c + r))
                })
            })
            .collect(),
    };
    let nk = echo.k.len();
    let lanes = pairs.len();
    let ant: Vec<(T, T)> = echo
        .theta
        .iter()
        .map(|&t| (cfg.r0 * t.cos(), cfg.r0 * t.sin()))
        .collect();

    // Reorder to [θ][lane][k] so the wavenumber recurrence walks memory.
    let mut data = vec![Complex::new(T::zero(), T::zero()); echo.data.len()];
    for it in 0..echo.theta.len() {
        for ik in 0..nk {
            let src = (it * nk + ik) * lanes;
            for l in 0..lanes {
                data[(it * lanes + l) * nk + ik] = echo.data[src + l];
            }
        }
    }

    let k0 = echo.k[0];
    let dk = if nk > 1 {
        (echo.k[nk - 1] - echo.k[0]) / T::from_usize_lossy(nk - 1)
    } else {
        T::zero()
    };

    let mut vol = ImageVolume::zeros(grid.dims, grid.origin, grid.pitch);
    let [_, ny, nz] = grid.dims;
    let mono = echo.kind == EchoKind::Monostatic;
    vol.data
        .par_chunks_mut(ny * nz)
        .enumerate()
        .for_each(|(ix, plane)| {
            let x = grid.origin[0] + T::from_usize_lossy(ix) * grid.pitch[0];
            for iy in 0..ny {
                let y = grid.origin[1] + T::from_usize_lossy(iy) * grid.pitch[1];
                for iz in 0..nz {
                    let z = grid.origin[2] + T::from_usize_lossy(iz) * grid.pitch[2];
                    plane[iy * nz + iz] =
                        voxel_sum(&data, &ant, &pairs, nk, k0, dk, mono, [x, y, z]);
                }
            }
        });
    Ok(vol)
}

#[allow(clippy::too_many_arguments)]
#[inline]
fn voxel_sum<T: Real>(
    data: &[Complex<T>],
    ant: &[(T, T)],
    pairs: &[(T, T)],
    nk: usize,
    k0: T,
    dk: T,
    mono: bool,
    p: [T; 3],
) -> Complex<T> {
    let mut acc = Complex::new(T::zero(), T::zero());
    let mut lane = data.chunks_exact(nk);
    for &(ax, az) in ant {
        let dx = p[0] - ax;
        let dz = p[2] - az;
        let h2 = dx * dx + dz * dz;
        for &(yt, yr) in pairs {
            let samples = lane.next().expect("lane count checked by validate");
            let dyt = p[1] - yt;
            let path = if mono {
                T::lit(2.0) * (h2 + dyt * dyt).sqrt()
            } else {
                let dyr = p[1] - yr;
                (h2 + dyt * dyt).sqrt() + (h2 + dyr * dyr).sqrt()
            };
            let (s0, c0) = (-k0 * path).sin_cos();
            let (sw, cw) = (-dk * path).sin_cos();
            let w = Complex::new(cw, sw);
            let mut ph = Complex::new(c0, s0);
            for &s in samples {
                acc += s * ph;
                ph *= w;
            }
        }
    }
    acc
}
