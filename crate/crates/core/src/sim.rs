//! Point-scatterer echo simulation on the cylindrical scan geometry.
//!
//! The transceiver sits at `(R₀ cos θ, y', R₀ sin θ)`; rotating the target by
//! `+θ` is modelled by moving the antennas to angle `θ` on the scan circle.

use num_complex::Complex;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::scalar::Real;
use crate::types::{ApertureConfig, EchoCube, RadarParams, Scene};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct SimOptions {
    /// Apply the `1/(R_T·R_R)` spreading loss.
    pub include_amplitude: bool,
}

impl Default for SimOptions {
    fn default() -> Self {
        Self {
            include_amplitude: true,
        }
    }
}

#[inline]
fn range<T: Real>(ax: T, az: T, ay: T, x: T, y: T, z: T) -> T {
    let dx = x - ax;
    let dz = z - az;
    let dy = y - ay;
    (dx * dx + dz * dz + dy * dy).sqrt()
}

/// One echo term `a·e^{jk(R_T+R_R)}`, optionally divided by `R_T·R_R`.
#[inline]
fn echo_term<T: Real>(amp: Complex<T>, k: T, rt: T, rr: T, spread: bool) -> Complex<T> {
    let (s, c) = (k * (rt + rr)).sin_cos();
    let mut v = amp * Complex::new(c, s);
    if spread {
        v /= rt * rr;
    }
    v
}

fn check_ranges<T: Real>(ranges: &[T], npts: usize) -> Result<()> {
    for (i, r) in ranges.iter().enumerate() {
        if *r <= T::min_positive_value() {
            return Err(Error::CoincidentPoint { index: i % npts });
        }
    }
    Ok(())
}

fn validate_inputs<T: Real>(scene: &Scene<T>, cfg: &ApertureConfig<T>, params: &RadarParams<T>) -> Result<()> {
    params.validate()?;
    cfg.validate()?;
    scene.validate(cfg.r0)
}

/// Multistatic echo `s(θ, k, capture, tx, rx)` of a point scene.
pub fn simulate_mimo_echo<T: Real>(
    scene: &Scene<T>,
    cfg: &ApertureConfig<T>,
    params: &RadarParams<T>,
    opts: SimOptions,
) -> Result<EchoCube<T>> {
    validate_inputs(scene, cfg, params)?;
    let theta = cfg.theta_grid();
    let k = params.wavenumber_grid();
    let captures = cfg.capture_positions();
    let mut cube = EchoCube::zeros_multistatic(
        theta.clone(),
        k.clone(),
        captures.clone(),
        cfg.tx_offsets.clone(),
        cfg.rx_offsets.clone(),
    );
    let npts = scene.points.len();
    let (ntx, nrx, ncap) = (cfg.tx_offsets.len(), cfg.rx_offsets.len(), captures.len());
    let block = cube.lane_len() * k.len();
    if block == 0 {
        return Ok(cube);
    }

    let results: Vec<Result<()>> = cube
        .data
        .par_chunks_mut(block)
        .zip(theta.par_iter())
        .map(|(out, &th)| {
            let (s, c) = th.sin_cos();
            let (ax, az) = (cfg.r0 * c, cfg.r0 * s);
            // ranges indexed [capture][element][point]
            let ranges_for = |offsets: &[T]| -> Vec<T> {
                let mut r = Vec::with_capacity(ncap * offsets.len() * npts);
                for &yc in &captures {
                    for &off in offsets {
                        for p in &scene.points {
                            r.push(range(ax, az, yc + off, p.x, p.y, p.z));
                        }
                    }
                }
                r
            };
            let rt = ranges_for(&cfg.tx_offsets);
            let rr = ranges_for(&cfg.rx_offsets);
            if opts.include_amplitude {
                check_ranges(&rt, npts.max(1))?;
                check_ranges(&rr, npts.max(1))?;
            }
            let mut idx = 0;
            for &kj in &k {
                for ic in 0..ncap {
                    for itx in 0..ntx {
                        let rt_row = &rt[(ic * ntx + itx) * npts..][..npts];
                        for irx in 0..nrx {
                            let rr_row = &rr[(ic * nrx + irx) * npts..][..npts];
                            let mut acc = Complex::new(T::zero(), T::zero());
                            for (ip, p) in scene.points.iter().enumerate() {
                                acc += echo_term(p.amplitude, kj, rt_row[ip], rr_row[ip], opts.include_amplitude);
                            }
                            out[idx] = acc;
                            idx += 1;
                        }
                    }
                }
            }
            Ok(())
        })
        .collect();
    results.into_iter().collect::<Result<Vec<()>>>()?;
    Ok(cube)
}

/// Monostatic echo `ŝ(θ, k, y)` with the transceiver at each capture
/// position of `cfg`; element offsets are ignored.
pub fn simulate_siso_echo<T: Real>(
    scene: &Scene<T>,
    cfg: &ApertureConfig<T>,
    params: &RadarParams<T>,
    opts: SimOptions,
) -> Result<EchoCube<T>> {
    simulate_monostatic_at(scene, cfg, params, &cfg.capture_positions(), opts)
}

/// Monostatic echo at an explicit list of transceiver heights; used to
/// simulate the ideal virtual array of a MIMO layout.
pub fn simulate_monostatic_at<T: Real>(
    scene: &Scene<T>,
    cfg: &ApertureConfig<T>,
    params: &RadarParams<T>,
    y_positions: &[T],
    opts: SimOptions,
) -> Result<EchoCube<T>> {
    validate_inputs(scene, cfg, params)?;
    let theta = cfg.theta_grid();
    let k = params.wavenumber_grid();
    let mut cube = EchoCube::zeros_monostatic(theta.clone(), k.clone(), y_positions.to_vec());
    let npts = scene.points.len();
    let ny = y_positions.len();
    let block = ny * k.len();
    if block == 0 {
        return Ok(cube);
    }

    let results: Vec<Result<()>> = cube
        .data
        .par_chunks_mut(block)
        .zip(theta.par_iter())
        .map(|(out, &th)| {
            let (s, c) = th.sin_cos();
            let (ax, az) = (cfg.r0 * c, cfg.r0 * s);
            let mut r = Vec::with_capacity(ny * npts);
            for &yy in y_positions {
                for p in &scene.points {
                    r.push(range(ax, az, yy, p.x, p.y, p.z));
                }
            }
            if opts.include_amplitude {
                check_ranges(&r, npts.max(1))?;
            }
            for (ik, &kj) in k.iter().enumerate() {
                for iy in 0..ny {
                    let row = &r[iy * npts..][..npts];
                    let mut acc = Complex::new(T::zero(), T::zero());
                    for (ip, p) in scene.points.iter().enumerate() {
                        acc += echo_term(p.amplitude, kj, row[ip], row[ip], opts.include_amplitude);
                    }
                    out[ik * ny + iy] = acc;
                }
            }
            Ok(())
        })
        .collect();
    results.into_iter().collect::<Result<Vec<()>>>()?;
    Ok(cube)
}
