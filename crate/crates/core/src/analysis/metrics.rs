use num_complex::Complex;
use rustfft::FftPlanner;
use serde::Serialize;

use crate::analysis::psf::{resolution_radial, resolution_vertical};
use crate::error::{Error, Result};
use crate::scalar::Real;
use crate::types::{ApertureConfig, ImageVolume, RadarParams, Scene};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PointMetric<T> {
    pub index: usize,
    pub truth: [T; 3],
    /// Voxel holding the local maximum reached from the truth point.
    pub peak_voxel: [usize; 3],
    /// Peak minus truth position, in voxels per axis.
    pub offset_voxels: [T; 3],
    /// Largest per-axis offset magnitude, in voxels.
    pub error_voxels: T,
    /// Peak magnitude relative to the global maximum, dB.
    pub peak_db: T,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PeakMetrics<T> {
    pub points: Vec<PointMetric<T>>,
    /// Half-widths of the excluded box around each truth point, m.
    pub guard_m: [T; 3],
    /// Largest magnitude outside all guard boxes relative to the weakest
    /// mainlobe peak, dB; `-inf` when nothing remains.
    pub max_sidelobe_db: T,
    pub sidelobe_voxel: Option<[usize; 3]>,
}

impl<T: Real> PeakMetrics<T> {
    pub fn max_error_voxels(&self) -> T {
        self.points
            .iter()
            .map(|p| p.error_voxels)
            .fold(T::zero(), |a, b| a.max(b))
    }
}

/// Guard box of two resolution cells per axis: radial resolution along x and
/// z, vertical resolution along y.
pub fn resolution_guard<T: Real>(params: &RadarParams<T>, cfg: &ApertureConfig<T>) -> [T; 3] {
    let two = T::lit(2.0);
    let dr = resolution_radial(params);
    // a single capture row has no vertical resolution; fall back to one voxel
    let dy = resolution_vertical(params, cfg).unwrap_or(T::zero());
    [two * dr, two * dy, two * dr]
}

fn db<T: Real>(ratio: T) -> T {
    T::lit(20.0) * ratio.log10()
}

/// Steepest ascent on `|volume|` over the 26-neighbourhood.
fn climb<T: Real>(vol: &ImageVolume<T>, start: [usize; 3]) -> [usize; 3] {
    let mut cur = start;
    let mut cur_v = vol.get(cur[0], cur[1], cur[2]).norm_sqr();
    loop {
        let mut best = cur;
        let mut best_v = cur_v;
        for dx in -1i64..=1 {
            for dy in -1i64..=1 {
                for dz in -1i64..=1 {
                    let n = [cur[0] as i64 + dx, cur[1] as i64 + dy, cur[2] as i64 + dz];
                    if (0..3).any(|a| n[a] < 0 || n[a] >= vol.dims[a] as i64) {
                        continue;
                    }
                    let n = [n[0] as usize, n[1] as usize, n[2] as usize];
                    let v = vol.get(n[0], n[1], n[2]).norm_sqr();
                    if v > best_v {
                        best_v = v;
                        best = n;
                    }
                }
            }
        }
        if best == cur {
            return cur;
        }
        cur = best;
        cur_v = best_v;
    }
}

/// Locates the mainlobe peak of every truth point and the strongest
/// response outside the guard boxes.
pub fn peak_metrics<T: Real>(
    volume: &ImageVolume<T>,
    truth: &Scene<T>,
    guard_m: [T; 3],
) -> Result<PeakMetrics<T>> {
    volume.validate()?;
    let frac: Vec<[T; 3]> = truth
        .points
        .iter()
        .enumerate()
        .map(|(i, p)| {
            let pos = [p.x, p.y, p.z];
            if !volume.contains(pos) {
                return Err(Error::TruthOutsideVolume {
                    index: i,
                    x: p.x.to_f64_lossless(),
                    y: p.y.to_f64_lossless(),
                    z: p.z.to_f64_lossless(),
                });
            }
            Ok(std::array::from_fn(|a| volume.fractional_index(a, pos[a])))
        })
        .collect::<Result<_>>()?;

    let (_, global) = volume.peak();
    let mut points = Vec::with_capacity(frac.len());
    for (i, f) in frac.iter().enumerate() {
        let start = std::array::from_fn(|a| {
            f[a].round().max(T::zero()).to_usize().unwrap_or(0).min(volume.dims[a] - 1)
        });
        let pk = climb(volume, start);
        let offset: [T; 3] = std::array::from_fn(|a| T::from_usize_lossy(pk[a]) - f[a]);
        let p = &truth.points[i];
        points.push(PointMetric {
            index: i,
            truth: [p.x, p.y, p.z],
            peak_voxel: pk,
            offset_voxels: offset,
            error_voxels: offset.iter().fold(T::zero(), |m, o| m.max(o.abs())),
            peak_db: db(volume.get(pk[0], pk[1], pk[2]).norm() / global),
        });
    }

    let weakest = points
        .iter()
        .map(|p| volume.get(p.peak_voxel[0], p.peak_voxel[1], p.peak_voxel[2]).norm())
        .fold(T::infinity(), |a, b| a.min(b));
    let guard_vox: [T; 3] = std::array::from_fn(|a| guard_m[a] / volume.pitch[a]);
    let mut side = T::zero();
    let mut side_at = None;
    for (flat, c) in volume.data.iter().enumerate() {
        let idx = volume.unravel(flat);
        let guarded = frac.iter().any(|f| {
            (0..3).all(|a| (T::from_usize_lossy(idx[a]) - f[a]).abs() <= guard_vox[a])
        });
        if guarded {
            continue;
        }
        let m = c.norm();
        if m > side {
            side = m;
            side_at = Some(idx);
        }
    }
    let max_sidelobe_db = if side_at.is_none() {
        T::neg_infinity()
    } else if weakest.is_finite() {
        db(side / weakest)
    } else {
        // no truth points: report relative to the global maximum
        db(side / global)
    };
    Ok(PeakMetrics {
        points,
        guard_m,
        max_sidelobe_db,
        sidelobe_voxel: side_at,
    })
}

/// Full −3 dB width (m) of the mainlobe through `peak` along `axis`.
///
/// The line is band-limited interpolated by zero padding its spectrum by
/// `upsample` before the half-power crossings are located.
pub fn mainlobe_width<T: Real>(
    volume: &ImageVolume<T>,
    peak: [usize; 3],
    axis: usize,
    upsample: usize,
) -> Result<T> {
    volume.validate()?;
    if axis > 2 {
        return Err(Error::param("axis", "must be 0, 1 or 2"));
    }
    if upsample == 0 {
        return Err(Error::param("upsample", "must be >= 1"));
    }
    let n = volume.dims[axis];
    let mut line: Vec<Complex<T>> = (0..n)
        .map(|i| {
            let mut at = peak;
            at[axis] = i;
            volume.get(at[0], at[1], at[2])
        })
        .collect();
    let m = n * upsample;
    let mut planner = FftPlanner::new();
    planner.plan_fft_forward(n).process(&mut line);
    let mut spec = vec![Complex::new(T::zero(), T::zero()); m];
    let half = n / 2;
    for b in 0..n {
        if n.is_multiple_of(2) && b == half && upsample > 1 {
            let h = line[b] / T::lit(2.0);
            spec[half] = h;
            spec[m - half] = h;
        } else if b <= half {
            spec[b] = line[b];
        } else {
            spec[m - (n - b)] = line[b];
        }
    }
    planner.plan_fft_inverse(m).process(&mut spec);
    let mag: Vec<T> = spec.iter().map(|c| c.norm()).collect();

    // refine the peak within one original voxel
    let centre = peak[axis] * upsample;
    let lo = centre.saturating_sub(upsample);
    let hi = (centre + upsample).min(m - 1);
    let (pi, pv) = (lo..=hi).fold((centre, T::zero()), |(bi, bv), i| {
        if mag[i] > bv {
            (i, mag[i])
        } else {
            (bi, bv)
        }
    });
    if !(pv > T::zero()) {
        return Err(Error::param("peak", "line through the peak is zero"));
    }
    let thr = pv / T::lit(2.0).sqrt();
    let cross = |dir: i64| -> Option<T> {
        let mut i = pi as i64;
        for _ in 0..m / 2 {
            let j = i + dir;
            if j < 0 || j >= m as i64 {
                return None;
            }
            let (a, b) = (mag[i as usize], mag[j as usize]);
            if b < thr {
                let t = (a - thr) / (a - b);
                return Some(T::from_usize_lossy(i as usize) + T::lit(dir as f64) * t);
            }
            i = j;
        }
        None
    };
    match (cross(-1), cross(1)) {
        (Some(l), Some(r)) => Ok((r - l) * volume.pitch[axis] / T::from_usize_lossy(upsample)),
        _ => Err(Error::param("peak", "no half-power crossing within the volume")),
    }
}
