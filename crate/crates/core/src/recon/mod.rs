//! Monostatic rotational-ISAR holographic reconstruction.
//!
//! Stage order:
//!
//! 1. FFT over `y` (zero-padded) and over `θ`, giving `Ŝ(Θ, k, k_y)`;
//!    cells with `4k² ≤ k_y²` are evanescent and zeroed.
//! 2. Per `(k, k_y)`: multiply by `G*(Θ, k_r)` with `k_r = √(4k² − k_y²)`,
//!    then inverse FFT over `Θ` to recover `P̂(θ, k_r, k_y)`.
//! 3. Stolt interpolation onto the Cartesian `(k_x, k_y, k_z)` grid.
//! 4. Inverse transform to the requested voxel grid.
//!
//! The `Θ` and `k_y` axes are handled in centred order; each `k_y` slice is
//! independent through step 3, so slices run in parallel and are summed in
//! a fixed order, which keeps the output independent of the thread count.

mod fft;
mod filter;
mod stolt;

pub use filter::{auto_filter_oversample, azimuth_filter_oversampled, make_azimuth_filter};
pub use stolt::{centered_axis, stolt_interpolate, PolarSlice};

use num_complex::Complex;
use rayon::prelude::*;
use rustfft::FftDirection;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::Real;
use crate::types::{
    ApertureConfig, AxisDomain, EchoCube, EchoKind, ImageVolume, RadarParams, SpectrumAxis,
    SpectrumGrid, SpectrumStage,
};
use fft::{bin_harmonic, fft2_inplace, harmonic_bin, hann, plan};

/// Apodisation applied along `k` and `y` before the transforms.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Window {
    #[default]
    None,
    Hann,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ReconOptions<T> {
    /// Zero-padding factor applied to the `y` record before its FFT.
    pub zero_pad_y: usize,
    pub window: Window,
    /// Output voxel counts `(N_x, N_y, N_z)`.
    pub output_dims: [usize; 3],
    /// Output half-widths in m; voxel `i` sits at `-h + i·2h/N`.
    pub output_extent: [T; 3],
    /// Band-limited θ upsampling of `P̂` ahead of the bilinear Stolt step.
    /// `None` picks a factor from the output extent.
    pub theta_upsample: Option<usize>,
    /// θ oversampling used to build `G(Θ, k_r)`. `None` picks the smallest
    /// factor that avoids aliasing the filter.
    pub filter_oversample: Option<usize>,
    /// Guard voxels added on each side of the x and z axes. The Cartesian
    /// spectrum is sampled at the output grid's dual spacing, so the image is
    /// periodic; the guard keeps PSF tails and scatterers outside the output
    /// box from folding back in. Cropped before returning.
    pub guard_cells: usize,
}

impl<T: Real> ReconOptions<T> {
    pub fn new(output_dims: [usize; 3], output_extent: [T; 3]) -> Self {
        Self {
            zero_pad_y: 1,
            window: Window::None,
            output_dims,
            output_extent,
            theta_upsample: None,
            filter_oversample: None,
            guard_cells: 0,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.zero_pad_y == 0 {
            return Err(Error::param("options.zero_pad_y", "must be >= 1"));
        }
        if self.output_dims.contains(&0) {
            return Err(Error::param("options.output_dims", "each count must be >= 1"));
        }
        if self.output_extent.iter().any(|&h| !(h > T::zero())) {
            return Err(Error::param("options.output_extent_m", "half-widths must be > 0"));
        }
        if self.theta_upsample == Some(0) {
            return Err(Error::param("options.theta_upsample", "must be >= 1"));
        }
        if self.filter_oversample == Some(0) {
            return Err(Error::param("options.filter_oversample", "must be >= 1"));
        }
        Ok(())
    }

    /// Voxel pitch per axis.
    pub fn pitch(&self) -> [T; 3] {
        std::array::from_fn(|a| T::lit(2.0) * self.output_extent[a] / T::from_usize_lossy(self.output_dims[a]))
    }

    /// Centre of voxel `[0][0][0]`.
    pub fn origin(&self) -> [T; 3] {
        std::array::from_fn(|a| -self.output_extent[a])
    }
}

/// Intermediate spectra captured when stage dumps are requested.
#[derive(Debug, Clone)]
pub struct StageDumps<T> {
    pub azimuth: SpectrumGrid<T>,
    pub polar: SpectrumGrid<T>,
    pub cartesian: SpectrumGrid<T>,
}

/// Reconstructs the complex reflectivity volume from a monostatic echo cube.
pub fn reconstruct<T: Real>(
    echo: &EchoCube<T>,
    cfg: &ApertureConfig<T>,
    params: &RadarParams<T>,
    opts: &ReconOptions<T>,
) -> Result<ImageVolume<T>> {
    run(echo, cfg, params, opts, false).map(|(v, _)| v)
}

/// As [`reconstruct`], additionally returning the spectrum after each stage.
pub fn reconstruct_with_stages<T: Real>(
    echo: &EchoCube<T>,
    cfg: &ApertureConfig<T>,
    params: &RadarParams<T>,
    opts: &ReconOptions<T>,
) -> Result<(ImageVolume<T>, StageDumps<T>)> {
    let (v, d) = run(echo, cfg, params, opts, true)?;
    Ok((v, d.expect("stage capture requested")))
}

/// Guard voxels per side so the periodic x–z grid reaches at least `reach`
/// metres from the origin.
pub fn auto_guard_cells<T: Real>(opts: &ReconOptions<T>, reach: T) -> usize {
    let pitch = opts.pitch();
    [0, 2].iter()
        .map(|&a| {
            let short = reach - opts.output_extent[a];
            if short > T::zero() {
                (short / pitch[a]).ceil().to_usize().unwrap_or(0)
            } else {
                0
            }
        })
        .max()
        .unwrap_or(0)
}

/// θ upsampling that keeps the per-sample phase step of content inside the
/// output extent below π/4.
pub fn auto_theta_upsample<T: Real>(delta_theta: T, k_max: T, extent: [T; 3]) -> usize {
    let r = extent[0].hypot(extent[2]);
    let step = T::lit(2.0) * k_max * r * delta_theta;
    let need = (step / T::FRAC_PI_4()).to_f64_lossless().ceil().max(1.0) as usize;
    need.next_power_of_two().min(64)
}

fn validate_inputs<T: Real>(
    echo: &EchoCube<T>,
    cfg: &ApertureConfig<T>,
    params: &RadarParams<T>,
    opts: &ReconOptions<T>,
) -> Result<()> {
    if echo.kind != EchoKind::Monostatic {
        return Err(Error::WrongKind {
            expected: "monostatic",
            found: echo.kind.name(),
        });
    }
    echo.validate()?;
    cfg.validate()?;
    params.validate()?;
    opts.validate()?;
    if echo.theta.len() != cfg.num_theta {
        return Err(Error::DimensionMismatch(format!(
            "echo has {} rotation samples, config expects {}",
            echo.theta.len(),
            cfg.num_theta
        )));
    }
    if echo.k.len() != params.num_k {
        return Err(Error::DimensionMismatch(format!(
            "echo has {} wavenumber samples, config expects {}",
            echo.k.len(),
            params.num_k
        )));
    }
    if echo.y.len() > 1 && echo.y.len() != cfg.num_y && echo.y.len() != cfg.virtual_positions().len() {
        return Err(Error::DimensionMismatch(format!(
            "echo has {} vertical positions, config implies {} captures / {} virtual elements",
            echo.y.len(),
            cfg.num_y,
            cfg.virtual_positions().len()
        )));
    }
    if echo.theta.len() > 1 {
        let step = echo.theta[1] - echo.theta[0];
        let want = cfg.delta_theta();
        if (step - want).abs() > want * T::lit(1e-4) {
            return Err(Error::DimensionMismatch(format!(
                "echo θ step {step} differs from config step {want}"
            )));
        }
    }
    let nyquist = T::PI() / (T::lit(2.0) * params.k_max());
    let pitch = opts.pitch();
    if pitch[0] > nyquist || pitch[2] > nyquist {
        log::warn!(
            "x/z voxel pitch ({}, {}) m exceeds the band limit {} m; the outer spectral annulus is cut and the mainlobe distorted",
            pitch[0],
            pitch[2],
            nyquist
        );
    }
    Ok(())
}

struct SliceGeometry<T> {
    nt: usize,
    nk: usize,
    nky: usize,
    ks: Vec<T>,
    ky: SpectrumAxis<T>,
    theta0: T,
    dtheta: T,
    up: usize,
    over: usize,
    r0: T,
    circular: bool,
    kx: SpectrumAxis<T>,
    kz: SpectrumAxis<T>,
}

fn run<T: Real>(
    echo: &EchoCube<T>,
    cfg: &ApertureConfig<T>,
    params: &RadarParams<T>,
    opts: &ReconOptions<T>,
    keep: bool,
) -> Result<(ImageVolume<T>, Option<StageDumps<T>>)> {
    validate_inputs(echo, cfg, params, opts)?;
    let circular = cfg.is_full_rotation();
    if !circular {
        log::warn!(
            "rotation span {} rad is not a full turn; the circular azimuth convolution is only approximate",
            cfg.theta_max
        );
    }

    let nt = echo.theta.len();
    let nk = echo.k.len();
    let ny = echo.y.len();
    let dy = if ny > 1 {
        (echo.y[ny - 1] - echo.y[0]) / T::from_usize_lossy(ny - 1)
    } else if cfg.delta_y > T::zero() {
        cfg.delta_y
    } else {
        T::one()
    };
    let nky = ny * opts.zero_pad_y;
    let dky = T::TAU() / (T::from_usize_lossy(nky) * dy);
    let ky = centered_axis(AxisDomain::Ky, nky, dky);
    let dtheta = if nt > 1 { echo.theta[1] - echo.theta[0] } else { cfg.delta_theta() };
    let k_max = echo.k[nk - 1];
    let pitch = opts.pitch();
    let g = opts.guard_cells;
    let guard_m = |a: usize| T::from_usize_lossy(g) * pitch[a];
    let up = opts
        .theta_upsample
        .unwrap_or_else(|| {
            let mut ext = opts.output_extent;
            ext[0] += guard_m(0);
            ext[2] += guard_m(2);
            auto_theta_upsample(dtheta, k_max, ext)
        });
    let over = opts
        .filter_oversample
        .unwrap_or_else(|| auto_filter_oversample(nt, T::lit(2.0) * k_max, cfg.r0));
    let mut origin = opts.origin();
    origin[0] -= guard_m(0);
    origin[2] -= guard_m(2);
    let [nx, nyo, nz] = opts.output_dims;
    let (nx, nz) = (nx + 2 * g, nz + 2 * g);
    let kx = centered_axis(AxisDomain::Kx, nx, T::TAU() / (T::from_usize_lossy(nx) * pitch[0]));
    let kz = centered_axis(AxisDomain::Kz, nz, T::TAU() / (T::from_usize_lossy(nz) * pitch[2]));
    log::debug!(
        "reconstruct: θ {nt} (×{up} upsample, ×{over} filter), k {nk}, k_y {nky}, output {nx}×{nyo}×{nz}"
    );

    let spec = azimuth_spectrum(echo, opts.window, &ky);

    let geo = SliceGeometry {
        nt,
        nk,
        nky,
        ks: echo.k.clone(),
        ky,
        theta0: echo.theta[0],
        dtheta,
        up,
        over,
        r0: cfg.r0,
        circular,
        kx,
        kz,
    };

    let mut dumps = keep.then(|| {
        let harmonic = SpectrumAxis {
            domain: AxisDomain::AzimuthHarmonic,
            start: -T::from_usize_lossy(nt / 2),
            step: T::one(),
            len: nt,
        };
        let k_axis = SpectrumAxis {
            domain: AxisDomain::K,
            start: echo.k[0],
            step: if nk > 1 { echo.k[1] - echo.k[0] } else { T::zero() },
            len: nk,
        };
        let theta_axis = SpectrumAxis {
            domain: AxisDomain::Theta,
            start: geo.theta0,
            step: dtheta / T::from_usize_lossy(up),
            len: nt * up,
        };
        let mut azimuth = SpectrumGrid::zeros(SpectrumStage::AzimuthSpectrum, [harmonic, k_axis, ky]);
        // spec is [k][k_y][bin]; dumps are [Θ centred][k][k_y]
        for ik in 0..nk {
            for m in 0..nky {
                let lane = &spec[(ik * nky + m) * nt..][..nt];
                for i in 0..nt {
                    let h = i as i64 - (nt / 2) as i64;
                    let o = azimuth.index(i, ik, m);
                    azimuth.data[o] = lane[harmonic_bin(h, nt)];
                }
            }
        }
        StageDumps {
            azimuth,
            polar: SpectrumGrid::zeros(SpectrumStage::PolarSpectrum, [theta_axis, k_axis, ky]),
            cartesian: SpectrumGrid::zeros(SpectrumStage::Cartesian, [kx, ky, kz]),
        }
    });

    // output-side phase ramps and bin placement
    let cis = |p: T| {
        let (s, c) = p.sin_cos();
        Complex::new(c, s)
    };
    let px: Vec<Complex<T>> = (0..nx).map(|i| cis(kx.value(i) * origin[0])).collect();
    let pz: Vec<Complex<T>> = (0..nz).map(|i| cis(kz.value(i) * origin[2])).collect();
    let bx: Vec<usize> = (0..nx).map(|i| harmonic_bin(i as i64 - (nx / 2) as i64, nx)).collect();
    let bz: Vec<usize> = (0..nz).map(|i| harmonic_bin(i as i64 - (nz / 2) as i64, nz)).collect();
    let plane = nx * nz;

    // FFT along y when the requested rows are exactly the dual of the k_y grid
    let y_fft = nyo == nky && (pitch[1] - dy).abs() <= dy * T::lit(1e-9);
    let ty: Vec<Complex<T>> = if y_fft {
        (0..nky).map(|m| cis(ky.value(m) * origin[1])).collect()
    } else {
        (0..nky)
            .flat_map(|m| {
                let kyv = ky.value(m);
                (0..nyo).map(move |l| kyv * (origin[1] + T::from_usize_lossy(l) * pitch[1]))
            })
            .map(cis)
            .collect()
    };

    // per-y-row spectra, row-major [row][bx·nz + bz]
    let mut rows = vec![Complex::new(T::zero(), T::zero()); nyo * plane];
    let batch = (rayon::current_num_threads() * 2).max(2);
    let mut m0 = 0;
    while m0 < nky {
        let m1 = (m0 + batch).min(nky);
        let results: Vec<SliceOutput<T>> = (m0..m1)
            .into_par_iter()
            .map(|m| process_slice(&spec, &geo, m, keep))
            .collect();

        if y_fft {
            for (m, (cells, _)) in (m0..m1).zip(&results) {
                let row = harmonic_bin(m as i64 - (nky / 2) as i64, nky);
                let dst = &mut rows[row * plane..][..plane];
                for &(idx, v) in cells {
                    let (ix, iz) = (idx as usize / nz, idx as usize % nz);
                    dst[bx[ix] * nz + bz[iz]] = v * px[ix] * pz[iz] * ty[m];
                }
            }
        } else {
            rows.par_chunks_mut(plane).enumerate().for_each(|(l, dst)| {
                for (m, (cells, _)) in (m0..m1).zip(&results) {
                    let tw = ty[m * nyo + l];
                    for &(idx, v) in cells {
                        let (ix, iz) = (idx as usize / nz, idx as usize % nz);
                        dst[bx[ix] * nz + bz[iz]] += v * px[ix] * pz[iz] * tw;
                    }
                }
            });
        }

        if let Some(d) = dumps.as_mut() {
            for (m, (cells, polar)) in (m0..m1).zip(&results) {
                let polar = polar.as_ref().expect("polar slice kept");
                let ntu = nt * up;
                for ik in 0..nk {
                    for it in 0..ntu {
                        let o = d.polar.index(it, ik, m);
                        d.polar.data[o] = polar[ik * ntu + it];
                    }
                }
                for &(idx, v) in cells {
                    let (ix, iz) = (idx as usize / nz, idx as usize % nz);
                    let o = d.cartesian.index(ix, m, iz);
                    d.cartesian.data[o] = v;
                }
            }
        }
        m0 = m1;
    }

    if y_fft {
        // rows already sit at their harmonic bins, so a plain inverse DFT
        // along each (x, z) column lands on the requested y samples
        let ifft = plan::<T>(nky, FftDirection::Inverse);
        let cols: Vec<Vec<Complex<T>>> = (0..plane)
            .into_par_iter()
            .map(|c| {
                let mut col: Vec<Complex<T>> = (0..nky).map(|r| rows[r * plane + c]).collect();
                ifft.process(&mut col);
                col
            })
            .collect();
        for (c, col) in cols.iter().enumerate() {
            for (l, v) in col.iter().enumerate() {
                rows[l * plane + c] = *v;
            }
        }
    }

    rows.par_chunks_mut(plane)
        .for_each(|row| fft2_inplace(row, nx, nz, FftDirection::Inverse));

    let mut vol = ImageVolume::zeros(opts.output_dims, opts.origin(), pitch);
    let [ox, _, oz] = opts.output_dims;
    for l in 0..nyo {
        let row = &rows[l * plane..][..plane];
        for ix in 0..ox {
            for iz in 0..oz {
                let o = vol.index(ix, l, iz);
                vol.data[o] = row[(ix + g) * nz + iz + g];
            }
        }
    }
    Ok((vol, dumps))
}

/// Step 1: windowing, FFT over y with centred `k_y`, FFT over θ, and the
/// evanescent mask. Layout `[k][k_y][Θ bin]`.
fn azimuth_spectrum<T: Real>(
    echo: &EchoCube<T>,
    window: Window,
    ky: &SpectrumAxis<T>,
) -> Vec<Complex<T>> {
    let nt = echo.theta.len();
    let nk = echo.k.len();
    let ny = echo.y.len();
    let nky = ky.len;
    let (wk, wy): (Vec<T>, Vec<T>) = match window {
        Window::None => (vec![T::one(); nk], vec![T::one(); ny]),
        Window::Hann => (hann(nk), hann(ny)),
    };
    let y0 = echo.y[0];
    let zero = Complex::new(T::zero(), T::zero());
    let yfft = plan::<T>(nky, FftDirection::Forward);
    let tfft = plan::<T>(nt, FftDirection::Forward);
    // k_y origin correction e^{-j k_y y₀}
    let ramp: Vec<Complex<T>> = (0..nky)
        .map(|m| {
            let (s, c) = (-ky.value(m) * y0).sin_cos();
            Complex::new(c, s)
        })
        .collect();

    let mut spec = vec![zero; nk * nky * nt];
    spec.par_chunks_mut(nky * nt).enumerate().for_each(|(ik, block)| {
        let four_k2 = T::lit(4.0) * echo.k[ik] * echo.k[ik];
        let mut buf = vec![zero; nky];
        for it in 0..nt {
            buf.iter_mut().for_each(|b| *b = zero);
            let src = &echo.data[echo.mono_index(it, ik, 0)..][..ny];
            for iy in 0..ny {
                buf[iy] = src[iy] * (wk[ik] * wy[iy]);
            }
            yfft.process(&mut buf);
            for m in 0..nky {
                let b = harmonic_bin(m as i64 - (nky / 2) as i64, nky);
                block[m * nt + it] = buf[b] * ramp[m];
            }
        }
        for m in 0..nky {
            let lane = &mut block[m * nt..][..nt];
            let kyv = ky.value(m);
            if four_k2 <= kyv * kyv {
                lane.iter_mut().for_each(|v| *v = zero);
            } else {
                tfft.process(lane);
            }
        }
    });
    spec
}

/// Non-zero Cartesian cells `(ix·nz + iz, value)` and the optional polar slice.
type SliceOutput<T> = (Vec<(u32, Complex<T>)>, Option<Vec<Complex<T>>>);

/// Steps 2–3 for one `k_y` slice. Returns the non-zero Cartesian cells and,
/// when requested, the polar slice `[k][θ']`.
fn process_slice<T: Real>(
    spec: &[Complex<T>],
    g: &SliceGeometry<T>,
    m: usize,
    keep: bool,
) -> SliceOutput<T> {
    let zero = Complex::new(T::zero(), T::zero());
    let nt = g.nt;
    let ntu = nt * g.up;
    let kyv = g.ky.value(m);
    let mut polar = vec![zero; g.nk * ntu];
    let ifft = plan::<T>(ntu, FftDirection::Inverse);
    let norm = T::one() / T::from_usize_lossy(nt);
    let mut any = false;
    for ik in 0..g.nk {
        let k = g.ks[ik];
        let kr2 = T::lit(4.0) * k * k - kyv * kyv;
        if kr2 <= T::zero() {
            continue;
        }
        let kr = kr2.sqrt();
        let lane = &spec[(ik * g.nky + m) * nt..][..nt];
        let filt = azimuth_filter_oversampled(nt, g.dtheta, kr, g.r0, g.over);
        let dst = &mut polar[ik * ntu..][..ntu];
        for b in 0..nt {
            let h = bin_harmonic(b, nt);
            dst[harmonic_bin(h, ntu)] = lane[b] * filt[b].conj() * norm;
        }
        ifft.process(dst);
        any = true;
    }
    let mut cells = Vec::new();
    if any {
        let slice = PolarSlice {
            data: &polar,
            theta0: g.theta0,
            dtheta: g.dtheta / T::from_usize_lossy(g.up),
            n_theta: ntu,
            k0: g.ks[0],
            dk: if g.nk > 1 { g.ks[1] - g.ks[0] } else { T::zero() },
            nk: g.nk,
            circular: g.circular,
        };
        stolt::stolt_slice(&slice, kyv, &g.kx, &g.kz, &mut cells);
    }
    (cells, keep.then_some(polar))
}
