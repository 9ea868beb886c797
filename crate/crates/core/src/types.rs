//! Shared domain types: radar sweep, scan geometry, scenes and the complex
//! arrays that flow between pipeline stages.

use num_complex::Complex;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::Real;

/// Vacuum speed of light in m/s.
pub const SPEED_OF_LIGHT: f64 = 299_792_458.0;

/// Tolerance used when checking that a grid is uniformly spaced, in metres
/// (or radians / rad/m for the angular and wavenumber axes).
pub const UNIFORM_TOL: f64 = 1e-6;

/// FMCW sweep description.
#[derive(Debug, Clone, PartialEq)]
pub struct RadarParams<T> {
    /// Start frequency in Hz.
    pub f0: T,
    /// Sweep bandwidth in Hz.
    pub bandwidth: T,
    /// Number of wavenumber samples across the sweep.
    pub num_k: usize,
    /// Propagation speed in m/s.
    pub c: T,
}

impl<T: Real> RadarParams<T> {
    pub fn new(f0: T, bandwidth: T, num_k: usize) -> Result<Self> {
        Self::with_speed(f0, bandwidth, num_k, T::lit(SPEED_OF_LIGHT))
    }

    pub fn with_speed(f0: T, bandwidth: T, num_k: usize, c: T) -> Result<Self> {
        let p = Self {
            f0,
            bandwidth,
            num_k,
            c,
        };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.f0 > T::zero()) || !self.f0.is_finite() {
            return Err(Error::param("radar.f0_hz", "must be > 0"));
        }
        if !(self.bandwidth >= T::zero()) || !self.bandwidth.is_finite() {
            return Err(Error::param("radar.bandwidth_hz", "must be >= 0"));
        }
        if self.num_k == 0 {
            return Err(Error::param("radar.num_k", "must be >= 1"));
        }
        if self.num_k == 1 && self.bandwidth != T::zero() {
            return Err(Error::param(
                "radar.bandwidth_hz",
                "must be 0 when num_k = 1",
            ));
        }
        if !(self.c > T::zero()) {
            return Err(Error::param("radar.c", "must be > 0"));
        }
        Ok(())
    }

    /// Uniform wavenumber grid `k = 2πf/c` over `[f0, f0 + bandwidth]`,
    /// both endpoints included.
    pub fn wavenumber_grid(&self) -> Vec<T> {
        let two_pi = T::TAU();
        let k_start = two_pi * self.f0 / self.c;
        if self.num_k == 1 {
            return vec![k_start];
        }
        let k_stop = two_pi * (self.f0 + self.bandwidth) / self.c;
        let n1 = T::from_usize_lossy(self.num_k - 1);
        (0..self.num_k)
            .map(|j| {
                if j == self.num_k - 1 {
                    k_stop
                } else {
                    k_start + (k_stop - k_start) * T::from_usize_lossy(j) / n1
                }
            })
            .collect()
    }

    pub fn k_min(&self) -> T {
        T::TAU() * self.f0 / self.c
    }

    pub fn k_max(&self) -> T {
        T::TAU() * (self.f0 + self.bandwidth) / self.c
    }

    /// Wavenumber step; zero for a single-tone sweep.
    pub fn delta_k(&self) -> T {
        if self.num_k < 2 {
            T::zero()
        } else {
            (self.k_max() - self.k_min()) / T::from_usize_lossy(self.num_k - 1)
        }
    }

    pub fn center_frequency(&self) -> T {
        self.f0 + self.bandwidth / T::lit(2.0)
    }

    /// Wavelength at the centre of the sweep.
    pub fn lambda_center(&self) -> T {
        self.c / self.center_frequency()
    }

    /// Shortest wavelength in the sweep.
    pub fn lambda_min(&self) -> T {
        self.c / (self.f0 + self.bandwidth)
    }
}

/// One virtual (midpoint) element of a transmitter/receiver pair.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VirtualElement<T> {
    /// Midpoint offset relative to the capture reference, m.
    pub y: T,
    /// Separation between the transmitter and the receiver, m.
    pub d_y: T,
}

/// Cylindrical scan geometry: rotation grid, vertical captures and the
/// MIMO element layout of a single capture.
#[derive(Debug, Clone, PartialEq)]
pub struct ApertureConfig<T> {
    /// Radius of the transceiver circle, m.
    pub r0: T,
    pub num_theta: usize,
    /// Total rotation span in rad.
    pub theta_max: T,
    pub num_y: usize,
    /// Spacing between successive vertical captures, m.
    pub delta_y: T,
    /// Transmitter offsets relative to the capture reference, m.
    pub tx_offsets: Vec<T>,
    /// Receiver offsets relative to the capture reference, m.
    pub rx_offsets: Vec<T>,
}

impl<T: Real> ApertureConfig<T> {
    /// Single collocated transceiver at every capture.
    pub fn siso(r0: T, num_theta: usize, theta_max: T, num_y: usize, delta_y: T) -> Result<Self> {
        let cfg = Self {
            r0,
            num_theta,
            theta_max,
            num_y,
            delta_y,
            tx_offsets: vec![T::zero()],
            rx_offsets: vec![T::zero()],
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.r0 > T::zero()) {
            return Err(Error::param("aperture.r0_m", "must be > 0"));
        }
        if self.num_theta == 0 {
            return Err(Error::param("aperture.num_theta", "must be >= 1"));
        }
        let tau = T::TAU();
        let slack = T::lit(1e-12) * tau;
        if !(self.theta_max > T::zero()) || self.theta_max > tau + slack {
            return Err(Error::param(
                "aperture.theta_max_deg",
                "must satisfy 0 < theta_max <= 360 deg",
            ));
        }
        if self.num_y == 0 {
            return Err(Error::param("aperture.num_y", "must be >= 1"));
        }
        if !(self.delta_y > T::zero()) && self.num_y > 1 {
            return Err(Error::param("aperture.delta_y_m", "must be > 0"));
        }
        if self.tx_offsets.is_empty() {
            return Err(Error::param("aperture.tx_offsets_m", "must be non-empty"));
        }
        if self.rx_offsets.is_empty() {
            return Err(Error::param("aperture.rx_offsets_m", "must be non-empty"));
        }
        Ok(())
    }

    /// Rotation angles `i·θ_max/N`, `i = 0..N`. For a full turn the last
    /// sample stops one step short of 2π so the record is periodic.
    pub fn theta_grid(&self) -> Vec<T> {
        let step = self.delta_theta();
        (0..self.num_theta)
            .map(|i| T::from_usize_lossy(i) * step)
            .collect()
    }

    pub fn delta_theta(&self) -> T {
        self.theta_max / T::from_usize_lossy(self.num_theta)
    }

    /// Whether the rotation covers a full turn, which the azimuth
    /// convolution relies on.
    pub fn is_full_rotation(&self) -> bool {
        (self.theta_max - T::TAU()).abs() <= T::TAU() * T::epsilon() * T::lit(16.0)
    }

    /// Capture reference positions, centred on y = 0.
    pub fn capture_positions(&self) -> Vec<T> {
        let mid = T::from_usize_lossy(self.num_y - 1) / T::lit(2.0);
        (0..self.num_y)
            .map(|l| (T::from_usize_lossy(l) - mid) * self.delta_y)
            .collect()
    }

    /// Midpoint and separation of every (tx, rx) pair, row-major over
    /// `(tx, rx)`.
    pub fn virtual_elements(&self) -> Vec<VirtualElement<T>> {
        virtual_elements(&self.tx_offsets, &self.rx_offsets)
    }

    /// Sorted, de-duplicated absolute virtual positions of the assembled
    /// aperture.
    pub fn virtual_positions(&self) -> Vec<T> {
        let elems = self.virtual_elements();
        let mut ys: Vec<T> = self
            .capture_positions()
            .into_iter()
            .flat_map(|c| elems.iter().map(move |e| c + e.y))
            .collect();
        ys.sort_by(|a, b| a.partial_cmp(b).expect("finite positions"));
        let tol = T::lit(UNIFORM_TOL);
        ys.dedup_by(|a, b| (*a - *b).abs() <= tol);
        ys
    }

    /// Spacing of the assembled virtual aperture; falls back to the capture
    /// spacing when only one virtual position exists.
    pub fn effective_spacing(&self) -> T {
        let ys = self.virtual_positions();
        if ys.len() < 2 {
            return self.delta_y;
        }
        (ys[ys.len() - 1] - ys[0]) / T::from_usize_lossy(ys.len() - 1)
    }

    /// Vertical extent of the synthesised aperture (first to last virtual
    /// element), m.
    pub fn scan_height(&self) -> T {
        let ys = self.virtual_positions();
        if ys.len() < 2 {
            return T::zero();
        }
        ys[ys.len() - 1] - ys[0]
    }
}

/// Midpoints and separations of every (tx, rx) pair, row-major.
pub fn virtual_elements<T: Real>(tx: &[T], rx: &[T]) -> Vec<VirtualElement<T>> {
    let half = T::lit(0.5);
    tx.iter()
        .flat_map(|&t| {
            rx.iter().map(move |&r| VirtualElement {
                y: (t + r) * half,
                d_y: (t - r).abs(),
            })
        })
        .collect()
}

/// Ideal point reflector.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScenePoint<T> {
    pub x: T,
    pub y: T,
    pub z: T,
    pub amplitude: Complex<T>,
}

impl<T: Real> ScenePoint<T> {
    pub fn unit(x: T, y: T, z: T) -> Self {
        Self {
            x,
            y,
            z,
            amplitude: Complex::new(T::one(), T::zero()),
        }
    }

    /// Horizontal distance from the rotation axis.
    pub fn radius(&self) -> T {
        self.x.hypot(self.z)
    }
}

/// Collection of point reflectors with declared bounds.
#[derive(Debug, Clone, PartialEq)]
pub struct Scene<T> {
    pub points: Vec<ScenePoint<T>>,
    /// Maximum horizontal radius of any point, m.
    pub target_radius: T,
    /// Vertical extent of the target, m.
    pub target_height: T,
}

impl<T: Real> Scene<T> {
    /// Builds a scene whose bounds are the tightest ones containing the
    /// points.
    pub fn from_points(points: Vec<ScenePoint<T>>) -> Self {
        let target_radius = points
            .iter()
            .map(ScenePoint::radius)
            .fold(T::zero(), T::max);
        let (lo, hi) = points.iter().fold(
            (T::infinity(), T::neg_infinity()),
            |(lo, hi), p| (lo.min(p.y), hi.max(p.y)),
        );
        let target_height = if points.is_empty() { T::zero() } else { hi - lo };
        Self {
            points,
            target_radius,
            target_height,
        }
    }

    pub fn empty() -> Self {
        Self::from_points(Vec::new())
    }

    pub fn validate(&self, r0: T) -> Result<()> {
        let slack = T::lit(1e-12);
        for (i, p) in self.points.iter().enumerate() {
            if p.radius() > self.target_radius + slack {
                return Err(Error::param(
                    format!("scene.points[{i}]"),
                    "horizontal radius exceeds target_radius",
                ));
            }
        }
        if !(self.target_radius < r0) {
            return Err(Error::param(
                "scene.target_radius_m",
                "target must lie inside the scan circle (target_radius < r0)",
            ));
        }
        if self.target_height < T::zero() {
            return Err(Error::param("scene.target_height_m", "must be >= 0"));
        }
        Ok(())
    }

    pub fn scaled(&self, factor: Complex<T>) -> Self {
        let mut s = self.clone();
        for p in &mut s.points {
            p.amplitude *= factor;
        }
        s
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum EchoKind {
    Multistatic,
    Monostatic,
}

impl EchoKind {
    pub fn name(self) -> &'static str {
        match self {
            EchoKind::Multistatic => "multistatic",
            EchoKind::Monostatic => "monostatic",
        }
    }
}

/// Complex echo samples on the scan grid.
///
/// Monostatic cubes are indexed `[θ][k][y]`. Multistatic cubes are indexed
/// `[θ][k][capture][tx][rx]`, where `y` holds the capture reference
/// positions and the offsets give the element layout of each capture.
#[derive(Debug, Clone, PartialEq)]
pub struct EchoCube<T> {
    pub kind: EchoKind,
    pub theta: Vec<T>,
    pub k: Vec<T>,
    pub y: Vec<T>,
    pub tx_offsets: Vec<T>,
    pub rx_offsets: Vec<T>,
    pub data: Vec<Complex<T>>,
}

impl<T: Real> EchoCube<T> {
    pub fn zeros_monostatic(theta: Vec<T>, k: Vec<T>, y: Vec<T>) -> Self {
        let n = theta.len() * k.len() * y.len();
        Self {
            kind: EchoKind::Monostatic,
            theta,
            k,
            y,
            tx_offsets: Vec::new(),
            rx_offsets: Vec::new(),
            data: vec![Complex::new(T::zero(), T::zero()); n],
        }
    }

    pub fn zeros_multistatic(
        theta: Vec<T>,
        k: Vec<T>,
        captures: Vec<T>,
        tx_offsets: Vec<T>,
        rx_offsets: Vec<T>,
    ) -> Self {
        let n = theta.len() * k.len() * captures.len() * tx_offsets.len() * rx_offsets.len();
        Self {
            kind: EchoKind::Multistatic,
            theta,
            k,
            y: captures,
            tx_offsets,
            rx_offsets,
            data: vec![Complex::new(T::zero(), T::zero()); n],
        }
    }

    pub fn dims(&self) -> Vec<usize> {
        match self.kind {
            EchoKind::Monostatic => vec![self.theta.len(), self.k.len(), self.y.len()],
            EchoKind::Multistatic => vec![
                self.theta.len(),
                self.k.len(),
                self.y.len(),
                self.tx_offsets.len(),
                self.rx_offsets.len(),
            ],
        }
    }

    /// Number of samples per `(θ, k)` pair.
    pub fn lane_len(&self) -> usize {
        match self.kind {
            EchoKind::Monostatic => self.y.len(),
            EchoKind::Multistatic => {
                self.y.len() * self.tx_offsets.len() * self.rx_offsets.len()
            }
        }
    }

    #[inline]
    pub fn mono_index(&self, it: usize, ik: usize, iy: usize) -> usize {
        (it * self.k.len() + ik) * self.y.len() + iy
    }

    #[inline]
    pub fn multi_index(&self, it: usize, ik: usize, ic: usize, itx: usize, irx: usize) -> usize {
        (((it * self.k.len() + ik) * self.y.len() + ic) * self.tx_offsets.len() + itx)
            * self.rx_offsets.len()
            + irx
    }

    pub fn validate(&self) -> Result<()> {
        let expected: usize = self.dims().iter().product();
        if self.data.len() != expected {
            return Err(Error::DimensionMismatch(format!(
                "echo data holds {} samples but axes imply {expected}",
                self.data.len()
            )));
        }
        if self.kind == EchoKind::Monostatic
            && (!self.tx_offsets.is_empty() || !self.rx_offsets.is_empty())
        {
            return Err(Error::DimensionMismatch(
                "monostatic cube must not carry element offsets".into(),
            ));
        }
        check_uniform("theta", &self.theta)?;
        check_uniform("k", &self.k)?;
        check_uniform("y", &self.y)?;
        Ok(())
    }
}

/// Checks that `v` is strictly increasing with constant step.
pub(crate) fn check_uniform<T: Real>(name: &str, v: &[T]) -> Result<()> {
    if v.len() < 2 {
        return Ok(());
    }
    let step = (v[v.len() - 1] - v[0]) / T::from_usize_lossy(v.len() - 1);
    let scale = v[0].abs().max(v[v.len() - 1].abs());
    // rounding of f32 axes dominates the absolute tolerance for large values;
    // the relative term admits f32-rounded axes read back at higher precision
    let tol = T::lit(UNIFORM_TOL)
        .max(scale * T::epsilon() * T::lit(64.0))
        .max(step.abs() * T::lit(1e-3));
    for w in v.windows(2) {
        let gap = w[1] - w[0];
        if !(gap > T::zero()) || (gap - step).abs() > tol {
            return Err(Error::DimensionMismatch(format!(
                "axis `{name}` is not uniform near {}",
                w[0]
            )));
        }
    }
    Ok(())
}

/// Complex reflectivity on a uniform voxel grid, indexed `[x][y][z]`.
#[derive(Debug, Clone, PartialEq)]
pub struct ImageVolume<T> {
    pub dims: [usize; 3],
    /// Centre of voxel `[0][0][0]`, m.
    pub origin: [T; 3],
    pub pitch: [T; 3],
    pub data: Vec<Complex<T>>,
}

impl<T: Real> ImageVolume<T> {
    pub fn zeros(dims: [usize; 3], origin: [T; 3], pitch: [T; 3]) -> Self {
        Self {
            dims,
            origin,
            pitch,
            data: vec![Complex::new(T::zero(), T::zero()); dims[0] * dims[1] * dims[2]],
        }
    }

    #[inline]
    pub fn index(&self, ix: usize, iy: usize, iz: usize) -> usize {
        (ix * self.dims[1] + iy) * self.dims[2] + iz
    }

    #[inline]
    pub fn get(&self, ix: usize, iy: usize, iz: usize) -> Complex<T> {
        self.data[self.index(ix, iy, iz)]
    }

    /// Voxel centre coordinate along `axis`.
    #[inline]
    pub fn coord(&self, axis: usize, i: usize) -> T {
        self.origin[axis] + T::from_usize_lossy(i) * self.pitch[axis]
    }

    /// Fractional voxel index of a coordinate along `axis`.
    pub fn fractional_index(&self, axis: usize, v: T) -> T {
        (v - self.origin[axis]) / self.pitch[axis]
    }

    /// Whether a point lies within the sampled extent (half a voxel of
    /// slack on each side).
    pub fn contains(&self, p: [T; 3]) -> bool {
        (0..3).all(|a| {
            let f = self.fractional_index(a, p[a]);
            f >= T::lit(-0.5) && f <= T::from_usize_lossy(self.dims[a]) - T::lit(0.5)
        })
    }

    pub fn magnitude(&self) -> Vec<T> {
        self.data.iter().map(|c| c.norm()).collect()
    }

    /// Index triple and magnitude of the global maximum of `|volume|`.
    pub fn peak(&self) -> ([usize; 3], T) {
        let mut best = 0usize;
        let mut best_v = T::neg_infinity();
        for (i, c) in self.data.iter().enumerate() {
            let m = c.norm_sqr();
            if m > best_v {
                best_v = m;
                best = i;
            }
        }
        (self.unravel(best), best_v.max(T::zero()).sqrt())
    }

    pub fn unravel(&self, flat: usize) -> [usize; 3] {
        let iz = flat % self.dims[2];
        let rest = flat / self.dims[2];
        [rest / self.dims[1], rest % self.dims[1], iz]
    }

    pub fn validate(&self) -> Result<()> {
        if self.dims.contains(&0) {
            return Err(Error::DimensionMismatch("volume dimensions must be >= 1".into()));
        }
        if self.pitch.iter().any(|&p| !(p > T::zero())) {
            return Err(Error::DimensionMismatch("voxel pitch must be > 0".into()));
        }
        if self.data.len() != self.dims.iter().product::<usize>() {
            return Err(Error::DimensionMismatch(format!(
                "volume data holds {} samples but dims imply {}",
                self.data.len(),
                self.dims.iter().product::<usize>()
            )));
        }
        Ok(())
    }
}

/// Physical meaning of one spectrum axis.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AxisDomain {
    /// Rotation angle θ in rad.
    Theta,
    /// Azimuth harmonic Θ (integer cycles per rotation), centred.
    AzimuthHarmonic,
    /// Wavenumber k in rad/m.
    K,
    Kx,
    Ky,
    Kz,
}

/// Uniform axis descriptor `start + i·step`, `i = 0..len`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SpectrumAxis<T> {
    pub domain: AxisDomain,
    pub start: T,
    pub step: T,
    pub len: usize,
}

impl<T: Real> SpectrumAxis<T> {
    pub fn value(&self, i: usize) -> T {
        self.start + T::from_usize_lossy(i) * self.step
    }
}

/// Pipeline stage a spectrum grid belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SpectrumStage {
    /// `Ŝ(Θ, k, k_y)` after the 2-D FFT over (θ, y).
    AzimuthSpectrum,
    /// `P̂(θ, k, k_y)` after matched filtering and the inverse Θ FFT.
    PolarSpectrum,
    /// `P(k_x, k_y, k_z)` after Stolt interpolation.
    Cartesian,
}

impl SpectrumStage {
    pub fn expected_domains(self) -> [AxisDomain; 3] {
        match self {
            SpectrumStage::AzimuthSpectrum => {
                [AxisDomain::AzimuthHarmonic, AxisDomain::K, AxisDomain::Ky]
            }
            SpectrumStage::PolarSpectrum => [AxisDomain::Theta, AxisDomain::K, AxisDomain::Ky],
            SpectrumStage::Cartesian => [AxisDomain::Kx, AxisDomain::Ky, AxisDomain::Kz],
        }
    }
}

/// Complex 3-D spectrum indexed `[a0][a1][a2]` with per-axis descriptors.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectrumGrid<T> {
    pub stage: SpectrumStage,
    pub axes: [SpectrumAxis<T>; 3],
    pub data: Vec<Complex<T>>,
}

impl<T: Real> SpectrumGrid<T> {
    pub fn zeros(stage: SpectrumStage, axes: [SpectrumAxis<T>; 3]) -> Self {
        let n = axes.iter().map(|a| a.len).product();
        Self {
            stage,
            axes,
            data: vec![Complex::new(T::zero(), T::zero()); n],
        }
    }

    pub fn dims(&self) -> [usize; 3] {
        [self.axes[0].len, self.axes[1].len, self.axes[2].len]
    }

    #[inline]
    pub fn index(&self, i0: usize, i1: usize, i2: usize) -> usize {
        (i0 * self.axes[1].len + i1) * self.axes[2].len + i2
    }

    pub fn validate(&self) -> Result<()> {
        let expected = self.stage.expected_domains();
        for (a, d) in self.axes.iter().zip(expected) {
            if a.domain != d {
                return Err(Error::DimensionMismatch(format!(
                    "{:?} grid expects a {:?} axis, found {:?}",
                    self.stage, d, a.domain
                )));
            }
            if a.len == 0 {
                return Err(Error::DimensionMismatch("spectrum axes must be non-empty".into()));
            }
        }
        if self.data.len() != self.dims().iter().product::<usize>() {
            return Err(Error::DimensionMismatch("spectrum payload size mismatch".into()));
        }
        Ok(())
    }
}
