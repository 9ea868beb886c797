//! Near-field MIMO rotational-ISAR millimetre-wave imaging.
//!
//! The crate simulates multistatic and monostatic echoes of point scenes on
//! a cylindrical scan, converts MIMO data to an equivalent virtual
//! monostatic array, and reconstructs 3-D complex reflectivity with an
//! FFT / Stolt pipeline. A brute-force backprojection and analytic
//! sampling/resolution predictions are provided for verification.
//!
//! All numeric routines are generic over [`Real`] (`f32` or `f64`); the
//! `*64` / `*32` aliases below name the common instantiations.

// `!(x > 0)` is used on purpose throughout: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod analysis;
pub mod error;
pub mod io;
pub mod mono;
pub mod recon;
pub mod scalar;
pub mod sim;
pub mod types;

pub use error::{Error, Result};
pub use mono::{multistatic_to_monostatic, ConversionReport};
pub use recon::{reconstruct, reconstruct_with_stages, ReconOptions, StageDumps, Window};
pub use scalar::Real;
pub use sim::{simulate_mimo_echo, simulate_siso_echo, SimOptions};
pub use types::{
    virtual_elements, ApertureConfig, AxisDomain, EchoCube, EchoKind, ImageVolume, RadarParams,
    Scene, ScenePoint, SpectrumAxis, SpectrumGrid, SpectrumStage, VirtualElement, SPEED_OF_LIGHT,
};

pub use num_complex::Complex;

pub type RadarParams64 = RadarParams<f64>;
pub type ApertureConfig64 = ApertureConfig<f64>;
pub type Scene64 = Scene<f64>;
pub type ScenePoint64 = ScenePoint<f64>;
pub type EchoCube64 = EchoCube<f64>;
pub type ImageVolume64 = ImageVolume<f64>;
pub type SpectrumGrid64 = SpectrumGrid<f64>;
pub type ReconOptions64 = ReconOptions<f64>;

pub type EchoCube32 = EchoCube<f32>;
pub type ImageVolume32 = ImageVolume<f32>;
pub type SpectrumGrid32 = SpectrumGrid<f32>;
