#![allow(dead_code)]

use risar_core::*;

pub const LAMBDA_C: f64 = SPEED_OF_LIGHT / 79e9;

/// Small SISO scan that satisfies the sampling criteria for targets within
/// 3 cm of the axis and runs in well under a second.
pub fn small_siso() -> (RadarParams64, ApertureConfig64) {
    (
        RadarParams::new(77e9, 4e9, 16).unwrap(),
        ApertureConfig::siso(0.25, 256, std::f64::consts::TAU, 32, 2e-3).unwrap(),
    )
}

/// 0.5 mm voxels in x/z over ±12 mm, 2 mm in y over ±8 mm.
pub fn small_opts() -> ReconOptions64 {
    ReconOptions::new([48, 8, 48], [0.012, 0.008, 0.012])
}

pub fn point_scene(pts: &[(f64, f64, f64)]) -> Scene64 {
    Scene::from_points(pts.iter().map(|&(x, y, z)| ScenePoint::unit(x, y, z)).collect())
}

pub fn echo(scene: &Scene64, cfg: &ApertureConfig64, p: &RadarParams64) -> EchoCube64 {
    simulate_siso_echo(scene, cfg, p, SimOptions { include_amplitude: false }).unwrap()
}

pub fn voxel_of(vol: &ImageVolume64, p: (f64, f64, f64)) -> [f64; 3] {
    [
        vol.fractional_index(0, p.0),
        vol.fractional_index(1, p.1),
        vol.fractional_index(2, p.2),
    ]
}

pub fn within_one(idx: [usize; 3], f: [f64; 3]) -> bool {
    (0..3).all(|a| (idx[a] as f64 - f[a]).abs() <= 1.0)
}
