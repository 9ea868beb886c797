use std::io::Write;
use std::path::Path;

use crate::error::{Error, Result};
use crate::scalar::Real;
use crate::types::ImageVolume;

pub const DEFAULT_DB_FLOOR: f64 = -40.0;

/// 8-bit grayscale image, row-major.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Raster {
    pub width: usize,
    pub height: usize,
    pub pixels: Vec<u8>,
}

/// Maximum-intensity projection of `|volume|` along `axis`, in dB relative
/// to the global maximum, clipped at `db_floor` and mapped to 0–255.
///
/// The two remaining axes in ascending order become columns and rows.
pub fn mip_raster<T: Real>(volume: &ImageVolume<T>, axis: usize, db_floor: f64) -> Result<Raster> {
    volume.validate()?;
    if axis > 2 {
        return Err(Error::param("axis", "must be x, y or z"));
    }
    if !(db_floor < 0.0) {
        return Err(Error::param("db_floor", "must be < 0 dB"));
    }
    let (u, v) = match axis {
        0 => (1, 2),
        1 => (0, 2),
        _ => (0, 1),
    };
    let (w, h) = (volume.dims[u], volume.dims[v]);
    let mut proj = vec![0.0f64; w * h];
    for (flat, c) in volume.data.iter().enumerate() {
        let idx = volume.unravel(flat);
        let cell = &mut proj[idx[v] * w + idx[u]];
        *cell = cell.max(c.norm().to_f64_lossless());
    }
    let peak = proj.iter().cloned().fold(0.0, f64::max);
    let pixels = proj
        .iter()
        .map(|&m| {
            if !(peak > 0.0) || m <= 0.0 {
                return 0;
            }
            let db = (20.0 * (m / peak).log10()).max(db_floor);
            (255.0 * (db - db_floor) / -db_floor).round().clamp(0.0, 255.0) as u8
        })
        .collect();
    Ok(Raster {
        width: w,
        height: h,
        pixels,
    })
}

/// Writes a binary (P5) PGM.
pub fn write_pgm(path: impl AsRef<Path>, raster: &Raster) -> Result<()> {
    let path = path.as_ref();
    let mut buf = format!("P5\n{} {}\n255\n", raster.width, raster.height).into_bytes();
    buf.extend_from_slice(&raster.pixels);
    std::fs::File::create(path)
        .and_then(|mut f| f.write_all(&buf))
        .map_err(|e| Error::io(path, e))
}

pub fn export_mip<T: Real>(
    volume: &ImageVolume<T>,
    axis: usize,
    db_floor: f64,
    path: impl AsRef<Path>,
) -> Result<Raster> {
    let r = mip_raster(volume, axis, db_floor)?;
    write_pgm(path, &r)?;
    Ok(r)
}
