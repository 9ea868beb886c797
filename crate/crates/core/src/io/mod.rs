//! File formats: the binary array container, TOML run configurations and
//! PGM projection export.

mod config;
mod container;
mod mip;

pub use config::{parse_config, parse_config_str, RunConfig};
pub use container::{
    decode, encode, read_cube, read_header, write_cube, CubeFile, CubeFileHeader, HeaderAxes,
    Provenance, MAGIC,
};
pub use mip::{export_mip, mip_raster, write_pgm, Raster, DEFAULT_DB_FLOOR};
