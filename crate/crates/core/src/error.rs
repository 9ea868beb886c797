use std::path::PathBuf;

use thiserror::Error;

/// Errors raised by the simulation, reconstruction and file-format layers.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter `{field}`: {reason}")]
    InvalidParameter { field: String, reason: String },

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("expected a {expected} echo cube, found {found}")]
    WrongKind {
        expected: &'static str,
        found: &'static str,
    },

    #[error("virtual aperture is not uniform: gap of {gap_m:.9} m between y={from_m:.9} m and y={to_m:.9} m (expected {expected_m:.9} m)")]
    NonUniformGrid {
        from_m: f64,
        to_m: f64,
        gap_m: f64,
        expected_m: f64,
    },

    #[error("scene point {index} coincides with an antenna element (zero range)")]
    CoincidentPoint { index: usize },

    #[error("truth point {index} at ({x:.4}, {y:.4}, {z:.4}) m lies outside the volume extent")]
    TruthOutsideVolume { index: usize, x: f64, y: f64, z: f64 },

    #[error("bad magic in {path}: expected RISAR001")]
    BadMagic { path: PathBuf },

    #[error("truncated file {path}: expected {expected} bytes, found {found}")]
    Truncated {
        path: PathBuf,
        expected: u64,
        found: u64,
    },

    #[error("inconsistent header in {path}: {reason}")]
    HeaderInconsistent { path: PathBuf, reason: String },

    #[error("config error at `{field}`: {reason}")]
    Config { field: String, reason: String },

    #[error("i/o error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    pub(crate) fn param(field: impl Into<String>, reason: impl Into<String>) -> Self {
        Error::InvalidParameter {
            field: field.into(),
            reason: reason.into(),
        }
    }

    pub(crate) fn config(field: impl Into<String>, reason: impl Into<String>) -> Self {
        Error::Config {
            field: field.into(),
            reason: reason.into(),
        }
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    /// Stable numeric code per variant, used by the CLI and in logs.
    pub fn code(&self) -> u16 {
        match self {
            Error::InvalidParameter { .. } => 10,
            Error::DimensionMismatch(_) => 11,
            Error::WrongKind { .. } => 12,
            Error::NonUniformGrid { .. } => 13,
            Error::CoincidentPoint { .. } => 14,
            Error::TruthOutsideVolume { .. } => 15,
            Error::BadMagic { .. } => 20,
            Error::Truncated { .. } => 21,
            Error::HeaderInconsistent { .. } => 22,
            Error::Config { .. } => 30,
            Error::Io { .. } => 40,
        }
    }

    /// True for failures originating in the filesystem rather than the data.
    pub fn is_io(&self) -> bool {
        matches!(self, Error::Io { .. })
    }
}

pub type Result<T> = std::result::Result<T, Error>;
