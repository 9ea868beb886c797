//! Binary container: `RISAR001`, a little-endian `u32` header length, a JSON
//! header, then interleaved `(re, im)` `f32` little-endian samples.

use std::path::Path;

use num_complex::Complex;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::scalar::Real;
use crate::types::{check_uniform, EchoCube, EchoKind, ImageVolume, SpectrumAxis, SpectrumGrid, SpectrumStage};

pub const MAGIC: &[u8; 8] = b"RISAR001";
const PREFIX: usize = 12;

/// Which operation produced a file, and a digest of the options it ran with.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Provenance {
    pub operation: String,
    /// Lower-case hex SHA-256 of the options serialized as JSON.
    pub options_hash: String,
}

impl Provenance {
    pub fn new<O: Serialize + ?Sized>(operation: &str, options: &O) -> Self {
        let bytes = serde_json::to_vec(options).expect("options serialize to JSON");
        Self {
            operation: operation.to_string(),
            options_hash: hex::encode(Sha256::digest(&bytes)),
        }
    }
}

/// Kind-specific axis information carried in the header.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum HeaderAxes {
    EchoCube {
        echo_kind: EchoKind,
        theta: Vec<f64>,
        k: Vec<f64>,
        y: Vec<f64>,
        tx_offsets: Vec<f64>,
        rx_offsets: Vec<f64>,
    },
    SpectrumGrid {
        stage: SpectrumStage,
        axes: [SpectrumAxis<f64>; 3],
    },
    ImageVolume {
        origin: [f64; 3],
        pitch: [f64; 3],
    },
}

impl HeaderAxes {
    pub fn kind_name(&self) -> &'static str {
        match self {
            HeaderAxes::EchoCube { .. } => "echo_cube",
            HeaderAxes::SpectrumGrid { .. } => "spectrum_grid",
            HeaderAxes::ImageVolume { .. } => "image_volume",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CubeFileHeader {
    #[serde(flatten)]
    pub axes: HeaderAxes,
    pub dims: Vec<usize>,
    pub payload_bytes: u64,
    pub provenance: Provenance,
}

/// Array types that can be stored in the container.
pub trait CubeFile: Sized {
    type Scalar: Real;
    const KIND: &'static str;
    fn header_axes(&self) -> HeaderAxes;
    fn shape(&self) -> Vec<usize>;
    fn samples(&self) -> &[Complex<Self::Scalar>];
    /// Rebuilds the value; `data` length already matches `dims`.
    fn from_parts(axes: HeaderAxes, dims: &[usize], data: Vec<Complex<Self::Scalar>>) -> std::result::Result<Self, String>;
}

fn to64<T: Real>(v: &[T]) -> Vec<f64> {
    v.iter().map(|x| x.to_f64_lossless()).collect()
}

fn from64<T: Real>(v: &[f64]) -> Vec<T> {
    v.iter().map(|&x| T::lit(x)).collect()
}

fn axis64<T: Real>(a: &SpectrumAxis<T>) -> SpectrumAxis<f64> {
    SpectrumAxis {
        domain: a.domain,
        start: a.start.to_f64_lossless(),
        step: a.step.to_f64_lossless(),
        len: a.len,
    }
}

impl<T: Real> CubeFile for EchoCube<T> {
    type Scalar = T;
    const KIND: &'static str = "echo_cube";

    fn header_axes(&self) -> HeaderAxes {
        HeaderAxes::EchoCube {
            echo_kind: self.kind,
            theta: to64(&self.theta),
            k: to64(&self.k),
            y: to64(&self.y),
            tx_offsets: to64(&self.tx_offsets),
            rx_offsets: to64(&self.rx_offsets),
        }
    }

    fn shape(&self) -> Vec<usize> {
        self.dims()
    }

    fn samples(&self) -> &[Complex<T>] {
        &self.data
    }

    fn from_parts(axes: HeaderAxes, dims: &[usize], data: Vec<Complex<T>>) -> std::result::Result<Self, String> {
        let HeaderAxes::EchoCube { echo_kind, theta, k, y, tx_offsets, rx_offsets } = axes else {
            unreachable!("kind checked by caller")
        };
        let cube = EchoCube {
            kind: echo_kind,
            theta: from64(&theta),
            k: from64(&k),
            y: from64(&y),
            tx_offsets: from64(&tx_offsets),
            rx_offsets: from64(&rx_offsets),
            data,
        };
        if cube.dims() != dims {
            return Err(format!("axis lengths {:?} disagree with dims {dims:?}", cube.dims()));
        }
        cube.validate().map_err(|e| e.to_string())?;
        Ok(cube)
    }
}

impl<T: Real> CubeFile for SpectrumGrid<T> {
    type Scalar = T;
    const KIND: &'static str = "spectrum_grid";

    fn header_axes(&self) -> HeaderAxes {
        HeaderAxes::SpectrumGrid {
            stage: self.stage,
            axes: [axis64(&self.axes[0]), axis64(&self.axes[1]), axis64(&self.axes[2])],
        }
    }

    fn shape(&self) -> Vec<usize> {
        self.dims().to_vec()
    }

    fn samples(&self) -> &[Complex<T>] {
        &self.data
    }

    fn from_parts(axes: HeaderAxes, dims: &[usize], data: Vec<Complex<T>>) -> std::result::Result<Self, String> {
        let HeaderAxes::SpectrumGrid { stage, axes } = axes else {
            unreachable!("kind checked by caller")
        };
        let conv = |a: &SpectrumAxis<f64>| SpectrumAxis {
            domain: a.domain,
            start: T::lit(a.start),
            step: T::lit(a.step),
            len: a.len,
        };
        let grid = SpectrumGrid {
            stage,
            axes: [conv(&axes[0]), conv(&axes[1]), conv(&axes[2])],
            data,
        };
        if grid.dims()[..] != *dims {
            return Err(format!("axis lengths {:?} disagree with dims {dims:?}", grid.dims()));
        }
        if grid.axes.iter().any(|a| a.len > 1 && !(a.step > T::zero())) {
            return Err("spectrum axes must be increasing".into());
        }
        grid.validate().map_err(|e| e.to_string())?;
        Ok(grid)
    }
}

impl<T: Real> CubeFile for ImageVolume<T> {
    type Scalar = T;
    const KIND: &'static str = "image_volume";

    fn header_axes(&self) -> HeaderAxes {
        HeaderAxes::ImageVolume {
            origin: self.origin.map(|v| v.to_f64_lossless()),
            pitch: self.pitch.map(|v| v.to_f64_lossless()),
        }
    }

    fn shape(&self) -> Vec<usize> {
        self.dims.to_vec()
    }

    fn samples(&self) -> &[Complex<T>] {
        &self.data
    }

    fn from_parts(axes: HeaderAxes, dims: &[usize], data: Vec<Complex<T>>) -> std::result::Result<Self, String> {
        let HeaderAxes::ImageVolume { origin, pitch } = axes else {
            unreachable!("kind checked by caller")
        };
        let dims: [usize; 3] = dims
            .try_into()
            .map_err(|_| format!("a volume needs 3 dims, found {}", dims.len()))?;
        let vol = ImageVolume {
            dims,
            origin: origin.map(T::lit),
            pitch: pitch.map(T::lit),
            data,
        };
        vol.validate().map_err(|e| e.to_string())?;
        Ok(vol)
    }
}

/// Serializes `value` to the container byte layout.
pub fn encode<A: CubeFile>(value: &A, provenance: &Provenance) -> Vec<u8> {
    let samples = value.samples();
    let header = CubeFileHeader {
        axes: value.header_axes(),
        dims: value.shape(),
        payload_bytes: samples.len() as u64 * 8,
        provenance: provenance.clone(),
    };
    let json = serde_json::to_vec(&header).expect("header serializes");
    let mut out = Vec::with_capacity(PREFIX + json.len() + samples.len() * 8);
    out.extend_from_slice(MAGIC);
    out.extend_from_slice(&(json.len() as u32).to_le_bytes());
    out.extend_from_slice(&json);
    for c in samples {
        out.extend_from_slice(&c.re.to_f32().to_le_bytes());
        out.extend_from_slice(&c.im.to_f32().to_le_bytes());
    }
    out
}

/// Parses and checks the magic, header length and header JSON; returns the
/// header and the payload slice.
fn split_header<'a>(path: &Path, bytes: &'a [u8]) -> Result<(CubeFileHeader, &'a [u8])> {
    if bytes.len() < MAGIC.len() || &bytes[..MAGIC.len()] != MAGIC {
        return Err(Error::BadMagic { path: path.into() });
    }
    if bytes.len() < PREFIX {
        return Err(Error::Truncated {
            path: path.into(),
            expected: PREFIX as u64,
            found: bytes.len() as u64,
        });
    }
    let hlen = u32::from_le_bytes(bytes[8..12].try_into().expect("4 bytes")) as usize;
    if bytes.len() < PREFIX + hlen {
        return Err(Error::Truncated {
            path: path.into(),
            expected: (PREFIX + hlen) as u64,
            found: bytes.len() as u64,
        });
    }
    let header: CubeFileHeader = serde_json::from_slice(&bytes[PREFIX..PREFIX + hlen]).map_err(|e| {
        Error::HeaderInconsistent {
            path: path.into(),
            reason: format!("unreadable header: {e}"),
        }
    })?;
    let count: u64 = header.dims.iter().map(|&d| d as u64).product();
    if count * 8 != header.payload_bytes {
        return Err(Error::HeaderInconsistent {
            path: path.into(),
            reason: format!(
                "dims {:?} imply {} payload bytes but header declares {}",
                header.dims,
                count * 8,
                header.payload_bytes
            ),
        });
    }
    let payload = &bytes[PREFIX + hlen..];
    if (payload.len() as u64) < header.payload_bytes {
        return Err(Error::Truncated {
            path: path.into(),
            expected: header.payload_bytes,
            found: payload.len() as u64,
        });
    }
    if payload.len() as u64 > header.payload_bytes {
        return Err(Error::HeaderInconsistent {
            path: path.into(),
            reason: format!(
                "{} trailing bytes after the payload",
                payload.len() as u64 - header.payload_bytes
            ),
        });
    }
    check_header_axes(path, &header)?;
    Ok((header, payload))
}

fn check_header_axes(path: &Path, header: &CubeFileHeader) -> Result<()> {
    let bad = |reason: String| Error::HeaderInconsistent {
        path: path.into(),
        reason,
    };
    if let HeaderAxes::EchoCube { theta, k, y, echo_kind, .. } = &header.axes {
        for (name, ax) in [("theta", theta), ("k", k)] {
            check_uniform(name, ax).map_err(|e| bad(e.to_string()))?;
        }
        if *echo_kind == EchoKind::Monostatic {
            check_uniform("y", y).map_err(|e| bad(e.to_string()))?;
        } else if y.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(bad("capture positions must be increasing".into()));
        }
    }
    Ok(())
}

/// Decodes a container previously produced by [`encode`].
pub fn decode<A: CubeFile>(path: &Path, bytes: &[u8]) -> Result<(A, Provenance)> {
    let (header, payload) = split_header(path, bytes)?;
    if header.axes.kind_name() != A::KIND {
        return Err(Error::HeaderInconsistent {
            path: path.into(),
            reason: format!("file holds {}, expected {}", header.axes.kind_name(), A::KIND),
        });
    }
    let data: Vec<Complex<A::Scalar>> = payload
        .chunks_exact(8)
        .map(|c| {
            let re = f32::from_le_bytes(c[..4].try_into().expect("4 bytes"));
            let im = f32::from_le_bytes(c[4..].try_into().expect("4 bytes"));
            Complex::new(A::Scalar::from_f32(re), A::Scalar::from_f32(im))
        })
        .collect();
    let value = A::from_parts(header.axes, &header.dims, data).map_err(|reason| Error::HeaderInconsistent {
        path: path.into(),
        reason,
    })?;
    Ok((value, header.provenance))
}

pub fn write_cube<A: CubeFile>(path: impl AsRef<Path>, value: &A, provenance: &Provenance) -> Result<()> {
    let path = path.as_ref();
    std::fs::write(path, encode(value, provenance)).map_err(|e| Error::io(path, e))
}

pub fn read_cube<A: CubeFile>(path: impl AsRef<Path>) -> Result<(A, Provenance)> {
    let path = path.as_ref();
    let bytes = std::fs::read(path).map_err(|e| Error::io(path, e))?;
    decode(path, &bytes)
}

/// Reads only the header, e.g. to dispatch on the stored kind.
pub fn read_header(path: impl AsRef<Path>) -> Result<CubeFileHeader> {
    let path = path.as_ref();
    let bytes = std::fs::read(path).map_err(|e| Error::io(path, e))?;
    split_header(path, &bytes).map(|(h, _)| h)
}
