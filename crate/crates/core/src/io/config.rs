//! TOML run configuration.
//!
//! ```toml
//! [radar]
//! f0_hz = 77e9
//! bandwidth_hz = 4e9
//! num_k = 64
//!
//! [aperture]
//! r0_m = 0.25
//! num_theta = 1024
//! theta_max_deg = 360
//! num_y = 512
//! delta_y_m = 0.000948710310126582
//!
//! [scene]
//! target_radius_m = 0.2
//! target_height_m = 0.0
//! points = [{ x_m = -0.15, y_m = 0.0, z_m = 0.0 }]
//!
//! [options]
//! output_dims = [800, 8, 800]
//! output_extent_m = [0.2, 0.004, 0.2]
//! guard_cells = "auto"
//! ```
//!
//! Lengths carry `_m`, frequencies `_hz`, angles `_deg`. A key with the
//! right stem but another suffix is reported as a unit error; unknown keys
//! are rejected.

use std::path::Path;

use num_complex::Complex;
use toml::{Table, Value};

use crate::error::{Error, Result};
use crate::recon::{auto_guard_cells, ReconOptions, Window};
use crate::sim::SimOptions;
use crate::types::{ApertureConfig, RadarParams, Scene, ScenePoint, SPEED_OF_LIGHT};

/// Fully validated parameter set read from a configuration file.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub radar: RadarParams<f64>,
    pub aperture: ApertureConfig<f64>,
    pub scene: Scene<f64>,
    pub sim: SimOptions,
    pub recon: ReconOptions<f64>,
}

/// Known keys of a section; `true` marks keys that carry a unit suffix.
struct Section<'a> {
    name: &'a str,
    table: &'a Table,
    known: &'a [(&'a str, bool)],
}

impl<'a> Section<'a> {
    fn new(root: &'a Table, name: &'a str, known: &'a [(&'a str, bool)], required: bool) -> Result<Option<Self>> {
        match root.get(name) {
            None if required => Err(Error::config(name, "missing section")),
            None => Ok(None),
            Some(Value::Table(table)) => {
                let s = Section { name, table, known };
                s.check_keys()?;
                Ok(Some(s))
            }
            Some(_) => Err(Error::config(name, "must be a table")),
        }
    }

    fn field(&self, key: &str) -> String {
        format!("{}.{key}", self.name)
    }

    fn check_keys(&self) -> Result<()> {
        for key in self.table.keys() {
            if self.known.iter().any(|(k, _)| k == key) {
                continue;
            }
            let suffix_of = self.known.iter().find(|(k, unit)| {
                *unit && {
                    let stem = &k[..k.rfind('_').expect("unit keys have a suffix")];
                    key.len() > stem.len() && key.starts_with(stem) && key.as_bytes()[stem.len()] == b'_'
                }
            });
            return Err(match suffix_of {
                Some((k, _)) => Error::config(self.field(key), format!("wrong unit suffix, expected `{k}`")),
                None => Error::config(self.field(key), "unknown key"),
            });
        }
        Ok(())
    }

    fn get(&self, key: &str) -> Option<&Value> {
        self.table.get(key)
    }

    fn require(&self, key: &str) -> Result<&Value> {
        self.get(key).ok_or_else(|| Error::config(self.field(key), "missing key"))
    }

    fn f64_opt(&self, key: &str) -> Result<Option<f64>> {
        self.get(key).map(|v| as_f64(v, &self.field(key))).transpose()
    }

    fn f64(&self, key: &str) -> Result<f64> {
        as_f64(self.require(key)?, &self.field(key))
    }

    fn usize_opt(&self, key: &str) -> Result<Option<usize>> {
        self.get(key).map(|v| as_usize(v, &self.field(key))).transpose()
    }

    fn usize(&self, key: &str) -> Result<usize> {
        as_usize(self.require(key)?, &self.field(key))
    }

    fn f64_list_opt(&self, key: &str) -> Result<Option<Vec<f64>>> {
        self.get(key)
            .map(|v| {
                let field = self.field(key);
                let arr = v.as_array().ok_or_else(|| Error::config(&field, "must be an array"))?;
                arr.iter()
                    .enumerate()
                    .map(|(i, x)| as_f64(x, &format!("{field}[{i}]")))
                    .collect()
            })
            .transpose()
    }

    fn triple<T>(&self, key: &str, conv: impl Fn(&Value, &str) -> Result<T>) -> Result<Option<[T; 3]>> {
        let Some(v) = self.get(key) else { return Ok(None) };
        let field = self.field(key);
        let arr = v.as_array().ok_or_else(|| Error::config(&field, "must be an array of 3"))?;
        if arr.len() != 3 {
            return Err(Error::config(&field, format!("must have 3 entries, found {}", arr.len())));
        }
        let a = conv(&arr[0], &format!("{field}[0]"))?;
        let b = conv(&arr[1], &format!("{field}[1]"))?;
        let c = conv(&arr[2], &format!("{field}[2]"))?;
        Ok(Some([a, b, c]))
    }
}

fn as_f64(v: &Value, field: &str) -> Result<f64> {
    let x = match v {
        Value::Float(f) => *f,
        Value::Integer(i) => *i as f64,
        _ => return Err(Error::config(field, "must be a number")),
    };
    if !x.is_finite() {
        return Err(Error::config(field, "must be finite"));
    }
    Ok(x)
}

fn as_usize(v: &Value, field: &str) -> Result<usize> {
    match v {
        Value::Integer(i) if *i >= 0 => Ok(*i as usize),
        Value::Integer(_) => Err(Error::config(field, "must be >= 0")),
        _ => Err(Error::config(field, "must be an integer")),
    }
}

/// `"auto"` or a positive integer.
fn auto_or_usize(s: &Section, key: &str) -> Result<Option<usize>> {
    match s.get(key) {
        None => Ok(None),
        Some(Value::String(a)) if a == "auto" => Ok(None),
        Some(v) => as_usize(v, &s.field(key)).map(Some),
    }
}

const RADAR_KEYS: &[(&str, bool)] = &[("f0_hz", true), ("bandwidth_hz", true), ("num_k", false), ("c_m_per_s", true)];
const APERTURE_KEYS: &[(&str, bool)] = &[
    ("r0_m", true),
    ("num_theta", false),
    ("theta_max_deg", true),
    ("num_y", false),
    ("delta_y_m", true),
    ("tx_offsets_m", true),
    ("rx_offsets_m", true),
];
const SCENE_KEYS: &[(&str, bool)] = &[("target_radius_m", true), ("target_height_m", true), ("points", false)];
const POINT_KEYS: &[(&str, bool)] = &[("x_m", true), ("y_m", true), ("z_m", true), ("amplitude", false)];
const OPTION_KEYS: &[(&str, bool)] = &[
    ("include_amplitude", false),
    ("zero_pad_y", false),
    ("window", false),
    ("output_dims", false),
    ("output_extent_m", true),
    ("theta_upsample", false),
    ("filter_oversample", false),
    ("guard_cells", false),
];

/// Reads and validates a configuration file.
pub fn parse_config(path: impl AsRef<Path>) -> Result<RunConfig> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_config_str(&text)
}

pub fn parse_config_str(text: &str) -> Result<RunConfig> {
    let root: Table = text
        .parse()
        .map_err(|e: toml::de::Error| Error::config("<file>", e.message().to_string()))?;
    for key in root.keys() {
        if !["radar", "aperture", "scene", "options"].contains(&key.as_str()) {
            return Err(Error::config(key.clone(), "unknown section"));
        }
    }

    let r = Section::new(&root, "radar", RADAR_KEYS, true)?.expect("required");
    let c = r.f64_opt("c_m_per_s")?.unwrap_or(SPEED_OF_LIGHT);
    let radar = RadarParams::with_speed(r.f64("f0_hz")?, r.f64("bandwidth_hz")?, r.usize("num_k")?, c)?;

    let a = Section::new(&root, "aperture", APERTURE_KEYS, true)?.expect("required");
    let deg = a.f64("theta_max_deg")?;
    let theta_max = if deg == 360.0 { std::f64::consts::TAU } else { deg.to_radians() };
    let num_y = a.usize("num_y")?;
    let delta_y = match a.f64_opt("delta_y_m")? {
        Some(d) => d,
        None if num_y == 1 => 0.0,
        None => return Err(Error::config("aperture.delta_y_m", "missing key")),
    };
    let aperture = ApertureConfig {
        r0: a.f64("r0_m")?,
        num_theta: a.usize("num_theta")?,
        theta_max,
        num_y,
        delta_y,
        tx_offsets: a.f64_list_opt("tx_offsets_m")?.unwrap_or_else(|| vec![0.0]),
        rx_offsets: a.f64_list_opt("rx_offsets_m")?.unwrap_or_else(|| vec![0.0]),
    };
    aperture.validate()?;

    let scene = match Section::new(&root, "scene", SCENE_KEYS, false)? {
        None => Scene::empty(),
        Some(s) => parse_scene(&s)?,
    };
    scene.validate(aperture.r0)?;

    let mut sim = SimOptions::default();
    let default_extent = [
        scene.target_radius.max(radar.lambda_min()),
        (scene.target_height / 2.0).max(aperture.scan_height() / 2.0).max(radar.lambda_min()),
        scene.target_radius.max(radar.lambda_min()),
    ];
    let mut recon = ReconOptions::new([128, 64, 128], default_extent);
    let mut guard = None;
    if let Some(o) = Section::new(&root, "options", OPTION_KEYS, false)? {
        if let Some(v) = o.get("include_amplitude") {
            sim.include_amplitude = v
                .as_bool()
                .ok_or_else(|| Error::config(o.field("include_amplitude"), "must be a boolean"))?;
        }
        if let Some(z) = o.usize_opt("zero_pad_y")? {
            recon.zero_pad_y = z;
        }
        if let Some(v) = o.get("window") {
            recon.window = match v.as_str() {
                Some("none") => Window::None,
                Some("hann") => Window::Hann,
                _ => return Err(Error::config(o.field("window"), "must be \"none\" or \"hann\"")),
            };
        }
        if let Some(d) = o.triple("output_dims", as_usize)? {
            recon.output_dims = d;
        }
        if let Some(e) = o.triple("output_extent_m", as_f64)? {
            recon.output_extent = e;
        }
        recon.theta_upsample = auto_or_usize(&o, "theta_upsample")?;
        recon.filter_oversample = auto_or_usize(&o, "filter_oversample")?;
        guard = auto_or_usize(&o, "guard_cells")?;
    }
    // by default the periodic grid spans the scene plus one range envelope
    recon.guard_cells = guard.unwrap_or_else(|| {
        let envelope = if radar.bandwidth > 0.0 { radar.c / (2.0 * radar.bandwidth) } else { 0.0 };
        auto_guard_cells(&recon, scene.target_radius + envelope)
    });
    recon.validate()?;

    Ok(RunConfig {
        radar,
        aperture,
        scene,
        sim,
        recon,
    })
}

fn parse_scene(s: &Section) -> Result<Scene<f64>> {
    let mut points = Vec::new();
    if let Some(v) = s.get("points") {
        let arr = v
            .as_array()
            .ok_or_else(|| Error::config("scene.points", "must be an array of tables"))?;
        for (i, p) in arr.iter().enumerate() {
            let name = format!("scene.points[{i}]");
            let table = p
                .as_table()
                .ok_or_else(|| Error::config(&name, "must be a table"))?;
            let ps = Section {
                name: &name,
                table,
                known: POINT_KEYS,
            };
            ps.check_keys()?;
            let amplitude = match ps.get("amplitude") {
                None => Complex::new(1.0, 0.0),
                Some(Value::Array(re_im)) if re_im.len() == 2 => Complex::new(
                    as_f64(&re_im[0], &ps.field("amplitude[0]"))?,
                    as_f64(&re_im[1], &ps.field("amplitude[1]"))?,
                ),
                Some(v @ (Value::Float(_) | Value::Integer(_))) => {
                    Complex::new(as_f64(v, &ps.field("amplitude"))?, 0.0)
                }
                Some(_) => {
                    return Err(Error::config(
                        ps.field("amplitude"),
                        "must be a number or [re, im]",
                    ))
                }
            };
            points.push(ScenePoint {
                x: ps.f64("x_m")?,
                y: ps.f64("y_m")?,
                z: ps.f64("z_m")?,
                amplitude,
            });
        }
    }
    let mut scene = Scene::from_points(points);
    if let Some(rt) = s.f64_opt("target_radius_m")? {
        scene.target_radius = rt;
    }
    if let Some(h) = s.f64_opt("target_height_m")? {
        scene.target_height = h;
    }
    Ok(scene)
}
