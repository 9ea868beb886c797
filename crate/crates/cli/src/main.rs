//! `risar`: simulate → convert → reconstruct → analyse, one stage per
//! subcommand, stages exchanging data only through container files.
//!
//! Exit codes: 0 success, 2 bad arguments, 3 validation failure, 4 I/O or
//! file-format failure, 5 sampling check failed.

// `!(x > 0)` also rejects NaN arguments
#![allow(clippy::neg_cmp_op_on_partial_ord)]

use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Parser, Subcommand, ValueEnum};
use risar_core::analysis::{
    backproject, check_sampling, peak_metrics, psf_analytic, resolution_guard, resolution_radial,
    resolution_vertical, GridSpec,
};
use risar_core::io::{
    export_mip, parse_config, read_cube, write_cube, Provenance, RunConfig, DEFAULT_DB_FLOOR,
};
use risar_core::{
    multistatic_to_monostatic, reconstruct, reconstruct_with_stages, simulate_mimo_echo,
    simulate_siso_echo, EchoCube, EchoKind, ImageVolume, Real, SpectrumGrid,
};

#[derive(Parser)]
#[command(name = "risar", version, about = "Rotational-ISAR mmWave simulation and 3-D reconstruction")]
struct Cli {
    /// Worker thread cap; results do not depend on it.
    #[arg(long, global = true, env = "RISAR_THREADS")]
    threads: Option<usize>,
    /// Log progress to stderr (repeat for more detail).
    #[arg(short, long, global = true, action = clap::ArgAction::Count)]
    verbose: u8,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Simulate the echo cube of the configured scene.
    Simulate {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: PathBuf,
        /// Single collocated transceiver at every capture (monostatic cube).
        #[arg(long)]
        siso: bool,
        /// Skip the range spreading loss.
        #[arg(long)]
        no_amplitude: bool,
    },
    /// Convert a multistatic cube to the virtual monostatic array.
    Convert {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Reconstruct a volume from a monostatic cube.
    Reconstruct {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: PathBuf,
        /// Write the azimuth, polar and Cartesian spectra here.
        #[arg(long)]
        dump_stages: Option<PathBuf>,
    },
    /// Brute-force backprojection of any echo cube.
    Oracle {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: PathBuf,
        /// NX,NY,NZ,EXTENT or NX,NY,NZ,EX,EY,EZ (half-widths in m).
        #[arg(long)]
        grid: String,
    },
    /// Sampling criteria and resolutions; exits 5 if a criterion fails.
    Check {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        target_radius: f64,
        #[arg(long)]
        target_height: f64,
    },
    /// Analytic point-spread function as CSV.
    Psf {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        rmax: f64,
        #[arg(long)]
        samples: usize,
        #[arg(long)]
        out: PathBuf,
    },
    /// Maximum-intensity projection to a PGM image.
    Mip {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long, value_enum, default_value_t = Axis::Z)]
        axis: Axis,
        #[arg(long)]
        out: PathBuf,
        #[arg(long, default_value_t = DEFAULT_DB_FLOOR, allow_hyphen_values = true)]
        db_floor: f64,
    },
    /// Peak and sidelobe report against the configured scene.
    Metrics {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Axis {
    X,
    Y,
    Z,
}

enum Failure {
    Usage(String),
    Lib(risar_core::Error),
    Sampling,
}

impl From<risar_core::Error> for Failure {
    fn from(e: risar_core::Error) -> Self {
        Failure::Lib(e)
    }
}

impl Failure {
    fn exit_code(&self) -> u8 {
        use risar_core::Error as E;
        match self {
            Failure::Usage(_) => 2,
            Failure::Sampling => 5,
            Failure::Lib(E::Io { .. } | E::BadMagic { .. } | E::Truncated { .. } | E::HeaderInconsistent { .. }) => 4,
            Failure::Lib(_) => 3,
        }
    }
}

type Outcome = Result<(), Failure>;

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    let level = match cli.verbose {
        0 => "warn",
        1 => "info",
        _ => "debug",
    };
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or(level))
        .format_timestamp(None)
        .init();
    if let Some(n) = cli.threads {
        if n == 0 {
            eprintln!("error: --threads must be >= 1");
            return ExitCode::from(2);
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .expect("global pool is configured once");
    }
    match run(cli.cmd) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            match &f {
                Failure::Usage(m) => eprintln!("error: {m}"),
                Failure::Lib(e) => eprintln!("error [{}]: {e}", e.code()),
                Failure::Sampling => {}
            }
            ExitCode::from(f.exit_code())
        }
    }
}

fn load(config: &Path) -> Result<(RunConfig, String), Failure> {
    let cfg = parse_config(config)?;
    // the raw text tags provenance, so the digest tracks every option
    let text = std::fs::read_to_string(config).map_err(|e| risar_core::Error::Io {
        path: config.into(),
        source: e,
    })?;
    Ok((cfg, text))
}

fn read_echo(path: &Path) -> Result<EchoCube<f64>, Failure> {
    let (e, _): (EchoCube<f64>, _) = read_cube(path)?;
    Ok(e)
}

fn write_volume(path: &Path, v: &ImageVolume<f64>, prov: &Provenance) -> Outcome {
    write_cube(path, v, prov)?;
    Ok(())
}

fn write_spectrum<T: Real>(path: &Path, g: &SpectrumGrid<T>, prov: &Provenance) -> Outcome {
    write_cube(path, g, prov)?;
    Ok(())
}

fn write_text(path: &Path, text: &str) -> Outcome {
    std::fs::write(path, text).map_err(|e| {
        Failure::Lib(risar_core::Error::Io {
            path: path.into(),
            source: e,
        })
    })
}

fn parse_grid(spec: &str) -> Result<GridSpec<f64>, Failure> {
    let bad = || Failure::Usage(format!("--grid expects NX,NY,NZ,EXTENT or NX,NY,NZ,EX,EY,EZ, got `{spec}`"));
    let parts: Vec<&str> = spec.split(',').map(str::trim).collect();
    if parts.len() != 4 && parts.len() != 6 {
        return Err(bad());
    }
    let dims: Vec<usize> = parts[..3].iter().map(|s| s.parse()).collect::<Result<_, _>>().map_err(|_| bad())?;
    let ext: Vec<f64> = parts[3..].iter().map(|s| s.parse()).collect::<Result<_, _>>().map_err(|_| bad())?;
    let half = if ext.len() == 1 { [ext[0]; 3] } else { [ext[0], ext[1], ext[2]] };
    if dims.contains(&0) || half.iter().any(|&h| !(h > 0.0)) {
        return Err(bad());
    }
    Ok(GridSpec::centered([dims[0], dims[1], dims[2]], half))
}

fn run(cmd: Cmd) -> Outcome {
    let t0 = Instant::now();
    match cmd {
        Cmd::Simulate { config, out, siso, no_amplitude } => {
            let (c, text) = load(&config)?;
            let mut opts = c.sim;
            if no_amplitude {
                opts.include_amplitude = false;
            }
            let echo = if siso {
                simulate_siso_echo(&c.scene, &c.aperture, &c.radar, opts)?
            } else {
                simulate_mimo_echo(&c.scene, &c.aperture, &c.radar, opts)?
            };
            let prov = Provenance::new("simulate", &(text, siso, opts.include_amplitude));
            write_cube(&out, &echo, &prov)?;
            log::info!("simulate: {:?} {} cube in {:.2?}", echo.dims(), echo.kind.name(), t0.elapsed());
        }
        Cmd::Convert { input, config, out } => {
            let (c, text) = load(&config)?;
            let echo = read_echo(&input)?;
            let (mono, report) = multistatic_to_monostatic(&echo, &c.aperture)?;
            let prov = Provenance::new("convert", &text);
            write_cube(&out, &mono, &prov)?;
            log::info!(
                "convert: {} virtual positions, {} duplicates, {:.2?}",
                mono.y.len(),
                report.duplicate_positions,
                t0.elapsed()
            );
        }
        Cmd::Reconstruct { input, config, out, dump_stages } => {
            let (c, text) = load(&config)?;
            let echo = read_echo(&input)?;
            if echo.kind == EchoKind::Multistatic {
                return Err(Failure::Lib(risar_core::Error::WrongKind {
                    expected: "monostatic (run `convert` first)",
                    found: "multistatic",
                }));
            }
            let prov = Provenance::new("reconstruct", &text);
            let vol = match &dump_stages {
                None => reconstruct(&echo, &c.aperture, &c.radar, &c.recon)?,
                Some(dir) => {
                    std::fs::create_dir_all(dir).map_err(|e| risar_core::Error::Io {
                        path: dir.clone(),
                        source: e,
                    })?;
                    let (vol, stages) = reconstruct_with_stages(&echo, &c.aperture, &c.radar, &c.recon)?;
                    write_spectrum(&dir.join("azimuth.spec"), &stages.azimuth, &prov)?;
                    write_spectrum(&dir.join("polar.spec"), &stages.polar, &prov)?;
                    write_spectrum(&dir.join("cartesian.spec"), &stages.cartesian, &prov)?;
                    vol
                }
            };
            write_volume(&out, &vol, &prov)?;
            log::info!("reconstruct: {:?} volume in {:.2?}", vol.dims, t0.elapsed());
        }
        Cmd::Oracle { input, config, out, grid } => {
            let grid = parse_grid(&grid)?;
            let (c, text) = load(&config)?;
            let echo = read_echo(&input)?;
            let vol = backproject(&echo, &c.aperture, &grid)?;
            write_volume(&out, &vol, &Provenance::new("oracle", &(text, grid.dims)))?;
            log::info!("oracle: {:?} volume in {:.2?}", vol.dims, t0.elapsed());
        }
        Cmd::Check { config, target_radius, target_height } => {
            let (c, _) = load(&config)?;
            let rep = check_sampling(&c.radar, &c.aperture, target_radius, target_height)?;
            let crit = |name: &str, cr: &risar_core::analysis::Criterion<f64>| {
                serde_json::json!({ "criterion": name, "limit": cr.limit, "actual": cr.actual, "pass": cr.pass })
            };
            let report = serde_json::json!({
                "sampling": [crit("delta_k_rad_per_m", &rep.dk), crit("delta_y_m", &rep.dy), crit("delta_theta_rad", &rep.dtheta)],
                "resolution_radial_m": resolution_radial(&c.radar),
                "resolution_vertical_m": resolution_vertical(&c.radar, &c.aperture).ok(),
                "all_pass": rep.all_pass(),
            });
            println!("{}", serde_json::to_string_pretty(&report).expect("json"));
            if !rep.all_pass() {
                return Err(Failure::Sampling);
            }
        }
        Cmd::Psf { config, rmax, samples, out } => {
            if samples < 2 || !(rmax > 0.0) {
                return Err(Failure::Usage("--samples must be >= 2 and --rmax > 0".into()));
            }
            let (c, _) = load(&config)?;
            let mut csv = String::from("r_m,value\n");
            for i in 0..samples {
                let r = rmax * i as f64 / (samples - 1) as f64;
                writeln!(csv, "{r:e},{:e}", psf_analytic(r, &c.radar)).expect("string write");
            }
            write_text(&out, &csv)?;
        }
        Cmd::Mip { input, axis, out, db_floor } => {
            let (vol, _): (ImageVolume<f32>, _) = read_cube(&input)?;
            let a = match axis {
                Axis::X => 0,
                Axis::Y => 1,
                Axis::Z => 2,
            };
            export_mip(&vol, a, db_floor, &out)?;
        }
        Cmd::Metrics { input, config, out } => {
            let (c, _) = load(&config)?;
            let (vol, _): (ImageVolume<f64>, _) = read_cube(&input)?;
            let m = peak_metrics(&vol, &c.scene, resolution_guard(&c.radar, &c.aperture))?;
            let json = serde_json::to_string_pretty(&m).expect("json");
            write_text(&out, &json)?;
            println!(
                "max position error {:.2} voxels, max sidelobe {:.1} dB",
                m.max_error_voxels(),
                m.max_sidelobe_db
            );
        }
    }
    Ok(())
}
