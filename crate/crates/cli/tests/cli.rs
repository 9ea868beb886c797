use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn risar(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_risar")).args(args).output().unwrap()
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exited normally")
}

fn configs() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../configs")
}

const SMALL: &str = r#"
[radar]
f0_hz = 77e9
bandwidth_hz = 4e9
num_k = 8

[aperture]
r0_m = 0.25
num_theta = 64
theta_max_deg = 360
num_y = 4
delta_y_m = 0.002

[scene]
target_radius_m = 0.005
target_height_m = 0.002
points = [{ x_m = 0.001, y_m = 0.0, z_m = 0.0 }]

[options]
output_dims = [16, 4, 16]
output_extent_m = [0.004, 0.004, 0.004]
"#;

fn small(dir: &Path) -> String {
    let p = dir.join("small.toml");
    std::fs::write(&p, SMALL).unwrap();
    p.to_str().unwrap().into()
}

#[test]
fn bad_arguments_exit_2() {
    assert_eq!(code(&risar(&["frobnicate"])), 2);
    assert_eq!(code(&risar(&["simulate", "--config", "x.toml"])), 2);
    let dir = tempfile::tempdir().unwrap();
    let cfg = small(dir.path());
    let o = risar(&["oracle", "--in", "e", "--config", &cfg, "--out", "v", "--grid", "4,4"]);
    assert_eq!(code(&o), 2);
    assert_eq!(code(&risar(&["--threads", "0", "check", "--config", &cfg, "--target-radius", "0.01", "--target-height", "0"])), 2);
}

#[test]
fn help_exits_0() {
    let o = risar(&["--help"]);
    assert_eq!(code(&o), 0);
    assert!(String::from_utf8_lossy(&o.stdout).contains("reconstruct"));
}

#[test]
fn validation_failures_exit_3() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.toml");
    std::fs::write(&bad, SMALL.replace("num_k = 8", "num_k = 0")).unwrap();
    let o = risar(&["simulate", "--config", bad.to_str().unwrap(), "--out", "e"]);
    assert_eq!(code(&o), 3);
    assert!(String::from_utf8_lossy(&o.stderr).contains("radar.num_k"));

    let unit = dir.path().join("unit.toml");
    std::fs::write(&unit, SMALL.replace("r0_m = 0.25", "r0_mm = 250")).unwrap();
    let o = risar(&["simulate", "--config", unit.to_str().unwrap(), "--out", "e"]);
    assert_eq!(code(&o), 3);
    assert!(String::from_utf8_lossy(&o.stderr).contains("r0"));

    // reconstruct requires the converted monostatic cube
    let cfg = small(dir.path());
    let e = dir.path().join("e.cube");
    let mimo = dir.path().join("mimo.toml");
    std::fs::write(&mimo, SMALL.replace("delta_y_m = 0.002", "delta_y_m = 0.002\ntx_offsets_m = [0.0, 0.001]")).unwrap();
    assert_eq!(code(&risar(&["simulate", "--config", mimo.to_str().unwrap(), "--out", e.to_str().unwrap()])), 0);
    let o = risar(&["reconstruct", "--in", e.to_str().unwrap(), "--config", &cfg, "--out", "v"]);
    assert_eq!(code(&o), 3);
}

#[test]
fn io_and_format_failures_exit_4() {
    let dir = tempfile::tempdir().unwrap();
    let missing = dir.path().join("none.toml");
    assert_eq!(code(&risar(&["psf", "--config", missing.to_str().unwrap(), "--rmax", "0.01", "--samples", "4", "--out", "p"])), 4);

    let junk = dir.path().join("junk.vol");
    std::fs::write(&junk, b"not a cube at all").unwrap();
    let o = risar(&["mip", "--in", junk.to_str().unwrap(), "--out", "m.pgm"]);
    assert_eq!(code(&o), 4);

    let cfg = small(dir.path());
    let e = dir.path().join("e.cube");
    assert_eq!(code(&risar(&["simulate", "--config", &cfg, "--out", e.to_str().unwrap(), "--siso"])), 0);
    let bytes = std::fs::read(&e).unwrap();
    let cut = dir.path().join("cut.cube");
    std::fs::write(&cut, &bytes[..bytes.len() - 3]).unwrap();
    let o = risar(&["reconstruct", "--in", cut.to_str().unwrap(), "--config", &cfg, "--out", "v"]);
    assert_eq!(code(&o), 4);
    assert!(String::from_utf8_lossy(&o.stderr).contains("expected"));
}

#[test]
fn sampling_check_exit_codes() {
    let mimo = configs().join("table1_mimo.toml");
    let o = risar(&["check", "--config", mimo.to_str().unwrap(), "--target-radius", "0.1", "--target-height", "0.3"]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stdout));
    let report: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(report["all_pass"], true);
    let dr = report["resolution_radial_m"].as_f64().unwrap();
    assert!((dr - 0.7248e-3).abs() < 1e-7);

    let dir = tempfile::tempdir().unwrap();
    let cfg = small(dir.path());
    let o = risar(&["check", "--config", &cfg, "--target-radius", "0.1", "--target-height", "0"]);
    assert_eq!(code(&o), 5);
    let report: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(report["all_pass"], false);
}

#[test]
fn pipeline_writes_every_artifact() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = small(dir.path());
    let p = |n: &str| dir.path().join(n).to_str().unwrap().to_string();
    let steps: [&[&str]; 5] = [
        &["simulate", "--config", &cfg, "--out", &p("e.cube"), "--siso", "--no-amplitude"],
        &["reconstruct", "--in", &p("e.cube"), "--config", &cfg, "--out", &p("v.vol"), "--dump-stages", &p("st")],
        &["mip", "--in", &p("v.vol"), "--axis", "y", "--out", &p("v.pgm"), "--db-floor", "-30"],
        &["metrics", "--in", &p("v.vol"), "--config", &cfg, "--out", &p("r.json")],
        &["psf", "--config", &cfg, "--rmax", "0.002", "--samples", "5", "--out", &p("psf.csv")],
    ];
    for s in steps {
        let o = risar(s);
        assert_eq!(code(&o), 0, "{s:?}: {}", String::from_utf8_lossy(&o.stderr));
    }
    for n in ["st/azimuth.spec", "st/polar.spec", "st/cartesian.spec"] {
        assert!(dir.path().join(n).is_file(), "{n}");
    }
    let pgm = std::fs::read(p("v.pgm")).unwrap();
    assert!(pgm.starts_with(b"P5\n16 16\n255\n"));
    let r: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(p("r.json")).unwrap()).unwrap();
    // four captures leave y unresolved; only x and z are localised
    let off = &r["points"][0]["offset_voxels"];
    assert!(off[0].as_f64().unwrap().abs() <= 1.0 && off[2].as_f64().unwrap().abs() <= 1.0, "{off}");
    let csv = std::fs::read_to_string(p("psf.csv")).unwrap();
    assert_eq!(csv.lines().next(), Some("r_m,value"));
    assert_eq!(csv.lines().count(), 6);
}

#[test]
fn mip_of_empty_volume_is_black() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("empty.toml");
    let scene = SMALL.find("[scene]").unwrap();
    let opts = SMALL.find("[options]").unwrap();
    std::fs::write(&cfg, format!("{}{}", &SMALL[..scene], &SMALL[opts..])).unwrap();
    let cfg = cfg.to_str().unwrap();
    let p = |n: &str| dir.path().join(n).to_str().unwrap().to_string();
    assert_eq!(code(&risar(&["simulate", "--config", cfg, "--out", &p("e.cube"), "--siso"])), 0);
    assert_eq!(code(&risar(&["reconstruct", "--in", &p("e.cube"), "--config", cfg, "--out", &p("v.vol")])), 0);
    assert_eq!(code(&risar(&["mip", "--in", &p("v.vol"), "--out", &p("z.pgm")])), 0);
    let pgm = std::fs::read(p("z.pgm")).unwrap();
    let header = b"P5\n16 4\n255\n";
    assert!(pgm.starts_with(header));
    assert!(pgm[header.len()..].iter().all(|&b| b == 0));
}

#[test]
fn thread_env_fallback_is_accepted() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = small(dir.path());
    let o = Command::new(env!("CARGO_BIN_EXE_risar"))
        .env("RISAR_THREADS", "2")
        .args(["check", "--config", &cfg, "--target-radius", "0.005", "--target-height", "0.002"])
        .output()
        .unwrap();
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
}
