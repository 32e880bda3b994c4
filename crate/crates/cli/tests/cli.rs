use std::f64::consts::PI;
use std::path::Path;
use std::process::{Command as Process, Output};

use serde_json::Value;
use steklov_cli::{parse_args, run, Command, DEFAULT_QUAD_TOL};
use steklov_core::WeightDescriptor;

fn steklov(args: &[&str]) -> Output {
    Process::new(env!("CARGO_BIN_EXE_steklov"))
        .args(args)
        .env("STEKLOV_THREADS", "2")
        .output()
        .expect("binary runs")
}

fn json_of(bytes: &[u8]) -> Value {
    serde_json::from_slice(bytes).expect("valid JSON")
}

#[test]
fn parses_spectrum_invocation() {
    let c = parse_args(["steklov", "spectrum", "--weight", "cardioid", "--modes", "512", "--out", "e.csv"]).unwrap();
    assert_eq!(c.command, Command::Spectrum);
    assert_eq!(c.weight, Some(WeightDescriptor::Cardioid));
    assert_eq!(c.modes, 512);
    assert_eq!(c.quad_tol, DEFAULT_QUAD_TOL);
    assert_eq!(c.out.as_deref(), Some(Path::new("e.csv")));
}

#[test]
fn parses_weyl_and_orlicz_invocations() {
    let c = parse_args(["steklov", "weyl", "--weight", "ngon:4", "--modes", "256"]).unwrap();
    assert_eq!(c.command, Command::Weyl);
    assert_eq!(c.weight, Some(WeightDescriptor::RegularPolygon(4)));
    assert_eq!(c.modes, 256);

    let c = parse_args(["steklov", "orlicz-norm", "--weight", "cusp:0.5", "--a", "1", "--caps", "1e2,1e4"]).unwrap();
    assert_eq!(c.command, Command::OrliczNorm);
    assert_eq!(c.weight, Some(WeightDescriptor::slow_cusp(0.5, 1.0, 1.0).unwrap()));
    assert_eq!(c.a, 1.0);
    assert_eq!(c.caps, vec![1e2, 1e4]);
}

#[test]
fn unknown_descriptor_is_a_usage_error_with_grammar() {
    let err = parse_args(["steklov", "weyl", "--weight", "hexagon"]).unwrap_err();
    assert_eq!(err.exit_code, 2);
    let out = steklov(&["weyl", "--weight", "hexagon"]);
    assert_eq!(out.status.code(), Some(2));
    let stderr = String::from_utf8_lossy(&out.stderr);
    assert!(stderr.contains("ngon:"), "{stderr}");
    assert!(stderr.contains("cardioid"), "{stderr}");
}

#[test]
fn disk_spectrum_csv_rows() {
    let c = parse_args(["steklov", "spectrum", "--weight", "constant:1", "--modes", "8"]).unwrap();
    let (mut out, mut err) = (Vec::new(), Vec::new());
    assert_eq!(run(&c, &mut out, &mut err), 0);
    let text = String::from_utf8(out).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(&lines[..4], &["k,sigma,trusted", "0,0,true", "1,1,true", "2,1,true"]);
    assert_eq!(lines.len(), 1 + 17);
    assert_eq!(lines[17], "16,8,true");
}

#[test]
fn cardioid_weyl_report_targets_sixteen_over_pi() {
    let dir = tempfile::tempdir().unwrap();
    let report = dir.path().join("weyl.json");
    let plot = dir.path().join("n.svg");
    let out = steklov(&[
        "weyl",
        "--weight",
        "cardioid",
        "--modes",
        "64",
        "--report",
        report.to_str().unwrap(),
        "--plot",
        plot.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let v = json_of(&std::fs::read(&report).unwrap());
    let target = v["target"].as_f64().unwrap();
    assert!((target - 16.0 / PI).abs() < 1e-9, "{target}");
    assert!((v["perimeter"].as_f64().unwrap() - 16.0).abs() < 1e-9);
    for key in ["slope", "rel_error", "window", "trusted_count", "schema_version"] {
        assert!(v.get(key).is_some(), "missing {key}");
    }
    assert!(std::fs::read_to_string(&plot).unwrap().starts_with("<svg"));
}

#[test]
fn fast_cusp_weyl_is_refused() {
    let out = steklov(&["weyl", "--weight", "fastcusp:2", "--modes", "32"]);
    assert_eq!(out.status.code(), Some(1));
    let v = json_of(&out.stderr);
    assert_eq!(v["code"], "DIVERGENT_WEIGHT");
    assert!(v["message"].as_str().is_some());
}

#[test]
fn orlicz_scan_json() {
    let out = steklov(&["orlicz-norm", "--weight", "cusp:0.5", "--a", "1", "--caps", "1e2,1e4,1e6,1e8"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json_of(&out.stdout);
    assert_eq!(v["verdict"], "CONVERGENT");
    assert_eq!(v["caps"].as_array().unwrap().len(), 4);
    assert_eq!(v["norms"].as_array().unwrap().len(), 4);

    let out = steklov(&["orlicz-norm", "--weight", "fastcusp:2"]);
    assert_eq!(json_of(&out.stdout)["verdict"], "DIVERGENT");
}

#[test]
fn spectrum_output_is_byte_identical_across_runs_and_threads() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a.csv");
    let b = dir.path().join("b.csv");
    let args = |p: &Path| vec!["spectrum".to_string(), "--weight".into(), "ngon:5".into(), "--modes".into(), "48".into(), "--out".into(), p.to_str().unwrap().into()];
    assert!(steklov(&args(&a).iter().map(String::as_str).collect::<Vec<_>>()).status.success());
    let single = Process::new(env!("CARGO_BIN_EXE_steklov"))
        .args(args(&b))
        .env("STEKLOV_THREADS", "1")
        .output()
        .unwrap();
    assert!(single.status.success());
    assert_eq!(std::fs::read(&a).unwrap(), std::fs::read(&b).unwrap());
}

#[test]
fn failed_run_leaves_no_file_behind() {
    let dir = tempfile::tempdir().unwrap();
    let out_path = dir.path().join("s.csv");
    // Sign-changing weight: the definite solver refuses it.
    let out = steklov(&["spectrum", "--weight", "cos:1,2", "--modes", "8", "--out", out_path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    assert!(json_of(&out.stderr)["code"].as_str().is_some());
    assert_eq!(std::fs::read_dir(dir.path()).unwrap().count(), 0);
}

#[test]
fn rewrite_replaces_existing_file_whole() {
    let dir = tempfile::tempdir().unwrap();
    let out_path = dir.path().join("s.csv");
    std::fs::write(&out_path, "stale contents that are longer than the new file ".repeat(100)).unwrap();
    let out = steklov(&["spectrum", "--weight", "constant:1", "--modes", "2", "--out", out_path.to_str().unwrap()]);
    assert!(out.status.success());
    assert_eq!(
        std::fs::read_to_string(&out_path).unwrap(),
        "k,sigma,trusted\n0,0,true\n1,1,true\n2,1,true\n3,2,true\n4,2,true\n"
    );
    assert_eq!(std::fs::read_dir(dir.path()).unwrap().count(), 1);
}

#[test]
fn indefinite_reports_both_sides() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("signed.csv");
    let out = steklov(&["indefinite", "--weight", "cos:1,2", "--modes", "256", "--out", csv.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let v = json_of(&out.stdout);
    let pos = v["positive"]["slope"].as_f64().unwrap();
    let neg = v["negative"]["slope"].as_f64().unwrap();
    let target_pos = (4.0 * PI / 3.0 + 2.0 * 3f64.sqrt()) / PI;
    let target_neg = (2.0 * 3f64.sqrt() - 2.0 * PI / 3.0) / PI;
    assert!((pos - target_pos).abs() < 0.05 * target_pos, "{pos}");
    assert!((neg - target_neg).abs() < 0.1 * target_neg, "{neg}");
    let text = std::fs::read_to_string(&csv).unwrap();
    assert!(text.lines().any(|l| l.starts_with("-1,-")), "negative rows indexed from -1");
}

#[test]
fn domains_lists_catalog() {
    let out = steklov(&["domains"]);
    assert!(out.status.success());
    let text = String::from_utf8_lossy(&out.stdout);
    for name in ["cardioid", "ngon", "cusp", "fastcusp", "mobius"] {
        assert!(text.contains(name), "missing {name}");
    }
}
