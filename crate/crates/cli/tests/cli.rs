use std::f64::consts::PI;
use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn weldlab(args: &[&str], out_dir: Option<&Path>) -> Output {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_weldlab"));
    cmd.args(args).env_remove("WELDLAB_OUT_DIR");
    if let Some(d) = out_dir {
        cmd.env("WELDLAB_OUT_DIR", d);
    }
    cmd.output().expect("binary runs")
}

/// Σ log(1 - c^{2k}): the Joukowski exterior block is diagonal with entries c^k.
fn ellipse_s2(c: f64) -> f64 {
    (1..200).map(|k| (1.0 - c.powi(2 * k)).ln()).sum()
}

fn json_stdout(o: &Output) -> Value {
    serde_json::from_slice(&o.stdout).expect("stdout is JSON")
}

#[test]
fn classical_action_at_the_basepoint_is_16_pi() {
    let o = weldlab(&["scl", "--s2", "0", "--genus", "2"], None);
    assert_eq!(o.status.code(), Some(0));
    let v = json_stdout(&o);
    assert!((v["result"]["s_cl"].as_f64().unwrap() - 16.0 * PI).abs() < 1e-12);
    assert_eq!(v["result"]["is_fuchsian_point"], Value::Bool(true));
    assert_eq!(v["conventions"]["s2_dg"], "S2_dg = -S2_univ >= 0");
}

#[test]
fn identity_log_determinant_is_zero() {
    let o = weldlab(&["logdet", "--family", "identity", "--N", "16"], None);
    assert_eq!(o.status.code(), Some(0));
    let v = json_stdout(&o);
    assert_eq!(v["result"]["s2_univ"].as_f64(), Some(0.0));
    assert_eq!(v["result"]["s2_dg"].as_f64(), Some(0.0));
}

#[test]
fn exit_codes_distinguish_failures() {
    assert_eq!(weldlab(&["pair", "--family", "torus"], None).status.code(), Some(2));
    assert_eq!(weldlab(&["pair", "--family", "ellipse", "--c", "1.5"], None).status.code(), Some(2));
    assert_eq!(weldlab(&["scl"], None).status.code(), Some(2));
    assert_eq!(weldlab(&["scl", "--s2", "-1"], None).status.code(), Some(2));
    assert_eq!(weldlab(&["frobnicate"], None).status.code(), Some(2));
    let usage = weldlab(&["pair", "--family", "torus"], None);
    assert!(String::from_utf8_lossy(&usage.stderr).contains("Usage"));
    // A tolerance no computation can meet fails the check.
    let o = weldlab(&["identity", "--family", "ellipse", "--c", "0.3", "--N", "32", "--grid", "64x128", "--tol", "1e-300"], None);
    assert_eq!(o.status.code(), Some(1));
    assert_eq!(json_stdout(&o)["checks"][0]["passed"], Value::Bool(false));
}

#[test]
fn config_file_is_overridden_by_flags() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.cfg");
    std::fs::write(&cfg, "# ellipse run\ncommand = logdet\nfamily = ellipse\nc = 0.9\nN = 16,32\n").unwrap();
    let o = weldlab(&["--config", cfg.to_str().unwrap(), "--c", "0.2"], None);
    assert_eq!(o.status.code(), Some(0));
    let v = json_stdout(&o);
    assert_eq!(v["config"]["c"].as_f64(), Some(0.2));
    assert_eq!(v["result"]["report"]["orders"], serde_json::json!([16, 32]));
    let s2 = v["result"]["s2_univ"].as_f64().unwrap();
    // interior route at N = 32 carries a truncation error of a few 1e-9
    assert!((s2 - ellipse_s2(0.2)).abs() < 1e-7, "{s2}");

    std::fs::write(&cfg, "command = logdet\nflavour = sweet\n").unwrap();
    assert_eq!(weldlab(&["--config", cfg.to_str().unwrap()], None).status.code(), Some(2));
}

#[test]
fn output_directory_and_determinism() {
    let dir = tempfile::tempdir().unwrap();
    let args = ["pair", "--family", "fourier_bump", "--eps", "0.05", "--k", "2"];
    let o = weldlab(&args, Some(dir.path()));
    assert_eq!(o.status.code(), Some(0));
    assert!(o.stdout.is_empty());
    let first = std::fs::read(dir.path().join("pair.json")).unwrap();
    weldlab(&args, Some(dir.path()));
    assert_eq!(first, std::fs::read(dir.path().join("pair.json")).unwrap());

    let explicit = dir.path().join("nested/coeffs.csv");
    let mut with_out = args.to_vec();
    with_out.extend(["--format", "csv", "--out", explicit.to_str().unwrap()]);
    assert_eq!(weldlab(&with_out, Some(dir.path())).status.code(), Some(0));
    let csv = std::fs::read_to_string(explicit).unwrap();
    assert!(csv.starts_with("k,f_re,f_im,g_re,g_im\n"));
    assert!(!dir.path().join("pair.csv").exists());
}

#[test]
fn sweep_writes_one_row_per_value() {
    let o = weldlab(
        &["sweep", "--family", "ellipse", "--range", "0.1:0.2:0.05", "--N", "32", "--grid", "64x128", "--format", "csv"],
        None,
    );
    assert_eq!(o.status.code(), Some(0));
    let text = String::from_utf8(o.stdout).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines.len(), 4);
    let header: Vec<&str> = lines[0].split(',').collect();
    let (ip, is2) = (header.iter().position(|h| *h == "param").unwrap(), header.iter().position(|h| *h == "s2_univ").unwrap());
    for row in &lines[1..] {
        let cells: Vec<&str> = row.split(',').collect();
        assert_eq!(cells.len(), header.len());
        let c: f64 = cells[ip].parse().unwrap();
        let s2: f64 = cells[is2].parse().unwrap();
        assert!((s2 - ellipse_s2(c)).abs() < 1e-8, "{c}: {s2}");
    }
}

#[test]
fn group_export_lists_the_generators() {
    let o = weldlab(&["fuchsian", "--L", "1"], None);
    assert_eq!(o.status.code(), Some(0));
    let v = json_stdout(&o);
    assert_eq!(v["result"]["element_count"].as_u64(), Some(9));
    assert_eq!(v["result"]["generators"].as_array().unwrap().len(), 8);
    assert_eq!(v["result"]["relation_word"].as_array().unwrap().len(), 8);
    assert_eq!(weldlab(&["fuchsian", "--L", "9"], None).status.code(), Some(2));
}
