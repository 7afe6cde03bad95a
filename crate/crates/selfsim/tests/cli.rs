use num_complex::Complex64 as C64;
use selfsim::cli::{sha256_hex, RunManifest};
use selfsim::core_model::config::ModelConfig;
use serde_json::Value;
use std::f64::consts::PI;
use std::path::Path;
use std::process::Command;

fn selfsim(out: &Path, args: &[&str]) -> i32 {
    Command::new(env!("CARGO_BIN_EXE_selfsim"))
        .arg("--out")
        .arg(out)
        .args(args)
        .env("SELFSIM_WORKERS", "1")
        .status()
        .unwrap()
        .code()
        .unwrap()
}

fn json(p: &Path) -> Value {
    serde_json::from_str(&std::fs::read_to_string(p).unwrap()).unwrap()
}

const SMALL: [&str; 4] = ["--grid-points", "80", "--xi-max", "12"];

#[test]
fn painleve_zero_kappa_writes_zero_profile() {
    let d = tempfile::tempdir().unwrap();
    assert_eq!(selfsim(d.path(), &["painleve", "--kappa", "0"]), 0);
    let mut r = csv::Reader::from_path(d.path().join("profile.csv")).unwrap();
    let mut rows = 0;
    for rec in r.records() {
        let rec = rec.unwrap();
        assert_eq!(rec[1].parse::<f64>().unwrap(), 0.0);
        assert_eq!(rec[2].parse::<f64>().unwrap(), 0.0);
        rows += 1;
    }
    assert!(rows > 100);
    assert!(json(&d.path().join("envelope.json"))["fit"].is_null());
}

#[test]
fn invert_zero_data_gives_zero_amplitude() {
    let d = tempfile::tempdir().unwrap();
    let mut args = vec!["invert", "--c", "0", "--alpha", "0", "--eps", "1"];
    args.extend(SMALL);
    assert_eq!(selfsim(d.path(), &args), 0);
    let v = json(&d.path().join("invert.json"));
    assert!(v["A"][0].as_f64().unwrap().abs() < 1e-12);
    assert!(v["A"][1].as_f64().unwrap().abs() < 1e-12);
}

#[test]
fn spectrum_first_row_and_manifest() {
    let d = tempfile::tempdir().unwrap();
    let mut args = vec!["spectrum", "--a-re", "0.1", "--a-im", "0", "--eps", "-1"];
    args.extend(SMALL);
    assert_eq!(selfsim(d.path(), &args), 0);
    let s = json(&d.path().join("spectrum.json"));
    let (c, alpha) = (s["c"].as_f64().unwrap(), s["alpha"].as_f64().unwrap());
    let mut r = csv::Reader::from_path(d.path().join("field.csv")).unwrap();
    let first = r.records().next().unwrap().unwrap();
    let xi: f64 = first[0].parse().unwrap();
    let z0 = C64::new(first[1].parse().unwrap(), first[2].parse().unwrap());
    assert_eq!(xi, 0.0);
    assert!((z0 - C64::new(c, 3.0 * alpha / (2.0 * PI))).norm() < 1e-12, "{z0} {c} {alpha}");

    let m: RunManifest = serde_json::from_value(json(&d.path().join("manifest.json"))).unwrap();
    assert_eq!(m.command, "spectrum");
    let names: Vec<&str> = m.outputs.iter().map(|o| o.path.as_str()).collect();
    assert_eq!(names, ["field.csv", "iterations.csv", "spectrum.json"]);
    for o in &m.outputs {
        let b = std::fs::read(d.path().join(&o.path)).unwrap();
        assert_eq!(o.sha256, sha256_hex(&b));
        assert_eq!(o.bytes, b.len() as u64);
    }

    // the recorded config, fed back as a config file, reproduces the run
    let cfg: ModelConfig = serde_json::from_value(m.config["model"].clone()).unwrap();
    let text = format!(
        "a_re = {}\na_im = {}\neps = {}\nxi_max = {}\ngrid_points = {}\ntol = {}\nsmallness = {}\n",
        m.config["a_re"],
        m.config["a_im"],
        cfg.epsilon,
        cfg.xi_max,
        cfg.n_low + cfg.n_high,
        cfg.tol_quad,
        cfg.smallness
    );
    let e = tempfile::tempdir().unwrap();
    let f = e.path().join("run.conf");
    std::fs::write(&f, text).unwrap();
    assert_eq!(selfsim(e.path(), &["--config", f.to_str().unwrap(), "spectrum"]), 0);
    let m2: RunManifest = serde_json::from_value(json(&e.path().join("manifest.json"))).unwrap();
    assert_eq!(m2.config, m.config);
    assert_eq!(std::fs::read(e.path().join("field.csv")).unwrap(), std::fs::read(d.path().join("field.csv")).unwrap());
    assert_eq!(m2.inputs.len(), 1);
}

#[test]
fn usage_errors() {
    let d = tempfile::tempdir().unwrap();
    assert_eq!(selfsim(d.path(), &["spectrum", "--a-re", "0.1"]), 1);
    assert_eq!(selfsim(d.path(), &["spectrum", "--a-re", "0.1", "--a-im", "0", "--eps", "2"]), 1);
    assert_eq!(selfsim(d.path(), &["painleve", "--kappa", "2"]), 1);
    assert_eq!(selfsim(d.path(), &["verify", "asymptotics", "--which", "Q"]), 1);
    assert_eq!(selfsim(d.path(), &["--help"]), 0);
}

#[test]
fn single_sweep_writes_table() {
    let d = tempfile::tempdir().unwrap();
    assert_eq!(selfsim(d.path(), &["verify", "asymptotics", "--which", "fresnel"]), 0);
    let s = json(&d.path().join("asymptotics.json"));
    assert!(s.get("fresnel").is_some());
    assert!(d.path().join("asymptotics_fresnel.csv").exists());
}
