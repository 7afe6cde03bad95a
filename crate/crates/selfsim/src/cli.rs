//! Command-line front end: argument and config-file resolution, output files and run manifests.

use crate::core_model::config::{BoundaryData, ModelConfig};
use crate::core_model::io::{write_field_csv, write_profile_csv};
use crate::core_model::norm::zk_norm;
use crate::error::{Error, Result};
use crate::fixedpoint::{invert_boundary_with, solve_from, FixedPointState, IterLog, Setup};
use crate::oscquad::QuadPanelConfig;
use crate::painleve::{envelope_fit, integrate_profile, ode_residual, rho_of_kappa, theta_candidate, PainleveConfig};
use crate::transform::{cross_validate_prop7, FIT_WINDOW};
use crate::verify::{self, Which};
use clap::{Args, Parser, Subcommand};
use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};
use sha2::{Digest, Sha256};
use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::time::Instant;

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_NONCONVERGENCE: i32 = 2;
pub const WORKERS_ENV: &str = "SELFSIM_WORKERS";

#[derive(Debug, Parser)]
#[command(name = "selfsim", version, about = "Self-similar mKdV profiles: Fourier fixed point and Painleve II side")]
pub struct Cli {
    /// Key-value config file (`key = value`, same keys as the flags); flags win.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Output directory.
    #[arg(long, global = true, default_value = ".")]
    pub out: PathBuf,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args, Default, Clone)]
pub struct ModelArgs {
    #[arg(long)]
    pub xi_max: Option<f64>,
    /// Total node count, split 1:3 between `[0, 2]` and `[2, xi_max]`.
    #[arg(long)]
    pub grid_points: Option<usize>,
    #[arg(long)]
    pub tol: Option<f64>,
    #[arg(long)]
    pub smallness: Option<f64>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Fixed point for a given A.
    #[command(allow_negative_numbers = true)]
    Spectrum {
        #[arg(long)]
        a_re: Option<f64>,
        #[arg(long)]
        a_im: Option<f64>,
        #[arg(long)]
        eps: Option<f64>,
        #[command(flatten)]
        model: ModelArgs,
    },
    /// Recover A from (c, alpha), then as `spectrum`.
    #[command(allow_negative_numbers = true)]
    Invert {
        #[arg(long)]
        c: Option<f64>,
        #[arg(long)]
        alpha: Option<f64>,
        #[arg(long)]
        eps: Option<f64>,
        #[command(flatten)]
        model: ModelArgs,
    },
    /// Painleve II profile and envelope fit.
    #[command(allow_negative_numbers = true)]
    Painleve {
        #[arg(long)]
        kappa: Option<f64>,
        #[arg(long)]
        y_end: Option<f64>,
        #[arg(long)]
        rk_tol: Option<f64>,
    },
    Verify {
        #[command(subcommand)]
        what: VerifyCommand,
    },
}

#[derive(Debug, Subcommand)]
pub enum VerifyCommand {
    /// ODE profile vs Fourier fixed point.
    #[command(allow_negative_numbers = true)]
    Prop7 {
        #[arg(long)]
        kappa: Option<f64>,
        #[command(flatten)]
        model: ModelArgs,
    },
    /// Brute-vs-asymptotic sweeps (all when `--which` is absent).
    Asymptotics {
        #[arg(long)]
        which: Option<Which>,
        #[arg(long)]
        tol: Option<f64>,
    },
}

/// Parsed `key = value` lines; `#` starts a comment.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct ConfigFile(pub BTreeMap<String, String>);

impl ConfigFile {
    pub fn parse(text: &str) -> Result<ConfigFile> {
        let mut m = BTreeMap::new();
        for (n, line) in text.lines().enumerate() {
            let line = line.split('#').next().unwrap().trim();
            if line.is_empty() {
                continue;
            }
            let (k, v) = line.split_once('=').ok_or_else(|| Error::Parse(format!("config line {}: expected key = value", n + 1)))?;
            m.insert(k.trim().replace('_', "-"), v.trim().to_string());
        }
        Ok(ConfigFile(m))
    }

    fn get<T: std::str::FromStr>(&self, key: &str) -> Result<Option<T>> {
        match self.0.get(key) {
            None => Ok(None),
            Some(v) => v.parse().map(Some).map_err(|_| Error::Parse(format!("config key {key}: cannot parse '{v}'"))),
        }
    }

    /// Flag value, else file value, else `None`.
    fn pick<T: std::str::FromStr>(&self, flag: Option<T>, key: &str) -> Result<Option<T>> {
        match flag {
            Some(v) => Ok(Some(v)),
            None => self.get(key),
        }
    }

    fn need<T: std::str::FromStr>(&self, flag: Option<T>, key: &str) -> Result<T> {
        self.pick(flag, key)?.ok_or_else(|| Error::InvalidConfig(format!("missing --{key}")))
    }
}

fn model_config(m: &ModelArgs, file: &ConfigFile, eps: Option<f64>) -> Result<ModelConfig> {
    let mut c = ModelConfig::default();
    if let Some(e) = eps {
        c.epsilon = e;
    }
    if let Some(x) = file.pick(m.xi_max, "xi-max")? {
        c.xi_max = x;
    }
    if let Some(n) = file.pick(m.grid_points, "grid-points")? {
        if n < 64 {
            return Err(Error::InvalidConfig(format!("grid-points must be >= 64, got {n}")));
        }
        c.n_low = n / 4;
        c.n_high = n - n / 4;
    }
    if let Some(t) = file.pick(m.tol, "tol")? {
        c.tol_fixed_point = t;
        c.tol_quad = t;
    }
    if let Some(s) = file.pick(m.smallness, "smallness")? {
        c.smallness = s;
    }
    c.validate()?;
    Ok(c)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OutputEntry {
    pub path: String,
    pub sha256: String,
    pub bytes: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub command: String,
    pub config: Value,
    pub inputs: BTreeMap<String, String>,
    pub outputs: Vec<OutputEntry>,
    pub wall_time_s: f64,
    pub versions: BTreeMap<String, String>,
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    Sha256::digest(bytes).iter().map(|b| format!("{b:02x}")).collect()
}

struct Outputs {
    dir: PathBuf,
    files: Vec<PathBuf>,
}

impl Outputs {
    fn path(&mut self, name: &str) -> PathBuf {
        let p = self.dir.join(name);
        self.files.push(p.clone());
        p
    }

    fn json(&mut self, name: &str, v: &impl Serialize) -> Result<()> {
        let p = self.path(name);
        std::fs::write(&p, serde_json::to_string_pretty(v)? + "\n")?;
        Ok(())
    }
}

fn manifest(command: &str, config: Value, inputs: BTreeMap<String, String>, out: &Outputs, t0: Instant) -> Result<RunManifest> {
    let mut outputs = Vec::new();
    for f in &out.files {
        let b = std::fs::read(f)?;
        outputs.push(OutputEntry {
            path: f.file_name().unwrap().to_string_lossy().into_owned(),
            sha256: sha256_hex(&b),
            bytes: b.len() as u64,
        });
    }
    let mut versions = BTreeMap::new();
    versions.insert("selfsim".to_string(), env!("CARGO_PKG_VERSION").to_string());
    versions.insert("manifest".to_string(), "1".to_string());
    Ok(RunManifest { command: command.into(), config, inputs, outputs, wall_time_s: t0.elapsed().as_secs_f64(), versions })
}

fn write_iterations(path: &Path, log: &[IterLog]) -> Result<()> {
    let mut w = csv::Writer::from_path(path)?;
    w.write_record(["iteration", "residual", "ratio", "c", "alpha"])?;
    for l in log {
        w.write_record([l.iteration.to_string(), l.residual.to_string(), l.ratio.to_string(), l.c.to_string(), l.alpha.to_string()])?;
    }
    w.flush()?;
    Ok(())
}

#[allow(non_snake_case)]
fn spectrum_outputs(A: C64, setup: &Setup, out: &mut Outputs) -> Result<FixedPointState> {
    let mut log = Vec::new();
    let st = solve_from(A, setup, None, Some(&mut log))?;
    write_field_csv(&out.path("field.csv"), &st.z)?;
    write_iterations(&out.path("iterations.csv"), &log)?;
    let norm = zk_norm(&st.z, &setup.config, Some(st.boundary()))?;
    out.json(
        "spectrum.json",
        &json!({
            "A": [A.re, A.im],
            "epsilon": setup.config.epsilon,
            "c": st.c,
            "alpha": st.alpha,
            "calI": [st.calI.re, st.calI.im],
            "a": st.params.a,
            "B": [st.params.B.re, st.params.B.im],
            "iterations": st.iteration,
            "contraction_ratio": st.contraction_ratio,
            "residual_history": st.residual_history,
            "zk_norm": norm.zk_norm,
        }),
    )?;
    Ok(st)
}

/// Runs one parsed command; returns the manifest of what was written.
pub fn execute(cli: &Cli) -> Result<RunManifest> {
    let t0 = Instant::now();
    let mut inputs = BTreeMap::new();
    let file = match &cli.config {
        Some(p) => {
            let text = std::fs::read_to_string(p)?;
            inputs.insert(p.to_string_lossy().into_owned(), sha256_hex(text.as_bytes()));
            ConfigFile::parse(&text)?
        }
        None => ConfigFile::default(),
    };
    std::fs::create_dir_all(&cli.out)?;
    let mut out = Outputs { dir: cli.out.clone(), files: Vec::new() };
    let (name, config) = match &cli.command {
        Command::Spectrum { a_re, a_im, eps, model } => {
            let a = C64::new(file.need(*a_re, "a-re")?, file.need(*a_im, "a-im")?);
            let cfg = model_config(model, &file, Some(file.need(*eps, "eps")?))?;
            let setup = Setup::new(cfg)?;
            spectrum_outputs(a, &setup, &mut out)?;
            ("spectrum", json!({"a_re": a.re, "a_im": a.im, "model": cfg}))
        }
        Command::Invert { c, alpha, eps, model } => {
            let b = BoundaryData { c: file.need(*c, "c")?, alpha: file.need(*alpha, "alpha")? };
            let cfg = model_config(model, &file, Some(file.need(*eps, "eps")?))?;
            let setup = Setup::new(cfg)?;
            let a = invert_boundary_with(b, &setup)?;
            spectrum_outputs(a, &setup, &mut out)?;
            out.json("invert.json", &json!({"target": b, "A": [a.re, a.im]}))?;
            ("invert", json!({"c": b.c, "alpha": b.alpha, "model": cfg}))
        }
        Command::Painleve { kappa, y_end, rk_tol } => {
            let mut p = PainleveConfig::with_kappa(file.need(*kappa, "kappa")?);
            if let Some(y) = file.pick(*y_end, "y-end")? {
                p.y_end = y;
            }
            if let Some(t) = file.pick(*rk_tol, "rk-tol")? {
                p.rk_tol = t;
            }
            let prof = integrate_profile(&p)?;
            write_profile_csv(&out.path("profile.csv"), &prof.ys, &prof.vs, &prof.dvs)?;
            let fit = if p.kappa == 0.0 { None } else { Some(envelope_fit(&prof, FIT_WINDOW)?) };
            let res = ode_residual(&prof, p.epsilon, p.alpha).into_iter().fold(0.0, f64::max);
            out.json(
                "envelope.json",
                &json!({
                    "kappa": p.kappa,
                    "fit": fit,
                    "rho_formula": rho_of_kappa(p.kappa)?,
                    "theta_candidate": theta_candidate(p.kappa).ok(),
                    "ode_residual_max": res,
                }),
            )?;
            ("painleve", serde_json::to_value(p)?)
        }
        Command::Verify { what: VerifyCommand::Prop7 { kappa, model } } => {
            let k = file.need(*kappa, "kappa")?;
            let cfg = model_config(model, &file, Some(-1.0))?;
            let r = cross_validate_prop7(k, &cfg)?;
            out.json("prop7.json", &r)?;
            ("verify prop7", json!({"kappa": k, "model": cfg}))
        }
        Command::Verify { what: VerifyCommand::Asymptotics { which, tol } } => {
            let w: Option<Which> = file.pick(*which, "which")?;
            let tol = file.pick(*tol, "tol")?.unwrap_or(1e-10);
            let cfg = QuadPanelConfig::for_xi_max(tol, 40.0);
            let gamma = ModelConfig::default().gamma;
            let list: Vec<Which> = w.map_or(Which::ALL.to_vec(), |w| vec![w]);
            let mut summary = BTreeMap::new();
            for w in list {
                for s in verify::run(w, &cfg, gamma)? {
                    let p = out.path(&format!("asymptotics_{}.csv", s.name));
                    let mut wr = csv::Writer::from_path(&p)?;
                    wr.write_record(["x", "brute_re", "brute_im", "model_re", "model_im", "diff", "scaled"])?;
                    for r in &s.rows {
                        wr.write_record(
                            [r.x, r.brute.re, r.brute.im, r.model.re, r.model.im, r.diff, r.scaled].map(|v| v.to_string()),
                        )?;
                    }
                    wr.flush()?;
                    summary.insert(s.name.clone(), json!({"slope": s.slope}));
                }
            }
            out.json("asymptotics.json", &summary)?;
            ("verify asymptotics", json!({"which": w.map(|w| w.name()), "tol": tol}))
        }
    };
    let m = manifest(name, config, inputs, &out, t0)?;
    std::fs::write(cli.out.join("manifest.json"), serde_json::to_string_pretty(&m)? + "\n")?;
    Ok(m)
}

/// Worker pool size from the environment, if set.
pub fn init_workers() -> Result<()> {
    if let Ok(v) = std::env::var(WORKERS_ENV) {
        let n: usize = v.trim().parse().map_err(|_| Error::InvalidConfig(format!("{WORKERS_ENV} must be a positive integer, got '{v}'")))?;
        if n == 0 {
            return Err(Error::InvalidConfig(format!("{WORKERS_ENV} must be positive")));
        }
        // a second initialization (e.g. in tests) keeps the existing pool
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    }
    Ok(())
}

/// Parse, run, and map the outcome to an exit status.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let _ = e.print();
            return code;
        }
    };
    if let Err(e) = init_workers() {
        eprintln!("error: {e}");
        return EXIT_USAGE;
    }
    match execute(&cli) {
        Ok(_) => EXIT_OK,
        Err(e) if e.is_non_convergence() => {
            eprintln!("non-convergence: {e}");
            EXIT_NONCONVERGENCE
        }
        Err(e) => {
            eprintln!("error: {e}");
            EXIT_USAGE
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn config_file_parsing() {
        let c = ConfigFile::parse("# run\nxi_max = 20\ngrid-points=40 # nodes\n\neps = -1\n").unwrap();
        assert_eq!(c.get::<f64>("xi-max").unwrap(), Some(20.0));
        assert_eq!(c.get::<usize>("grid-points").unwrap(), Some(40));
        assert_eq!(c.pick(Some(-1.0), "eps").unwrap(), Some(-1.0));
        assert!(ConfigFile::parse("nonsense").is_err());
        assert!(c.need::<f64>(None, "kappa").is_err());
    }

    #[test]
    fn flags_override_file() {
        let f = ConfigFile::parse("xi-max = 20\ntol = 1e-8").unwrap();
        let m = ModelArgs { xi_max: Some(12.0), ..Default::default() };
        let c = model_config(&m, &f, Some(1.0)).unwrap();
        assert_eq!(c.xi_max, 12.0);
        assert_eq!(c.tol_fixed_point, 1e-8);
        assert_eq!(c.epsilon, 1.0);
    }

    #[test]
    fn negative_flags_parse() {
        let c = Cli::try_parse_from(["selfsim", "spectrum", "--a-re", "0.1", "--a-im", "-0.2", "--eps", "-1"]).unwrap();
        match c.command {
            Command::Spectrum { a_im, eps, .. } => assert_eq!((a_im, eps), (Some(-0.2), Some(-1.0))),
            _ => panic!(),
        }
    }

    #[test]
    fn usage_errors_exit_one() {
        assert_eq!(run(["selfsim", "frobnicate"]), EXIT_USAGE);
        assert_eq!(run(["selfsim", "painleve", "--kappa", "abc"]), EXIT_USAGE);
    }

    #[test]
    fn hex_digest() {
        assert_eq!(sha256_hex(b"abc"), "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
    }
}
