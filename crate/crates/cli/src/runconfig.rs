//! Batch runner: a JSON config describes a list of experiments; each produces
//! a JSON report (and CSV grids for scans) under the output directory, plus a
//! manifest that records the config hash, the seed, and per-experiment pass
//! status.  Everything is evaluated sequentially in config order, so a given
//! (config, seed) pair yields byte-identical outputs.

use clap::Args;
use serde::{Deserialize, Serialize};
use std::fs;
use std::path::{Path, PathBuf};

use atwist_core::hankel::{TestFunction, WeightSpec};
use atwist_core::kloosterman::weil_check;
use atwist_core::twistsums::{self, PipelineReport, ScanReport};
use atwist_core::voronoi::{VoronoiInstance, VoronoiReport};

use crate::{config_hash, emit, write_csv, CliError, Report, VoronoiArgs};

#[derive(Args)]
pub struct RunArgs {
    /// Path to the experiment config (JSON).
    #[arg(long)]
    pub config: PathBuf,
    /// Output directory for reports and the manifest.
    #[arg(long, default_value = ".")]
    pub out_dir: PathBuf,
    /// Overrides the seed in the config.
    #[arg(long)]
    pub seed: Option<u64>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RunConfig {
    #[serde(default)]
    seed: u64,
    #[serde(default)]
    experiments: Vec<Experiment>,
}

#[derive(Deserialize)]
struct Experiment {
    name: String,
    #[serde(flatten)]
    kind: ExperimentKind,
}

#[derive(Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
enum ExperimentKind {
    Voronoi {
        rank: usize,
        alpha: i64,
        beta: u64,
        t: f64,
        #[serde(default)]
        rho: f64,
        tol: f64,
        y_cap: f64,
    },
    Scan {
        provider: String,
        t_grid: Vec<f64>,
        #[serde(default = "default_max_den")]
        max_den: u64,
        #[serde(default = "default_irrationals")]
        irrationals: usize,
        slope_min: f64,
        slope_max: f64,
    },
    Weil {
        c_max: u64,
    },
}

fn default_max_den() -> u64 {
    8
}

fn default_irrationals() -> usize {
    42
}

#[derive(Serialize)]
struct Manifest {
    config_sha256: String,
    seed: u64,
    results: Vec<ManifestEntry>,
}

#[derive(Serialize)]
struct ManifestEntry {
    name: String,
    pass: bool,
    report: serde_json::Value,
}

#[derive(Serialize)]
pub struct PipelineSummary {
    pub theta: f64,
    pub t: f64,
    pub alpha: i64,
    pub beta: u64,
    pub delta: f64,
    pub lhs_re: f64,
    pub lhs_im: f64,
    pub rhs_re: f64,
    pub rhs_im: f64,
    pub tail: f64,
    pub rhs_terms: usize,
    pub scaled: f64,
}

impl From<&PipelineReport> for PipelineSummary {
    fn from(r: &PipelineReport) -> Self {
        PipelineSummary {
            theta: r.theta,
            t: r.t,
            alpha: r.alpha,
            beta: r.beta,
            delta: r.delta,
            lhs_re: r.lhs.re,
            lhs_im: r.lhs.im,
            rhs_re: r.rhs.re,
            rhs_im: r.rhs.im,
            tail: r.tail,
            rhs_terms: r.rhs_terms,
            scaled: r.scaled,
        }
    }
}

pub fn run_voronoi(a: &VoronoiArgs) -> Result<VoronoiReport, CliError> {
    let f = TestFunction::new(WeightSpec::new(a.t, 2.0)?, a.rho);
    let inst = VoronoiInstance::new(a.rank, a.alpha, a.beta, f, a.tol, a.y_cap)?;
    Ok(inst.verify_identity()?)
}

#[derive(Serialize)]
pub struct ScanSummary {
    pub provider: String,
    pub n_points: usize,
    pub n_t: usize,
    pub slope: f64,
    pub ci: f64,
    pub per_t_max: Vec<(f64, f64)>,
}

pub fn run_scan(
    provider: &str,
    ts: &[f64],
    max_den: u64,
    irrationals: usize,
    seed: u64,
    csv: Option<&PathBuf>,
) -> Result<ScanSummary, CliError> {
    let p = atwist_core::coeffs::provider_by_name(provider, seed)?;
    let grid = twistsums::theta_grid(max_den, irrationals, seed);
    let rep: ScanReport = twistsums::exponent_scan(p.as_ref(), &grid, ts)?;
    if let Some(path) = csv {
        let rows: Vec<String> = rep
            .rows
            .iter()
            .map(|(t, i, v)| format!("{t:.17e},{i},{:.17e},{:.17e},{:.17e}", v.re, v.im, v.norm()))
            .collect();
        write_csv(path, "t,theta_index,re,im,abs", &rows)?;
    }
    Ok(ScanSummary {
        provider: p.name().to_string(),
        n_points: grid.len(),
        n_t: ts.len(),
        slope: rep.slope,
        ci: rep.ci,
        per_t_max: rep.per_t_max,
    })
}

pub fn cmd_run(a: &RunArgs, out: &Option<PathBuf>) -> Result<bool, CliError> {
    let bytes = fs::read(&a.config)
        .map_err(|e| CliError::Usage(format!("read {:?}: {e}", a.config)))?;
    let cfg: RunConfig = serde_json::from_slice(&bytes)
        .map_err(|e| CliError::Usage(format!("config schema: {e}")))?;
    let seed = a.seed.unwrap_or(cfg.seed);
    fs::create_dir_all(&a.out_dir)
        .map_err(|e| CliError::Usage(format!("create {:?}: {e}", a.out_dir)))?;

    let mut results = Vec::new();
    let mut all_pass = true;
    for exp in &cfg.experiments {
        let (pass, report) = run_experiment(exp, seed, &a.out_dir)?;
        all_pass &= pass;
        results.push(ManifestEntry { name: exp.name.clone(), pass, report });
    }
    let manifest = Manifest {
        config_sha256: config_hash(&bytes),
        seed,
        results,
    };
    let text = serde_json::to_string_pretty(&manifest).expect("manifest serialization");
    let path = a.out_dir.join("manifest.json");
    fs::write(&path, text.as_bytes())
        .map_err(|e| CliError::Usage(format!("write {path:?}: {e}")))?;

    emit(
        out,
        &Report {
            module: "cli",
            operation: "run",
            tolerance: None,
            pass: Some(all_pass),
            data: manifest,
        },
    )?;
    Ok(all_pass)
}

fn run_experiment(
    exp: &Experiment,
    seed: u64,
    out_dir: &Path,
) -> Result<(bool, serde_json::Value), CliError> {
    match &exp.kind {
        ExperimentKind::Voronoi { rank, alpha, beta, t, rho, tol, y_cap } => {
            let args = VoronoiArgs {
                rank: *rank,
                alpha: *alpha,
                beta: *beta,
                t: *t,
                rho: *rho,
                tol: *tol,
                y_cap: *y_cap,
            };
            let rep = run_voronoi(&args)?;
            Ok((rep.pass, serde_json::to_value(&rep).unwrap()))
        }
        ExperimentKind::Scan { provider, t_grid, max_den, irrationals, slope_min, slope_max } => {
            let csv = out_dir.join(format!("{}.csv", exp.name));
            let sum = run_scan(provider, t_grid, *max_den, *irrationals, seed, Some(&csv))?;
            let pass = sum.slope >= *slope_min && sum.slope <= *slope_max;
            Ok((pass, serde_json::to_value(&sum).unwrap()))
        }
        ExperimentKind::Weil { c_max } => {
            let rep = weil_check(*c_max)?;
            Ok((rep.violations == 0, serde_json::to_value(&rep).unwrap()))
        }
    }
}
