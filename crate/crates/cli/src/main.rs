//! `atwist`: command-line driver for the number-field twisted-sum experiments.
//!
//! Every subcommand prints one JSON report to stdout; grid-shaped results go
//! to CSV via `--csv`.  Exit codes: 0 all checks pass, 1 a numeric check
//! failed, 2 usage or configuration error.

use clap::{Args, Parser, Subcommand};
use num_complex::Complex64;
use serde::Serialize;
use sha2::{Digest, Sha256};
use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use atwist_core::bessel::{delta_form_params, sym2_delta_params, KernelOpts, RealBesselKernel};
use atwist_core::coeffs::{provider_by_name, rankin_average};
use atwist_core::hankel::{decay_scan, HankelReal, TestFunction, WeightSpec};
use atwist_core::kloosterman::{kloosterman_rational, weil_check};
use atwist_core::numberfield::NumberField;
use atwist_core::twistsums;

mod runconfig;

#[derive(Parser)]
#[command(name = "atwist", version, about = "twisted coefficient sum experiments")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
    /// Also write the JSON report to this path.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Cmd {
    /// Number field inspection and Diophantine approximation.
    Nf(NfArgs),
    /// Coefficient tables and averages.
    Coeffs(CoeffsArgs),
    /// Bessel kernel values on a grid.
    Bessel(BesselArgs),
    /// Hankel transform decay scan.
    Hankel(HankelArgs),
    /// Kloosterman sums and the square-root bound.
    Kloos(KloosArgs),
    /// Summation-formula identity check.
    Voronoi(VoronoiArgs),
    /// Twisted lattice sums: sharp, smooth, scan, pipeline.
    Twist(TwistArgs),
    /// Batch experiment runner driven by a JSON config.
    Run(runconfig::RunArgs),
}

/// Common envelope so every emitted number carries its provenance.
#[derive(Serialize)]
pub struct Report<T: Serialize> {
    pub module: &'static str,
    pub operation: &'static str,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub tolerance: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub pass: Option<bool>,
    pub data: T,
}

pub fn emit<T: Serialize>(out: &Option<PathBuf>, report: &Report<T>) -> Result<(), CliError> {
    let text = serde_json::to_string_pretty(report).expect("report serialization");
    println!("{text}");
    if let Some(p) = out {
        fs::write(p, text.as_bytes()).map_err(|e| CliError::Usage(format!("write {p:?}: {e}")))?;
    }
    Ok(())
}

pub fn write_csv(path: &PathBuf, header: &str, rows: &[String]) -> Result<(), CliError> {
    let mut text = String::from(header);
    text.push('\n');
    for r in rows {
        text.push_str(r);
        text.push('\n');
    }
    fs::write(path, text).map_err(|e| CliError::Usage(format!("write {path:?}: {e}")))
}

#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Compute(String),
}

impl From<atwist_core::Error> for CliError {
    fn from(e: atwist_core::Error) -> Self {
        CliError::Compute(e.to_string())
    }
}

// -- nf -------------------------------------------------------------------

#[derive(Args)]
struct NfArgs {
    /// Field name: q, gaussian, sqrt2, eisenstein, sqrt5.
    #[arg(long, default_value = "q")]
    field: String,
    /// Count lattice points in the parallelotope of this scale.
    #[arg(long)]
    enumerate: Option<f64>,
    /// Approximate this real target (same value at every place).
    #[arg(long)]
    theta: Option<f64>,
    /// Denominator bound for the approximation.
    #[arg(long, default_value_t = 10.0)]
    q: f64,
}

#[derive(Serialize)]
struct NfData {
    field: String,
    degree: usize,
    signature: (usize, usize),
    #[serde(skip_serializing_if = "Option::is_none")]
    lattice_points: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    approx: Option<NfApprox>,
}

#[derive(Serialize)]
struct NfApprox {
    alpha: Vec<String>,
    beta: Vec<String>,
    quality: f64,
    c_f: f64,
    admissible: bool,
}

fn cmd_nf(a: &NfArgs, out: &Option<PathBuf>) -> Result<bool, CliError> {
    let field = NumberField::by_name(&a.field)?;
    let lattice_points = match a.enumerate {
        Some(t) => Some(field.enumerate_lattice(t, true)?.len()),
        None => None,
    };
    let mut pass = true;
    let approx = match a.theta {
        Some(th) => {
            let point = field.point(vec![Complex64::new(th, 0.0); field.places.len()]);
            let ap = field.dirichlet_approx(&point, a.q)?;
            pass = ap.admissible;
            Some(NfApprox {
                alpha: ap.alpha.coords.iter().map(|c| c.to_string()).collect(),
                beta: ap.beta.coords.iter().map(|c| c.to_string()).collect(),
                quality: ap.quality,
                c_f: ap.c_f,
                admissible: ap.admissible,
            })
        }
        None => None,
    };
    emit(
        out,
        &Report {
            module: "numberfield",
            operation: "inspect",
            tolerance: None,
            pass: Some(pass),
            data: NfData {
                field: field.name.clone(),
                degree: field.degree,
                signature: field.signature,
                lattice_points,
                approx,
            },
        },
    )?;
    Ok(pass)
}

// -- coeffs ---------------------------------------------------------------

#[derive(Args)]
struct CoeffsArgs {
    /// Provider name: delta, sym2, constant, synthetic.
    #[arg(long, default_value = "delta")]
    provider: String,
    /// Emit coefficients for 1..=n.
    #[arg(long, default_value_t = 30)]
    upto: u64,
    /// Seed for synthetic providers.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// CSV output path for the table.
    #[arg(long)]
    csv: Option<PathBuf>,
}

#[derive(Serialize)]
struct CoeffsData {
    provider: String,
    upto: u64,
    rankin_average: f64,
    first: Vec<f64>,
}

fn cmd_coeffs(a: &CoeffsArgs, out: &Option<PathBuf>) -> Result<bool, CliError> {
    let p = provider_by_name(&a.provider, a.seed)?;
    let mut rows = Vec::new();
    let mut first = Vec::new();
    for n in 1..=a.upto {
        let v = p.value(n)?;
        if first.len() < 10 {
            first.push(v);
        }
        rows.push(format!("{n},{v:.17e}"));
    }
    if let Some(csv) = &a.csv {
        write_csv(csv, "n,value", &rows)?;
    }
    emit(
        out,
        &Report {
            module: "coeffs",
            operation: "table",
            tolerance: None,
            pass: Some(true),
            data: CoeffsData {
                provider: p.name().to_string(),
                upto: a.upto,
                rankin_average: rankin_average(a.upto)?,
                first,
            },
        },
    )?;
    Ok(true)
}

// -- bessel ---------------------------------------------------------------

#[derive(Args)]
struct BesselArgs {
    /// 2 for the holomorphic form kernel, 3 for its symmetric square.
    #[arg(long, default_value_t = 2)]
    rank: usize,
    #[arg(long, default_value_t = 1.0)]
    x_min: f64,
    #[arg(long, default_value_t = 10.0)]
    x_max: f64,
    #[arg(long, default_value_t = 50)]
    count: usize,
    /// Contour abscissa for the shifted tails.
    #[arg(long, default_value_t = -1.0)]
    sigma1: f64,
    #[arg(long)]
    csv: Option<PathBuf>,
}

#[derive(Serialize)]
struct BesselData {
    rank: usize,
    count: usize,
    node_count: usize,
    max_abs: f64,
}

fn cmd_bessel(a: &BesselArgs, out: &Option<PathBuf>) -> Result<bool, CliError> {
    let (mu, delta) = match a.rank {
        2 => delta_form_params(),
        3 => sym2_delta_params(),
        r => return Err(CliError::Usage(format!("unsupported rank {r}"))),
    };
    let opts = KernelOpts {
        sigma1: a.sigma1,
        x_max: a.x_max.abs().max(1.0),
        ..KernelOpts::default()
    };
    let kernel = RealBesselKernel::new(&mu, &delta, opts)?;
    let mut rows = Vec::new();
    let mut max_abs = 0.0f64;
    for i in 0..a.count {
        let x = a.x_min + (a.x_max - a.x_min) * i as f64 / (a.count.max(2) - 1) as f64;
        let p = kernel.j_plus(x.abs());
        let m = kernel.j_minus(x.abs());
        max_abs = max_abs.max(p.norm()).max(m.norm());
        rows.push(format!(
            "{x:.17e},{:.17e},{:.17e},{:.17e},{:.17e}",
            p.re, p.im, m.re, m.im
        ));
    }
    if let Some(csv) = &a.csv {
        write_csv(csv, "x,plus_re,plus_im,minus_re,minus_im", &rows)?;
    }
    emit(
        out,
        &Report {
            module: "bessel",
            operation: "kernel_grid",
            tolerance: None,
            pass: Some(true),
            data: BesselData {
                rank: a.rank,
                count: a.count,
                node_count: kernel.node_count(),
                max_abs,
            },
        },
    )?;
    Ok(true)
}

// -- hankel ---------------------------------------------------------------

#[derive(Args)]
struct HankelArgs {
    #[arg(long, default_value_t = 2)]
    rank: usize,
    /// Support start of the bump weight (support is [t, 2t]).
    #[arg(long, default_value_t = 20.0)]
    t: f64,
    /// Modulation frequency of the test function.
    #[arg(long, default_value_t = 0.0)]
    rho: f64,
    #[arg(long, default_value_t = 0.1)]
    y_min: f64,
    #[arg(long, default_value_t = 100.0)]
    y_max: f64,
    #[arg(long, default_value_t = 40)]
    count: usize,
    #[arg(long, default_value_t = 1e-8)]
    tol: f64,
    #[arg(long)]
    csv: Option<PathBuf>,
}

fn cmd_hankel(a: &HankelArgs, out: &Option<PathBuf>) -> Result<bool, CliError> {
    let h = match a.rank {
        2 => HankelReal::delta_fast(),
        3 => {
            let (mu, delta) = sym2_delta_params();
            let opts = KernelOpts {
                sigma1: -2.5,
                tol: 1e-8,
                x_max: 2.0 * a.t * a.y_max,
                ..KernelOpts::default()
            };
            HankelReal::from_kernel_tabulated(RealBesselKernel::new(&mu, &delta, opts)?, 2.0 * a.t * a.y_max)?
        }
        r => return Err(CliError::Usage(format!("unsupported rank {r}"))),
    };
    let f = TestFunction::new(WeightSpec::new(a.t, 2.0)?, a.rho);
    let ratio = (a.y_max / a.y_min).max(1.0 + 1e-9);
    let ys: Vec<f64> = (0..a.count)
        .map(|i| a.y_min * ratio.powf(i as f64 / (a.count.max(2) - 1) as f64))
        .collect();
    let rep = decay_scan(&h, &f, &ys, a.tol)?;
    if let Some(csv) = &a.csv {
        let rows: Vec<String> = rep
            .rows
            .iter()
            .map(|r| format!("{:.17e},{:.17e},{:.17e},{:.17e},{:?}", r.y, r.re, r.im, r.abs, r.regime))
            .collect();
        write_csv(csv, "y,re,im,abs,regime", &rows)?;
    }
    emit(
        out,
        &Report {
            module: "hankel",
            operation: "decay_scan",
            tolerance: Some(a.tol),
            pass: Some(true),
            data: rep,
        },
    )?;
    Ok(true)
}

// -- kloosterman ----------------------------------------------------------

#[derive(Args)]
struct KloosArgs {
    #[arg(long, default_value_t = 1)]
    a: i64,
    #[arg(long, default_value_t = 1)]
    b: i64,
    #[arg(long, default_value_t = 3)]
    c: u64,
    /// Exhaustively check the square-root bound for all moduli up to this.
    #[arg(long)]
    sweep: Option<u64>,
}

#[derive(Serialize)]
struct KloosData {
    a: i64,
    b: i64,
    c: u64,
    value: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    sweep: Option<atwist_core::kloosterman::WeilReport>,
}

fn cmd_kloos(a: &KloosArgs, out: &Option<PathBuf>) -> Result<bool, CliError> {
    let value = kloosterman_rational(a.a, a.b, a.c)?;
    let (sweep, pass) = match a.sweep {
        Some(c_max) => {
            let rep = weil_check(c_max)?;
            let ok = rep.violations == 0;
            (Some(rep), ok)
        }
        None => (None, true),
    };
    emit(
        out,
        &Report {
            module: "kloosterman",
            operation: "evaluate",
            tolerance: None,
            pass: Some(pass),
            data: KloosData { a: a.a, b: a.b, c: a.c, value, sweep },
        },
    )?;
    Ok(pass)
}

// -- voronoi --------------------------------------------------------------

#[derive(Args)]
pub struct VoronoiArgs {
    #[arg(long, default_value_t = 2)]
    pub rank: usize,
    #[arg(long, default_value_t = 1)]
    pub alpha: i64,
    #[arg(long, default_value_t = 2)]
    pub beta: u64,
    #[arg(long, default_value_t = 20.0)]
    pub t: f64,
    #[arg(long, default_value_t = 0.0)]
    pub rho: f64,
    #[arg(long, default_value_t = 1e-4)]
    pub tol: f64,
    #[arg(long, default_value_t = 200.0)]
    pub y_cap: f64,
}

fn cmd_voronoi(a: &VoronoiArgs, out: &Option<PathBuf>) -> Result<bool, CliError> {
    let rep = runconfig::run_voronoi(a)?;
    let pass = rep.pass;
    emit(
        out,
        &Report {
            module: "voronoi",
            operation: "verify_identity",
            tolerance: Some(a.tol),
            pass: Some(pass),
            data: rep,
        },
    )?;
    Ok(pass)
}

// -- twist ----------------------------------------------------------------

#[derive(Args)]
struct TwistArgs {
    #[command(subcommand)]
    cmd: TwistCmd,
}

#[derive(Subcommand)]
enum TwistCmd {
    /// Sharp-cutoff twisted sum over the parallelotope.
    Sharp {
        #[arg(long, default_value = "delta")]
        provider: String,
        #[arg(long, default_value = "q")]
        field: String,
        #[arg(long, default_value_t = 0.0)]
        theta: f64,
        #[arg(long, default_value_t = 5.0)]
        t: f64,
    },
    /// Smoothed twisted sum with a bump weight supported on [t, 2t].
    Smooth {
        #[arg(long, default_value = "delta")]
        provider: String,
        #[arg(long, default_value = "q")]
        field: String,
        #[arg(long, default_value_t = 0.0)]
        theta: f64,
        #[arg(long, default_value_t = 10.0)]
        t: f64,
    },
    /// Growth-exponent scan of max over theta of |S_theta(T)|.
    Scan {
        #[arg(long, default_value = "delta")]
        provider: String,
        /// Comma-separated T values.
        #[arg(long, default_value = "256,512,1024,2048")]
        t_grid: String,
        #[arg(long, default_value_t = 8)]
        max_den: u64,
        #[arg(long, default_value_t = 42)]
        irrationals: usize,
        #[arg(long, default_value_t = 3)]
        seed: u64,
        #[arg(long)]
        csv: Option<PathBuf>,
    },
    /// Rational approximation followed by the dual-side expansion (rank 2, Q).
    Pipeline {
        #[arg(long)]
        theta: f64,
        #[arg(long, default_value_t = 2500.0)]
        t: f64,
        #[arg(long, default_value_t = 5e-3)]
        tol: f64,
    },
}

#[derive(Serialize)]
struct TwistValue {
    provider: String,
    field: String,
    theta: f64,
    t: f64,
    re: f64,
    im: f64,
    abs: f64,
}

fn cmd_twist(a: &TwistArgs, out: &Option<PathBuf>) -> Result<bool, CliError> {
    match &a.cmd {
        TwistCmd::Sharp { provider, field, theta, t }
        | TwistCmd::Smooth { provider, field, theta, t } => {
            let smooth = matches!(a.cmd, TwistCmd::Smooth { .. });
            let p = provider_by_name(provider, 0)?;
            let nf = NumberField::by_name(field)?;
            let q = twistsums::TwistQuery {
                provider: p.as_ref(),
                field: &nf,
                theta: nf.point(vec![Complex64::new(*theta, 0.0); nf.places.len()]),
                t: *t,
                weight: smooth.then(|| WeightSpec::new(*t, 2.0)).transpose()?,
            };
            let s = if smooth {
                twistsums::smooth_sum(&q)?
            } else {
                twistsums::sharp_sum(&q)?
            };
            emit(
                out,
                &Report {
                    module: "twistsums",
                    operation: if smooth { "smooth_sum" } else { "sharp_sum" },
                    tolerance: None,
                    pass: Some(true),
                    data: TwistValue {
                        provider: p.name().to_string(),
                        field: nf.name.clone(),
                        theta: *theta,
                        t: *t,
                        re: s.re,
                        im: s.im,
                        abs: s.norm(),
                    },
                },
            )?;
            Ok(true)
        }
        TwistCmd::Scan { provider, t_grid, max_den, irrationals, seed, csv } => {
            let ts = parse_grid(t_grid)?;
            let rep = runconfig::run_scan(provider, &ts, *max_den, *irrationals, *seed, csv.as_ref())?;
            emit(
                out,
                &Report {
                    module: "twistsums",
                    operation: "exponent_scan",
                    tolerance: None,
                    pass: Some(true),
                    data: rep,
                },
            )?;
            Ok(true)
        }
        TwistCmd::Pipeline { theta, t, tol } => {
            let rep = twistsums::pipeline_gl2(*theta, *t, *tol)?;
            let data = runconfig::PipelineSummary::from(&rep);
            emit(
                out,
                &Report {
                    module: "twistsums",
                    operation: "pipeline",
                    tolerance: Some(*tol),
                    pass: Some(true),
                    data,
                },
            )?;
            Ok(true)
        }
    }
}

fn parse_grid(s: &str) -> Result<Vec<f64>, CliError> {
    s.split(',')
        .map(|p| {
            p.trim()
                .parse::<f64>()
                .map_err(|_| CliError::Usage(format!("bad grid entry {p:?}")))
        })
        .collect()
}

// -- entry ----------------------------------------------------------------

fn dispatch(cli: &Cli) -> Result<bool, CliError> {
    match &cli.cmd {
        Cmd::Nf(a) => cmd_nf(a, &cli.out),
        Cmd::Coeffs(a) => cmd_coeffs(a, &cli.out),
        Cmd::Bessel(a) => cmd_bessel(a, &cli.out),
        Cmd::Hankel(a) => cmd_hankel(a, &cli.out),
        Cmd::Kloos(a) => cmd_kloos(a, &cli.out),
        Cmd::Voronoi(a) => cmd_voronoi(a, &cli.out),
        Cmd::Twist(a) => cmd_twist(a, &cli.out),
        Cmd::Run(a) => runconfig::cmd_run(a, &cli.out),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match dispatch(&cli) {
        Ok(true) => ExitCode::from(0),
        Ok(false) => ExitCode::from(1),
        Err(CliError::Usage(m)) => {
            eprintln!("usage error: {m}");
            ExitCode::from(2)
        }
        Err(CliError::Compute(m)) => {
            eprintln!("error: {m}");
            ExitCode::from(1)
        }
    }
}

/// Stable hash of the raw config bytes, embedded in every manifest.
pub fn config_hash(bytes: &[u8]) -> String {
    let mut h = Sha256::new();
    h.update(bytes);
    format!("{:x}", h.finalize())
}
