//! Command-line front end: argument model, dispatch and JSON report.

mod io;
pub mod verify;

use std::path::PathBuf;
use std::time::Instant;

use clap::{Parser, ValueEnum};
use serde::Serialize;

pub use io::{parse_matrix, parse_matrix_str, Format};
pub use verify::PropertyOutcome;

use crate::error::{invalid, GcrssError, Result};
use crate::expected::PolyPath;
use crate::linalg::{Matrix, RANK_TOL};
use crate::selection::{
    bound_gcss, bound_submatrix, select_gcrss, select_gcss, select_submatrix, BoundReport,
    SelectionConfig, SelectionResult, TraceRecord,
};
use crate::GcrssProblem;

/// Environment variable capping the number of worker threads.
pub const WORKERS_ENV: &str = "GCRSS_WORKERS";

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Command {
    Select,
    Bound,
    Verify,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Mode {
    Gcrss,
    Gcss,
    Css,
    Submatrix,
}

#[derive(Debug, Clone, Parser, Serialize)]
#[command(name = "gcrss", version, about = "Spectral-norm column and row subset selection")]
pub struct RunSpec {
    #[arg(value_enum)]
    pub command: Command,
    #[arg(long, value_enum, default_value = "gcrss")]
    pub mode: Mode,
    /// Target matrix.
    #[arg(long = "A", value_name = "PATH")]
    pub a: Option<PathBuf>,
    /// Column source matrix.
    #[arg(long = "B", value_name = "PATH")]
    pub b: Option<PathBuf>,
    /// Row source matrix.
    #[arg(long = "C", value_name = "PATH")]
    pub c: Option<PathBuf>,
    #[arg(short = 'k', default_value_t = 0)]
    pub k: usize,
    #[arg(short = 'r', default_value_t = 0)]
    pub r: usize,
    #[arg(long, default_value_t = 1e-6)]
    pub eta: f64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Number of random instances for `verify`.
    #[arg(long, default_value_t = 50)]
    pub instances: usize,
    /// Largest dimension of random instances for `verify`.
    #[arg(long, default_value_t = 5)]
    pub max_size: usize,
    /// Write the report here instead of standard output.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Force one expected-polynomial route.
    #[arg(long)]
    pub path: Option<PolyPath>,
    #[arg(long, value_enum, default_value = "auto")]
    pub format: Format,
}

#[derive(Debug, Clone, Serialize)]
pub struct SelectionReport {
    pub s: Vec<usize>,
    pub r: Vec<usize>,
    pub residual_spectral_sq: f64,
    pub residual_frobenius_sq: f64,
    pub maxroot_bound: f64,
    pub path: PolyPath,
    pub trace: Vec<TraceRecord>,
}

impl From<SelectionResult> for SelectionReport {
    fn from(res: SelectionResult) -> Self {
        SelectionReport {
            s: res.s_sorted(),
            r: res.r_sorted(),
            residual_spectral_sq: res.residual_spectral_sq,
            residual_frobenius_sq: res.residual_frobenius_sq,
            maxroot_bound: res.maxroot_bound,
            path: res.path,
            trace: res.trace,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct SubmatrixReport {
    pub rows: Vec<usize>,
    pub cols: Vec<usize>,
    pub spectral_norm: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct Timings {
    pub load_ms: f64,
    pub compute_ms: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct Report {
    pub version: &'static str,
    pub spec: RunSpec,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub selection: Option<SelectionReport>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub submatrix: Option<SubmatrixReport>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub bound: Option<BoundReport>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub properties: Option<Vec<PropertyOutcome>>,
    pub passed: bool,
    pub timings: Timings,
}

#[derive(Debug, Clone, Serialize)]
pub struct ErrorReport {
    pub version: &'static str,
    pub error: String,
    pub code: i32,
    pub message: String,
}

impl ErrorReport {
    pub fn new(e: &GcrssError) -> Self {
        ErrorReport { version: crate::VERSION, error: e.kind().into(), code: e.code(), message: e.to_string() }
    }
}

fn ms(t: Instant) -> f64 {
    t.elapsed().as_secs_f64() * 1e3
}

fn load(path: &Option<PathBuf>, name: &str, format: Format) -> Result<Matrix> {
    match path {
        Some(p) => parse_matrix(p, format),
        None => invalid(format!("mode requires --{name}")),
    }
}

struct Inputs {
    a: Matrix,
    b: Option<Matrix>,
    c: Option<Matrix>,
}

fn load_inputs(spec: &RunSpec) -> Result<Inputs> {
    let a = load(&spec.a, "A", spec.format)?;
    let (b, c) = match spec.mode {
        Mode::Gcrss => (Some(load(&spec.b, "B", spec.format)?), Some(load(&spec.c, "C", spec.format)?)),
        Mode::Gcss => (Some(load(&spec.b, "B", spec.format)?), None),
        Mode::Css => (None, None),
        Mode::Submatrix => {
            if !a.is_square() {
                return invalid("submatrix mode needs a square A");
            }
            (None, None)
        }
    };
    Ok(Inputs { a, b, c })
}

/// Executes one command and builds its report.
pub fn run(spec: &RunSpec) -> Result<Report> {
    let cfg = SelectionConfig { eta: spec.eta, tol: RANK_TOL, path_override: spec.path };
    cfg.validate()?;
    let mut report = Report {
        version: crate::VERSION,
        spec: spec.clone(),
        selection: None,
        submatrix: None,
        bound: None,
        properties: None,
        passed: true,
        timings: Timings { load_ms: 0.0, compute_ms: 0.0 },
    };
    let t0 = Instant::now();
    if spec.command == Command::Verify {
        let props = verify::verify(spec.seed, spec.instances, spec.max_size.max(1))?;
        report.passed = props.iter().all(|p| p.passed);
        report.properties = Some(props);
        report.timings.compute_ms = ms(t0);
        return Ok(report);
    }
    if (spec.command, spec.mode) == (Command::Bound, Mode::Gcrss) {
        return Err(GcrssError::NotApplicable("no closed-form bound for gcrss mode".into()));
    }
    let inputs = load_inputs(spec)?;
    report.timings.load_ms = ms(t0);
    let t1 = Instant::now();
    let Inputs { a, b, c } = inputs;
    match (spec.command, spec.mode) {
        (Command::Select, Mode::Gcrss) => {
            let prob = GcrssProblem::new(a, b.unwrap(), c.unwrap(), spec.k, spec.r)?;
            report.selection = Some(select_gcrss(&prob, &cfg)?.into());
        }
        (Command::Select, Mode::Gcss) => {
            report.selection = Some(select_gcss(&a, &b.unwrap(), spec.k, &cfg)?.into());
        }
        (Command::Select, Mode::Css) => {
            report.selection = Some(select_gcss(&a, &a, spec.k, &cfg)?.into());
        }
        (Command::Select, Mode::Submatrix) => {
            let res = select_submatrix(&a, spec.k, spec.r, &cfg)?;
            report.submatrix =
                Some(SubmatrixReport { rows: res.rows, cols: res.cols, spectral_norm: res.spectral_norm });
            report.selection = Some(res.internal.into());
        }
        (Command::Bound, Mode::Gcss) => report.bound = Some(bound_gcss(&a, &b.unwrap(), spec.k)?),
        (Command::Bound, Mode::Css) => report.bound = Some(bound_gcss(&a, &a, spec.k)?),
        (Command::Bound, Mode::Submatrix) => report.bound = Some(bound_submatrix(&a, spec.k)?),
        (Command::Bound, Mode::Gcrss) | (Command::Verify, _) => unreachable!(),
    }
    report.timings.compute_ms = ms(t1);
    Ok(report)
}

/// Runs the command and writes the JSON report. Returns the process exit code.
pub fn main_with(spec: &RunSpec) -> i32 {
    let (json, code) = match run(spec) {
        Ok(rep) => {
            let code = if rep.passed { 0 } else { 1 };
            (serde_json::to_string_pretty(&rep), code)
        }
        Err(e) => (serde_json::to_string_pretty(&ErrorReport::new(&e)), e.exit_code()),
    };
    let json = json.expect("report serializes") + "\n";
    match &spec.out {
        Some(p) => {
            if let Err(e) = std::fs::write(p, &json) {
                eprintln!("cannot write {}: {e}", p.display());
                return 2;
            }
        }
        None => print!("{json}"),
    }
    if code != 0 {
        eprintln!("gcrss: exit status {code}");
    }
    code
}

/// Worker count from the environment, if set to a positive integer.
pub fn workers_from_env() -> Option<usize> {
    std::env::var(WORKERS_ENV).ok()?.trim().parse().ok().filter(|&n: &usize| n > 0)
}
