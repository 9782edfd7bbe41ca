//! Orchestration behind the `mfgs` command: configuration parsing, coupling
//! sweeps, convergence studies and the inequality bench, with CSV and JSON
//! outputs.

// `!(x > 0.0)` style checks are deliberate: they also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod config;
pub mod error;
pub mod props;
pub mod sweep;

use std::path::{Path, PathBuf};

use mfgs_core::linalg::HermitianOperator;
use mfgs_core::usc::{usc_state_for, ClusterShift};
use rayon::prelude::*;
use serde::Serialize;

pub use config::{parse_config, parse_config_str, ResolvedConfig, SweepConfig};
pub use error::CliError;
pub use props::{hcurves_csv, run_props, PropsConfig, PropsReport};
pub use sweep::{evaluate_point, run_sweep, SweepOutcome, SweepRow, CSV_HEADER};

pub const SWEEP_CSV: &str = "sweep.csv";
pub const REPORT_JSON: &str = "report.json";
pub const HCURVES_CSV: &str = "hcurves.csv";

/// Dense kernels run single-threaded; parallelism comes from independent
/// sweep points and trials. Keeps results independent of the worker count.
pub fn init_numerics() {
    faer::set_global_parallelism(faer::Par::Seq);
}

/// Run `f` on a rayon pool with `workers` threads (0 = rayon default).
pub fn with_workers<T: Send>(workers: usize, f: impl FnOnce() -> T + Send) -> Result<T, CliError> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers)
        .build()
        .map_err(|e| CliError::Config(format!("cannot start {workers} workers: {e}")))?;
    Ok(pool.install(f))
}

#[derive(Clone, Debug, Serialize)]
pub struct MatrixJson {
    pub re: Vec<Vec<f64>>,
    pub im: Vec<Vec<f64>>,
}

impl From<&HermitianOperator> for MatrixJson {
    fn from(h: &HermitianOperator) -> Self {
        let n = h.dim();
        Self {
            re: (0..n).map(|i| (0..n).map(|j| h.get(i, j).re).collect()).collect(),
            im: (0..n).map(|i| (0..n).map(|j| h.get(i, j).im).collect()).collect(),
        }
    }
}

#[derive(Serialize)]
struct Report<'a, C: Serialize, R: Serialize> {
    tool: &'static str,
    version: &'static str,
    command: &'static str,
    config: &'a C,
    #[serde(skip_serializing_if = "Option::is_none")]
    usc_effective_hamiltonian_diagonal: Option<Vec<f64>>,
    results: R,
    errors: Vec<sweep::RowError>,
}

fn report<'a, C: Serialize, R: Serialize>(
    command: &'static str,
    config: &'a C,
    usc_diag: Option<Vec<f64>>,
    results: R,
    errors: Vec<sweep::RowError>,
) -> Report<'a, C, R> {
    Report {
        tool: "mfgs",
        version: env!("CARGO_PKG_VERSION"),
        command,
        config,
        usc_effective_hamiltonian_diagonal: usc_diag,
        results,
        errors,
    }
}

fn write_file(dir: &Path, name: &str, contents: &str) -> Result<PathBuf, CliError> {
    std::fs::create_dir_all(dir).map_err(|source| CliError::Io {
        path: dir.display().to_string(),
        source,
    })?;
    let path = dir.join(name);
    std::fs::write(&path, contents).map_err(|source| CliError::Io {
        path: path.display().to_string(),
        source,
    })?;
    Ok(path)
}

fn write_json(dir: &Path, name: &str, value: &impl Serialize) -> Result<PathBuf, CliError> {
    let mut text = serde_json::to_string_pretty(value).expect("reports serialize");
    text.push('\n');
    write_file(dir, name, &text)
}

/// Write `sweep.csv` and `report.json` for a finished sweep.
pub fn write_sweep(cfg: &ResolvedConfig, outcome: &SweepOutcome, dir: &Path) -> Result<(), CliError> {
    write_file(dir, SWEEP_CSV, &outcome.csv())?;
    let diag = outcome
        .details
        .first()
        .map(|d| d.usc_effective_hamiltonian_diagonal.clone());
    write_json(
        dir,
        REPORT_JSON,
        &report("sweep", cfg, diag, &outcome.details, outcome.errors.clone()),
    )?;
    Ok(())
}

pub fn cmd_sweep(cfg: &ResolvedConfig, dir: &Path) -> Result<SweepOutcome, CliError> {
    let outcome = run_sweep(cfg);
    write_sweep(cfg, &outcome, dir)?;
    if outcome.rows.is_empty() && !outcome.errors.is_empty() {
        let first = &outcome.errors[0];
        return Err(CliError::Numerical(mfgs_core::Error::InvalidInput(format!(
            "every sweep point failed (first at c = {}: {})",
            first.c, first.error
        ))));
    }
    Ok(outcome)
}

#[derive(Serialize)]
struct ComputeResult {
    c: f64,
    grid: mfgs_core::models::EnvGrid,
    state: MatrixJson,
    populations: Vec<f64>,
    trace_distance_to_usc: f64,
    converged: bool,
}

/// Exact reduced state at every configured coupling.
pub fn cmd_compute(cfg: &ResolvedConfig, dir: &Path) -> Result<(), CliError> {
    let results: Vec<ComputeResult> = cfg
        .couplings
        .par_iter()
        .map(|&c| {
            let p = evaluate_point(cfg, c)?;
            Ok(ComputeResult {
                c,
                grid: p.grid,
                state: p.state.op().into(),
                populations: p.state.populations(),
                trace_distance_to_usc: p.trace_distance()?,
                converged: p.converged(),
            })
        })
        .collect::<Result<_, CliError>>()?;
    write_json(dir, REPORT_JSON, &report("compute", cfg, None, results, vec![]))?;
    Ok(())
}

#[derive(Serialize)]
struct UscResult {
    c: f64,
    state: MatrixJson,
    populations: Vec<f64>,
    effective_hamiltonian_diagonal: Vec<f64>,
    cluster_values: Vec<f64>,
    shifts: Vec<ClusterShift>,
}

fn usc_result(cfg: &ResolvedConfig, c: f64) -> Result<UscResult, CliError> {
    let grid = match &cfg.grid {
        config::GridPolicy::Fixed { grid } => *grid,
        config::GridPolicy::Auto { n_points, mass } => cfg.auto_grid(c, *n_points, *mass)?,
        config::GridPolicy::Converge { initial, .. } => cfg.initial_grid(c, initial)?,
    };
    let u = usc_state_for(&cfg.model(c, grid))?;
    Ok(UscResult {
        c,
        state: u.state.op().into(),
        populations: u.state.populations(),
        effective_hamiltonian_diagonal: u.effective_hamiltonian.diagonal(),
        cluster_values: u.projectors.cluster_values().to_vec(),
        shifts: u.shifts.clone(),
    })
}

/// Ultrastrong-coupling state at every configured coupling.
pub fn cmd_usc(cfg: &ResolvedConfig, dir: &Path) -> Result<(), CliError> {
    let results: Vec<UscResult> = cfg
        .couplings
        .par_iter()
        .map(|&c| usc_result(cfg, c))
        .collect::<Result<_, _>>()?;
    let diag = results.first().map(|r| r.effective_hamiltonian_diagonal.clone());
    write_json(dir, REPORT_JSON, &report("usc", cfg, diag, results, vec![]))?;
    Ok(())
}

/// Convergence report per coupling; needs the `converge` grid policy.
pub fn cmd_converge(cfg: &ResolvedConfig, dir: &Path) -> Result<SweepOutcome, CliError> {
    if !matches!(cfg.grid, config::GridPolicy::Converge { .. }) {
        return Err(CliError::Config("`converge` needs grid.policy = \"converge\"".into()));
    }
    let outcome = run_sweep(cfg);
    if let Some(e) = outcome.errors.first() {
        return Err(CliError::Numerical(mfgs_core::Error::InvalidInput(format!(
            "convergence failed at c = {}: {}",
            e.c, e.error
        ))));
    }
    let diag = outcome
        .details
        .first()
        .map(|d| d.usc_effective_hamiltonian_diagonal.clone());
    write_json(
        dir,
        REPORT_JSON,
        &report("converge", cfg, diag, &outcome.details, vec![]),
    )?;
    Ok(outcome)
}

/// `report.json` and `hcurves.csv` for the inequality bench.
pub fn cmd_props(cfg: &PropsConfig, dir: &Path) -> Result<PropsReport, CliError> {
    let r = run_props(cfg)?;
    write_json(dir, REPORT_JSON, &report("props", cfg, None, &r, vec![]))?;
    write_file(dir, HCURVES_CSV, &hcurves_csv())?;
    Ok(r)
}

pub fn parse_props_config(path: &Path) -> Result<PropsConfig, CliError> {
    let text =
        std::fs::read_to_string(path).map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| {
        CliError::Config(format!(
            "{}: line {} column {}: {e}",
            path.display(),
            e.line(),
            e.column()
        ))
    })
}
