//! Per-coupling evaluation of exact and ultrastrong-coupling states.

use std::time::Instant;

use mfgs_core::engine::{converge_mfgs, mfgs_for, ConvergenceReport};
use mfgs_core::linalg::{project_block_diagonal, trace_distance, trace_norm, DensityMatrix};
use mfgs_core::models::EnvGrid;
use mfgs_core::usc::{usc_state_for, UscState};
use rayon::prelude::*;
use serde::Serialize;

use crate::config::{GridPolicy, ResolvedConfig};
use crate::error::CliError;

pub const CSV_HEADER: &str = "c,trace_distance,n_points,q_min,q_max,converged,wall_time_s";

/// One CSV line of a sweep.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct SweepRow {
    pub c: f64,
    pub trace_distance: f64,
    pub n_points: usize,
    pub q_min: f64,
    pub q_max: f64,
    /// The grid convergence loop met its tolerance (always false for fixed
    /// and auto grids).
    pub converged: bool,
    pub wall_time_s: f64,
}

impl SweepRow {
    pub fn csv_line(&self) -> String {
        format!(
            "{},{},{},{},{},{},{}",
            fmt_f64(self.c),
            fmt_f64(self.trace_distance),
            self.n_points,
            fmt_f64(self.q_min),
            fmt_f64(self.q_max),
            self.converged,
            fmt_f64(self.wall_time_s)
        )
    }
}

/// 17 significant digits.
pub fn fmt_f64(x: f64) -> String {
    format!("{x:.16e}")
}

/// Exact and limiting state at one coupling.
#[derive(Clone, Debug)]
pub struct PointState {
    pub c: f64,
    pub grid: EnvGrid,
    pub state: DensityMatrix,
    pub usc: UscState,
    pub convergence: Option<ConvergenceReport>,
}

impl PointState {
    pub fn converged(&self) -> bool {
        self.convergence.as_ref().is_some_and(|r| r.converged)
    }

    pub fn trace_distance(&self) -> Result<f64, CliError> {
        Ok(trace_distance(&self.state, &self.usc.state)?)
    }

    /// `|| rho - Σ_i P_i rho P_i ||_tr` with the USC projectors.
    pub fn off_block_norm(&self) -> Result<f64, CliError> {
        let block = project_block_diagonal(self.state.op(), &self.usc.projectors)?;
        Ok(trace_norm(&self.state.op().sub(&block)?)?)
    }
}

pub fn evaluate_point(cfg: &ResolvedConfig, c: f64) -> Result<PointState, CliError> {
    let grid = match &cfg.grid {
        GridPolicy::Fixed { grid } => *grid,
        GridPolicy::Auto { n_points, mass } => cfg.auto_grid(c, *n_points, *mass)?,
        GridPolicy::Converge { .. } => {
            let (schedule, tol, observable) = cfg.schedule(c)?.expect("converge policy");
            let initial = schedule.stages()?[0];
            let spec = cfg.model(c, initial);
            let run = converge_mfgs(&spec, &schedule, tol, observable)?;
            let grid = run.report.final_grid;
            let usc = match run.usc {
                Some(u) => u,
                None => usc_state_for(&cfg.model(c, grid))?,
            };
            return Ok(PointState {
                c,
                grid,
                state: run.state,
                usc,
                convergence: Some(run.report),
            });
        }
    };
    let spec = cfg.model(c, grid);
    Ok(PointState {
        c,
        grid,
        state: mfgs_for(&spec)?,
        usc: usc_state_for(&spec)?,
        convergence: None,
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct RowDetail {
    pub c: f64,
    pub grid: EnvGrid,
    pub trace_distance: f64,
    pub off_block_norm: f64,
    pub populations: Vec<f64>,
    pub usc_populations: Vec<f64>,
    pub usc_effective_hamiltonian_diagonal: Vec<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub convergence: Option<ConvergenceReport>,
}

#[derive(Clone, Debug, Serialize)]
pub struct RowError {
    pub c: f64,
    pub error: String,
}

#[derive(Clone, Debug, Default, Serialize)]
pub struct SweepOutcome {
    pub rows: Vec<SweepRow>,
    pub details: Vec<RowDetail>,
    pub errors: Vec<RowError>,
}

impl SweepOutcome {
    pub fn csv(&self) -> String {
        let mut out = String::from(CSV_HEADER);
        out.push('\n');
        for r in &self.rows {
            out.push_str(&r.csv_line());
            out.push('\n');
        }
        out
    }
}

type PointResult = Result<(SweepRow, RowDetail), CliError>;

fn sweep_point(cfg: &ResolvedConfig, c: f64) -> PointResult {
    let start = Instant::now();
    let p = evaluate_point(cfg, c)?;
    let td = p.trace_distance()?;
    let off = p.off_block_norm()?;
    let row = SweepRow {
        c,
        trace_distance: td,
        n_points: p.grid.n_points,
        q_min: p.grid.q_min,
        q_max: p.grid.q_max,
        converged: p.converged(),
        wall_time_s: start.elapsed().as_secs_f64(),
    };
    let detail = RowDetail {
        c,
        grid: p.grid,
        trace_distance: td,
        off_block_norm: off,
        populations: p.state.populations(),
        usc_populations: p.usc.state.populations(),
        usc_effective_hamiltonian_diagonal: p.usc.effective_hamiltonian.diagonal(),
        convergence: p.convergence,
    };
    Ok((row, detail))
}

/// Evaluate every coupling. Rows are computed concurrently on the current
/// rayon pool and returned in coupling order; failed points go to the error
/// ledger instead of aborting the sweep.
pub fn run_sweep(cfg: &ResolvedConfig) -> SweepOutcome {
    let results: Vec<(f64, PointResult)> = cfg.couplings.par_iter().map(|&c| (c, sweep_point(cfg, c))).collect();
    let mut out = SweepOutcome::default();
    for (c, r) in results {
        match r {
            Ok((row, detail)) => {
                out.rows.push(row);
                out.details.push(detail);
            }
            Err(e) => {
                log::warn!("coupling {c}: {e}");
                out.errors.push(RowError {
                    c,
                    error: e.to_string(),
                });
            }
        }
    }
    out
}
