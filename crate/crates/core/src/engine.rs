//! Exact mean-force Gibbs states and the grid convergence controller.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{
    check_beta, hermitian_eig, partial_trace_spectral, trace_distance, CompositeDims, DensityMatrix, HermitianOperator,
};
use crate::models::{build_hamiltonian, EnvGrid, ModelSpec};
use crate::usc::{usc_state_for, UscState};

/// `e^{-beta H} / Tr e^{-beta H}`.
pub fn compute_gibbs(h: &HermitianOperator, beta: f64) -> Result<DensityMatrix> {
    check_beta(beta)?;
    let spec = hermitian_eig(h)?;
    let w = spec.shifted_boltzmann_weights(beta);
    let z: f64 = w.iter().sum();
    let op = spec.apply_function({
        let e0 = spec.ground_energy();
        move |e| (-beta * (e - e0)).exp() / z
    })?;
    DensityMatrix::from_unnormalized(op)
}

/// `Tr_E e^{-beta H_SE}`, normalized.
///
/// The partial trace is taken directly over the eigenvectors of `H_SE`, so the
/// full composite exponential is never formed.
pub fn compute_mfgs(h_se: &HermitianOperator, dims: CompositeDims, beta: f64) -> Result<DensityMatrix> {
    check_beta(beta)?;
    if h_se.dim() != dims.total() {
        return Err(Error::DimensionMismatch {
            expected: dims.total(),
            found: h_se.dim(),
        });
    }
    let spec = hermitian_eig(h_se)?;
    let w = spec.shifted_boltzmann_weights(beta);
    let reduced = partial_trace_spectral(&spec, &w, dims)?;
    DensityMatrix::from_unnormalized(reduced)
}

/// Build the Hamiltonian for `spec` and return its reduced equilibrium state.
pub fn mfgs_for(spec: &ModelSpec) -> Result<DensityMatrix> {
    let (h, dims) = build_hamiltonian(spec)?;
    compute_mfgs(&h, dims, spec.beta)
}

/// Sequence of environment grids visited by the convergence loop.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum GridSchedule {
    Explicit {
        grids: Vec<EnvGrid>,
    },
    /// Multiply the point count by `n_factor` and the box width by
    /// `box_factor` each stage, stopping at `max_stages` or when the count
    /// would exceed `max_points`.
    Growth {
        initial: EnvGrid,
        #[serde(default = "default_n_factor")]
        n_factor: usize,
        #[serde(default = "default_box_factor")]
        box_factor: f64,
        #[serde(default = "default_max_stages")]
        max_stages: usize,
        #[serde(default)]
        max_points: Option<usize>,
    },
}

fn default_n_factor() -> usize {
    2
}
fn default_box_factor() -> f64 {
    1.25
}
fn default_max_stages() -> usize {
    5
}

pub const DEFAULT_CONVERGENCE_TOL: f64 = 1e-4;

impl GridSchedule {
    /// Default growth: double the points, widen the box by 25%, five stages.
    pub fn growth(initial: EnvGrid) -> Self {
        GridSchedule::Growth {
            initial,
            n_factor: default_n_factor(),
            box_factor: default_box_factor(),
            max_stages: default_max_stages(),
            max_points: None,
        }
    }

    /// Fixed box, point count doubled at every stage.
    pub fn n_doubling(initial: EnvGrid, stages: usize) -> Self {
        GridSchedule::Growth {
            initial,
            n_factor: 2,
            box_factor: 1.0,
            max_stages: stages,
            max_points: None,
        }
    }

    pub fn with_max_points(self, cap: usize) -> Self {
        match self {
            GridSchedule::Growth {
                initial,
                n_factor,
                box_factor,
                max_stages,
                ..
            } => GridSchedule::Growth {
                initial,
                n_factor,
                box_factor,
                max_stages,
                max_points: Some(cap),
            },
            explicit => explicit,
        }
    }

    pub fn stages(&self) -> Result<Vec<EnvGrid>> {
        let grids = match self {
            GridSchedule::Explicit { grids } => grids.clone(),
            GridSchedule::Growth {
                initial,
                n_factor,
                box_factor,
                max_stages,
                max_points,
            } => {
                if *n_factor < 1 || !(*box_factor >= 1.0) {
                    return Err(Error::InvalidInput(format!(
                        "growth factors must not shrink the grid (n x{n_factor}, box x{box_factor})"
                    )));
                }
                let mut out = Vec::with_capacity(*max_stages);
                let mut g = *initial;
                for _ in 0..*max_stages {
                    if max_points.is_some_and(|cap| g.n_points > cap) {
                        break;
                    }
                    out.push(g);
                    g = g.rescaled(*box_factor, g.n_points * n_factor);
                }
                out
            }
        };
        if grids.is_empty() {
            return Err(Error::InvalidInput("grid schedule has no stages".into()));
        }
        for g in &grids {
            g.validate()?;
        }
        Ok(grids)
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ConvergenceObservable {
    /// Trace distance between the exact state and the family's USC state.
    #[default]
    TraceDistanceToUsc,
    /// Trace distance between successive stage states.
    StateItself,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct StageRecord {
    pub grid: EnvGrid,
    /// Scalar observable of this stage (absent for the state observable).
    pub value: Option<f64>,
    /// Change with respect to the previous stage.
    pub delta: Option<f64>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ConvergenceReport {
    pub stages: Vec<StageRecord>,
    pub converged: bool,
    pub final_grid: EnvGrid,
    pub tolerance: f64,
}

impl ConvergenceReport {
    pub fn deltas(&self) -> Vec<f64> {
        self.stages.iter().filter_map(|s| s.delta).collect()
    }
}

/// Result of a convergence run: last stage's state plus the report.
#[derive(Clone, Debug)]
pub struct Converged {
    pub state: DensityMatrix,
    pub report: ConvergenceReport,
    pub usc: Option<UscState>,
}

/// Grow the environment grid until the observable changes by at most `tol`
/// between successive stages. An exhausted schedule returns the last stage
/// with `converged = false`.
pub fn converge_mfgs(
    spec: &ModelSpec,
    schedule: &GridSchedule,
    tol: f64,
    observable: ConvergenceObservable,
) -> Result<Converged> {
    spec.validate()?;
    if !(tol >= 0.0) {
        return Err(Error::InvalidInput(format!("tolerance must be nonnegative, got {tol}")));
    }
    let grids = schedule.stages()?;
    let usc = match observable {
        ConvergenceObservable::TraceDistanceToUsc => Some(usc_state_for(spec)?),
        ConvergenceObservable::StateItself => None,
    };

    let mut stages: Vec<StageRecord> = Vec::with_capacity(grids.len());
    let mut prev_state: Option<DensityMatrix> = None;
    let mut prev_value: Option<f64> = None;
    let mut converged = false;
    for grid in grids {
        let state = mfgs_for(&spec.with_env(grid))?;
        let (value, delta) = match (&usc, observable) {
            (Some(u), ConvergenceObservable::TraceDistanceToUsc) => {
                let v = trace_distance(&state, &u.state)?;
                (Some(v), prev_value.map(|p| (v - p).abs()))
            }
            _ => {
                let d = match &prev_state {
                    Some(p) => Some(trace_distance(&state, p)?),
                    None => None,
                };
                (None, d)
            }
        };
        stages.push(StageRecord { grid, value, delta });
        prev_value = value;
        prev_state = Some(state);
        if delta.is_some_and(|d| d <= tol) {
            converged = true;
            break;
        }
    }
    let final_grid = stages.last().expect("nonempty schedule").grid;
    Ok(Converged {
        state: prev_state.expect("nonempty schedule"),
        report: ConvergenceReport {
            stages,
            converged,
            final_grid,
            tolerance: tol,
        },
        usc,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::kron;
    use crate::models::SystemModel;

    #[test]
    fn gibbs_examples() {
        let rho = compute_gibbs(&HermitianOperator::zeros(2), 1.0).unwrap();
        assert!(rho.op().max_abs_diff(&HermitianOperator::diag(&[0.5, 0.5])) < 1e-15);

        let beta = 3.0;
        let rho = compute_gibbs(&HermitianOperator::diag(&[0.0, 2f64.ln() / beta]), beta).unwrap();
        assert!((rho.populations()[0] - 2.0 / 3.0).abs() < 1e-14);

        // ground population of the qutrit at beta = 5, from the spectrum -sqrt3, 0, sqrt3
        let s3 = 3f64.sqrt();
        let want = 1.0 / (1.0 + (-5.0 * s3).exp() + (-10.0 * s3).exp());
        let hs = SystemModel::qutrit_default().h_sys;
        let rho = compute_gibbs(&hs, 5.0).unwrap();
        let eig = hermitian_eig(&hs).unwrap();
        let v = eig.eigenvectors();
        let ground: f64 = (0..3)
            .map(|a| {
                (0..3)
                    .map(|b| (v[(a, 0)].conj() * rho.op().get(a, b) * v[(b, 0)]).re)
                    .sum::<f64>()
            })
            .sum();
        assert!((ground - want).abs() < 1e-12);
        assert!((want - 0.99983).abs() < 5e-6);
    }

    #[test]
    fn trivial_environment_gives_gibbs() {
        let hs = SystemModel::qutrit_default().h_sys;
        let h = kron(&hs, &HermitianOperator::identity(4));
        let rho = compute_mfgs(&h, CompositeDims::new(3, 4), 5.0).unwrap();
        let gibbs = compute_gibbs(&hs, 5.0).unwrap();
        assert!(trace_distance(&rho, &gibbs).unwrap() < 1e-12);
    }

    #[test]
    fn mfgs_rejects_dimension_mismatch() {
        let h = HermitianOperator::identity(6);
        assert!(compute_mfgs(&h, CompositeDims::new(2, 2), 1.0).is_err());
        assert!(compute_mfgs(&h, CompositeDims::new(2, 3), 0.0).is_err());
    }

    #[test]
    fn schedule_stages() {
        let g = EnvGrid::new(-4.0, 4.0, 16, 1.0).unwrap();
        let s = GridSchedule::growth(g).stages().unwrap();
        assert_eq!(s.len(), 5);
        assert_eq!(s[4].n_points, 256);
        assert!((s[1].q_max - 5.0).abs() < 1e-12);
        let capped = GridSchedule::growth(g).with_max_points(64).stages().unwrap();
        assert_eq!(capped.len(), 3);
        assert!(GridSchedule::Explicit { grids: vec![] }.stages().is_err());
    }
}
