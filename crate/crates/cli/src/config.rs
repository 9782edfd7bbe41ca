//! Experiment configuration: a single JSON document per run.

use std::path::{Path, PathBuf};

use mfgs_core::engine::{ConvergenceObservable, GridSchedule, DEFAULT_CONVERGENCE_TOL};
use mfgs_core::linalg::HermitianOperator;
use mfgs_core::models::{
    default_gcl_grid, default_zwanzig_grid, CvSystem, EnvGrid, EnvPotential, Family, FreePotential, ModelSpec,
    PolynomialPotential, SystemModel, SystemPayload, ZwanzigEnvSpec,
};
use serde::{Deserialize, Serialize};

use crate::error::CliError;

pub const DEFAULT_BETA: f64 = 5.0;
pub const DEFAULT_AUTO_POINTS: usize = 256;

/// Configuration of `compute`, `usc`, `sweep` and `converge`.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepConfig {
    pub family: Family,
    pub system: SystemConfig,
    #[serde(default = "default_beta")]
    pub beta: f64,
    #[serde(default)]
    pub potential: Option<PotentialConfig>,
    pub couplings: Couplings,
    #[serde(default)]
    pub grid: GridPolicy,
    #[serde(default)]
    pub output: Option<PathBuf>,
    #[serde(default)]
    pub seed: u64,
}

fn default_beta() -> f64 {
    DEFAULT_BETA
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(
    untagged,
    expecting = "\"paper-default\" or an object with `matrices` or `continuous`"
)]
pub enum SystemConfig {
    Tag(SystemTag),
    Spec(SystemSpec),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum SystemTag {
    #[serde(rename = "paper-default")]
    PaperDefault,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum SystemSpec {
    Matrices(MatrixSystem),
    Continuous(CvSystemConfig),
}

/// Row-major system Hamiltonian and coupling operator, with optional
/// imaginary parts.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MatrixSystem {
    pub h_sys: Vec<Vec<f64>>,
    pub coupling_op: Vec<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub h_sys_im: Option<Vec<Vec<f64>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub coupling_op_im: Option<Vec<Vec<f64>>>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CvSystemConfig {
    pub grid: EnvGrid,
    pub potential: FreePotential,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum PotentialConfig {
    /// `[a2, a4, a6]`
    Polynomial(PolynomialPotential),
    Zwanzig(ZwanzigEnvSpec),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(
    untagged,
    expecting = "an array of couplings or an object with `logspace` or `linspace`"
)]
pub enum Couplings {
    List(Vec<f64>),
    Range(CouplingRange),
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum CouplingRange {
    Logspace { start: f64, stop: f64, num: usize },
    Linspace { start: f64, stop: f64, num: usize },
}

impl Couplings {
    pub fn values(&self) -> Vec<f64> {
        match self {
            Couplings::List(v) => v.clone(),
            Couplings::Range(CouplingRange::Logspace { start, stop, num }) => {
                spaced(*start, *stop, *num, |a, b, t| a * (b / a).powf(t))
            }
            Couplings::Range(CouplingRange::Linspace { start, stop, num }) => {
                spaced(*start, *stop, *num, |a, b, t| a + (b - a) * t)
            }
        }
    }
}

fn spaced(start: f64, stop: f64, num: usize, f: impl Fn(f64, f64, f64) -> f64) -> Vec<f64> {
    match num {
        0 => vec![],
        1 => vec![start],
        n => (0..n)
            .map(|k| match k {
                0 => start,
                k if k == n - 1 => stop,
                k => f(start, stop, k as f64 / (n - 1) as f64),
            })
            .collect(),
    }
}

/// Environment grid used at each coupling.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "policy", rename_all = "snake_case", deny_unknown_fields)]
pub enum GridPolicy {
    Fixed {
        grid: EnvGrid,
    },
    /// Family default box at the given point count.
    Auto {
        #[serde(default = "default_auto_points")]
        n_points: usize,
        #[serde(default = "default_mass")]
        mass: f64,
    },
    Converge {
        initial: InitialGrid,
        #[serde(default = "default_tol")]
        tol: f64,
        #[serde(default = "default_n_factor")]
        n_factor: usize,
        #[serde(default = "default_box_factor")]
        box_factor: f64,
        #[serde(default = "default_max_stages")]
        max_stages: usize,
        #[serde(default)]
        max_points: Option<usize>,
        #[serde(default)]
        observable: ConvergenceObservable,
    },
}

impl Default for GridPolicy {
    fn default() -> Self {
        GridPolicy::Auto {
            n_points: DEFAULT_AUTO_POINTS,
            mass: 1.0,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum InitialGrid {
    Auto {
        #[serde(default = "default_auto_points")]
        n_points: usize,
        #[serde(default = "default_mass")]
        mass: f64,
    },
    Fixed(EnvGrid),
}

fn default_auto_points() -> usize {
    DEFAULT_AUTO_POINTS
}
fn default_mass() -> f64 {
    1.0
}
fn default_tol() -> f64 {
    DEFAULT_CONVERGENCE_TOL
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

/// A validated configuration with every default expanded.
#[derive(Clone, Debug, Serialize)]
pub struct ResolvedConfig {
    pub family: Family,
    pub system: SystemSpec,
    pub beta: f64,
    pub potential: PotentialConfig,
    pub couplings: Vec<f64>,
    pub grid: GridPolicy,
    pub output: Option<PathBuf>,
    pub seed: u64,
    #[serde(skip)]
    payload: SystemPayload,
}

impl ResolvedConfig {
    pub fn payload(&self) -> &SystemPayload {
        &self.payload
    }

    /// Model at coupling `c` on `env`.
    pub fn model(&self, c: f64, env: EnvGrid) -> ModelSpec {
        ModelSpec {
            family: self.family,
            system: self.payload.clone(),
            env,
            potential: match &self.potential {
                PotentialConfig::Polynomial(p) => EnvPotential::Polynomial { coeffs: *p },
                PotentialConfig::Zwanzig(z) => EnvPotential::Zwanzig(*z),
            },
            coupling: c,
            beta: self.beta,
        }
    }

    /// Family default box for coupling `c`.
    pub fn auto_grid(&self, c: f64, n_points: usize, mass: f64) -> Result<EnvGrid, CliError> {
        let g = match (&self.payload, &self.potential) {
            (SystemPayload::Discrete(s), PotentialConfig::Polynomial(_)) => default_gcl_grid(s, c, n_points, mass)?,
            (SystemPayload::Discrete(s), PotentialConfig::Zwanzig(z)) => default_zwanzig_grid(s, z, n_points, mass)?,
            (SystemPayload::Continuous(cv), PotentialConfig::Zwanzig(z)) => EnvGrid::new(
                cv.grid.q_min + z.spring_min,
                cv.grid.q_max + z.spring_min,
                n_points,
                mass,
            )?,
            (SystemPayload::Continuous(_), PotentialConfig::Polynomial(_)) => {
                return Err(CliError::Config("continuous systems need a zwanzig potential".into()))
            }
        };
        Ok(g)
    }

    pub fn initial_grid(&self, c: f64, init: &InitialGrid) -> Result<EnvGrid, CliError> {
        match init {
            InitialGrid::Auto { n_points, mass } => self.auto_grid(c, *n_points, *mass),
            InitialGrid::Fixed(g) => Ok(*g),
        }
    }

    /// The growth schedule at coupling `c`, when the policy converges.
    pub fn schedule(&self, c: f64) -> Result<Option<(GridSchedule, f64, ConvergenceObservable)>, CliError> {
        match &self.grid {
            GridPolicy::Converge {
                initial,
                tol,
                n_factor,
                box_factor,
                max_stages,
                max_points,
                observable,
            } => Ok(Some((
                GridSchedule::Growth {
                    initial: self.initial_grid(c, initial)?,
                    n_factor: *n_factor,
                    box_factor: *box_factor,
                    max_stages: *max_stages,
                    max_points: *max_points,
                },
                *tol,
                *observable,
            ))),
            _ => Ok(None),
        }
    }
}

fn matrix_from_rows(re: &[Vec<f64>], im: Option<&Vec<Vec<f64>>>, what: &str) -> Result<HermitianOperator, CliError> {
    let n = re.len();
    if n == 0 || re.iter().any(|r| r.len() != n) {
        return Err(CliError::Config(format!("{what} must be a nonempty square matrix")));
    }
    match im {
        None => Ok(HermitianOperator::from_rows(re)?),
        Some(im) => {
            if im.len() != n || im.iter().any(|r| r.len() != n) {
                return Err(CliError::Config(format!("{what} imaginary part has the wrong shape")));
            }
            let m = faer::Mat::from_fn(n, n, |i, j| faer::c64::new(re[i][j], im[i][j]));
            Ok(HermitianOperator::from_mat(m)?)
        }
    }
}

fn paper_default_matrices() -> MatrixSystem {
    let s = SystemModel::qutrit_default();
    let rows = |h: &HermitianOperator| -> Vec<Vec<f64>> {
        (0..h.dim())
            .map(|i| (0..h.dim()).map(|j| h.get(i, j).re).collect())
            .collect()
    };
    MatrixSystem {
        h_sys: rows(&s.h_sys),
        coupling_op: rows(&s.coupling_op),
        h_sys_im: None,
        coupling_op_im: None,
    }
}

impl SweepConfig {
    /// Check invariants and expand defaults.
    pub fn resolve(&self) -> Result<ResolvedConfig, CliError> {
        self.resolve_inner().map_err(CliError::into_config)
    }

    fn resolve_inner(&self) -> Result<ResolvedConfig, CliError> {
        let system = match &self.system {
            SystemConfig::Tag(SystemTag::PaperDefault) => SystemSpec::Matrices(paper_default_matrices()),
            SystemConfig::Spec(s) => s.clone(),
        };
        let payload = match &system {
            SystemSpec::Matrices(m) => SystemPayload::Discrete(SystemModel::new(
                matrix_from_rows(&m.h_sys, m.h_sys_im.as_ref(), "h_sys")?,
                matrix_from_rows(&m.coupling_op, m.coupling_op_im.as_ref(), "coupling_op")?,
            )?),
            SystemSpec::Continuous(cv) => SystemPayload::Continuous(CvSystem {
                grid: cv.grid,
                potential: cv.potential,
            }),
        };
        let potential = match (&self.potential, self.family) {
            (Some(p), _) => p.clone(),
            (None, Family::Zwanzig | Family::ZwanzigCv) => PotentialConfig::Zwanzig(ZwanzigEnvSpec::default()),
            (None, f) => {
                return Err(CliError::Config(format!(
                    "family {f} needs a `potential` (e.g. {{\"polynomial\": [1, 0, 0]}})"
                )))
            }
        };
        if !(self.beta.is_finite() && self.beta > 0.0) {
            return Err(CliError::Config(format!("beta must be positive, got {}", self.beta)));
        }
        let couplings = self.couplings.values();
        if let Some(bad) = couplings.iter().find(|c| !(c.is_finite() && **c >= 0.0)) {
            return Err(CliError::Config(format!(
                "couplings must be finite and >= 0, got {bad}"
            )));
        }
        if let Some(w) = couplings.windows(2).find(|w| !(w[1] > w[0])) {
            return Err(CliError::Config(format!(
                "couplings must be strictly increasing, got {} then {}",
                w[0], w[1]
            )));
        }
        if let Couplings::Range(CouplingRange::Logspace { start, .. }) = self.couplings {
            if !(start > 0.0) {
                return Err(CliError::Config("logspace needs start > 0".into()));
            }
        }
        let resolved = ResolvedConfig {
            family: self.family,
            system,
            beta: self.beta,
            potential,
            couplings,
            grid: self.grid.clone(),
            output: self.output.clone(),
            seed: self.seed,
            payload,
        };
        // catches family/payload mismatches before any work starts
        let probe = match &resolved.grid {
            GridPolicy::Fixed { grid } => *grid,
            _ => EnvGrid::new(-1.0, 1.0, 3, 1.0)?,
        };
        resolved.model(0.0, probe).validate()?;
        Ok(resolved)
    }
}

/// Parse a configuration document. Errors carry line and column.
pub fn parse_config_str(text: &str) -> Result<SweepConfig, CliError> {
    serde_json::from_str(text).map_err(|e| CliError::Config(format!("line {} column {}: {e}", e.line(), e.column())))
}

pub fn parse_config(path: &Path) -> Result<SweepConfig, CliError> {
    let text =
        std::fs::read_to_string(path).map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
    parse_config_str(&text).map_err(|e| match e {
        CliError::Config(m) => CliError::Config(format!("{}: {m}", path.display())),
        other => other,
    })
}
