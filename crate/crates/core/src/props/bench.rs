use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::hfunc::{minimize_h, HKind, HMinimum, MIN_SCAN, MIN_X_MAX};
use super::path::{path_stats, time_grid, DerivativeRule, FourierPath, SampledPath};
use crate::error::{Error, Result};

pub const DEFAULT_QUADRATURE_TOL: f64 = 1e-6;

/// Paths with `sigma_g < REGIME_RATIO * delta` are outside the regime of the
/// kinetic bound.
pub const REGIME_RATIO: f64 = 10.0;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct BoundCheck {
    pub lhs: f64,
    pub rhs: f64,
    pub margin: f64,
    pub satisfied: bool,
    /// Precondition of the bound held for this trial.
    pub in_regime: bool,
}

impl BoundCheck {
    pub fn new(lhs: f64, rhs: f64, tol: f64, in_regime: bool) -> Self {
        let margin = lhs - rhs;
        Self {
            lhs,
            rhs,
            margin,
            satisfied: margin >= -tol,
            in_regime,
        }
    }

    pub fn is_violation(&self) -> bool {
        self.in_regime && !self.satisfied
    }
}

/// `<ḟ^2> >= mu sigma_g^2 / beta^2` for one sampled pair `f = g + eps`.
pub fn kinetic_bound(f: &SampledPath, g: &SampledPath, delta: f64, mu: f64, tol: f64) -> Result<BoundCheck> {
    if f.len() != g.len() || f.beta() != g.beta() {
        return Err(Error::InvalidInput("f and g must share the time grid".into()));
    }
    let var_g = path_stats(g).variance.max(0.0);
    let beta = g.beta();
    let lhs = f.mean_sq_derivative();
    let rhs = mu * var_g / (beta * beta);
    Ok(BoundCheck::new(lhs, rhs, tol, var_g.sqrt() >= REGIME_RATIO * delta))
}

/// Envelope of the perturbation added to `g`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EpsilonBound {
    Absolute(f64),
    /// `delta = ratio * sigma_g` per trial.
    Relative(f64),
}

impl EpsilonBound {
    fn delta(self, sigma_g: f64) -> f64 {
        match self {
            EpsilonBound::Absolute(d) => d,
            EpsilonBound::Relative(r) => r * sigma_g,
        }
    }
}

/// Random path ensemble shared by both benches.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EnsembleConfig {
    #[serde(default = "default_beta")]
    pub beta: f64,
    #[serde(default = "default_modes")]
    pub n_modes: usize,
    #[serde(default = "default_n_t")]
    pub n_t: usize,
    pub n_trials: usize,
    pub seed: u64,
}

fn default_beta() -> f64 {
    5.0
}
fn default_modes() -> usize {
    10
}
fn default_n_t() -> usize {
    1024
}

impl EnsembleConfig {
    pub fn new(n_trials: usize, seed: u64) -> Self {
        Self {
            beta: default_beta(),
            n_modes: default_modes(),
            n_t: default_n_t(),
            n_trials,
            seed,
        }
    }

    fn rng(&self, trial: usize) -> ChaCha8Rng {
        ChaCha8Rng::seed_from_u64(self.seed.wrapping_add(trial as u64))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Prop1Config {
    pub ensemble: EnsembleConfig,
    pub epsilon: EpsilonBound,
    /// Number of uniform noise samples before filtering.
    #[serde(default = "default_noise_samples")]
    pub noise_samples: usize,
    /// Highest Fourier mode kept in the filtered noise.
    #[serde(default = "default_noise_cutoff")]
    pub noise_cutoff: usize,
    #[serde(default = "default_tol")]
    pub tol: f64,
}

fn default_noise_samples() -> usize {
    64
}
fn default_noise_cutoff() -> usize {
    20
}
fn default_tol() -> f64 {
    DEFAULT_QUADRATURE_TOL
}

impl Prop1Config {
    pub fn new(ensemble: EnsembleConfig, epsilon: EpsilonBound) -> Self {
        Self {
            ensemble,
            epsilon,
            noise_samples: default_noise_samples(),
            noise_cutoff: default_noise_cutoff(),
            tol: default_tol(),
        }
    }
}

/// One trial of the kinetic bound ensemble. Everything is drawn from a
/// generator seeded with `seed + trial`, so trials can run in any order.
pub fn prop1_trial(cfg: &Prop1Config, mu: f64, trial: usize) -> Result<BoundCheck> {
    let e = &cfg.ensemble;
    let mut rng = e.rng(trial);
    let g = FourierPath::gaussian(e.beta, e.n_modes, &mut rng);
    let delta = cfg.epsilon.delta(g.variance().sqrt());
    let f = if delta > 0.0 {
        g.add(&FourierPath::low_pass_noise(
            e.beta,
            cfg.noise_samples,
            cfg.noise_cutoff,
            delta,
            &mut rng,
        ))
    } else {
        g.clone()
    };
    kinetic_bound(&f.sample(e.n_t)?, &g.sample(e.n_t)?, delta, mu, cfg.tol)
}

pub fn check_prop1(cfg: &Prop1Config, mu: f64) -> Result<Vec<BoundCheck>> {
    (0..cfg.ensemble.n_trials).map(|i| prop1_trial(cfg, mu, i)).collect()
}

/// `f(x) = scale (x + wiggle sin x)`, with `f' >= scale (1 - |wiggle|)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MonotoneMap {
    pub scale: f64,
    #[serde(default)]
    pub wiggle: f64,
    /// Claimed lower bound on `f'`; defaults to `scale (1 - |wiggle|)`.
    #[serde(default)]
    pub lower_bound: Option<f64>,
}

impl MonotoneMap {
    pub fn new(scale: f64, wiggle: f64) -> Self {
        Self {
            scale,
            wiggle,
            lower_bound: None,
        }
    }

    pub fn value(&self, x: f64) -> f64 {
        self.scale * (x + self.wiggle * x.sin())
    }

    pub fn slope(&self, x: f64) -> f64 {
        self.scale * (1.0 + self.wiggle * x.cos())
    }

    pub fn c(&self) -> f64 {
        self.lower_bound.unwrap_or(self.scale * (1.0 - self.wiggle.abs()))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Prop2Config {
    pub ensemble: EnsembleConfig,
    pub map: MonotoneMap,
    #[serde(default = "default_tol")]
    pub tol: f64,
}

/// `sigma^2_{f∘g} >= C^2 sigma_g^2` on one sampled path. A path whose range
/// reaches a point with `f' < C` is reported out of regime.
pub fn variance_bound(map: &MonotoneMap, g: &SampledPath, tol: f64) -> Result<BoundCheck> {
    let c = map.c();
    if !(c > 0.0) {
        return Err(Error::InvalidInput(format!(
            "derivative lower bound must be positive, got {c}"
        )));
    }
    let well_posed = g.values().iter().all(|&x| map.slope(x) >= c * (1.0 - 1e-12));
    let fg: Vec<f64> = g.values().iter().map(|&x| map.value(x)).collect();
    let fg = SampledPath::new(g.beta(), fg, DerivativeRule::Clamped)?;
    let lhs = path_stats(&fg).variance;
    let rhs = c * c * path_stats(g).variance;
    Ok(BoundCheck::new(lhs, rhs, tol, well_posed))
}

pub fn prop2_trial(cfg: &Prop2Config, trial: usize) -> Result<BoundCheck> {
    let e = &cfg.ensemble;
    let mut rng = e.rng(trial);
    let g = FourierPath::gaussian(e.beta, e.n_modes, &mut rng);
    let t = time_grid(e.beta, e.n_t);
    let g = SampledPath::new(
        e.beta,
        t.iter().map(|&x| g.value(x)).collect(),
        DerivativeRule::Periodic,
    )?;
    variance_bound(&cfg.map, &g, cfg.tol)
}

pub fn check_prop2(cfg: &Prop2Config) -> Result<Vec<BoundCheck>> {
    (0..cfg.ensemble.n_trials).map(|i| prop2_trial(cfg, i)).collect()
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TrialSummary {
    pub n_trials: usize,
    pub in_regime: usize,
    pub violations: usize,
    /// Smallest margin among in-regime trials.
    pub worst_margin: Option<f64>,
    pub checks: Vec<BoundCheck>,
}

impl TrialSummary {
    pub fn from_checks(checks: Vec<BoundCheck>) -> Self {
        let in_regime: Vec<&BoundCheck> = checks.iter().filter(|c| c.in_regime).collect();
        Self {
            n_trials: checks.len(),
            in_regime: in_regime.len(),
            violations: in_regime.iter().filter(|c| !c.satisfied).count(),
            worst_margin: in_regime.iter().map(|c| c.margin).reduce(f64::min),
            checks,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct HScanConfig {
    #[serde(default = "default_x_max")]
    pub x_max: f64,
    #[serde(default = "default_n_scan")]
    pub n_scan: usize,
}

fn default_x_max() -> f64 {
    MIN_X_MAX
}
fn default_n_scan() -> usize {
    4 * MIN_SCAN
}

impl Default for HScanConfig {
    fn default() -> Self {
        Self {
            x_max: default_x_max(),
            n_scan: default_n_scan(),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct HMinima {
    pub sin: HMinimum,
    pub hyp: HMinimum,
    /// `min(min h_sin, min h_hyp)`
    pub mu: f64,
}

pub fn certified_mu(scan: &HScanConfig) -> Result<HMinima> {
    let sin = minimize_h(HKind::Sin, scan.x_max, scan.n_scan)?;
    let hyp = minimize_h(HKind::Hyp, scan.x_max, scan.n_scan)?;
    Ok(HMinima {
        sin,
        hyp,
        mu: sin.h.min(hyp.h),
    })
}
