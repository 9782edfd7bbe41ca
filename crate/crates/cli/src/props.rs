//! Inequality bench driver.

use mfgs_core::props::{
    certified_mu, h_curves, prop1_trial, prop2_trial, BoundCheck, EnsembleConfig, EpsilonBound, HMinima, HScanConfig,
    MonotoneMap, Prop1Config, Prop2Config, TrialSummary,
};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::CliError;
use crate::sweep::fmt_f64;

pub const HCURVE_STEP: f64 = 0.1;
pub const HCURVE_MAX: f64 = 20.0;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PropsConfig {
    #[serde(default)]
    pub h_scan: HScanConfig,
    #[serde(default = "default_prop1")]
    pub prop1: Prop1Config,
    #[serde(default = "default_prop2")]
    pub prop2: Prop2Config,
}

fn default_prop1() -> Prop1Config {
    Prop1Config::new(EnsembleConfig::new(10_000, 42), EpsilonBound::Relative(0.05))
}

fn default_prop2() -> Prop2Config {
    Prop2Config {
        ensemble: EnsembleConfig::new(1_000, 7),
        map: MonotoneMap::new(1.0, 0.5),
        tol: mfgs_core::props::DEFAULT_QUADRATURE_TOL,
    }
}

impl Default for PropsConfig {
    fn default() -> Self {
        Self {
            h_scan: HScanConfig::default(),
            prop1: default_prop1(),
            prop2: default_prop2(),
        }
    }
}

impl PropsConfig {
    /// Both ensembles reseeded from one base seed.
    pub fn with_seed(mut self, seed: u64) -> Self {
        self.prop1.ensemble.seed = seed;
        self.prop2.ensemble.seed = seed.wrapping_add(1);
        self
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct PropsReport {
    pub h_minima: HMinima,
    /// `min h_sin < 12`, i.e. the sinusoidal branch sets `mu`.
    pub sin_branch_below_12: bool,
    pub prop1: TrialSummary,
    pub prop1_violations: usize,
    pub prop2: TrialSummary,
    pub prop2_violations: usize,
}

pub fn run_props(cfg: &PropsConfig) -> Result<PropsReport, CliError> {
    let minima = certified_mu(&cfg.h_scan)?;
    let mu = minima.mu;
    let p1: Vec<BoundCheck> = (0..cfg.prop1.ensemble.n_trials)
        .into_par_iter()
        .map(|i| prop1_trial(&cfg.prop1, mu, i))
        .collect::<Result<_, _>>()?;
    let p2: Vec<BoundCheck> = (0..cfg.prop2.ensemble.n_trials)
        .into_par_iter()
        .map(|i| prop2_trial(&cfg.prop2, i))
        .collect::<Result<_, _>>()?;
    let prop1 = TrialSummary::from_checks(p1);
    let prop2 = TrialSummary::from_checks(p2);
    Ok(PropsReport {
        sin_branch_below_12: minima.sin.h < 12.0,
        h_minima: minima,
        prop1_violations: prop1.violations,
        prop1,
        prop2_violations: prop2.violations,
        prop2,
    })
}

/// `x,h_sin,h_hyp` on `x = 0.1, 0.2, ..., 20`.
pub fn hcurves_csv() -> String {
    let mut out = String::from("x,h_sin,h_hyp\n");
    for (x, s, h) in h_curves(HCURVE_STEP, HCURVE_MAX) {
        out.push_str(&format!("{},{},{}\n", fmt_f64(x), fmt_f64(s), fmt_f64(h)));
    }
    out
}
