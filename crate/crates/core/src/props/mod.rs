//! Numerical checks of the kinetic-energy and variance-composition bounds
//! on random path ensembles, and the minimization of the variational
//! endpoint functions `h_sin` and `h_hyp`.

mod bench;
mod hfunc;
mod path;

pub use bench::{
    certified_mu, check_prop1, check_prop2, kinetic_bound, prop1_trial, prop2_trial, variance_bound, BoundCheck,
    EnsembleConfig, EpsilonBound, HMinima, HScanConfig, MonotoneMap, Prop1Config, Prop2Config, TrialSummary,
    DEFAULT_QUADRATURE_TOL, REGIME_RATIO,
};
pub use hfunc::{h_curves, h_hyp, h_sin, minimize_h, HKind, HMinimum, MIN_SCAN, MIN_X_MAX};
pub use path::{path_stats, time_grid, DerivativeRule, FourierPath, PathStats, SampledPath, MIN_SAMPLES};
