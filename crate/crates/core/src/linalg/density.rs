use super::hermitian::HermitianOperator;
use super::spectral::hermitian_eigenvalues;
use crate::error::{Error, Result};

pub const TRACE_TOL: f64 = 1e-10;
pub const POSITIVITY_TOL: f64 = 1e-10;

/// Unit-trace positive semidefinite Hermitian operator.
#[derive(Clone, Debug)]
pub struct DensityMatrix {
    op: HermitianOperator,
}

impl DensityMatrix {
    pub fn new(op: HermitianOperator) -> Result<Self> {
        let tr = op.trace();
        if (tr - 1.0).abs() > TRACE_TOL {
            return Err(Error::InvalidDensity(format!("trace {tr} differs from 1")));
        }
        let min = hermitian_eigenvalues(&op)?[0];
        if min < -POSITIVITY_TOL {
            return Err(Error::InvalidDensity(format!("negative eigenvalue {min:e}")));
        }
        Ok(Self { op })
    }

    /// Divides by the trace first.
    pub fn from_unnormalized(op: HermitianOperator) -> Result<Self> {
        let tr = op.trace();
        if !(tr.is_finite() && tr > 0.0) {
            return Err(Error::InvalidDensity(format!(
                "cannot normalize operator with trace {tr}"
            )));
        }
        Self::new(op.scaled(1.0 / tr))
    }

    /// Diagonal state from nonnegative weights (normalized here).
    pub fn from_weights(weights: &[f64]) -> Result<Self> {
        if weights.iter().any(|w| !(w.is_finite() && *w >= 0.0)) {
            return Err(Error::InvalidDensity("weights must be finite and nonnegative".into()));
        }
        Self::from_unnormalized(HermitianOperator::diag(weights))
    }

    pub fn op(&self) -> &HermitianOperator {
        &self.op
    }

    pub fn into_op(self) -> HermitianOperator {
        self.op
    }

    pub fn dim(&self) -> usize {
        self.op.dim()
    }

    /// Populations in the computational basis.
    pub fn populations(&self) -> Vec<f64> {
        self.op.diagonal()
    }
}
