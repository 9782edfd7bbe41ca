use faer::{c64, Mat};
use log::warn;

use crate::error::{Error, Result};
use crate::linalg::{hermitian_eig, HermitianOperator, ProjectorFamily};

/// Default absolute tolerance for merging eigenvalues of the coupling operator.
pub const DEFAULT_CLUSTER_TOL: f64 = 1e-8;

/// Discrete system: free Hamiltonian and the operator through which it
/// couples to the environment.
#[derive(Clone, Debug)]
pub struct SystemModel {
    pub h_sys: HermitianOperator,
    pub coupling_op: HermitianOperator,
}

impl SystemModel {
    pub fn new(h_sys: HermitianOperator, coupling_op: HermitianOperator) -> Result<Self> {
        if h_sys.dim() != coupling_op.dim() {
            return Err(Error::DimensionMismatch {
                expected: h_sys.dim(),
                found: coupling_op.dim(),
            });
        }
        Ok(Self { h_sys, coupling_op })
    }

    /// Qutrit with a tridiagonal Hamiltonian and a diagonal coupling operator
    /// `diag(1, 0, -0.5)`.
    pub fn qutrit_default() -> Self {
        let h_sys = HermitianOperator::from_rows(&[vec![1.0, 1.0, 0.0], vec![1.0, 0.0, 1.0], vec![0.0, 1.0, -1.0]])
            .expect("symmetric");
        let coupling_op = HermitianOperator::diag(&[1.0, 0.0, -0.5]);
        Self { h_sys, coupling_op }
    }

    pub fn dim(&self) -> usize {
        self.h_sys.dim()
    }

    /// Same model in a rotated basis: `U H U†`, `U A U†`.
    pub fn conjugated_by(&self, u: faer::MatRef<'_, c64>) -> Result<Self> {
        Self::new(self.h_sys.conjugated_by(u)?, self.coupling_op.conjugated_by(u)?)
    }
}

/// Group the eigenvalues of `a` into clusters and build one orthogonal
/// projector per cluster.
///
/// Eigenvalues are scanned in ascending order; a gap `<= tol` to the previous
/// eigenvalue joins its cluster. Each cluster is labelled by the mean of its
/// members. If `tol` exceeds the whole spectral range the family collapses to
/// the identity and is flagged.
pub fn cluster_coupling_operator(a: &HermitianOperator, tol: f64) -> Result<ProjectorFamily> {
    if !(tol >= 0.0 && tol.is_finite()) {
        return Err(Error::InvalidInput(format!(
            "cluster tolerance must be finite and nonnegative, got {tol}"
        )));
    }
    let eig = hermitian_eig(a)?;
    let vals = eig.eigenvalues();
    let n = vals.len();
    let range = vals[n - 1] - vals[0];

    let mut groups: Vec<Vec<usize>> = vec![vec![0]];
    for k in 1..n {
        if vals[k] - vals[k - 1] <= tol {
            groups.last_mut().unwrap().push(k);
        } else {
            groups.push(vec![k]);
        }
    }

    let v = eig.eigenvectors();
    let mut cluster_values = Vec::with_capacity(groups.len());
    let mut projectors = Vec::with_capacity(groups.len());
    for g in &groups {
        cluster_values.push(g.iter().map(|&k| vals[k]).sum::<f64>() / g.len() as f64);
        let p = Mat::from_fn(n, n, |i, j| {
            g.iter().map(|&k| v[(i, k)] * v[(j, k)].conj()).sum::<c64>()
        });
        projectors.push(HermitianOperator::from_mat(p)?);
    }
    let family = ProjectorFamily::new(cluster_values, projectors, tol)?;
    if tol > range {
        warn!("cluster tolerance {tol:e} exceeds the spectral range {range:e}; single cluster");
        Ok(family.mark_collapsed())
    } else {
        Ok(family)
    }
}
