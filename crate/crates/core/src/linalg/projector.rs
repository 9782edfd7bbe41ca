use faer::{c64, Mat};

use super::hermitian::HermitianOperator;
use crate::error::{Error, Result};

pub const PROJECTOR_TOL: f64 = 1e-10;

/// Orthogonal eigenprojectors of a coupling operator, one per eigenvalue
/// cluster, ordered by ascending cluster value.
#[derive(Clone, Debug)]
pub struct ProjectorFamily {
    cluster_values: Vec<f64>,
    projectors: Vec<HermitianOperator>,
    cluster_tolerance: f64,
    collapsed: bool,
}

impl ProjectorFamily {
    /// Validates idempotence, completeness, mutual orthogonality and cluster
    /// separation.
    pub fn new(cluster_values: Vec<f64>, projectors: Vec<HermitianOperator>, cluster_tolerance: f64) -> Result<Self> {
        let fail = |msg: String| Err(Error::InvalidProjectors(msg));
        if projectors.is_empty() || cluster_values.len() != projectors.len() {
            return fail(format!(
                "{} cluster values for {} projectors",
                cluster_values.len(),
                projectors.len()
            ));
        }
        if !(cluster_tolerance >= 0.0) {
            return fail(format!("cluster tolerance {cluster_tolerance} is negative"));
        }
        for w in cluster_values.windows(2) {
            if !(w[1] - w[0] > cluster_tolerance) {
                return fail(format!(
                    "cluster values {} and {} are not separated by more than {}",
                    w[0], w[1], cluster_tolerance
                ));
            }
        }
        let n = projectors[0].dim();
        let mut sum = Mat::<c64>::zeros(n, n);
        for (i, p) in projectors.iter().enumerate() {
            if p.dim() != n {
                return Err(Error::DimensionMismatch {
                    expected: n,
                    found: p.dim(),
                });
            }
            let p2 = p.mat() * p.mat();
            if max_diff(&p2, p) > PROJECTOR_TOL {
                return fail(format!("projector {i} is not idempotent"));
            }
            for (j, q) in projectors.iter().enumerate().skip(i + 1) {
                let pq = p.mat() * q.mat();
                let m = max_abs(&pq);
                if m > PROJECTOR_TOL {
                    return fail(format!("projectors {i} and {j} overlap ({m:e})"));
                }
            }
            sum += p.mat();
        }
        let id = HermitianOperator::identity(n);
        if max_diff(&sum, &id) > PROJECTOR_TOL {
            return fail("projectors do not resolve the identity".into());
        }
        Ok(Self {
            cluster_values,
            projectors,
            cluster_tolerance,
            collapsed: false,
        })
    }

    pub(crate) fn mark_collapsed(mut self) -> Self {
        self.collapsed = true;
        self
    }

    pub fn cluster_values(&self) -> &[f64] {
        &self.cluster_values
    }

    pub fn projectors(&self) -> &[HermitianOperator] {
        &self.projectors
    }

    pub fn cluster_tolerance(&self) -> f64 {
        self.cluster_tolerance
    }

    /// Set when the tolerance exceeded the spectral range and every
    /// eigenvalue was merged into one cluster.
    pub fn collapsed(&self) -> bool {
        self.collapsed
    }

    pub fn len(&self) -> usize {
        self.projectors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.projectors.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.projectors[0].dim()
    }

    pub fn ranks(&self) -> Vec<usize> {
        self.projectors.iter().map(|p| p.trace().round() as usize).collect()
    }

    pub fn iter(&self) -> impl Iterator<Item = (f64, &HermitianOperator)> {
        self.cluster_values.iter().copied().zip(self.projectors.iter())
    }
}

fn max_abs(m: &Mat<c64>) -> f64 {
    let mut out = 0.0f64;
    for j in 0..m.ncols() {
        for i in 0..m.nrows() {
            out = out.max(m[(i, j)].norm());
        }
    }
    out
}

fn max_diff(m: &Mat<c64>, h: &HermitianOperator) -> f64 {
    let mut out = 0.0f64;
    for j in 0..m.ncols() {
        for i in 0..m.nrows() {
            out = out.max((m[(i, j)] - h.get(i, j)).norm());
        }
    }
    out
}
