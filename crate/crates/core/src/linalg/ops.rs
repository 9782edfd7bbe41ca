use faer::{c64, Mat};
use serde::{Deserialize, Serialize};

use super::density::DensityMatrix;
use super::hermitian::HermitianOperator;
use super::projector::ProjectorFamily;
use super::spectral::{hermitian_eigenvalues, SpectralDecomposition};
use crate::error::{Error, Result};

/// Tensor-factor bookkeeping for a system ⊗ environment space. The system
/// index is the slow one: composite index `(a, k)` maps to `a * env_dim + k`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CompositeDims {
    pub sys_dim: usize,
    pub env_dim: usize,
}

impl CompositeDims {
    pub fn new(sys_dim: usize, env_dim: usize) -> Self {
        assert!(sys_dim > 0 && env_dim > 0, "factor dimensions must be positive");
        Self { sys_dim, env_dim }
    }

    pub fn total(&self) -> usize {
        self.sys_dim * self.env_dim
    }

    pub fn index(&self, a: usize, k: usize) -> usize {
        a * self.env_dim + k
    }

    fn check(&self, dim: usize) -> Result<()> {
        if dim == self.total() {
            Ok(())
        } else {
            Err(Error::DimensionMismatch {
                expected: self.total(),
                found: dim,
            })
        }
    }
}

/// Kronecker product `A ⊗ B`, first factor slow.
pub fn kron(a: &HermitianOperator, b: &HermitianOperator) -> HermitianOperator {
    let (na, nb) = (a.dim(), b.dim());
    let m = Mat::from_fn(na * nb, na * nb, |r, c| a.get(r / nb, c / nb) * b.get(r % nb, c % nb));
    HermitianOperator::from_mat(m).expect("Kronecker product of Hermitian operators is Hermitian")
}

/// `Tr_E`: `out[a][b] = sum_k rho[(a,k)][(b,k)]`.
pub fn partial_trace_env(rho: &HermitianOperator, dims: CompositeDims) -> Result<HermitianOperator> {
    dims.check(rho.dim())?;
    let m = Mat::from_fn(dims.sys_dim, dims.sys_dim, |a, b| {
        (0..dims.env_dim)
            .map(|k| rho.get(dims.index(a, k), dims.index(b, k)))
            .sum()
    });
    HermitianOperator::from_mat(m)
}

/// `Tr_E [V diag(w) V†]` straight from the eigenvectors, without forming the
/// full composite operator. Columns with negligible weight are skipped.
pub(crate) fn partial_trace_spectral(
    spec: &SpectralDecomposition,
    weights: &[f64],
    dims: CompositeDims,
) -> Result<HermitianOperator> {
    dims.check(spec.dim())?;
    let wmax = weights.iter().copied().fold(0.0f64, f64::max);
    let (ns, ne) = (dims.sys_dim, dims.env_dim);
    let mut out = Mat::<c64>::zeros(ns, ns);
    let active = weights.iter().enumerate().filter(|(_, &w)| w > wmax * 1e-20);
    if let Some(v) = spec.real_eigenvectors() {
        for (n, &w) in active {
            let col = v.col(n);
            for a in 0..ns {
                for b in a..ns {
                    let mut acc = 0.0;
                    for k in 0..ne {
                        acc += col[dims.index(a, k)] * col[dims.index(b, k)];
                    }
                    out[(a, b)].re += acc * w;
                }
            }
        }
    } else {
        let v = spec.eigenvectors();
        for (n, &w) in active {
            for a in 0..ns {
                for b in a..ns {
                    let mut acc = c64::new(0.0, 0.0);
                    for k in 0..ne {
                        acc += v[(dims.index(a, k), n)] * v[(dims.index(b, k), n)].conj();
                    }
                    out[(a, b)] += acc * w;
                }
            }
        }
    }
    for a in 0..ns {
        for b in 0..a {
            out[(a, b)] = out[(b, a)].conj();
        }
    }
    HermitianOperator::from_mat(out)
}

/// `½ Σ |eig(rho - sigma)|`.
pub fn trace_distance(rho: &DensityMatrix, sigma: &DensityMatrix) -> Result<f64> {
    let diff = rho.op().sub(sigma.op())?;
    let eig = hermitian_eigenvalues(&diff)?;
    Ok((0.5 * eig.iter().map(|e| e.abs()).sum::<f64>()).clamp(0.0, 1.0))
}

/// Trace norm `Σ |eig(H)|` of a Hermitian operator.
pub fn trace_norm(h: &HermitianOperator) -> Result<f64> {
    Ok(hermitian_eigenvalues(h)?.iter().map(|e| e.abs()).sum())
}

/// `Σ_i P_i H P_i`.
pub fn project_block_diagonal(h: &HermitianOperator, family: &ProjectorFamily) -> Result<HermitianOperator> {
    if h.dim() != family.dim() {
        return Err(Error::DimensionMismatch {
            expected: family.dim(),
            found: h.dim(),
        });
    }
    let n = h.dim();
    let mut acc = Mat::<c64>::zeros(n, n);
    for p in family.projectors() {
        acc += p.mat() * h.mat() * p.mat();
    }
    HermitianOperator::from_mat(acc)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::spectral::hermitian_eig;

    fn sigma_x() -> HermitianOperator {
        HermitianOperator::from_rows(&[vec![0.0, 1.0], vec![1.0, 0.0]]).unwrap()
    }

    #[test]
    fn kron_of_identities_and_diagonals() {
        let i6 = kron(&HermitianOperator::identity(2), &HermitianOperator::identity(3));
        assert_eq!(i6, HermitianOperator::identity(6));
        let d = kron(
            &HermitianOperator::diag(&[1.0, 2.0]),
            &HermitianOperator::diag(&[1.0, 1.0]),
        );
        assert_eq!(d, HermitianOperator::diag(&[1.0, 1.0, 2.0, 2.0]));
    }

    #[test]
    fn kron_sigma_x_spectrum() {
        let xx = kron(&sigma_x(), &sigma_x());
        let e = hermitian_eig(&xx).unwrap();
        let want = [-1.0, -1.0, 1.0, 1.0];
        for (g, w) in e.eigenvalues().iter().zip(want) {
            assert!((g - w).abs() < 1e-14);
        }
    }

    #[test]
    fn partial_trace_examples() {
        let dims = CompositeDims::new(2, 2);
        let r = partial_trace_env(&HermitianOperator::diag(&[0.1, 0.2, 0.3, 0.4]), dims).unwrap();
        assert!(r.max_abs_diff(&HermitianOperator::diag(&[0.3, 0.7])) < 1e-15);

        // (|00> + |11>)/sqrt 2
        let bell = HermitianOperator::from_rows(&[
            vec![0.5, 0.0, 0.0, 0.5],
            vec![0.0, 0.0, 0.0, 0.0],
            vec![0.0, 0.0, 0.0, 0.0],
            vec![0.5, 0.0, 0.0, 0.5],
        ])
        .unwrap();
        let r = partial_trace_env(&bell, dims).unwrap();
        assert!(r.max_abs_diff(&HermitianOperator::diag(&[0.5, 0.5])) < 1e-15);

        let rho_s = HermitianOperator::from_rows(&[vec![0.6, 0.2], vec![0.2, 0.4]]).unwrap();
        let sigma_e = HermitianOperator::diag(&[0.25, 0.25, 0.5]);
        let r = partial_trace_env(&kron(&rho_s, &sigma_e), CompositeDims::new(2, 3)).unwrap();
        assert!(r.max_abs_diff(&rho_s) < 1e-15);
    }

    #[test]
    fn partial_trace_rejects_mismatch() {
        let r = partial_trace_env(&HermitianOperator::identity(5), CompositeDims::new(2, 2));
        assert!(matches!(r, Err(Error::DimensionMismatch { expected: 4, found: 5 })));
    }

    #[test]
    fn trace_distance_examples() {
        let a = DensityMatrix::from_weights(&[0.7, 0.3]).unwrap();
        let b = DensityMatrix::from_weights(&[0.5, 0.5]).unwrap();
        assert!((trace_distance(&a, &b).unwrap() - 0.2).abs() < 1e-15);
        assert_eq!(trace_distance(&a, &a).unwrap(), 0.0);
        let up = DensityMatrix::from_weights(&[1.0, 0.0]).unwrap();
        let down = DensityMatrix::from_weights(&[0.0, 1.0]).unwrap();
        assert!((trace_distance(&up, &down).unwrap() - 1.0).abs() < 1e-15);
        let c = DensityMatrix::from_weights(&[1.0, 0.0, 0.0]).unwrap();
        assert!(trace_distance(&a, &c).is_err());
    }
}
