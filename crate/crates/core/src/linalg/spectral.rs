use faer::{c64, Mat, MatRef, Side};

use super::hermitian::HermitianOperator;
use crate::error::{Error, Result};

#[derive(Clone, Debug)]
enum Eigenvectors {
    Real(Mat<f64>),
    Complex(Mat<c64>),
}

/// Eigenvalues in ascending order with orthonormal eigenvector columns.
///
/// Real symmetric input keeps real eigenvectors.
#[derive(Clone, Debug)]
pub struct SpectralDecomposition {
    eigenvalues: Vec<f64>,
    eigenvectors: Eigenvectors,
}

impl SpectralDecomposition {
    pub fn eigenvalues(&self) -> &[f64] {
        &self.eigenvalues
    }

    /// Eigenvector matrix (columns), as complex entries.
    pub fn eigenvectors(&self) -> Mat<c64> {
        match &self.eigenvectors {
            Eigenvectors::Real(v) => Mat::from_fn(v.nrows(), v.ncols(), |i, k| c64::new(v[(i, k)], 0.0)),
            Eigenvectors::Complex(v) => v.clone(),
        }
    }

    pub(crate) fn real_eigenvectors(&self) -> Option<MatRef<'_, f64>> {
        match &self.eigenvectors {
            Eigenvectors::Real(v) => Some(v.as_ref()),
            Eigenvectors::Complex(_) => None,
        }
    }

    pub fn dim(&self) -> usize {
        self.eigenvalues.len()
    }

    pub fn ground_energy(&self) -> f64 {
        self.eigenvalues[0]
    }

    /// `e^{-beta (lambda_n - lambda_0)}`, so the ground weight is exactly one.
    pub fn shifted_boltzmann_weights(&self, beta: f64) -> Vec<f64> {
        let e0 = self.ground_energy();
        self.eigenvalues.iter().map(|&e| (-beta * (e - e0)).exp()).collect()
    }

    /// `ln Tr e^{-beta H}`, evaluated without overflow.
    pub fn log_partition(&self, beta: f64) -> f64 {
        let z: f64 = self.shifted_boltzmann_weights(beta).iter().sum();
        -beta * self.ground_energy() + z.ln()
    }

    /// `V f(diag(lambda)) V†`.
    pub fn apply_function(&self, f: impl Fn(f64) -> f64) -> Result<HermitianOperator> {
        let n = self.dim();
        let fvals: Vec<f64> = self.eigenvalues.iter().map(|&e| f(e)).collect();
        let v = self.eigenvectors();
        let scaled = Mat::from_fn(n, n, |i, k| v[(i, k)] * fvals[k]);
        HermitianOperator::from_mat(scaled.as_ref() * v.adjoint())
    }

    /// `max |V†V - I|`.
    pub fn orthonormality_residual(&self) -> f64 {
        let v = self.eigenvectors();
        let g = v.adjoint() * &v;
        let n = self.dim();
        let mut m = 0.0f64;
        for j in 0..n {
            for i in 0..n {
                let target = if i == j { 1.0 } else { 0.0 };
                m = m.max((g[(i, j)] - c64::new(target, 0.0)).norm());
            }
        }
        m
    }

    /// `max |V diag(lambda) V† - H|`.
    pub fn reconstruction_residual(&self, h: &HermitianOperator) -> f64 {
        match self.apply_function(|e| e) {
            Ok(r) => r.max_abs_diff(h),
            Err(_) => f64::INFINITY,
        }
    }
}

/// Full eigendecomposition of a Hermitian operator.
///
/// Real symmetric input takes the real solver, which is several times faster
/// at the dimensions reached by the grid Hamiltonians.
pub fn hermitian_eig(h: &HermitianOperator) -> Result<SpectralDecomposition> {
    let n = h.dim();
    let (mut eigenvalues, mut eigenvectors) = if h.is_real() {
        let re = h.real_part();
        let evd = re.self_adjoint_eigen(Side::Lower).map_err(|_| Error::EigenFailure)?;
        let vals: Vec<f64> = (0..n).map(|k| evd.S()[k]).collect();
        (vals, Eigenvectors::Real(evd.U().to_owned()))
    } else {
        let evd = h
            .mat()
            .self_adjoint_eigen(Side::Lower)
            .map_err(|_| Error::EigenFailure)?;
        let vals: Vec<f64> = (0..n).map(|k| evd.S()[k].re).collect();
        (vals, Eigenvectors::Complex(evd.U().to_owned()))
    };
    if eigenvalues.windows(2).any(|w| w[1] < w[0]) {
        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by(|&a, &b| eigenvalues[a].total_cmp(&eigenvalues[b]));
        eigenvectors = match eigenvectors {
            Eigenvectors::Real(v) => Eigenvectors::Real(Mat::from_fn(n, n, |i, k| v[(i, order[k])])),
            Eigenvectors::Complex(v) => Eigenvectors::Complex(Mat::from_fn(n, n, |i, k| v[(i, order[k])])),
        };
        eigenvalues = order.iter().map(|&k| eigenvalues[k]).collect();
    }
    Ok(SpectralDecomposition {
        eigenvalues,
        eigenvectors,
    })
}

/// Eigenvalues only.
pub fn hermitian_eigenvalues(h: &HermitianOperator) -> Result<Vec<f64>> {
    let mut vals: Vec<f64> = if h.is_real() {
        h.real_part()
            .self_adjoint_eigenvalues(Side::Lower)
            .map_err(|_| Error::EigenFailure)?
    } else {
        h.mat()
            .self_adjoint_eigenvalues(Side::Lower)
            .map_err(|_| Error::EigenFailure)?
    };
    vals.sort_by(f64::total_cmp);
    Ok(vals)
}

/// `e^{-beta H}` stored as `exp(log_prefactor) * kernel`.
///
/// The kernel is `V e^{-beta (lambda - lambda_min)} V†`, whose largest
/// eigenvalue is one, so it never overflows.
#[derive(Clone, Debug)]
pub struct BoltzmannOperator {
    pub kernel: HermitianOperator,
    pub log_prefactor: f64,
}

pub fn boltzmann_exp(h: &HermitianOperator, beta: f64) -> Result<BoltzmannOperator> {
    check_beta(beta)?;
    let spec = hermitian_eig(h)?;
    let e0 = spec.ground_energy();
    let kernel = spec.apply_function(|e| (-beta * (e - e0)).exp())?;
    Ok(BoltzmannOperator {
        kernel,
        log_prefactor: -beta * e0,
    })
}

pub(crate) fn check_beta(beta: f64) -> Result<()> {
    if beta.is_finite() && beta > 0.0 {
        Ok(())
    } else {
        Err(Error::InvalidBeta(beta))
    }
}
