#![allow(dead_code)]

use faer::{c64, Mat};
use mfgs_core::linalg::HermitianOperator;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Entrywise Kronecker product, written out index by index.
pub fn kron_dense(a: &Mat<c64>, b: &Mat<c64>) -> Mat<c64> {
    let (m, n) = (a.nrows(), b.nrows());
    let mut out = Mat::<c64>::zeros(m * n, m * n);
    for i in 0..m {
        for j in 0..m {
            for k in 0..n {
                for l in 0..n {
                    out[(i * n + k, j * n + l)] = a[(i, j)] * b[(k, l)];
                }
            }
        }
    }
    out
}

pub fn real_mat(rows: &[Vec<f64>]) -> Mat<c64> {
    let n = rows.len();
    Mat::from_fn(n, n, |i, j| c64::new(rows[i][j], 0.0))
}

pub fn diag_mat(d: &[f64]) -> Mat<c64> {
    let n = d.len();
    Mat::from_fn(n, n, |i, j| {
        if i == j {
            c64::new(d[i], 0.0)
        } else {
            c64::new(0.0, 0.0)
        }
    })
}

pub fn eye(n: usize) -> Mat<c64> {
    diag_mat(&vec![1.0; n])
}

/// Hard-wall finite-difference kinetic energy, built directly.
pub fn kinetic(n: usize, dq: f64, mass: f64) -> Mat<c64> {
    Mat::from_fn(n, n, |i, j| {
        let v = if i == j {
            1.0 / (mass * dq * dq)
        } else if i.abs_diff(j) == 1 {
            -0.5 / (mass * dq * dq)
        } else {
            0.0
        };
        c64::new(v, 0.0)
    })
}

pub fn linspace(a: f64, b: f64, n: usize) -> Vec<f64> {
    (0..n).map(|k| a + (b - a) * k as f64 / (n - 1) as f64).collect()
}

pub fn max_diff(a: &Mat<c64>, b: faer::MatRef<'_, c64>) -> f64 {
    let mut m = 0.0f64;
    for i in 0..a.nrows() {
        for j in 0..a.ncols() {
            m = m.max((a[(i, j)] - b[(i, j)]).norm());
        }
    }
    m
}

pub fn random_hermitian(n: usize, rng: &mut impl Rng, complex: bool) -> HermitianOperator {
    let mut m = Mat::<c64>::zeros(n, n);
    for i in 0..n {
        m[(i, i)] = c64::new(rng.random_range(-1.0..1.0), 0.0);
        for j in 0..i {
            let im = if complex { rng.random_range(-1.0..1.0) } else { 0.0 };
            let z = c64::new(rng.random_range(-1.0..1.0), im);
            m[(i, j)] = z;
            m[(j, i)] = z.conj();
        }
    }
    HermitianOperator::from_mat(m).unwrap()
}

/// Random density matrix `X X† / Tr`.
pub fn random_density(n: usize, rng: &mut impl Rng) -> HermitianOperator {
    let x = Mat::<c64>::from_fn(n, n, |_, _| {
        c64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))
    });
    let p = &x * x.adjoint();
    let tr: f64 = (0..n).map(|i| p[(i, i)].re).sum();
    HermitianOperator::from_mat(Mat::from_fn(n, n, |i, j| p[(i, j)] / tr)).unwrap()
}

/// Random unitary from the Gram-Schmidt of a complex random matrix.
pub fn random_unitary(n: usize, rng: &mut impl Rng) -> Mat<c64> {
    let mut q = Mat::<c64>::from_fn(n, n, |_, _| {
        c64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))
    });
    for j in 0..n {
        for k in 0..j {
            let dot: c64 = (0..n).map(|i| q[(i, k)].conj() * q[(i, j)]).sum();
            for i in 0..n {
                let v = q[(i, k)];
                q[(i, j)] -= dot * v;
            }
        }
        let nrm: f64 = (0..n).map(|i| q[(i, j)].norm_sqr()).sum::<f64>().sqrt();
        for i in 0..n {
            q[(i, j)] /= nrm;
        }
    }
    q
}
