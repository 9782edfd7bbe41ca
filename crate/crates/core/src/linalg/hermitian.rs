use faer::{c64, Mat, MatRef};

use crate::error::{Error, Result};

/// Relative asymmetry accepted (and then removed) at construction.
pub const HERMITICITY_TOL: f64 = 1e-12;

/// Dense complex Hermitian matrix.
///
/// Construction symmetrizes the input as `(H + H†)/2` after checking that the
/// asymmetry is at round-off level, so every value of this type is exactly
/// Hermitian. Whether all entries are real is recorded once; the eigensolver
/// uses it to pick the real symmetric path.
#[derive(Clone, Debug)]
pub struct HermitianOperator {
    mat: Mat<c64>,
    real: bool,
}

impl HermitianOperator {
    pub fn from_mat(mat: Mat<c64>) -> Result<Self> {
        let (rows, cols) = (mat.nrows(), mat.ncols());
        if rows != cols || rows == 0 {
            return Err(Error::NotSquare { rows, cols });
        }
        let n = rows;
        let mut scale = 0.0f64;
        let mut asym = 0.0f64;
        for j in 0..n {
            for i in 0..n {
                let a = mat[(i, j)];
                scale = scale.max(a.norm());
                asym = asym.max((a - mat[(j, i)].conj()).norm());
            }
        }
        if !scale.is_finite() || !asym.is_finite() {
            return Err(Error::InvalidInput("matrix has non-finite entries".into()));
        }
        if asym > HERMITICITY_TOL * scale {
            return Err(Error::NotHermitian {
                max_asymmetry: asym,
                scale,
            });
        }
        let sym = Mat::from_fn(n, n, |i, j| (mat[(i, j)] + mat[(j, i)].conj()) * 0.5);
        Ok(Self::from_symmetrized(sym))
    }

    /// Real symmetric input; the imaginary part is identically zero.
    pub fn from_real(mat: Mat<f64>) -> Result<Self> {
        Self::from_mat(Mat::from_fn(mat.nrows(), mat.ncols(), |i, j| {
            c64::new(mat[(i, j)], 0.0)
        }))
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let n = rows.len();
        if let Some(bad) = rows.iter().find(|r| r.len() != n) {
            return Err(Error::NotSquare {
                rows: n,
                cols: bad.len(),
            });
        }
        Self::from_real(Mat::from_fn(n, n, |i, j| rows[i][j]))
    }

    pub fn diag(values: &[f64]) -> Self {
        let n = values.len();
        assert!(n > 0, "empty diagonal");
        let mat = Mat::from_fn(n, n, |i, j| {
            if i == j {
                c64::new(values[i], 0.0)
            } else {
                c64::new(0.0, 0.0)
            }
        });
        Self { mat, real: true }
    }

    pub fn identity(n: usize) -> Self {
        Self::diag(&vec![1.0; n])
    }

    pub fn zeros(n: usize) -> Self {
        Self::diag(&vec![0.0; n])
    }

    fn from_symmetrized(mat: Mat<c64>) -> Self {
        let n = mat.nrows();
        let mut real = true;
        'outer: for j in 0..n {
            for i in 0..n {
                if mat[(i, j)].im != 0.0 {
                    real = false;
                    break 'outer;
                }
            }
        }
        Self { mat, real }
    }

    pub fn dim(&self) -> usize {
        self.mat.nrows()
    }

    pub fn mat(&self) -> MatRef<'_, c64> {
        self.mat.as_ref()
    }

    pub fn into_mat(self) -> Mat<c64> {
        self.mat
    }

    pub fn get(&self, i: usize, j: usize) -> c64 {
        self.mat[(i, j)]
    }

    pub fn is_real(&self) -> bool {
        self.real
    }

    /// Real part of the entries (the whole matrix when [`Self::is_real`]).
    pub fn real_part(&self) -> Mat<f64> {
        Mat::from_fn(self.dim(), self.dim(), |i, j| self.mat[(i, j)].re)
    }

    pub fn trace(&self) -> f64 {
        (0..self.dim()).map(|i| self.mat[(i, i)].re).sum()
    }

    pub fn diagonal(&self) -> Vec<f64> {
        (0..self.dim()).map(|i| self.mat[(i, i)].re).collect()
    }

    /// Largest entry modulus.
    pub fn max_abs(&self) -> f64 {
        let n = self.dim();
        let mut m = 0.0f64;
        for j in 0..n {
            for i in 0..n {
                m = m.max(self.mat[(i, j)].norm());
            }
        }
        m
    }

    /// Max-norm distance to another operator of the same dimension.
    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        assert_eq!(self.dim(), other.dim());
        let n = self.dim();
        let mut m = 0.0f64;
        for j in 0..n {
            for i in 0..n {
                m = m.max((self.mat[(i, j)] - other.mat[(i, j)]).norm());
            }
        }
        m
    }

    pub fn scaled(&self, s: f64) -> Self {
        let n = self.dim();
        Self {
            mat: Mat::from_fn(n, n, |i, j| self.mat[(i, j)] * s),
            real: self.real,
        }
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.zip_with(other, |a, b| a + b)
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.zip_with(other, |a, b| a - b)
    }

    fn zip_with(&self, other: &Self, f: impl Fn(c64, c64) -> c64) -> Result<Self> {
        if self.dim() != other.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                found: other.dim(),
            });
        }
        let n = self.dim();
        Ok(Self::from_symmetrized(Mat::from_fn(n, n, |i, j| {
            f(self.mat[(i, j)], other.mat[(i, j)])
        })))
    }

    /// `U H U†` for a square `U` of matching dimension.
    pub fn conjugated_by(&self, u: MatRef<'_, c64>) -> Result<Self> {
        if u.nrows() != self.dim() || u.ncols() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                found: u.nrows(),
            });
        }
        let prod = u * self.mat.as_ref() * u.adjoint();
        Self::from_mat(prod)
    }

    /// Whether `self` and `other` commute, measured in the max norm.
    pub fn commutator_norm(&self, other: &Self) -> f64 {
        let ab = self.mat.as_ref() * other.mat.as_ref();
        let ba = other.mat.as_ref() * self.mat.as_ref();
        let n = self.dim();
        let mut m = 0.0f64;
        for j in 0..n {
            for i in 0..n {
                m = m.max((ab[(i, j)] - ba[(i, j)]).norm());
            }
        }
        m
    }
}

impl PartialEq for HermitianOperator {
    fn eq(&self, other: &Self) -> bool {
        self.dim() == other.dim() && self.max_abs_diff(other) == 0.0
    }
}
