use faer::{c64, Mat};
use serde::{Deserialize, Serialize};

use super::grid::EnvGrid;
use super::potential::{FreePotential, PolynomialPotential, ZwanzigEnvSpec};
use super::system::SystemModel;
use crate::error::{Error, Result};
use crate::linalg::{check_beta, hermitian_eig, CompositeDims, HermitianOperator};

/// Model families with an exact single-particle environment.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Family {
    Cl,
    Gcl,
    Gcl2,
    Zwanzig,
    ZwanzigCv,
}

impl Family {
    pub const ALL: [Family; 5] = [
        Family::Cl,
        Family::Gcl,
        Family::Gcl2,
        Family::Zwanzig,
        Family::ZwanzigCv,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            Family::Cl => "CL",
            Family::Gcl => "GCL",
            Family::Gcl2 => "GCL2",
            Family::Zwanzig => "ZWANZIG",
            Family::ZwanzigCv => "ZWANZIG_CV",
        }
    }

    pub fn uses_polynomial_coupling(&self) -> bool {
        matches!(self, Family::Cl | Family::Gcl | Family::Gcl2)
    }
}

impl std::fmt::Display for Family {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

/// Continuous-variable system `p^2/2m + V(q)` on its own grid; the coupling
/// operator is the position `q`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CvSystem {
    pub grid: EnvGrid,
    pub potential: FreePotential,
}

impl CvSystem {
    pub fn hamiltonian(&self) -> Result<HermitianOperator> {
        single_particle_hamiltonian(&self.grid, |q| self.potential.value(q))
    }
}

#[derive(Clone, Debug)]
pub enum SystemPayload {
    Discrete(SystemModel),
    Continuous(CvSystem),
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum EnvPotential {
    Polynomial { coeffs: PolynomialPotential },
    Zwanzig(ZwanzigEnvSpec),
}

/// Everything needed to assemble one system-environment Hamiltonian.
#[derive(Clone, Debug)]
pub struct ModelSpec {
    pub family: Family,
    pub system: SystemPayload,
    pub env: EnvGrid,
    pub potential: EnvPotential,
    pub coupling: f64,
    pub beta: f64,
}

impl ModelSpec {
    pub fn validate(&self) -> Result<()> {
        check_beta(self.beta)?;
        self.env.validate()?;
        if !(self.coupling.is_finite() && self.coupling >= 0.0) {
            return Err(Error::InvalidModel(format!(
                "coupling must be finite and nonnegative, got {}",
                self.coupling
            )));
        }
        let payload_ok = match (self.family, &self.system, &self.potential) {
            (Family::Cl, SystemPayload::Discrete(_), EnvPotential::Polynomial { coeffs }) => {
                if !coeffs.is_harmonic() {
                    return Err(Error::InvalidModel(
                        "CL family needs a purely quadratic potential (a4 = a6 = 0)".into(),
                    ));
                }
                true
            }
            (Family::Gcl | Family::Gcl2, SystemPayload::Discrete(_), EnvPotential::Polynomial { .. }) => true,
            (Family::Zwanzig, SystemPayload::Discrete(_), EnvPotential::Zwanzig(_)) => true,
            (Family::ZwanzigCv, SystemPayload::Continuous(cv), EnvPotential::Zwanzig(_)) => {
                cv.grid.validate()?;
                true
            }
            _ => false,
        };
        if payload_ok {
            Ok(())
        } else {
            Err(Error::InvalidModel(format!(
                "system/potential payload does not match family {}",
                self.family
            )))
        }
    }

    pub fn discrete_system(&self) -> Option<&SystemModel> {
        match &self.system {
            SystemPayload::Discrete(s) => Some(s),
            SystemPayload::Continuous(_) => None,
        }
    }

    pub fn with_coupling(&self, coupling: f64) -> Self {
        Self {
            coupling,
            ..self.clone()
        }
    }

    pub fn with_env(&self, env: EnvGrid) -> Self {
        Self { env, ..self.clone() }
    }
}

/// `K + V(Q)` for one particle on a grid.
pub fn single_particle_hamiltonian(grid: &EnvGrid, potential: impl Fn(f64) -> f64) -> Result<HermitianOperator> {
    grid.validate()?;
    let n = grid.n_points;
    let pts = grid.points();
    let (d, o) = grid.kinetic_stencil();
    let m = Mat::from_fn(n, n, |i, j| {
        if i == j {
            d + potential(pts[i])
        } else if i.abs_diff(j) == 1 {
            o
        } else {
            0.0
        }
    });
    HermitianOperator::from_real(m)
}

/// Eigenbasis of the coupling operator. Diagonal input is used as is so that
/// no rounding enters through the eigenvectors.
fn coupling_basis(a: &HermitianOperator) -> Result<(Mat<c64>, Vec<f64>)> {
    let n = a.dim();
    let diagonal = (0..n).all(|i| (0..n).all(|j| i == j || a.get(i, j) == c64::new(0.0, 0.0)));
    if diagonal {
        Ok((Mat::identity(n, n), a.diagonal()))
    } else {
        let eig = hermitian_eig(a)?;
        Ok((eig.eigenvectors(), eig.eigenvalues().to_vec()))
    }
}

/// `H_S ⊗ I + I ⊗ (K + onsite(Q)) + W`, where `W` is diagonal in the joint
/// eigenbasis of `A ⊗ I` and `I ⊗ Q` with entries `interaction(q_k, alpha_i)`.
///
/// `W` acts as a `d x d` block `U diag(interaction(q_k, alpha)) U†` on every
/// environment grid point, so it is assembled blockwise.
pub fn assemble_coupled(
    h_sys: &HermitianOperator,
    coupling_op: &HermitianOperator,
    grid: &EnvGrid,
    onsite: impl Fn(f64) -> f64,
    interaction: impl Fn(f64, f64) -> f64,
) -> Result<(HermitianOperator, CompositeDims)> {
    grid.validate()?;
    if h_sys.dim() != coupling_op.dim() {
        return Err(Error::DimensionMismatch {
            expected: h_sys.dim(),
            found: coupling_op.dim(),
        });
    }
    let d = h_sys.dim();
    let ne = grid.n_points;
    let dims = CompositeDims::new(d, ne);
    let pts = grid.points();
    let (kd, ko) = grid.kinetic_stencil();
    let (u, alphas) = coupling_basis(coupling_op)?;

    let mut h = Mat::<c64>::zeros(dims.total(), dims.total());
    let mut w = vec![0.0; d];
    for (k, &q) in pts.iter().enumerate() {
        for (wi, &alpha) in w.iter_mut().zip(&alphas) {
            *wi = interaction(q, alpha);
        }
        for a in 0..d {
            for b in 0..d {
                let mut block = h_sys.get(a, b);
                for i in 0..d {
                    block += u[(a, i)] * u[(b, i)].conj() * w[i];
                }
                h[(dims.index(a, k), dims.index(b, k))] += block;
            }
        }
    }
    for a in 0..d {
        for (k, &q) in pts.iter().enumerate() {
            let r = dims.index(a, k);
            h[(r, r)] += c64::new(kd + onsite(q), 0.0);
            if k + 1 < ne {
                h[(r, r + 1)] += c64::new(ko, 0.0);
                h[(r + 1, r)] += c64::new(ko, 0.0);
            }
        }
    }
    Ok((HermitianOperator::from_mat(h)?, dims))
}

/// Polynomial-coupled families: `H_S + P^2/2M + V(Q - c A)`.
pub fn build_gcl_hamiltonian(spec: &ModelSpec) -> Result<(HermitianOperator, CompositeDims)> {
    spec.validate()?;
    let (system, potential) = match (&spec.system, &spec.potential) {
        (SystemPayload::Discrete(s), EnvPotential::Polynomial { coeffs }) if spec.family.uses_polynomial_coupling() => {
            (s, *coeffs)
        }
        _ => {
            return Err(Error::InvalidModel(format!(
                "family {} is not polynomially coupled",
                spec.family
            )))
        }
    };
    let c = spec.coupling;
    assemble_coupled(
        &system.h_sys,
        &system.coupling_op,
        &spec.env,
        |_| 0.0,
        |q, alpha| potential.value(q - c * alpha),
    )
}

/// Spring-coupled discrete model:
/// `H_S + P^2/2M + U_free(Q) + (c/2)(Q - A - x_k)^2`, without counter term.
pub fn build_zwanzig_hamiltonian(spec: &ModelSpec) -> Result<(HermitianOperator, CompositeDims)> {
    spec.validate()?;
    let (system, env) = match (&spec.system, &spec.potential) {
        (SystemPayload::Discrete(s), EnvPotential::Zwanzig(z)) if spec.family == Family::Zwanzig => (s, *z),
        _ => {
            return Err(Error::InvalidModel(format!(
                "family {} is not the discrete spring-coupled model",
                spec.family
            )))
        }
    };
    let half_c = 0.5 * spec.coupling;
    assemble_coupled(
        &system.h_sys,
        &system.coupling_op,
        &spec.env,
        |q| env.free_value(q),
        |q, alpha| half_c * env.spring(q - alpha),
    )
}

/// Two-grid spring-coupled model with coupling operator `q`:
/// `(K_s + V(Q_s)) ⊗ I + I ⊗ (K_e + U_free(Q_e)) + (c/2)(Q_e - Q_s - x_k)^2`.
pub fn build_cv_zwanzig_hamiltonian(
    sys: &CvSystem,
    env_grid: &EnvGrid,
    env: &ZwanzigEnvSpec,
    coupling: f64,
) -> Result<(HermitianOperator, CompositeDims)> {
    let h_sys = sys.hamiltonian()?;
    let q_sys = HermitianOperator::diag(&sys.grid.points());
    let half_c = 0.5 * coupling;
    assemble_coupled(
        &h_sys,
        &q_sys,
        env_grid,
        |q| env.free_value(q),
        |q, x| half_c * env.spring(q - x),
    )
}

/// Dispatch on the family.
pub fn build_hamiltonian(spec: &ModelSpec) -> Result<(HermitianOperator, CompositeDims)> {
    match spec.family {
        Family::Cl | Family::Gcl | Family::Gcl2 => build_gcl_hamiltonian(spec),
        Family::Zwanzig => build_zwanzig_hamiltonian(spec),
        Family::ZwanzigCv => {
            spec.validate()?;
            match (&spec.system, &spec.potential) {
                (SystemPayload::Continuous(cv), EnvPotential::Zwanzig(z)) => {
                    build_cv_zwanzig_hamiltonian(cv, &spec.env, z, spec.coupling)
                }
                _ => unreachable!("validated payload"),
            }
        }
    }
}

/// Largest `|A_i|` over the coupling spectrum.
fn max_abs_coupling_eigenvalue(system: &SystemModel) -> Result<f64> {
    let (_, alphas) = coupling_basis(&system.coupling_op)?;
    Ok(alphas.iter().fold(0.0f64, |m, a| m.max(a.abs())))
}

/// `[-8 - c max|A_i|, 8 + c max|A_i|]`, wide enough to hold every displaced
/// well `Q = c A_i`.
pub fn default_gcl_grid(system: &SystemModel, coupling: f64, n_points: usize, mass: f64) -> Result<EnvGrid> {
    let reach = coupling.abs() * max_abs_coupling_eigenvalue(system)?;
    EnvGrid::new(-8.0 - reach, 8.0 + reach, n_points, mass)
}

/// `[min A_i - 6, max A_i + 6]`, around the spring minima `Q = A_i + x_k`.
pub fn default_zwanzig_grid(system: &SystemModel, env: &ZwanzigEnvSpec, n_points: usize, mass: f64) -> Result<EnvGrid> {
    let (_, alphas) = coupling_basis(&system.coupling_op)?;
    let lo = alphas.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = alphas.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    EnvGrid::new(lo - 6.0 + env.spring_min, hi + 6.0 + env.spring_min, n_points, mass)
}
