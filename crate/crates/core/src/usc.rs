//! Closed-form ultrastrong-coupling (USC) limits of the reduced equilibrium
//! state.
//!
//! Every discrete-system state has the form `Gibbs(H̃, beta)` with
//! `H̃ = Σ_i P_i H_S P_i + Σ_i E(A_i) P_i`, where `P_i` projects onto the
//! `i`-th eigenvalue cluster of the coupling operator and `E(A_i)` is a
//! family-specific energy shift:
//!
//! * polynomial coupling invariant under joint shifts (and the bilinear
//!   oscillator model): `E = 0`;
//! * general polynomial coupling: `E(A_i) = -ln Z_env(A_i) / beta`, with
//!   `Z_env(A_i)` the partition function of the environment clamped at
//!   `A = A_i`;
//! * spring coupling: `E(A_i) = Σ_k U_k^free(A_i + x_k)`.
//!
//! The continuous-variable spring-coupled limit keeps the position diagonal
//! of `e^{-beta H_eff}` with the combined mass `m + Σ m_k`.

use serde::{Deserialize, Serialize};

use crate::engine::compute_gibbs;
use crate::error::{Error, Result};
use crate::linalg::{
    check_beta, hermitian_eig, project_block_diagonal, DensityMatrix, HermitianOperator, ProjectorFamily,
};
use crate::models::{
    cluster_coupling_operator, single_particle_hamiltonian, CvSystem, EnvGrid, EnvPotential, Family, ModelSpec,
    PolynomialPotential, SystemModel, SystemPayload, ZwanzigEnvSpec, DEFAULT_CLUSTER_TOL,
};

/// Minimum distance from the well to either wall, in thermal widths.
pub const WELL_MARGIN_WIDTHS: f64 = 4.0;

/// Energy shift attached to one eigenvalue cluster of the coupling operator.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ClusterShift {
    pub cluster_value: f64,
    pub energy: f64,
}

#[derive(Clone, Debug)]
pub struct UscState {
    pub state: DensityMatrix,
    /// `H̃`; for the continuous-variable limit, `H_eff` on the system grid.
    pub effective_hamiltonian: HermitianOperator,
    pub family: Family,
    pub projectors: ProjectorFamily,
    pub shifts: Vec<ClusterShift>,
}

impl UscState {
    /// Largest `‖[rho, P_i]‖_max` over the projector family.
    pub fn max_commutator(&self) -> f64 {
        self.projectors
            .projectors()
            .iter()
            .map(|p| self.state.op().commutator_norm(p))
            .fold(0.0, f64::max)
    }
}

fn gibbs_of_shifted_blocks(
    system: &SystemModel,
    family: &ProjectorFamily,
    shifts: &[f64],
    beta: f64,
) -> Result<(DensityMatrix, HermitianOperator)> {
    let mut h = project_block_diagonal(&system.h_sys, family)?;
    for (p, &e) in family.projectors().iter().zip(shifts) {
        if e != 0.0 {
            h = h.add(&p.scaled(e))?;
        }
    }
    Ok((compute_gibbs(&h, beta)?, h))
}

/// Bilinear oscillator coupling and shift-invariant polynomial coupling:
/// `Gibbs(Σ_i P_i H_S P_i, beta)`.
pub fn usc_cl_gcl2(system: &SystemModel, beta: f64, tol: f64) -> Result<UscState> {
    check_beta(beta)?;
    let family = cluster_coupling_operator(&system.coupling_op, tol)?;
    let zeros = vec![0.0; family.len()];
    let (state, h) = gibbs_of_shifted_blocks(system, &family, &zeros, beta)?;
    let shifts = family
        .cluster_values()
        .iter()
        .map(|&a| ClusterShift {
            cluster_value: a,
            energy: 0.0,
        })
        .collect();
    Ok(UscState {
        state,
        effective_hamiltonian: h,
        family: Family::Gcl2,
        projectors: family,
        shifts,
    })
}

/// One environment particle of the general polynomial-coupled model, with
/// interaction `V(q - c A)`. `grid` is the box for a well at the origin; it is
/// translated onto the well `q = c A_i` for each cluster.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct EnvModeSpec {
    pub grid: EnvGrid,
    pub potential: PolynomialPotential,
    pub coupling: f64,
}

/// Partition function of one mode clamped at one cluster value.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ModePartition {
    pub cluster_value: f64,
    pub grid: EnvGrid,
    pub log_z: f64,
    /// Root-mean-square thermal displacement from the well minimum.
    pub thermal_width: f64,
}

/// `ln Tr e^{-beta [K + V(Q - c A_i)]}` on the mode grid recentered on the
/// well, together with the thermal width used by the wall check.
pub fn gcl_mode_partition(mode: &EnvModeSpec, cluster_value: f64, beta: f64) -> Result<ModePartition> {
    check_beta(beta)?;
    let center = mode.coupling * cluster_value;
    let grid = mode.grid.shifted(center);
    let h = single_particle_hamiltonian(&grid, |q| mode.potential.value(q - center))?;
    let spec = hermitian_eig(&h)?;
    let w = spec.shifted_boltzmann_weights(beta);
    let z: f64 = w.iter().sum();
    let v = spec.real_eigenvectors().expect("grid Hamiltonian is real");
    let pts = grid.points();
    let mut second_moment = 0.0;
    for (n, &wn) in w.iter().enumerate() {
        if wn < 1e-20 {
            continue;
        }
        let col = v.col(n);
        let m: f64 = pts
            .iter()
            .enumerate()
            .map(|(j, q)| col[j] * col[j] * (q - center) * (q - center))
            .sum();
        second_moment += wn * m;
    }
    Ok(ModePartition {
        cluster_value,
        grid,
        log_z: spec.log_partition(beta),
        thermal_width: (second_moment / z).sqrt(),
    })
}

/// General polynomial coupling: cluster shifts `-ln Π_k Z_k(A_i) / beta`.
///
/// Fails with [`Error::WellEscape`] when a recentered box leaves less than
/// four thermal widths between the well and a wall.
pub fn usc_gcl(system: &SystemModel, modes: &[EnvModeSpec], beta: f64, tol: f64) -> Result<UscState> {
    check_beta(beta)?;
    let family = cluster_coupling_operator(&system.coupling_op, tol)?;
    let mut shifts = vec![0.0; family.len()];
    for (mode_idx, mode) in modes.iter().enumerate() {
        mode.grid.validate()?;
        for (i, &a) in family.cluster_values().iter().enumerate() {
            let part = gcl_mode_partition(mode, a, beta)?;
            let center = mode.coupling * a;
            let room = (center - part.grid.q_min).min(part.grid.q_max - center);
            if room < WELL_MARGIN_WIDTHS * part.thermal_width {
                return Err(Error::WellEscape {
                    mode: mode_idx,
                    cluster_value: a,
                    half_width: room,
                    thermal_width: part.thermal_width,
                });
            }
            shifts[i] -= part.log_z / beta;
        }
    }
    let (state, h) = gibbs_of_shifted_blocks(system, &family, &shifts, beta)?;
    Ok(UscState {
        state,
        effective_hamiltonian: h,
        family: Family::Gcl,
        shifts: cluster_shifts(&family, &shifts),
        projectors: family,
    })
}

fn cluster_shifts(family: &ProjectorFamily, shifts: &[f64]) -> Vec<ClusterShift> {
    family
        .cluster_values()
        .iter()
        .zip(shifts)
        .map(|(&cluster_value, &energy)| ClusterShift { cluster_value, energy })
        .collect()
}

/// `U_eff(x) = Σ_k U_k^free(x + x_k)`.
pub fn effective_free_potential(modes: &[ZwanzigEnvSpec], x: f64) -> f64 {
    modes.iter().map(|m| m.free_value(x + m.spring_min)).sum()
}

/// Spring coupling, discrete system: cluster shifts `U_eff(A_i)`.
pub fn usc_zwanzig_discrete(system: &SystemModel, modes: &[ZwanzigEnvSpec], beta: f64, tol: f64) -> Result<UscState> {
    check_beta(beta)?;
    let family = cluster_coupling_operator(&system.coupling_op, tol)?;
    let shifts: Vec<f64> = family
        .cluster_values()
        .iter()
        .map(|&a| effective_free_potential(modes, a))
        .collect();
    if let Some(bad) = shifts.iter().find(|s| !s.is_finite()) {
        return Err(Error::InvalidPotential(format!("free potential evaluates to {bad}")));
    }
    let (state, h) = gibbs_of_shifted_blocks(system, &family, &shifts, beta)?;
    Ok(UscState {
        state,
        effective_hamiltonian: h,
        family: Family::Zwanzig,
        shifts: cluster_shifts(&family, &shifts),
        projectors: family,
    })
}

/// Environment particle of the continuous-variable spring-coupled model.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CvEnvMode {
    pub mass: f64,
    pub env: ZwanzigEnvSpec,
}

/// `H_eff = p^2 / 2 M_eff + V(q) + U_eff(q)` on the system grid, with
/// `M_eff = m + Σ m_k`.
pub fn cv_effective_hamiltonian(sys: &CvSystem, envs: &[CvEnvMode]) -> Result<HermitianOperator> {
    let m_eff = sys.grid.mass + envs.iter().map(|e| e.mass).sum::<f64>();
    let grid = EnvGrid {
        mass: m_eff,
        ..sys.grid
    };
    let modes: Vec<ZwanzigEnvSpec> = envs.iter().map(|e| e.env).collect();
    single_particle_hamiltonian(&grid, |q| sys.potential.value(q) + effective_free_potential(&modes, q))
}

/// Spring coupling, continuous system: normalized diagonal of
/// `e^{-beta H_eff}` in the position basis.
pub fn usc_zwanzig_cv(sys: &CvSystem, envs: &[CvEnvMode], beta: f64) -> Result<DensityMatrix> {
    check_beta(beta)?;
    let h = cv_effective_hamiltonian(sys, envs)?;
    Ok(position_diagonal_of_gibbs(&h, beta)?.0)
}

fn position_diagonal_of_gibbs(h: &HermitianOperator, beta: f64) -> Result<(DensityMatrix, HermitianOperator)> {
    let spec = hermitian_eig(h)?;
    let w = spec.shifted_boltzmann_weights(beta);
    let v = spec.real_eigenvectors().expect("grid Hamiltonian is real");
    let n = h.dim();
    let diag: Vec<f64> = (0..n)
        .map(|j| {
            w.iter()
                .enumerate()
                .filter(|(_, &wn)| wn > 1e-20)
                .map(|(k, &wn)| wn * v[(j, k)] * v[(j, k)])
                .sum()
        })
        .collect();
    Ok((DensityMatrix::from_weights(&diag)?, h.clone()))
}

/// Bilinear coupling, continuous system: `e^{-beta V(q)}` normalized over the
/// grid points.
pub fn usc_cl_cv(potential: impl Fn(f64) -> f64, grid: &EnvGrid, beta: f64) -> Result<DensityMatrix> {
    check_beta(beta)?;
    grid.validate()?;
    let v: Vec<f64> = grid.points().into_iter().map(&potential).collect();
    let vmin = v.iter().copied().fold(f64::INFINITY, f64::min);
    let w: Vec<f64> = v.iter().map(|x| (-beta * (x - vmin)).exp()).collect();
    DensityMatrix::from_weights(&w)
}

/// Rank-one position projectors on a grid.
fn position_projectors(grid: &EnvGrid) -> Result<ProjectorFamily> {
    let pts = grid.points();
    let n = pts.len();
    let projectors = (0..n)
        .map(|j| {
            let mut d = vec![0.0; n];
            d[j] = 1.0;
            HermitianOperator::diag(&d)
        })
        .collect();
    ProjectorFamily::new(pts, projectors, 0.0)
}

/// The USC state a model's exact state approaches, for its family.
pub fn usc_state_for(spec: &ModelSpec) -> Result<UscState> {
    spec.validate()?;
    let tol = DEFAULT_CLUSTER_TOL;
    match (&spec.system, &spec.potential) {
        (SystemPayload::Discrete(s), EnvPotential::Polynomial { coeffs }) => match spec.family {
            Family::Gcl => {
                let hw = spec.env.half_width();
                let mode = EnvModeSpec {
                    grid: EnvGrid::new(-hw, hw, spec.env.n_points, spec.env.mass)?,
                    potential: *coeffs,
                    coupling: spec.coupling,
                };
                usc_gcl(s, &[mode], spec.beta, tol)
            }
            family => {
                let mut u = usc_cl_gcl2(s, spec.beta, tol)?;
                u.family = family;
                Ok(u)
            }
        },
        (SystemPayload::Discrete(s), EnvPotential::Zwanzig(z)) => usc_zwanzig_discrete(s, &[*z], spec.beta, tol),
        (SystemPayload::Continuous(cv), EnvPotential::Zwanzig(z)) => {
            let envs = [CvEnvMode {
                mass: spec.env.mass,
                env: *z,
            }];
            let h = cv_effective_hamiltonian(cv, &envs)?;
            let (state, h) = position_diagonal_of_gibbs(&h, spec.beta)?;
            let projectors = position_projectors(&cv.grid)?;
            let shifts = cv
                .grid
                .points()
                .into_iter()
                .map(|q| ClusterShift {
                    cluster_value: q,
                    energy: z.free_value(q + z.spring_min),
                })
                .collect();
            Ok(UscState {
                state,
                effective_hamiltonian: h,
                family: Family::ZwanzigCv,
                projectors,
                shifts,
            })
        }
        (SystemPayload::Continuous(_), EnvPotential::Polynomial { .. }) => Err(Error::InvalidModel(
            "continuous systems are only supported with spring coupling".into(),
        )),
    }
}
