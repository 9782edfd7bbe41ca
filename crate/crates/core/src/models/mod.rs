//! System data, environment grids and assembled system-environment
//! Hamiltonians for the polynomial-coupled and spring-coupled families.

mod grid;
mod hamiltonian;
mod potential;
mod system;

pub use grid::{build_grid_operators, EnvGrid};
pub use hamiltonian::{
    assemble_coupled, build_cv_zwanzig_hamiltonian, build_gcl_hamiltonian, build_hamiltonian,
    build_zwanzig_hamiltonian, default_gcl_grid, default_zwanzig_grid, single_particle_hamiltonian, CvSystem,
    EnvPotential, Family, ModelSpec, SystemPayload,
};
pub use potential::{FreePotential, PolynomialPotential, ZwanzigEnvSpec};
pub use system::{cluster_coupling_operator, SystemModel, DEFAULT_CLUSTER_TOL};
