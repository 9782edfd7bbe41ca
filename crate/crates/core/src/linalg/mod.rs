//! Dense Hermitian linear algebra: spectral decomposition, Boltzmann
//! exponentials, tensor products, partial traces and state distances.

mod density;
mod hermitian;
mod ops;
mod projector;
mod spectral;

pub use density::DensityMatrix;
pub use hermitian::{HermitianOperator, HERMITICITY_TOL};
pub(crate) use ops::partial_trace_spectral;
pub use ops::{kron, partial_trace_env, project_block_diagonal, trace_distance, trace_norm, CompositeDims};
pub use projector::ProjectorFamily;
pub(crate) use spectral::check_beta;
pub use spectral::{boltzmann_exp, hermitian_eig, hermitian_eigenvalues, BoltzmannOperator, SpectralDecomposition};
