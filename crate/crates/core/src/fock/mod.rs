//! Quantization of quadratic hamiltonians on a finite `z`-window: Darboux
//! coordinates, the Poisson bracket, normal-ordered operators and the
//! anomaly cocycle.

mod hamiltonian;
mod matrix;
mod operator;
mod space;

use thiserror::Error;

pub use hamiltonian::{cocycle_eval, poisson_bracket, QuadraticHamiltonian, Var};
pub use matrix::Mat;
pub use operator::{projective_identity_check, quantize, FockOperator, FockPolynomial};
pub use space::{half_omega, hamiltonian_of, omega, DarbouxSpace, LoopOperator, PhaseVector};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum FockError {
    #[error("Darboux space needs h_dim ≥ 1 and a window ≥ 1")]
    EmptySpace,
    #[error("block shapes do not match the space")]
    ShapeMismatch,
    #[error("qq and pp blocks must be symmetric")]
    NotSymmetric,
    #[error("T is not infinitesimally symplectic (basis pair {i}, {j})")]
    NotInfinitesimallySymplectic { i: usize, j: usize },
    #[error("projective identity fails at ħ^{hbar} q^{monomial:?}")]
    IdentityFailure { hbar: i32, monomial: Vec<u32> },
}
