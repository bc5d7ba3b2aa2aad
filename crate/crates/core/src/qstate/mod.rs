//! Dense linear algebra on small spin registers.

mod operator;
mod partial;
mod pauli;
mod spectral;

pub use operator::{
    DenseOperator, DensityMatrix, DENSITY_HERMITIAN_TOL, DENSITY_TRACE_TOL, EIG_HERMITIAN_TOL, PSD_TOL,
};
pub use partial::{partial_trace, partial_trace_qubits};
pub use pauli::{from_pauli_coefficients, pauli_coefficients, pauli_expectation, Pauli, PauliString};
pub use spectral::{eig_hermitian, fidelity, fidelity_from_sqrts, sqrt_psd, HermitianEigen};
