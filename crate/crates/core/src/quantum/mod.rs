//! Complex linear algebra and two-qubit state primitives.

mod eigen;
mod matrix;
mod state;

pub use eigen::{hermitian_eigensystem, matrix_sqrt_psd, span_rank, Eigensystem, HERMITIAN_TOL, PSD_TOL};
pub use matrix::{kron, kron_vec, pauli, ComplexMatrix};
pub use state::{normalize_to_state, phi_plus_ket, PolarizationKet, TwoQubitState, STATE_TOL, ZERO_TRACE};
