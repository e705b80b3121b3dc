//! Dense complex linear algebra used by the engine and the oscillator model.
//!
//! Everything here works on small, dense, row-major complex matrices. The
//! routines that need a spectral decomposition split the input into
//! irreducible diagonal blocks first, so number-conserving bosonic operators
//! (which are block diagonal by total excitation number) stay cheap even when
//! the full Fock space has close to a thousand states.

mod blocks;
mod expm;
mod hermitian;
mod matrix;
mod power;

pub use expm::expm;
pub use hermitian::{
    hermitian_eigendecompose, unitary_exponential, HermitianEigenDecomposition,
};
pub use matrix::{adjoint, tensor_product, ComplexMatrix, ComplexVector};
pub use power::{
    deflate, dominant_eigenpair, top_k_eigenpairs, top_k_eigenpairs_seeded, EigenPair, TopEigenpairs,
};

use thiserror::Error;

pub use num_complex::Complex64;

/// Largest matrix dimension accepted by [`tensor_product`] and the
/// constructors.
pub const MAX_DIM: usize = 2048;

/// Relative Frobenius asymmetry accepted as "Hermitian".
pub const HERMITIAN_TOL: f64 = 1e-9;

/// Default residual tolerance for the power-iteration eigensolver.
pub const EIGEN_TOL: f64 = 1e-10;

/// Default iteration cap for the power-iteration eigensolver.
pub const EIGEN_MAX_ITER: usize = 100_000;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum LinalgError {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("dimension {dim} exceeds the supported maximum {max}")]
    DimensionOverflow { dim: usize, max: usize },

    #[error("entries length {len} does not match shape {rows}x{cols}")]
    ShapeMismatch { rows: usize, cols: usize, len: usize },

    #[error("matrix or vector has a non-finite entry")]
    NonFinite,

    #[error("zero dimension")]
    Empty,

    #[error("matrix is not square ({rows}x{cols})")]
    NotSquare { rows: usize, cols: usize },

    #[error("matrix is not Hermitian (relative asymmetry {asymmetry:e})")]
    NotHermitian { asymmetry: f64 },

    /// The eigensolver hit its iteration cap or found no unique dominant
    /// direction. `magnitude_estimate` is the spectral radius estimated from
    /// the norm growth of the iterates, when available.
    #[error("no convergence after {iterations} iterations (residual {residual:e})")]
    NoConvergence {
        iterations: usize,
        residual: f64,
        magnitude_estimate: Option<f64>,
    },
}

pub type Result<T> = std::result::Result<T, LinalgError>;
