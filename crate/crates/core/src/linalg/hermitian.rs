use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64;

use super::blocks::{extract, irreducible_blocks};
use super::{ComplexMatrix, LinalgError, Result};

const NALGEBRA_MAX_SWEEPS: usize = 10_000;

/// `M = Q diag(E) Q†` with ascending eigenvalues `E` and unitary `Q`
/// (eigenvectors are the columns of `Q`).
#[derive(Debug, Clone, PartialEq)]
pub struct HermitianEigenDecomposition {
    pub eigenvalues: Vec<f64>,
    pub eigenvectors: ComplexMatrix,
}

impl HermitianEigenDecomposition {
    pub fn dim(&self) -> usize {
        self.eigenvalues.len()
    }

    /// `Q diag(f(E)) Q†`.
    pub fn apply_function(&self, f: impl Fn(f64) -> Complex64) -> Result<ComplexMatrix> {
        let q = &self.eigenvectors;
        let n = self.dim();
        let weights: Vec<Complex64> = self.eigenvalues.iter().map(|&e| f(e)).collect();
        let scaled = ComplexMatrix::from_fn(n, n, |i, k| q[(i, k)] * weights[k])?;
        scaled.matmul(&q.adjoint())
    }

    pub fn reconstruct(&self) -> Result<ComplexMatrix> {
        self.apply_function(|e| Complex64::new(e, 0.0))
    }
}

/// Eigendecomposition of a Hermitian matrix.
///
/// The input is split into irreducible diagonal blocks and each block is
/// diagonalized with nalgebra's Householder/QR symmetric eigensolver.
pub fn hermitian_eigendecompose(m: &ComplexMatrix, tol: f64) -> Result<HermitianEigenDecomposition> {
    let n = m.require_square()?;
    let asymmetry = m.hermitian_asymmetry()?;
    if asymmetry > tol {
        return Err(LinalgError::NotHermitian { asymmetry });
    }
    let h = m.hermitian_part()?;

    let mut pairs: Vec<(f64, Vec<(usize, Complex64)>)> = Vec::with_capacity(n);
    for idx in irreducible_blocks(&h) {
        let block = extract(&h, &idx)?;
        let k = idx.len();
        let dm = DMatrix::from_fn(k, k, |i, j| block[(i, j)]);
        let eig = SymmetricEigen::try_new(dm, f64::EPSILON, NALGEBRA_MAX_SWEEPS).ok_or(
            LinalgError::NoConvergence {
                iterations: NALGEBRA_MAX_SWEEPS,
                residual: f64::NAN,
                magnitude_estimate: None,
            },
        )?;
        for col in 0..k {
            let vector = (0..k).map(|r| (idx[r], eig.eigenvectors[(r, col)])).collect();
            pairs.push((eig.eigenvalues[col], vector));
        }
    }
    pairs.sort_by(|a, b| a.0.total_cmp(&b.0));

    let mut q = ComplexMatrix::zeros(n, n)?;
    let mut eigenvalues = Vec::with_capacity(n);
    for (col, (value, vector)) in pairs.into_iter().enumerate() {
        eigenvalues.push(value);
        for (row, z) in vector {
            q.set(row, col, z);
        }
    }
    Ok(HermitianEigenDecomposition {
        eigenvalues,
        eigenvectors: q,
    })
}

/// `e^{-iHt}` through the eigendecomposition of `H`.
pub fn unitary_exponential(h: &ComplexMatrix, t: f64) -> Result<ComplexMatrix> {
    let eig = hermitian_eigendecompose(h, super::HERMITIAN_TOL)?;
    eig.apply_function(|e| Complex64::from_polar(1.0, -e * t))
}
