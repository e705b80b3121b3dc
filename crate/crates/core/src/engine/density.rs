use num_complex::Complex64;

use super::{EngineError, Result};
use crate::linalg::{hermitian_eigendecompose, ComplexMatrix, ComplexVector};

const HERMITIAN_SLACK: f64 = 1e-10;
const TRACE_SLACK: f64 = 1e-10;
const POSITIVITY_SLACK: f64 = 1e-9;
const NORM_SLACK: f64 = 1e-9;

/// Hermitian, unit-trace, positive semidefinite matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    matrix: ComplexMatrix,
}

impl DensityMatrix {
    /// Validates `matrix` and stores its Hermitian part.
    pub fn new(matrix: ComplexMatrix) -> Result<Self> {
        let n = matrix.require_square()?;
        let mut asym: f64 = 0.0;
        for i in 0..n {
            for j in i..n {
                asym = asym.max((matrix[(i, j)] - matrix[(j, i)].conj()).norm());
            }
        }
        if asym > HERMITIAN_SLACK {
            return Err(EngineError::InvalidDensity(format!("asymmetry {asym:e}")));
        }
        let matrix = matrix.hermitian_part()?;
        let trace = matrix.trace().re;
        if (trace - 1.0).abs() > TRACE_SLACK {
            return Err(EngineError::InvalidDensity(format!("trace {trace}")));
        }
        let rho = Self { matrix };
        let min_eig = rho.eigenvalues()?[0];
        if min_eig < -POSITIVITY_SLACK {
            return Err(EngineError::InvalidDensity(format!(
                "negative eigenvalue {min_eig:e}"
            )));
        }
        Ok(rho)
    }

    /// Normalizes a Hermitian positive matrix to unit trace first.
    pub fn from_unnormalized(matrix: ComplexMatrix) -> Result<Self> {
        let trace = matrix.trace().re;
        if !(trace > 0.0) {
            return Err(EngineError::InvalidDensity(format!("trace {trace}")));
        }
        Self::new(matrix.scale(Complex64::new(1.0 / trace, 0.0)))
    }

    /// Diagonal state with the given (not necessarily normalized) weights.
    pub fn from_populations(weights: &[f64]) -> Result<Self> {
        if weights.iter().any(|&w| !(w >= 0.0)) {
            return Err(EngineError::InvalidDensity("negative population".into()));
        }
        let diag: Vec<Complex64> = weights.iter().map(|&w| Complex64::new(w, 0.0)).collect();
        Self::from_unnormalized(ComplexMatrix::from_diagonal(&diag)?)
    }

    pub fn maximally_mixed(dim: usize) -> Result<Self> {
        Self::from_populations(&vec![1.0; dim])
    }

    /// `|ψ⟩⟨ψ|` for `ψ` normalized first.
    pub fn pure(psi: &ComplexVector) -> Result<Self> {
        if psi.norm() == 0.0 {
            return Err(EngineError::NotNormalized { norm: 0.0 });
        }
        let psi = psi.normalized();
        Self::new(ComplexMatrix::outer(&psi, &psi)?)
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    pub fn dim(&self) -> usize {
        self.matrix.rows()
    }

    /// `Tr ρ²`.
    pub fn purity(&self) -> f64 {
        self.matrix.entries().iter().map(|z| z.norm_sqr()).sum()
    }

    /// Ascending eigenvalues.
    pub fn eigenvalues(&self) -> Result<Vec<f64>> {
        Ok(hermitian_eigendecompose(&self.matrix, 1e-9)?.eigenvalues)
    }

    pub fn fidelity(&self, pure: &ComplexVector) -> Result<f64> {
        fidelity(self, pure)
    }

    pub fn trace_distance(&self, other: &DensityMatrix) -> Result<f64> {
        trace_distance(self, other)
    }

    /// Trace distance to `|ψ⟩⟨ψ|`, with `ψ` normalized first.
    pub fn trace_distance_to_pure(&self, psi: &ComplexVector) -> Result<f64> {
        trace_distance(self, &Self::pure(psi)?)
    }
}

/// `⟨ψ|ρ|ψ⟩` for a unit vector `ψ`.
pub fn fidelity(rho: &DensityMatrix, pure: &ComplexVector) -> Result<f64> {
    if pure.dim() != rho.dim() {
        return Err(EngineError::DimensionMismatch {
            expected: rho.dim(),
            found: pure.dim(),
        });
    }
    let norm = pure.norm();
    if (norm - 1.0).abs() > NORM_SLACK {
        return Err(EngineError::NotNormalized { norm });
    }
    let value = pure.inner(&rho.matrix.mul_vec(pure)?)?.re;
    Ok(value.clamp(0.0, 1.0))
}

/// `½‖ρ − σ‖₁`.
pub fn trace_distance(rho: &DensityMatrix, sigma: &DensityMatrix) -> Result<f64> {
    if rho.dim() != sigma.dim() {
        return Err(EngineError::DimensionMismatch {
            expected: rho.dim(),
            found: sigma.dim(),
        });
    }
    let diff = rho.matrix.try_sub(&sigma.matrix)?;
    let eig = hermitian_eigendecompose(&diff, 1e-6)?;
    Ok(0.5 * eig.eigenvalues.iter().map(|e| e.abs()).sum::<f64>())
}
