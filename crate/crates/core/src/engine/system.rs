use std::sync::OnceLock;

use num_complex::Complex64;

use super::{EngineError, Result, CONTRACTION_SLACK};
use crate::linalg::{
    hermitian_eigendecompose, ComplexMatrix, ComplexVector, HermitianEigenDecomposition, HERMITIAN_TOL,
};

const PROBE_NORM_SLACK: f64 = 1e-10;

/// Probe `A` and system `B` with a pre-summed total Hamiltonian.
///
/// The eigendecomposition of the Hamiltonian is computed on first use and
/// shared by every propagator built from this system.
#[derive(Debug, Clone)]
pub struct BipartiteSystem {
    dim_a: usize,
    dim_b: usize,
    hamiltonian: ComplexMatrix,
    spectrum: OnceLock<HermitianEigenDecomposition>,
}

impl PartialEq for BipartiteSystem {
    fn eq(&self, other: &Self) -> bool {
        self.dim_a == other.dim_a && self.dim_b == other.dim_b && self.hamiltonian == other.hamiltonian
    }
}

impl BipartiteSystem {
    pub fn new(dim_a: usize, dim_b: usize, hamiltonian: ComplexMatrix) -> Result<Self> {
        let n = hamiltonian.require_square()?;
        if n != dim_a * dim_b {
            return Err(EngineError::DimensionMismatch {
                expected: dim_a * dim_b,
                found: n,
            });
        }
        let asymmetry = hamiltonian.hermitian_asymmetry()?;
        if asymmetry > HERMITIAN_TOL {
            return Err(crate::linalg::LinalgError::NotHermitian { asymmetry }.into());
        }
        Ok(Self {
            dim_a,
            dim_b,
            hamiltonian,
            spectrum: OnceLock::new(),
        })
    }

    pub fn dim_a(&self) -> usize {
        self.dim_a
    }

    pub fn dim_b(&self) -> usize {
        self.dim_b
    }

    pub fn hamiltonian(&self) -> &ComplexMatrix {
        &self.hamiltonian
    }

    fn spectrum(&self) -> Result<&HermitianEigenDecomposition> {
        if let Some(s) = self.spectrum.get() {
            return Ok(s);
        }
        let eig = hermitian_eigendecompose(&self.hamiltonian, HERMITIAN_TOL)?;
        Ok(self.spectrum.get_or_init(|| eig))
    }

    /// `e^{-iHt}` on the full space.
    pub fn propagator(&self, t: f64) -> Result<ComplexMatrix> {
        Ok(self
            .spectrum()?
            .apply_function(|e| Complex64::from_polar(1.0, -e * t))?)
    }
}

/// Normalized probe state `|φ⟩`.
#[derive(Debug, Clone, PartialEq)]
pub struct ProbeState {
    amplitudes: ComplexVector,
}

impl ProbeState {
    pub fn new(amplitudes: ComplexVector) -> Result<Self> {
        let norm = amplitudes.norm();
        if (norm - 1.0).abs() > PROBE_NORM_SLACK {
            return Err(EngineError::NotNormalized { norm });
        }
        Ok(Self { amplitudes })
    }

    pub fn amplitudes(&self) -> &ComplexVector {
        &self.amplitudes
    }

    pub fn dim(&self) -> usize {
        self.amplitudes.dim()
    }
}

/// `V = ⟨φ|e^{-iHτ}|φ⟩` acting on `B`; always a contraction.
#[derive(Debug, Clone, PartialEq)]
pub struct ProjectedPropagator {
    matrix: ComplexMatrix,
    tau: f64,
}

impl ProjectedPropagator {
    /// Wraps an explicit operator after checking that its largest singular
    /// value is at most `1 + CONTRACTION_SLACK`.
    pub fn new(matrix: ComplexMatrix, tau: f64) -> Result<Self> {
        matrix.require_square()?;
        if !(tau >= 0.0) {
            return Err(EngineError::InvalidArgument(format!("tau must be >= 0, got {tau}")));
        }
        let sigma_max = largest_singular_value(&matrix)?;
        if sigma_max > 1.0 + CONTRACTION_SLACK {
            return Err(EngineError::NotContraction { sigma_max });
        }
        Ok(Self { matrix, tau })
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    pub fn tau(&self) -> f64 {
        self.tau
    }

    pub fn dim(&self) -> usize {
        self.matrix.rows()
    }

    pub fn largest_singular_value(&self) -> Result<f64> {
        largest_singular_value(&self.matrix)
    }
}

fn largest_singular_value(m: &ComplexMatrix) -> Result<f64> {
    let gram = m.adjoint().matmul(m)?;
    let eig = hermitian_eigendecompose(&gram, 1e-6)?;
    Ok(eig.eigenvalues.last().copied().unwrap_or(0.0).max(0.0).sqrt())
}

/// Contracts `e^{-iHτ}` with the probe state:
/// `V[i,j] = Σ_{k,l} conj(φ_k) U[(k·d_b+i),(l·d_b+j)] φ_l`.
pub fn build_projected_propagator(sys: &BipartiteSystem, phi: &ProbeState, tau: f64) -> Result<ProjectedPropagator> {
    if phi.dim() != sys.dim_a() {
        return Err(EngineError::DimensionMismatch {
            expected: sys.dim_a(),
            found: phi.dim(),
        });
    }
    if !(tau >= 0.0) {
        return Err(EngineError::InvalidArgument(format!("tau must be >= 0, got {tau}")));
    }
    let u = sys.propagator(tau)?;
    let (da, db) = (sys.dim_a(), sys.dim_b());
    let amps = phi.amplitudes().entries();
    let mut v = vec![Complex64::new(0.0, 0.0); db * db];
    for (k, &phi_k) in amps.iter().enumerate() {
        if phi_k.norm() == 0.0 {
            continue;
        }
        for (l, &phi_l) in amps.iter().enumerate() {
            let weight = phi_k.conj() * phi_l;
            if weight.norm() == 0.0 {
                continue;
            }
            for i in 0..db {
                let row = u.row(k * db + i);
                let block = &row[l * db..(l + 1) * db];
                for (j, &x) in block.iter().enumerate() {
                    v[i * db + j] += weight * x;
                }
            }
        }
    }
    debug_assert_eq!(amps.len(), da);
    ProjectedPropagator::new(ComplexMatrix::new(db, db, v)?, tau)
}
