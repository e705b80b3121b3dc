use num_complex::Complex64;

use super::{OscillatorError, Result};
use crate::engine::DensityMatrix;
use crate::linalg::{ComplexMatrix, ComplexVector};

const COHERENT_TAIL_LIMIT: f64 = 1e-10;

/// Truncated annihilation operator on occupations `0..=cutoff`.
pub fn annihilation(cutoff: usize) -> ComplexMatrix {
    let dim = cutoff + 1;
    ComplexMatrix::from_fn(dim, dim, |i, j| {
        if j == i + 1 {
            Complex64::new((j as f64).sqrt(), 0.0)
        } else {
            Complex64::new(0.0, 0.0)
        }
    })
    .expect("annihilation operator within size limits")
}

/// Fock amplitudes `e^{-|α|²/2} αⁿ/√n!` for `n = 0..=cutoff`.
///
/// The truncated vector is not renormalized; instead the discarded mass
/// `e^{-|α|²} Σ_{n>cutoff} |α|^{2n}/n!` must not exceed `1e-10`.
pub fn coherent_state(alpha: Complex64, cutoff: usize) -> Result<ComplexVector> {
    let mut amps = Vec::with_capacity(cutoff + 1);
    let mut amp = Complex64::new((-alpha.norm_sqr() / 2.0).exp(), 0.0);
    amps.push(amp);
    for n in 1..=cutoff {
        amp = amp * alpha / (n as f64).sqrt();
        amps.push(amp);
    }

    let x = alpha.norm_sqr();
    let mut term = amp.norm_sqr();
    let mut tail = 0.0;
    let mut n = cutoff;
    loop {
        n += 1;
        term *= x / n as f64;
        tail += term;
        if term <= tail * f64::EPSILON || term == 0.0 || n > cutoff + 100_000 {
            break;
        }
    }
    if tail > COHERENT_TAIL_LIMIT {
        return Err(OscillatorError::CutoffTooSmall { tail });
    }
    Ok(ComplexVector::new(amps)?)
}

/// `ρ ∝ e^{-βω b†b}` on occupations `0..=cutoff`, normalized to unit trace.
pub fn thermal_state(beta: f64, omega: f64, cutoff: usize) -> Result<DensityMatrix> {
    let x = beta * omega;
    if !(x > 0.0) || !x.is_finite() {
        return Err(OscillatorError::InvalidParameter(format!(
            "beta * omega must be positive, got {x}"
        )));
    }
    let weights: Vec<f64> = (0..=cutoff).map(|n| (-x * n as f64).exp()).collect();
    Ok(DensityMatrix::from_populations(&weights)?)
}
