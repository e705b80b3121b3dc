use num_complex::Complex64;

use super::density::DensityMatrix;
use super::system::ProjectedPropagator;
use super::{EngineError, Result};
use crate::linalg::{top_k_eigenpairs_seeded, ComplexVector, LinalgError, EIGEN_MAX_ITER, EIGEN_TOL};

/// Relative closeness of `|λ₁|` to `|λ₀|` that counts as no gap.
const GAP_TIE: f64 = 1e-6;

/// Spectral data behind the purification and efficiency conditions.
#[derive(Debug, Clone, PartialEq)]
pub struct ConditionsReport {
    pub lambda0: Option<Complex64>,
    pub lambda1: Option<Complex64>,
    /// `|λ₁/λ₀|`; for a one-dimensional `B` this is 0. When `λ₁` itself could
    /// not be resolved the magnitude comes from the iterate growth rate.
    pub gap_ratio: Option<f64>,
    /// `(u₀|u₀)(v₀|ρ₀|v₀)` in the gauge `‖u₀‖ = 1`, `(v₀|u₀) = 1`.
    pub yield_plateau_coefficient: Option<f64>,
    /// `||λ₀| − 1| ≤ ε`.
    pub condition_i_met: bool,
    /// `|λ₁/λ₀|`, reported and never thresholded.
    pub condition_ii_ratio: Option<f64>,
    /// No unique dominant eigenvalue; all condition fields are unset.
    pub degenerate: bool,
    pub u0: Option<ComplexVector>,
    pub v0: Option<ComplexVector>,
}

impl ConditionsReport {
    fn degenerate() -> Self {
        Self {
            lambda0: None,
            lambda1: None,
            gap_ratio: None,
            yield_plateau_coefficient: None,
            condition_i_met: false,
            condition_ii_ratio: None,
            degenerate: true,
            u0: None,
            v0: None,
        }
    }
}

pub fn spectral_report(v: &ProjectedPropagator, rho0: &DensityMatrix, epsilon: f64) -> Result<ConditionsReport> {
    spectral_report_seeded(v, rho0, epsilon, 0)
}

pub fn spectral_report_seeded(
    v: &ProjectedPropagator,
    rho0: &DensityMatrix,
    epsilon: f64,
    seed: u64,
) -> Result<ConditionsReport> {
    if rho0.dim() != v.dim() {
        return Err(EngineError::DimensionMismatch {
            expected: v.dim(),
            found: rho0.dim(),
        });
    }
    let k = v.dim().min(2);
    let top = top_k_eigenpairs_seeded(v.matrix(), k, EIGEN_TOL, EIGEN_MAX_ITER, seed)?;
    let Some(first) = top.pairs.first() else {
        return Ok(ConditionsReport::degenerate());
    };
    let lambda0 = first.value;
    let mag0 = lambda0.norm();

    let (lambda1, mag1) = match (top.pairs.get(1), &top.failure) {
        (Some(second), _) => (Some(second.value), second.value.norm()),
        (None, Some(LinalgError::NoConvergence { magnitude_estimate: Some(m), .. })) => (None, *m),
        (None, Some(LinalgError::NoConvergence { .. })) => (None, mag0),
        (None, _) => (None, 0.0),
    };
    if mag0 == 0.0 || mag1 >= mag0 * (1.0 - GAP_TIE) {
        return Ok(ConditionsReport::degenerate());
    }
    let ratio = (mag1 / mag0).clamp(0.0, 1.0);

    let u0 = first.right.clone();
    let v0 = first.left.clone();
    let plateau = u0.norm_sqr() * v0.inner(&rho0.matrix().mul_vec(&v0)?)?.re;

    Ok(ConditionsReport {
        lambda0: Some(lambda0),
        lambda1,
        gap_ratio: Some(ratio),
        yield_plateau_coefficient: Some(plateau),
        condition_i_met: (mag0 - 1.0).abs() <= epsilon,
        condition_ii_ratio: Some(ratio),
        degenerate: false,
        u0: Some(u0),
        v0: Some(v0),
    })
}
