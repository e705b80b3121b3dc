use num_complex::Complex64;

use super::density::DensityMatrix;
use super::system::ProjectedPropagator;
use super::{EngineError, Result, EXTINCTION_THRESHOLD};
use crate::linalg::{dominant_eigenpair, ComplexMatrix, ComplexVector, EIGEN_MAX_ITER, EIGEN_TOL};

/// One confirmation: `ρ ↦ VρV†/p` with `p = Tr(VρV†)`.
pub fn evolve_step(rho: &DensityMatrix, v: &ProjectedPropagator) -> Result<(DensityMatrix, f64)> {
    if rho.dim() != v.dim() {
        return Err(EngineError::DimensionMismatch {
            expected: v.dim(),
            found: rho.dim(),
        });
    }
    let sandwiched = sandwich(v.matrix(), rho.matrix())?;
    let probability = sandwiched.trace().re;
    if !(probability > EXTINCTION_THRESHOLD) {
        return Err(EngineError::ExtinctBranch { probability });
    }
    let state = DensityMatrix::new(sandwiched.scale(Complex64::new(1.0 / probability, 0.0)))?;
    Ok((state, probability))
}

fn sandwich(v: &ComplexMatrix, rho: &ComplexMatrix) -> Result<ComplexMatrix> {
    Ok(v.matmul(rho)?.matmul(&v.adjoint())?)
}

/// `Tr(Vⁿ ρ V†ⁿ)`, the probability that `n` consecutive confirmations all
/// succeed.
pub fn survival_probability(rho: &DensityMatrix, v: &ProjectedPropagator, n: usize) -> Result<f64> {
    if rho.dim() != v.dim() {
        return Err(EngineError::DimensionMismatch {
            expected: v.dim(),
            found: rho.dim(),
        });
    }
    if n == 0 {
        return Ok(1.0);
    }
    let mut sigma = rho.matrix().clone();
    for _ in 0..n {
        sigma = sandwich(v.matrix(), &sigma)?;
    }
    Ok(sigma.trace().re)
}

#[derive(Debug, Clone, PartialEq)]
pub struct StepRecord {
    pub n: usize,
    pub conditional_probability: f64,
    pub cumulative_yield: f64,
    pub fidelity: Option<f64>,
    pub purity: f64,
    pub target_distance: Option<f64>,
    pub state: DensityMatrix,
}

/// States and probabilities along the all-confirmations-succeed branch.
#[derive(Debug, Clone, PartialEq)]
pub struct PurificationTrajectory {
    /// Record for `n = 0` (no confirmation yet; probability and yield 1).
    pub initial: StepRecord,
    /// Records for `n = 1, 2, …`.
    pub steps: Vec<StepRecord>,
    /// Step at which the branch went extinct, if it did.
    pub extinct_at: Option<usize>,
    /// Unit-norm target used for fidelities, if one was available.
    pub target: Option<ComplexVector>,
}

impl PurificationTrajectory {
    /// Initial record followed by every step.
    pub fn records(&self) -> impl Iterator<Item = &StepRecord> {
        std::iter::once(&self.initial).chain(self.steps.iter())
    }

    pub fn last(&self) -> &StepRecord {
        self.steps.last().unwrap_or(&self.initial)
    }

    pub fn truncated(&self) -> bool {
        self.extinct_at.is_some()
    }
}

fn record(
    n: usize,
    conditional_probability: f64,
    cumulative_yield: f64,
    state: DensityMatrix,
    target: Option<&ComplexVector>,
) -> Result<StepRecord> {
    let (fidelity, target_distance) = match target {
        Some(t) => (Some(state.fidelity(t)?), Some(state.trace_distance_to_pure(t)?)),
        None => (None, None),
    };
    Ok(StepRecord {
        n,
        conditional_probability,
        cumulative_yield,
        fidelity,
        purity: state.purity(),
        target_distance,
        state,
    })
}

/// Iterates the confirmation map up to `n_max` times.
///
/// Fidelities are taken against `target` or, if none is given, against the
/// dominant right eigenvector of `V` (omitted when that eigenvector is not
/// unique). An extinct branch ends the trajectory early and is flagged.
pub fn run_purification(
    rho0: &DensityMatrix,
    v: &ProjectedPropagator,
    n_max: usize,
    target: Option<&ComplexVector>,
) -> Result<PurificationTrajectory> {
    if n_max == 0 {
        return Err(EngineError::InvalidArgument("n_max must be >= 1".into()));
    }
    if rho0.dim() != v.dim() {
        return Err(EngineError::DimensionMismatch {
            expected: v.dim(),
            found: rho0.dim(),
        });
    }
    let target = match target {
        Some(t) => {
            let norm = t.norm();
            if (norm - 1.0).abs() > 1e-9 {
                return Err(EngineError::NotNormalized { norm });
            }
            Some(t.clone())
        }
        None => dominant_eigenpair(v.matrix(), EIGEN_TOL, EIGEN_MAX_ITER, 0)
            .ok()
            .map(|pair| pair.right),
    };

    let initial = record(0, 1.0, 1.0, rho0.clone(), target.as_ref())?;
    let mut steps = Vec::with_capacity(n_max);
    let mut state = rho0.clone();
    let mut cumulative = 1.0;
    let mut extinct_at = None;
    for n in 1..=n_max {
        match evolve_step(&state, v) {
            Ok((next, p)) => {
                cumulative *= p;
                steps.push(record(n, p, cumulative, next.clone(), target.as_ref())?);
                state = next;
            }
            Err(EngineError::ExtinctBranch { .. }) => {
                extinct_at = Some(n);
                break;
            }
            Err(e) => return Err(e),
        }
    }
    Ok(PurificationTrajectory {
        initial,
        steps,
        extinct_at,
        target,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn propagator(diag: &[f64]) -> ProjectedPropagator {
        let d: Vec<Complex64> = diag.iter().map(|&x| Complex64::new(x, 0.0)).collect();
        ProjectedPropagator::new(ComplexMatrix::from_diagonal(&d).unwrap(), 1.0).unwrap()
    }

    #[test]
    fn identity_step_is_trivial() {
        let rho = DensityMatrix::from_populations(&[0.2, 0.3, 0.5]).unwrap();
        let (next, p) = evolve_step(&rho, &propagator(&[1.0, 1.0, 1.0])).unwrap();
        assert!((p - 1.0).abs() < 1e-15);
        assert!((next.matrix() - rho.matrix()).frobenius_norm() < 1e-15);
    }

    #[test]
    fn projective_step_purifies() {
        let rho = DensityMatrix::maximally_mixed(2).unwrap();
        let (next, p) = evolve_step(&rho, &propagator(&[1.0, 0.0])).unwrap();
        assert!((p - 0.5).abs() < 1e-15);
        assert!((next.matrix()[(0, 0)].re - 1.0).abs() < 1e-15);
        assert!((next.purity() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn orthogonal_support_is_extinct() {
        let rho = DensityMatrix::from_populations(&[0.0, 1.0]).unwrap();
        assert!(matches!(
            evolve_step(&rho, &propagator(&[1.0, 0.0])),
            Err(EngineError::ExtinctBranch { .. })
        ));
        let traj = run_purification(&rho, &propagator(&[1.0, 0.0]), 5, None).unwrap();
        assert!(traj.truncated());
        assert_eq!(traj.extinct_at, Some(1));
        assert!(traj.steps.is_empty());
    }

    #[test]
    fn survival_of_zero_steps_is_one() {
        let rho = DensityMatrix::from_populations(&[0.3, 0.7]).unwrap();
        assert_eq!(survival_probability(&rho, &propagator(&[0.9, 0.5]), 0).unwrap(), 1.0);
    }

    #[test]
    fn identity_trajectory_is_constant() {
        let rho = DensityMatrix::from_populations(&[0.1, 0.9]).unwrap();
        let target = ComplexVector::basis(2, 0).unwrap();
        let traj = run_purification(&rho, &propagator(&[1.0, 1.0]), 4, Some(&target)).unwrap();
        assert_eq!(traj.steps.len(), 4);
        for r in traj.records() {
            assert!((r.cumulative_yield - 1.0).abs() < 1e-15);
            assert!((r.fidelity.unwrap() - 0.1).abs() < 1e-15);
        }
    }

    #[test]
    fn two_level_fidelity_sequence() {
        // F(n) = 0.5 / (0.5 + 0.5 * 0.25^n)
        let rho = DensityMatrix::maximally_mixed(2).unwrap();
        let target = ComplexVector::basis(2, 0).unwrap();
        let traj = run_purification(&rho, &propagator(&[1.0, 0.5]), 6, Some(&target)).unwrap();
        let expected = [0.5, 0.8, 0.941_176_470_588_235_3, 0.984_615_384_615_384_6];
        for (r, e) in traj.records().zip(expected) {
            assert!((r.fidelity.unwrap() - e).abs() < 1e-14, "n={} {:?}", r.n, r.fidelity);
        }
    }
}
