//! Dominant eigenpairs of non-Hermitian matrices by power iteration.
//!
//! Right vectors are normalized to unit Euclidean norm with their largest
//! component real and positive; left vectors are scaled so that `(v|u) = 1`.
//! After the power stage every pair is refined by a few steps of inverse
//! iteration against the matrix the caller handed in, so pairs found on a
//! deflated matrix are still accurate eigenpairs of the original.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{ComplexMatrix, ComplexVector, LinalgError, Result, EIGEN_MAX_ITER};

const POLISH_STEPS: usize = 3;
/// Two independent starts must agree on the dominant direction to this
/// level, otherwise the dominant eigenspace is not one-dimensional.
const DIRECTION_AGREEMENT: f64 = 1e-6;
/// Below this `|(w|x)|` the left and right vectors are treated as orthogonal
/// (defective or ill-conditioned eigenvalue).
const MIN_BIORTHOGONAL_OVERLAP: f64 = 1e-10;
/// Relative magnitude difference under which two eigenvalues tie.
const MAGNITUDE_TIE: f64 = 1e-9;
const GROWTH_WINDOW: usize = 64;

/// Eigenvalue with right and left eigenvectors of a square matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct EigenPair {
    pub value: Complex64,
    /// `|u)`, unit norm.
    pub right: ComplexVector,
    /// `(v|` stored as the ket `|v)`, scaled so that `(v|u) = 1`.
    pub left: ComplexVector,
    /// `‖M u − λ u‖₂`.
    pub residual: f64,
}

/// Result of [`top_k_eigenpairs`]: the pairs found, in descending `|λ|`.
#[derive(Debug, Clone, PartialEq)]
pub struct TopEigenpairs {
    pub pairs: Vec<EigenPair>,
    /// Fewer than `k` pairs were returned.
    pub truncated: bool,
    /// The solver found no magnitude gap at the stage where it stopped.
    pub degenerate: bool,
    /// The error that stopped the sequence, if any.
    pub failure: Option<LinalgError>,
}

fn start_vector(dim: usize, seed: u64) -> ComplexVector {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let entries = (0..dim)
        .map(|_| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
        .collect();
    ComplexVector::new(entries)
        .expect("finite start vector")
        .normalized()
}

struct PowerStage {
    vector: ComplexVector,
    value: Complex64,
}

fn power_iterate(m: &ComplexMatrix, tol: f64, max_iter: usize, seed: u64) -> Result<PowerStage> {
    let mut x = start_vector(m.rows(), seed);
    let mut log_growth: Vec<f64> = Vec::with_capacity(GROWTH_WINDOW);
    let mut residual = f64::INFINITY;
    for it in 0..max_iter {
        let y = m.mul_vec(&x)?;
        let value = x.inner(&y)?;
        residual = y.try_sub(&x.scale(value))?.norm();
        if residual <= tol * value.norm().min(1.0) {
            return Ok(PowerStage { vector: x, value });
        }
        let ny = y.norm();
        if log_growth.len() == GROWTH_WINDOW {
            log_growth[it % GROWTH_WINDOW] = ny.ln();
        } else {
            log_growth.push(ny.ln());
        }
        x = y.scale(Complex64::new(1.0 / ny, 0.0));
    }
    let magnitude_estimate = if log_growth.is_empty() {
        None
    } else {
        Some((log_growth.iter().sum::<f64>() / log_growth.len() as f64).exp())
    };
    Err(LinalgError::NoConvergence {
        iterations: max_iter,
        residual,
        magnitude_estimate,
    })
}

fn shifted(m: &ComplexMatrix, shift: Complex64) -> Result<ComplexMatrix> {
    let n = m.rows();
    ComplexMatrix::from_fn(n, n, |i, j| if i == j { m[(i, j)] - shift } else { m[(i, j)] })
}

fn inverse_iterate(m: &ComplexMatrix, shift: Complex64, x: ComplexVector) -> ComplexVector {
    let Ok(a) = shifted(m, shift) else {
        return x;
    };
    let mut x = x;
    for _ in 0..POLISH_STEPS {
        match a.solve(&x) {
            Ok(z) if z.norm() > 0.0 && z.norm().is_finite() => x = z.normalized(),
            _ => break,
        }
    }
    x
}

/// Rotates `x` so its largest-modulus component is real and positive.
fn fix_phase(x: &ComplexVector) -> ComplexVector {
    let pivot = x
        .entries()
        .iter()
        .copied()
        .max_by(|a, b| a.norm().total_cmp(&b.norm()))
        .unwrap_or(Complex64::new(1.0, 0.0));
    if pivot.norm() == 0.0 {
        return x.clone();
    }
    x.scale(pivot.conj() / pivot.norm())
}

fn residual_of(m: &ComplexMatrix, value: Complex64, x: &ComplexVector) -> Result<f64> {
    Ok(m.mul_vec(x)?.try_sub(&x.scale(value))?.norm())
}

/// Turns approximate right/left vectors for `value` into a normalized,
/// polished pair of `m`.
fn refine_pair(
    m: &ComplexMatrix,
    right: ComplexVector,
    left: ComplexVector,
    value: Complex64,
    tol: f64,
) -> Result<EigenPair> {
    let x = inverse_iterate(m, value, right);
    let w = inverse_iterate(&m.adjoint(), value.conj(), left);
    let overlap = w.inner(&x)?;
    if overlap.norm() < MIN_BIORTHOGONAL_OVERLAP {
        return Err(LinalgError::NoConvergence {
            iterations: 0,
            residual: f64::INFINITY,
            magnitude_estimate: Some(value.norm()),
        });
    }
    let value = w.inner(&m.mul_vec(&x)?)? / overlap;
    let right = fix_phase(&x);
    let left = w.scale(Complex64::new(1.0, 0.0) / w.inner(&right)?.conj());
    let residual = residual_of(m, value, &right)?;
    if !(residual <= tol) {
        return Err(LinalgError::NoConvergence {
            iterations: 0,
            residual,
            magnitude_estimate: Some(value.norm()),
        });
    }
    Ok(EigenPair {
        value,
        right,
        left,
        residual,
    })
}

/// Power stage shared by [`dominant_eigenpair`] and the deflation loop:
/// right vector from two independent starts plus the left vector from `m†`.
fn dominant_stage(
    m: &ComplexMatrix,
    tol: f64,
    max_iter: usize,
    seed: u64,
) -> Result<(ComplexVector, ComplexVector, Complex64)> {
    let first = power_iterate(m, tol, max_iter, seed)?;
    if m.rows() > 1 {
        let second = power_iterate(m, tol, max_iter, seed.wrapping_add(0x9e37_79b9_7f4a_7c15))?;
        let agreement = first.vector.inner(&second.vector)?.norm();
        if agreement < 1.0 - DIRECTION_AGREEMENT {
            return Err(LinalgError::NoConvergence {
                iterations: 0,
                residual: 1.0 - agreement,
                magnitude_estimate: Some(first.value.norm()),
            });
        }
    }
    let left = power_iterate(&m.adjoint(), tol, max_iter, seed.wrapping_add(1))?;
    let scale = first.value.norm().max(1.0);
    if (left.value - first.value.conj()).norm() > 1e-6 * scale {
        return Err(LinalgError::NoConvergence {
            iterations: 0,
            residual: (left.value - first.value.conj()).norm(),
            magnitude_estimate: Some(first.value.norm()),
        });
    }
    Ok((first.vector, left.vector, first.value))
}

/// Largest-magnitude eigenvalue of `m` with its right and left vectors.
///
/// Fails with `NoConvergence` when the iteration cap is hit or when the
/// dominant eigenvalue is not unique (magnitude tie, repeated eigenvalue,
/// defective eigenvalue); a tie is reported, never broken arbitrarily.
pub fn dominant_eigenpair(m: &ComplexMatrix, tol: f64, max_iter: usize, seed: u64) -> Result<EigenPair> {
    m.require_square()?;
    let (right, left, value) = dominant_stage(m, tol, max_iter, seed)?;
    refine_pair(m, right, left, value, tol)
}

/// `m − λ |u)(v|`.
pub fn deflate(m: &ComplexMatrix, pair: &EigenPair) -> Result<ComplexMatrix> {
    let n = m.require_square()?;
    if pair.right.dim() != n || pair.left.dim() != n {
        return Err(LinalgError::DimensionMismatch {
            expected: n,
            found: pair.right.dim(),
        });
    }
    let projector = ComplexMatrix::outer(&pair.right, &pair.left)?;
    m.try_sub(&projector.scale(pair.value))
}

/// The `k` largest-magnitude eigenpairs by repeated power iteration and
/// deflation, using the default iteration cap and seed 0.
pub fn top_k_eigenpairs(m: &ComplexMatrix, k: usize, tol: f64) -> Result<TopEigenpairs> {
    top_k_eigenpairs_seeded(m, k, tol, EIGEN_MAX_ITER, 0)
}

pub fn top_k_eigenpairs_seeded(
    m: &ComplexMatrix,
    k: usize,
    tol: f64,
    max_iter: usize,
    seed: u64,
) -> Result<TopEigenpairs> {
    let n = m.require_square()?;
    if k > n {
        return Err(LinalgError::DimensionMismatch {
            expected: n,
            found: k,
        });
    }
    let mut pairs: Vec<EigenPair> = Vec::with_capacity(k);
    let mut current = m.clone();
    let mut degenerate = false;
    let mut failure = None;

    for stage in 0..k {
        let stage_seed = seed.wrapping_add(stage as u64 * 7919);
        let found = dominant_stage(&current, tol, max_iter, stage_seed)
            .and_then(|(right, left, value)| refine_pair(m, right, left, value, tol));
        let pair = match found {
            Ok(pair) => pair,
            Err(e) => {
                degenerate = matches!(e, LinalgError::NoConvergence { .. });
                failure = Some(e);
                break;
            }
        };
        // Inverse iteration may slide back onto an eigenvalue already removed.
        let repeats = pairs
            .iter()
            .any(|p| (p.value - pair.value).norm() <= MAGNITUDE_TIE * p.value.norm().max(1e-300));
        let ties = pairs
            .last()
            .is_some_and(|p| p.value.norm() - pair.value.norm() <= MAGNITUDE_TIE * p.value.norm());
        if repeats || ties {
            degenerate = true;
            failure = Some(LinalgError::NoConvergence {
                iterations: 0,
                residual: pair.residual,
                magnitude_estimate: Some(pair.value.norm()),
            });
            break;
        }
        current = deflate(&current, &pair)?;
        pairs.push(pair);
    }
    Ok(TopEigenpairs {
        truncated: pairs.len() < k,
        pairs,
        degenerate,
        failure,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::EIGEN_TOL;

    fn diag(values: &[f64]) -> ComplexMatrix {
        let d: Vec<Complex64> = values.iter().map(|&x| Complex64::new(x, 0.0)).collect();
        ComplexMatrix::from_diagonal(&d).unwrap()
    }

    #[test]
    fn diagonal_dominant_pair() {
        let pair = dominant_eigenpair(&diag(&[0.9, 0.5]), EIGEN_TOL, EIGEN_MAX_ITER, 0).unwrap();
        assert!((pair.value - Complex64::new(0.9, 0.0)).norm() < 1e-12);
        assert!((pair.right[0] - Complex64::new(1.0, 0.0)).norm() < 1e-12);
        assert!(pair.right[1].norm() < 1e-12);
        assert!((pair.left.inner(&pair.right).unwrap() - Complex64::new(1.0, 0.0)).norm() < 1e-12);
    }

    #[test]
    fn defective_matrix_is_refused() {
        let m = ComplexMatrix::from_real_rows(&[&[0.5, 0.3], &[0.0, 0.5]]).unwrap();
        match dominant_eigenpair(&m, EIGEN_TOL, 20_000, 3) {
            Err(LinalgError::NoConvergence { .. }) => {}
            Ok(pair) => assert!(pair.residual > EIGEN_TOL, "defective pair accepted: {pair:?}"),
            Err(e) => panic!("unexpected error {e}"),
        }
    }

    #[test]
    fn repeated_eigenvalue_is_refused() {
        let m = diag(&[0.7, 0.7, 0.1]);
        assert!(matches!(
            dominant_eigenpair(&m, EIGEN_TOL, EIGEN_MAX_ITER, 0),
            Err(LinalgError::NoConvergence { .. })
        ));
    }

    #[test]
    fn deflating_diagonal() {
        let m = diag(&[0.9, 0.5]);
        let pair = dominant_eigenpair(&m, EIGEN_TOL, EIGEN_MAX_ITER, 0).unwrap();
        let d = deflate(&m, &pair).unwrap();
        assert!((&d - &diag(&[0.0, 0.5])).frobenius_norm() < 1e-12);
    }

    #[test]
    fn deflating_rank_one_gives_zero() {
        let u = ComplexVector::new(vec![Complex64::new(0.6, 0.0), Complex64::new(0.0, 0.8)]).unwrap();
        let v = ComplexVector::new(vec![Complex64::new(1.0, 0.5), Complex64::new(0.2, -1.0)]).unwrap();
        let vu = v.inner(&u).unwrap();
        let v = v.scale(Complex64::new(1.0, 0.0) / vu.conj());
        let lambda = Complex64::new(0.3, 0.4);
        let m = ComplexMatrix::outer(&u, &v).unwrap().scale(lambda);
        let pair = dominant_eigenpair(&m, EIGEN_TOL, EIGEN_MAX_ITER, 0).unwrap();
        assert!(deflate(&m, &pair).unwrap().max_abs() < 1e-12);
    }

    #[test]
    fn top_k_on_diagonal() {
        let top = top_k_eigenpairs(&diag(&[0.1, 0.9, 0.5]), 3, EIGEN_TOL).unwrap();
        assert!(!top.truncated && !top.degenerate);
        let values: Vec<f64> = top.pairs.iter().map(|p| p.value.re).collect();
        for (got, want) in values.iter().zip([0.9, 0.5, 0.1]) {
            assert!((got - want).abs() < 1e-12, "{values:?}");
        }
    }

    #[test]
    fn unitary_has_no_gap() {
        let phases = [0.3, 1.9, -2.2];
        let d: Vec<Complex64> = phases.iter().map(|&p| Complex64::from_polar(1.0, p)).collect();
        let m = ComplexMatrix::from_diagonal(&d).unwrap();
        let top = top_k_eigenpairs_seeded(&m, 2, EIGEN_TOL, 5_000, 0).unwrap();
        assert!(top.degenerate);
        assert!(top.truncated);
    }

    #[test]
    fn k_larger_than_dim_is_an_error() {
        assert!(top_k_eigenpairs(&diag(&[1.0]), 2, EIGEN_TOL).is_err());
    }
}
