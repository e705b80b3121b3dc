//! Reference computations for testing `zenopure`.
//!
//! The oracles work on plain nested `Vec`s with textbook algorithms
//! (Faddeev–LeVerrier, Durand–Kerner, Gaussian elimination, Taylor series,
//! Cholesky) and share no numerical code with the library under test. The
//! random generators produce `zenopure` types for property tests.

// `!(x > 0.0)` also rejects NaN
#![allow(clippy::needless_range_loop, clippy::neg_cmp_op_on_partial_ord)]

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use zenopure::engine::{DensityMatrix, ProbeState};
use zenopure::linalg::{ComplexMatrix, ComplexVector};

pub type Dense = Vec<Vec<Complex64>>;

pub const ZERO: Complex64 = Complex64::new(0.0, 0.0);
pub const ONE: Complex64 = Complex64::new(1.0, 0.0);

pub fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

pub fn to_dense(m: &ComplexMatrix) -> Dense {
    (0..m.rows()).map(|i| m.row(i).to_vec()).collect()
}

pub fn from_dense(d: &Dense) -> ComplexMatrix {
    let n = d.len();
    ComplexMatrix::from_fn(n, d[0].len(), |i, j| d[i][j]).unwrap()
}

pub fn dense_identity(n: usize) -> Dense {
    (0..n).map(|i| (0..n).map(|j| if i == j { ONE } else { ZERO }).collect()).collect()
}

pub fn dense_mul(a: &Dense, b: &Dense) -> Dense {
    let (n, k, m) = (a.len(), b.len(), b[0].len());
    let mut out = vec![vec![ZERO; m]; n];
    for i in 0..n {
        for l in 0..k {
            for j in 0..m {
                out[i][j] += a[i][l] * b[l][j];
            }
        }
    }
    out
}

/// Characteristic polynomial coefficients `c₀..cₙ` (`cₙ = 1`) of
/// `det(λI − A)` by the Faddeev–LeVerrier recursion.
pub fn characteristic_polynomial(a: &Dense) -> Vec<Complex64> {
    let n = a.len();
    let mut coeffs = vec![ZERO; n + 1];
    coeffs[n] = ONE;
    let mut m = vec![vec![ZERO; n]; n];
    for k in 1..=n {
        let mut next = dense_mul(a, &m);
        for (i, row) in next.iter_mut().enumerate() {
            row[i] += coeffs[n - k + 1];
        }
        m = next;
        let am = dense_mul(a, &m);
        let trace: Complex64 = (0..n).map(|i| am[i][i]).sum();
        coeffs[n - k] = -trace / k as f64;
    }
    coeffs
}

fn horner(coeffs: &[Complex64], z: Complex64) -> (Complex64, Complex64) {
    let mut p = ZERO;
    let mut dp = ZERO;
    for &cf in coeffs.iter().rev() {
        dp = dp * z + p;
        p = p * z + cf;
    }
    (p, dp)
}

/// All roots of a monic polynomial by Durand–Kerner, then Newton polishing.
pub fn polynomial_roots(coeffs: &[Complex64]) -> Vec<Complex64> {
    let n = coeffs.len() - 1;
    let radius = 1.0 + coeffs[..n].iter().map(|z| z.norm()).fold(0.0, f64::max);
    let seed = c(0.4, 0.9);
    let mut roots: Vec<Complex64> = (0..n).map(|k| seed.powu(k as u32) * radius).collect();
    for _ in 0..5000 {
        let mut change: f64 = 0.0;
        for i in 0..n {
            let (p, _) = horner(coeffs, roots[i]);
            let mut den = ONE;
            for j in 0..n {
                if j != i {
                    den *= roots[i] - roots[j];
                }
            }
            let step = p / den;
            roots[i] -= step;
            change = change.max(step.norm());
        }
        if change < 1e-15 {
            break;
        }
    }
    for r in roots.iter_mut() {
        for _ in 0..5 {
            let (p, dp) = horner(coeffs, *r);
            if dp.norm() == 0.0 {
                break;
            }
            *r -= p / dp;
        }
    }
    roots
}

/// Eigenvalues of a dense matrix sorted by descending magnitude.
pub fn eigenvalues_by_characteristic_polynomial(a: &Dense) -> Vec<Complex64> {
    let mut roots = polynomial_roots(&characteristic_polynomial(a));
    roots.sort_by(|x, y| y.norm().partial_cmp(&x.norm()).unwrap());
    roots
}

/// Determinant by Gaussian elimination with partial pivoting.
pub fn determinant(a: &Dense) -> Complex64 {
    let n = a.len();
    let mut m = a.clone();
    let mut det = ONE;
    for col in 0..n {
        let pivot = (col..n).max_by(|&i, &j| m[i][col].norm().partial_cmp(&m[j][col].norm()).unwrap()).unwrap();
        if m[pivot][col].norm() == 0.0 {
            return ZERO;
        }
        if pivot != col {
            m.swap(pivot, col);
            det = -det;
        }
        det *= m[col][col];
        for i in col + 1..n {
            let f = m[i][col] / m[col][col];
            for j in col..n {
                let v = m[col][j];
                m[i][j] -= f * v;
            }
        }
    }
    det
}

/// Real roots of `det(H − λI)` in `[lo, hi]`: sign changes on a grid of
/// spacing `step`, each refined by bisection. Requires simple eigenvalues
/// separated by more than `step`.
pub fn hermitian_eigenvalues_by_bisection(h: &Dense, lo: f64, hi: f64, step: f64) -> Vec<f64> {
    let n = h.len();
    let f = |lambda: f64| {
        let mut shifted = h.clone();
        for (i, row) in shifted.iter_mut().enumerate().take(n) {
            row[i] -= lambda;
        }
        determinant(&shifted).re
    };
    let mut roots = Vec::new();
    let mut x0 = lo;
    let mut f0 = f(x0);
    while x0 < hi {
        let x1 = x0 + step;
        let f1 = f(x1);
        if f0 == 0.0 {
            roots.push(x0);
        } else if f0 * f1 < 0.0 {
            let (mut a, mut b, mut fa) = (x0, x1, f0);
            for _ in 0..200 {
                let mid = 0.5 * (a + b);
                let fm = f(mid);
                if fm == 0.0 || b - a < 1e-15 {
                    a = mid;
                    b = mid;
                    break;
                }
                if fa * fm < 0.0 {
                    b = mid;
                } else {
                    a = mid;
                    fa = fm;
                }
            }
            roots.push(0.5 * (a + b));
        }
        x0 = x1;
        f0 = f1;
    }
    roots
}

/// `Σ_{k<terms} (−iht)^k / k!`.
pub fn taylor_unitary(h: &Dense, t: f64, terms: usize) -> Dense {
    let n = h.len();
    let x: Dense = h.iter().map(|row| row.iter().map(|z| z * c(0.0, -t)).collect()).collect();
    let mut sum = dense_identity(n);
    let mut term = dense_identity(n);
    for k in 1..terms {
        term = dense_mul(&term, &x);
        for row in term.iter_mut() {
            for z in row.iter_mut() {
                *z /= k as f64;
            }
        }
        for i in 0..n {
            for j in 0..n {
                sum[i][j] += term[i][j];
            }
        }
    }
    sum
}

pub fn max_abs_diff(a: &ComplexMatrix, b: &ComplexMatrix) -> f64 {
    assert_eq!((a.rows(), a.cols()), (b.rows(), b.cols()));
    a.entries().iter().zip(b.entries()).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max)
}

pub fn gaussian(rng: &mut ChaCha8Rng) -> f64 {
    rng.sample(StandardNormal)
}

pub fn random_matrix(rng: &mut ChaCha8Rng, n: usize) -> ComplexMatrix {
    ComplexMatrix::from_fn(n, n, |_, _| c(gaussian(rng), gaussian(rng))).unwrap()
}

pub fn random_hermitian(rng: &mut ChaCha8Rng, n: usize) -> ComplexMatrix {
    let m = random_matrix(rng, n);
    m.try_add(&m.adjoint()).unwrap().scale(c(0.5, 0.0))
}

pub fn random_unit_vector(rng: &mut ChaCha8Rng, n: usize) -> ComplexVector {
    ComplexVector::new((0..n).map(|_| c(gaussian(rng), gaussian(rng))).collect())
        .unwrap()
        .normalized()
}

pub fn random_probe(rng: &mut ChaCha8Rng, n: usize) -> ProbeState {
    ProbeState::new(random_unit_vector(rng, n)).unwrap()
}

/// `G G† / Tr(G G†)` for a complex Gaussian `G`: full rank almost surely.
pub fn random_density(rng: &mut ChaCha8Rng, n: usize) -> DensityMatrix {
    let g = random_matrix(rng, n);
    DensityMatrix::from_unnormalized(g.matmul(&g.adjoint()).unwrap().hermitian_part().unwrap()).unwrap()
}

/// Hermitian, unit trace and positive semidefinite within the state tolerances.
pub fn is_valid_state(m: &ComplexMatrix) -> bool {
    let n = m.rows();
    let hermitian = (0..n).all(|i| (0..n).all(|j| (m[(i, j)] - m[(j, i)].conj()).norm() <= 1e-10));
    let trace = (m.trace() - ONE).norm() <= 1e-10;
    let positive = cholesky_succeeds(&to_dense(m), 1e-9);
    hermitian && trace && positive
}

/// Whether `A + shift·I` admits a Cholesky factorization, i.e. is positive
/// definite; for Hermitian `A` this certifies `λ_min(A) > −shift`.
pub fn cholesky_succeeds(a: &Dense, shift: f64) -> bool {
    let n = a.len();
    let mut l = vec![vec![ZERO; n]; n];
    for j in 0..n {
        let mut d = a[j][j].re + shift;
        for k in 0..j {
            d -= l[j][k].norm_sqr();
        }
        if !(d > 0.0) {
            return false;
        }
        let d = d.sqrt();
        l[j][j] = c(d, 0.0);
        for i in j + 1..n {
            let mut s = a[i][j];
            for k in 0..j {
                s -= l[i][k] * l[j][k].conj();
            }
            l[i][j] = s / d;
        }
    }
    true
}

/// `|⟨n|β⟩|²` for a coherent state `β`.
pub fn coherent_population(beta: Complex64, n: usize) -> f64 {
    let x = beta.norm_sqr();
    let mut p = (-x).exp();
    for k in 1..=n {
        p *= x / k as f64;
    }
    p
}

/// `S diag(λ) S⁻¹` with random `S` and magnitudes `0.95·0.7ᵏ`, random phases.
pub fn distinct_spectrum(seed: u64, n: usize) -> (ComplexMatrix, Vec<Complex64>) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let s = random_matrix(&mut rng, n);
    let lambdas: Vec<Complex64> = (0..n)
        .map(|k| Complex64::from_polar(0.95 * 0.7f64.powi(k as i32), 6.0 * gaussian(&mut rng)))
        .collect();
    let mut cols = Vec::with_capacity(n);
    for j in 0..n {
        cols.push(s.solve(&ComplexVector::basis(n, j).unwrap()).unwrap());
    }
    let s_inv = ComplexMatrix::from_fn(n, n, |i, j| cols[j][i]).unwrap();
    let m = s.matmul(&ComplexMatrix::from_diagonal(&lambdas).unwrap()).unwrap().matmul(&s_inv).unwrap();
    (m, lambdas)
}
