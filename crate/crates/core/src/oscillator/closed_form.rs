use num_complex::Complex64;

use super::coefficients::{coefficients, propagator_factors, ClosedFormCoefficients};
use super::states::annihilation;
use super::{OscillatorError, OscillatorParams, Result};
use crate::engine::{BipartiteSystem, DensityMatrix};
use crate::linalg::{expm, tensor_product, ComplexMatrix, ComplexVector};

/// Extra Fock levels used internally by the single-mode closed forms. The
/// operator or state is built on the enlarged space and then cut back, so the
/// returned block is free of truncation artifacts at the boundary.
const WORKING_MARGIN: usize = 16;
const EIGENVECTOR_TAIL_LIMIT: f64 = 1e-8;
const DISPLACED_THERMAL_TAIL_LIMIT: f64 = 1e-6;

const ONE: Complex64 = Complex64::new(1.0, 0.0);

/// Truncated `H = Ω a†a + ω b†b + ig(a†b − ab†)` in the probe-major basis.
pub fn build_hamiltonian(p: &OscillatorParams) -> Result<BipartiteSystem> {
    let (da, db) = (p.n_max_a + 1, p.n_max_b + 1);
    let a = annihilation(p.n_max_a);
    let b = annihilation(p.n_max_b);
    let number = |d: usize, w: f64| {
        ComplexMatrix::from_diagonal(&(0..d).map(|n| Complex64::new(w * n as f64, 0.0)).collect::<Vec<_>>())
    };
    let free = &tensor_product(&number(da, p.big_omega)?, &ComplexMatrix::identity(db)?)?
        + &tensor_product(&ComplexMatrix::identity(da)?, &number(db, p.omega)?)?;
    // ig(M − M†) with M = a†b is Hermitian by construction
    let m = tensor_product(&a.adjoint(), &b)?;
    let interaction = m.try_sub(&m.adjoint())?.scale(Complex64::new(0.0, p.g));
    Ok(BipartiteSystem::new(da, db, &free + &interaction)?)
}

fn diagonal_powers(base: Complex64, dim: usize) -> Vec<Complex64> {
    let mut out = Vec::with_capacity(dim);
    let mut z = ONE;
    for _ in 0..dim {
        out.push(z);
        z *= base;
    }
    out
}

fn scale_rows(m: &ComplexMatrix, weights: &[Complex64]) -> Result<ComplexMatrix> {
    Ok(ComplexMatrix::from_fn(m.rows(), m.cols(), |i, j| m[(i, j)] * weights[i])?)
}

/// `e^{A a†b} e^{B a†a} e^{C b†b} e^{-A ab†}` on the truncated two-mode space,
/// with the two diagonal factors built from powers of `e^B` and `e^C`.
pub fn factorized_propagator(p: &OscillatorParams) -> Result<ComplexMatrix> {
    let f = propagator_factors(p)?;
    let (da, db) = (p.n_max_a + 1, p.n_max_b + 1);
    let a = annihilation(p.n_max_a);
    let b = annihilation(p.n_max_b);

    let raise = expm(&tensor_product(&a.adjoint(), &b)?.scale(f.a_coef))?;
    let lower = expm(&tensor_product(&a, &b.adjoint())?.scale(-f.a_coef))?;
    let pow_b = diagonal_powers(f.exp_b, da);
    let pow_c = diagonal_powers(f.exp_c, db);
    let diag: Vec<Complex64> = (0..da * db).map(|k| pow_b[k / db] * pow_c[k % db]).collect();

    Ok(raise.matmul(&scale_rows(&lower, &diag)?)?)
}

/// `U = exp[κ(α* b + α b†)]` on occupations `0..=cutoff`, or its inverse.
fn eigenvector_generator(kappa: Complex64, alpha: Complex64, cutoff: usize, inverse: bool) -> Result<ComplexMatrix> {
    let b = annihilation(cutoff);
    let sign = if inverse { -1.0 } else { 1.0 };
    let gen = b.scale(kappa * alpha.conj() * sign).try_add(&b.adjoint().scale(kappa * alpha * sign))?;
    Ok(expm(&gen)?)
}

/// What the single-mode closed forms need from the coefficients.
struct ModeData {
    lambda0: Complex64,
    kappa: Complex64,
    exp_c: Complex64,
    abs_exp_c: f64,
}

/// For `g = 0` the modes decouple and `U = 𝟙` exactly, so the interval
/// restrictions of [`coefficients`] do not apply there.
fn mode_data(p: &OscillatorParams) -> Result<ModeData> {
    match coefficients(p) {
        Ok(c) => Ok(ModeData {
            lambda0: c.lambda0,
            kappa: c.kappa,
            exp_c: c.exp_c,
            abs_exp_c: c.abs_exp_c,
        }),
        Err(_) if p.g == 0.0 => {
            let f = propagator_factors(p)?;
            Ok(ModeData {
                lambda0: (-p.alpha.norm_sqr() * (ONE - f.exp_b)).exp(),
                kappa: Complex64::new(0.0, 0.0),
                exp_c: f.exp_c,
                abs_exp_c: f.exp_c.norm(),
            })
        }
        Err(e) => Err(e),
    }
}

/// `V_α(τ) = λ₀ U e^{C b†b} U⁻¹` on occupations `0..=n_max_b`.
pub fn closed_form_propagator(p: &OscillatorParams) -> Result<ComplexMatrix> {
    let m = mode_data(p)?;
    let work = p.n_max_b + WORKING_MARGIN;
    let u = eigenvector_generator(m.kappa, p.alpha, work, false)?;
    let u_inv = eigenvector_generator(m.kappa, p.alpha, work, true)?;
    let spectrum = diagonal_powers(m.exp_c, work + 1);
    let v = scale_rows(&u_inv, &spectrum)?;
    let full = u.matmul(&v)?.scale(m.lambda0);
    Ok(full.leading_block(p.n_max_b + 1, p.n_max_b + 1)?)
}

/// Unit-normalized `|uₙ) = U|n)` on occupations `0..=cutoff`.
pub fn eigenvector_u_n(c: &ClosedFormCoefficients, n: usize, cutoff: usize) -> Result<ComplexVector> {
    if n > cutoff {
        return Err(OscillatorError::InvalidParameter(format!(
            "level {n} above cutoff {cutoff}"
        )));
    }
    let work = cutoff + WORKING_MARGIN;
    let u = eigenvector_generator(c.kappa, c.alpha, work, false)?;
    let column: Vec<Complex64> = (0..=work).map(|i| u[(i, n)]).collect();
    let total: f64 = column.iter().map(|z| z.norm_sqr()).sum();
    let tail: f64 = column[cutoff + 1..].iter().map(|z| z.norm_sqr()).sum::<f64>() / total;
    if tail > EIGENVECTOR_TAIL_LIMIT {
        return Err(OscillatorError::CutoffTooSmall { tail });
    }
    Ok(ComplexVector::new(column[..=cutoff].to_vec())?.normalized())
}

/// Exact state of `b` after `n` confirmations, starting thermal.
#[derive(Debug, Clone, PartialEq)]
pub struct ThermalTrajectoryClosedForm {
    pub n: usize,
    pub theta: Complex64,
    /// `γ` in the displacement `D = exp(γ b† − γ* b)`.
    pub displacement_argument: Complex64,
    /// `1 − |e^C|^{2N} e^{-βω}`.
    pub gauge_norm: f64,
    pub state: DensityMatrix,
}

/// Displaced thermal state after `n` confirmations:
///
/// `ρ(N) = (1 − x) D e^{-(βω − 2N Re C) b†b} D†`, `x = |e^C|^{2N} e^{-βω}`,
/// `D = exp(γ b† − γ* b)`, `γ = αΘ(N)/(1 − x)`,
/// `Θ(N) = X − X* e^{NC} e^{-βω}`, `X = A(1 − e^{NC})/(1 − e^{-C})`.
///
/// With this orientation of `γ` the state tends to `|α̃)(α̃|` and coincides
/// with direct iteration of the confirmation map.
pub fn closed_form_rho(p: &OscillatorParams, n: usize) -> Result<ThermalTrajectoryClosedForm> {
    let m = mode_data(p)?;
    let boltzmann = (-p.beta * p.omega).exp();
    if !(boltzmann < 1.0) {
        return Err(OscillatorError::InvalidParameter("beta * omega must be positive".into()));
    }
    let exp_nc = m.exp_c.powu(n as u32);
    let x_coef = m.kappa * (ONE - exp_nc);
    let theta = x_coef - x_coef.conj() * exp_nc * boltzmann;
    let ratio = boltzmann * m.abs_exp_c.powi(2 * n as i32);
    let gauge_norm = 1.0 - ratio;
    let gamma = p.alpha * theta / gauge_norm;

    let work = p.n_max_b + WORKING_MARGIN;
    let b = annihilation(work);
    let generator = b.adjoint().scale(gamma).try_sub(&b.scale(gamma.conj()))?;
    let displacement = expm(&generator)?;
    let weights: Vec<Complex64> = diagonal_powers(Complex64::new(ratio, 0.0), work + 1)
        .into_iter()
        .map(|w| w * gauge_norm)
        .collect();
    let gaussian = ComplexMatrix::from_diagonal(&weights)?;
    let full = displacement.matmul(&gaussian)?.matmul(&displacement.adjoint())?;

    let dim = p.n_max_b + 1;
    let tail: f64 = (dim..=work).map(|k| full[(k, k)].re).sum::<f64>() + ratio.powi(work as i32 + 1);
    if tail > DISPLACED_THERMAL_TAIL_LIMIT {
        return Err(OscillatorError::CutoffTooSmall { tail });
    }
    let block = full.leading_block(dim, dim)?;
    let state = DensityMatrix::from_unnormalized(block.hermitian_part()?)?;
    Ok(ThermalTrajectoryClosedForm {
        n,
        theta,
        displacement_argument: gamma,
        gauge_norm,
        state,
    })
}
