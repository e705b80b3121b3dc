use std::f64::consts::PI;

use num_complex::Complex64;

use super::{OscillatorError, OscillatorParams, Result};

const INTERVAL_SLACK: f64 = 1e-9;
const LAMBDA0_AGREEMENT: f64 = 1e-9;
const SINGULAR: f64 = 1e-12;

const I: Complex64 = Complex64::new(0.0, 1.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);

/// Coefficients of the normal-ordered propagator
/// `e^{-iHτ} = e^{A a†b} e^{B a†a} e^{C b†b} e^{-A ab†}`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PropagatorFactors {
    pub a_coef: Complex64,
    pub exp_b: Complex64,
    pub exp_c: Complex64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ClosedFormCoefficients {
    pub delta: f64,
    pub big_omega_plus: f64,
    pub big_omega_minus: f64,
    pub a_coef: Complex64,
    pub exp_b: Complex64,
    pub exp_c: Complex64,
    pub exp_neg_c: Complex64,
    /// Exponential form `e^{-|α|²[1 − e^B − A²/(1−e^{-C})]}`.
    pub lambda0: Complex64,
    /// Cotangent form in `Ω±`; `None` when it is not finite (e.g. `δ = 0`).
    pub lambda0_cotangent: Option<Complex64>,
    pub alpha: Complex64,
    /// `A/(1−e^{-C})`, evaluated in a form that stays finite as `e^C → 0`.
    pub kappa: Complex64,
    /// `α̃ = Aα/(1−e^{-C})`, the coherent amplitude of the purified state.
    pub alpha_tilde: Complex64,
    /// `Aα*/(1−e^{-C})`, the coefficient of `b` in the eigenvector generator.
    pub xi: Complex64,
    /// `√(1 − (g/δ)² sin²δτ)`.
    pub abs_exp_c: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FrequencyBranch {
    Plus,
    Minus,
}

fn sinc(x: f64) -> f64 {
    if x.abs() < 1e-6 {
        1.0 - x * x / 6.0
    } else {
        x.sin() / x
    }
}

/// `sin(δτ)/δ`, finite as `δ → 0`.
fn sin_over_delta(p: &OscillatorParams) -> f64 {
    p.tau * sinc(p.delta() * p.tau)
}

/// `sin(δτ)/δ`, the denominator `cos δτ + i(Ω−ω)/(2δ) sin δτ`, and the phase
/// `e^{-i(Ω+ω)τ/2}`; then `A = g s/den`, `e^B = phase/den`, `e^C = phase·den`.
fn raw_factors(p: &OscillatorParams) -> (f64, Complex64, Complex64) {
    let s = sin_over_delta(p);
    let den = Complex64::new((p.delta() * p.tau).cos(), 0.5 * (p.big_omega - p.omega) * s);
    let phase = Complex64::from_polar(1.0, -0.5 * (p.big_omega + p.omega) * p.tau);
    (s, den, phase)
}

/// `A`, `e^B`, `e^C` for any interval, including `τ = 0` and `δτ = mπ`.
///
/// Fails where `e^C` vanishes (`A` and `e^B` diverge there).
pub fn propagator_factors(p: &OscillatorParams) -> Result<PropagatorFactors> {
    let (s, den, phase) = raw_factors(p);
    if den.norm() < SINGULAR {
        return Err(OscillatorError::SingularCoefficients("cos δτ + i(Ω−ω)/(2δ) sin δτ = 0"));
    }
    Ok(PropagatorFactors {
        a_coef: p.g * s / den,
        exp_b: phase / den,
        exp_c: phase * den,
    })
}

fn cot(x: f64) -> f64 {
    x.cos() / x.sin()
}

fn lambda0_cotangent(p: &OscillatorParams) -> Option<Complex64> {
    let delta = p.delta();
    if delta == 0.0 {
        return None;
    }
    let r = (p.big_omega - p.omega) / (2.0 * delta);
    let bracket = (1.0 + r) * cot(p.omega_plus() * p.tau / 2.0) + (1.0 - r) * cot(p.omega_minus() * p.tau / 2.0);
    let z = ONE - 0.5 * I * bracket;
    let value = (-2.0 * p.alpha.norm_sqr() / z).exp();
    (value.re.is_finite() && value.im.is_finite()).then_some(value)
}

/// Closed-form coefficients at the interval `p.tau`.
///
/// Fails with `DegenerateInterval` when `δτ` is within `1e-9` of a multiple
/// of `π` (this includes `τ = 0`). Near `e^C = 0` the fields `a_coef`,
/// `exp_b` and `exp_neg_c` grow without bound while `λ₀`, `α̃` and the
/// eigenvector generator stay finite.
pub fn coefficients(p: &OscillatorParams) -> Result<ClosedFormCoefficients> {
    let delta = p.delta();
    let delta_tau = delta * p.tau;
    if (delta_tau - (delta_tau / PI).round() * PI).abs() <= INTERVAL_SLACK {
        return Err(OscillatorError::DegenerateInterval { delta_tau });
    }
    let (s, den, phase) = raw_factors(p);
    let exp_c = phase * den;
    let one_minus = ONE - exp_c;
    if one_minus.norm() < SINGULAR {
        return Err(OscillatorError::SingularCoefficients("e^C = 1"));
    }
    let (a_coef, exp_b, exp_neg_c) = (p.g * s / den, phase / den, ONE / exp_c);
    if !(a_coef.is_finite() && exp_b.is_finite() && exp_neg_c.is_finite()) {
        return Err(OscillatorError::SingularCoefficients("e^C = 0"));
    }
    // A/(1 − e^{-C}) = −A e^C/(1 − e^C) with A e^C = g s e^{-i(Ω+ω)τ/2}; and
    // e^B + A²/(1 − e^{-C}) = −phase²(1 − e^{C*})/(1 − e^C) after using
    // |e^C|² = 1 − g²s². Both stay finite where e^C → 0.
    let kappa = -p.g * s * phase / one_minus;
    let b_plus = -phase * phase * (ONE - exp_c.conj()) / one_minus;
    let lambda0 = (-p.alpha.norm_sqr() * (ONE - b_plus)).exp();
    let cotangent = lambda0_cotangent(p);
    if let Some(c) = cotangent {
        if (c - lambda0).norm() > LAMBDA0_AGREEMENT * lambda0.norm().max(1.0) {
            return Err(OscillatorError::InconsistentClosedForms {
                exponential: lambda0,
                cotangent: c,
            });
        }
    }
    let gs = p.g * s;
    Ok(ClosedFormCoefficients {
        delta,
        big_omega_plus: p.omega_plus(),
        big_omega_minus: p.omega_minus(),
        a_coef,
        exp_b,
        exp_c,
        exp_neg_c,
        lambda0,
        lambda0_cotangent: cotangent,
        alpha: p.alpha,
        kappa,
        alpha_tilde: kappa * p.alpha,
        xi: kappa * p.alpha.conj(),
        abs_exp_c: (1.0 - gs * gs).max(0.0).sqrt(),
    })
}

/// `λₙ = λ₀ (e^C)ⁿ`.
pub fn lambda_n(c: &ClosedFormCoefficients, n: usize) -> Complex64 {
    c.lambda0 * c.exp_c.powu(n as u32)
}

/// `τ = 2mπ/|Ω±|`, at which `λ₀ = 1`.
pub fn tuned_tau(p: &OscillatorParams, m: u32, branch: FrequencyBranch) -> Result<f64> {
    let freq = match branch {
        FrequencyBranch::Plus => p.omega_plus(),
        FrequencyBranch::Minus => p.omega_minus(),
    };
    if freq.abs() < SINGULAR {
        return Err(OscillatorError::ZeroFrequency);
    }
    if m == 0 {
        return Err(OscillatorError::InvalidParameter("m must be >= 1".into()));
    }
    Ok(2.0 * m as f64 * PI / freq.abs())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: Complex64, b: Complex64, tol: f64) -> bool {
        (a - b).norm() <= tol
    }

    #[test]
    fn figure1_coefficients() {
        let c = coefficients(&OscillatorParams::figure1(30)).unwrap();
        let sqrt3 = 3f64.sqrt();
        assert!((c.delta - 0.2).abs() < 1e-15);
        assert!(close(c.a_coef, Complex64::new(sqrt3, 0.0), 1e-12));
        assert!(close(ONE - c.exp_neg_c, Complex64::new(0.0, sqrt3), 1e-12));
        assert!(close(c.alpha_tilde, Complex64::new(0.0, -0.5), 1e-12));
        assert!(close(c.lambda0, ONE, 1e-12));
        assert!(close(c.lambda0_cotangent.unwrap(), ONE, 1e-12));
        assert!((c.abs_exp_c - 0.5).abs() < 1e-12);
        assert!((c.exp_c.norm() - 0.5).abs() < 1e-12);
        assert!(close(c.exp_c * c.exp_neg_c, ONE, 1e-12));
    }

    #[test]
    fn decoupled_limit_has_unit_modulus() {
        let p = OscillatorParams {
            big_omega: 2.0,
            omega: 1.0,
            g: 0.0,
            tau: 1.3,
            ..OscillatorParams::figure1(30)
        };
        let c = coefficients(&p).unwrap();
        assert!((c.delta - 0.5).abs() < 1e-15);
        assert_eq!(c.a_coef, Complex64::new(0.0, 0.0));
        assert!(close(c.exp_c, Complex64::from_polar(1.0, -1.3), 1e-14));
        assert!((c.abs_exp_c - 1.0).abs() < 1e-15);
    }

    #[test]
    fn small_interval_approaches_identity() {
        let p = OscillatorParams::figure1(30).with_tau(1e-7);
        let c = coefficients(&p).unwrap();
        assert!(c.a_coef.norm() < 1e-6);
        assert!(close(c.exp_b, ONE, 1e-6));
        assert!(close(c.exp_c, ONE, 1e-6));
        assert!(close(c.lambda0, ONE, 1e-6));
    }

    #[test]
    fn multiples_of_pi_are_degenerate() {
        let p = OscillatorParams::figure1(30);
        for tau in [0.0, PI / 0.2, 2.0 * PI / 0.2] {
            assert!(matches!(
                coefficients(&p.with_tau(tau)),
                Err(OscillatorError::DegenerateInterval { .. })
            ));
        }
        // the factors themselves stay finite there
        let f = propagator_factors(&p.with_tau(0.0)).unwrap();
        assert_eq!(f.a_coef, Complex64::new(0.0, 0.0));
        assert!(close(f.exp_b, ONE, 1e-15) && close(f.exp_c, ONE, 1e-15));
    }

    #[test]
    fn tuned_intervals() {
        let p = OscillatorParams::figure1(30);
        let plus = tuned_tau(&p, 1, FrequencyBranch::Plus).unwrap();
        let minus = tuned_tau(&p, 1, FrequencyBranch::Minus).unwrap();
        assert!((plus - 2.0 * PI / 1.2).abs() < 1e-12);
        assert!((minus - 2.0 * PI / 0.8).abs() < 1e-12);
        assert!((tuned_tau(&p, 2, FrequencyBranch::Plus).unwrap() - 2.0 * plus).abs() < 1e-12);
        // on resonance the minus branch lands on δτ = π/2, where e^C = 0
        let at_minus = coefficients(&p.with_tau(minus)).unwrap();
        assert!(at_minus.abs_exp_c < 1e-12);
        assert!(close(at_minus.lambda0, ONE, 1e-9));
        // κ = −g s e^{-iτ} with g s = 1 and τ = 5π/2
        assert!(close(at_minus.alpha_tilde, Complex64::new(0.0, 0.5), 1e-9));
        assert!(propagator_factors(&p.with_tau(minus)).is_err());
        let detuned = OscillatorParams { big_omega: 2.0, ..p };
        for branch in [FrequencyBranch::Plus, FrequencyBranch::Minus] {
            let q = detuned.with_tau(tuned_tau(&detuned, 1, branch).unwrap());
            assert!((coefficients(&q).unwrap().lambda0.norm() - 1.0).abs() < 1e-9);
        }
        assert!((coefficients(&p.with_tau(plus)).unwrap().lambda0.norm() - 1.0).abs() < 1e-9);
    }

    #[test]
    fn zero_frequency_branch() {
        let p = OscillatorParams {
            big_omega: 0.2,
            omega: 0.2,
            g: 0.2,
            ..OscillatorParams::figure1(30)
        };
        assert!(matches!(
            tuned_tau(&p, 1, FrequencyBranch::Minus),
            Err(OscillatorError::ZeroFrequency)
        ));
    }

    #[test]
    fn geometric_spectrum() {
        let c = coefficients(&OscillatorParams::figure1(30)).unwrap();
        assert_eq!(lambda_n(&c, 0), c.lambda0);
        assert!((lambda_n(&c, 1).norm() - c.abs_exp_c).abs() < 1e-12);
        let mags: Vec<f64> = (0..8).map(|n| lambda_n(&c, n).norm()).collect();
        assert!(mags.windows(2).all(|w| w[1] <= w[0]));
    }
}
