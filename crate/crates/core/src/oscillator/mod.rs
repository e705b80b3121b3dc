//! Two resonantly coupled oscillators, `H = Ω a†a + ω b†b + ig(a†b − ab†)`,
//! with oscillator `a` repeatedly confirmed in a coherent state `|α⟩`.
//!
//! The model is exactly solvable: the projected propagator has the geometric
//! spectrum `λₙ = λ₀ e^{nC}`, its dominant eigenvector is a coherent state,
//! and a thermal initial state of `b` stays a displaced thermal state along
//! the trajectory. Everything here is written in terms of the branch-free
//! quantities `A`, `e^B`, `e^C` and `|e^C|`; no complex logarithm is taken.
//!
//! Fock cutoffs (`n_max_a`, `n_max_b`) are the highest occupation kept, so a
//! mode with cutoff `c` has dimension `c + 1`.

mod closed_form;
mod coefficients;
mod states;

pub use closed_form::{
    build_hamiltonian, closed_form_propagator, closed_form_rho, eigenvector_u_n, factorized_propagator,
    ThermalTrajectoryClosedForm,
};
pub use coefficients::{
    coefficients, lambda_n, propagator_factors, tuned_tau, ClosedFormCoefficients, FrequencyBranch,
    PropagatorFactors,
};
pub use states::{annihilation, coherent_state, thermal_state};

use std::f64::consts::PI;

use num_complex::Complex64;
use thiserror::Error;

use crate::engine::{
    build_projected_propagator, BipartiteSystem, DensityMatrix, EngineError, ProbeState, ProjectedPropagator,
};
use crate::linalg::LinalgError;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum OscillatorError {
    #[error(transparent)]
    Engine(#[from] EngineError),

    #[error(transparent)]
    Linalg(#[from] LinalgError),

    /// `δτ = mπ`: `A = 0`, `|e^C| = 1`, and no purification takes place.
    #[error("degenerate interval: δτ = {delta_tau} is a multiple of π")]
    DegenerateInterval { delta_tau: f64 },

    #[error("closed-form coefficients are singular at this interval ({0})")]
    SingularCoefficients(&'static str),

    #[error("Fock cutoff too small (tail mass {tail:e})")]
    CutoffTooSmall { tail: f64 },

    #[error("Ω± vanishes; no tuned interval exists")]
    ZeroFrequency,

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("closed forms of λ₀ disagree: {exponential} vs {cotangent}")]
    InconsistentClosedForms {
        exponential: Complex64,
        cotangent: Complex64,
    },
}

pub type Result<T> = std::result::Result<T, OscillatorError>;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OscillatorParams {
    /// Frequency `Ω` of the probed oscillator `a`.
    pub big_omega: f64,
    /// Frequency `ω` of oscillator `b`.
    pub omega: f64,
    pub g: f64,
    /// Coherent amplitude of the probe state of `a`.
    pub alpha: Complex64,
    /// Inverse temperature of the initial thermal state of `b`.
    pub beta: f64,
    /// Interval between confirmations.
    pub tau: f64,
    pub n_max_a: usize,
    pub n_max_b: usize,
}

impl OscillatorParams {
    /// Resonant parameters `Ω = ω = 1`, `g = 0.2`, `α = 0.5`, `β = 1` with
    /// `τ = 2π/Ω₊`, the setting used for the reference purification run.
    pub fn figure1(cutoff: usize) -> Self {
        let mut p = Self {
            big_omega: 1.0,
            omega: 1.0,
            g: 0.2,
            alpha: Complex64::new(0.5, 0.0),
            beta: 1.0,
            tau: 0.0,
            n_max_a: cutoff,
            n_max_b: cutoff,
        };
        p.tau = 2.0 * PI / p.omega_plus();
        p
    }

    pub fn with_tau(self, tau: f64) -> Self {
        Self { tau, ..self }
    }

    pub fn with_cutoffs(self, n_max_a: usize, n_max_b: usize) -> Self {
        Self { n_max_a, n_max_b, ..self }
    }

    /// `δ = √(g² + (Ω−ω)²/4)`.
    pub fn delta(&self) -> f64 {
        (self.g * self.g + (self.big_omega - self.omega).powi(2) / 4.0).sqrt()
    }

    pub fn omega_plus(&self) -> f64 {
        (self.big_omega + self.omega) / 2.0 + self.delta()
    }

    pub fn omega_minus(&self) -> f64 {
        (self.big_omega + self.omega) / 2.0 - self.delta()
    }

    /// Smallest cutoff accepted for this `α`: `⌈4(1 + |α|²)⌉`.
    pub fn cutoff_floor(&self) -> usize {
        (4.0 * (1.0 + self.alpha.norm_sqr())).ceil() as usize
    }

    pub fn validate(&self) -> Result<()> {
        let finite = [self.big_omega, self.omega, self.g, self.alpha.re, self.alpha.im, self.beta, self.tau]
            .iter()
            .all(|x| x.is_finite());
        if !finite {
            return Err(OscillatorError::InvalidParameter("non-finite parameter".into()));
        }
        if !(self.beta > 0.0) {
            return Err(OscillatorError::InvalidParameter(format!("beta must be > 0, got {}", self.beta)));
        }
        if !(self.tau >= 0.0) {
            return Err(OscillatorError::InvalidParameter(format!("tau must be >= 0, got {}", self.tau)));
        }
        let floor = self.cutoff_floor();
        if self.n_max_a < floor || self.n_max_b < floor {
            return Err(OscillatorError::InvalidParameter(format!(
                "cutoffs ({}, {}) below the floor {floor}",
                self.n_max_a, self.n_max_b
            )));
        }
        Ok(())
    }
}

/// Engine-side objects for the oscillator model: the truncated system, the
/// coherent probe, and the thermal initial state of `b`.
#[derive(Debug, Clone)]
pub struct OscillatorModel {
    pub params: OscillatorParams,
    pub system: BipartiteSystem,
    pub probe: ProbeState,
    pub initial_state: DensityMatrix,
}

impl OscillatorModel {
    pub fn new(params: OscillatorParams) -> Result<Self> {
        params.validate()?;
        let system = build_hamiltonian(&params)?;
        let probe = ProbeState::new(coherent_state(params.alpha, params.n_max_a)?)?;
        let initial_state = thermal_state(params.beta, params.omega, params.n_max_b)?;
        Ok(Self {
            params,
            system,
            probe,
            initial_state,
        })
    }

    /// `V_α(τ)` built numerically from `e^{-iHτ}`.
    pub fn propagator(&self) -> Result<ProjectedPropagator> {
        Ok(build_projected_propagator(&self.system, &self.probe, self.params.tau)?)
    }

    pub fn propagator_at(&self, tau: f64) -> Result<ProjectedPropagator> {
        Ok(build_projected_propagator(&self.system, &self.probe, tau)?)
    }
}
