//! Repeated confirmation of a probe state and its effect on the partner
//! system.
//!
//! Basis ordering for the bipartite space is probe-major:
//! `index = a_index * dim_b + b_index`.

mod density;
mod report;
mod system;
mod trajectory;
mod zeno;

pub use density::{fidelity, trace_distance, DensityMatrix};
pub use report::{spectral_report, spectral_report_seeded, ConditionsReport};
pub use system::{build_projected_propagator, BipartiteSystem, ProbeState, ProjectedPropagator};
pub use trajectory::{
    evolve_step, run_purification, survival_probability, PurificationTrajectory, StepRecord,
};
pub use zeno::{zeno_limit_scan, zeno_point, ZenoPoint};

use thiserror::Error;

use crate::linalg::LinalgError;

/// Conditional probability below which a confirmation is treated as never
/// happening.
pub const EXTINCTION_THRESHOLD: f64 = 1e-14;

/// Default tolerance on `||λ₀| − 1|` for the no-decay condition.
pub const CONDITION_I_EPSILON: f64 = 1e-6;

/// Slack on the largest singular value of a projected propagator.
pub const CONTRACTION_SLACK: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum EngineError {
    #[error(transparent)]
    Linalg(#[from] LinalgError),

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("state vector is not normalized (norm {norm})")]
    NotNormalized { norm: f64 },

    #[error("propagator is not a contraction (largest singular value {sigma_max})")]
    NotContraction { sigma_max: f64 },

    #[error("invalid density matrix: {0}")]
    InvalidDensity(String),

    /// The confirmation probability fell below [`EXTINCTION_THRESHOLD`]:
    /// the branch that keeps finding the probe in its state is unreachable.
    #[error("extinct branch (confirmation probability {probability:e})")]
    ExtinctBranch { probability: f64 },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

pub type Result<T> = std::result::Result<T, EngineError>;
