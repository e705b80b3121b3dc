//! Purification of a quantum system through repeated projective measurement
//! of a coupled probe.
//!
//! A probe `A` is prepared in `|φ⟩`, the pair evolves for a time `τ`, and the
//! probe is checked to still be in `|φ⟩`. Conditioned on every check
//! succeeding, the state of `B` evolves under the projected propagator
//! `V = ⟨φ|e^{-iHτ}|φ⟩` and converges to the dominant right eigenvector of
//! `V` whenever that eigenvalue is unique in magnitude.
//!
//! * [`linalg`] dense complex linear algebra and non-Hermitian eigenpairs.
//! * [`engine`] projected propagators, trajectories, and spectral conditions.
//! * [`oscillator`] the exactly solvable two-oscillator model, used both as a
//!   calculator and as a reference for the engine.

// `!(x > 0.0)` also rejects NaN
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod engine;
pub mod linalg;
pub mod oscillator;
