use super::density::DensityMatrix;
use super::system::{build_projected_propagator, BipartiteSystem, ProbeState};
use super::trajectory::survival_probability;
use super::{EngineError, Result};
use crate::linalg::ComplexMatrix;

/// One point of a fixed-total-time measurement-frequency scan.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ZenoPoint {
    pub n: usize,
    pub tau: f64,
    /// Probability that all `n` confirmations at spacing `T/n` succeed.
    pub yield_: f64,
    /// `‖W†W − 𝟙‖_F` with `W = V(T/n)ⁿ`.
    pub unitarity_defect: f64,
}

pub fn zeno_point(
    sys: &BipartiteSystem,
    phi: &ProbeState,
    rho0: &DensityMatrix,
    total_time: f64,
    n: usize,
) -> Result<ZenoPoint> {
    if n == 0 {
        return Err(EngineError::InvalidArgument("measurement count must be >= 1".into()));
    }
    if !(total_time > 0.0) {
        return Err(EngineError::InvalidArgument(format!(
            "total time must be > 0, got {total_time}"
        )));
    }
    let tau = total_time / n as f64;
    let v = build_projected_propagator(sys, phi, tau)?;
    let exponent = u32::try_from(n).map_err(|_| EngineError::InvalidArgument(format!("n = {n} too large")))?;
    let w = v.matrix().pow(exponent)?;
    let defect = w
        .adjoint()
        .matmul(&w)?
        .try_sub(&ComplexMatrix::identity(w.rows())?)?
        .frobenius_norm();
    Ok(ZenoPoint {
        n,
        tau,
        yield_: survival_probability(rho0, &v, n)?,
        unitarity_defect: defect,
    })
}

/// Splits `total_time` into `n` equal intervals for each requested `n`.
pub fn zeno_limit_scan(
    sys: &BipartiteSystem,
    phi: &ProbeState,
    rho0: &DensityMatrix,
    total_time: f64,
    n_values: &[usize],
) -> Result<Vec<ZenoPoint>> {
    n_values
        .iter()
        .map(|&n| zeno_point(sys, phi, rho0, total_time, n))
        .collect()
}
