use num_complex::Complex64;

use super::blocks::{extract, irreducible_blocks, scatter};
use super::{ComplexMatrix, Result};

const MAX_TAYLOR_TERMS: usize = 40;

/// Matrix exponential `e^X` of a general (not necessarily normal) square
/// matrix, by scaling and squaring with a Taylor kernel, evaluated per
/// irreducible diagonal block.
pub fn expm(x: &ComplexMatrix) -> Result<ComplexMatrix> {
    let n = x.require_square()?;
    let mut out = ComplexMatrix::zeros(n, n)?;
    for idx in irreducible_blocks(x) {
        let block = extract(x, &idx)?;
        scatter(&mut out, &idx, &expm_dense(&block)?);
    }
    Ok(out)
}

fn one_norm(m: &ComplexMatrix) -> f64 {
    (0..m.cols())
        .map(|j| (0..m.rows()).map(|i| m[(i, j)].norm()).sum::<f64>())
        .fold(0.0, f64::max)
}

fn expm_dense(x: &ComplexMatrix) -> Result<ComplexMatrix> {
    let n = x.rows();
    let norm = one_norm(x);
    let squarings = if norm > 0.5 {
        (norm / 0.5).log2().ceil() as i32
    } else {
        0
    };
    let y = x.scale(Complex64::new(0.5f64.powi(squarings), 0.0));

    let mut sum = ComplexMatrix::identity(n)?;
    let mut term = ComplexMatrix::identity(n)?;
    for k in 1..=MAX_TAYLOR_TERMS {
        term = term.matmul(&y)?.scale(Complex64::new(1.0 / k as f64, 0.0));
        sum = &sum + &term;
        if term.max_abs() <= f64::EPSILON * 1e-3 * sum.max_abs() {
            break;
        }
    }
    for _ in 0..squarings {
        sum = sum.matmul(&sum)?;
    }
    Ok(sum)
}
