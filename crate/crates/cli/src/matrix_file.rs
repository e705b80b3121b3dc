use std::fs;
use std::path::Path;

use num_complex::Complex64;
use zenopure::linalg::ComplexMatrix;

use crate::CliError;

/// A square matrix acting on `A ⊗ B`, read from text.
#[derive(Debug, Clone, PartialEq)]
pub struct MatrixFile {
    pub dim_a: usize,
    pub dim_b: usize,
    pub matrix: ComplexMatrix,
}

/// Parses `dim_a dim_b` followed by `(dim_a·dim_b)²` whitespace-separated
/// `re im` pairs in row-major order. Lines starting with `#` are ignored.
pub fn parse_matrix(text: &str) -> Result<MatrixFile, String> {
    let mut tokens = text
        .lines()
        .filter(|l| !l.trim_start().starts_with('#'))
        .flat_map(str::split_whitespace);
    let mut dim = |name: &str| -> Result<usize, String> {
        let tok = tokens.next().ok_or_else(|| format!("missing {name} in header"))?;
        tok.parse::<usize>()
            .ok()
            .filter(|&d| d > 0)
            .ok_or_else(|| format!("bad {name} {tok:?}"))
    };
    let dim_a = dim("dim_a")?;
    let dim_b = dim("dim_b")?;
    let n = dim_a.checked_mul(dim_b).ok_or("dimension overflow")?;
    let values: Vec<f64> = tokens
        .map(|t| t.parse::<f64>().map_err(|_| format!("bad number {t:?}")))
        .collect::<Result<_, _>>()?;
    if values.len() != 2 * n * n {
        return Err(format!(
            "expected {} numbers for a {n}x{n} complex matrix, found {}",
            2 * n * n,
            values.len()
        ));
    }
    let entries = values.chunks_exact(2).map(|p| Complex64::new(p[0], p[1])).collect();
    let matrix = ComplexMatrix::new(n, n, entries).map_err(|e| e.to_string())?;
    Ok(MatrixFile { dim_a, dim_b, matrix })
}

pub fn read_matrix(path: &Path) -> Result<MatrixFile, CliError> {
    let text = fs::read_to_string(path).map_err(|source| CliError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    parse_matrix(&text).map_err(|message| CliError::MatrixFile {
        path: path.to_path_buf(),
        message,
    })
}

/// Inverse of [`parse_matrix`], with full round-trip precision.
pub fn format_matrix(dim_a: usize, dim_b: usize, m: &ComplexMatrix) -> String {
    let mut out = format!("{dim_a} {dim_b}\n");
    for i in 0..m.rows() {
        let row: Vec<String> = m.row(i).iter().map(|z| format!("{:?} {:?}", z.re, z.im)).collect();
        out.push_str(&row.join("  "));
        out.push('\n');
    }
    out
}
