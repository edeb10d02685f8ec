use std::path::Path;

use nalgebra::{DMatrix, SymmetricEigen};

use crate::error::{Error, Result};
use crate::graph::data_lines;

pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub fn max_abs(m: &DMatrix<f64>) -> f64 {
    m.iter().fold(0.0, |acc, v| acc.max(v.abs()))
}

/// Smallest eigenvalue of a symmetric matrix.
pub fn min_eigenvalue(m: &DMatrix<f64>) -> f64 {
    if m.nrows() == 0 {
        return 0.0;
    }
    SymmetricEigen::new(m.clone())
        .eigenvalues
        .iter()
        .copied()
        .fold(f64::INFINITY, f64::min)
}

/// Spectral norm of a symmetric matrix.
pub fn spectral_norm(m: &DMatrix<f64>) -> f64 {
    if m.nrows() == 0 {
        return 0.0;
    }
    SymmetricEigen::new(m.clone())
        .eigenvalues
        .iter()
        .fold(0.0, |acc, v| acc.max(v.abs()))
}

/// `max_i |Σ_j m_ij|`.
pub fn max_row_sum(m: &DMatrix<f64>) -> f64 {
    m.row_iter()
        .map(|r| r.iter().sum::<f64>().abs())
        .fold(0.0, f64::max)
}

pub fn max_asymmetry(m: &DMatrix<f64>) -> f64 {
    let n = m.nrows();
    let mut worst: f64 = 0.0;
    for i in 0..n {
        for j in i + 1..n {
            worst = worst.max((m[(i, j)] - m[(j, i)]).abs());
        }
    }
    worst
}

pub fn symmetrize(m: &mut DMatrix<f64>) {
    let n = m.nrows();
    for i in 0..n {
        for j in i + 1..n {
            let avg = 0.5 * (m[(i, j)] + m[(j, i)]);
            m[(i, j)] = avg;
            m[(j, i)] = avg;
        }
    }
}

/// Quantizes `x` at a resolution of `1e-12 · scale`, so values that differ
/// only by round-off compare equal when breaking ties by index.
pub fn tie_key(x: f64, scale: f64) -> i64 {
    let scale = if scale > 0.0 { scale } else { 1.0 };
    (x / scale * 1e12).round() as i64
}

/// Reads a square matrix written one whitespace-separated row per line,
/// `#` comments allowed.
pub fn load_dense_matrix(path: impl AsRef<Path>) -> Result<DMatrix<f64>> {
    let path = path.as_ref();
    parse_dense_matrix(&std::fs::read_to_string(path)?, path)
}

pub fn parse_dense_matrix(text: &str, path: &Path) -> Result<DMatrix<f64>> {
    let mut rows: Vec<Vec<f64>> = Vec::new();
    for (line, fields) in data_lines(text) {
        let row = fields
            .iter()
            .map(|f| {
                f.parse::<f64>().map_err(|_| Error::Parse {
                    path: path.to_path_buf(),
                    line,
                    message: format!("bad number `{f}`"),
                })
            })
            .collect::<Result<Vec<_>>>()?;
        rows.push(row);
    }
    let n = rows.len();
    if let Some(bad) = rows.iter().position(|r| r.len() != n) {
        return Err(Error::Validation(format!(
            "{}: row {} has {} entries, expected {n}",
            path.display(),
            bad + 1,
            rows[bad].len()
        )));
    }
    Ok(DMatrix::from_fn(n, n, |i, j| rows[i][j]))
}

/// Sum over `{(i, j) : i, j ∈ idx}` of `m_ij a_i b_j`.
pub fn restricted_bilinear(m: &DMatrix<f64>, idx: &[usize], a: &[f64], b: &[f64]) -> f64 {
    let mut total = 0.0;
    for &i in idx {
        let mut row = 0.0;
        for &j in idx {
            row += m[(i, j)] * b[j];
        }
        total += a[i] * row;
    }
    total
}
