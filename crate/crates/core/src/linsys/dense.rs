use super::{LinsysError, SparseMatrix};
use crate::exchange::{allgather_inner, Transport};

/// Largest system the dense solver accepts.
pub const DENSE_LIMIT: usize = 20_000;

/// Solves the distributed system by gathering it densely on every partition
/// and factorising with partial pivoting. Returns the local rows of `x`.
pub fn direct_dense(
    t: &mut impl Transport,
    a: &SparseMatrix,
    b: &[f64],
) -> Result<Vec<f64>, LinsysError> {
    let n = a.global_size;
    if n > DENSE_LIMIT {
        return Err(LinsysError::TooLarge { size: n, limit: DENSE_LIMIT });
    }
    let full = a.gather(t)?;
    let mut flat = Vec::with_capacity(2 * b.len());
    for (id, v) in a.row_ids.iter().zip(b) {
        flat.push(*id as f64);
        flat.push(*v);
    }
    let mut rhs = vec![0.0; n];
    for part in allgather_inner(t, &flat)? {
        for p in part.chunks_exact(2) {
            rhs[p[0] as usize] = p[1];
        }
    }
    let x = lu_solve(n, full.to_dense(), &rhs)?;
    Ok(a.row_ids.iter().map(|&g| x[g]).collect())
}

/// Dense LU with partial pivoting of a row-major `n x n` matrix. Fails on
/// a singular matrix or when the residual exceeds `1e-10 |b|`.
pub fn lu_solve(n: usize, mut m: Vec<f64>, b: &[f64]) -> Result<Vec<f64>, LinsysError> {
    let orig = m.clone();
    let mut x = b.to_vec();
    let scale = m.iter().fold(0.0f64, |s, v| s.max(v.abs()));
    for col in 0..n {
        let p = (col..n)
            .max_by(|&i, &j| m[i * n + col].abs().total_cmp(&m[j * n + col].abs()))
            .unwrap_or(col);
        if !(m[p * n + col].abs() > f64::EPSILON * scale * n as f64) {
            return Err(LinsysError::Singular { column: col });
        }
        if p != col {
            for c in 0..n {
                m.swap(p * n + c, col * n + c);
            }
            x.swap(p, col);
        }
        let piv = m[col * n + col];
        for r in col + 1..n {
            let f = m[r * n + col] / piv;
            if f != 0.0 {
                for c in col..n {
                    m[r * n + c] -= f * m[col * n + c];
                }
                x[r] -= f * x[col];
            }
        }
    }
    for r in (0..n).rev() {
        let s: f64 = (r + 1..n).map(|c| m[r * n + c] * x[c]).sum();
        x[r] = (x[r] - s) / m[r * n + r];
    }
    let bnorm = b.iter().map(|v| v * v).sum::<f64>().sqrt();
    let rnorm = (0..n)
        .map(|r| {
            let ax: f64 = (0..n).map(|c| orig[r * n + c] * x[c]).sum();
            (b[r] - ax).powi(2)
        })
        .sum::<f64>()
        .sqrt();
    if rnorm > 1e-10 * bnorm.max(f64::MIN_POSITIVE) {
        return Err(LinsysError::Inaccurate { residual: rnorm / bnorm });
    }
    Ok(x)
}

/// Serial matrix-free convenience: dense solve of a gathered matrix.
pub fn solve_serial(a: &SparseMatrix, b: &[f64]) -> Result<Vec<f64>, LinsysError> {
    lu_solve(a.global_size, a.to_dense(), b)
}
