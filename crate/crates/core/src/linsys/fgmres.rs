use super::{dot, norm2, spmv, DistVector, LinsysError, Preconditioner, SparseMatrix};
use crate::exchange::Transport;
use crate::partition::LocalDomain;

/// Outcome of a converged solve.
#[derive(Debug, Clone, PartialEq)]
pub struct SolveReport {
    pub iterations: usize,
    /// `|b - A x| / |b|`, recomputed from the returned solution.
    pub residual: f64,
    /// Relative residual estimate after each iteration.
    pub history: Vec<f64>,
}

/// Right-preconditioned flexible GMRES with restarts.
///
/// Orthogonalisation is modified Gram-Schmidt and the least-squares problem
/// is updated with Givens rotations. Each cycle keeps the preconditioned
/// directions `z_j`, so the preconditioner may vary between iterations. On
/// entry `x` holds the initial guess; on return the solution.
#[allow(clippy::too_many_arguments)]
pub fn fgmres(
    domain: &LocalDomain,
    t: &mut impl Transport,
    a: &SparseMatrix,
    b: &[f64],
    x: &mut DistVector,
    pc: &Preconditioner,
    restart: usize,
    tol: f64,
    max_iter: usize,
) -> Result<SolveReport, LinsysError> {
    if !(tol > 0.0) || restart == 0 {
        return Err(LinsysError::Config(format!(
            "need tol > 0 and restart >= 1 (tol {tol}, restart {restart})"
        )));
    }
    let n = domain.n_inner;
    if b.len() != n || a.num_rows() != n {
        return Err(LinsysError::Dimension(format!(
            "rhs has {} entries, matrix {} rows, domain {n} inner cells",
            b.len(),
            a.num_rows()
        )));
    }
    let bnorm = norm2(t, b)?;
    if bnorm == 0.0 {
        x.values.fill(0.0);
        return Ok(SolveReport {
            iterations: 0,
            residual: 0.0,
            history: Vec::new(),
        });
    }
    let mut r = vec![0.0; n];
    let mut residual = true_residual(domain, t, a, b, x, &mut r)? / bnorm;
    let mut history = Vec::new();
    let mut iterations = 0;
    let m = restart;
    let mut z = DistVector::zeros(domain);
    let mut w = vec![0.0; n];

    while residual > tol {
        if iterations >= max_iter {
            return Err(LinsysError::NotConverged {
                iterations,
                residual,
                history,
            });
        }
        let beta = residual * bnorm;
        let mut basis: Vec<Vec<f64>> = vec![r.iter().map(|v| v / beta).collect()];
        let mut zs: Vec<Vec<f64>> = Vec::with_capacity(m);
        let mut h = vec![vec![0.0; m]; m + 1];
        let (mut cs, mut sn) = (vec![0.0; m], vec![0.0; m]);
        let mut g = vec![0.0; m + 1];
        g[0] = beta;
        let mut k = 0;
        let mut breakdown = false;
        while k < m && iterations < max_iter {
            pc.apply(&basis[k], z.inner_mut());
            zs.push(z.inner().to_vec());
            spmv(domain, t, a, &mut z, &mut w)?;
            for i in 0..=k {
                let hik = dot(t, &w, &basis[i])?;
                h[i][k] = hik;
                for (wj, vj) in w.iter_mut().zip(&basis[i]) {
                    *wj -= hik * vj;
                }
            }
            let hnext = norm2(t, &w)?;
            h[k + 1][k] = hnext;
            for i in 0..k {
                let tmp = cs[i] * h[i][k] + sn[i] * h[i + 1][k];
                h[i + 1][k] = -sn[i] * h[i][k] + cs[i] * h[i + 1][k];
                h[i][k] = tmp;
            }
            let denom = h[k][k].hypot(h[k + 1][k]);
            if denom == 0.0 {
                breakdown = true;
                break;
            }
            cs[k] = h[k][k] / denom;
            sn[k] = h[k + 1][k] / denom;
            h[k][k] = denom;
            h[k + 1][k] = 0.0;
            g[k + 1] = -sn[k] * g[k];
            g[k] *= cs[k];
            iterations += 1;
            k += 1;
            let estimate = g[k].abs() / bnorm;
            history.push(estimate);
            if hnext == 0.0 {
                breakdown = true;
                break;
            }
            if estimate <= tol {
                break;
            }
            basis.push(w.iter().map(|v| v / hnext).collect());
        }
        // back substitution and update with the preconditioned directions
        let mut y = vec![0.0; k];
        for i in (0..k).rev() {
            let s: f64 = (i + 1..k).map(|j| h[i][j] * y[j]).sum();
            y[i] = (g[i] - s) / h[i][i];
        }
        for (yi, zi) in y.iter().zip(&zs) {
            for (xv, zv) in x.inner_mut().iter_mut().zip(zi) {
                *xv += yi * zv;
            }
        }
        residual = true_residual(domain, t, a, b, x, &mut r)? / bnorm;
        if breakdown && residual > tol {
            return Err(LinsysError::Breakdown {
                iterations,
                residual,
            });
        }
    }
    Ok(SolveReport {
        iterations,
        residual,
        history,
    })
}

/// `r = b - A x`; returns `|r|`.
fn true_residual(
    domain: &LocalDomain,
    t: &mut impl Transport,
    a: &SparseMatrix,
    b: &[f64],
    x: &mut DistVector,
    r: &mut [f64],
) -> Result<f64, LinsysError> {
    spmv(domain, t, a, x, r)?;
    for (ri, bi) in r.iter_mut().zip(b) {
        *ri = bi - *ri;
    }
    norm2(t, r)
}
