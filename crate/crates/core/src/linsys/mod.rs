//! Sparse linear systems over partitioned cells: Poisson assembly, the
//! distributed matrix-vector product and Krylov / dense solvers.

mod assemble;
mod dense;
mod fgmres;
mod matrix;
mod precond;

pub use assemble::{assemble_poisson, PoissonSystem};
pub use dense::{direct_dense, lu_solve, solve_serial, DENSE_LIMIT};
pub use fgmres::{fgmres, SolveReport};
pub use matrix::{dot, norm2, slot_map, spmv, DistVector, SparseMatrix};
pub use precond::{Preconditioner, PreconditionerKind};

use crate::exchange::{ExchangeError, Transport};
use crate::partition::LocalDomain;
use std::fmt;
use std::str::FromStr;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum LinsysError {
    #[error("zero diagonal in row {row}")]
    ZeroDiagonal { row: usize },
    #[error("matrix structure: {0}")]
    Structure(String),
    #[error("dimension mismatch: {0}")]
    Dimension(String),
    #[error("solver configuration: {0}")]
    Config(String),
    #[error("no convergence after {iterations} iterations (relative residual {residual:e})")]
    NotConverged {
        iterations: usize,
        residual: f64,
        history: Vec<f64>,
    },
    #[error("Krylov breakdown after {iterations} iterations (relative residual {residual:e})")]
    Breakdown { iterations: usize, residual: f64 },
    #[error("system of size {size} exceeds the dense solver limit {limit}")]
    TooLarge { size: usize, limit: usize },
    #[error("singular matrix (no pivot in column {column})")]
    Singular { column: usize },
    #[error("dense solve inaccurate (relative residual {residual:e})")]
    Inaccurate { residual: f64 },
    #[error(transparent)]
    Exchange(#[from] ExchangeError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SolverMethod {
    Fgmres,
    DirectDense,
}

impl FromStr for SolverMethod {
    type Err = LinsysError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "fgmres" => Ok(Self::Fgmres),
            "direct-dense" | "direct" => Ok(Self::DirectDense),
            other => Err(LinsysError::Config(format!("unknown solver '{other}'"))),
        }
    }
}

impl fmt::Display for SolverMethod {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::Fgmres => "fgmres",
            Self::DirectDense => "direct-dense",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolverConfig {
    pub method: SolverMethod,
    pub preconditioner: PreconditionerKind,
    pub restart: usize,
    pub tol: f64,
    pub max_iter: usize,
}

impl Default for SolverConfig {
    fn default() -> Self {
        SolverConfig {
            method: SolverMethod::Fgmres,
            preconditioner: PreconditionerKind::Ilu0,
            restart: 30,
            tol: 1e-10,
            max_iter: 5000,
        }
    }
}

impl SolverConfig {
    pub fn validate(&self) -> Result<(), LinsysError> {
        if !(self.tol > 0.0) {
            return Err(LinsysError::Config(format!("tol must be positive, got {}", self.tol)));
        }
        if self.restart == 0 {
            return Err(LinsysError::Config("restart must be at least 1".into()));
        }
        Ok(())
    }
}

/// A Poisson operator ready to solve repeatedly with changing sources.
#[derive(Debug, Clone)]
pub struct PoissonSolver {
    pub system: PoissonSystem,
    pub config: SolverConfig,
    preconditioner: Preconditioner,
}

impl PoissonSolver {
    pub fn new(system: PoissonSystem, config: SolverConfig) -> Result<Self, LinsysError> {
        config.validate()?;
        let preconditioner = Preconditioner::new(config.preconditioner, &system.matrix)?;
        Ok(PoissonSolver {
            system,
            config,
            preconditioner,
        })
    }

    /// Solves `A p = f - shift`; `p` holds the initial guess on entry.
    pub fn solve(
        &self,
        domain: &LocalDomain,
        t: &mut impl Transport,
        f: &[f64],
        p: &mut DistVector,
    ) -> Result<SolveReport, LinsysError> {
        let b = self.system.rhs(f);
        match self.config.method {
            SolverMethod::Fgmres => fgmres(
                domain,
                t,
                &self.system.matrix,
                &b,
                p,
                &self.preconditioner,
                self.config.restart,
                self.config.tol,
                self.config.max_iter,
            ),
            SolverMethod::DirectDense => {
                let x = direct_dense(t, &self.system.matrix, &b)?;
                p.inner_mut().copy_from_slice(&x);
                let mut r = vec![0.0; b.len()];
                spmv(domain, t, &self.system.matrix, p, &mut r)?;
                for (ri, bi) in r.iter_mut().zip(&b) {
                    *ri = bi - *ri;
                }
                let bn = norm2(t, &b)?;
                let rn = norm2(t, &r)?;
                Ok(SolveReport {
                    iterations: 1,
                    residual: if bn > 0.0 { rn / bn } else { rn },
                    history: Vec::new(),
                })
            }
        }
    }
}
