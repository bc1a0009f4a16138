//! Timing harness for the finite-volume operators, the Poisson assembly and
//! solve, and the halo exchange.
//!
//! Operator timings follow one protocol: 3 warm-up iterations, then the
//! median over the measured iterations of the slowest worker's time. Workers
//! are in-process threads, so "workers" in every report means threads on
//! this host, not cluster cores.

use crate::exchange::{
    allreduce_max, barrier, barrier_time, run_workers, ExchangeError, ExchangeTiming, Transport,
};
use crate::fv::{
    cell_gradient_into, face_gradient, fill_ghosts, node_interpolate_into, BoundaryCondition,
    BoundaryConditions, CellField, FvError, GradStencilCoeffs, NodeField, NodeLSWeights,
};
use crate::linsys::{
    assemble_poisson, DistVector, LinsysError, PoissonSolver, PreconditionerKind, SolverConfig,
    SparseMatrix,
};
use crate::mesh::Mesh;
use crate::partition::{decompose, LocalDomain, PartitionError};
use std::io::{self, Write};
use std::time::Instant;
use thiserror::Error;

pub const WARMUP_ITERATIONS: usize = 3;
pub const MIN_ITERATIONS: usize = 20;

#[derive(Debug, Error)]
pub enum BenchError {
    #[error(transparent)]
    Partition(#[from] PartitionError),
    #[error(transparent)]
    Fv(#[from] FvError),
    #[error(transparent)]
    Linsys(#[from] LinsysError),
    #[error(transparent)]
    Exchange(#[from] ExchangeError),
    #[error("partition invariance violated: {0}")]
    Invariance(String),
    #[error("{0}")]
    Config(String),
}

/// Median per-iteration seconds of the three node/cell operators at one
/// worker count.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OperatorTiming {
    pub workers: usize,
    pub cell_gradient: f64,
    pub face_gradient: f64,
    pub ls_interpolation: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct OperatorReport {
    pub cells: usize,
    pub iterations: usize,
    pub rows: Vec<OperatorTiming>,
}

impl OperatorReport {
    /// Speedups `(cell gradient, face gradient, LS interpolation)` of `row`
    /// over the single-worker row.
    pub fn speedup(&self, row: &OperatorTiming) -> Option<[f64; 3]> {
        let base = self.rows.iter().find(|r| r.workers == 1)?;
        Some([
            base.cell_gradient / row.cell_gradient,
            base.face_gradient / row.face_gradient,
            base.ls_interpolation / row.ls_interpolation,
        ])
    }

    pub const CSV_HEADER: &'static str = "workers,cell_gradient_s,face_gradient_s,ls_interpolation_s,cell_gradient_speedup,face_gradient_speedup,ls_interpolation_speedup";

    pub fn write_csv(&self, mut out: impl Write) -> io::Result<()> {
        writeln!(out, "{}", Self::CSV_HEADER)?;
        for r in &self.rows {
            let s = self.speedup(r).unwrap_or([f64::NAN; 3]);
            writeln!(
                out,
                "{},{:e},{:e},{:e},{:.4},{:.4},{:.4}",
                r.workers, r.cell_gradient, r.face_gradient, r.ls_interpolation, s[0], s[1], s[2]
            )?;
        }
        Ok(())
    }
}

fn median(mut v: Vec<f64>) -> f64 {
    v.sort_by(f64::total_cmp);
    let n = v.len();
    if n % 2 == 1 {
        v[n / 2]
    } else {
        0.5 * (v[n / 2 - 1] + v[n / 2])
    }
}

/// Times one operator: barrier, run, slowest worker's elapsed time.
fn timed(t: &mut impl Transport, mut op: impl FnMut()) -> Result<f64, ExchangeError> {
    barrier(t)?;
    let clock = Instant::now();
    op();
    // Closing barrier: on an oversubscribed host a worker's own elapsed time
    // hides the slices handed to the others, so measure until all are done.
    barrier(t)?;
    let local = clock.elapsed().as_secs_f64();
    Ok(allreduce_max(t, &[local])?[0])
}

/// Benchmarks cell gradient, face gradient and least-squares node
/// interpolation for each worker count in `sweep` (`iterations` is raised to
/// at least [`MIN_ITERATIONS`]). Ghost and halo values are prepared once;
/// only the local kernels are timed.
pub fn bench_operators(
    mesh: &Mesh,
    sweep: &[usize],
    iterations: usize,
) -> Result<OperatorReport, BenchError> {
    let iterations = iterations.max(MIN_ITERATIONS);
    let mut rows = Vec::new();
    for &k in sweep {
        let domains = decompose(mesh, k)?;
        let per_worker = run_workers(&domains, |d, t| {
            let coeffs = GradStencilCoeffs::build(d)?;
            let weights = NodeLSWeights::build(d)?;
            let bcs = BoundaryConditions::uniform(&d.patch_names, BoundaryCondition::Neumann);
            let mut u = CellField::from_fn(d, |x| x[0] + 2.0 * x[1] - x[2]);
            crate::exchange::exchange_halo(d, t, &mut [&mut u])?;
            fill_ghosts(d, &bcs, &mut u);
            let mut grad = CellField::zeros(d, 3);
            let mut nodes = NodeField::zeros(d);
            node_interpolate_into(d, &u, &weights, &mut nodes);
            let mut samples = [Vec::new(), Vec::new(), Vec::new()];
            for it in 0..WARMUP_ITERATIONS + iterations {
                let a = timed(t, || cell_gradient_into(d, &u, &coeffs, &mut grad))?;
                let b = timed(t, || {
                    std::hint::black_box(face_gradient(d, &u, &nodes));
                })?;
                let c = timed(t, || node_interpolate_into(d, &u, &weights, &mut nodes))?;
                if it >= WARMUP_ITERATIONS {
                    samples[0].push(a);
                    samples[1].push(b);
                    samples[2].push(c);
                }
            }
            std::hint::black_box(&grad);
            Ok::<_, BenchError>(samples)
        })?;
        let [a, b, c] = per_worker.into_iter().next().expect("one worker");
        rows.push(OperatorTiming {
            workers: k,
            cell_gradient: median(a),
            face_gradient: median(b),
            ls_interpolation: median(c),
        });
    }
    Ok(OperatorReport {
        cells: mesh.num_cells(),
        iterations,
        rows,
    })
}

/// One assembly + solve measurement.
#[derive(Debug, Clone, PartialEq)]
pub struct SolveTiming {
    pub workers: usize,
    pub preconditioner: PreconditionerKind,
    pub assembly_seconds: f64,
    pub solve_seconds: f64,
    pub iterations: usize,
    pub residual: f64,
    pub converged: bool,
    pub rows: usize,
    pub nonzeros: usize,
}

impl SolveTiming {
    pub fn nonzeros_per_row(&self) -> f64 {
        self.nonzeros as f64 / self.rows as f64
    }
}

pub const SOLVE_CSV_HEADER: &str =
    "workers,preconditioner,rows,nonzeros,nonzeros_per_row,assembly_s,solve_s,iterations,residual,converged";

pub fn write_solve_csv(rows: &[SolveTiming], mut out: impl Write) -> io::Result<()> {
    writeln!(out, "{SOLVE_CSV_HEADER}")?;
    for r in rows {
        writeln!(
            out,
            "{},{},{},{},{:.2},{:e},{:e},{},{:e},{}",
            r.workers,
            r.preconditioner,
            r.rows,
            r.nonzeros,
            r.nonzeros_per_row(),
            r.assembly_seconds,
            r.solve_seconds,
            r.iterations,
            r.residual,
            r.converged
        )?;
    }
    Ok(())
}

/// Boundary conditions of the benchmark problem: `in`/`inlet` held at 10,
/// `out`/`outlet` at 0, other patches insulated. Meshes with neither get a
/// homogeneous Dirichlet condition everywhere and a unit source.
pub fn benchmark_problem(patch_names: &[String]) -> (BoundaryConditions, f64) {
    let has = |names: &[&str]| names.iter().any(|n| patch_names.iter().any(|p| p == n));
    if has(&["in", "inlet"]) || has(&["out", "outlet"]) {
        let mut bcs = BoundaryConditions::uniform(patch_names, BoundaryCondition::Neumann);
        for (name, value) in [("in", 10.0), ("inlet", 10.0), ("out", 0.0), ("outlet", 0.0)] {
            let _ = bcs.set(name, BoundaryCondition::dirichlet(value));
        }
        (bcs, 0.0)
    } else {
        (
            BoundaryConditions::uniform(patch_names, BoundaryCondition::dirichlet(0.0)),
            1.0,
        )
    }
}

/// Global rows of a local matrix as `(row, [(col, value)])`.
fn global_rows(a: &SparseMatrix) -> Vec<(usize, Vec<(usize, f64)>)> {
    (0..a.num_rows())
        .map(|r| (a.row_ids[r], a.row(r).map(|k| (a.cols[k], a.values[k])).collect()))
        .collect()
}

/// Times assembly and one solve per preconditioner for each worker count.
/// Before timing, every partition's rows are checked against the
/// single-worker matrix (same columns, values within 1e-12 relative).
pub fn bench_assembly_and_solve(
    mesh: &Mesh,
    sweep: &[usize],
    preconditioners: &[PreconditionerKind],
    base: &SolverConfig,
) -> Result<Vec<SolveTiming>, BenchError> {
    let serial = {
        let d = &decompose(mesh, 1)?[0];
        let (bcs, _) = benchmark_problem(&d.patch_names);
        let w = NodeLSWeights::build(d)?;
        assemble_poisson(d, &w, &bcs)?.matrix
    };
    let reference = global_rows(&serial);
    let mut out = Vec::new();
    for &k in sweep {
        let domains = decompose(mesh, k)?;
        let per_worker = run_workers(&domains, |d, t| {
            let (bcs, f0) = benchmark_problem(&d.patch_names);
            let w = NodeLSWeights::build(d)?;
            barrier(t)?;
            let clock = Instant::now();
            let system = assemble_poisson(d, &w, &bcs)?;
            let assembly = allreduce_max(t, &[clock.elapsed().as_secs_f64()])?[0];
            let local_rows = global_rows(&system.matrix);
            let mut results = Vec::new();
            for &pc in preconditioners {
                let config = SolverConfig {
                    preconditioner: pc,
                    ..*base
                };
                let solver = PoissonSolver::new(system.clone(), config)?;
                let f = vec![f0; d.n_inner];
                let mut p = DistVector::zeros(d);
                barrier(t)?;
                let clock = Instant::now();
                let (iterations, residual, converged) = match solver.solve(d, t, &f, &mut p) {
                    Ok(r) => (r.iterations, r.residual, true),
                    Err(LinsysError::NotConverged {
                        iterations,
                        residual,
                        ..
                    }) => (iterations, residual, false),
                    Err(e) => return Err(e.into()),
                };
                let seconds = allreduce_max(t, &[clock.elapsed().as_secs_f64()])?[0];
                results.push((pc, seconds, iterations, residual, converged));
            }
            Ok::<_, BenchError>((assembly, local_rows, results))
        })?;
        let mut nonzeros = 0;
        for (_, rows, _) in &per_worker {
            for (id, row) in rows {
                let expected = &reference[*id].1;
                let same = row.len() == expected.len()
                    && row.iter().zip(expected).all(|(a, b)| {
                        a.0 == b.0 && (a.1 - b.1).abs() <= 1e-12 * a.1.abs().max(b.1.abs()).max(1e-300)
                    });
                if !same {
                    return Err(BenchError::Invariance(format!(
                        "row {id} differs between 1 and {k} workers"
                    )));
                }
                nonzeros += row.len();
            }
        }
        let (assembly, _, results) = &per_worker[0];
        for &(pc, seconds, iterations, residual, converged) in results {
            out.push(SolveTiming {
                workers: k,
                preconditioner: pc,
                assembly_seconds: *assembly,
                solve_seconds: seconds,
                iterations,
                residual,
                converged,
                rows: mesh.num_cells(),
                nonzeros,
            });
        }
    }
    Ok(out)
}

pub const EXCHANGE_CSV_HEADER: &str = "workers,variant,mean_s,max_send_values";

/// Halo-exchange timings for each worker count (counts below 2 are skipped).
pub fn bench_exchange(
    mesh: &Mesh,
    sweep: &[usize],
    stride: usize,
    repetitions: usize,
) -> Result<Vec<ExchangeTiming>, BenchError> {
    let mut out = Vec::new();
    for &k in sweep.iter().filter(|&&k| k >= 2) {
        let domains: Vec<LocalDomain> = decompose(mesh, k)?;
        out.extend(barrier_time(&domains, stride, repetitions.max(MIN_ITERATIONS))?);
    }
    Ok(out)
}

pub fn write_exchange_csv(rows: &[ExchangeTiming], mut out: impl Write) -> io::Result<()> {
    writeln!(out, "{EXCHANGE_CSV_HEADER}")?;
    for r in rows {
        writeln!(
            out,
            "{},{},{:e},{}",
            r.workers,
            r.variant.label(),
            r.mean_seconds,
            r.max_send_values
        )?;
    }
    Ok(())
}
