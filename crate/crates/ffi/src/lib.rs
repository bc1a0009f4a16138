//! C interface to `fvdom`.
//!
//! Every function returns an [`FvdomStatus`]; on failure the message is
//! kept per thread and can be fetched with [`fvdom_last_error_message`].
//! Meshes are opaque [`FvdomMesh`] handles owned by the caller and released
//! with [`fvdom_mesh_free`]. Panics never cross the boundary.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::Path;

use fvdom::exchange::run_workers;
use fvdom::fv::{BoundaryCondition, BoundaryConditions, NodeLSWeights};
use fvdom::linsys::{assemble_poisson, DistVector, PoissonSolver, PreconditionerKind, SolverConfig};
use fvdom::mesh::{BoxMeshBuilder, PatchNames};
use fvdom::partition::{decompose, partition_stats};
use fvdom::Mesh;

/// Result codes shared by every entry point.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FvdomStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    Io = 3,
    Mesh = 4,
    Partition = 5,
    Solver = 6,
    BufferTooSmall = 7,
    Panic = 8,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FvdomPreconditioner {
    None = 0,
    Jacobi = 1,
    BlockJacobi = 2,
    Ilu0 = 3,
}

/// Opaque mesh handle.
pub struct FvdomMesh {
    mesh: Mesh,
}

/// FGMRES settings; obtain defaults from [`fvdom_poisson_default_options`].
#[repr(C)]
#[derive(Debug, Clone, Copy)]
pub struct FvdomPoissonOptions {
    /// Relative residual tolerance.
    pub tol: f64,
    /// Krylov restart length.
    pub restart: usize,
    pub max_iter: usize,
    pub preconditioner: FvdomPreconditioner,
    /// Constant right-hand side `f` of `lap P = f`.
    pub source: f64,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, Default)]
pub struct FvdomSolveReport {
    pub iterations: usize,
    /// Final relative residual `|b - A x| / |b|`.
    pub residual: f64,
    /// Nonzeros of the assembled matrix, summed over partitions.
    pub nonzeros: usize,
}

struct Failure(FvdomStatus, String);

impl Failure {
    fn new(status: FvdomStatus, msg: impl std::fmt::Display) -> Self {
        Failure(status, msg.to_string())
    }
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_last_error(msg: String) {
    let msg = CString::new(msg.replace('\0', " ")).expect("interior NULs removed");
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(msg));
}

fn guard(body: impl FnOnce() -> Result<(), Failure>) -> FvdomStatus {
    match catch_unwind(AssertUnwindSafe(body)) {
        Ok(Ok(())) => {
            LAST_ERROR.with(|e| *e.borrow_mut() = None);
            FvdomStatus::Ok
        }
        Ok(Err(Failure(status, msg))) => {
            set_last_error(msg);
            status
        }
        Err(payload) => {
            let msg = payload
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| payload.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "unknown panic".into());
            set_last_error(format!("internal error: {msg}"));
            FvdomStatus::Panic
        }
    }
}

unsafe fn mesh_ref<'a>(mesh: *const FvdomMesh) -> Result<&'a Mesh, Failure> {
    mesh.as_ref()
        .map(|m| &m.mesh)
        .ok_or_else(|| Failure::new(FvdomStatus::NullPointer, "mesh handle is NULL"))
}

unsafe fn out_ref<'a, T>(out: *mut T, what: &str) -> Result<&'a mut T, Failure> {
    out.as_mut()
        .ok_or_else(|| Failure::new(FvdomStatus::NullPointer, format!("{what} is NULL")))
}

unsafe fn c_str<'a>(s: *const c_char, what: &str) -> Result<&'a str, Failure> {
    if s.is_null() {
        return Err(Failure::new(FvdomStatus::NullPointer, format!("{what} is NULL")));
    }
    CStr::from_ptr(s)
        .to_str()
        .map_err(|_| Failure::new(FvdomStatus::InvalidArgument, format!("{what} is not UTF-8")))
}

fn store_mesh(mesh: Mesh, out: &mut *mut FvdomMesh) {
    *out = Box::into_raw(Box::new(FvdomMesh { mesh }));
}

/// Message of the last failed call on this thread, or NULL after a
/// successful call. The pointer stays valid until the next call.
#[no_mangle]
pub extern "C" fn fvdom_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(std::ptr::null(), |s| s.as_ptr()))
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn fvdom_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Loads a Gmsh 2.2 ASCII mesh.
///
/// # Safety
/// `path` must be a NUL-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn fvdom_mesh_load(path: *const c_char, out: *mut *mut FvdomMesh) -> FvdomStatus {
    guard(|| {
        let out = out_ref(out, "out")?;
        *out = std::ptr::null_mut();
        let path = c_str(path, "path")?;
        let mesh = Mesh::load(Path::new(path)).map_err(|e| {
            let status = match e {
                fvdom::MeshError::Io(_) => FvdomStatus::Io,
                _ => FvdomStatus::Mesh,
            };
            Failure::new(status, format!("cannot load mesh {path}: {e}"))
        })?;
        store_mesh(mesh, out);
        Ok(())
    })
}

/// Builds the unit cube split into `n^3` hexahedra of six tetrahedra each,
/// with patches `in`/`out` (x=0/1), `front`/`back` (y) and
/// `bottom`/`upper` (z). Interior nodes are moved
/// by up to `jitter` (fraction of the spacing, below 0.5) using `seed`.
///
/// # Safety
/// `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn fvdom_mesh_box(n: usize, jitter: f64, seed: u64, out: *mut *mut FvdomMesh) -> FvdomStatus {
    guard(|| {
        let out = out_ref(out, "out")?;
        *out = std::ptr::null_mut();
        if n == 0 {
            return Err(Failure::new(FvdomStatus::InvalidArgument, "n must be positive"));
        }
        if !(0.0..0.5).contains(&jitter) {
            return Err(Failure::new(FvdomStatus::InvalidArgument, format!("jitter {jitter} outside [0, 0.5)")));
        }
        let mesh = BoxMeshBuilder::unit_cube(n)
            .jitter(jitter, seed)
            .patches(PatchNames::cube())
            .build()
            .map_err(|e| Failure::new(FvdomStatus::Mesh, e))?;
        store_mesh(mesh, out);
        Ok(())
    })
}

/// Releases a mesh. NULL is ignored.
///
/// # Safety
/// `mesh` must come from this library and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn fvdom_mesh_free(mesh: *mut FvdomMesh) {
    if !mesh.is_null() {
        drop(Box::from_raw(mesh));
    }
}

/// Writes the node, cell, face and boundary-patch counts; any output
/// pointer may be NULL.
///
/// # Safety
/// Non-NULL pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn fvdom_mesh_counts(
    mesh: *const FvdomMesh,
    nodes: *mut usize,
    cells: *mut usize,
    faces: *mut usize,
    patches: *mut usize,
) -> FvdomStatus {
    guard(|| {
        let m = mesh_ref(mesh)?;
        for (ptr, value) in [
            (nodes, m.num_nodes()),
            (cells, m.num_cells()),
            (faces, m.num_faces()),
            (patches, m.patch_names.len()),
        ] {
            if let Some(p) = ptr.as_mut() {
                *p = value;
            }
        }
        Ok(())
    })
}

/// Copies the name of patch `index` into `buf` (NUL-terminated). With
/// `buf` NULL or too small, `*needed` receives the required size including
/// the terminator and the call fails with `BUFFER_TOO_SMALL` (only when
/// `buf` is non-NULL).
///
/// # Safety
/// `buf` must hold `len` bytes; `needed` may be NULL.
#[no_mangle]
pub unsafe extern "C" fn fvdom_mesh_patch_name(
    mesh: *const FvdomMesh,
    index: usize,
    buf: *mut c_char,
    len: usize,
    needed: *mut usize,
) -> FvdomStatus {
    guard(|| {
        let m = mesh_ref(mesh)?;
        let name = m.patch_names.get(index).ok_or_else(|| {
            Failure::new(
                FvdomStatus::InvalidArgument,
                format!("patch index {index} out of range ({} patches)", m.patch_names.len()),
            )
        })?;
        let size = name.len() + 1;
        if let Some(n) = needed.as_mut() {
            *n = size;
        }
        if buf.is_null() {
            return Ok(());
        }
        if len < size {
            return Err(Failure::new(FvdomStatus::BufferTooSmall, format!("patch name needs {size} bytes")));
        }
        std::ptr::copy_nonoverlapping(name.as_ptr(), buf.cast(), name.len());
        *buf.add(name.len()) = 0;
        Ok(())
    })
}

/// Partitions the mesh into `k` parts and writes per-part inner-cell, halo
/// and neighbour counts into arrays of length `k` (any may be NULL).
///
/// # Safety
/// Non-NULL arrays must hold `k` elements.
#[no_mangle]
pub unsafe extern "C" fn fvdom_partition_stats(
    mesh: *const FvdomMesh,
    k: usize,
    inner: *mut usize,
    halo: *mut usize,
    neighbors: *mut usize,
) -> FvdomStatus {
    guard(|| {
        let m = mesh_ref(mesh)?;
        let domains = decompose(m, k).map_err(|e| Failure::new(FvdomStatus::Partition, e))?;
        let stats = partition_stats(&domains);
        for (i, row) in stats.rows.iter().enumerate() {
            for (ptr, value) in [(inner, row.inner), (halo, row.halo), (neighbors, row.neighbors)] {
                if !ptr.is_null() {
                    *ptr.add(i) = value;
                }
            }
        }
        Ok(())
    })
}

#[no_mangle]
pub extern "C" fn fvdom_poisson_default_options() -> FvdomPoissonOptions {
    let d = SolverConfig::default();
    FvdomPoissonOptions {
        tol: d.tol,
        restart: d.restart,
        max_iter: d.max_iter,
        preconditioner: FvdomPreconditioner::Ilu0,
        source: 0.0,
    }
}

/// Solves `lap P = source` on `k` workers. Patch `names[i]` gets the
/// Dirichlet value `values[i]`; unlisted patches are zero-flux (Neumann).
/// `solution` receives one value per cell in mesh order.
///
/// # Safety
/// `names` and `values` must hold `n_dirichlet` entries, `solution` must
/// hold `solution_len` doubles, `options` and `report` may be NULL.
#[no_mangle]
#[allow(clippy::too_many_arguments)]
pub unsafe extern "C" fn fvdom_poisson_solve(
    mesh: *const FvdomMesh,
    k: usize,
    names: *const *const c_char,
    values: *const f64,
    n_dirichlet: usize,
    options: *const FvdomPoissonOptions,
    solution: *mut f64,
    solution_len: usize,
    report: *mut FvdomSolveReport,
) -> FvdomStatus {
    guard(|| {
        let m = mesh_ref(mesh)?;
        if solution.is_null() {
            return Err(Failure::new(FvdomStatus::NullPointer, "solution is NULL"));
        }
        if solution_len < m.num_cells() {
            return Err(Failure::new(
                FvdomStatus::BufferTooSmall,
                format!("solution holds {solution_len} values, mesh has {} cells", m.num_cells()),
            ));
        }
        if n_dirichlet > 0 && (names.is_null() || values.is_null()) {
            return Err(Failure::new(FvdomStatus::NullPointer, "names or values is NULL"));
        }
        let opts = options.as_ref().copied().unwrap_or_else(|| fvdom_poisson_default_options());
        let mut bcs = BoundaryConditions::uniform(&m.patch_names, BoundaryCondition::Neumann);
        for i in 0..n_dirichlet {
            let name = c_str(*names.add(i), "patch name")?;
            let value = *values.add(i);
            bcs.set(name, BoundaryCondition::dirichlet(value))
                .map_err(|e| Failure::new(FvdomStatus::InvalidArgument, e))?;
        }
        let config = SolverConfig {
            tol: opts.tol,
            restart: opts.restart,
            max_iter: opts.max_iter,
            preconditioner: match opts.preconditioner {
                FvdomPreconditioner::None => PreconditionerKind::None,
                FvdomPreconditioner::Jacobi => PreconditionerKind::Jacobi,
                FvdomPreconditioner::BlockJacobi => PreconditionerKind::BlockJacobi,
                FvdomPreconditioner::Ilu0 => PreconditionerKind::Ilu0,
            },
            ..SolverConfig::default()
        };
        config
            .validate()
            .map_err(|e| Failure::new(FvdomStatus::InvalidArgument, e))?;
        let domains = decompose(m, k).map_err(|e| Failure::new(FvdomStatus::Partition, e))?;
        let results = run_workers(&domains, |d, t| {
            let solver_err = |e: &dyn std::fmt::Display| Failure::new(FvdomStatus::Solver, e);
            let weights = NodeLSWeights::build(d).map_err(|e| solver_err(&e))?;
            let system = assemble_poisson(d, &weights, &bcs).map_err(|e| solver_err(&e))?;
            let nonzeros = system.matrix.nnz();
            let s = PoissonSolver::new(system, config).map_err(|e| solver_err(&e))?;
            let mut p = DistVector::zeros(d);
            let r = s
                .solve(d, t, &vec![opts.source; d.n_inner], &mut p)
                .map_err(|e| solver_err(&e))?;
            Ok::<_, Failure>((p.inner().to_vec(), r.iterations, r.residual, nonzeros))
        })?;
        let out = std::slice::from_raw_parts_mut(solution, solution_len);
        let mut nonzeros = 0;
        for (d, (values, ..)) in domains.iter().zip(&results) {
            for (i, &v) in values.iter().enumerate() {
                out[d.cell_global[i]] = v;
            }
        }
        for r in &results {
            nonzeros += r.3;
        }
        if let Some(rep) = report.as_mut() {
            *rep = FvdomSolveReport {
                iterations: results[0].1,
                residual: results[0].2,
                nonzeros,
            };
        }
        Ok(())
    })
}

impl From<fvdom::exchange::ExchangeError> for Failure {
    fn from(e: fvdom::exchange::ExchangeError) -> Self {
        Failure::new(FvdomStatus::Solver, e)
    }
}

/// Townsend ionization coefficient over neutral density, alpha/N in cm^2,
/// as a function of reduced field E/N in V cm^2.
///
/// # Safety
/// `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn fvdom_ionization_ratio(e_over_n: f64, out: *mut f64) -> FvdomStatus {
    guard(|| {
        let out = out_ref(out, "out")?;
        *out = fvdom::streamer::ionization_ratio(e_over_n)
            .map_err(|e| Failure::new(FvdomStatus::InvalidArgument, e))?;
        Ok(())
    })
}
