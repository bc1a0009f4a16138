use clap::{error::ErrorKind, Args, Parser, Subcommand};
use fvdom::bench::{
    bench_assembly_and_solve, bench_exchange, bench_operators, write_exchange_csv, write_solve_csv,
};
use fvdom::exchange::{exchange_halo, run_workers, worker_count_from_env};
use fvdom::fv::{
    cfl_time_step, rk3_step, BoundaryCondition, CellField, ConvectionDiffusion, Diffusivity,
    FvError,
};
use fvdom::io::config::{self, resolve_path, streamer_config};
use fvdom::io::manifest::InputFile;
use fvdom::io::{write_snapshot, KeyValues, Manifest, VtuField};
use fvdom::linsys::{
    assemble_poisson, DistVector, LinsysError, PoissonSolver, PreconditionerKind, SolverConfig,
    SolverMethod,
};
use fvdom::mesh::{BoxMeshBuilder, PatchNames};
use fvdom::partition::{decompose, partition_stats, LocalDomain};
use fvdom::streamer::{pulse_inside, run_streamer};
use fvdom::vec3;
use fvdom::Mesh;
use std::error::Error;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

type AnyError = Box<dyn Error + Send + Sync>;

/// Partitioned finite-volume solvers on unstructured tetrahedral meshes.
///
/// Workers are in-process threads, one per partition. Every command that
/// writes an output directory also writes manifest.json with the inputs'
/// hashes, so a run can be repeated exactly.
#[derive(Parser)]
#[command(name = "fvdom", version)]
struct Cli {
    /// More log output (-v info, -vv debug).
    #[arg(short, long, action = clap::ArgAction::Count, global = true)]
    verbose: u8,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Split a mesh into partitions and report their sizes and halos.
    Partition(PartitionArgs),
    /// Solve the Poisson equation with constant source and file-given BCs.
    SolvePoisson(SolveArgs),
    /// Run a convection-diffusion problem described by a config file.
    RunConvdiff(ConfigArgs),
    /// Run the streamer discharge model described by a config file.
    RunStreamer(ConfigArgs),
    /// Time operators, assembly/solve and halo exchange over a worker sweep.
    Bench(BenchArgs),
    /// Write a structured box mesh split into tetrahedra (MSH 2.2).
    GenBox(GenBoxArgs),
}

#[derive(Args)]
struct PartitionArgs {
    /// Mesh file (MSH 2.2 ASCII).
    #[arg(long)]
    mesh: PathBuf,
    /// Number of partitions.
    #[arg(short = 'k', long)]
    parts: usize,
    /// Directory for partition.csv (statistics) and owners.txt (owner per cell).
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct SolveArgs {
    /// Mesh file (MSH 2.2 ASCII).
    #[arg(long)]
    mesh: PathBuf,
    /// Boundary conditions, one `patch = dirichlet <v> | neumann | wall` per
    /// line; unlisted patches are Neumann.
    #[arg(long)]
    bc: PathBuf,
    /// Worker count (default: FVDOM_WORKERS or 1).
    #[arg(short = 'k', long)]
    workers: Option<usize>,
    /// Constant right-hand side f of lap P = f.
    #[arg(long, default_value_t = 0.0)]
    source: f64,
    #[arg(long, default_value = "fgmres")]
    method: SolverMethod,
    /// none, jacobi, block-jacobi or ilu0.
    #[arg(long, default_value = "ilu0")]
    preconditioner: PreconditionerKind,
    #[arg(long, default_value_t = 1e-10)]
    tol: f64,
    #[arg(long, default_value_t = 30)]
    restart: usize,
    #[arg(long, default_value_t = 5000)]
    max_iter: usize,
    /// Compare with the linear field a + b.x given as `a,bx,by,bz` and print
    /// the largest cell error.
    #[arg(long, value_parser = parse_reference)]
    reference: Option<[f64; 4]>,
    /// Output directory for the solution (VTU) and manifest.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct ConfigArgs {
    /// key = value config file.
    #[arg(long)]
    config: PathBuf,
    /// Worker count; overrides the config's `workers`.
    #[arg(short = 'k', long)]
    workers: Option<usize>,
    /// Output directory; overrides the config's `output`.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct BenchArgs {
    /// Mesh file; alternatively use --box.
    #[arg(long, conflicts_with = "box")]
    mesh: Option<PathBuf>,
    /// Generate a jittered unit cube with 6 N^3 cells instead of reading a mesh.
    #[arg(long = "box", value_name = "N")]
    r#box: Option<usize>,
    /// Worker counts to sweep.
    #[arg(long, value_delimiter = ',', default_value = "1,2,4")]
    workers: Vec<usize>,
    /// Measured iterations per operator (at least 20, after 3 warm-ups).
    #[arg(long, default_value_t = 20)]
    iterations: usize,
    /// Preconditioners for the solve benchmark.
    #[arg(long, value_delimiter = ',', default_value = "none,jacobi,ilu0")]
    preconditioners: Vec<PreconditionerKind>,
    /// Output directory for operators.csv, solve.csv and exchange.csv.
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct GenBoxArgs {
    /// Divisions per axis.
    #[arg(long)]
    n: usize,
    /// Edge lengths `lx,ly,lz` (default: unit cube).
    #[arg(long, value_delimiter = ',')]
    lengths: Option<Vec<f64>>,
    /// Random displacement of interior nodes, as a fraction of the spacing.
    #[arg(long, default_value_t = 0.0)]
    jitter: f64,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    /// Name the patches inlet/outlet/lateral instead of in/out/front/back/bottom/upper.
    #[arg(long)]
    channel: bool,
    /// Output mesh file.
    #[arg(long)]
    out: PathBuf,
}

fn parse_reference(s: &str) -> Result<[f64; 4], String> {
    let v = config::parse_numbers(s)?;
    <[f64; 4]>::try_from(v.as_slice()).map_err(|_| format!("expected 4 numbers, got {}", v.len()))
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => ExitCode::SUCCESS,
                _ => ExitCode::from(1),
            };
        }
    };
    let level = match cli.verbose {
        0 => "warn",
        1 => "info",
        _ => "debug",
    };
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or(level))
        .format_timestamp(None)
        .init();
    let result = match cli.command {
        Command::Partition(a) => partition(a),
        Command::SolvePoisson(a) => solve_poisson(a),
        Command::RunConvdiff(a) => run_convdiff(a),
        Command::RunStreamer(a) => run_streamer_cmd(a),
        Command::Bench(a) => bench(a),
        Command::GenBox(a) => gen_box(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            // error messages already embed their causes
            eprintln!("fvdom: error: {e}");
            ExitCode::from(2)
        }
    }
}

fn load_mesh(path: &Path) -> Result<Mesh, AnyError> {
    Mesh::load(path).map_err(|e| format!("cannot load mesh {}: {e}", path.display()).into())
}

fn workers(flag: Option<usize>) -> Result<usize, AnyError> {
    match flag {
        Some(0) => Err("worker count must be at least 1".into()),
        Some(k) => Ok(k),
        None => Ok(worker_count_from_env()),
    }
}

fn create_dir(dir: &Path) -> Result<(), AnyError> {
    fs::create_dir_all(dir).map_err(|e| format!("cannot create {}: {e}", dir.display()).into())
}

fn partition(a: PartitionArgs) -> Result<(), AnyError> {
    let mesh = load_mesh(&a.mesh)?;
    let domains = decompose(&mesh, a.parts)?;
    let stats = partition_stats(&domains);
    let mut table = Vec::new();
    stats.write_csv(&mut table)?;
    print!("{}", String::from_utf8_lossy(&table));
    if let Some(dir) = &a.out {
        create_dir(dir)?;
        fs::write(dir.join("partition.csv"), &table)?;
        let mut owners = vec![0; mesh.num_cells()];
        for d in &domains {
            for &g in &d.cell_global[..d.n_inner] {
                owners[g] = d.part;
            }
        }
        let text: String = owners.iter().map(|o| format!("{o}\n")).collect();
        fs::write(dir.join("owners.txt"), text)?;
        let mut m = Manifest::new("partition", a.parts);
        m.mesh = Some(InputFile::hash(&a.mesh)?);
        m.write(dir)?;
    }
    Ok(())
}

struct PoissonResult {
    values: Vec<f64>,
    iterations: usize,
    residual: f64,
    nonzeros: usize,
}

fn solve_poisson(a: SolveArgs) -> Result<(), AnyError> {
    let mesh = load_mesh(&a.mesh)?;
    let k = workers(a.workers)?;
    let kv = KeyValues::load(&a.bc)?;
    let bcs = config::boundary_conditions(&kv, "", &mesh.patch_names, BoundaryCondition::Neumann)?;
    kv.finish()?;
    let solver = SolverConfig {
        method: a.method,
        preconditioner: a.preconditioner,
        tol: a.tol,
        restart: a.restart,
        max_iter: a.max_iter,
    };
    solver.validate()?;
    let domains = decompose(&mesh, k)?;
    let clock = Instant::now();
    let results = run_workers(&domains, |d, t| {
        let weights = fvdom::fv::NodeLSWeights::build(d).map_err(|e| e.to_string())?;
        let system = assemble_poisson(d, &weights, &bcs).map_err(|e| e.to_string())?;
        let nonzeros = system.matrix.nnz();
        let s = PoissonSolver::new(system, solver).map_err(|e| e.to_string())?;
        let mut p = DistVector::zeros(d);
        let report = s
            .solve(d, t, &vec![a.source; d.n_inner], &mut p)
            .map_err(|e| e.to_string())?;
        Ok::<_, WorkerError>(PoissonResult {
            values: p.inner().to_vec(),
            iterations: report.iterations,
            residual: report.residual,
            nonzeros,
        })
    })?;
    let elapsed = clock.elapsed();
    let nnz: usize = results.iter().map(|r| r.nonzeros).sum();
    println!("cells {}  workers {k}", mesh.num_cells());
    println!("nonzeros {nnz}  per row {:.2}", nnz as f64 / mesh.num_cells() as f64);
    println!(
        "iterations {}  relative residual {:e}  time {:.3} s",
        results[0].iterations,
        results[0].residual,
        elapsed.as_secs_f64()
    );
    let (lo, hi) = results
        .iter()
        .flat_map(|r| &r.values)
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &v| (lo.min(v), hi.max(v)));
    println!("solution range [{lo:e}, {hi:e}]");
    if let Some([c, bx, by, bz]) = a.reference {
        let err = domains
            .iter()
            .zip(&results)
            .flat_map(|(d, r)| {
                (0..d.n_inner).map(move |i| {
                    let x = d.centers[i];
                    (r.values[i] - (c + vec3::dot([bx, by, bz], x))).abs()
                })
            })
            .fold(0.0, f64::max);
        println!("max error vs reference {err:e}");
    }
    if let Some(dir) = &a.out {
        create_dir(dir)?;
        let mut opened = PathBuf::new();
        for (d, r) in domains.iter().zip(&results) {
            opened = write_snapshot(d, &[VtuField::scalar("P", &r.values)], dir, "poisson")?;
        }
        let mut m = Manifest::new("solve-poisson", k)
            .setting("method", a.method)
            .setting("preconditioner", a.preconditioner)
            .setting("tol", a.tol)
            .setting("restart", a.restart)
            .setting("max_iter", a.max_iter)
            .setting("source", a.source);
        m.mesh = Some(InputFile::hash(&a.mesh)?);
        m.config = Some(InputFile::hash(&a.bc)?);
        m.write(dir)?;
        println!("wrote {}", opened.display());
    }
    Ok(())
}

/// Error type of worker closures in the CLI: messages only.
#[derive(Debug)]
struct WorkerError(String);

impl std::fmt::Display for WorkerError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

impl Error for WorkerError {}

impl From<String> for WorkerError {
    fn from(s: String) -> Self {
        WorkerError(s)
    }
}

impl From<fvdom::exchange::ExchangeError> for WorkerError {
    fn from(e: fvdom::exchange::ExchangeError) -> Self {
        WorkerError(e.to_string())
    }
}

impl From<FvError> for WorkerError {
    fn from(e: FvError) -> Self {
        WorkerError(e.to_string())
    }
}

impl From<LinsysError> for WorkerError {
    fn from(e: LinsysError) -> Self {
        WorkerError(e.to_string())
    }
}

/// Mesh, worker count and output directory shared by the config-driven runs.
struct RunSetup {
    kv: KeyValues,
    mesh_path: PathBuf,
    mesh: Mesh,
    workers: usize,
    out: Option<PathBuf>,
}

fn run_setup(a: &ConfigArgs) -> Result<RunSetup, AnyError> {
    let kv = KeyValues::load(&a.config)?;
    let base = a.config.parent().unwrap_or(Path::new(".")).to_path_buf();
    let mesh_path = resolve_path(&base, kv.require("mesh")?);
    let mesh = load_mesh(&mesh_path)?;
    let from_file: Option<usize> = kv.parse_opt("workers")?;
    let workers = workers(a.workers.or(from_file))?;
    let out = a
        .out
        .clone()
        .or_else(|| kv.get("output").map(|o| resolve_path(&base, o)));
    Ok(RunSetup {
        kv,
        mesh_path,
        mesh,
        workers,
        out,
    })
}

fn manifest_for(command: &str, a: &ConfigArgs, s: &RunSetup) -> Result<Manifest, AnyError> {
    let mut m = Manifest::new(command, s.workers);
    m.mesh = Some(InputFile::hash(&s.mesh_path)?);
    m.config = Some(InputFile::hash(&a.config)?);
    Ok(m)
}

/// Initial condition of `run-convdiff`: `constant <v>` or
/// `gaussian <cx> <cy> <cz> <sigma> <peak> [<background>]`.
type Profile = Box<dyn Fn([f64; 3]) -> f64 + Sync>;

fn initial_condition(kv: &KeyValues) -> Result<Profile, AnyError> {
    let spec = kv.get("initial").unwrap_or("constant 0");
    let mut words = spec.split_whitespace();
    let kind = words.next().unwrap_or("");
    let nums = config::parse_numbers(&words.collect::<Vec<_>>().join(" "))
        .map_err(|m| kv.invalid("initial", m))?;
    match (kind, nums.as_slice()) {
        ("constant", [v]) => {
            let v = *v;
            Ok(Box::new(move |_| v))
        }
        ("gaussian", [cx, cy, cz, sigma, peak, rest @ ..]) if rest.len() <= 1 => {
            let (c, s, p) = ([*cx, *cy, *cz], *sigma, *peak);
            let bg = rest.first().copied().unwrap_or(0.0);
            Ok(Box::new(move |x| {
                let r = vec3::dist(x, c);
                p * (-(r * r) / (s * s)).exp() + bg
            }))
        }
        _ => Err(kv
            .invalid(
                "initial",
                format!("'{spec}': expected 'constant v' or 'gaussian cx cy cz sigma peak [background]'"),
            )
            .into()),
    }
}

fn run_convdiff(a: ConfigArgs) -> Result<(), AnyError> {
    let s = run_setup(&a)?;
    let kv = &s.kv;
    let velocity = kv.vec3("velocity")?.unwrap_or([0.0; 3]);
    let diffusivity: f64 = kv.parse_or("diffusivity", 0.0)?;
    if diffusivity < 0.0 {
        return Err(kv.invalid("diffusivity", "must be non-negative").into());
    }
    let source: f64 = kv.parse_or("source", 0.0)?;
    let cfl: f64 = kv.parse_or("cfl", 0.4)?;
    let fixed_dt: Option<f64> = kv.parse_opt("dt")?;
    let t_end: Option<f64> = kv.parse_opt("t_end")?;
    let steps_key: Option<usize> = kv.parse_opt("steps")?;
    let cadence: usize = kv.parse_or("cadence", 0)?;
    let second_order: bool = kv.parse_or("second_order", true)?;
    let initial = initial_condition(kv)?;
    let bcs = config::boundary_conditions(kv, "bc.", &s.mesh.patch_names, BoundaryCondition::Neumann)?;
    kv.finish()?;

    let domains = decompose(&s.mesh, s.workers)?;
    // time step: given, or from the CFL number on the uniform velocity
    let dt = match fixed_dt {
        Some(dt) if dt > 0.0 => dt,
        Some(dt) => return Err(format!("dt must be positive, got {dt}").into()),
        None => {
            let mut dt = f64::INFINITY;
            for d in &domains {
                let mut vel = CellField::zeros(d, 3);
                for slot in 0..d.num_slots() {
                    vel.set_vec3(slot, velocity);
                }
                dt = dt.min(cfl_time_step(d, &vel, cfl));
            }
            if diffusivity > 0.0 {
                let h = domains
                    .iter()
                    .flat_map(|d| d.volumes[..d.n_inner].iter())
                    .fold(f64::INFINITY, |m, v| m.min(v.cbrt()));
                dt = dt.min(cfl * h * h / (6.0 * diffusivity));
            }
            if !dt.is_finite() {
                return Err("nothing moves: give dt explicitly".into());
            }
            dt
        }
    };
    let (steps, dt) = match (steps_key, t_end) {
        (Some(_), Some(_)) => return Err("give either steps or t_end, not both".into()),
        (Some(n), None) => (n, dt),
        (None, Some(t)) if t > 0.0 => {
            let n = (t / dt).ceil().max(1.0) as usize;
            (n, t / n as f64)
        }
        _ => return Err(format!("{}: need steps or a positive t_end", kv.origin).into()),
    };
    if let Some(dir) = &s.out {
        create_dir(dir)?;
    }
    let out = s.out.clone();
    log::info!("convection-diffusion: {steps} steps of {dt:e} on {} workers", s.workers);

    let clock = Instant::now();
    let rows = run_workers(&domains, |d: &LocalDomain, t| {
        let mut op = ConvectionDiffusion::new(d, bcs.clone())?;
        op.second_order = second_order;
        let mut vel = CellField::zeros(d, 3);
        for slot in 0..d.num_slots() {
            vel.set_vec3(slot, velocity);
        }
        let mut u = CellField::from_fn(d, &initial);
        let src = vec![source; d.n_inner];
        let mut rows = vec![summary_row(d, t, 0, 0.0, &u)?];
        for step in 1..=steps {
            rk3_step(d, t, &mut u, dt, |t, w| {
                op.residual(d, t, w, &vel, Diffusivity::Constant(diffusivity), Some(&src))
            })?;
            rows.push(summary_row(d, t, step, step as f64 * dt, &u)?);
            if let (Some(dir), true) = (&out, cadence > 0 && step % cadence == 0) {
                write_snapshot(
                    d,
                    &[VtuField::scalar("u", u.inner(d))],
                    dir,
                    &format!("convdiff_{step:06}"),
                )
                .map_err(|e| e.to_string())?;
            }
        }
        exchange_halo(d, t, &mut [&mut u])?;
        Ok::<_, WorkerError>(rows)
    })?;
    let rows = &rows[0];
    let last = rows.last().expect("initial row");
    println!(
        "steps {steps}  dt {dt:e}  time {:.3} s  total {:e}  min {:e}  max {:e}",
        clock.elapsed().as_secs_f64(),
        last.2,
        last.3,
        last.4
    );
    if let Some(dir) = &s.out {
        let mut csv = String::from("step,time,total,min,max\n");
        for r in rows {
            csv.push_str(&format!("{},{:e},{:e},{:e},{:e}\n", r.0, r.1, r.2, r.3, r.4));
        }
        fs::write(dir.join("diagnostics.csv"), csv)?;
        manifest_for("run-convdiff", &a, &s)?
            .setting("dt", dt)
            .setting("steps", steps)
            .write(dir)?;
    }
    Ok(())
}

/// `(step, time, integral, min, max)` over all partitions.
fn summary_row(
    d: &LocalDomain,
    t: &mut impl fvdom::exchange::Transport,
    step: usize,
    time: f64,
    u: &CellField,
) -> Result<(usize, f64, f64, f64, f64), WorkerError> {
    use fvdom::exchange::{allreduce_max, allreduce_sum};
    let total: f64 = (0..d.n_inner).map(|i| u.get(i) * d.volumes[i]).sum();
    let (lo, hi) = (0..d.n_inner).fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), i| {
        (lo.min(u.get(i)), hi.max(u.get(i)))
    });
    let total = allreduce_sum(t, &[total])?[0];
    let m = allreduce_max(t, &[-lo, hi])?;
    Ok((step, time, total, -m[0], m[1]))
}

fn run_streamer_cmd(a: ConfigArgs) -> Result<(), AnyError> {
    let s = run_setup(&a)?;
    let base = a.config.parent().unwrap_or(Path::new(".")).to_path_buf();
    let cfg = streamer_config(&s.kv, &base)?;
    s.kv.finish()?;
    if !pulse_inside(&cfg.pulse, s.mesh.bounds()) {
        log::warn!("initial pulse centre {:?} lies outside the mesh bounds", cfg.pulse.center);
    }
    let domains = decompose(&s.mesh, s.workers)?;
    let clock = Instant::now();
    let summary = run_streamer(&domains, &cfg, s.out.as_deref())?;
    let last = summary.diagnostics.last().expect("initial diagnostics");
    println!(
        "steps {}  t {:e} s  wall {:.3} s",
        last.step,
        last.time,
        clock.elapsed().as_secs_f64()
    );
    println!(
        "electrons {:e}  ions {:e}  net charge {:e}  max n_e {:e}  max |E| {:e}  negative cells {}",
        last.electrons,
        last.ions,
        last.net_charge,
        last.max_electron_density,
        last.max_field,
        last.negative_cells
    );
    print!("{}", summary.timing_csv());
    if let Some(dir) = &s.out {
        manifest_for("run-streamer", &a, &s)?.write(dir)?;
        println!("wrote {} snapshots to {}", summary.snapshots.len(), dir.display());
    }
    Ok(())
}

fn bench(a: BenchArgs) -> Result<(), AnyError> {
    if a.workers.is_empty() || a.workers.contains(&0) {
        return Err("worker counts must be at least 1".into());
    }
    let mesh = match (&a.mesh, a.r#box) {
        (Some(p), None) => load_mesh(p)?,
        (None, Some(n)) => BoxMeshBuilder::unit_cube(n).jitter(0.3, 7).build()?,
        _ => return Err("give either --mesh or --box".into()),
    };
    create_dir(&a.out)?;
    let mut sweep = a.workers.clone();
    if !sweep.contains(&1) {
        sweep.insert(0, 1);
    }
    println!("mesh: {} cells; workers {:?}", mesh.num_cells(), sweep);

    let ops = bench_operators(&mesh, &sweep, a.iterations)?;
    let mut buf = Vec::new();
    ops.write_csv(&mut buf)?;
    fs::write(a.out.join("operators.csv"), &buf)?;
    print!("{}", String::from_utf8_lossy(&buf));

    let solves = bench_assembly_and_solve(&mesh, &sweep, &a.preconditioners, &SolverConfig::default())?;
    let mut buf = Vec::new();
    write_solve_csv(&solves, &mut buf)?;
    fs::write(a.out.join("solve.csv"), &buf)?;
    print!("{}", String::from_utf8_lossy(&buf));

    let exchange = bench_exchange(&mesh, &sweep, 3, a.iterations)?;
    let mut buf = Vec::new();
    write_exchange_csv(&exchange, &mut buf)?;
    fs::write(a.out.join("exchange.csv"), &buf)?;
    print!("{}", String::from_utf8_lossy(&buf));

    let mut m = Manifest::new("bench", *sweep.iter().max().unwrap_or(&1))
        .setting("workers", format!("{sweep:?}"))
        .setting("iterations", ops.iterations)
        .setting("cells", mesh.num_cells());
    if let Some(p) = &a.mesh {
        m.mesh = Some(InputFile::hash(p)?);
    } else if let Some(n) = a.r#box {
        m = m.setting("box", format!("unit cube n={n} jitter=0.3 seed=7"));
    }
    m.write(&a.out)?;
    Ok(())
}

fn gen_box(a: GenBoxArgs) -> Result<(), AnyError> {
    if a.n == 0 {
        return Err("--n must be at least 1".into());
    }
    let mut b = BoxMeshBuilder::unit_cube(a.n).jitter(a.jitter, a.seed);
    if let Some(l) = &a.lengths {
        let &[lx, ly, lz] = l.as_slice() else {
            return Err(format!("--lengths needs three values lx,ly,lz, got {}", l.len()).into());
        };
        b = b.lengths([lx, ly, lz]);
    }
    if a.channel {
        b = b.patches(PatchNames::channel());
    }
    let mesh = b.build()?;
    let file = fs::File::create(&a.out).map_err(|e| format!("cannot create {}: {e}", a.out.display()))?;
    fvdom::mesh::write_msh(&mesh, std::io::BufWriter::new(file))?;
    println!("wrote {} ({} cells, {} nodes)", a.out.display(), mesh.num_cells(), mesh.num_nodes());
    Ok(())
}

