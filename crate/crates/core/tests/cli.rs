use std::path::Path;
use std::process::{Command, Output};

use fvdom::io::read_vtu_cell_data;

fn fvdom(args: &[&str], dir: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_fvdom"))
        .args(args)
        .current_dir(dir)
        .env_remove("FVDOM_WORKERS")
        .output()
        .expect("spawn fvdom")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn ok(o: Output) -> Output {
    assert!(o.status.success(), "exit {:?}\nstdout:\n{}\nstderr:\n{}", o.status.code(), stdout(&o), stderr(&o));
    o
}

fn gen_box(dir: &Path, n: &str, channel: bool, name: &str) {
    let mut args = vec!["gen-box", "--n", n, "--jitter", "0.3", "--out", name];
    if channel {
        args.extend(["--channel", "--lengths", "0.5,0.5,0.5"]);
    }
    ok(fvdom(&args, dir));
}

#[test]
fn help_and_version_succeed() {
    let dir = tempfile::tempdir().unwrap();
    let o = ok(fvdom(&["--help"], dir.path()));
    for cmd in ["partition", "solve-poisson", "run-convdiff", "run-streamer", "bench", "gen-box"] {
        assert!(stdout(&o).contains(cmd), "help lists {cmd}");
    }
    ok(fvdom(&["--version"], dir.path()));
}

#[test]
fn usage_errors_exit_one() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(fvdom(&["frobnicate"], dir.path()).status.code(), Some(1));
    assert_eq!(fvdom(&["solve-poisson", "--mesh", "m.msh"], dir.path()).status.code(), Some(1));
    assert_eq!(fvdom(&["partition", "--mesh", "m.msh", "-k", "two"], dir.path()).status.code(), Some(1));
}

#[test]
fn runtime_errors_exit_two_and_name_the_input() {
    let dir = tempfile::tempdir().unwrap();
    let o = fvdom(&["partition", "--mesh", "missing.msh", "-k", "2"], dir.path());
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("missing.msh"), "{}", stderr(&o));

    gen_box(dir.path(), "3", false, "cube.msh");
    std::fs::write(dir.path().join("bad.bc"), "in = dirichlet ten\n").unwrap();
    let o = fvdom(&["solve-poisson", "--mesh", "cube.msh", "--bc", "bad.bc"], dir.path());
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("bad.bc"), "{}", stderr(&o));

    let o = fvdom(&["gen-box", "--n", "2", "--lengths", "1,2", "--out", "x.msh"], dir.path());
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("three values"), "{}", stderr(&o));
}

#[test]
fn partition_writes_ownership() {
    let dir = tempfile::tempdir().unwrap();
    gen_box(dir.path(), "4", false, "cube.msh");
    ok(fvdom(&["partition", "--mesh", "cube.msh", "-k", "3", "--out", "parts"], dir.path()));
    let owners = std::fs::read_to_string(dir.path().join("parts/owners.txt")).unwrap();
    let owners: Vec<usize> = owners.lines().map(|l| l.trim().parse().unwrap()).collect();
    assert_eq!(owners.len(), 6 * 4 * 4 * 4);
    for p in 0..3 {
        assert!(owners.contains(&p));
    }
    assert!(owners.iter().all(|&p| p < 3));
    assert!(dir.path().join("parts/partition.csv").exists());
    assert!(dir.path().join("parts/manifest.json").exists());
}

#[test]
fn poisson_linear_profile_end_to_end() {
    let dir = tempfile::tempdir().unwrap();
    gen_box(dir.path(), "8", false, "cube.msh");
    std::fs::write(dir.path().join("plates.bc"), "in = dirichlet 10\nout = dirichlet 0\n").unwrap();
    let o = ok(fvdom(
        &[
            "solve-poisson", "--mesh", "cube.msh", "--bc", "plates.bc", "-k", "2",
            "--reference", "10,-10,0,0", "--out", "sol",
        ],
        dir.path(),
    ));
    assert!(stdout(&o).contains("max error vs reference"), "{}", stdout(&o));

    let manifest: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("sol/manifest.json")).unwrap()).unwrap();
    assert_eq!(manifest["command"], "solve-poisson");
    assert_eq!(manifest["workers"], 2);
    assert_eq!(manifest["mesh"]["sha256"].as_str().unwrap().len(), 64);

    // the pieces carry the full solution; check it against 10 (1 - x)
    let (_, _, arrays0) = read_vtu_cell_data(&dir.path().join("sol/poisson_p0.vtu")).unwrap();
    assert!(arrays0.contains_key("P"), "{:?}", arrays0.keys().collect::<Vec<_>>());
    let mesh = fvdom::Mesh::load(dir.path().join("cube.msh")).unwrap();
    let mut seen = 0;
    for p in 0..2 {
        let (_, cells, arrays) = read_vtu_cell_data(&dir.path().join(format!("sol/poisson_p{p}.vtu"))).unwrap();
        for (&id, &value) in arrays["cell_id"].values.iter().zip(&arrays["P"].values) {
            let x = mesh.cells[id as usize].centroid[0];
            assert!((value - 10.0 * (1.0 - x)).abs() <= 1e-6, "cell {id}: {value} vs {}", 10.0 * (1.0 - x));
        }
        seen += cells;
    }
    assert_eq!(seen, mesh.num_cells());
}

#[test]
fn convdiff_run_writes_snapshots_and_diagnostics() {
    let dir = tempfile::tempdir().unwrap();
    gen_box(dir.path(), "4", false, "cube.msh");
    std::fs::write(
        dir.path().join("run.cfg"),
        "mesh = cube.msh\nvelocity = 1 0.5 0.25\ndiffusivity = 0.001\n\
         initial = gaussian 0.3 0.3 0.3 0.1 1\nsteps = 6\ncadence = 3\nbc.in = dirichlet 0\n",
    )
    .unwrap();
    ok(fvdom(&["run-convdiff", "--config", "run.cfg", "-k", "2", "--out", "cd"], dir.path()));
    for f in ["convdiff_000003.pvtu", "convdiff_000006.pvtu", "diagnostics.csv", "manifest.json"] {
        assert!(dir.path().join("cd").join(f).exists(), "{f}");
    }
    let diag = std::fs::read_to_string(dir.path().join("cd/diagnostics.csv")).unwrap();
    assert!(diag.lines().count() >= 7, "{diag}");

    // unknown keys are rejected rather than ignored
    std::fs::write(dir.path().join("typo.cfg"), "mesh = cube.msh\nvelocty = 1 0 0\nsteps = 1\n").unwrap();
    let o = fvdom(&["run-convdiff", "--config", "typo.cfg"], dir.path());
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("velocty"), "{}", stderr(&o));
}

#[test]
fn streamer_short_run() {
    let dir = tempfile::tempdir().unwrap();
    gen_box(dir.path(), "4", true, "chan.msh");
    std::fs::write(
        dir.path().join("st.cfg"),
        "mesh = chan.msh\nsteps = 4\ncadence = 2\ndt = 1e-11\nspots = none\n\
         pulse.peak = 1e10\npulse.background = 1e6\npulse.sigma = 0.06\n",
    )
    .unwrap();
    ok(fvdom(&["run-streamer", "--config", "st.cfg", "-k", "2", "--out", "st"], dir.path()));
    let out = dir.path().join("st");
    for f in ["streamer_000002.pvtu", "streamer_000004.pvtu", "diagnostics.csv", "timing.csv", "manifest.json"] {
        assert!(out.join(f).exists(), "{f}");
    }
    let timing = std::fs::read_to_string(out.join("timing.csv")).unwrap();
    let mut lines = timing.lines();
    assert_eq!(
        lines.next().unwrap(),
        "Part,Cell Grad.,Face Grad.,Fluxes,Least square,Solver,Communications"
    );
    assert_eq!(lines.count(), 2);
    let diag = std::fs::read_to_string(out.join("diagnostics.csv")).unwrap();
    assert_eq!(diag.lines().count(), 1 + 5);
}

#[test]
fn bench_writes_tables() {
    let dir = tempfile::tempdir().unwrap();
    ok(fvdom(
        &["bench", "--box", "4", "--workers", "1,2", "--iterations", "1", "--preconditioners", "ilu0", "--out", "b"],
        dir.path(),
    ));
    for f in ["operators.csv", "solve.csv", "exchange.csv", "manifest.json"] {
        assert!(dir.path().join("b").join(f).exists(), "{f}");
    }
    let solve = std::fs::read_to_string(dir.path().join("b/solve.csv")).unwrap();
    assert_eq!(solve.lines().count(), 3);
    assert!(solve.lines().skip(1).all(|l| l.ends_with(",true")), "{solve}");
}
