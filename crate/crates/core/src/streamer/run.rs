use super::{init_state, Diagnostics, StreamerConfig, StreamerError, StreamerModel, StreamerTimes};
use crate::exchange::{run_workers, Transport};
use crate::io::vtu::{write_snapshot, VtuField};
use crate::partition::LocalDomain;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

/// Header of the per-partition timing table.
pub const TIMING_COLUMNS: [&str; 7] = [
    "Part",
    "Cell Grad.",
    "Face Grad.",
    "Fluxes",
    "Least square",
    "Solver",
    "Communications",
];

#[derive(Debug, Clone)]
pub struct RunSummary {
    /// One row per step, starting with the initial state.
    pub diagnostics: Vec<Diagnostics>,
    /// Accumulated phase times of each partition.
    pub times: Vec<StreamerTimes>,
    /// Snapshot files a viewer should open (`.vtu` or `.pvtu`).
    pub snapshots: Vec<PathBuf>,
}

impl RunSummary {
    pub fn diagnostics_csv(&self) -> String {
        let mut s = String::from(Diagnostics::CSV_HEADER);
        s.push('\n');
        for d in &self.diagnostics {
            s.push_str(&d.csv_row());
            s.push('\n');
        }
        s
    }

    pub fn timing_csv(&self) -> String {
        let mut s = TIMING_COLUMNS.join(",");
        s.push('\n');
        for (part, t) in self.times.iter().enumerate() {
            let _ = writeln!(
                s,
                "{part},{:.6},{:.6},{:.6},{:.6},{:.6},{:.6}",
                t.cell_gradient.as_secs_f64(),
                t.face_gradient.as_secs_f64(),
                t.fluxes.as_secs_f64(),
                t.least_squares.as_secs_f64(),
                t.solver.as_secs_f64(),
                t.communication.as_secs_f64()
            );
        }
        s
    }
}

/// Runs `config.steps` steps on the given partitions, one worker each.
///
/// With an output directory, every `config.cadence` steps a snapshot with
/// `n_e`, `n_p`, `n_e - n_p`, the potential and the field is written, and
/// `diagnostics.csv` / `timing.csv` are written at the end.
pub fn run_streamer(
    domains: &[LocalDomain],
    config: &StreamerConfig,
    output: Option<&Path>,
) -> Result<RunSummary, StreamerError> {
    config.validate()?;
    if let Some(dir) = output {
        std::fs::create_dir_all(dir)?;
    }
    let results = run_workers(domains, |d, t| {
        let lead = t.rank() == 0;
        let mut model = StreamerModel::new(d, config.clone())?;
        let mut state = init_state(d, config);
        model.update_fields(d, t, &mut state)?;
        let mut diagnostics = vec![model.diagnostics(d, t, &state)?];
        let advisory = model.advisory_time_step(d, t, &state)?;
        if lead && advisory < config.dt {
            log::warn!(
                "time step {:e} s exceeds the advisory limit {:e} s of the initial state",
                config.dt,
                advisory
            );
        }
        let mut snapshots = Vec::new();
        for _ in 0..config.steps {
            model.step(d, t, &mut state)?;
            let diag = model.diagnostics(d, t, &state)?;
            if lead && diag.negative_cells > 0 {
                log::warn!("step {}: {} cells with negative n_e", diag.step, diag.negative_cells);
            }
            diagnostics.push(diag);
            if let (Some(dir), true) = (output, config.cadence > 0 && state.step.is_multiple_of(config.cadence)) {
                let n = d.n_inner;
                let ne: Vec<f64> = (0..n).map(|i| state.n_e(i)).collect();
                let np: Vec<f64> = (0..n).map(|i| state.n_p(i)).collect();
                let net: Vec<f64> = ne.iter().zip(&np).map(|(e, p)| e - p).collect();
                let fields = [
                    VtuField::scalar("n_e", &ne),
                    VtuField::scalar("n_p", &np),
                    VtuField::scalar("n_e_minus_n_p", &net),
                    VtuField::scalar("potential", state.potential.values()),
                    VtuField::vector("E", state.field.values()),
                ];
                let stem = format!("streamer_{:06}", state.step);
                snapshots.push(write_snapshot(d, &fields, dir, &stem)?);
            }
        }
        Ok::<_, StreamerError>((diagnostics, model.times, snapshots))
    })?;

    let mut results = results.into_iter();
    let (diagnostics, first_times, snapshots) = results.next().expect("at least one partition");
    let times = std::iter::once(first_times)
        .chain(results.map(|r| r.1))
        .collect();
    let summary = RunSummary {
        diagnostics,
        times,
        snapshots,
    };
    if let Some(dir) = output {
        std::fs::write(dir.join("diagnostics.csv"), summary.diagnostics_csv())?;
        std::fs::write(dir.join("timing.csv"), summary.timing_csv())?;
    }
    Ok(summary)
}
