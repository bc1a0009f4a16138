use super::{allreduce_max, barrier, exchange_halo, exchange_halo_overlapped, run_workers};
use super::{tags, ExchangeError, Transport};
use crate::fv::CellField;
use crate::partition::LocalDomain;
use std::time::Instant;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExchangeVariant {
    /// Every rank sends a (possibly empty) buffer to every other rank.
    AllPairs,
    /// Blocking exchange with plan neighbours only.
    Neighbor,
    /// Neighbour exchange overlapped with a caller-side computation.
    NeighborOverlapped,
}

impl ExchangeVariant {
    pub const ALL: [ExchangeVariant; 3] = [
        ExchangeVariant::AllPairs,
        ExchangeVariant::Neighbor,
        ExchangeVariant::NeighborOverlapped,
    ];

    pub fn label(self) -> &'static str {
        match self {
            ExchangeVariant::AllPairs => "all-pairs",
            ExchangeVariant::Neighbor => "neighbor",
            ExchangeVariant::NeighborOverlapped => "neighbor-overlapped",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExchangeTiming {
    pub variant: ExchangeVariant,
    pub workers: usize,
    /// Mean over repetitions of the slowest worker's exchange time.
    pub mean_seconds: f64,
    /// Largest number of values any worker sends per exchange.
    pub max_send_values: usize,
}

fn all_pairs(
    domain: &LocalDomain,
    t: &mut impl Transport,
    field: &mut CellField,
) -> Result<(), ExchangeError> {
    let plan = &domain.plan;
    let stride = field.ncomp();
    let (me, size) = (t.rank(), t.size());
    for q in (0..size).filter(|&q| q != me) {
        let buf = match plan.neighbor_index(q) {
            Some(i) => plan.send_cells[i]
                .iter()
                .flat_map(|&s| field.slot(s).to_vec())
                .collect(),
            None => Vec::new(),
        };
        t.send(q, tags::ALL_TO_ALL, buf)?;
    }
    for q in (0..size).filter(|&q| q != me) {
        let buf = t.recv(q, tags::ALL_TO_ALL)?;
        if let Some(i) = plan.neighbor_index(q) {
            for (k, &s) in plan.recv_cells[i].iter().enumerate() {
                field
                    .slot_mut(s)
                    .copy_from_slice(&buf[k * stride..(k + 1) * stride]);
            }
        }
    }
    Ok(())
}

/// Times one halo exchange of a `stride`-component field in each variant,
/// `repetitions` times after one warm-up.
pub fn barrier_time(
    domains: &[LocalDomain],
    stride: usize,
    repetitions: usize,
) -> Result<Vec<ExchangeTiming>, ExchangeError> {
    let reps = repetitions.max(1);
    let per_worker = run_workers(domains, |d, t| {
        let mut field = CellField::zeros(d, stride);
        for s in 0..d.n_inner {
            field.slot_mut(s).fill(d.cell_global[s] as f64);
        }
        let mut means = Vec::new();
        for variant in ExchangeVariant::ALL {
            let mut total = 0.0;
            for rep in 0..=reps {
                barrier(t)?;
                let start = Instant::now();
                match variant {
                    ExchangeVariant::AllPairs => all_pairs(d, t, &mut field)?,
                    ExchangeVariant::Neighbor => exchange_halo(d, t, &mut [&mut field])?,
                    ExchangeVariant::NeighborOverlapped => {
                        exchange_halo_overlapped(d, t, &mut [&mut field], || ())?
                    }
                }
                let local = start.elapsed().as_secs_f64();
                let slowest = allreduce_max(t, &[local])?[0];
                if rep > 0 {
                    total += slowest;
                }
            }
            means.push(total / reps as f64);
        }
        let sends = allreduce_max(t, &[(d.plan.send_volume() * stride) as f64])?[0];
        Ok::<_, ExchangeError>((means, sends as usize))
    })?;
    let (means, sends) = &per_worker[0];
    Ok(ExchangeVariant::ALL
        .iter()
        .zip(means)
        .map(|(&variant, &mean_seconds)| ExchangeTiming {
            variant,
            workers: domains.len(),
            mean_seconds,
            max_send_values: *sends,
        })
        .collect())
}
