use super::LocalDomain;
use std::io::Write;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct StatsRow {
    pub part: usize,
    pub inner: usize,
    pub halo: usize,
    pub neighbors: usize,
}

/// Per-partition inner/halo/neighbour counts. `max_row` points at the
/// partition with the most inner cells (lowest id on ties).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PartitionStats {
    pub rows: Vec<StatsRow>,
    pub max_row: usize,
}

pub fn partition_stats(domains: &[LocalDomain]) -> PartitionStats {
    let rows: Vec<StatsRow> = domains
        .iter()
        .map(|d| StatsRow {
            part: d.part,
            inner: d.n_inner,
            halo: d.n_halo,
            neighbors: d.plan.neighbors.len(),
        })
        .collect();
    let mut max_row = 0;
    for (i, r) in rows.iter().enumerate() {
        if r.inner > rows[max_row].inner {
            max_row = i;
        }
    }
    PartitionStats { rows, max_row }
}

impl PartitionStats {
    pub fn max(&self) -> StatsRow {
        self.rows[self.max_row]
    }

    /// CSV with header `Partition,Inner,Halo,Neigh.,Max`.
    pub fn write_csv(&self, mut out: impl Write) -> std::io::Result<()> {
        writeln!(out, "Partition,Inner,Halo,Neigh.,Max")?;
        for (i, r) in self.rows.iter().enumerate() {
            writeln!(
                out,
                "{},{},{},{},{}",
                r.part,
                r.inner,
                r.halo,
                r.neighbors,
                u8::from(i == self.max_row)
            )?;
        }
        Ok(())
    }
}
