//! Domain decomposition: cell ownership, local domains with their
//! inner/halo/ghost/haloghost layout, and the neighbour communication plan.

mod domain;
mod graph;
mod plan;
mod stats;

pub use domain::{build_local_domains, LocalDomain, LocalFace, SlotKind, Stencil};
pub use graph::partition_mesh;
pub use plan::{build_comm_plan, CommPlan};
pub use stats::{partition_stats, PartitionStats, StatsRow};

use thiserror::Error;

#[derive(Debug, Error)]
pub enum PartitionError {
    #[error("cannot split {cells} cells into {parts} partitions")]
    TooManyParts { parts: usize, cells: usize },
    #[error("partition count must be at least 1")]
    NoParts,
    #[error("partition map covers {map} cells but the mesh has {mesh}")]
    SizeMismatch { map: usize, mesh: usize },
    #[error("cell {cell} is owned by partition {owner} >= {parts}")]
    BadOwner { cell: usize, owner: usize, parts: usize },
    #[error("partition {0} is empty")]
    EmptyPart(usize),
    #[error("inconsistent communication plan between partitions {a} and {b}: {msg}")]
    Asymmetric { a: usize, b: usize, msg: String },
}

/// Owner partition of every cell.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PartitionMap {
    pub cell_owner: Vec<usize>,
    pub num_parts: usize,
}

impl PartitionMap {
    /// Every cell in partition 0.
    pub fn single(num_cells: usize) -> Self {
        PartitionMap {
            cell_owner: vec![0; num_cells],
            num_parts: 1,
        }
    }

    pub fn part_sizes(&self) -> Vec<usize> {
        let mut sizes = vec![0; self.num_parts];
        for &o in &self.cell_owner {
            sizes[o] += 1;
        }
        sizes
    }

    /// Largest partition over the mean partition size.
    pub fn imbalance(&self) -> f64 {
        let sizes = self.part_sizes();
        let max = sizes.iter().copied().max().unwrap_or(0) as f64;
        max * self.num_parts as f64 / self.cell_owner.len().max(1) as f64
    }

    pub fn validate(&self, num_cells: usize) -> Result<(), PartitionError> {
        if self.num_parts == 0 {
            return Err(PartitionError::NoParts);
        }
        if self.cell_owner.len() != num_cells {
            return Err(PartitionError::SizeMismatch {
                map: self.cell_owner.len(),
                mesh: num_cells,
            });
        }
        for (cell, &owner) in self.cell_owner.iter().enumerate() {
            if owner >= self.num_parts {
                return Err(PartitionError::BadOwner {
                    cell,
                    owner,
                    parts: self.num_parts,
                });
            }
        }
        if let Some(p) = self.part_sizes().iter().position(|&s| s == 0) {
            return Err(PartitionError::EmptyPart(p));
        }
        Ok(())
    }
}

/// Partitions the mesh and builds the local domains with their plans.
pub fn decompose(
    mesh: &crate::mesh::Mesh,
    parts: usize,
) -> Result<Vec<LocalDomain>, PartitionError> {
    let map = partition_mesh(mesh, parts)?;
    build_local_domains(mesh, &map)
}
