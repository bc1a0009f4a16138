use super::{slot_map, LinsysError, SparseMatrix};
use crate::fv::{BoundaryCondition, BoundaryConditions, NodeLSWeights};
use crate::partition::LocalDomain;
use std::collections::BTreeMap;

/// Discrete Laplacian rows of the inner cells plus the constant part of the
/// Dirichlet ghost values, so that `A p + shift` approximates the Laplacian
/// of `p` and `A p = f - shift` is the Poisson system.
#[derive(Debug, Clone, PartialEq)]
pub struct PoissonSystem {
    pub matrix: SparseMatrix,
    pub shift: Vec<f64>,
}

impl PoissonSystem {
    /// Right-hand side `f - shift` for source values `f` at the inner cells.
    pub fn rhs(&self, f: &[f64]) -> Vec<f64> {
        f.iter().zip(&self.shift).map(|(f, s)| f - s).collect()
    }
}

/// Accumulates `coef * u(slot)` into a row: cell slots map to their global
/// column, ghost slots are eliminated through their boundary condition.
struct RowBuilder<'a> {
    domain: &'a LocalDomain,
    bcs: &'a BoundaryConditions,
    row: BTreeMap<usize, f64>,
    constant: f64,
}

impl RowBuilder<'_> {
    fn add(&mut self, slot: usize, coef: f64) {
        let d = self.domain;
        if slot < d.num_cell_slots() {
            *self.row.entry(d.cell_global[slot]).or_insert(0.0) += coef;
            return;
        }
        let g = d.ghost_index(slot);
        let cell = d.cell_global[d.ghost_cell[g]];
        match self.bcs.get(d.ghost_patch[g]) {
            BoundaryCondition::Dirichlet(v) => {
                self.constant += 2.0 * coef * v.at(d.ghost_foot[g]);
                *self.row.entry(cell).or_insert(0.0) -= coef;
            }
            BoundaryCondition::Neumann | BoundaryCondition::Wall => {
                *self.row.entry(cell).or_insert(0.0) += coef;
            }
        }
    }
}

/// Assembles the Poisson operator of one partition.
///
/// Row `i` is `(1/vol_i) sum_faces grad p_ij . n_ij |sigma_ij|` with the
/// diamond face gradient; node values expand through the least-squares
/// weights and ghost values through the boundary conditions (Dirichlet folds
/// into `shift`). Faces on patches without diffusive flux are skipped.
pub fn assemble_poisson(
    domain: &LocalDomain,
    weights: &NodeLSWeights,
    bcs: &BoundaryConditions,
) -> Result<PoissonSystem, LinsysError> {
    let slots = slot_map(domain);
    let mut rows = Vec::with_capacity(domain.n_inner);
    let mut shift = Vec::with_capacity(domain.n_inner);
    let st = &domain.node_stencil;
    for i in 0..domain.n_inner {
        let mut b = RowBuilder {
            domain,
            bcs,
            row: BTreeMap::new(),
            constant: 0.0,
        };
        let inv_vol = 1.0 / domain.volumes[i];
        for &f in &domain.cell_faces[i] {
            let face = &domain.faces[f];
            if let Some(p) = face.patch {
                if !bcs.get(p).carries_diffusion() {
                    continue;
                }
            }
            let sign = if face.left == i { inv_vol } else { -inv_vol };
            let coef = face.diamond.flux_coefficients();
            for (k, &n) in face.nodes.iter().enumerate() {
                for e in st.range(n) {
                    b.add(st.slots[e], sign * coef[k] * weights.alpha[e]);
                }
            }
            b.add(face.left, sign * coef[3]);
            b.add(face.right, sign * coef[4]);
        }
        let g = domain.cell_global[i];
        if b.row.get(&g).is_none_or(|&d| d == 0.0) {
            return Err(LinsysError::ZeroDiagonal { row: g });
        }
        shift.push(b.constant);
        rows.push(b.row.into_iter().collect());
    }
    let matrix = SparseMatrix::from_rows(
        domain.global_cells,
        domain.cell_global[..domain.n_inner].to_vec(),
        rows,
        |c| slots.get(&c).copied(),
    )?;
    Ok(PoissonSystem { matrix, shift })
}
