use super::{LocalDomain, PartitionError};
use std::collections::{BTreeSet, HashMap};

/// Who sends what to whom. Lists are indexed like `neighbors` and ordered by
/// ascending global id, so `send_cells[p -> q]` on `p` lines up entry by entry
/// with `recv_cells[q <- p]` on `q`.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct CommPlan {
    pub neighbors: Vec<usize>,
    /// Inner slots whose values each neighbour keeps as halo.
    pub send_cells: Vec<Vec<usize>>,
    /// Halo slots filled from each neighbour.
    pub recv_cells: Vec<Vec<usize>>,
    /// Ghost slots each neighbour keeps as haloghost.
    pub send_ghosts: Vec<Vec<usize>>,
    /// Haloghost slots filled from each neighbour.
    pub recv_ghosts: Vec<Vec<usize>>,
}

impl CommPlan {
    pub fn is_empty(&self) -> bool {
        self.neighbors.is_empty()
    }

    pub fn neighbor_index(&self, part: usize) -> Option<usize> {
        self.neighbors.binary_search(&part).ok()
    }

    /// Cells sent per exchange, summed over neighbours.
    pub fn send_volume(&self) -> usize {
        self.send_cells.iter().map(Vec::len).sum()
    }

    pub fn recv_volume(&self) -> usize {
        self.recv_cells.iter().map(Vec::len).sum()
    }
}

/// Matches halo and haloghost slots against their owners and returns one plan
/// per domain (indexed by partition id).
pub fn build_comm_plan(domains: &[LocalDomain]) -> Result<Vec<CommPlan>, PartitionError> {
    let k = domains.len();
    // (receiver, owner) -> global ids the receiver needs
    let mut want_cells: Vec<HashMap<usize, Vec<usize>>> = vec![HashMap::new(); k];
    let mut want_ghosts: Vec<HashMap<usize, Vec<usize>>> = vec![HashMap::new(); k];
    for (p, d) in domains.iter().enumerate() {
        if d.part != p {
            return Err(PartitionError::Asymmetric {
                a: p,
                b: d.part,
                msg: "domains are not ordered by partition id".into(),
            });
        }
        for s in d.n_inner..d.num_cell_slots() {
            want_cells[p]
                .entry(d.cell_owner[s])
                .or_default()
                .push(d.cell_global[s]);
        }
        for s in d.haloghost_start()..d.num_slots() {
            let gi = d.ghost_index(s);
            let owner = d.cell_owner[d.ghost_cell[gi]];
            want_ghosts[p].entry(owner).or_default().push(d.ghost_face[gi]);
        }
    }

    let mut plans = Vec::with_capacity(k);
    for (p, d) in domains.iter().enumerate() {
        let mut neighbors = BTreeSet::new();
        neighbors.extend(want_cells[p].keys().copied());
        neighbors.extend(want_ghosts[p].keys().copied());
        for q in 0..k {
            if want_cells[q].contains_key(&p) || want_ghosts[q].contains_key(&p) {
                neighbors.insert(q);
            }
        }
        let ghost_slot: HashMap<usize, usize> = (d.ghost_start()..d.haloghost_start())
            .map(|s| (d.ghost_face[d.ghost_index(s)], s))
            .collect();
        let mut plan = CommPlan::default();
        for &q in &neighbors {
            let recv_cells: Vec<usize> = (d.n_inner..d.num_cell_slots())
                .filter(|&s| d.cell_owner[s] == q)
                .collect();
            let recv_ghosts: Vec<usize> = (d.haloghost_start()..d.num_slots())
                .filter(|&s| d.cell_owner[d.ghost_cell[d.ghost_index(s)]] == q)
                .collect();
            let empty = Vec::new();
            let mut send_cells = Vec::new();
            for &g in want_cells[q].get(&p).unwrap_or(&empty) {
                let s = d.inner_slot(g).ok_or_else(|| PartitionError::Asymmetric {
                    a: p,
                    b: q,
                    msg: format!("cell {g} requested but not owned"),
                })?;
                send_cells.push(s);
            }
            let mut send_ghosts = Vec::new();
            for &f in want_ghosts[q].get(&p).unwrap_or(&empty) {
                let s = *ghost_slot.get(&f).ok_or_else(|| PartitionError::Asymmetric {
                    a: p,
                    b: q,
                    msg: format!("ghost of face {f} requested but not owned"),
                })?;
                send_ghosts.push(s);
            }
            plan.neighbors.push(q);
            plan.recv_cells.push(recv_cells);
            plan.recv_ghosts.push(recv_ghosts);
            plan.send_cells.push(send_cells);
            plan.send_ghosts.push(send_ghosts);
        }
        plans.push(plan);
    }

    // the node-sharing relation is symmetric, so must be the plan
    for p in 0..k {
        for (i, &q) in plans[p].neighbors.iter().enumerate() {
            let j = plans[q].neighbor_index(p).ok_or_else(|| PartitionError::Asymmetric {
                a: p,
                b: q,
                msg: "neighbour relation is not symmetric".into(),
            })?;
            if plans[p].send_cells[i].len() != plans[q].recv_cells[j].len()
                || plans[p].send_ghosts[i].len() != plans[q].recv_ghosts[j].len()
            {
                return Err(PartitionError::Asymmetric {
                    a: p,
                    b: q,
                    msg: "send and receive lists differ in length".into(),
                });
            }
        }
    }
    Ok(plans)
}
