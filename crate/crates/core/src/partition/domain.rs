use super::{build_comm_plan, CommPlan, PartitionError, PartitionMap};
use crate::mesh::{Diamond, Mesh};
use crate::vec3::Vec3;
use std::collections::{BTreeSet, HashMap};

/// Compressed row lists of local slots.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Stencil {
    pub offsets: Vec<usize>,
    pub slots: Vec<usize>,
}

impl Stencil {
    fn from_rows(rows: impl IntoIterator<Item = Vec<usize>>) -> Self {
        let mut s = Stencil {
            offsets: vec![0],
            slots: Vec::new(),
        };
        for r in rows {
            s.slots.extend(r);
            s.offsets.push(s.slots.len());
        }
        s
    }

    #[inline]
    pub fn row(&self, i: usize) -> &[usize] {
        &self.slots[self.offsets[i]..self.offsets[i + 1]]
    }

    #[inline]
    pub fn range(&self, i: usize) -> std::ops::Range<usize> {
        self.offsets[i]..self.offsets[i + 1]
    }

    pub fn num_rows(&self) -> usize {
        self.offsets.len() - 1
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SlotKind {
    Inner,
    Halo,
    Ghost,
    HaloGhost,
}

/// A face of an inner cell, with left/right given as local slots. On the
/// boundary `right` is the ghost slot of the face.
#[derive(Debug, Clone, PartialEq)]
pub struct LocalFace {
    pub global: usize,
    /// Local node indices of `A, B, C`.
    pub nodes: [usize; 3],
    pub left: usize,
    pub right: usize,
    pub patch: Option<usize>,
    pub normal: Vec3,
    pub area: f64,
    pub midpoint: Vec3,
    pub diamond: Diamond,
}

impl LocalFace {
    pub fn is_boundary(&self) -> bool {
        self.patch.is_some()
    }
}

/// One partition's view of the mesh.
///
/// Values of every per-cell field live in one array of slots laid out as
/// `[inner | halo | ghost | haloghost]`. Inner cells are owned here, halo
/// cells are owned by neighbours and share at least one node with an inner
/// cell, ghost slots mirror inner cells across boundary faces and haloghost
/// slots are the ghosts of halo cells touching a local node. Each block is
/// sorted by global id (cell id, or boundary face id for ghosts), and every
/// stencil lists cells before ghosts in ascending global order, so sums run
/// in the same order for any partition count.
#[derive(Debug, Clone)]
pub struct LocalDomain {
    pub part: usize,
    pub num_parts: usize,
    pub global_cells: usize,
    pub n_inner: usize,
    pub n_halo: usize,
    pub n_ghost: usize,
    pub n_haloghost: usize,
    /// Global id of every inner and halo slot.
    pub cell_global: Vec<usize>,
    /// Owner partition of every inner and halo slot.
    pub cell_owner: Vec<usize>,
    /// Global boundary face of every ghost and haloghost slot.
    pub ghost_face: Vec<usize>,
    /// Slot of the cell each ghost mirrors (inner for ghosts, halo for haloghosts).
    pub ghost_cell: Vec<usize>,
    pub ghost_patch: Vec<usize>,
    /// Projection of the mirrored centre onto the boundary plane.
    pub ghost_foot: Vec<Vec3>,
    /// Centroid (cells) or mirror point (ghosts) of every slot.
    pub centers: Vec<Vec3>,
    /// Volumes of inner and halo slots.
    pub volumes: Vec<f64>,
    pub node_global: Vec<usize>,
    pub node_positions: Vec<Vec3>,
    pub faces: Vec<LocalFace>,
    /// Local faces of each inner cell, in the cell's face order.
    pub cell_faces: Vec<[usize; 4]>,
    /// Local nodes of each inner cell.
    pub cell_nodes: Vec<[usize; 4]>,
    /// Cells and ghosts around each local node.
    pub node_stencil: Stencil,
    /// Node-neighbour cells and ghosts of each inner cell.
    pub cell_stencil: Stencil,
    pub patch_names: Vec<String>,
    pub plan: CommPlan,
}

impl LocalDomain {
    pub fn num_slots(&self) -> usize {
        self.n_inner + self.n_halo + self.n_ghost + self.n_haloghost
    }

    pub fn num_cell_slots(&self) -> usize {
        self.n_inner + self.n_halo
    }

    pub fn ghost_start(&self) -> usize {
        self.n_inner + self.n_halo
    }

    pub fn haloghost_start(&self) -> usize {
        self.ghost_start() + self.n_ghost
    }

    pub fn num_nodes(&self) -> usize {
        self.node_global.len()
    }

    pub fn slot_kind(&self, slot: usize) -> SlotKind {
        if slot < self.n_inner {
            SlotKind::Inner
        } else if slot < self.ghost_start() {
            SlotKind::Halo
        } else if slot < self.haloghost_start() {
            SlotKind::Ghost
        } else {
            SlotKind::HaloGhost
        }
    }

    /// Index into the ghost arrays (`ghost_face`, ...) of a ghost or haloghost slot.
    #[inline]
    pub fn ghost_index(&self, slot: usize) -> usize {
        slot - self.ghost_start()
    }

    pub fn patch_id(&self, name: &str) -> Option<usize> {
        self.patch_names.iter().position(|p| p == name)
    }

    /// Inner slot of a global cell id, if owned here.
    pub fn inner_slot(&self, global: usize) -> Option<usize> {
        self.cell_global[..self.n_inner].binary_search(&global).ok()
    }
}

/// Builds one [`LocalDomain`] per partition, including the communication plans.
pub fn build_local_domains(
    mesh: &Mesh,
    map: &PartitionMap,
) -> Result<Vec<LocalDomain>, PartitionError> {
    map.validate(mesh.num_cells())?;
    let mut domains: Vec<LocalDomain> = (0..map.num_parts)
        .map(|p| build_one(mesh, map, p))
        .collect();
    let plans = build_comm_plan(&domains)?;
    for (d, plan) in domains.iter_mut().zip(plans) {
        d.plan = plan;
    }
    Ok(domains)
}

fn build_one(mesh: &Mesh, map: &PartitionMap, part: usize) -> LocalDomain {
    let owner = &map.cell_owner;
    let inner: Vec<usize> = (0..mesh.num_cells()).filter(|&c| owner[c] == part).collect();
    let node_set: BTreeSet<usize> = inner
        .iter()
        .flat_map(|&c| mesh.cells[c].node_ids)
        .collect();
    let halo: Vec<usize> = node_set
        .iter()
        .flat_map(|&n| mesh.node_to_cells[n].iter().copied())
        .filter(|&c| owner[c] != part)
        .collect::<BTreeSet<_>>()
        .into_iter()
        .collect();
    let ghosts: Vec<usize> = inner
        .iter()
        .flat_map(|&c| mesh.cells[c].face_ids)
        .filter(|&f| mesh.faces[f].is_boundary())
        .collect::<BTreeSet<_>>()
        .into_iter()
        .collect();
    let haloghosts: Vec<usize> = node_set
        .iter()
        .flat_map(|&n| mesh.node_to_boundary_faces[n].iter().copied())
        .filter(|&f| owner[mesh.faces[f].left_cell] != part)
        .collect::<BTreeSet<_>>()
        .into_iter()
        .collect();
    let face_ids: Vec<usize> = inner
        .iter()
        .flat_map(|&c| mesh.cells[c].face_ids)
        .collect::<BTreeSet<_>>()
        .into_iter()
        .collect();

    let n_inner = inner.len();
    let n_halo = halo.len();
    let n_ghost = ghosts.len();
    let cell_global: Vec<usize> = inner.iter().chain(&halo).copied().collect();
    let cell_slot: HashMap<usize, usize> = cell_global
        .iter()
        .enumerate()
        .map(|(s, &g)| (g, s))
        .collect();
    let ghost_face: Vec<usize> = ghosts.iter().chain(&haloghosts).copied().collect();
    let ghost_slot: HashMap<usize, usize> = ghost_face
        .iter()
        .enumerate()
        .map(|(i, &f)| (f, n_inner + n_halo + i))
        .collect();
    let node_global: Vec<usize> = node_set.into_iter().collect();
    let node_local: HashMap<usize, usize> = node_global
        .iter()
        .enumerate()
        .map(|(i, &n)| (n, i))
        .collect();

    let mut centers: Vec<Vec3> = cell_global.iter().map(|&c| mesh.cells[c].centroid).collect();
    let volumes = cell_global.iter().map(|&c| mesh.cells[c].volume).collect();
    let mut ghost_cell = Vec::with_capacity(ghost_face.len());
    let mut ghost_patch = Vec::with_capacity(ghost_face.len());
    let mut ghost_foot = Vec::with_capacity(ghost_face.len());
    for &f in &ghost_face {
        let face = &mesh.faces[f];
        let g = face.ghost.expect("boundary face without ghost point");
        centers.push(g.center);
        ghost_foot.push(g.foot);
        ghost_cell.push(cell_slot[&face.left_cell]);
        ghost_patch.push(face.patch.unwrap_or(0));
    }

    let face_local: HashMap<usize, usize> =
        face_ids.iter().enumerate().map(|(i, &f)| (f, i)).collect();
    let faces = face_ids
        .iter()
        .map(|&f| {
            let face = &mesh.faces[f];
            LocalFace {
                global: f,
                nodes: face.node_ids.map(|n| node_local[&n]),
                left: cell_slot[&face.left_cell],
                right: match face.right_cell {
                    Some(r) => cell_slot[&r],
                    None => ghost_slot[&f],
                },
                patch: face.patch,
                normal: face.normal,
                area: face.area,
                midpoint: face.midpoint,
                diamond: mesh.diamonds[f],
            }
        })
        .collect();
    let cell_faces = inner
        .iter()
        .map(|&c| mesh.cells[c].face_ids.map(|f| face_local[&f]))
        .collect();
    let cell_nodes = inner
        .iter()
        .map(|&c| mesh.cells[c].node_ids.map(|n| node_local[&n]))
        .collect();

    let node_stencil = Stencil::from_rows(node_global.iter().map(|&n| {
        mesh.node_to_cells[n]
            .iter()
            .map(|c| cell_slot[c])
            .chain(mesh.node_to_boundary_faces[n].iter().map(|f| ghost_slot[f]))
            .collect()
    }));
    let cell_stencil = Stencil::from_rows(inner.iter().map(|&c| {
        let cell = &mesh.cells[c];
        let around: BTreeSet<usize> = cell
            .node_ids
            .iter()
            .flat_map(|&n| mesh.node_to_boundary_faces[n].iter().copied())
            .collect();
        mesh.cell_to_cells_by_node[c]
            .iter()
            .map(|x| cell_slot[x])
            .chain(around.iter().map(|f| ghost_slot[f]))
            .collect()
    }));

    LocalDomain {
        part,
        num_parts: map.num_parts,
        global_cells: mesh.num_cells(),
        n_inner,
        n_halo,
        n_ghost,
        n_haloghost: haloghosts.len(),
        cell_owner: cell_global.iter().map(|&c| owner[c]).collect(),
        cell_global,
        ghost_face,
        ghost_cell,
        ghost_patch,
        ghost_foot,
        centers,
        volumes,
        node_positions: node_global.iter().map(|&n| mesh.nodes[n].position).collect(),
        node_global,
        faces,
        cell_faces,
        cell_nodes,
        node_stencil,
        cell_stencil,
        patch_names: mesh.patch_names.clone(),
        plan: CommPlan::default(),
    }
}
