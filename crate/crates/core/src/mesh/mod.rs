//! Tetrahedral mesh: parsing, connectivity, geometry and diamond cells.
//!
//! A [`Mesh`] is built in four stages that mirror the public operations:
//! [`parse_msh`] fills nodes, cells and tagged boundary triangles,
//! [`build_connectivity`] creates deduplicated faces and adjacency,
//! [`compute_geometry`] fills volumes, centroids, normals and ghost points, and
//! [`build_diamonds`] builds the per-face diamond cells used by face gradients.
//! [`Mesh::from_elements`] runs all of them.

mod connectivity;
mod diamond;
mod generate;
mod geometry;
mod msh;

pub use connectivity::build_connectivity;
pub use diamond::{build_diamonds, Diamond};
pub use generate::{BoxMeshBuilder, PatchNames};
pub use geometry::{cell_closure, compute_geometry};
pub use msh::{parse_msh, write_msh};

use crate::vec3::Vec3;
use std::collections::BTreeMap;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum MeshError {
    #[error("malformed {section} section (line {line}): {msg}")]
    Parse {
        section: String,
        line: usize,
        msg: String,
    },
    #[error("unsupported mesh format: {0}")]
    Unsupported(String),
    #[error("element {element} references missing node {node}")]
    MissingNode { element: usize, node: usize },
    #[error("unknown element type {kind} (element {element})")]
    UnknownElement { element: usize, kind: usize },
    #[error("cell {cell} is degenerate (signed volume {volume:e})")]
    DegenerateCell { cell: usize, volume: f64 },
    #[error("face {nodes:?} is shared by {count} cells")]
    NonManifold { nodes: [usize; 3], count: usize },
    #[error("diamond of face {face} has non-positive volume {volume:e}")]
    DegenerateDiamond { face: usize, volume: f64 },
    #[error("tagged triangle {nodes:?} does not lie on the mesh boundary")]
    UnmatchedTriangle { nodes: [usize; 3] },
    #[error("mesh stage `{0}` has not been run")]
    MissingStage(&'static str),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Node {
    pub id: usize,
    pub position: Vec3,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Cell {
    pub id: usize,
    pub node_ids: [usize; 4],
    /// `face_ids[k]` is the face opposite `node_ids[k]`.
    pub face_ids: [usize; 4],
    pub centroid: Vec3,
    pub volume: f64,
}

/// Mirror point of a boundary face: the left centroid reflected across the
/// face plane (`center`) and its orthogonal projection onto the plane (`foot`).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GhostPoint {
    pub center: Vec3,
    pub foot: Vec3,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Face {
    pub id: usize,
    /// Ordered so that `(B - A) x (C - A)` points from left to right.
    pub node_ids: [usize; 3],
    pub left_cell: usize,
    /// `None` on the boundary.
    pub right_cell: Option<usize>,
    pub normal: Vec3,
    pub area: f64,
    pub midpoint: Vec3,
    /// Index into [`Mesh::patch_names`] for boundary faces.
    pub patch: Option<usize>,
    pub ghost: Option<GhostPoint>,
}

impl Face {
    pub fn is_boundary(&self) -> bool {
        self.right_cell.is_none()
    }

    /// `normal * area`.
    pub fn area_vector(&self) -> Vec3 {
        crate::vec3::scale(self.normal, self.area)
    }
}

#[derive(Debug, Clone, Default)]
pub struct Mesh {
    pub nodes: Vec<Node>,
    pub cells: Vec<Cell>,
    pub faces: Vec<Face>,
    pub diamonds: Vec<Diamond>,
    pub patch_names: Vec<String>,
    /// Patch name to boundary face ids (ascending).
    pub boundary_patches: BTreeMap<String, Vec<usize>>,
    pub node_to_cells: Vec<Vec<usize>>,
    /// Boundary faces touching each node, i.e. the ghost cells around it.
    pub node_to_boundary_faces: Vec<Vec<usize>>,
    pub cell_to_cells_by_node: Vec<Vec<usize>>,
    /// Boundary triangles read from the file with their patch index.
    pub tagged_triangles: Vec<([usize; 3], usize)>,
    geometry_done: bool,
}

impl Mesh {
    /// Builds a complete mesh from node positions, tetrahedra and tagged
    /// boundary triangles. Tetrahedra with negative orientation are flipped.
    pub fn from_elements(
        positions: Vec<Vec3>,
        tets: Vec<[usize; 4]>,
        tagged_triangles: Vec<([usize; 3], usize)>,
        patch_names: Vec<String>,
    ) -> Result<Self, MeshError> {
        let mut mesh = Mesh::from_raw(positions, tets, tagged_triangles, patch_names)?;
        mesh.finish()?;
        Ok(mesh)
    }

    /// Nodes and oriented cells only; no faces or geometry yet.
    pub(crate) fn from_raw(
        positions: Vec<Vec3>,
        tets: Vec<[usize; 4]>,
        tagged_triangles: Vec<([usize; 3], usize)>,
        patch_names: Vec<String>,
    ) -> Result<Self, MeshError> {
        let nodes: Vec<Node> = positions
            .into_iter()
            .enumerate()
            .map(|(id, position)| Node { id, position })
            .collect();
        let mut cells = Vec::with_capacity(tets.len());
        for (id, mut tet) in tets.into_iter().enumerate() {
            for &n in &tet {
                if n >= nodes.len() {
                    return Err(MeshError::MissingNode { element: id, node: n });
                }
            }
            let p = tet.map(|n| nodes[n].position);
            let vol = crate::vec3::tet_signed_volume(p[0], p[1], p[2], p[3]);
            if vol < 0.0 {
                tet.swap(2, 3);
            }
            let edge = (0..4)
                .flat_map(|a| (a + 1..4).map(move |b| (a, b)))
                .map(|(a, b)| crate::vec3::dist(p[a], p[b]))
                .fold(0.0, f64::max);
            if !(vol.abs() > 1e-14 * edge.powi(3)) {
                return Err(MeshError::DegenerateCell { cell: id, volume: vol });
            }
            cells.push(Cell {
                id,
                node_ids: tet,
                face_ids: [usize::MAX; 4],
                centroid: [0.0; 3],
                volume: 0.0,
            });
        }
        Ok(Mesh {
            nodes,
            cells,
            patch_names,
            tagged_triangles,
            ..Default::default()
        })
    }

    pub(crate) fn finish(&mut self) -> Result<(), MeshError> {
        build_connectivity(self)?;
        compute_geometry(self)?;
        build_diamonds(self)?;
        Ok(())
    }

    pub fn num_nodes(&self) -> usize {
        self.nodes.len()
    }

    pub fn num_cells(&self) -> usize {
        self.cells.len()
    }

    pub fn num_faces(&self) -> usize {
        self.faces.len()
    }

    pub fn patch_id(&self, name: &str) -> Option<usize> {
        self.patch_names.iter().position(|p| p == name)
    }

    pub fn total_volume(&self) -> f64 {
        self.cells.iter().map(|c| c.volume).sum()
    }

    pub fn has_geometry(&self) -> bool {
        self.geometry_done
    }

    /// Axis-aligned bounding box `(min, max)`.
    pub fn bounds(&self) -> (Vec3, Vec3) {
        let mut lo = [f64::INFINITY; 3];
        let mut hi = [f64::NEG_INFINITY; 3];
        for n in &self.nodes {
            for k in 0..3 {
                lo[k] = lo[k].min(n.position[k]);
                hi[k] = hi[k].max(n.position[k]);
            }
        }
        (lo, hi)
    }

    pub fn node_position(&self, id: usize) -> Vec3 {
        self.nodes[id].position
    }
}
