use super::{Face, Mesh, MeshError};
use std::collections::{BTreeMap, HashMap};

fn sorted3(mut t: [usize; 3]) -> [usize; 3] {
    t.sort_unstable();
    t
}

/// Local face `k` of a tetrahedron is the triangle opposite node `k`.
pub(crate) fn local_face_nodes(tet: [usize; 4], k: usize) -> [usize; 3] {
    match k {
        0 => [tet[1], tet[2], tet[3]],
        1 => [tet[0], tet[2], tet[3]],
        2 => [tet[0], tet[1], tet[3]],
        _ => [tet[0], tet[1], tet[2]],
    }
}

/// Builds deduplicated faces (sorted by their sorted node triple), cell/face
/// links, node adjacency and node-neighbour stencils. Geometry fields are left
/// zeroed for [`super::compute_geometry`].
pub fn build_connectivity(mesh: &mut Mesh) -> Result<(), MeshError> {
    let mut owners: HashMap<[usize; 3], Vec<(usize, usize)>> =
        HashMap::with_capacity(mesh.cells.len() * 2 + 4);
    for cell in &mesh.cells {
        for k in 0..4 {
            owners
                .entry(sorted3(local_face_nodes(cell.node_ids, k)))
                .or_default()
                .push((cell.id, k));
        }
    }
    let mut keys: Vec<[usize; 3]> = owners.keys().copied().collect();
    keys.sort_unstable();

    let mut faces = Vec::with_capacity(keys.len());
    let mut key_to_face = HashMap::with_capacity(keys.len());
    for (id, key) in keys.iter().enumerate() {
        let mut sides = owners.remove(key).unwrap_or_default();
        if sides.len() > 2 {
            return Err(MeshError::NonManifold {
                nodes: *key,
                count: sides.len(),
            });
        }
        sides.sort_unstable();
        for &(cell, k) in &sides {
            mesh.cells[cell].face_ids[k] = id;
        }
        key_to_face.insert(*key, id);
        faces.push(Face {
            id,
            node_ids: *key,
            left_cell: sides[0].0,
            right_cell: sides.get(1).map(|s| s.0),
            normal: [0.0; 3],
            area: 0.0,
            midpoint: [0.0; 3],
            patch: None,
            ghost: None,
        });
    }

    // boundary patches from tagged triangles; interior tags are ignored
    let mut untagged = mesh.patch_names.iter().position(|p| p == "untagged");
    for (tri, patch) in &mesh.tagged_triangles {
        let key = sorted3(*tri);
        match key_to_face.get(&key) {
            Some(&f) if faces[f].right_cell.is_none() => faces[f].patch = Some(*patch),
            Some(_) => {}
            None => return Err(MeshError::UnmatchedTriangle { nodes: *tri }),
        }
    }
    for face in faces.iter_mut().filter(|f| f.right_cell.is_none()) {
        if face.patch.is_none() {
            let id = *untagged.get_or_insert_with(|| {
                mesh.patch_names.push("untagged".to_string());
                mesh.patch_names.len() - 1
            });
            face.patch = Some(id);
        }
    }
    let mut patches: BTreeMap<String, Vec<usize>> = BTreeMap::new();
    for face in &faces {
        if let Some(p) = face.patch {
            patches
                .entry(mesh.patch_names[p].clone())
                .or_default()
                .push(face.id);
        }
    }

    let n_nodes = mesh.nodes.len();
    let mut node_to_cells = vec![Vec::new(); n_nodes];
    for cell in &mesh.cells {
        for &n in &cell.node_ids {
            node_to_cells[n].push(cell.id);
        }
    }
    let mut node_to_boundary_faces = vec![Vec::new(); n_nodes];
    for face in faces.iter().filter(|f| f.right_cell.is_none()) {
        for &n in &face.node_ids {
            node_to_boundary_faces[n].push(face.id);
        }
    }
    let cell_to_cells_by_node = mesh
        .cells
        .iter()
        .map(|cell| {
            let mut nb: Vec<usize> = cell
                .node_ids
                .iter()
                .flat_map(|&n| node_to_cells[n].iter().copied())
                .filter(|&c| c != cell.id)
                .collect();
            nb.sort_unstable();
            nb.dedup();
            nb
        })
        .collect();

    mesh.faces = faces;
    mesh.boundary_patches = patches;
    mesh.node_to_cells = node_to_cells;
    mesh.node_to_boundary_faces = node_to_boundary_faces;
    mesh.cell_to_cells_by_node = cell_to_cells_by_node;
    mesh.diamonds.clear();
    mesh.geometry_done = false;
    Ok(())
}
