use super::{GhostPoint, Mesh, MeshError};
use crate::vec3::{self, Vec3};

/// Fills cell centroids and volumes, face normals (unit, left to right),
/// areas and midpoints, and the ghost mirror points of boundary faces.
pub fn compute_geometry(mesh: &mut Mesh) -> Result<(), MeshError> {
    if mesh.faces.is_empty() && !mesh.cells.is_empty() {
        return Err(MeshError::MissingStage("build_connectivity"));
    }
    let pos = |n: usize| mesh.nodes[n].position;
    let mut centroids = Vec::with_capacity(mesh.cells.len());
    let mut volumes = Vec::with_capacity(mesh.cells.len());
    for cell in &mesh.cells {
        let p = cell.node_ids.map(pos);
        let vol = vec3::tet_signed_volume(p[0], p[1], p[2], p[3]).abs();
        if !(vol > 0.0) || !vol.is_finite() {
            return Err(MeshError::DegenerateCell {
                cell: cell.id,
                volume: vol,
            });
        }
        centroids.push(vec3::mean(p));
        volumes.push(vol);
    }
    for (cell, (c, v)) in mesh.cells.iter_mut().zip(centroids.iter().zip(volumes)) {
        cell.centroid = *c;
        cell.volume = v;
    }

    for face in mesh.faces.iter_mut() {
        let [a, b, c] = face.node_ids;
        let (pa, pb, pc) = (pos(a), pos(b), pos(c));
        let mut s = vec3::triangle_area_vector(pa, pb, pc);
        let mid = vec3::mean([pa, pb, pc]);
        let left = centroids[face.left_cell];
        if vec3::dot(s, vec3::sub(mid, left)) < 0.0 {
            face.node_ids = [a, c, b];
            s = vec3::scale(s, -1.0);
        }
        let area = vec3::norm(s);
        face.area = area;
        face.normal = vec3::scale(s, 1.0 / area);
        face.midpoint = mid;
        face.ghost = if face.right_cell.is_none() {
            Some(mirror(left, mid, face.normal))
        } else {
            None
        };
    }
    mesh.geometry_done = true;
    Ok(())
}

/// Reflects `point` across the plane through `on_plane` with unit `normal`.
pub(crate) fn mirror(point: Vec3, on_plane: Vec3, normal: Vec3) -> GhostPoint {
    let h = vec3::dot(vec3::sub(on_plane, point), normal);
    let foot = vec3::add(point, vec3::scale(normal, h));
    GhostPoint {
        center: vec3::add(point, vec3::scale(normal, 2.0 * h)),
        foot,
    }
}

/// Sum of outward area vectors over the faces of `cell`.
pub fn cell_closure(mesh: &Mesh, cell: usize) -> Vec3 {
    let mut sum = [0.0; 3];
    for &f in &mesh.cells[cell].face_ids {
        let face = &mesh.faces[f];
        let sign = if face.left_cell == cell { 1.0 } else { -1.0 };
        sum = vec3::add(sum, vec3::scale(face.area_vector(), sign));
    }
    sum
}
