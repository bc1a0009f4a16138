use super::{Mesh, MeshError};
use crate::vec3::{self, Vec3};

/// Diamond cell of a face: the bipyramid spanned by the face triangle
/// `A, B, C` and the two adjacent centres `L` and `R`. On boundary faces `R`
/// is the ghost mirror point.
///
/// With the base triangle the fourth diamond vertex coincides with `C`, so the
/// face gradient reads
///
/// ```text
/// grad u = [ (uA - uC) S_brdl + (uB - uC) S_alcr + (uR - uL) S ] / (3 V)
/// ```
///
/// where `S_brdl`, `S_alcr` are the area vectors of the quadrilaterals
/// `B R C L` and `A L C R`, `S` the face area vector and `V` the diamond
/// volume. The three vectors form (up to `3V`) the dual basis of
/// `A - C`, `B - C`, `R - L`, which makes the formula exact for linear fields.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Diamond {
    pub face_id: usize,
    pub node_a: usize,
    pub node_b: usize,
    pub node_c: usize,
    pub cell_l: usize,
    /// `None` when `R` is a ghost point.
    pub cell_r: Option<usize>,
    pub point_l: Vec3,
    pub point_r: Vec3,
    pub volume: f64,
    pub normal_brdl: Vec3,
    pub normal_alcr: Vec3,
    /// Face area vector, oriented from `L` to `R`.
    pub normal_face: Vec3,
}

impl Diamond {
    /// Builds the diamond from its five vertices.
    pub fn from_points(
        face_id: usize,
        nodes: [usize; 3],
        cells: (usize, Option<usize>),
        points: [Vec3; 3],
        point_l: Vec3,
        point_r: Vec3,
    ) -> Result<Self, MeshError> {
        let [a, b, c] = points;
        let s = vec3::triangle_area_vector(a, b, c);
        // quadrilaterals split into two triangles each
        let brdl = vec3::add(
            vec3::triangle_area_vector(b, point_r, c),
            vec3::triangle_area_vector(b, c, point_l),
        );
        let alcr = vec3::add(
            vec3::triangle_area_vector(a, point_l, c),
            vec3::triangle_area_vector(a, c, point_r),
        );
        let volume = vec3::dot(s, vec3::sub(point_r, point_l)) / 3.0;
        if !(volume > 0.0) {
            return Err(MeshError::DegenerateDiamond {
                face: face_id,
                volume,
            });
        }
        Ok(Diamond {
            face_id,
            node_a: nodes[0],
            node_b: nodes[1],
            node_c: nodes[2],
            cell_l: cells.0,
            cell_r: cells.1,
            point_l,
            point_r,
            volume,
            normal_brdl: brdl,
            normal_alcr: alcr,
            normal_face: s,
        })
    }

    /// Face gradient from node values at `A, B, C` and centre values at `L, R`.
    #[inline]
    pub fn gradient(&self, ua: f64, ub: f64, uc: f64, ul: f64, ur: f64) -> Vec3 {
        let k = 1.0 / (3.0 * self.volume);
        let mut g = [0.0; 3];
        for d in 0..3 {
            g[d] = k
                * ((ua - uc) * self.normal_brdl[d]
                    + (ub - uc) * self.normal_alcr[d]
                    + (ur - ul) * self.normal_face[d]);
        }
        g
    }

    /// Coefficients of `(uA, uB, uC, uL, uR)` in `grad u . n |sigma|`.
    pub fn flux_coefficients(&self) -> [f64; 5] {
        let k = 1.0 / (3.0 * self.volume);
        let s = self.normal_face;
        let ta = k * vec3::dot(self.normal_brdl, s);
        let tb = k * vec3::dot(self.normal_alcr, s);
        let tr = k * vec3::dot(s, s);
        [ta, tb, -ta - tb, -tr, tr]
    }
}

/// Builds one diamond per face. Requires geometry.
pub fn build_diamonds(mesh: &mut Mesh) -> Result<(), MeshError> {
    if !mesh.has_geometry() {
        return Err(MeshError::MissingStage("compute_geometry"));
    }
    let mut diamonds = Vec::with_capacity(mesh.faces.len());
    for face in &mesh.faces {
        let l = mesh.cells[face.left_cell].centroid;
        let r = match (face.right_cell, face.ghost) {
            (Some(rc), _) => mesh.cells[rc].centroid,
            (None, Some(g)) => g.center,
            (None, None) => return Err(MeshError::MissingStage("compute_geometry")),
        };
        let pts = face.node_ids.map(|n| mesh.nodes[n].position);
        diamonds.push(Diamond::from_points(
            face.id,
            face.node_ids,
            (face.left_cell, face.right_cell),
            pts,
            l,
            r,
        )?);
    }
    mesh.diamonds = diamonds;
    Ok(())
}
