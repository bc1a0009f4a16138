//! Dense Poisson oracle assembled term by term from node coordinates.

use fvdom::mesh::Mesh;
use fvdom::vec3::{self, Vec3};
use nalgebra::DMatrix;
use std::collections::BTreeSet;

pub fn tri(a: Vec3, b: Vec3, c: Vec3) -> Vec3 {
    vec3::scale(vec3::cross(vec3::sub(b, a), vec3::sub(c, a)), 0.5)
}

/// Point used for a stencil entry: a cell centroid or a boundary face's
/// mirror point, together with the cell it depends on and whether it is a
/// Dirichlet mirror (value `2 g - u_cell`).
#[derive(Clone, Copy)]
pub struct StencilPoint {
    pub x: Vec3,
    pub cell: usize,
    pub dirichlet: Option<f64>,
}

pub fn raw_centroid(mesh: &Mesh, c: usize) -> Vec3 {
    let p = mesh.cells[c].node_ids.map(|n| mesh.nodes[n].position);
    vec3::scale(vec3::add(vec3::add(p[0], p[1]), vec3::add(p[2], p[3])), 0.25)
}

pub fn raw_ghost(mesh: &Mesh, f: usize, values: &[(&str, f64)]) -> StencilPoint {
    let face = &mesh.faces[f];
    let p = face.node_ids.map(|n| mesh.nodes[n].position);
    let s = tri(p[0], p[1], p[2]);
    let n = vec3::scale(s, 1.0 / vec3::norm(s));
    let l = raw_centroid(mesh, face.left_cell);
    let h = vec3::dot(vec3::sub(p[0], l), n);
    let name = &mesh.patch_names[face.patch.unwrap()];
    StencilPoint {
        x: vec3::add(l, vec3::scale(n, 2.0 * h)),
        cell: face.left_cell,
        dirichlet: values.iter().find(|(p, _)| p == name).map(|(_, v)| *v),
    }
}

/// Dense Poisson matrix and shift built term by term from node coordinates,
/// with node weights from a dense weighted least-squares fit.
pub fn hand_poisson(mesh: &Mesh, values: &[(&str, f64)]) -> (DMatrix<f64>, Vec<f64>) {
    let n = mesh.num_cells();
    let mut a = DMatrix::zeros(n, n);
    let mut shift = vec![0.0; n];
    // node weights
    let node_points = |node: usize| -> Vec<StencilPoint> {
        let mut pts: Vec<StencilPoint> = mesh.node_to_cells[node]
            .iter()
            .map(|&c| StencilPoint { x: raw_centroid(mesh, c), cell: c, dirichlet: None })
            .collect();
        let faces: BTreeSet<usize> = mesh.node_to_boundary_faces[node].iter().copied().collect();
        pts.extend(faces.into_iter().map(|f| raw_ghost(mesh, f, values)));
        pts
    };
    let alpha = |node: usize, pts: &[StencilPoint]| -> Vec<f64> {
        let xn = mesh.nodes[node].position;
        let m = pts.len();
        let mut p = DMatrix::zeros(m, 4);
        let mut w = DMatrix::zeros(m, m);
        for (r, s) in pts.iter().enumerate() {
            let d = vec3::sub(s.x, xn);
            p[(r, 0)] = 1.0;
            for k in 0..3 {
                p[(r, k + 1)] = d[k];
            }
            w[(r, r)] = 1.0 / vec3::norm(d);
        }
        let normal = p.transpose() * &w * &p;
        let sol = normal.lu().solve(&(p.transpose() * &w)).unwrap();
        (0..m).map(|r| sol[(0, r)]).collect()
    };
    let add = |row: usize, sp: StencilPoint, coef: f64, a: &mut DMatrix<f64>, shift: &mut [f64]| {
        match sp.dirichlet {
            Some(g) => {
                shift[row] += 2.0 * coef * g;
                a[(row, sp.cell)] -= coef;
            }
            None => a[(row, sp.cell)] += coef,
        }
    };
    for i in 0..n {
        let vol = vec3::tet_signed_volume(
            mesh.nodes[mesh.cells[i].node_ids[0]].position,
            mesh.nodes[mesh.cells[i].node_ids[1]].position,
            mesh.nodes[mesh.cells[i].node_ids[2]].position,
            mesh.nodes[mesh.cells[i].node_ids[3]].position,
        )
        .abs();
        for &f in &mesh.cells[i].face_ids {
            let face = &mesh.faces[f];
            let left = StencilPoint { x: raw_centroid(mesh, face.left_cell), cell: face.left_cell, dirichlet: None };
            let right = match face.right_cell {
                Some(r) => StencilPoint { x: raw_centroid(mesh, r), cell: r, dirichlet: None },
                None => raw_ghost(mesh, f, values),
            };
            if face.right_cell.is_none() && right.dirichlet.is_none() {
                continue; // zero-flux patch
            }
            let [na, nb, nc] = face.node_ids;
            let [pa, pb, pc] = face.node_ids.map(|q| mesh.nodes[q].position);
            let (l, r) = (left.x, right.x);
            let s = tri(pa, pb, pc);
            assert!(vec3::dot(s, vec3::sub(r, l)) > 0.0);
            let brdl = vec3::add(tri(pb, r, pc), tri(pb, pc, l));
            let alcr = vec3::add(tri(pa, l, pc), tri(pa, pc, r));
            let dvol = vec3::dot(s, vec3::sub(r, l)) / 3.0;
            let k = 1.0 / (3.0 * vol * dvol);
            let sign = if face.left_cell == i { 1.0 } else { -1.0 };
            // the six terms, node values expanded through their weights
            let terms = [
                (Some(na), k * vec3::dot(brdl, s)),
                (Some(nc), -k * vec3::dot(brdl, s)),
                (Some(nb), k * vec3::dot(alcr, s)),
                (Some(nc), -k * vec3::dot(alcr, s)),
            ];
            for (node, c) in terms {
                let node = node.unwrap();
                let pts = node_points(node);
                for (sp, w) in pts.iter().zip(alpha(node, &pts)) {
                    add(i, *sp, sign * c * w, &mut a, &mut shift);
                }
            }
            add(i, right, sign * k * vec3::dot(s, s), &mut a, &mut shift);
            add(i, left, -sign * k * vec3::dot(s, s), &mut a, &mut shift);
        }
    }
    (a, shift)
}
