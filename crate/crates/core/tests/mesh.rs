mod common;

use common::{cube, two_tets, SINGLE_TET, TWO_TETS};
use fvdom::mesh::{self, cell_closure, BoxMeshBuilder, Mesh, MeshError};
use fvdom::vec3;
use std::collections::HashMap;

#[test]
fn single_tetra_file() {
    let mesh = Mesh::read_msh(SINGLE_TET.as_bytes()).unwrap();
    assert_eq!(mesh.num_nodes(), 4);
    assert_eq!(mesh.num_cells(), 1);
    assert_eq!(mesh.num_faces(), 4);
    assert!(mesh.faces.iter().all(|f| f.is_boundary()));
    assert_eq!(mesh.boundary_patches["wall"].len(), 4);
    assert!((mesh.cells[0].volume - 1.0 / 6.0).abs() < 1e-15);
    assert!(mesh.cell_to_cells_by_node[0].is_empty());
}

#[test]
fn two_tets_share_one_face() {
    let mesh = two_tets();
    assert_eq!(mesh.num_faces(), 7);
    assert_eq!(mesh.faces.iter().filter(|f| !f.is_boundary()).count(), 1);
    assert_eq!(mesh.cell_to_cells_by_node[0], vec![1]);
    assert_eq!(mesh.boundary_patches["in"].len(), 3);
    assert_eq!(mesh.boundary_patches["out"].len(), 3);
}

#[test]
fn triangle_area_and_normal() {
    let s = vec3::triangle_area_vector([0.0; 3], [1.0, 0.0, 0.0], [0.0, 1.0, 0.0]);
    assert!((vec3::norm(s) - 0.5).abs() < 1e-15);
    assert_eq!(s, [0.0, 0.0, 0.5]);
}

#[test]
fn elements_count_mismatch_names_section() {
    let bad = TWO_TETS.replace("$Elements\n8", "$Elements\n9");
    let err = Mesh::read_msh(bad.as_bytes()).unwrap_err();
    assert!(err.to_string().contains("$Elements"), "{err}");
    let bad = TWO_TETS.replace("$Elements\n8", "$Elements\n7");
    let err = Mesh::read_msh(bad.as_bytes()).unwrap_err();
    assert!(err.to_string().contains("$Elements"), "{err}");
}

#[test]
fn rejects_v4_binary_and_unknown_elements() {
    let v4 = SINGLE_TET.replace("2.2 0 8", "4.1 0 8");
    assert!(matches!(
        Mesh::read_msh(v4.as_bytes()),
        Err(MeshError::Unsupported(_))
    ));
    let bin = SINGLE_TET.replace("2.2 0 8", "2.2 1 8");
    assert!(matches!(
        Mesh::read_msh(bin.as_bytes()),
        Err(MeshError::Unsupported(_))
    ));
    let hex = SINGLE_TET.replace("5 4 2 2 2 1 2 3 4", "5 5 2 2 2 1 2 3 4");
    assert!(matches!(
        Mesh::read_msh(hex.as_bytes()),
        Err(MeshError::UnknownElement { kind: 5, .. })
    ));
}

#[test]
fn missing_node_and_degenerate_cell() {
    let bad = SINGLE_TET.replace("5 4 2 2 2 1 2 3 4", "5 4 2 2 2 1 2 3 9");
    assert!(matches!(
        Mesh::read_msh(bad.as_bytes()),
        Err(MeshError::MissingNode { node: 9, .. })
    ));
    let flat = SINGLE_TET.replace("4 0 0 1\n", "4 1 1 0\n");
    assert!(matches!(
        Mesh::read_msh(flat.as_bytes()),
        Err(MeshError::DegenerateCell { cell: 0, .. })
    ));
}

#[test]
fn non_manifold_face_rejected() {
    let positions = vec![
        [0.0, 0.0, 0.0],
        [1.0, 0.0, 0.0],
        [0.0, 1.0, 0.0],
        [0.0, 0.0, 1.0],
        [0.0, 0.0, -1.0],
        [0.3, 0.3, 0.8],
    ];
    let tets = vec![[0, 1, 2, 3], [0, 1, 2, 4], [0, 1, 2, 5]];
    let err = Mesh::from_elements(positions, tets, vec![], vec![]).unwrap_err();
    assert!(matches!(err, MeshError::NonManifold { count: 3, .. }));
}

#[test]
fn cube_patches_and_volume() {
    let mesh = cube(6);
    assert_eq!(mesh.num_cells(), 6 * 216);
    let names: Vec<_> = mesh.boundary_patches.keys().cloned().collect();
    assert_eq!(names, ["back", "bottom", "front", "in", "out", "upper"]);
    assert!((mesh.total_volume() - 1.0).abs() < 1e-10);
    for f in &mesh.faces {
        assert!((vec3::norm(f.normal) - 1.0).abs() < 1e-12);
        assert!(f.area > 0.0);
    }
}

#[test]
fn cube_msh_round_trip() {
    let mesh = cube(3);
    let mut buf = Vec::new();
    mesh::write_msh(&mesh, &mut buf).unwrap();
    let back = Mesh::read_msh(buf.as_slice()).unwrap();
    assert_eq!(back.num_cells(), mesh.num_cells());
    assert_eq!(back.num_faces(), mesh.num_faces());
    for (a, b) in mesh.cells.iter().zip(&back.cells) {
        assert_eq!(a.centroid, b.centroid);
    }
    for (name, faces) in &mesh.boundary_patches {
        assert_eq!(&back.boundary_patches[name], faces);
    }
}

#[test]
fn closed_cells_sum_to_zero() {
    let mesh = cube(4);
    let total: f64 = mesh.faces.iter().map(|f| f.area).sum();
    for c in 0..mesh.num_cells() {
        let s = cell_closure(&mesh, c);
        assert!(vec3::norm(s) <= 1e-10 * total, "cell {c}: {s:?}");
    }
}

#[test]
fn interior_faces_match_brute_force_pairs() {
    let mesh = cube(3);
    // all-pairs triangle matching, independent of the hash-based build
    let mut tri_cells: HashMap<[usize; 3], Vec<usize>> = HashMap::new();
    for (i, c) in mesh.cells.iter().enumerate() {
        for j in 0..mesh.num_cells() {
            if j <= i {
                continue;
            }
            let other = &mesh.cells[j];
            let shared: Vec<usize> = c
                .node_ids
                .iter()
                .copied()
                .filter(|n| other.node_ids.contains(n))
                .collect();
            if shared.len() == 3 {
                let mut key = [shared[0], shared[1], shared[2]];
                key.sort();
                tri_cells.entry(key).or_default().extend([i, j]);
            }
        }
    }
    let interior: Vec<_> = mesh.faces.iter().filter(|f| !f.is_boundary()).collect();
    assert_eq!(interior.len(), tri_cells.len());
    for f in interior {
        let mut key = f.node_ids;
        key.sort();
        let cells = &tri_cells[&key];
        let (l, r) = (f.left_cell, f.right_cell.unwrap());
        assert_eq!(cells, &vec![l, r]);
        assert!(mesh.cells[l].face_ids.contains(&f.id));
        assert!(mesh.cells[r].face_ids.contains(&f.id));
    }
}

#[test]
fn node_adjacency_covers_each_cell_four_times() {
    let mesh = cube(3);
    let mut count = vec![0; mesh.num_cells()];
    for cells in &mesh.node_to_cells {
        for &c in cells {
            count[c] += 1;
        }
    }
    assert!(count.iter().all(|&c| c == 4));
    for f in &mesh.faces {
        let owners = mesh
            .cells
            .iter()
            .filter(|c| c.face_ids.contains(&f.id))
            .count();
        assert_eq!(owners, if f.is_boundary() { 1 } else { 2 });
    }
}

#[test]
fn connectivity_rebuild_is_idempotent() {
    let mut mesh = cube(3);
    let before = (mesh.faces.clone(), mesh.cell_to_cells_by_node.clone());
    mesh::build_connectivity(&mut mesh).unwrap();
    mesh::compute_geometry(&mut mesh).unwrap();
    mesh::build_diamonds(&mut mesh).unwrap();
    assert_eq!(mesh.faces, before.0);
    assert_eq!(mesh.cell_to_cells_by_node, before.1);
}

#[test]
fn diamond_linear_exactness() {
    let mesh = cube(4);
    let f = |p: [f64; 3]| 0.5 + 2.0 * p[0] - 3.0 * p[1] + 0.25 * p[2];
    for d in &mesh.diamonds {
        let ua = f(mesh.nodes[d.node_a].position);
        let ub = f(mesh.nodes[d.node_b].position);
        let uc = f(mesh.nodes[d.node_c].position);
        let g = d.gradient(ua, ub, uc, f(d.point_l), f(d.point_r));
        for (gk, ek) in g.iter().zip([2.0, -3.0, 0.25]) {
            assert!((gk - ek).abs() < 1e-10, "face {}: {g:?}", d.face_id);
        }
        let g0 = d.gradient(1.0, 1.0, 1.0, 1.0, 1.0);
        assert_eq!(g0, [0.0; 3]);
    }
}

#[test]
fn diamond_volume_is_sum_of_sub_tetrahedra() {
    let mesh = two_tets();
    let face = mesh.faces.iter().find(|f| !f.is_boundary()).unwrap();
    let d = &mesh.diamonds[face.id];
    let [a, b, c] = face.node_ids.map(|n| mesh.nodes[n].position);
    // hand geometry: |det|/6 of the two sub-tetrahedra
    let vol = |p: [f64; 3]| {
        let m = [vec3::sub(b, a), vec3::sub(c, a), vec3::sub(p, a)];
        let det = m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1])
            - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
            + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0]);
        det.abs() / 6.0
    };
    let l = mesh.cells[face.left_cell].centroid;
    let r = mesh.cells[face.right_cell.unwrap()].centroid;
    assert!((d.volume - (vol(l) + vol(r))).abs() < 1e-15);
}

#[test]
fn diamond_surface_is_closed() {
    // the six triangles of the bipyramid have outward area vectors summing to 0
    let mesh = cube(3);
    for d in &mesh.diamonds {
        let [a, b, c] = [d.node_a, d.node_b, d.node_c].map(|n| mesh.nodes[n].position);
        let (l, r) = (d.point_l, d.point_r);
        let tris = [
            vec3::triangle_area_vector(a, c, l),
            vec3::triangle_area_vector(c, b, l),
            vec3::triangle_area_vector(b, a, l),
            vec3::triangle_area_vector(a, b, r),
            vec3::triangle_area_vector(b, c, r),
            vec3::triangle_area_vector(c, a, r),
        ];
        let sum = tris.iter().fold([0.0; 3], |s, t| vec3::add(s, *t));
        let scale: f64 = tris.iter().map(|t| vec3::norm(*t)).sum();
        assert!(vec3::norm(sum) <= 1e-10 * scale);
        // the two quadrilateral vectors equal the half diagonal cross products
        let brdl = vec3::scale(vec3::cross(vec3::sub(b, c), vec3::sub(r, l)), 0.5);
        let alcr = vec3::scale(vec3::cross(vec3::sub(r, l), vec3::sub(a, c)), 0.5);
        assert!(vec3::dist(brdl, d.normal_brdl) <= 1e-12 * scale);
        assert!(vec3::dist(alcr, d.normal_alcr) <= 1e-12 * scale);
    }
}

#[test]
fn normals_flip_with_roles() {
    let mesh = cube(3);
    for f in mesh.faces.iter().filter(|f| !f.is_boundary()) {
        let l = mesh.cells[f.left_cell].centroid;
        let r = mesh.cells[f.right_cell.unwrap()].centroid;
        assert!(vec3::dot(f.normal, vec3::sub(r, l)) > 0.0);
        assert!(vec3::dot(vec3::scale(f.normal, -1.0), vec3::sub(l, r)) > 0.0);
    }
}

#[test]
fn ghost_points_mirror_across_face() {
    let mesh = BoxMeshBuilder::unit_cube(2).build().unwrap();
    for f in mesh.faces.iter().filter(|f| f.is_boundary()) {
        let g = f.ghost.unwrap();
        let l = mesh.cells[f.left_cell].centroid;
        let mid = vec3::scale(vec3::add(l, g.center), 0.5);
        assert!(vec3::dist(mid, g.foot) < 1e-15);
        assert!(vec3::dot(vec3::sub(g.foot, f.midpoint), f.normal).abs() < 1e-15);
    }
}
