#![allow(dead_code)]

pub mod oracle;

use fvdom::mesh::{BoxMeshBuilder, Mesh};

pub const SINGLE_TET: &str = "$MeshFormat
2.2 0 8
$EndMeshFormat
$PhysicalNames
2
2 1 \"wall\"
3 2 \"domain\"
$EndPhysicalNames
$Nodes
4
1 0 0 0
2 1 0 0
3 0 1 0
4 0 0 1
$EndNodes
$Elements
5
1 2 2 1 1 1 2 3
2 2 2 1 1 1 2 4
3 2 2 1 1 1 3 4
4 2 2 1 1 2 3 4
5 4 2 2 2 1 2 3 4
$EndElements
";

pub const TWO_TETS: &str = "$MeshFormat
2.2 0 8
$EndMeshFormat
$PhysicalNames
2
2 1 \"in\"
2 2 \"out\"
$EndPhysicalNames
$Nodes
5
1 0 0 0
2 1 0 0
3 0 1 0
4 0 0 1
5 0.9 0.8 0.7
$EndNodes
$Elements
8
1 2 2 1 1 1 3 4
2 2 2 1 1 1 2 4
3 2 2 1 1 1 2 3
4 2 2 2 2 2 3 5
5 2 2 2 2 3 4 5
6 2 2 2 2 2 4 5
7 4 2 3 3 1 2 3 4
8 4 2 3 3 2 3 4 5
$EndElements
";

pub fn two_tets() -> Mesh {
    Mesh::read_msh(TWO_TETS.as_bytes()).expect("two-tet mesh")
}

/// Jittered unit cube with `6 n^3` cells.
pub fn cube(n: usize) -> Mesh {
    BoxMeshBuilder::unit_cube(n).jitter(0.3, 7).build().expect("cube mesh")
}

/// Scatters per-partition inner values (`stride` per cell) into one global
/// array indexed by cell id.
pub fn to_global(
    domains: &[fvdom::partition::LocalDomain],
    per_part: &[Vec<f64>],
    stride: usize,
) -> Vec<f64> {
    let total = domains[0].global_cells;
    let mut out = vec![f64::NAN; total * stride];
    for (d, vals) in domains.iter().zip(per_part) {
        assert_eq!(vals.len(), d.n_inner * stride);
        for s in 0..d.n_inner {
            let g = d.cell_global[s];
            out[g * stride..(g + 1) * stride].copy_from_slice(&vals[s * stride..(s + 1) * stride]);
        }
    }
    out
}
