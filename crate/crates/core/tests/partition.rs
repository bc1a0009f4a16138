#![allow(clippy::needless_range_loop)]

mod common;

use common::{cube, two_tets};
use fvdom::partition::{
    build_local_domains, decompose, partition_mesh, partition_stats, PartitionError,
    PartitionMap, SlotKind,
};
use std::collections::BTreeSet;

#[test]
fn single_partition_owns_everything() {
    let mesh = cube(3);
    let map = partition_mesh(&mesh, 1).unwrap();
    assert!(map.cell_owner.iter().all(|&o| o == 0));
    let d = build_local_domains(&mesh, &map).unwrap();
    assert_eq!(d[0].n_inner, mesh.num_cells());
    assert_eq!(d[0].n_halo, 0);
    assert_eq!(d[0].n_haloghost, 0);
    assert!(d[0].plan.is_empty());
    let stats = partition_stats(&d);
    assert_eq!(stats.rows[0].inner, mesh.num_cells());
    assert_eq!((stats.rows[0].halo, stats.rows[0].neighbors), (0, 0));
}

#[test]
fn two_tets_split_in_two() {
    let mesh = two_tets();
    let map = partition_mesh(&mesh, 2).unwrap();
    assert_eq!(map.part_sizes(), vec![1, 1]);
    let d = build_local_domains(&mesh, &map).unwrap();
    for p in 0..2 {
        assert_eq!(d[p].plan.neighbors, vec![1 - p]);
        assert_eq!(d[p].plan.send_cells, vec![vec![0]]);
        assert_eq!(d[p].plan.recv_cells, vec![vec![1]]);
    }
}

#[test]
fn too_many_parts_is_an_error() {
    let mesh = two_tets();
    assert!(matches!(
        partition_mesh(&mesh, 3),
        Err(PartitionError::TooManyParts { parts: 3, cells: 2 })
    ));
    assert!(matches!(partition_mesh(&mesh, 0), Err(PartitionError::NoParts)));
}

#[test]
fn cube_four_parts_balanced() {
    let mesh = cube(10);
    let map = partition_mesh(&mesh, 4).unwrap();
    map.validate(mesh.num_cells()).unwrap();
    assert!(map.imbalance() <= 1.10, "imbalance {}", map.imbalance());
    for k in [2, 3, 8] {
        let m = partition_mesh(&mesh, k).unwrap();
        assert!(m.imbalance() <= 1.10, "k={k}: {}", m.imbalance());
    }
}

#[test]
fn partitioning_is_deterministic() {
    let mesh = cube(6);
    let a = partition_mesh(&mesh, 4).unwrap();
    let b = partition_mesh(&mesh, 4).unwrap();
    assert_eq!(a, b);
    let da = build_local_domains(&mesh, &a).unwrap();
    let db = build_local_domains(&mesh, &b).unwrap();
    for (x, y) in da.iter().zip(&db) {
        assert_eq!(x.cell_global, y.cell_global);
        assert_eq!(x.ghost_face, y.ghost_face);
        assert_eq!(x.plan, y.plan);
        assert_eq!(x.node_stencil, y.node_stencil);
    }
}

#[test]
fn halo_matches_brute_force_node_scan() {
    let mesh = cube(6);
    let map = partition_mesh(&mesh, 4).unwrap();
    let domains = build_local_domains(&mesh, &map).unwrap();
    for d in &domains {
        let p = d.part;
        // brute force: every foreign cell sharing a node with any inner cell
        let mut halo = BTreeSet::new();
        for c in 0..mesh.num_cells() {
            if map.cell_owner[c] == p {
                continue;
            }
            let touches = (0..mesh.num_cells()).any(|i| {
                map.cell_owner[i] == p
                    && mesh.cells[i]
                        .node_ids
                        .iter()
                        .any(|n| mesh.cells[c].node_ids.contains(n))
            });
            if touches {
                halo.insert(c);
            }
        }
        let got: BTreeSet<usize> = d.cell_global[d.n_inner..].iter().copied().collect();
        assert_eq!(got, halo, "partition {p}");
        // haloghosts: boundary faces of halo cells touching an inner node
        let inner_nodes: BTreeSet<usize> = (0..mesh.num_cells())
            .filter(|&i| map.cell_owner[i] == p)
            .flat_map(|i| mesh.cells[i].node_ids)
            .collect();
        let hg: BTreeSet<usize> = mesh
            .faces
            .iter()
            .filter(|f| f.is_boundary() && halo.contains(&f.left_cell))
            .filter(|f| f.node_ids.iter().any(|n| inner_nodes.contains(n)))
            .map(|f| f.id)
            .collect();
        let got: BTreeSet<usize> = d.ghost_face[d.n_ghost..].iter().copied().collect();
        assert_eq!(got, hg, "partition {p}");
    }
}

#[test]
fn ownership_is_a_partition() {
    let mesh = cube(5);
    let domains = decompose(&mesh, 4).unwrap();
    let mut seen = vec![0; mesh.num_cells()];
    for d in &domains {
        for &g in &d.cell_global[..d.n_inner] {
            seen[g] += 1;
        }
        let inner: BTreeSet<_> = d.cell_global[..d.n_inner].iter().collect();
        assert!(d.cell_global[d.n_inner..].iter().all(|g| !inner.contains(g)));
        for s in d.n_inner..d.num_cell_slots() {
            assert!(d.plan.neighbors.contains(&d.cell_owner[s]));
        }
    }
    assert!(seen.iter().all(|&s| s == 1));
}

#[test]
fn plans_match_pairwise() {
    let mesh = cube(6);
    let domains = decompose(&mesh, 4).unwrap();
    for p in &domains {
        assert!(!p.plan.neighbors.is_empty());
        for (i, &q) in p.plan.neighbors.iter().enumerate() {
            let other = &domains[q];
            let j = other.plan.neighbor_index(p.part).unwrap();
            let sent: Vec<usize> = p.plan.send_cells[i].iter().map(|&s| p.cell_global[s]).collect();
            let recv: Vec<usize> = other.plan.recv_cells[j]
                .iter()
                .map(|&s| other.cell_global[s])
                .collect();
            assert_eq!(sent, recv);
            let sent: Vec<usize> = p.plan.send_ghosts[i]
                .iter()
                .map(|&s| p.ghost_face[p.ghost_index(s)])
                .collect();
            let recv: Vec<usize> = other.plan.recv_ghosts[j]
                .iter()
                .map(|&s| other.ghost_face[other.ghost_index(s)])
                .collect();
            assert_eq!(sent, recv);
        }
    }
}

#[test]
fn node_stencils_see_all_four_classes() {
    let mesh = cube(6);
    let domains = decompose(&mesh, 4).unwrap();
    let mut found = false;
    for d in &domains {
        for n in 0..d.num_nodes() {
            let kinds: BTreeSet<_> = d
                .node_stencil
                .row(n)
                .iter()
                .map(|&s| format!("{:?}", d.slot_kind(s)))
                .collect();
            if kinds.len() == 4 {
                found = true;
            }
        }
    }
    assert!(found, "no node with inner, halo, ghost and haloghost neighbours");
    let _ = SlotKind::Inner;
}

#[test]
fn stats_neighbours_and_inner_trend() {
    let mesh = cube(8);
    let mut last = f64::INFINITY;
    for k in [1, 2, 4, 8] {
        let domains = decompose(&mesh, k).unwrap();
        let stats = partition_stats(&domains);
        if k > 1 {
            assert!(stats.rows.iter().all(|r| r.neighbors >= 1));
        }
        let mean = stats.rows.iter().map(|r| r.inner as f64).sum::<f64>() / k as f64;
        assert!(mean < last);
        last = mean;
        let mut csv = Vec::new();
        stats.write_csv(&mut csv).unwrap();
        let text = String::from_utf8(csv).unwrap();
        assert!(text.starts_with("Partition,Inner,Halo,Neigh.,Max\n"));
        assert_eq!(text.lines().count(), k + 1);
    }
}

#[test]
fn invalid_map_rejected() {
    let mesh = two_tets();
    let map = PartitionMap {
        cell_owner: vec![0, 0],
        num_parts: 2,
    };
    assert!(matches!(
        build_local_domains(&mesh, &map),
        Err(PartitionError::EmptyPart(1))
    ));
}
