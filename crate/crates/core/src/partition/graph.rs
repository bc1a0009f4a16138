//! Greedy graph-growing partitioner over the face-adjacency graph.
//!
//! Seeds are picked by farthest-point sampling on cell centroids, regions grow
//! breadth-first with the least-filled region extended first, leftovers join
//! the smallest adjacent region, and a final pass moves boundary cells to
//! restore balance and shorten the cut.

use super::{PartitionError, PartitionMap};
use crate::mesh::Mesh;
use crate::vec3;
use std::collections::VecDeque;

fn face_graph(mesh: &Mesh) -> Vec<Vec<usize>> {
    let mut adj = vec![Vec::with_capacity(4); mesh.num_cells()];
    for f in &mesh.faces {
        if let Some(r) = f.right_cell {
            adj[f.left_cell].push(r);
            adj[r].push(f.left_cell);
        }
    }
    for a in adj.iter_mut() {
        a.sort_unstable();
    }
    adj
}

fn farthest_point_seeds(mesh: &Mesh, k: usize) -> Vec<usize> {
    let n = mesh.num_cells();
    let c: Vec<_> = mesh.cells.iter().map(|c| c.centroid).collect();
    let center = vec3::scale(
        c.iter().fold([0.0; 3], |s, p| vec3::add(s, *p)),
        1.0 / n as f64,
    );
    let pick = |d: &[f64]| {
        // first maximum wins, keeping the choice deterministic
        let mut best = 0;
        for i in 1..d.len() {
            if d[i] > d[best] {
                best = i;
            }
        }
        best
    };
    let from_center: Vec<f64> = c.iter().map(|p| vec3::dist(*p, center)).collect();
    let mut seeds = vec![pick(&from_center)];
    let mut nearest: Vec<f64> = c.iter().map(|p| vec3::dist(*p, c[seeds[0]])).collect();
    while seeds.len() < k {
        let s = pick(&nearest);
        seeds.push(s);
        for (i, p) in c.iter().enumerate() {
            nearest[i] = nearest[i].min(vec3::dist(*p, c[s]));
        }
    }
    seeds
}

/// Splits the cells into `parts` balanced, deterministic partitions.
pub fn partition_mesh(mesh: &Mesh, parts: usize) -> Result<PartitionMap, PartitionError> {
    let n = mesh.num_cells();
    if parts == 0 {
        return Err(PartitionError::NoParts);
    }
    if parts > n {
        return Err(PartitionError::TooManyParts { parts, cells: n });
    }
    if parts == 1 {
        return Ok(PartitionMap::single(n));
    }
    const FREE: usize = usize::MAX;
    let adj = face_graph(mesh);
    let target: Vec<usize> = (0..parts)
        .map(|p| n / parts + usize::from(p < n % parts))
        .collect();
    let mut owner = vec![FREE; n];
    let mut size = vec![0usize; parts];
    let mut frontier: Vec<VecDeque<usize>> = vec![VecDeque::new(); parts];
    for (p, s) in farthest_point_seeds(mesh, parts).into_iter().enumerate() {
        owner[s] = p;
        size[p] = 1;
        frontier[p].extend(adj[s].iter().copied());
    }

    // grow the least-filled region that can still grow
    loop {
        let mut grew = false;
        let mut order: Vec<usize> = (0..parts).collect();
        order.sort_by(|&a, &b| {
            (size[a] * target[b])
                .cmp(&(size[b] * target[a]))
                .then(a.cmp(&b))
        });
        for p in order {
            if size[p] >= target[p] {
                continue;
            }
            while let Some(c) = frontier[p].pop_front() {
                if owner[c] == FREE {
                    owner[c] = p;
                    size[p] += 1;
                    frontier[p].extend(adj[c].iter().copied().filter(|&x| owner[x] == FREE));
                    grew = true;
                    break;
                }
            }
            if grew {
                break;
            }
        }
        if !grew {
            break;
        }
    }

    // leftovers: join the smallest adjacent region, sweeping until done
    let mut remaining: Vec<usize> = (0..n).filter(|&c| owner[c] == FREE).collect();
    while !remaining.is_empty() {
        let mut next = Vec::new();
        let mut progress = false;
        for &c in &remaining {
            let best = adj[c]
                .iter()
                .filter(|&&x| owner[x] != FREE)
                .map(|&x| owner[x])
                .min_by_key(|&p| (size[p], p));
            match best {
                Some(p) => {
                    owner[c] = p;
                    size[p] += 1;
                    progress = true;
                }
                None => next.push(c),
            }
        }
        if !progress {
            // disconnected piece without assigned neighbours
            let p = (0..parts).min_by_key(|&p| (size[p], p)).unwrap_or(0);
            owner[next[0]] = p;
            size[p] += 1;
            next.remove(0);
        }
        remaining = next;
    }

    refine(&adj, &mut owner, &mut size, &target);
    Ok(PartitionMap {
        cell_owner: owner,
        num_parts: parts,
    })
}

/// Boundary refinement: first move cells out of overfull regions into
/// adjacent underfull ones, then apply cut-reducing moves that keep every
/// region within one cell of its target.
fn refine(adj: &[Vec<usize>], owner: &mut [usize], size: &mut [usize], target: &[usize]) {
    let parts = size.len();
    let links = |owner: &[usize], c: usize, p: usize| adj[c].iter().filter(|&&x| owner[x] == p).count() as i64;
    for _ in 0..50 {
        let mut moved = false;
        for c in 0..owner.len() {
            let p = owner[c];
            if size[p] <= target[p] || size[p] == 1 {
                continue;
            }
            let mut best: Option<(i64, usize)> = None;
            for &x in &adj[c] {
                let q = owner[x];
                if q == p || size[q] >= target[q] {
                    continue;
                }
                let gain = links(owner, c, q) - links(owner, c, p);
                if best.is_none_or(|(g, bq)| gain > g || (gain == g && q < bq)) {
                    best = Some((gain, q));
                }
            }
            if let Some((_, q)) = best {
                owner[c] = q;
                size[p] -= 1;
                size[q] += 1;
                moved = true;
            }
        }
        if !moved {
            break;
        }
    }
    let slack = |p: usize| target[p] + 1 + target[p] / 50;
    for _ in 0..4 {
        let mut moved = false;
        for c in 0..owner.len() {
            let p = owner[c];
            if size[p] == 1 {
                continue;
            }
            let here = links(owner, c, p);
            let mut best: Option<(i64, usize)> = None;
            for &x in &adj[c] {
                let q = owner[x];
                if q == p || size[q] + 1 > slack(q) {
                    continue;
                }
                let gain = links(owner, c, q) - here;
                if gain > 0 && best.is_none_or(|(g, bq)| gain > g || (gain == g && q < bq)) {
                    best = Some((gain, q));
                }
            }
            if let Some((_, q)) = best {
                owner[c] = q;
                size[p] -= 1;
                size[q] += 1;
                moved = true;
            }
        }
        if !moved {
            break;
        }
    }
    debug_assert_eq!(size.iter().sum::<usize>(), owner.len());
    debug_assert!(size.iter().all(|&s| s > 0) || parts == 0);
}
