#![allow(clippy::needless_range_loop)]

mod common;

use fvdom::exchange::{
    allreduce_sum, exchange_halo, exchange_haloghost, run_workers, InProcessTransport,
};
use fvdom::fv::{
    barth_jespersen, cell_gradient, combine, convective_flux, copy_ghosts, face_gradient,
    fill_ghosts, node_interpolate, rk3_step, BoundaryCondition, BoundaryConditions,
    BoundaryValue, CellField, ConvectionDiffusion, Diffusivity, FvError, GradStencilCoeffs,
    NodeLSWeights, RK3_ALPHA,
};
use fvdom::mesh::Mesh;
use fvdom::partition::{decompose, LocalDomain};
use fvdom::vec3::{self, Vec3};
use nalgebra::{DMatrix, DVector};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::collections::BTreeSet;
use std::sync::Arc;

type Field = Arc<dyn Fn(Vec3) -> f64 + Send + Sync>;

fn dirichlet_everywhere(d: &LocalDomain, f: Field) -> BoundaryConditions {
    BoundaryConditions::uniform(
        &d.patch_names,
        BoundaryCondition::Dirichlet(BoundaryValue::Function(f)),
    )
}

fn walls(d: &LocalDomain) -> BoundaryConditions {
    BoundaryConditions::uniform(&d.patch_names, BoundaryCondition::Wall)
}

/// Exchanged field with ghosts set from `bcs`.
fn prepared(
    d: &LocalDomain,
    t: &mut InProcessTransport,
    bcs: &BoundaryConditions,
    f: &(dyn Fn(Vec3) -> f64 + Sync),
) -> CellField {
    let mut u = CellField::from_fn(d, f);
    exchange_halo(d, t, &mut [&mut u]).unwrap();
    fill_ghosts(d, bcs, &mut u);
    u
}

fn linear(x: Vec3) -> f64 {
    2.0 * x[0] + 3.0 * x[1] - x[2] + 0.5
}

const LINEAR_GRAD: Vec3 = [2.0, 3.0, -1.0];

fn assert_vec_close(a: Vec3, b: Vec3, tol: f64, what: &str) {
    for k in 0..3 {
        assert!((a[k] - b[k]).abs() <= tol, "{what}: {a:?} vs {b:?}");
    }
}

#[test]
fn linear_fields_are_reproduced_at_every_partition_count() {
    for mesh in [common::cube(4), common::two_tets()] {
        for k in [1, 2, 4, 8] {
            if k > mesh.num_cells() {
                continue;
            }
            let domains = decompose(&mesh, k).unwrap();
            run_workers(&domains, |d, t| {
                let bcs = dirichlet_everywhere(d, Arc::new(linear));
                let u = prepared(d, t, &bcs, &linear);
                let coeffs = GradStencilCoeffs::build(d)?;
                let g = cell_gradient(d, &u, &coeffs);
                for i in 0..d.n_inner {
                    assert_vec_close(g.vec3(i), LINEAR_GRAD, 1e-10, "cell gradient");
                }
                let w = NodeLSWeights::build(d)?;
                let nodes = node_interpolate(d, &u, &w);
                for (n, v) in nodes.values.iter().enumerate() {
                    assert!((v - linear(d.node_positions[n])).abs() < 1e-10);
                }
                for fg in face_gradient(d, &u, &nodes) {
                    assert_vec_close(fg, LINEAR_GRAD, 1e-10, "face gradient");
                }
                Ok::<_, FvError>(())
            })
            .unwrap();
        }
    }
}

#[test]
fn constants_give_zero_gradients_and_unit_limiter() {
    let mesh = common::cube(3);
    let domains = decompose(&mesh, 2).unwrap();
    run_workers(&domains, |d, t| {
        let bcs = BoundaryConditions::uniform(&d.patch_names, BoundaryCondition::Neumann);
        let u = prepared(d, t, &bcs, &|_| 4.25);
        let g = cell_gradient(d, &u, &GradStencilCoeffs::build(d)?);
        let w = NodeLSWeights::build(d)?;
        let nodes = node_interpolate(d, &u, &w);
        assert!(nodes.values.iter().all(|v| (v - 4.25).abs() < 1e-12));
        for i in 0..d.n_inner {
            assert_vec_close(g.vec3(i), [0.0; 3], 1e-12, "gradient");
        }
        for fg in face_gradient(d, &u, &nodes) {
            assert_vec_close(fg, [0.0; 3], 1e-11, "face gradient");
        }
        let psi = barth_jespersen(d, &u, &g);
        assert!((0..d.n_inner).all(|i| psi.get(i) == 1.0));
        Ok::<_, FvError>(())
    })
    .unwrap();
}

fn quadratic(c: [f64; 10]) -> impl Fn(Vec3) -> f64 + Send + Sync + Clone {
    move |x: Vec3| {
        c[0] + c[1] * x[0] + c[2] * x[1] + c[3] * x[2]
            + c[4] * x[0] * x[0]
            + c[5] * x[1] * x[1]
            + c[6] * x[2] * x[2]
            + c[7] * x[0] * x[1]
            + c[8] * x[1] * x[2]
            + c[9] * x[0] * x[2]
    }
}

/// Least-squares gradient solved densely from the global mesh: neighbours
/// are all cells sharing a node with the cell plus the mirror points of
/// boundary faces touching its nodes; ghost values mirror through the
/// boundary value at the face foot.
fn dense_gradient(mesh: &Mesh, cell: usize, f: &dyn Fn(Vec3) -> f64) -> Vec3 {
    let c = &mesh.cells[cell];
    let mut pts: Vec<(Vec3, f64)> = Vec::new();
    let cells: BTreeSet<usize> = c
        .node_ids
        .iter()
        .flat_map(|&n| mesh.node_to_cells[n].iter().copied())
        .filter(|&o| o != cell)
        .collect();
    for o in cells {
        let x = mesh.cells[o].centroid;
        pts.push((x, f(x)));
    }
    let faces: BTreeSet<usize> = c
        .node_ids
        .iter()
        .flat_map(|&n| mesh.node_to_boundary_faces[n].iter().copied())
        .collect();
    for fid in faces {
        let face = &mesh.faces[fid];
        let l = mesh.cells[face.left_cell].centroid;
        let n = face.normal;
        let h = vec3::dot(vec3::sub(face.midpoint, l), n);
        let foot = vec3::add(l, vec3::scale(n, h));
        let ghost = vec3::sub(vec3::scale(foot, 2.0), l);
        pts.push((ghost, 2.0 * f(foot) - f(l)));
    }
    let xi = c.centroid;
    let ui = f(xi);
    // normal equations M g = J, solved densely
    let mut m = DMatrix::<f64>::zeros(3, 3);
    let mut j = DVector::<f64>::zeros(3);
    for (x, v) in &pts {
        let d = DVector::from_column_slice(&vec3::sub(*x, xi));
        let w = 1.0 / d.norm();
        m += w * &d * d.transpose();
        j += w * (v - ui) * &d;
    }
    let sol = m.lu().solve(&j).unwrap();
    [sol[0], sol[1], sol[2]]
}

#[test]
fn gradient_of_random_quadratic_matches_dense_least_squares() {
    let mesh = common::cube(3);
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let coef: [f64; 10] = std::array::from_fn(|_| rng.gen_range(-1.0..1.0));
    let f = quadratic(coef);
    let domains = decompose(&mesh, 4).unwrap();
    let per = run_workers(&domains, |d, t| {
        let bcs = dirichlet_everywhere(d, Arc::new(f.clone()));
        let u = prepared(d, t, &bcs, &f);
        let g = cell_gradient(d, &u, &GradStencilCoeffs::build(d)?);
        Ok::<_, FvError>(g.inner(d).to_vec())
    })
    .unwrap();
    let global = common::to_global(&domains, &per, 3);
    for c in 0..mesh.num_cells() {
        let oracle = dense_gradient(&mesh, c, &f);
        let got = [global[3 * c], global[3 * c + 1], global[3 * c + 2]];
        assert_vec_close(got, oracle, 1e-12, &format!("cell {c}"));
    }
}

#[test]
fn two_tet_face_gradient_matches_hand_evaluation() {
    let mesh = common::two_tets();
    let domains = decompose(&mesh, 1).unwrap();
    let d = &domains[0];
    let interior = d.faces.iter().find(|f| !f.is_boundary()).unwrap();
    let mut u = CellField::scalar(d);
    u.set(interior.left, 1.5);
    u.set(interior.right, -0.25);
    let mut nodes = fvdom::fv::NodeField::zeros(d);
    let hand_values = [0.3, -1.1, 2.0];
    for (k, &n) in interior.nodes.iter().enumerate() {
        nodes.values[n] = hand_values[k];
    }
    // Hand evaluation from raw coordinates.
    let [a, b, c] = interior.nodes.map(|n| d.node_positions[n]);
    let l = d.centers[interior.left];
    let r = d.centers[interior.right];
    let tri = |p: Vec3, q: Vec3, s: Vec3| vec3::scale(vec3::cross(vec3::sub(q, p), vec3::sub(s, p)), 0.5);
    let s = tri(a, b, c);
    let s_brdl = vec3::add(tri(b, r, c), tri(b, c, l));
    let s_alcr = vec3::add(tri(a, l, c), tri(a, c, r));
    let vol = vec3::dot(s, vec3::sub(r, l)) / 3.0;
    let (ua, ub, uc) = (0.3, -1.1, 2.0);
    let mut expect = [0.0; 3];
    for k in 0..3 {
        expect[k] = ((ua - uc) * s_brdl[k] + (ub - uc) * s_alcr[k] + (-0.25 - 1.5) * s[k])
            / (3.0 * vol);
    }
    let fi = d.faces.iter().position(|f| !f.is_boundary()).unwrap();
    let got = face_gradient(d, &u, &nodes)[fi];
    assert_vec_close(got, expect, 1e-13, "diamond");
}

#[test]
fn node_weights_sum_to_one() {
    let mesh = common::cube(4);
    for d in decompose(&mesh, 3).unwrap() {
        let w = NodeLSWeights::build(&d).unwrap();
        for n in 0..d.num_nodes() {
            let s: f64 = d.node_stencil.range(n).map(|k| w.alpha[k]).sum();
            assert!((s - 1.0).abs() < 1e-12, "node {n}: {s}");
        }
    }
}

#[test]
fn fill_ghosts_agrees_with_haloghost_exchange() {
    let mesh = common::cube(4);
    let domains = decompose(&mesh, 4).unwrap();
    run_workers(&domains, |d, t| {
        let bcs = BoundaryConditions::uniform(&d.patch_names, BoundaryCondition::Neumann)
            .with("in", BoundaryCondition::dirichlet(10.0))?
            .with("upper", BoundaryCondition::Dirichlet(BoundaryValue::function(|x| x[0] * x[1])))?;
        let u = prepared(d, t, &bcs, &|x| (3.0 * x[0]).sin() + x[2]);
        let mut exchanged = u.clone();
        exchange_haloghost(d, t, &mut [&mut exchanged])?;
        assert_eq!(u, exchanged);
        Ok::<_, FvError>(())
    })
    .unwrap();
}

fn random_field(seed: u64) -> impl Fn(Vec3) -> f64 + Sync {
    move |x: Vec3| {
        let h = (x[0] * 12.9898 + x[1] * 78.233 + x[2] * 37.719 + seed as f64).sin() * 43758.5453;
        h - h.floor()
    }
}

#[test]
fn strict_local_maximum_is_fully_limited() {
    let mesh = common::cube(3);
    let domains = decompose(&mesh, 1).unwrap();
    let d = &domains[0];
    let bcs = BoundaryConditions::uniform(&d.patch_names, BoundaryCondition::Neumann);
    let peak = d.cell_stencil.row(0).len(); // any interior-ish cell works
    let target = (0..d.n_inner)
        .find(|&i| d.cell_faces[i].iter().all(|&f| !d.faces[f].is_boundary()))
        .unwrap_or(peak.min(d.n_inner - 1));
    let mut u = CellField::scalar(d);
    u.set(target, 1.0);
    fill_ghosts(d, &bcs, &mut u);
    let mut grad = CellField::zeros(d, 3);
    grad.set_vec3(target, [0.3, -0.2, 0.7]);
    let psi = barth_jespersen(d, &u, &grad);
    assert_eq!(psi.get(target), 0.0);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]
    #[test]
    fn limited_reconstruction_stays_within_neighbour_bounds(seed in 0u64..1000) {
        let mesh = common::cube(3);
        let domains = decompose(&mesh, 2).unwrap();
        let f = random_field(seed);
        run_workers(&domains, |d, t| {
            let bcs = BoundaryConditions::uniform(&d.patch_names, BoundaryCondition::Neumann);
            let u = prepared(d, t, &bcs, &f);
            let g = cell_gradient(d, &u, &GradStencilCoeffs::build(d)?);
            let psi = barth_jespersen(d, &u, &g);
            for i in 0..d.n_inner {
                let p = psi.get(i);
                assert!((0.0..=1.0).contains(&p));
                let nb: Vec<f64> = d.cell_faces[i].iter().map(|&f| {
                    let face = &d.faces[f];
                    u.get(if face.left == i { face.right } else { face.left })
                }).collect();
                let lo = nb.iter().copied().fold(u.get(i), f64::min);
                let hi = nb.iter().copied().fold(u.get(i), f64::max);
                for &f in &d.cell_faces[i] {
                    let r = vec3::sub(d.faces[f].midpoint, d.centers[i]);
                    let v = u.get(i) + p * vec3::dot(g.vec3(i), r);
                    assert!(v >= lo - 1e-12 && v <= hi + 1e-12);
                }
            }
            Ok::<_, FvError>(())
        }).unwrap();
    }
}

#[test]
fn zero_velocity_gives_zero_convection() {
    let mesh = common::cube(3);
    let domains = decompose(&mesh, 1).unwrap();
    let d = &domains[0];
    let bcs = BoundaryConditions::uniform(&d.patch_names, BoundaryCondition::Neumann);
    let mut u = CellField::from_fn(d, random_field(3));
    fill_ghosts(d, &bcs, &mut u);
    let vel = CellField::zeros(d, 3);
    let grad = CellField::zeros(d, 3);
    let psi = CellField::scalar(d);
    assert!(convective_flux(d, &bcs, &u, &vel, &grad, &psi).iter().all(|&x| x == 0.0));
}

fn uniform_velocity(d: &LocalDomain, v: Vec3) -> CellField {
    let mut vel = CellField::zeros(d, 3);
    for s in 0..d.num_slots() {
        vel.set_vec3(s, v);
    }
    vel
}

#[test]
fn uniform_flow_of_constant_has_zero_net_flux() {
    let mesh = common::cube(3);
    let domains = decompose(&mesh, 1).unwrap();
    let d = &domains[0];
    let bcs = BoundaryConditions::uniform(&d.patch_names, BoundaryCondition::Neumann);
    let mut u = CellField::from_fn(d, |_| 2.5);
    fill_ghosts(d, &bcs, &mut u);
    let vel = uniform_velocity(d, [1.0, 0.0, 0.0]);
    let grad = CellField::zeros(d, 3);
    let psi = CellField::scalar(d);
    for v in convective_flux(d, &bcs, &u, &vel, &grad, &psi) {
        assert!(v.abs() < 1e-13);
    }
}

#[test]
fn unlimited_reconstruction_of_linear_field_is_exact_at_midpoints() {
    let mesh = common::cube(3);
    let domains = decompose(&mesh, 2).unwrap();
    let v = [0.7, -0.4, 0.2];
    run_workers(&domains, |d, t| {
        let bcs = dirichlet_everywhere(d, Arc::new(linear));
        let u = prepared(d, t, &bcs, &linear);
        let mut g = cell_gradient(d, &u, &GradStencilCoeffs::build(d)?);
        exchange_halo(d, t, &mut [&mut g])?;
        let mut psi = CellField::scalar(d);
        psi.values_mut().fill(1.0);
        let vel = uniform_velocity(d, v);
        let got = convective_flux(d, &bcs, &u, &vel, &g, &psi);
        for i in 0..d.n_inner {
            let mut expect = 0.0;
            for &f in &d.cell_faces[i] {
                let face = &d.faces[f];
                let sign = if face.left == i { 1.0 } else { -1.0 };
                let vn = vec3::dot(v, face.normal) * face.area;
                expect += sign * linear(face.midpoint) * vn;
            }
            assert!((got[i] - expect).abs() < 1e-10, "{} vs {expect}", got[i]);
        }
        Ok::<_, FvError>(())
    })
    .unwrap();
}

/// Volume-weighted mean of the discrete Laplacian of `x^2` over cells away
/// from the boundary. Cell by cell the value scatters around 2 on a jittered
/// mesh; the mean converges.
fn interior_laplacian_mean(n: usize, jitter: f64) -> f64 {
    let mesh = fvdom::mesh::BoxMeshBuilder::unit_cube(n).jitter(jitter, 7).build().unwrap();
    let domains = decompose(&mesh, 1).unwrap();
    let d = &domains[0];
    let f: Field = Arc::new(|x: Vec3| x[0] * x[0]);
    let bcs = dirichlet_everywhere(d, f.clone());
    let mut op = ConvectionDiffusion::new(d, bcs).unwrap();
    let mut t = InProcessTransport::group(1).pop().unwrap();
    let mut u = CellField::from_fn(d, |x| f(x));
    let vel = CellField::zeros(d, 3);
    let r = op.residual(d, &mut t, &mut u, &vel, Diffusivity::Constant(1.0), None).unwrap();
    let (mut sum, mut vol) = (0.0, 0.0);
    for i in 0..d.n_inner {
        if d.centers[i].iter().all(|&c| (0.25..0.75).contains(&c)) {
            sum += r[i] * d.volumes[i];
            vol += d.volumes[i];
        }
    }
    sum / vol
}

#[test]
fn discrete_laplacian_of_x_squared_is_close_to_two() {
    for n in [4, 8, 12] {
        let mean = interior_laplacian_mean(n, 0.3);
        assert!((mean - 2.0).abs() < 0.2, "n={n}: {mean}");
    }
    // on the regular split the interior errors cancel exactly
    let mean = interior_laplacian_mean(6, 0.0);
    assert!((mean - 2.0).abs() < 1e-9, "{mean}");
}

#[test]
fn residual_special_cases() {
    let mesh = common::cube(3);
    let domains = decompose(&mesh, 2).unwrap();
    run_workers(&domains, |d, t| {
        // no transport: source only
        let bcs = BoundaryConditions::uniform(&d.patch_names, BoundaryCondition::Neumann);
        let mut op = ConvectionDiffusion::new(d, bcs)?;
        let mut u = prepared(d, t, &op.bcs.clone(), &random_field(5));
        let vel = CellField::zeros(d, 3);
        let s = vec![3.5; d.n_inner];
        let r = op.residual(d, t, &mut u, &vel, Diffusivity::Constant(0.0), Some(&s))?;
        assert!(r.iter().all(|&x| x == 3.5));
        // steady linear field under pure diffusion
        let mut op = ConvectionDiffusion::new(d, dirichlet_everywhere(d, Arc::new(linear)))?;
        let mut u = prepared(d, t, &op.bcs.clone(), &linear);
        let r = op.residual(d, t, &mut u, &vel, Diffusivity::Constant(1.0), None)?;
        assert!(r.iter().all(|x| x.abs() < 1e-10), "{r:?}");
        // negative diffusivity
        let err = op.residual(d, t, &mut u, &vel, Diffusivity::Constant(-1.0), None);
        assert!(matches!(err, Err(FvError::NegativeDiffusivity { .. })));
        Ok::<_, FvError>(())
    })
    .unwrap();
}

fn residual_everywhere(mesh: &Mesh, k: usize) -> Vec<f64> {
    let domains = decompose(mesh, k).unwrap();
    let per = run_workers(&domains, |d, t| {
        let bcs = BoundaryConditions::uniform(&d.patch_names, BoundaryCondition::Neumann)
            .with("in", BoundaryCondition::dirichlet(1.0))?
            .with("out", BoundaryCondition::dirichlet(0.0))?;
        let mut op = ConvectionDiffusion::new(d, bcs)?;
        let mut u = CellField::from_fn(d, random_field(9));
        exchange_halo(d, t, &mut [&mut u])?;
        let mut vel = CellField::zeros(d, 3);
        let mut dcoef = CellField::scalar(d);
        for s in 0..d.n_inner {
            let x = d.centers[s];
            vel.set_vec3(s, [1.0 + x[1], -x[0], 0.5 * x[2]]);
            dcoef.set(s, 0.1 + x[0] * x[2]);
        }
        exchange_halo(d, t, &mut [&mut vel, &mut dcoef])?;
        copy_ghosts(d, &mut dcoef);
        let src: Vec<f64> = (0..d.n_inner).map(|s| d.centers[s][1]).collect();
        op.residual(d, t, &mut u, &vel, Diffusivity::PerCell(&dcoef), Some(&src))
    })
    .unwrap();
    common::to_global(&domains, &per, 1)
}

#[test]
fn residual_is_partition_invariant() {
    let mesh = common::cube(4);
    let serial = residual_everywhere(&mesh, 1);
    assert!(serial.iter().all(|x| x.is_finite()));
    for k in [2, 4, 8] {
        let par = residual_everywhere(&mesh, k);
        for (a, b) in serial.iter().zip(&par) {
            assert!((a - b).abs() <= 1e-12, "K={k}: {a} vs {b}");
        }
    }
}

#[test]
fn closed_domain_conserves_total_content() {
    let mesh = common::cube(4);
    let domains = decompose(&mesh, 3).unwrap();
    let totals = run_workers(&domains, |d, t| {
        let mut op = ConvectionDiffusion::new(d, walls(d))?;
        let mut u = CellField::from_fn(d, random_field(21));
        exchange_halo(d, t, &mut [&mut u])?;
        let mut vel = CellField::zeros(d, 3);
        for s in 0..d.n_inner {
            let x = d.centers[s];
            vel.set_vec3(s, [x[1] - 0.5, 0.5 - x[0], x[2]]);
        }
        exchange_halo(d, t, &mut [&mut vel])?;
        let r = op.residual(d, t, &mut u, &vel, Diffusivity::Constant(0.3), None)?;
        let local: f64 = (0..d.n_inner).map(|i| d.volumes[i] * r[i]).sum();
        let norm: f64 = (0..d.n_inner).map(|i| u.get(i).powi(2)).sum();
        Ok::<_, FvError>(allreduce_sum(t, &[local, norm])?)
    })
    .unwrap();
    let [flux, norm2] = [totals[0][0], totals[0][1]];
    assert!(flux.abs() <= 1e-10 * norm2.sqrt(), "net {flux}");
}

#[test]
fn rk3_uses_half_half_full_stages() {
    assert_eq!(RK3_ALPHA, [0.5, 0.5, 1.0]);
}

fn uniform_rk3(d: &LocalDomain, u0: [f64; 2], m: [[f64; 2]; 2], dt: f64) -> [f64; 2] {
    let mut t = InProcessTransport::group(1).pop().unwrap();
    let mut u = CellField::zeros(d, 2);
    for s in 0..d.n_inner {
        u.slot_mut(s).copy_from_slice(&u0);
    }
    rk3_step::<_, _, FvError>(d, &mut t, &mut u, dt, |_, v| {
        Ok((0..d.n_inner)
            .flat_map(|s| {
                let x = v.slot(s);
                [m[0][0] * x[0] + m[0][1] * x[1], m[1][0] * x[0] + m[1][1] * x[1]]
            })
            .collect())
    })
    .unwrap();
    [u.slot(0)[0], u.slot(0)[1]]
}

#[test]
fn rk3_amplification_factor() {
    let mesh = common::cube(2);
    let domains = decompose(&mesh, 1).unwrap();
    let d = &domains[0];
    let poly = |zr: f64, zi: f64| {
        // 1 + z + z^2/2 + z^3/4 in complex arithmetic
        let (z2r, z2i) = (zr * zr - zi * zi, 2.0 * zr * zi);
        let (z3r, z3i) = (z2r * zr - z2i * zi, z2r * zi + z2i * zr);
        (1.0 + zr + z2r / 2.0 + z3r / 4.0, zi + z2i / 2.0 + z3i / 4.0)
    };
    // real z through a decoupled system
    let (lam, dt) = (-2.0, 0.05);
    let out = uniform_rk3(d, [1.0, 0.0], [[lam, 0.0], [0.0, lam]], dt);
    assert!((out[0] - poly(lam * dt, 0.0).0).abs() < 1e-12);
    // complex z through a rotation system acting on (re, im)
    let (a, b, dt) = (-5.0, 2.0, 0.1);
    let out = uniform_rk3(d, [1.0, 0.0], [[a, -b], [b, a]], dt);
    let (gr, gi) = poly(a * dt, b * dt);
    assert!((out[0] - gr).abs() < 1e-12 && (out[1] - gi).abs() < 1e-12);
}

#[test]
fn rk3_zero_rhs_and_nan_detection() {
    let mesh = common::cube(2);
    let domains = decompose(&mesh, 1).unwrap();
    let d = &domains[0];
    let mut t = InProcessTransport::group(1).pop().unwrap();
    let mut u = CellField::from_fn(d, linear);
    let before = u.inner(d).to_vec();
    rk3_step::<_, _, FvError>(d, &mut t, &mut u, 0.1, |_, _| Ok(vec![0.0; d.n_inner])).unwrap();
    assert_eq!(u.inner(d), &before[..]);
    let mut calls = 0;
    let err = rk3_step::<_, _, FvError>(d, &mut t, &mut u, 0.1, |_, _| {
        calls += 1;
        Ok(vec![if calls == 2 { f64::NAN } else { 0.0 }; d.n_inner])
    })
    .unwrap_err();
    assert!(matches!(err, FvError::NonFinite { stage: 2, .. }), "{err}");
    assert!(rk3_step::<_, _, FvError>(d, &mut t, &mut u, 0.0, |_, _| Ok(vec![])).is_err());
}

#[test]
fn residual_parts_combine_with_volumes() {
    let mesh = common::cube(2);
    let domains = decompose(&mesh, 1).unwrap();
    let d = &domains[0];
    let mut t = InProcessTransport::group(1).pop().unwrap();
    let mut op = ConvectionDiffusion::new(d, walls(d)).unwrap();
    let mut u = CellField::from_fn(d, random_field(1));
    let vel = uniform_velocity(d, [0.2, 0.1, 0.0]);
    let parts = op.evaluate(d, &mut t, &mut u, &vel, Diffusivity::Constant(0.5)).unwrap();
    let r = combine(d, &parts, None);
    for i in 0..d.n_inner {
        let e = (-parts.convective[i] + parts.diffusive[i]) / d.volumes[i];
        assert!((r[i] - e).abs() <= 1e-12 * e.abs().max(1.0));
    }
}
