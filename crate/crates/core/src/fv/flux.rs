use super::{BoundaryCondition, BoundaryConditions, CellField, FvError, NodeField};
use crate::partition::{LocalDomain, LocalFace};
use crate::vec3::{self, Vec3};

/// Face gradient of every local face from the diamond formula. Boundary faces
/// use the ghost value as the right-hand centre value.
pub fn face_gradient(domain: &LocalDomain, u: &CellField, nodes: &NodeField) -> Vec<Vec3> {
    domain
        .faces
        .iter()
        .map(|f| {
            let [a, b, c] = f.nodes;
            f.diamond.gradient(
                nodes.values[a],
                nodes.values[b],
                nodes.values[c],
                u.get(f.left),
                u.get(f.right),
            )
        })
        .collect()
}

/// Barth-Jespersen limiter of every inner cell. `u` needs current halo and
/// ghost values and `grad` current inner values.
pub fn barth_jespersen(domain: &LocalDomain, u: &CellField, grad: &CellField) -> CellField {
    let mut psi = CellField::scalar(domain);
    barth_jespersen_into(domain, u, grad, &mut psi);
    psi
}

pub fn barth_jespersen_into(
    domain: &LocalDomain,
    u: &CellField,
    grad: &CellField,
    psi: &mut CellField,
) {
    for i in 0..domain.n_inner {
        let ui = u.get(i);
        let (mut lo, mut hi) = (ui, ui);
        for &f in &domain.cell_faces[i] {
            let face = &domain.faces[f];
            let v = u.get(other_side(face, i));
            lo = lo.min(v);
            hi = hi.max(v);
        }
        let g = grad.vec3(i);
        let xi = domain.centers[i];
        let mut p = 1.0f64;
        for &f in &domain.cell_faces[i] {
            let delta = vec3::dot(g, vec3::sub(domain.faces[f].midpoint, xi));
            let limit = if delta > 0.0 {
                ((hi - ui) / delta).min(1.0)
            } else if delta < 0.0 {
                ((lo - ui) / delta).min(1.0)
            } else {
                1.0
            };
            p = p.min(limit);
        }
        psi.set(i, p.max(0.0));
    }
}

#[inline]
fn other_side(face: &LocalFace, slot: usize) -> usize {
    if face.left == slot {
        face.right
    } else {
        face.left
    }
}

/// Sums per-face fluxes into inner cells: `+flux` for the left cell, `-flux`
/// for the right one, in each cell's face order.
fn gather(domain: &LocalDomain, face_flux: &[f64]) -> Vec<f64> {
    (0..domain.n_inner)
        .map(|i| {
            domain.cell_faces[i]
                .iter()
                .map(|&f| {
                    if domain.faces[f].left == i {
                        face_flux[f]
                    } else {
                        -face_flux[f]
                    }
                })
                .sum()
        })
        .collect()
}

/// Upwind MUSCL convective flux balance `sum_faces u_ij (V_ij . n_ij) |sigma_ij|`
/// of every inner cell.
///
/// The face velocity is the mean of the adjacent cell velocities (the cell
/// velocity on boundary faces). Reconstruction extrapolates the upwind cell
/// value to the face midpoint with its limited gradient. Inflow through a
/// boundary face is not reconstructed: it takes the prescribed value at the
/// face midpoint on Dirichlet patches and the cell value on Neumann patches.
/// Wall faces carry no flux.
/// `u`, `vel`, `grad` and `psi` need current halo values, `u` current ghosts.
pub fn convective_flux(
    domain: &LocalDomain,
    bcs: &BoundaryConditions,
    u: &CellField,
    vel: &CellField,
    grad: &CellField,
    psi: &CellField,
) -> Vec<f64> {
    let reconstruct = |slot: usize, m: Vec3| {
        u.get(slot)
            + psi.get(slot) * vec3::dot(grad.vec3(slot), vec3::sub(m, domain.centers[slot]))
    };
    let face_flux: Vec<f64> = domain
        .faces
        .iter()
        .map(|f| {
            let s = vec3::scale(f.normal, f.area);
            let v = match f.patch {
                Some(p) if !bcs.get(p).carries_convection() => return 0.0,
                Some(_) => vel.vec3(f.left),
                None => vec3::scale(vec3::add(vel.vec3(f.left), vel.vec3(f.right)), 0.5),
            };
            let vn = vec3::dot(v, s);
            let uf = if vn >= 0.0 {
                reconstruct(f.left, f.midpoint)
            } else if let Some(p) = f.patch {
                match bcs.get(p) {
                    BoundaryCondition::Dirichlet(g) => g.at(f.midpoint),
                    _ => u.get(f.left),
                }
            } else {
                reconstruct(f.right, f.midpoint)
            };
            uf * vn
        })
        .collect();
    gather(domain, &face_flux)
}

/// Diffusion coefficient: one constant or one value per cell slot. A face
/// uses the mean of its two cells (the cell value on boundary faces).
#[derive(Debug, Clone, Copy)]
pub enum Diffusivity<'a> {
    Constant(f64),
    PerCell(&'a CellField),
}

impl Diffusivity<'_> {
    fn at_face(&self, f: &LocalFace) -> f64 {
        match self {
            Diffusivity::Constant(d) => *d,
            Diffusivity::PerCell(d) if f.is_boundary() => d.get(f.left),
            Diffusivity::PerCell(d) => 0.5 * (d.get(f.left) + d.get(f.right)),
        }
    }
}

/// Diffusive flux balance `sum_faces D (grad u_ij . n_ij) |sigma_ij|` of every
/// inner cell. Only Dirichlet boundary faces carry flux.
pub fn diffusive_flux(
    domain: &LocalDomain,
    bcs: &BoundaryConditions,
    face_grad: &[Vec3],
    diffusivity: Diffusivity<'_>,
) -> Result<Vec<f64>, FvError> {
    let mut face_flux = Vec::with_capacity(domain.faces.len());
    for (f, g) in domain.faces.iter().zip(face_grad) {
        if let Some(p) = f.patch {
            if !bcs.get(p).carries_diffusion() {
                face_flux.push(0.0);
                continue;
            }
        }
        let d = diffusivity.at_face(f);
        if !(d >= 0.0) {
            return Err(FvError::NegativeDiffusivity {
                face: f.global,
                value: d,
            });
        }
        face_flux.push(d * vec3::dot(*g, vec3::scale(f.normal, f.area)));
    }
    Ok(gather(domain, &face_flux))
}

/// Largest stable-looking step `cfl * min_i vol_i / sum_faces |V . n| sigma`
/// over the inner cells; infinite when nothing moves. Advisory only.
pub fn cfl_time_step(domain: &LocalDomain, vel: &CellField, cfl: f64) -> f64 {
    let mut best = f64::INFINITY;
    for i in 0..domain.n_inner {
        let out: f64 = domain.cell_faces[i]
            .iter()
            .map(|&f| {
                let face = &domain.faces[f];
                let v = if face.is_boundary() {
                    vel.vec3(face.left)
                } else {
                    vec3::scale(vec3::add(vel.vec3(face.left), vel.vec3(face.right)), 0.5)
                };
                vec3::dot(v, face.normal).abs() * face.area
            })
            .sum();
        if out > 0.0 {
            best = best.min(domain.volumes[i] / out);
        }
    }
    cfl * best
}
