use super::{CellField, FvError};
use crate::partition::LocalDomain;
use crate::vec3::{self, Vec3};

/// Per-cell least-squares gradient data.
///
/// For cell `i` with stencil neighbours `j` (node neighbours and ghosts),
/// `d_j = x_j - x_i` and weight `w_j = 1 / |d_j|`, the gradient solves
///
/// ```text
/// M g = J,   M = sum_j w_j d_j d_j^T,   J = sum_j w_j d_j (u_j - u_i)
/// ```
///
/// `M` depends only on the mesh, so its inverse is formed once by Cramer's
/// rule and stored together with `w_j d_j`.
#[derive(Debug, Clone, PartialEq)]
pub struct GradStencilCoeffs {
    /// `w_j d_j`, aligned with `domain.cell_stencil`.
    pub weighted_offsets: Vec<Vec3>,
    /// Rows of `M^-1` per inner cell.
    pub inverse: Vec<[Vec3; 3]>,
    /// `det M` per inner cell.
    pub det: Vec<f64>,
}

impl GradStencilCoeffs {
    pub fn build(domain: &LocalDomain) -> Result<Self, FvError> {
        let st = &domain.cell_stencil;
        let mut weighted_offsets = Vec::with_capacity(st.slots.len());
        let mut inverse = Vec::with_capacity(domain.n_inner);
        let mut det = Vec::with_capacity(domain.n_inner);
        for i in 0..domain.n_inner {
            let xi = domain.centers[i];
            let mut m = [[0.0; 3]; 3];
            for &j in st.row(i) {
                let d = vec3::sub(domain.centers[j], xi);
                let w = 1.0 / vec3::norm(d);
                for r in 0..3 {
                    for c in 0..3 {
                        m[r][c] += w * d[r] * d[c];
                    }
                }
                weighted_offsets.push(vec3::scale(d, w));
            }
            let (inv, dm) = cramer_inverse(&m);
            let scale = m[0][0] * m[1][1] * m[2][2];
            if !(dm.abs() >= 1e-14 * scale) || scale == 0.0 {
                return Err(FvError::DegenerateStencil {
                    cell: domain.cell_global[i],
                    det: dm,
                });
            }
            inverse.push(inv);
            det.push(dm);
        }
        Ok(GradStencilCoeffs {
            weighted_offsets,
            inverse,
            det,
        })
    }
}

/// Inverse of a 3x3 matrix via cofactors, with its determinant. The inverse
/// is meaningless when the determinant is zero; callers check it.
pub(crate) fn cramer_inverse(m: &[[f64; 3]; 3]) -> ([Vec3; 3], f64) {
    let c00 = m[1][1] * m[2][2] - m[1][2] * m[2][1];
    let c01 = m[1][2] * m[2][0] - m[1][0] * m[2][2];
    let c02 = m[1][0] * m[2][1] - m[1][1] * m[2][0];
    let det = m[0][0] * c00 + m[0][1] * c01 + m[0][2] * c02;
    let k = 1.0 / det;
    let inv = [
        [
            c00 * k,
            (m[0][2] * m[2][1] - m[0][1] * m[2][2]) * k,
            (m[0][1] * m[1][2] - m[0][2] * m[1][1]) * k,
        ],
        [
            c01 * k,
            (m[0][0] * m[2][2] - m[0][2] * m[2][0]) * k,
            (m[0][2] * m[1][0] - m[0][0] * m[1][2]) * k,
        ],
        [
            c02 * k,
            (m[0][1] * m[2][0] - m[0][0] * m[2][1]) * k,
            (m[0][0] * m[1][1] - m[0][1] * m[1][0]) * k,
        ],
    ];
    (inv, det)
}

/// Least-squares gradient of scalar `u` at every inner cell. Halo, ghost and
/// haloghost values of `u` must be current. Only the inner slots of the
/// result are written.
pub fn cell_gradient(domain: &LocalDomain, u: &CellField, coeffs: &GradStencilCoeffs) -> CellField {
    let mut grad = CellField::zeros(domain, 3);
    cell_gradient_into(domain, u, coeffs, &mut grad);
    grad
}

pub fn cell_gradient_into(
    domain: &LocalDomain,
    u: &CellField,
    coeffs: &GradStencilCoeffs,
    grad: &mut CellField,
) {
    let st = &domain.cell_stencil;
    for i in 0..domain.n_inner {
        let ui = u.get(i);
        let mut j_acc = [0.0; 3];
        for k in st.range(i) {
            let du = u.get(st.slots[k]) - ui;
            let a = coeffs.weighted_offsets[k];
            j_acc[0] += a[0] * du;
            j_acc[1] += a[1] * du;
            j_acc[2] += a[2] * du;
        }
        let inv = &coeffs.inverse[i];
        grad.set_vec3(
            i,
            [
                vec3::dot(inv[0], j_acc),
                vec3::dot(inv[1], j_acc),
                vec3::dot(inv[2], j_acc),
            ],
        );
    }
}
