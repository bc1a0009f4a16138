use super::{CellField, FvError, NodeField};
use crate::partition::LocalDomain;
use crate::vec3::{self, Vec3};

/// Node interpolation weights.
///
/// Around node `n` the cell values are fitted by `u(x) = a + g . (x - x_n)`
/// in the inverse-distance weighted least-squares sense; the node value is
/// `a`. Since `a` is linear in the cell values, `u_n = sum_s Alpha_s u_s` with
/// weights depending only on geometry. Linear fields are reproduced exactly
/// and `sum_s Alpha_s = 1`. Nodes whose neighbourhood cannot determine a
/// plane fit fall back to inverse-distance averaging.
#[derive(Debug, Clone, PartialEq)]
pub struct NodeLSWeights {
    /// Aligned with `domain.node_stencil`.
    pub alpha: Vec<f64>,
    /// Nodes that used the inverse-distance fallback.
    pub fallback_nodes: usize,
}

impl NodeLSWeights {
    pub fn build(domain: &LocalDomain) -> Result<Self, FvError> {
        let st = &domain.node_stencil;
        let mut alpha = Vec::with_capacity(st.slots.len());
        let mut fallback_nodes = 0;
        for n in 0..st.num_rows() {
            let row = st.row(n);
            if row.is_empty() {
                return Err(FvError::EmptyNodeStencil {
                    node: domain.node_global[n],
                });
            }
            let xn = domain.node_positions[n];
            let offsets: Vec<Vec3> = row.iter().map(|&s| vec3::sub(domain.centers[s], xn)).collect();
            match fit_weights(&offsets) {
                Some(w) => alpha.extend(w),
                None => {
                    fallback_nodes += 1;
                    let w: Vec<f64> = offsets.iter().map(|d| 1.0 / vec3::norm(*d)).collect();
                    let total: f64 = w.iter().sum();
                    alpha.extend(w.iter().map(|x| x / total));
                }
            }
        }
        Ok(NodeLSWeights {
            alpha,
            fallback_nodes,
        })
    }
}

/// Weights `w_s (y0 + y . d_s)` where `N y = e1`, `N = sum w_s p_s p_s^T`,
/// `p_s = (1, d_s / h)`. Offsets are scaled by the largest distance so `N`
/// is well conditioned regardless of mesh size.
fn fit_weights(offsets: &[Vec3]) -> Option<Vec<f64>> {
    let h = offsets.iter().map(|d| vec3::norm(*d)).fold(0.0, f64::max);
    if offsets.len() < 4 || h == 0.0 {
        return None;
    }
    let mut n = [[0.0; 4]; 4];
    let mut rows = Vec::with_capacity(offsets.len());
    for d in offsets {
        let w = h / vec3::norm(*d);
        let p = [1.0, d[0] / h, d[1] / h, d[2] / h];
        for r in 0..4 {
            for c in 0..4 {
                n[r][c] += w * p[r] * p[c];
            }
        }
        rows.push((w, p));
    }
    let y = solve4(n, [1.0, 0.0, 0.0, 0.0])?;
    Some(
        rows.iter()
            .map(|(w, p)| w * (y[0] + y[1] * p[1] + y[2] * p[2] + y[3] * p[3]))
            .collect(),
    )
}

/// Gaussian elimination with partial pivoting; `None` if a pivot vanishes
/// relative to the matrix scale.
fn solve4(mut a: [[f64; 4]; 4], mut b: [f64; 4]) -> Option<[f64; 4]> {
    let scale = (0..4).map(|i| a[i][i].abs()).fold(0.0, f64::max);
    for col in 0..4 {
        let p = (col..4).max_by(|&i, &j| a[i][col].abs().total_cmp(&a[j][col].abs()))?;
        if a[p][col].abs() <= 1e-12 * scale {
            return None;
        }
        a.swap(col, p);
        b.swap(col, p);
        for r in col + 1..4 {
            let f = a[r][col] / a[col][col];
            for c in col..4 {
                a[r][c] -= f * a[col][c];
            }
            b[r] -= f * b[col];
        }
    }
    let mut x = [0.0; 4];
    for r in (0..4).rev() {
        let s: f64 = (r + 1..4).map(|c| a[r][c] * x[c]).sum();
        x[r] = (b[r] - s) / a[r][r];
    }
    Some(x)
}

/// Node values `u_n = sum Alpha_s u_s`. Every slot in the node stencils
/// (halo, ghost, haloghost included) must be current.
pub fn node_interpolate(domain: &LocalDomain, u: &CellField, weights: &NodeLSWeights) -> NodeField {
    let mut out = NodeField::zeros(domain);
    node_interpolate_into(domain, u, weights, &mut out);
    out
}

pub fn node_interpolate_into(
    domain: &LocalDomain,
    u: &CellField,
    weights: &NodeLSWeights,
    out: &mut NodeField,
) {
    let st = &domain.node_stencil;
    for (n, v) in out.values.iter_mut().enumerate() {
        *v = st
            .range(n)
            .map(|k| weights.alpha[k] * u.get(st.slots[k]))
            .sum();
    }
}
