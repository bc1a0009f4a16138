use super::LinsysError;
use crate::exchange::{allgather_inner, allreduce_sum, exchange_halo, Transport};
use crate::partition::LocalDomain;
use std::collections::HashMap;
use std::io::Write;

/// One partition's block of rows of a globally indexed sparse matrix.
///
/// Rows are the partition's inner cells in slot order; columns are stored as
/// global cell ids (sorted within each row) and, for products, as local slots
/// (inner or halo).
#[derive(Debug, Clone, PartialEq)]
pub struct SparseMatrix {
    /// Total number of rows across all partitions.
    pub global_size: usize,
    /// Global id of each local row.
    pub row_ids: Vec<usize>,
    pub offsets: Vec<usize>,
    pub cols: Vec<usize>,
    pub values: Vec<f64>,
    /// Local slot of each entry of `cols`.
    pub slots: Vec<usize>,
}

impl SparseMatrix {
    /// Builds a row block from rows of `(global column, value)` pairs sorted
    /// by column. `slot_of` maps global columns to local slots.
    pub fn from_rows(
        global_size: usize,
        row_ids: Vec<usize>,
        rows: Vec<Vec<(usize, f64)>>,
        slot_of: impl Fn(usize) -> Option<usize>,
    ) -> Result<Self, LinsysError> {
        let mut m = SparseMatrix {
            global_size,
            row_ids,
            offsets: vec![0],
            cols: Vec::new(),
            values: Vec::new(),
            slots: Vec::new(),
        };
        for (r, row) in rows.into_iter().enumerate() {
            for w in row.windows(2) {
                if w[0].0 >= w[1].0 {
                    return Err(LinsysError::Structure(format!(
                        "row {} has unsorted or duplicate column {}",
                        m.row_ids[r], w[1].0
                    )));
                }
            }
            for (c, v) in row {
                let s = slot_of(c).ok_or_else(|| {
                    LinsysError::Structure(format!(
                        "row {} references column {c} with no local slot",
                        m.row_ids[r]
                    ))
                })?;
                m.cols.push(c);
                m.values.push(v);
                m.slots.push(s);
            }
            m.offsets.push(m.cols.len());
        }
        Ok(m)
    }

    /// Serial matrix from a dense row-major array; zeros are dropped.
    pub fn from_dense(n: usize, dense: &[f64]) -> Self {
        assert_eq!(dense.len(), n * n);
        let rows = (0..n)
            .map(|r| {
                (0..n)
                    .filter(|&c| dense[r * n + c] != 0.0)
                    .map(|c| (c, dense[r * n + c]))
                    .collect()
            })
            .collect();
        Self::from_rows(n, (0..n).collect(), rows, Some).expect("dense rows are sorted")
    }

    pub fn num_rows(&self) -> usize {
        self.row_ids.len()
    }

    pub fn nnz(&self) -> usize {
        self.cols.len()
    }

    #[inline]
    pub fn row(&self, r: usize) -> std::ops::Range<usize> {
        self.offsets[r]..self.offsets[r + 1]
    }

    /// Diagonal entries of the local rows; errors on a missing or zero one.
    pub fn diagonal(&self) -> Result<Vec<f64>, LinsysError> {
        (0..self.num_rows())
            .map(|r| {
                let g = self.row_ids[r];
                let d = self
                    .row(r)
                    .find(|&k| self.cols[k] == g)
                    .map(|k| self.values[k])
                    .unwrap_or(0.0);
                if d == 0.0 {
                    Err(LinsysError::ZeroDiagonal { row: g })
                } else {
                    Ok(d)
                }
            })
            .collect()
    }

    /// `y = A x` for a vector whose halo entries are current.
    pub fn apply_local(&self, x: &[f64], y: &mut [f64]) {
        for (r, yr) in y.iter_mut().enumerate().take(self.num_rows()) {
            let mut acc = 0.0;
            for k in self.row(r) {
                acc += self.values[k] * x[self.slots[k]];
            }
            *yr = acc;
        }
    }

    /// Largest absolute row sum (local rows).
    pub fn norm_inf_local(&self) -> f64 {
        (0..self.num_rows())
            .map(|r| self.row(r).map(|k| self.values[k].abs()).sum::<f64>())
            .fold(0.0, f64::max)
    }

    /// Every partition's rows, merged on every partition into one serial
    /// matrix ordered by global row.
    pub fn gather(&self, t: &mut impl Transport) -> Result<SparseMatrix, LinsysError> {
        let mut flat = Vec::with_capacity(1 + 3 * self.nnz() + self.num_rows() * 2);
        flat.push(self.num_rows() as f64);
        for r in 0..self.num_rows() {
            flat.push(self.row_ids[r] as f64);
            flat.push(self.row(r).len() as f64);
            for k in self.row(r) {
                flat.push(self.cols[k] as f64);
                flat.push(self.values[k]);
            }
        }
        let parts = allgather_inner(t, &flat)?;
        let mut rows: Vec<Option<Vec<(usize, f64)>>> = vec![None; self.global_size];
        for p in parts {
            let mut at = 1;
            for _ in 0..p[0] as usize {
                let (id, len) = (p[at] as usize, p[at + 1] as usize);
                at += 2;
                rows[id] = Some(
                    (0..len)
                        .map(|k| (p[at + 2 * k] as usize, p[at + 2 * k + 1]))
                        .collect(),
                );
                at += 2 * len;
            }
        }
        let rows: Vec<Vec<(usize, f64)>> = rows
            .into_iter()
            .enumerate()
            .map(|(i, r)| r.ok_or_else(|| LinsysError::Structure(format!("row {i} missing"))))
            .collect::<Result<_, _>>()?;
        SparseMatrix::from_rows(self.global_size, (0..self.global_size).collect(), rows, Some)
    }

    /// Dense row-major copy of a serial matrix.
    pub fn to_dense(&self) -> Vec<f64> {
        let n = self.global_size;
        let mut d = vec![0.0; self.num_rows() * n];
        for r in 0..self.num_rows() {
            for k in self.row(r) {
                d[r * n + self.cols[k]] = self.values[k];
            }
        }
        d
    }

    /// MatrixMarket coordinate export of the local rows (1-based ids).
    /// Writing a gathered matrix gives the whole operator.
    pub fn write_matrix_market(&self, mut w: impl Write) -> std::io::Result<()> {
        writeln!(w, "%%MatrixMarket matrix coordinate real general")?;
        writeln!(w, "{} {} {}", self.global_size, self.global_size, self.nnz())?;
        for r in 0..self.num_rows() {
            for k in self.row(r) {
                writeln!(w, "{} {} {:.17e}", self.row_ids[r] + 1, self.cols[k] + 1, self.values[k])?;
            }
        }
        Ok(())
    }
}

/// Local slots of global cell ids for `domain`.
pub fn slot_map(domain: &LocalDomain) -> HashMap<usize, usize> {
    domain
        .cell_global
        .iter()
        .enumerate()
        .map(|(s, &g)| (g, s))
        .collect()
}

/// A distributed vector: inner entries owned here followed by halo copies.
#[derive(Debug, Clone, PartialEq)]
pub struct DistVector {
    pub values: Vec<f64>,
    pub n_inner: usize,
}

impl DistVector {
    pub fn zeros(domain: &LocalDomain) -> Self {
        DistVector {
            values: vec![0.0; domain.num_cell_slots()],
            n_inner: domain.n_inner,
        }
    }

    /// Vector with the given inner entries and zeroed halo.
    pub fn from_inner(domain: &LocalDomain, inner: &[f64]) -> Self {
        let mut v = Self::zeros(domain);
        v.values[..domain.n_inner].copy_from_slice(inner);
        v
    }

    pub fn inner(&self) -> &[f64] {
        &self.values[..self.n_inner]
    }

    pub fn inner_mut(&mut self) -> &mut [f64] {
        &mut self.values[..self.n_inner]
    }

    pub fn exchange(&mut self, domain: &LocalDomain, t: &mut impl Transport) -> Result<(), LinsysError> {
        exchange_halo(domain, t, &mut [self.values.as_mut_slice()])?;
        Ok(())
    }
}

/// `y = A x` over the local rows, exchanging the halo of `x` first.
pub fn spmv(
    domain: &LocalDomain,
    t: &mut impl Transport,
    a: &SparseMatrix,
    x: &mut DistVector,
    y: &mut [f64],
) -> Result<(), LinsysError> {
    if x.values.len() != domain.num_cell_slots() || y.len() != a.num_rows() || a.num_rows() != domain.n_inner {
        return Err(LinsysError::Dimension(format!(
            "matrix has {} rows, x has {} slots, y has {} entries, domain has {} inner cells",
            a.num_rows(),
            x.values.len(),
            y.len(),
            domain.n_inner
        )));
    }
    x.exchange(domain, t)?;
    a.apply_local(&x.values, y);
    Ok(())
}

/// Global dot product of the inner parts: local sums in slot order reduced in
/// rank order, so the result is reproducible for a given partitioning.
pub fn dot(t: &mut impl Transport, a: &[f64], b: &[f64]) -> Result<f64, LinsysError> {
    let local: f64 = a.iter().zip(b).map(|(x, y)| x * y).sum();
    Ok(allreduce_sum(t, &[local])?[0])
}

pub fn norm2(t: &mut impl Transport, a: &[f64]) -> Result<f64, LinsysError> {
    Ok(dot(t, a, a)?.sqrt())
}
