use super::{LinsysError, SparseMatrix};
use std::fmt;
use std::str::FromStr;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PreconditionerKind {
    None,
    Jacobi,
    /// ILU(0) of each partition's diagonal block.
    BlockJacobi,
    /// ILU(0). Applied per partition block, so with several partitions it
    /// coincides with `BlockJacobi`; with one partition it is global ILU(0).
    Ilu0,
}

impl FromStr for PreconditionerKind {
    type Err = LinsysError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "none" => Ok(Self::None),
            "jacobi" => Ok(Self::Jacobi),
            "block-jacobi" | "bjacobi" => Ok(Self::BlockJacobi),
            "ilu0" | "ilu" => Ok(Self::Ilu0),
            other => Err(LinsysError::Config(format!("unknown preconditioner '{other}'"))),
        }
    }
}

impl fmt::Display for PreconditionerKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::None => "none",
            Self::Jacobi => "jacobi",
            Self::BlockJacobi => "block-jacobi",
            Self::Ilu0 => "ilu0",
        })
    }
}

/// Incomplete LU factors of the inner-column block, in local indices.
#[derive(Debug, Clone)]
struct Ilu0 {
    offsets: Vec<usize>,
    cols: Vec<usize>,
    values: Vec<f64>,
    diag: Vec<usize>,
}

impl Ilu0 {
    fn factor(a: &SparseMatrix) -> Result<Self, LinsysError> {
        let n = a.num_rows();
        let mut f = Ilu0 {
            offsets: vec![0],
            cols: Vec::new(),
            values: Vec::new(),
            diag: Vec::with_capacity(n),
        };
        for r in 0..n {
            // inner slots are ordered like global ids, so columns stay sorted
            let mut diag = None;
            for k in a.row(r) {
                let s = a.slots[k];
                if s < n {
                    if s == r {
                        diag = Some(f.cols.len());
                    }
                    f.cols.push(s);
                    f.values.push(a.values[k]);
                }
            }
            f.diag.push(diag.ok_or(LinsysError::ZeroDiagonal { row: a.row_ids[r] })?);
            f.offsets.push(f.cols.len());
        }
        let mut pos = vec![usize::MAX; n];
        for i in 0..n {
            let row = f.offsets[i]..f.offsets[i + 1];
            for k in row.clone() {
                pos[f.cols[k]] = k;
            }
            for k in f.offsets[i]..f.diag[i] {
                let c = f.cols[k];
                let piv = f.values[f.diag[c]];
                if piv == 0.0 {
                    return Err(LinsysError::ZeroDiagonal { row: a.row_ids[c] });
                }
                let l = f.values[k] / piv;
                f.values[k] = l;
                for m in f.diag[c] + 1..f.offsets[c + 1] {
                    let p = pos[f.cols[m]];
                    if p != usize::MAX {
                        f.values[p] -= l * f.values[m];
                    }
                }
            }
            if f.values[f.diag[i]] == 0.0 {
                return Err(LinsysError::ZeroDiagonal { row: a.row_ids[i] });
            }
            for k in row {
                pos[f.cols[k]] = usize::MAX;
            }
        }
        Ok(f)
    }

    fn solve(&self, v: &[f64], z: &mut [f64]) {
        let n = self.diag.len();
        for i in 0..n {
            let mut s = v[i];
            for k in self.offsets[i]..self.diag[i] {
                s -= self.values[k] * z[self.cols[k]];
            }
            z[i] = s;
        }
        for i in (0..n).rev() {
            let mut s = z[i];
            for k in self.diag[i] + 1..self.offsets[i + 1] {
                s -= self.values[k] * z[self.cols[k]];
            }
            z[i] = s / self.values[self.diag[i]];
        }
    }
}

/// A preconditioner set up for one partition's row block. Application only
/// touches local entries, so it needs no communication.
#[derive(Debug, Clone)]
pub struct Preconditioner {
    kind: PreconditionerKind,
    inv_diag: Vec<f64>,
    ilu: Option<Ilu0>,
}

impl Preconditioner {
    pub fn new(kind: PreconditionerKind, a: &SparseMatrix) -> Result<Self, LinsysError> {
        let mut p = Preconditioner {
            kind,
            inv_diag: Vec::new(),
            ilu: None,
        };
        match kind {
            PreconditionerKind::None => {}
            PreconditionerKind::Jacobi => {
                p.inv_diag = a.diagonal()?.iter().map(|d| 1.0 / d).collect();
            }
            PreconditionerKind::BlockJacobi | PreconditionerKind::Ilu0 => {
                p.ilu = Some(Ilu0::factor(a)?);
            }
        }
        Ok(p)
    }

    pub fn kind(&self) -> PreconditionerKind {
        self.kind
    }

    /// `z = M^-1 v` on the inner entries.
    pub fn apply(&self, v: &[f64], z: &mut [f64]) {
        match (&self.ilu, self.kind) {
            (Some(ilu), _) => ilu.solve(v, z),
            (None, PreconditionerKind::Jacobi) => {
                for ((z, v), d) in z.iter_mut().zip(v).zip(&self.inv_diag) {
                    *z = v * d;
                }
            }
            _ => z[..v.len()].copy_from_slice(v),
        }
    }
}
