use crate::partition::LocalDomain;
use crate::vec3::Vec3;

/// Values stored per cell slot (inner, halo, ghost and haloghost), with
/// `ncomp` interleaved components per slot.
#[derive(Debug, Clone, PartialEq)]
pub struct CellField {
    ncomp: usize,
    values: Vec<f64>,
}

impl CellField {
    pub fn zeros(domain: &LocalDomain, ncomp: usize) -> Self {
        Self::with_slots(domain.num_slots(), ncomp)
    }

    pub fn with_slots(slots: usize, ncomp: usize) -> Self {
        assert!(ncomp > 0, "a field needs at least one component");
        CellField {
            ncomp,
            values: vec![0.0; slots * ncomp],
        }
    }

    pub fn scalar(domain: &LocalDomain) -> Self {
        Self::zeros(domain, 1)
    }

    /// Scalar field with inner slots set from `f` at the cell centres. Other
    /// slots stay zero until filled by an exchange or boundary update.
    pub fn from_fn(domain: &LocalDomain, f: impl Fn(Vec3) -> f64) -> Self {
        let mut field = Self::scalar(domain);
        for s in 0..domain.n_inner {
            field.values[s] = f(domain.centers[s]);
        }
        field
    }

    pub fn ncomp(&self) -> usize {
        self.ncomp
    }

    pub fn num_slots(&self) -> usize {
        self.values.len() / self.ncomp
    }

    pub fn slot(&self, s: usize) -> &[f64] {
        &self.values[s * self.ncomp..(s + 1) * self.ncomp]
    }

    pub fn slot_mut(&mut self, s: usize) -> &mut [f64] {
        &mut self.values[s * self.ncomp..(s + 1) * self.ncomp]
    }

    /// First component at slot `s`.
    #[inline]
    pub fn get(&self, s: usize) -> f64 {
        self.values[s * self.ncomp]
    }

    #[inline]
    pub fn set(&mut self, s: usize, v: f64) {
        self.values[s * self.ncomp] = v;
    }

    /// Slot `s` of a three-component field as a vector.
    #[inline]
    pub fn vec3(&self, s: usize) -> Vec3 {
        debug_assert_eq!(self.ncomp, 3);
        let o = s * 3;
        [self.values[o], self.values[o + 1], self.values[o + 2]]
    }

    #[inline]
    pub fn set_vec3(&mut self, s: usize, v: Vec3) {
        debug_assert_eq!(self.ncomp, 3);
        self.values[s * 3..s * 3 + 3].copy_from_slice(&v);
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut [f64] {
        &mut self.values
    }

    /// Components of the `n_inner` owned cells.
    pub fn inner(&self, domain: &LocalDomain) -> &[f64] {
        &self.values[..domain.n_inner * self.ncomp]
    }
}

/// One scalar per local node.
#[derive(Debug, Clone, PartialEq)]
pub struct NodeField {
    pub values: Vec<f64>,
}

impl NodeField {
    pub fn zeros(domain: &LocalDomain) -> Self {
        NodeField {
            values: vec![0.0; domain.num_nodes()],
        }
    }
}
