use super::{CellField, FvError};
use crate::partition::LocalDomain;
use crate::vec3::Vec3;
use std::fmt;
use std::sync::Arc;

/// Prescribed boundary value: a constant or a function of position.
#[derive(Clone)]
pub enum BoundaryValue {
    Constant(f64),
    Function(Arc<dyn Fn(Vec3) -> f64 + Send + Sync>),
}

impl BoundaryValue {
    pub fn function(f: impl Fn(Vec3) -> f64 + Send + Sync + 'static) -> Self {
        BoundaryValue::Function(Arc::new(f))
    }

    #[inline]
    pub fn at(&self, x: Vec3) -> f64 {
        match self {
            BoundaryValue::Constant(v) => *v,
            BoundaryValue::Function(f) => f(x),
        }
    }
}

impl fmt::Debug for BoundaryValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            BoundaryValue::Constant(v) => write!(f, "Constant({v})"),
            BoundaryValue::Function(_) => f.write_str("Function(..)"),
        }
    }
}

/// Boundary condition of one patch.
///
/// Ghost values: Dirichlet mirrors the cell value through the prescribed
/// value at the face (`2 g - u`), which is exact for linear data because the
/// ghost centre is the mirror image of the cell centre. Neumann (zero normal
/// gradient) and wall copy the cell value. Neumann faces carry no diffusive
/// flux; wall faces carry neither diffusive nor convective flux.
#[derive(Debug, Clone)]
pub enum BoundaryCondition {
    Dirichlet(BoundaryValue),
    Neumann,
    Wall,
}

impl BoundaryCondition {
    pub fn dirichlet(v: f64) -> Self {
        BoundaryCondition::Dirichlet(BoundaryValue::Constant(v))
    }

    pub fn carries_diffusion(&self) -> bool {
        matches!(self, BoundaryCondition::Dirichlet(_))
    }

    pub fn carries_convection(&self) -> bool {
        !matches!(self, BoundaryCondition::Wall)
    }
}

/// One condition per boundary patch, indexed like the mesh patch list.
#[derive(Debug, Clone)]
pub struct BoundaryConditions {
    names: Vec<String>,
    conditions: Vec<BoundaryCondition>,
}

impl BoundaryConditions {
    /// Every patch gets `default`.
    pub fn uniform(patch_names: &[String], default: BoundaryCondition) -> Self {
        BoundaryConditions {
            names: patch_names.to_vec(),
            conditions: vec![default; patch_names.len()],
        }
    }

    /// Replaces the condition of the named patch.
    pub fn with(mut self, patch: &str, bc: BoundaryCondition) -> Result<Self, FvError> {
        self.set(patch, bc)?;
        Ok(self)
    }

    pub fn set(&mut self, patch: &str, bc: BoundaryCondition) -> Result<(), FvError> {
        let i = self
            .names
            .iter()
            .position(|n| n == patch)
            .ok_or_else(|| FvError::UnknownPatch(patch.to_string()))?;
        self.conditions[i] = bc;
        Ok(())
    }

    #[inline]
    pub fn get(&self, patch: usize) -> &BoundaryCondition {
        &self.conditions[patch]
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }
}

/// Sets every ghost and haloghost slot of `u` from its mirrored cell and the
/// boundary condition. Halo values must be current: haloghosts mirror halo
/// cells, and the result equals what the owning partition computes for the
/// same ghost.
pub fn fill_ghosts(domain: &LocalDomain, bcs: &BoundaryConditions, u: &mut CellField) {
    let g0 = domain.ghost_start();
    let nc = u.ncomp();
    for i in 0..domain.n_ghost + domain.n_haloghost {
        let cell = domain.ghost_cell[i];
        let slot = g0 + i;
        for c in 0..nc {
            let ul = u.slot(cell)[c];
            u.slot_mut(slot)[c] = match bcs.get(domain.ghost_patch[i]) {
                BoundaryCondition::Dirichlet(g) => 2.0 * g.at(domain.ghost_foot[i]) - ul,
                BoundaryCondition::Neumann | BoundaryCondition::Wall => ul,
            };
        }
    }
}

/// Copies each mirrored cell value into its ghost and haloghost slots.
pub fn copy_ghosts(domain: &LocalDomain, u: &mut CellField) {
    let g0 = domain.ghost_start();
    for i in 0..domain.n_ghost + domain.n_haloghost {
        let v = u.slot(domain.ghost_cell[i]).to_vec();
        u.slot_mut(g0 + i).copy_from_slice(&v);
    }
}
