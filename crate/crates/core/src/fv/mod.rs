//! Finite-volume operators on a partition's local domain.
//!
//! All operators read a [`CellField`] laid out over the domain's slots and
//! write inner-cell results. Values they read from halo, ghost or haloghost
//! slots must have been refreshed first ([`crate::exchange::exchange_halo`],
//! [`fill_ghosts`]); with that done, every inner-cell result is bitwise
//! independent of the partition count.

mod bc;
mod field;
mod flux;
mod gradient;
mod nodes;
mod operator;
mod rk3;

pub use bc::{copy_ghosts, fill_ghosts, BoundaryCondition, BoundaryConditions, BoundaryValue};
pub use field::{CellField, NodeField};
pub use flux::{
    barth_jespersen, barth_jespersen_into, cfl_time_step, convective_flux, diffusive_flux,
    face_gradient, Diffusivity,
};
pub use gradient::{cell_gradient, cell_gradient_into, GradStencilCoeffs};
pub use nodes::{node_interpolate, node_interpolate_into, NodeLSWeights};
pub use operator::{combine, ConvectionDiffusion, PhaseTimes, ResidualParts};
pub use rk3::{rk3_step, RK3_ALPHA};

use crate::exchange::ExchangeError;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum FvError {
    #[error("degenerate least-squares stencil at cell {cell} (det {det:e})")]
    DegenerateStencil { cell: usize, det: f64 },
    #[error("node {node} has no surrounding cells")]
    EmptyNodeStencil { node: usize },
    #[error("negative diffusivity {value} at face {face}")]
    NegativeDiffusivity { face: usize, value: f64 },
    #[error("non-finite value at cell {cell} after stage {stage}")]
    NonFinite { stage: usize, cell: usize },
    #[error("unknown boundary patch '{0}'")]
    UnknownPatch(String),
    #[error("{0}")]
    InvalidArgument(String),
    #[error(transparent)]
    Exchange(#[from] ExchangeError),
}
