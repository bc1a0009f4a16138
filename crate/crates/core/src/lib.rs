//! Partitioned cell-centred finite-volume operators on unstructured
//! tetrahedral meshes.
//!
//! The crate covers the whole pipeline of a distributed-memory finite-volume
//! code at desk scale: MSH 2.2 reading and connectivity ([`mesh`]), domain
//! decomposition with inner/halo/ghost/haloghost classification
//! ([`partition`]), neighbour-only halo exchange over pluggable transports
//! ([`exchange`]), least-squares gradients, diamond face gradients,
//! MUSCL/Barth-Jespersen upwind fluxes and three-stage Runge-Kutta ([`fv`]),
//! Poisson assembly with FGMRES ([`linsys`]) and a coupled drift-diffusion
//! streamer model ([`streamer`]).

// `!(x >= 0.0)` is used on purpose: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::needless_range_loop)]

pub mod bench;
pub mod exchange;
pub mod fv;
pub mod io;
pub mod linsys;
pub mod mesh;
pub mod partition;
pub mod streamer;
pub mod vec3;

pub use mesh::{Mesh, MeshError};
