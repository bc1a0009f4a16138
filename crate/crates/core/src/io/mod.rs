//! File formats around the solvers: VTK output, configuration files and run
//! manifests. Mesh input lives in [`crate::mesh`].

pub mod config;
pub mod manifest;
pub mod vtu;

pub use config::{ConfigError, KeyValues};
pub use manifest::{sha256_file, Manifest};
pub use vtu::{read_vtu_cell_data, write_pvtu, write_snapshot, write_vtu, VtuField};
