//! Coupled electron/ion drift-diffusion model of a streamer discharge.
//!
//! The unknowns are the electron and positive-ion densities `n_e`, `n_p`
//! and the electric potential `V`:
//!
//! ```text
//! dn_e/dt + div(n_e v_e) - div(D_e grad n_e) = S_e
//! dn_p/dt = S_e
//! lap V = -(e/eps) (n_p - n_e),   E = -grad V
//! ```
//!
//! with `v_e(E)`, `D_e(E)` and `S_e = alpha |v_e| n_e` from [`physics`],
//! plus optional Gaussian plasma spots switched on for a fixed time window.
//! Every Runge-Kutta stage re-solves the potential with the densities of
//! that stage. The Laplacian is assembled once; only its right-hand side
//! changes.

pub mod physics;
mod model;
mod run;

pub use model::{Diagnostics, StepReport, StreamerModel, StreamerTimes};
pub use physics::{
    electron_diffusion, electron_velocity, ionization_ratio, ionization_source, PhysicalConstants,
    VelocityTable,
};
pub use run::{run_streamer, RunSummary, TIMING_COLUMNS};

use crate::exchange::ExchangeError;
use crate::fv::{BoundaryCondition, BoundaryConditions, CellField, FvError};
use crate::linsys::{LinsysError, SolverConfig};
use crate::partition::LocalDomain;
use crate::vec3::{self, Vec3};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum StreamerError {
    #[error("invalid streamer configuration: {0}")]
    Config(String),
    #[error("{0}")]
    InvalidInput(String),
    #[error("mesh has no patch named '{0}'")]
    MissingPatch(String),
    #[error("potential solve failed at step {step}: {source}")]
    Solver {
        step: usize,
        #[source]
        source: LinsysError,
    },
    #[error(transparent)]
    Linsys(LinsysError),
    #[error(transparent)]
    Fv(#[from] FvError),
    #[error(transparent)]
    Exchange(#[from] ExchangeError),
    #[error("output: {0}")]
    Io(#[from] std::io::Error),
}

impl From<LinsysError> for StreamerError {
    fn from(e: LinsysError) -> Self {
        StreamerError::Linsys(e)
    }
}

/// Initial electron pulse on top of a uniform background.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GaussianPulse {
    pub center: Vec3,
    pub sigma: f64,
    pub peak: f64,
    pub background: f64,
}

impl Default for GaussianPulse {
    fn default() -> Self {
        GaussianPulse {
            center: [0.2, 0.25, 0.25],
            sigma: 0.01,
            peak: 1e16,
            background: 1e12,
        }
    }
}

impl GaussianPulse {
    pub fn value(&self, x: Vec3) -> f64 {
        let r = vec3::dist(x, self.center);
        self.peak * (-(r * r) / (self.sigma * self.sigma)).exp() + self.background
    }
}

/// A Gaussian ionization source switched on during `[start, start + duration)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PlasmaSpot {
    pub center: Vec3,
    pub amplitude: f64,
    pub width: f64,
    pub start: f64,
    pub duration: f64,
}

impl PlasmaSpot {
    pub fn new(center: Vec3, start: f64, duration: f64) -> Result<Self, StreamerError> {
        let spot = PlasmaSpot {
            center,
            amplitude: 1e25,
            width: 0.005,
            start,
            duration,
        };
        spot.validate()?;
        Ok(spot)
    }

    pub fn validate(&self) -> Result<(), StreamerError> {
        if !(self.duration > 0.0) || !(self.width > 0.0) {
            return Err(StreamerError::Config(format!(
                "plasma spot needs positive duration and width (got {}, {})",
                self.duration, self.width
            )));
        }
        Ok(())
    }

    pub fn is_active(&self, t: f64) -> bool {
        t >= self.start && t < self.start + self.duration
    }

    /// Source value at `x`, ignoring the time window.
    pub fn value(&self, x: Vec3) -> f64 {
        let r = vec3::dist(x, self.center);
        self.amplitude * (-(r * r) / (self.width * self.width)).exp()
    }

    /// The two branching spots of the reference run.
    pub fn branching_pair() -> Vec<PlasmaSpot> {
        [[0.3, 0.25, 0.28], [0.31, 0.25, 0.22]]
            .into_iter()
            .map(|c| PlasmaSpot::new(c, 1.26e-8, 0.5e-9).expect("valid spot"))
            .collect()
    }
}

/// Adds the contribution of every spot active at `t` to `out` (one value per
/// inner cell).
pub fn plasma_spot_source(domain: &LocalDomain, spots: &[PlasmaSpot], t: f64, out: &mut [f64]) {
    for spot in spots.iter().filter(|s| s.is_active(t)) {
        for (i, o) in out.iter_mut().enumerate().take(domain.n_inner) {
            *o += spot.value(domain.centers[i]);
        }
    }
}

/// Everything that defines a streamer run apart from the mesh.
#[derive(Debug, Clone)]
pub struct StreamerConfig {
    pub constants: PhysicalConstants,
    pub pulse: GaussianPulse,
    pub spots: Vec<PlasmaSpot>,
    /// Potential at the `inlet` patch, V.
    pub inlet_potential: f64,
    /// Potential at the `outlet` patch, V.
    pub outlet_potential: f64,
    pub dt: f64,
    pub steps: usize,
    /// Snapshot every `cadence` steps; 0 disables snapshots.
    pub cadence: usize,
    pub solver: SolverConfig,
    /// Forces `S_e = 0`, spots included.
    pub disable_source: bool,
    /// Closes every boundary for electrons (no convective or diffusive flux).
    pub zero_flux: bool,
    pub second_order: bool,
}

impl Default for StreamerConfig {
    fn default() -> Self {
        StreamerConfig {
            constants: PhysicalConstants::default(),
            pulse: GaussianPulse::default(),
            spots: PlasmaSpot::branching_pair(),
            inlet_potential: 12500.0,
            outlet_potential: 0.0,
            dt: 8.2e-13,
            steps: 25000,
            cadence: 1000,
            solver: SolverConfig::default(),
            disable_source: false,
            zero_flux: false,
            second_order: true,
        }
    }
}

impl StreamerConfig {
    pub fn validate(&self) -> Result<(), StreamerError> {
        self.constants.validate()?;
        if !(self.dt > 0.0) {
            return Err(StreamerError::Config(format!("dt must be positive, got {}", self.dt)));
        }
        if !(self.pulse.sigma > 0.0) {
            return Err(StreamerError::Config("pulse sigma must be positive".into()));
        }
        for s in &self.spots {
            s.validate()?;
        }
        self.solver.validate()?;
        Ok(())
    }
}

/// Boundary conditions of the potential and of the densities.
#[derive(Debug, Clone)]
pub struct StreamerBcs {
    pub potential: BoundaryConditions,
    pub density: BoundaryConditions,
}

/// Dirichlet potential on `inlet` and `outlet`, homogeneous Neumann on every
/// other patch; densities are zero-gradient everywhere, or closed walls when
/// `zero_flux` is set.
pub fn boundary_conditions(
    patch_names: &[String],
    config: &StreamerConfig,
) -> Result<StreamerBcs, StreamerError> {
    for p in ["inlet", "outlet"] {
        if !patch_names.iter().any(|n| n == p) {
            return Err(StreamerError::MissingPatch(p.into()));
        }
    }
    let mut potential = BoundaryConditions::uniform(patch_names, BoundaryCondition::Neumann);
    potential.set("inlet", BoundaryCondition::dirichlet(config.inlet_potential))?;
    potential.set("outlet", BoundaryCondition::dirichlet(config.outlet_potential))?;
    let density = BoundaryConditions::uniform(
        patch_names,
        if config.zero_flux {
            BoundaryCondition::Wall
        } else {
            BoundaryCondition::Neumann
        },
    );
    Ok(StreamerBcs { potential, density })
}

/// Per-partition state. Vector fields have three components per slot.
#[derive(Debug, Clone)]
pub struct StreamerState {
    /// `(n_e, n_p)` per slot, cm⁻³.
    pub densities: CellField,
    /// Potential, V.
    pub potential: CellField,
    /// Electric field, V/cm.
    pub field: CellField,
    /// Electron drift velocity, cm/s.
    pub velocity: CellField,
    /// Electron diffusion coefficient, cm²/s.
    pub diffusion: CellField,
    /// Electron source of the last stage, per inner cell.
    pub source: Vec<f64>,
    pub t: f64,
    pub dt: f64,
    pub step: usize,
}

impl StreamerState {
    pub fn n_e(&self, slot: usize) -> f64 {
        self.densities.slot(slot)[0]
    }

    pub fn n_p(&self, slot: usize) -> f64 {
        self.densities.slot(slot)[1]
    }
}

/// Gaussian electron pulse with ions equal to electrons (zero net charge);
/// potential and field stay zero until the first solve.
pub fn init_state(domain: &LocalDomain, config: &StreamerConfig) -> StreamerState {
    let mut densities = CellField::zeros(domain, 2);
    for i in 0..domain.n_inner {
        let n = config.pulse.value(domain.centers[i]);
        densities.slot_mut(i).copy_from_slice(&[n, n]);
    }
    StreamerState {
        densities,
        potential: CellField::scalar(domain),
        field: CellField::zeros(domain, 3),
        velocity: CellField::zeros(domain, 3),
        diffusion: CellField::scalar(domain),
        source: vec![0.0; domain.n_inner],
        t: 0.0,
        dt: config.dt,
        step: 0,
    }
}

/// Whether the pulse centre lies inside the axis-aligned bounds.
pub fn pulse_inside(pulse: &GaussianPulse, bounds: (Vec3, Vec3)) -> bool {
    (0..3).all(|d| pulse.center[d] >= bounds.0[d] && pulse.center[d] <= bounds.1[d])
}
