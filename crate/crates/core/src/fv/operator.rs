use super::{
    barth_jespersen_into, cell_gradient_into, convective_flux, diffusive_flux, face_gradient,
    fill_ghosts, node_interpolate_into, BoundaryConditions, CellField, Diffusivity, FvError,
    GradStencilCoeffs, NodeField, NodeLSWeights,
};
use crate::exchange::{exchange_halo, Transport};
use crate::partition::LocalDomain;
use crate::vec3::Vec3;
use std::time::{Duration, Instant};

/// Wall-clock time spent in each phase of residual evaluations.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct PhaseTimes {
    pub cell_gradient: Duration,
    pub face_gradient: Duration,
    pub fluxes: Duration,
    pub node_interpolation: Duration,
    pub communication: Duration,
}

impl PhaseTimes {
    pub fn add(&mut self, other: &PhaseTimes) {
        self.cell_gradient += other.cell_gradient;
        self.face_gradient += other.face_gradient;
        self.fluxes += other.fluxes;
        self.node_interpolation += other.node_interpolation;
        self.communication += other.communication;
    }
}

/// Everything one partition needs to evaluate the convection-diffusion
/// residual `du/dt = -conv/vol + diff/vol + S` of a scalar.
#[derive(Debug, Clone)]
pub struct ConvectionDiffusion {
    pub grad_coeffs: GradStencilCoeffs,
    pub node_weights: NodeLSWeights,
    pub bcs: BoundaryConditions,
    /// Turns MUSCL reconstruction off (first-order upwind) when false.
    pub second_order: bool,
    pub times: PhaseTimes,
}

/// Intermediate fields of the last residual evaluation.
#[derive(Debug, Clone)]
pub struct ResidualParts {
    pub grad: CellField,
    pub psi: CellField,
    pub nodes: NodeField,
    pub face_grad: Vec<Vec3>,
    pub convective: Vec<f64>,
    pub diffusive: Vec<f64>,
}

impl ConvectionDiffusion {
    pub fn new(domain: &LocalDomain, bcs: BoundaryConditions) -> Result<Self, FvError> {
        Ok(ConvectionDiffusion {
            grad_coeffs: GradStencilCoeffs::build(domain)?,
            node_weights: NodeLSWeights::build(domain)?,
            bcs,
            second_order: true,
            times: PhaseTimes::default(),
        })
    }

    /// Residual at the inner cells. `u` must have current halo values; its
    /// ghosts are refreshed here. `vel` needs current halo values.
    /// `source`, if given, holds one value per inner cell.
    pub fn residual(
        &mut self,
        domain: &LocalDomain,
        t: &mut impl Transport,
        u: &mut CellField,
        vel: &CellField,
        diffusivity: Diffusivity<'_>,
        source: Option<&[f64]>,
    ) -> Result<Vec<f64>, FvError> {
        let parts = self.evaluate(domain, t, u, vel, diffusivity)?;
        Ok(combine(domain, &parts, source))
    }

    /// Computes gradients, limiter, node values and both flux balances.
    pub fn evaluate(
        &mut self,
        domain: &LocalDomain,
        t: &mut impl Transport,
        u: &mut CellField,
        vel: &CellField,
        diffusivity: Diffusivity<'_>,
    ) -> Result<ResidualParts, FvError> {
        fill_ghosts(domain, &self.bcs, u);

        let clock = Instant::now();
        let mut grad = CellField::zeros(domain, 3);
        cell_gradient_into(domain, u, &self.grad_coeffs, &mut grad);
        self.times.cell_gradient += clock.elapsed();

        let mut psi = CellField::scalar(domain);
        if self.second_order {
            let clock = Instant::now();
            exchange_halo(domain, t, &mut [&mut grad])?;
            self.times.communication += clock.elapsed();
            barth_jespersen_into(domain, u, &grad, &mut psi);
            let clock = Instant::now();
            exchange_halo(domain, t, &mut [&mut psi])?;
            self.times.communication += clock.elapsed();
        }

        let clock = Instant::now();
        let mut nodes = NodeField::zeros(domain);
        node_interpolate_into(domain, u, &self.node_weights, &mut nodes);
        self.times.node_interpolation += clock.elapsed();

        let clock = Instant::now();
        let face_grad = face_gradient(domain, u, &nodes);
        self.times.face_gradient += clock.elapsed();

        let clock = Instant::now();
        let convective = convective_flux(domain, &self.bcs, u, vel, &grad, &psi);
        let diffusive = diffusive_flux(domain, &self.bcs, &face_grad, diffusivity)?;
        self.times.fluxes += clock.elapsed();

        Ok(ResidualParts {
            grad,
            psi,
            nodes,
            face_grad,
            convective,
            diffusive,
        })
    }
}

/// `-conv/vol + diff/vol + S` per inner cell.
pub fn combine(domain: &LocalDomain, parts: &ResidualParts, source: Option<&[f64]>) -> Vec<f64> {
    (0..domain.n_inner)
        .map(|i| {
            let v = domain.volumes[i];
            let s = source.map_or(0.0, |s| s[i]);
            -parts.convective[i] / v + parts.diffusive[i] / v + s
        })
        .collect()
}
