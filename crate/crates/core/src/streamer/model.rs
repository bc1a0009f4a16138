use super::physics::{electron_diffusion, electron_velocity, ionization_source};
use super::{
    boundary_conditions, plasma_spot_source, StreamerBcs, StreamerConfig, StreamerError,
    StreamerState,
};
use crate::exchange::{allreduce_max, allreduce_sum, exchange_halo, Transport};
use crate::fv::{
    cell_gradient_into, cfl_time_step, fill_ghosts, rk3_step, CellField, ConvectionDiffusion,
    Diffusivity, RK3_ALPHA,
};
use crate::linsys::{assemble_poisson, DistVector, PoissonSolver};
use crate::partition::LocalDomain;
use crate::vec3;
use std::time::{Duration, Instant};

/// Accumulated wall-clock time per phase, one set per partition.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct StreamerTimes {
    pub cell_gradient: Duration,
    pub face_gradient: Duration,
    pub fluxes: Duration,
    pub least_squares: Duration,
    pub solver: Duration,
    pub communication: Duration,
}

/// Outcome of one time step.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StepReport {
    /// FGMRES iterations summed over the three stages.
    pub poisson_iterations: usize,
    /// Largest relative residual of the stage solves.
    pub poisson_residual: f64,
}

/// Global integrals and extrema, identical on every partition.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Diagnostics {
    pub step: usize,
    pub time: f64,
    /// Volume integral of `n_e`.
    pub electrons: f64,
    /// Volume integral of `n_p`.
    pub ions: f64,
    /// Volume integral of `n_p - n_e`.
    pub net_charge: f64,
    pub max_electron_density: f64,
    pub max_field: f64,
    pub negative_cells: usize,
}

impl Diagnostics {
    pub const CSV_HEADER: &'static str =
        "step,time,electrons,ions,net_charge,max_ne,max_field,negative_cells";

    pub fn csv_row(&self) -> String {
        format!(
            "{},{:e},{:e},{:e},{:e},{:e},{:e},{}",
            self.step,
            self.time,
            self.electrons,
            self.ions,
            self.net_charge,
            self.max_electron_density,
            self.max_field,
            self.negative_cells
        )
    }
}

/// The operators of one partition: transport residual, potential solver and
/// boundary conditions.
#[derive(Debug, Clone)]
pub struct StreamerModel {
    pub config: StreamerConfig,
    pub bcs: StreamerBcs,
    pub transport: ConvectionDiffusion,
    pub poisson: PoissonSolver,
    pub times: StreamerTimes,
}

impl StreamerModel {
    pub fn new(domain: &LocalDomain, config: StreamerConfig) -> Result<Self, StreamerError> {
        config.validate()?;
        let bcs = boundary_conditions(&domain.patch_names, &config)?;
        let mut transport = ConvectionDiffusion::new(domain, bcs.density.clone())?;
        transport.second_order = config.second_order;
        let system = assemble_poisson(domain, &transport.node_weights, &bcs.potential)?;
        let poisson = PoissonSolver::new(system, config.solver)?;
        Ok(StreamerModel {
            config,
            bcs,
            transport,
            poisson,
            times: StreamerTimes::default(),
        })
    }

    /// Fills the ghost slots of the potential and densities from the
    /// boundary conditions. Halo values must be current.
    pub fn apply_bcs(&self, domain: &LocalDomain, state: &mut StreamerState) {
        fill_ghosts(domain, &self.bcs.potential, &mut state.potential);
        fill_ghosts(domain, &self.bcs.density, &mut state.densities);
    }

    /// Solves for the potential of the current densities and refreshes field,
    /// drift velocity, diffusion and source, without advancing time.
    pub fn update_fields(
        &mut self,
        domain: &LocalDomain,
        t: &mut impl Transport,
        state: &mut StreamerState,
    ) -> Result<StepReport, StreamerError> {
        exchange_halo(domain, t, &mut [&mut state.densities])?;
        let mut coupling = Coupling {
            model: self,
            potential: &mut state.potential,
            field: &mut state.field,
            velocity: &mut state.velocity,
            diffusion: &mut state.diffusion,
            source: &mut state.source,
            iterations: 0,
            residual: 0.0,
            step: state.step,
        };
        coupling.stage(domain, t, &mut state.densities, state.t)?;
        Ok(StepReport {
            poisson_iterations: coupling.iterations,
            poisson_residual: coupling.residual,
        })
    }

    /// Advances the densities by one step of the three-stage scheme, solving
    /// for the potential at every stage.
    pub fn step(
        &mut self,
        domain: &LocalDomain,
        t: &mut impl Transport,
        state: &mut StreamerState,
    ) -> Result<StepReport, StreamerError> {
        let (t0, dt) = (state.t, state.dt);
        let mut coupling = Coupling {
            model: self,
            potential: &mut state.potential,
            field: &mut state.field,
            velocity: &mut state.velocity,
            diffusion: &mut state.diffusion,
            source: &mut state.source,
            iterations: 0,
            residual: 0.0,
            step: state.step,
        };
        let mut k = 0;
        let comm = rk3_step(domain, t, &mut state.densities, dt, |t, stage| {
            // stage k evaluates at the time its input state belongs to
            let time = if k == 0 { t0 } else { t0 + RK3_ALPHA[k - 1] * dt };
            k += 1;
            coupling.stage(domain, t, stage, time)
        })?;
        let report = StepReport {
            poisson_iterations: coupling.iterations,
            poisson_residual: coupling.residual,
        };
        self.times.communication += comm;
        state.t = t0 + dt;
        state.step += 1;
        Ok(report)
    }

    /// Global integrals of the current state (collective).
    pub fn diagnostics(
        &self,
        domain: &LocalDomain,
        t: &mut impl Transport,
        state: &StreamerState,
    ) -> Result<Diagnostics, StreamerError> {
        let mut sums = [0.0; 4];
        let mut maxima = [f64::NEG_INFINITY; 2];
        for i in 0..domain.n_inner {
            let (ne, np, vol) = (state.n_e(i), state.n_p(i), domain.volumes[i]);
            sums[0] += ne * vol;
            sums[1] += np * vol;
            sums[2] += (np - ne) * vol;
            if ne < 0.0 {
                sums[3] += 1.0;
            }
            maxima[0] = maxima[0].max(ne);
            maxima[1] = maxima[1].max(vec3::norm(state.field.vec3(i)));
        }
        let sums = allreduce_sum(t, &sums)?;
        let maxima = allreduce_max(t, &maxima)?;
        Ok(Diagnostics {
            step: state.step,
            time: state.t,
            electrons: sums[0],
            ions: sums[1],
            net_charge: sums[2],
            max_electron_density: maxima[0],
            max_field: maxima[1],
            negative_cells: sums[3] as usize,
        })
    }

    /// Smallest of the convective, diffusive and dielectric-relaxation time
    /// scales of the current fields (collective). Advisory only.
    pub fn advisory_time_step(
        &self,
        domain: &LocalDomain,
        t: &mut impl Transport,
        state: &StreamerState,
    ) -> Result<f64, StreamerError> {
        let c = &self.config.constants;
        let mut best = cfl_time_step(domain, &state.velocity, 0.5);
        for i in 0..domain.n_inner {
            let d = state.diffusion.get(i);
            if d > 0.0 {
                let h = domain.volumes[i].cbrt();
                best = best.min(h * h / (6.0 * d));
            }
            let e = vec3::norm(state.field.vec3(i));
            let v = vec3::norm(state.velocity.vec3(i));
            let ne = state.n_e(i);
            if e > 0.0 && v > 0.0 && ne > 0.0 {
                let mobility = v / e;
                best = best.min(c.permittivity / (c.charge * mobility * ne));
            }
        }
        Ok(-allreduce_max(t, &[-best])?[0])
    }
}

/// Borrowed pieces of model and state used inside one stage evaluation.
struct Coupling<'a> {
    model: &'a mut StreamerModel,
    potential: &'a mut CellField,
    field: &'a mut CellField,
    velocity: &'a mut CellField,
    diffusion: &'a mut CellField,
    source: &'a mut Vec<f64>,
    iterations: usize,
    residual: f64,
    step: usize,
}

impl Coupling<'_> {
    /// Right-hand side `(dn_e/dt, dn_p/dt)` per inner cell of the densities
    /// in `stage` (halo current) at time `time`.
    fn stage(
        &mut self,
        domain: &LocalDomain,
        t: &mut impl Transport,
        stage: &mut CellField,
        time: f64,
    ) -> Result<Vec<f64>, StreamerError> {
        let n = domain.n_inner;
        let m = &mut *self.model;
        let c = m.config.constants.clone();

        // potential
        let clock = Instant::now();
        let scale = -c.charge / c.permittivity;
        let f: Vec<f64> = (0..n)
            .map(|i| scale * (stage.slot(i)[1] - stage.slot(i)[0]))
            .collect();
        let cells = domain.num_cell_slots();
        let mut p = DistVector {
            values: self.potential.values()[..cells].to_vec(),
            n_inner: n,
        };
        let report = m
            .poisson
            .solve(domain, t, &f, &mut p)
            .map_err(|source| StreamerError::Solver {
                step: self.step,
                source,
            })?;
        self.iterations += report.iterations;
        self.residual = self.residual.max(report.residual);
        m.times.solver += clock.elapsed();

        let clock = Instant::now();
        p.exchange(domain, t)?;
        m.times.communication += clock.elapsed();
        self.potential.values_mut()[..cells].copy_from_slice(&p.values);
        fill_ghosts(domain, &m.bcs.potential, self.potential);

        // field and coefficients
        let clock = Instant::now();
        cell_gradient_into(domain, self.potential, &m.transport.grad_coeffs, self.field);
        for x in &mut self.field.values_mut()[..3 * n] {
            *x = -*x;
        }
        m.times.cell_gradient += clock.elapsed();

        let sources_on = !m.config.disable_source;
        for i in 0..n {
            let e = self.field.vec3(i);
            let v = electron_velocity(e, &c);
            self.velocity.set_vec3(i, v);
            self.diffusion.set(i, electron_diffusion(e, v, &c));
            self.source[i] = if sources_on {
                ionization_source(e, v, stage.slot(i)[0], &c)?
            } else {
                0.0
            };
        }
        if sources_on {
            plasma_spot_source(domain, &m.config.spots, time, self.source);
        }
        let clock = Instant::now();
        exchange_halo(
            domain,
            t,
            &mut [&mut *self.field, &mut *self.velocity, &mut *self.diffusion],
        )?;
        m.times.communication += clock.elapsed();

        // electron transport
        let mut ne = CellField::scalar(domain);
        for s in 0..cells {
            ne.set(s, stage.slot(s)[0]);
        }
        let before = m.transport.times;
        let r = m.transport.residual(
            domain,
            t,
            &mut ne,
            self.velocity,
            Diffusivity::PerCell(self.diffusion),
            Some(self.source),
        )?;
        let after = m.transport.times;
        m.times.cell_gradient += after.cell_gradient - before.cell_gradient;
        m.times.face_gradient += after.face_gradient - before.face_gradient;
        m.times.fluxes += after.fluxes - before.fluxes;
        m.times.least_squares += after.node_interpolation - before.node_interpolation;
        m.times.communication += after.communication - before.communication;

        Ok((0..n).flat_map(|i| [r[i], self.source[i]]).collect())
    }
}
