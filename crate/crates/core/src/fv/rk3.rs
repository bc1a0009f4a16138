use super::{CellField, FvError};
use crate::exchange::{exchange_halo, Transport};
use crate::partition::LocalDomain;
use std::time::{Duration, Instant};

/// Stage coefficients of the three-stage scheme.
pub const RK3_ALPHA: [f64; 3] = [0.5, 0.5, 1.0];

/// Advances `u` by `dt`:
///
/// ```text
/// u1 = u + 0.5 dt R(u)
/// u2 = u + 0.5 dt R(u1)
/// u  = u + dt R(u2)
/// ```
///
/// Halos of each stage value are exchanged before `rhs` sees it. `rhs`
/// returns the time derivative at the inner cells; its error type only needs
/// to absorb [`FvError`]. A non-finite value after any stage aborts with the
/// stage number (1-based). Returns the time spent in the stage halo exchanges.
pub fn rk3_step<T, F, E>(
    domain: &LocalDomain,
    t: &mut T,
    u: &mut CellField,
    dt: f64,
    mut rhs: F,
) -> Result<Duration, E>
where
    T: Transport,
    F: FnMut(&mut T, &mut CellField) -> Result<Vec<f64>, E>,
    E: From<FvError>,
{
    if !(dt > 0.0) {
        return Err(FvError::InvalidArgument(format!("time step must be positive, got {dt}")).into());
    }
    let nc = u.ncomp();
    let n = domain.n_inner * nc;
    let base = u.inner(domain).to_vec();
    let mut stage = u.clone();
    let mut comm = Duration::ZERO;
    for (k, alpha) in RK3_ALPHA.iter().enumerate() {
        let clock = Instant::now();
        exchange_halo(domain, t, &mut [&mut stage]).map_err(FvError::from)?;
        comm += clock.elapsed();
        let r = rhs(t, &mut stage)?;
        if r.len() != n {
            return Err(FvError::InvalidArgument(format!(
                "right-hand side has {} values, expected {n}",
                r.len()
            ))
            .into());
        }
        let next = &mut stage.values_mut()[..n];
        for ((x, b), d) in next.iter_mut().zip(&base).zip(&r) {
            *x = b + alpha * dt * d;
        }
        if let Some(bad) = next.iter().position(|x| !x.is_finite()) {
            return Err(FvError::NonFinite {
                stage: k + 1,
                cell: domain.cell_global[bad / nc],
            }
            .into());
        }
    }
    u.values_mut()[..n].copy_from_slice(&stage.values()[..n]);
    Ok(comm)
}
