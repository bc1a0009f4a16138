//! Transport coefficients of the drift-diffusion discharge model.
//!
//! Units follow the usual gas-discharge convention: lengths in cm, fields in
//! V/cm, densities in cm⁻³, times in s. `E/N` is therefore in V·cm².

use super::StreamerError;
use crate::vec3::{self, Vec3};

/// Neutral gas density at atmospheric pressure, cm⁻³.
pub const NEUTRAL_DENSITY: f64 = 2.5e19;
/// Elementary charge, C.
pub const ELEMENTARY_CHARGE: f64 = 1.602_176_634e-19;
/// Vacuum permittivity, F/cm.
pub const VACUUM_PERMITTIVITY: f64 = 8.854_187_812_8e-14;

/// Fields weaker than this are treated as zero when a direction is needed.
pub const FIELD_EPSILON: f64 = 1e-30;

/// `E/N` at which the ionization fit switches branches.
pub const IONIZATION_SWITCH: f64 = 1.5e-15;

/// Piecewise drift-velocity coefficients, `|v_e| = C1 |E|/N + C2`.
///
/// Rows are `(threshold, C1, C2)` with decreasing thresholds; the first row
/// whose threshold is strictly below `E/N` applies, and the last row covers
/// everything else.
#[derive(Debug, Clone, PartialEq)]
pub struct VelocityTable {
    pub rows: Vec<(f64, f64, f64)>,
}

impl Default for VelocityTable {
    /// Four-range fit for air (placeholder values, override per run).
    fn default() -> Self {
        VelocityTable {
            rows: vec![
                (2e-15, 7.4e21, 7.1e6),
                (1e-16, 1.03e22, 1.3e6),
                (2.6e-17, 7.2973e21, 1.63e6),
                (0.0, 6.87e22, 3.38e4),
            ],
        }
    }
}

impl VelocityTable {
    pub fn new(rows: Vec<(f64, f64, f64)>) -> Result<Self, StreamerError> {
        if rows.is_empty() {
            return Err(StreamerError::Config("velocity table is empty".into()));
        }
        if rows.windows(2).any(|w| !(w[0].0 > w[1].0)) {
            return Err(StreamerError::Config(
                "velocity table thresholds must strictly decrease".into(),
            ));
        }
        if rows.iter().any(|r| !(r.0.is_finite() && r.1.is_finite() && r.2.is_finite())) {
            return Err(StreamerError::Config("velocity table has non-finite entries".into()));
        }
        Ok(VelocityTable { rows })
    }

    /// Parses whitespace-separated `threshold C1 C2` lines; `#` starts a comment.
    pub fn parse(text: &str) -> Result<Self, StreamerError> {
        let mut rows = Vec::new();
        for (i, line) in text.lines().enumerate() {
            let line = line.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let v: Vec<f64> = line
                .split_whitespace()
                .map(str::parse)
                .collect::<Result<_, _>>()
                .map_err(|e| StreamerError::Config(format!("velocity table line {}: {e}", i + 1)))?;
            if v.len() != 3 {
                return Err(StreamerError::Config(format!(
                    "velocity table line {}: expected 3 numbers, got {}",
                    i + 1,
                    v.len()
                )));
            }
            rows.push((v[0], v[1], v[2]));
        }
        Self::new(rows)
    }

    pub fn coefficients(&self, e_over_n: f64) -> (f64, f64) {
        let row = self
            .rows
            .iter()
            .find(|r| e_over_n > r.0)
            .unwrap_or_else(|| self.rows.last().expect("non-empty table"));
        (row.1, row.2)
    }
}

/// Gas and field constants of a run.
#[derive(Debug, Clone, PartialEq)]
pub struct PhysicalConstants {
    pub neutral_density: f64,
    pub charge: f64,
    pub permittivity: f64,
    pub velocity: VelocityTable,
}

impl Default for PhysicalConstants {
    fn default() -> Self {
        PhysicalConstants {
            neutral_density: NEUTRAL_DENSITY,
            charge: ELEMENTARY_CHARGE,
            permittivity: VACUUM_PERMITTIVITY,
            velocity: VelocityTable::default(),
        }
    }
}

impl PhysicalConstants {
    pub fn validate(&self) -> Result<(), StreamerError> {
        if !(self.neutral_density > 0.0) || !(self.permittivity > 0.0) || !(self.charge > 0.0) {
            return Err(StreamerError::Config(
                "neutral density, permittivity and charge must be positive".into(),
            ));
        }
        Ok(())
    }
}

/// Townsend ionization coefficient over gas density, α/N in cm².
pub fn ionization_ratio(e_over_n: f64) -> Result<f64, StreamerError> {
    if !(e_over_n >= 0.0) {
        return Err(StreamerError::InvalidInput(format!(
            "E/N must be non-negative, got {e_over_n}"
        )));
    }
    if e_over_n == 0.0 {
        return Ok(0.0);
    }
    Ok(if e_over_n > IONIZATION_SWITCH {
        2e-16 * (-7.248e-15 / e_over_n).exp()
    } else {
        6.669e-17 * (-5.593e-15 / e_over_n).exp()
    })
}

/// Electron drift velocity, antiparallel to the field.
pub fn electron_velocity(e: Vec3, c: &PhysicalConstants) -> Vec3 {
    let norm = vec3::norm(e);
    if norm < FIELD_EPSILON {
        return [0.0; 3];
    }
    let x = norm / c.neutral_density;
    let (c1, c2) = c.velocity.coefficients(x);
    vec3::scale(e, -(c1 * x + c2) / norm)
}

/// Scalar electron diffusion coefficient in cm²/s: the magnitude of
/// `-0.3341e9 (|E|/N)^0.54069 v_e / |E|`.
pub fn electron_diffusion(e: Vec3, v: Vec3, c: &PhysicalConstants) -> f64 {
    let norm = vec3::norm(e);
    if norm < FIELD_EPSILON {
        return 0.0;
    }
    let x = norm / c.neutral_density;
    0.3341e9 * x.powf(0.54069) * vec3::norm(v) / norm
}

/// Electron impact ionization rate `α |v_e| n_e`, in cm⁻³ s⁻¹.
pub fn ionization_source(e: Vec3, v: Vec3, n_e: f64, c: &PhysicalConstants) -> Result<f64, StreamerError> {
    let x = vec3::norm(e) / c.neutral_density;
    Ok(ionization_ratio(x)? * c.neutral_density * vec3::norm(v) * n_e)
}
