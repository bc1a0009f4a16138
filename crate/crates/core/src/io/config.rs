//! Flat `key = value` configuration files.
//!
//! One entry per line; `#` starts a comment; blank lines are ignored. Keys
//! are unique. Readers take values out with the typed getters and call
//! [`KeyValues::finish`] to reject keys nobody asked for.

use crate::fv::{BoundaryCondition, BoundaryConditions};
use crate::linsys::SolverConfig;
use crate::streamer::{PlasmaSpot, StreamerConfig, VelocityTable};
use std::cell::RefCell;
use std::collections::{BTreeMap, BTreeSet};
use std::path::{Path, PathBuf};
use std::str::FromStr;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("{file}:{line}: {msg}")]
    Syntax {
        file: String,
        line: usize,
        msg: String,
    },
    #[error("{file}: missing key '{key}'")]
    Missing { file: String, key: String },
    #[error("{file}: key '{key}': {msg}")]
    Invalid {
        file: String,
        key: String,
        msg: String,
    },
    #[error("{file}: unknown key(s): {keys}")]
    Unknown { file: String, keys: String },
    #[error("cannot read {file}: {source}")]
    Io {
        file: String,
        #[source]
        source: std::io::Error,
    },
}

#[derive(Debug, Clone)]
pub struct KeyValues {
    /// Where the entries came from, used in messages.
    pub origin: String,
    entries: BTreeMap<String, (usize, String)>,
    used: RefCell<BTreeSet<String>>,
}

impl KeyValues {
    pub fn parse(text: &str, origin: &str) -> Result<Self, ConfigError> {
        let mut entries = BTreeMap::new();
        for (i, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let syntax = |msg: String| ConfigError::Syntax {
                file: origin.into(),
                line: i + 1,
                msg,
            };
            let (k, v) = line
                .split_once('=')
                .ok_or_else(|| syntax(format!("expected 'key = value', got '{line}'")))?;
            let (k, v) = (k.trim(), v.trim());
            if k.is_empty() {
                return Err(syntax("empty key".into()));
            }
            if entries.insert(k.to_string(), (i + 1, v.to_string())).is_some() {
                return Err(syntax(format!("duplicate key '{k}'")));
            }
        }
        Ok(KeyValues {
            origin: origin.into(),
            entries,
            used: RefCell::default(),
        })
    }

    pub fn load(path: &Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path).map_err(|source| ConfigError::Io {
            file: path.display().to_string(),
            source,
        })?;
        Self::parse(&text, &path.display().to_string())
    }

    pub fn get(&self, key: &str) -> Option<&str> {
        let v = self.entries.get(key).map(|(_, v)| v.as_str());
        if v.is_some() {
            self.used.borrow_mut().insert(key.to_string());
        }
        v
    }

    pub fn require(&self, key: &str) -> Result<&str, ConfigError> {
        self.get(key).ok_or_else(|| ConfigError::Missing {
            file: self.origin.clone(),
            key: key.into(),
        })
    }

    pub fn invalid(&self, key: &str, msg: impl Into<String>) -> ConfigError {
        ConfigError::Invalid {
            file: self.origin.clone(),
            key: key.into(),
            msg: msg.into(),
        }
    }

    /// Parsed value of `key`, if present.
    pub fn parse_opt<T: FromStr>(&self, key: &str) -> Result<Option<T>, ConfigError>
    where
        T::Err: std::fmt::Display,
    {
        self.get(key)
            .map(|v| v.parse::<T>().map_err(|e| self.invalid(key, format!("'{v}': {e}"))))
            .transpose()
    }

    pub fn parse_or<T: FromStr>(&self, key: &str, default: T) -> Result<T, ConfigError>
    where
        T::Err: std::fmt::Display,
    {
        Ok(self.parse_opt(key)?.unwrap_or(default))
    }

    /// Comma- or whitespace-separated numbers.
    pub fn numbers(&self, key: &str) -> Result<Option<Vec<f64>>, ConfigError> {
        self.get(key)
            .map(|v| parse_numbers(v).map_err(|m| self.invalid(key, m)))
            .transpose()
    }

    /// Exactly three numbers.
    pub fn vec3(&self, key: &str) -> Result<Option<[f64; 3]>, ConfigError> {
        match self.numbers(key)? {
            None => Ok(None),
            Some(v) if v.len() == 3 => Ok(Some([v[0], v[1], v[2]])),
            Some(v) => Err(self.invalid(key, format!("expected 3 numbers, got {}", v.len()))),
        }
    }

    /// Keys that start with `prefix`, in sorted order (marked as used).
    pub fn with_prefix(&self, prefix: &str) -> Vec<(String, String)> {
        let hits: Vec<(String, String)> = self
            .entries
            .iter()
            .filter(|(k, _)| k.starts_with(prefix))
            .map(|(k, (_, v))| (k.clone(), v.clone()))
            .collect();
        self.used
            .borrow_mut()
            .extend(hits.iter().map(|(k, _)| k.clone()));
        hits
    }

    /// Fails if any key was never read.
    pub fn finish(&self) -> Result<(), ConfigError> {
        let used = self.used.borrow();
        let unknown: Vec<&str> = self
            .entries
            .keys()
            .filter(|k| !used.contains(*k))
            .map(String::as_str)
            .collect();
        if unknown.is_empty() {
            Ok(())
        } else {
            Err(ConfigError::Unknown {
                file: self.origin.clone(),
                keys: unknown.join(", "),
            })
        }
    }
}

pub fn parse_numbers(v: &str) -> Result<Vec<f64>, String> {
    v.split(|c: char| c == ',' || c.is_whitespace())
        .filter(|w| !w.is_empty())
        .map(|w| w.parse::<f64>().map_err(|e| format!("'{w}': {e}")))
        .collect()
}

/// `dirichlet <value>`, `neumann` or `wall`.
pub fn parse_boundary_condition(v: &str) -> Result<BoundaryCondition, String> {
    let mut words = v.split_whitespace();
    let kind = words.next().unwrap_or("").to_ascii_lowercase();
    let bc = match kind.as_str() {
        "dirichlet" => {
            let value = words
                .next()
                .ok_or("dirichlet needs a value")?
                .parse::<f64>()
                .map_err(|e| format!("dirichlet value: {e}"))?;
            BoundaryCondition::dirichlet(value)
        }
        "neumann" => BoundaryCondition::Neumann,
        "wall" => BoundaryCondition::Wall,
        other => return Err(format!("unknown boundary condition '{other}'")),
    };
    if let Some(extra) = words.next() {
        return Err(format!("unexpected '{extra}' after boundary condition"));
    }
    Ok(bc)
}

/// Builds boundary conditions from `<prefix><patch> = <bc>` entries; patches
/// without an entry get `default`. Unknown patch names are errors.
pub fn boundary_conditions(
    kv: &KeyValues,
    prefix: &str,
    patch_names: &[String],
    default: BoundaryCondition,
) -> Result<BoundaryConditions, ConfigError> {
    let mut bcs = BoundaryConditions::uniform(patch_names, default);
    for (key, value) in kv.with_prefix(prefix) {
        let patch = &key[prefix.len()..];
        let bc = parse_boundary_condition(&value).map_err(|m| kv.invalid(&key, m))?;
        bcs.set(patch, bc).map_err(|e| kv.invalid(&key, e.to_string()))?;
    }
    Ok(bcs)
}

/// Solver settings from `<prefix>method`, `preconditioner`, `tol`, `restart`
/// and `max_iter`, on top of the defaults.
pub fn solver_config(kv: &KeyValues, prefix: &str) -> Result<SolverConfig, ConfigError> {
    let d = SolverConfig::default();
    let key = |k: &str| format!("{prefix}{k}");
    let config = SolverConfig {
        method: kv.parse_or(&key("method"), d.method)?,
        preconditioner: kv.parse_or(&key("preconditioner"), d.preconditioner)?,
        tol: kv.parse_or(&key("tol"), d.tol)?,
        restart: kv.parse_or(&key("restart"), d.restart)?,
        max_iter: kv.parse_or(&key("max_iter"), d.max_iter)?,
    };
    config
        .validate()
        .map_err(|e| kv.invalid(&key("*"), e.to_string()))?;
    Ok(config)
}

/// Resolves a path from a config file relative to the file's directory.
pub fn resolve_path(base: &Path, value: &str) -> PathBuf {
    let p = Path::new(value);
    if p.is_absolute() {
        p.to_path_buf()
    } else {
        base.join(p)
    }
}

/// Run length from `steps`, or from `t_end / dt` rounded to the nearest step.
pub fn step_count(kv: &KeyValues, dt: f64) -> Result<Option<usize>, ConfigError> {
    match (kv.parse_opt::<usize>("steps")?, kv.parse_opt::<f64>("t_end")?) {
        (Some(_), Some(_)) => Err(kv.invalid("steps", "give either steps or t_end, not both")),
        (Some(n), None) => Ok(Some(n)),
        (None, Some(t)) if t > 0.0 && dt > 0.0 => Ok(Some((t / dt).round() as usize)),
        (None, Some(t)) => Err(kv.invalid("t_end", format!("needs a positive t_end and dt, got {t}"))),
        (None, None) => Ok(None),
    }
}

/// Streamer settings. Keys (all optional): `dt`, `steps` | `t_end`,
/// `cadence`, `inlet_potential`, `outlet_potential`, `disable_source`,
/// `zero_flux`, `second_order`, `neutral_density`, `constants` (velocity
/// table file), `pulse.center`, `pulse.sigma`, `pulse.peak`,
/// `pulse.background`, `spots` (`default`, `none` or
/// `x y z start duration; ...`), `spot.amplitude`, `spot.width` and the
/// `solver.*` keys of [`solver_config`].
pub fn streamer_config(kv: &KeyValues, base: &Path) -> Result<StreamerConfig, ConfigError> {
    let mut c = StreamerConfig::default();
    c.dt = kv.parse_or("dt", c.dt)?;
    if let Some(n) = step_count(kv, c.dt)? {
        c.steps = n;
    }
    c.cadence = kv.parse_or("cadence", c.cadence)?;
    c.inlet_potential = kv.parse_or("inlet_potential", c.inlet_potential)?;
    c.outlet_potential = kv.parse_or("outlet_potential", c.outlet_potential)?;
    c.disable_source = kv.parse_or("disable_source", c.disable_source)?;
    c.zero_flux = kv.parse_or("zero_flux", c.zero_flux)?;
    c.second_order = kv.parse_or("second_order", c.second_order)?;
    c.constants.neutral_density = kv.parse_or("neutral_density", c.constants.neutral_density)?;
    if let Some(file) = kv.get("constants") {
        let path = resolve_path(base, file);
        let text = std::fs::read_to_string(&path).map_err(|source| ConfigError::Io {
            file: path.display().to_string(),
            source,
        })?;
        c.constants.velocity =
            VelocityTable::parse(&text).map_err(|e| kv.invalid("constants", e.to_string()))?;
    }
    if let Some(center) = kv.vec3("pulse.center")? {
        c.pulse.center = center;
    }
    c.pulse.sigma = kv.parse_or("pulse.sigma", c.pulse.sigma)?;
    c.pulse.peak = kv.parse_or("pulse.peak", c.pulse.peak)?;
    c.pulse.background = kv.parse_or("pulse.background", c.pulse.background)?;
    let amplitude = kv.parse_or("spot.amplitude", 1e25)?;
    let width = kv.parse_or("spot.width", 0.005)?;
    match kv.get("spots").map(str::trim) {
        None | Some("default") => {}
        Some("none") => c.spots.clear(),
        Some(list) => {
            c.spots.clear();
            for item in list.split(';').map(str::trim).filter(|s| !s.is_empty()) {
                let v = parse_numbers(item).map_err(|m| kv.invalid("spots", m))?;
                if v.len() != 5 {
                    return Err(kv.invalid("spots", format!("'{item}': expected x y z start duration")));
                }
                c.spots.push(PlasmaSpot {
                    center: [v[0], v[1], v[2]],
                    amplitude,
                    width,
                    start: v[3],
                    duration: v[4],
                });
            }
        }
    }
    for s in &mut c.spots {
        s.amplitude = amplitude;
        s.width = width;
    }
    c.solver = solver_config(kv, "solver.")?;
    c.validate().map_err(|e| kv.invalid("*", e.to_string()))?;
    Ok(c)
}
