//! Run configuration: a JSON document, patched by `--set` overrides, then
//! split into shared run settings and command-specific parameters.

use std::path::{Path, PathBuf};

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use serde_json::{Map, Value};

use crate::equilibrium::invert;
use crate::error::{Error, Result};
use crate::kernels::{sample_boundary_corner, sample_chain, sample_corner_direct};
use crate::sde::Integrator;
use crate::{OmegaPlusPoint, OrderedConfig};

/// Environment variable read when no seed is given on the command line or
/// in the document.
pub const SEED_ENV: &str = "HARDEDGE_SEED";

/// Keys shared by every command; everything else belongs to the command.
pub const RESERVED_KEYS: &[&str] = &["seed", "threads", "out", "experiment"];

/// Settings shared by all commands, after precedence is applied
/// (flag, then document, then environment, then default).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub seed: u64,
    /// `None` means one worker per logical core.
    pub threads: Option<usize>,
    pub out: PathBuf,
    pub experiment: Option<String>,
    /// Command-specific parameters, fully resolved.
    pub params: Value,
}

/// Loads a JSON object from `path`. Parse errors carry the line and column.
pub fn load_document(path: &Path) -> Result<Value> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::InvalidConfig(format!("{}: {e}", path.display())))?;
    let doc: Value = serde_json::from_str(&text)
        .map_err(|e| Error::InvalidConfig(format!("{}:{}:{}: {e}", path.display(), e.line(), e.column())))?;
    if !doc.is_object() {
        return Err(Error::InvalidConfig(format!("{}: top level must be a JSON object", path.display())));
    }
    Ok(doc)
}

/// Applies `dotted.key=value`. The value is parsed as JSON when possible
/// and kept as a string otherwise; missing intermediate objects are created.
pub fn apply_override(doc: &mut Value, spec: &str) -> Result<()> {
    let (key, raw) = spec
        .split_once('=')
        .ok_or_else(|| Error::InvalidConfig(format!("override `{spec}` is not of the form key=value")))?;
    let key = key.trim();
    if key.is_empty() || key.split('.').any(str::is_empty) {
        return Err(Error::InvalidConfig(format!("override `{spec}` has an empty key")));
    }
    let value = serde_json::from_str(raw.trim()).unwrap_or_else(|_| Value::String(raw.to_string()));
    let mut node = doc;
    let parts: Vec<&str> = key.split('.').collect();
    for (i, part) in parts.iter().enumerate() {
        let obj = node
            .as_object_mut()
            .ok_or_else(|| Error::InvalidConfig(format!("override `{key}`: `{}` is not an object", parts[..i].join("."))))?;
        if i + 1 == parts.len() {
            obj.insert(part.to_string(), value);
            return Ok(());
        }
        node = obj.entry(part.to_string()).or_insert_with(|| Value::Object(Map::new()));
    }
    unreachable!("key has at least one part")
}

/// Splits the document into [`RunConfig`] settings and the remaining
/// command parameters.
pub fn resolve(mut doc: Value, seed_flag: Option<u64>, threads_flag: Option<usize>, out_flag: Option<PathBuf>) -> Result<RunConfig> {
    let obj = doc.as_object_mut().ok_or_else(|| Error::InvalidConfig("configuration must be a JSON object".into()))?;
    let take = |obj: &mut Map<String, Value>, k: &str| obj.remove(k).filter(|v| !v.is_null());
    let seed = match (seed_flag, take(obj, "seed")) {
        (Some(s), _) => s,
        (None, Some(v)) => v.as_u64().ok_or_else(|| Error::InvalidConfig(format!("key `seed`: expected a nonnegative integer, got {v}")))?,
        (None, None) => match std::env::var(SEED_ENV) {
            Ok(s) => s.trim().parse().map_err(|_| Error::InvalidConfig(format!("{SEED_ENV} = `{s}` is not an integer")))?,
            Err(_) => 0,
        },
    };
    let threads = match (threads_flag, take(obj, "threads")) {
        (Some(t), _) => Some(t),
        (None, Some(v)) => Some(v.as_u64().ok_or_else(|| Error::InvalidConfig(format!("key `threads`: expected an integer, got {v}")))? as usize),
        (None, None) => None,
    };
    if threads == Some(0) {
        return Err(Error::InvalidConfig("key `threads` must be >= 1".into()));
    }
    let out = match (out_flag, take(obj, "out")) {
        (Some(p), _) => p,
        (None, Some(Value::String(s))) => PathBuf::from(s),
        (None, Some(v)) => return Err(Error::InvalidConfig(format!("key `out`: expected a path string, got {v}"))),
        (None, None) => PathBuf::from("out"),
    };
    let experiment = match take(obj, "experiment") {
        Some(Value::String(s)) => Some(s),
        Some(v) => return Err(Error::InvalidConfig(format!("key `experiment`: expected a string, got {v}"))),
        None => None,
    };
    Ok(RunConfig { seed, threads, out, experiment, params: doc })
}

/// Deserializes command parameters, naming the offending key on failure.
pub fn parse_params<T: DeserializeOwned>(params: &Value) -> Result<T> {
    serde_json::from_value(params.clone()).map_err(|e| Error::InvalidConfig(e.to_string()))
}

fn default_dt() -> f64 {
    1e-3
}

fn default_n() -> usize {
    1000
}

fn default_k() -> usize {
    1
}

/// Parameters of `simulate`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SimulateConfig {
    pub x0: Vec<f64>,
    /// Time horizon.
    pub t: f64,
    #[serde(default)]
    pub eta: f64,
    #[serde(default)]
    pub rescaled: bool,
    #[serde(default = "default_dt")]
    pub dt: f64,
    /// Spacing of saved states; defaults to `t / 100`.
    #[serde(default)]
    pub save_every: Option<f64>,
    #[serde(default)]
    pub integrator: Integrator,
}

impl SimulateConfig {
    pub fn save_times(&self) -> Result<Vec<f64>> {
        if !(self.t > 0.0 && self.t.is_finite()) {
            return Err(Error::InvalidConfig(format!("key `t` = {} must be positive", self.t)));
        }
        let every = self.save_every.unwrap_or(self.t / 100.0);
        if !(every > 0.0) {
            return Err(Error::InvalidConfig(format!("key `save_every` = {every} must be positive")));
        }
        let count = (self.t / every - 1e-9).ceil() as usize;
        Ok((1..=count).map(|k| (k as f64 * every).min(self.t)).collect())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum KernelMethod {
    /// Successive corners of Haar-conjugated matrices.
    #[default]
    Chain,
    /// One-step Stiefel construction.
    Direct,
    /// Corner of the boundary matrix; `x` is read as an Ω₊ sequence.
    Boundary,
}

/// Parameters of `sample-kernel`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SampleKernelConfig {
    pub x: Vec<f64>,
    #[serde(default = "default_k")]
    pub k: usize,
    #[serde(default = "default_n")]
    pub n: usize,
    #[serde(default)]
    pub method: KernelMethod,
    /// Total mass of the Ω₊ point for the boundary method; defaults to `Σ x`.
    #[serde(default)]
    pub gamma: Option<f64>,
    #[serde(default = "default_truncation")]
    pub truncation_eps: f64,
}

fn default_truncation() -> f64 {
    1e-12
}

impl SampleKernelConfig {
    pub fn sample<R: rand::Rng + ?Sized>(&self, rng: &mut R) -> Result<OrderedConfig> {
        match self.method {
            KernelMethod::Chain => sample_chain(&OrderedConfig::new(self.x.clone())?, self.k, rng),
            KernelMethod::Direct => sample_corner_direct(&OrderedConfig::new(self.x.clone())?, self.k, rng),
            KernelMethod::Boundary => {
                let omega = OmegaPlusPoint::new(self.x.clone(), self.gamma.unwrap_or(self.x.iter().sum()))?;
                sample_boundary_corner(&omega, self.k, self.truncation_eps, rng)
            }
        }
    }
}

/// Parameters of `sample-equilibrium`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SampleEquilibriumConfig {
    pub particles: usize,
    #[serde(default)]
    pub eta: f64,
    #[serde(default = "default_n")]
    pub n: usize,
    /// Divide every coordinate by the particle count.
    #[serde(default)]
    pub embed: bool,
    /// Write Laguerre eigenvalues instead of their inverses.
    #[serde(default)]
    pub laguerre: bool,
}

impl SampleEquilibriumConfig {
    pub fn sample<R: rand::Rng + ?Sized>(&self, rng: &mut R) -> Result<OrderedConfig> {
        let y = crate::equilibrium::sample_laguerre(self.particles, self.eta, rng)?;
        let x = if self.laguerre { y } else { invert(&y) };
        if self.embed {
            x.scaled(1.0 / self.particles as f64)
        } else {
            Ok(x)
        }
    }
}

/// Parameters of `kernel-table`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct KernelTableConfig {
    #[serde(default)]
    pub eta: f64,
    /// Explicit grid; when absent, `points` equally spaced values on `[start, stop]`.
    #[serde(default)]
    pub grid: Option<Vec<f64>>,
    #[serde(default = "default_start")]
    pub start: f64,
    #[serde(default = "default_stop")]
    pub stop: f64,
    #[serde(default = "default_points")]
    pub points: usize,
    #[serde(default = "default_scale")]
    pub scale: f64,
}

fn default_start() -> f64 {
    0.1
}

fn default_stop() -> f64 {
    5.0
}

fn default_points() -> usize {
    50
}

fn default_scale() -> f64 {
    8.0
}

impl KernelTableConfig {
    pub fn grid(&self) -> Result<Vec<f64>> {
        if let Some(g) = &self.grid {
            return Ok(g.clone());
        }
        if self.points == 0 || !(self.start > 0.0 && self.stop >= self.start) {
            return Err(Error::InvalidConfig("need points >= 1 and 0 < start <= stop".into()));
        }
        if self.points == 1 {
            return Ok(vec![self.start]);
        }
        let h = (self.stop - self.start) / (self.points - 1) as f64;
        Ok((0..self.points).map(|i| self.start + i as f64 * h).collect())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use serde_json::json;

    #[test]
    fn overrides_take_precedence_and_nest() {
        let mut doc = json!({"n": 10, "t": 1.0, "a": {"b": 1}});
        apply_override(&mut doc, "n=100").unwrap();
        apply_override(&mut doc, "t=0.5").unwrap();
        apply_override(&mut doc, "a.c=[1,2]").unwrap();
        apply_override(&mut doc, "name=abc").unwrap();
        assert_eq!(doc, json!({"n": 100, "t": 0.5, "a": {"b": 1, "c": [1, 2]}, "name": "abc"}));
        assert!(apply_override(&mut doc, "novalue").is_err());
        assert!(apply_override(&mut doc, "n.x=1").is_err());
        assert!(apply_override(&mut doc, "a..b=1").is_err());
    }

    #[test]
    fn resolve_precedence() {
        let doc = json!({"seed": 5, "threads": 2, "x0": [1.0]});
        let rc = resolve(doc.clone(), Some(9), None, None).unwrap();
        assert_eq!((rc.seed, rc.threads), (9, Some(2)));
        assert_eq!(rc.params, json!({"x0": [1.0]}));
        assert_eq!(resolve(doc, None, Some(1), Some("o".into())).unwrap().seed, 5);
        assert!(resolve(json!({"seed": -1}), None, None, None).is_err());
        assert!(resolve(json!({"threads": 0}), None, None, None).is_err());
    }

    #[test]
    fn unknown_and_missing_keys_are_named() {
        let err = parse_params::<SimulateConfig>(&json!({"x0": [1.0], "t": 1.0, "bogus": 1})).unwrap_err();
        assert!(err.to_string().contains("bogus"));
        let err = parse_params::<SimulateConfig>(&json!({"x0": [1.0]})).unwrap_err();
        assert!(err.to_string().contains("`t`"));
    }

    #[test]
    fn save_grid_ends_at_horizon() {
        let c: SimulateConfig = parse_params(&json!({"x0": [1.0], "t": 1.0, "save_every": 0.3})).unwrap();
        assert_eq!(c.save_times().unwrap(), vec![0.3, 0.6, 0.8999999999999999, 1.0]);
    }

    #[test]
    fn kernel_grid_defaults() {
        let c: KernelTableConfig = parse_params(&json!({"points": 1})).unwrap();
        assert_eq!(c.grid().unwrap(), vec![0.1]);
        let c: KernelTableConfig = parse_params(&json!({})).unwrap();
        assert_eq!(c.grid().unwrap().len(), 50);
    }
}
