//! State types shared by every other module: ordered particle configurations,
//! points of the boundary space Ω₊, SDE parameters and trajectories, together
//! with the characteristic-polynomial functionals evaluated on them.

mod charpoly;
mod random;

pub use charpoly::{
    char_poly_phi, drift_via_charpoly, limit_entire_eplus, log_derivative_phi, lyapunov_f,
    reverse_char_poly, singular_drift,
};
pub use random::{counter_normal, mix64, GaussianNoise, RandomSource, ZeroNoise};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A point of the closed positive Weyl chamber: `x[0] >= x[1] >= ... >= x[N-1] >= 0`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<f64>", into = "Vec<f64>")]
pub struct OrderedConfig {
    values: Vec<f64>,
}

impl OrderedConfig {
    pub fn new(values: Vec<f64>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::InvalidConfig("configuration must have N >= 1".into()));
        }
        if let Some(i) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::InvalidConfig(format!("coordinate {i} is not finite")));
        }
        if let Some(i) = values.windows(2).position(|w| w[0] < w[1]) {
            return Err(Error::InvalidConfig(format!(
                "coordinates {i} and {} are not in decreasing order",
                i + 1
            )));
        }
        if values[values.len() - 1] < 0.0 {
            return Err(Error::InvalidConfig("coordinates must be nonnegative".into()));
        }
        Ok(Self { values })
    }

    /// Sorts `values` into decreasing order before validating.
    pub fn from_unsorted(mut values: Vec<f64>) -> Result<Self> {
        values.sort_by(|a, b| b.total_cmp(a));
        Self::new(values)
    }

    /// Caller guarantees the invariants.
    pub(crate) fn from_sorted_unchecked(values: Vec<f64>) -> Self {
        debug_assert!(values.windows(2).all(|w| w[0] >= w[1]));
        Self { values }
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn sum(&self) -> f64 {
        self.values.iter().sum()
    }

    /// True when `x_1 > x_2 > ... > x_N > 0`.
    pub fn is_strict_interior(&self) -> bool {
        self.values.windows(2).all(|w| w[0] > w[1]) && self.values[self.values.len() - 1] > 0.0
    }

    pub fn require_strict_interior(&self) -> Result<()> {
        if let Some(i) = self.values.windows(2).position(|w| w[0] <= w[1]) {
            return Err(Error::Domain(format!(
                "ordering not strict at coordinates {i}, {}",
                i + 1
            )));
        }
        if self.values[self.values.len() - 1] <= 0.0 {
            return Err(Error::Domain("smallest coordinate must be positive".into()));
        }
        Ok(())
    }

    /// Multiplies every coordinate by `c >= 0`.
    pub fn scaled(&self, c: f64) -> Result<Self> {
        Self::new(self.values.iter().map(|v| v * c).collect())
    }

    /// The point `(x_i / N, sum(x) / N)` of Ω₊.
    pub fn embed(&self) -> OmegaPlusPoint {
        embed(self)
    }
}

impl TryFrom<Vec<f64>> for OrderedConfig {
    type Error = Error;
    fn try_from(v: Vec<f64>) -> Result<Self> {
        Self::new(v)
    }
}

impl From<OrderedConfig> for Vec<f64> {
    fn from(c: OrderedConfig) -> Self {
        c.values
    }
}

/// A point `(x, γ)` of Ω₊ with a finite support list and an implicit zero tail.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OmegaPlusPoint {
    xs: Vec<f64>,
    gamma: f64,
}

impl OmegaPlusPoint {
    pub fn new(xs: Vec<f64>, gamma: f64) -> Result<Self> {
        if !gamma.is_finite() || gamma < 0.0 {
            return Err(Error::InvalidConfig(format!("gamma = {gamma} must be finite and >= 0")));
        }
        if xs.iter().any(|v| !v.is_finite() || *v < 0.0) {
            return Err(Error::InvalidConfig("support entries must be finite and >= 0".into()));
        }
        if xs.windows(2).any(|w| w[0] < w[1]) {
            return Err(Error::InvalidConfig("support must be decreasing".into()));
        }
        let total: f64 = xs.iter().sum();
        if total > gamma * (1.0 + 1e-12) + 1e-300 {
            return Err(Error::InvalidConfig(format!(
                "sum of support {total} exceeds gamma {gamma}"
            )));
        }
        Ok(Self { xs, gamma })
    }

    /// The support list; coordinates beyond its length are zero.
    pub fn xs(&self) -> &[f64] {
        &self.xs
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    /// Coordinate `i` (zero-based), zero beyond the stored support.
    pub fn x(&self, i: usize) -> f64 {
        self.xs.get(i).copied().unwrap_or(0.0)
    }

    /// Number of strictly positive coordinates.
    pub fn support_len(&self) -> usize {
        self.xs.iter().take_while(|v| **v > 0.0).count()
    }

    /// `γ - Σ x_j`, clipped at zero.
    pub fn excess_mass(&self) -> f64 {
        (self.gamma - self.xs.iter().sum::<f64>()).max(0.0)
    }
}

/// Embeds a configuration into Ω₊: `x_i / N` padded by zeros, `γ = Σ x_i / N`.
pub fn embed(config: &OrderedConfig) -> OmegaPlusPoint {
    let n = config.len() as f64;
    let xs: Vec<f64> = config.values().iter().map(|v| v / n).collect();
    // Sum the scaled coordinates so that sum(xs) == gamma holds exactly.
    let gamma = xs.iter().sum();
    OmegaPlusPoint { xs, gamma }
}

/// Parameters of the eigenvalue SDE and its step control.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SdeParams {
    pub eta: f64,
    /// Use the `1/(2N)` constant drift instead of `1/2`.
    pub rescaled: bool,
    pub dt_max: f64,
    /// A step is rejected if any gap shrinks below this fraction of its old value.
    pub gap_safety: f64,
    pub positivity_floor: f64,
}

impl SdeParams {
    pub fn new(eta: f64, rescaled: bool, dt_max: f64) -> Result<Self> {
        let p = Self { eta, rescaled, dt_max, ..Self::default() };
        p.validate()?;
        Ok(p)
    }

    /// Default parameters with the step size recommended for `n` particles.
    pub fn for_size(eta: f64, rescaled: bool, n: usize) -> Self {
        Self { eta, rescaled, dt_max: Self::default_dt_max(n), ..Self::default() }
    }

    /// `1e-3` up to 64 particles, `1e-3 * 32 / N` above.
    pub fn default_dt_max(n: usize) -> f64 {
        if n <= 64 {
            1e-3
        } else {
            1e-3 * 32.0 / n as f64
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !self.eta.is_finite() {
            return Err(Error::Parameter("eta must be finite".into()));
        }
        if !(self.dt_max > 0.0 && self.dt_max.is_finite()) {
            return Err(Error::Parameter(format!("dt_max = {} must be > 0", self.dt_max)));
        }
        if !(self.gap_safety > 0.0 && self.gap_safety < 1.0) {
            return Err(Error::Parameter(format!(
                "gap_safety = {} must lie in (0, 1)",
                self.gap_safety
            )));
        }
        if !(self.positivity_floor > 0.0) {
            return Err(Error::Parameter("positivity_floor must be > 0".into()));
        }
        Ok(())
    }

    /// The constant part of the drift for `n` particles.
    pub fn entrance_drift(&self, n: usize) -> f64 {
        if self.rescaled {
            0.5 / n as f64
        } else {
            0.5
        }
    }

    pub fn with_eta(mut self, eta: f64) -> Self {
        self.eta = eta;
        self
    }

    pub fn with_dt_max(mut self, dt_max: f64) -> Self {
        self.dt_max = dt_max;
        self
    }
}

impl Default for SdeParams {
    fn default() -> Self {
        Self { eta: 0.0, rescaled: false, dt_max: 1e-3, gap_safety: 0.1, positivity_floor: 1e-12 }
    }
}

/// Saved states of one simulated path.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Trajectory {
    pub times: Vec<f64>,
    pub states: Vec<OrderedConfig>,
    pub seed: u64,
    pub stream: u64,
    pub params: SdeParams,
}

impl Trajectory {
    /// Number of particles.
    pub fn dim(&self) -> usize {
        self.states.first().map_or(0, OrderedConfig::len)
    }

    pub fn final_state(&self) -> Option<&OrderedConfig> {
        self.states.last()
    }

    pub fn validate(&self) -> Result<()> {
        if self.times.len() != self.states.len() {
            return Err(Error::DimensionMismatch(self.times.len(), self.states.len()));
        }
        if self.times.first().is_some_and(|t| *t != 0.0) {
            return Err(Error::InvalidConfig("trajectory must start at t = 0".into()));
        }
        if self.times.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::InvalidConfig("times must be strictly increasing".into()));
        }
        let n = self.dim();
        if let Some(s) = self.states.iter().find(|s| s.len() != n) {
            return Err(Error::DimensionMismatch(n, s.len()));
        }
        Ok(())
    }
}
