//! Pathwise (synchronous) coupling of systems of different sizes.
//!
//! Coordinate `i` of every system is driven by the same Brownian motion
//! `W_i`, generated from counter-based variates on a fixed coarse grid. When
//! a coarse step has to be refined, the missing midpoints are filled in by
//! Brownian-bridge sampling, so refinement never changes the path.

use crate::domain::{counter_normal, OrderedConfig, SdeParams};
use crate::error::{Error, Result};
use crate::sde::eigen::{acceptable, eigen_drift};

/// Deepest bridge refinement of one coarse step, `dt / 2^40`.
const MAX_LEVEL: u32 = 40;

/// A family of Brownian motions `W_0, W_1, ...` sampled on the grid `k·dt`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SharedBrownian {
    seed: u64,
    dt: f64,
}

impl SharedBrownian {
    pub fn new(seed: u64, dt: f64) -> Result<Self> {
        if !(dt > 0.0 && dt.is_finite()) {
            return Err(Error::Parameter(format!("dt = {dt} must be positive")));
        }
        Ok(Self { seed, dt })
    }

    pub fn dt(&self) -> f64 {
        self.dt
    }

    /// Increment of `W_i` over the `p`-th of the `2^level` equal pieces of
    /// coarse step `k`.
    pub fn increment(&self, i: usize, k: usize, level: u32, p: u64) -> f64 {
        if level == 0 {
            return self.dt.sqrt() * counter_normal(self.seed, &[i as u64, k as u64, 0, 0]);
        }
        let parent = self.increment(i, k, level - 1, p >> 1);
        let parent_len = self.dt / (1u64 << (level - 1)) as f64;
        let z = counter_normal(self.seed, &[i as u64, k as u64, level as u64, p >> 1]);
        let dev = 0.5 * parent_len.sqrt() * z;
        if p & 1 == 0 {
            0.5 * parent + dev
        } else {
            0.5 * parent - dev
        }
    }
}

/// Log-coordinate integrator driven by a [`SharedBrownian`].
#[derive(Debug, Clone)]
pub struct CoupledStepper {
    params: SdeParams,
    brownian: SharedBrownian,
    drift: Vec<f64>,
    proposal: Vec<f64>,
    /// Number of bridge refinements performed so far.
    pub refinements: usize,
    min_level: u32,
}

impl CoupledStepper {
    pub fn new(params: SdeParams, brownian: SharedBrownian, n: usize) -> Self {
        Self { params, brownian, drift: vec![0.0; n], proposal: vec![0.0; n], refinements: 0, min_level: 0 }
    }

    /// Always splits each coarse step into `2^level` bridge pieces. The
    /// Brownian path is unchanged, only the integration grid is finer.
    pub fn with_min_level(mut self, level: u32) -> Self {
        self.min_level = level.min(MAX_LEVEL);
        self
    }

    /// Advances `x` over coarse step `k`.
    pub fn coarse_step(&mut self, x: &mut [f64], k: usize) -> Result<()> {
        for p in 0..1u64 << self.min_level {
            self.piece(x, k, self.min_level, p)?;
        }
        Ok(())
    }

    fn piece(&mut self, x: &mut [f64], k: usize, level: u32, p: u64) -> Result<()> {
        let h = self.brownian.dt / (1u64 << level) as f64;
        let c = self.params.entrance_drift(x.len());
        eigen_drift(x, self.params.eta, c, &mut self.drift);
        for i in 0..x.len() {
            let dw = self.brownian.increment(i, k, level, p);
            self.proposal[i] = x[i] * (dw + (self.drift[i] / x[i] - 0.5) * h).exp();
        }
        if acceptable(x, &self.proposal, &self.params) {
            x.copy_from_slice(&self.proposal);
            return Ok(());
        }
        if level >= MAX_LEVEL {
            return Err(Error::StepFailure { time: (k as f64 + p as f64 / (1u64 << level) as f64) * self.brownian.dt, min_dt: h });
        }
        self.refinements += 1;
        self.piece(x, k, level + 1, 2 * p)?;
        self.piece(x, k, level + 1, 2 * p + 1)
    }
}

/// Runs `steps` coarse steps from `initial`, calling `record(k, x)` after
/// every step (`k = 1..=steps`) and once at `k = 0`.
pub fn simulate_coupled<F: FnMut(usize, &[f64])>(
    initial: &OrderedConfig,
    params: &SdeParams,
    brownian: SharedBrownian,
    steps: usize,
    mut record: F,
) -> Result<usize> {
    params.validate()?;
    initial.require_strict_interior()?;
    let mut x = initial.values().to_vec();
    let mut stepper = CoupledStepper::new(*params, brownian, x.len());
    record(0, &x);
    for k in 0..steps {
        stepper.coarse_step(&mut x, k)?;
        record(k + 1, &x);
    }
    Ok(stepper.refinements)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bridge_preserves_coarse_increment() {
        let b = SharedBrownian::new(9, 2e-4).unwrap();
        for k in [0, 5, 77] {
            let coarse = b.increment(3, k, 0, 0);
            for level in 1..6u32 {
                let sum: f64 = (0..1u64 << level).map(|p| b.increment(3, k, level, p)).sum();
                assert!((sum - coarse).abs() < 1e-14);
            }
        }
    }

    #[test]
    fn bridge_variance_matches_length() {
        let dt = 1.0;
        let b = SharedBrownian::new(1, dt).unwrap();
        let n = 40_000;
        let var: f64 = (0..n).map(|k| b.increment(0, k, 3, 5).powi(2)).sum::<f64>() / n as f64;
        assert!((var - dt / 8.0).abs() < 0.01 * dt, "{var}");
    }

    #[test]
    fn identical_systems_identical_paths() {
        let b = SharedBrownian::new(4, 1e-3).unwrap();
        let p = SdeParams { rescaled: true, ..SdeParams::default() };
        let x = OrderedConfig::new(vec![4.0, 1.0, 0.2]).unwrap();
        let mut a = vec![];
        let mut c = vec![];
        simulate_coupled(&x, &p, b, 200, |_, s| a.push(s.to_vec())).unwrap();
        simulate_coupled(&x, &p, b, 200, |_, s| c.push(s.to_vec())).unwrap();
        assert_eq!(a, c);
        assert!(a.iter().all(|s| s.windows(2).all(|w| w[0] > w[1]) && s[2] > 0.0));
    }
}
