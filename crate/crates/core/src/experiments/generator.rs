use serde::{Deserialize, Serialize};

use super::report::{Comparator, ExperimentReport};
use super::stats::mean_se;
use super::{at_least, par_replicas, positive};
use crate::domain::{OrderedConfig, RandomSource, SdeParams};
use crate::error::Result;
use crate::sde::{generator_apply_with, Integrator, PowerSum, SmoothFunction, Stepper};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct GeneratorConfig {
    pub x: Vec<f64>,
    pub eta: f64,
    /// Exponent `p` of the observable `Σ x_i^p`.
    pub power: i32,
    pub delta: f64,
    pub n: usize,
}

impl Default for GeneratorConfig {
    fn default() -> Self {
        Self { x: vec![3.0, 2.0, 1.0], eta: 0.0, power: 2, delta: 1e-3, n: 100_000 }
    }
}

/// Compares `(E f(X_δ) - f(x)) / δ` over one short Euler step with the
/// generator applied to `f`.
pub fn test_generator(cfg: &GeneratorConfig, source: RandomSource) -> Result<ExperimentReport> {
    let x = OrderedConfig::new(cfg.x.clone())?;
    x.require_strict_interior()?;
    positive("delta", cfg.delta)?;
    at_least("n", cfg.n, 2)?;
    let params = SdeParams::new(cfg.eta, false, cfg.delta)?;
    let f = PowerSum(cfg.power);
    let exact = generator_apply_with(&f, &x, &params)?;
    let f0 = f.value(x.values());
    let mut report = ExperimentReport::new("generator", cfg, source.master_seed);
    let samples: Vec<f64> = par_replicas(cfg.n, |r| {
        let mut v = x.values().to_vec();
        Stepper::new(Integrator::Eigen, params, v.len()).advance(&mut v, cfg.delta, &mut source.replica(r).rng())?;
        Ok((f.value(&v) - f0) / cfg.delta)
    })
    .into_iter()
    .collect::<Result<_>>()?;
    let (mean, se) = mean_se(&samples);
    report.stat("generator", exact);
    report.stat("estimate", mean);
    report.stat("se", se);
    report.check("z_score", (mean - exact).abs() / se, Comparator::Le, 3.0);
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_run_is_consistent() {
        let cfg = GeneratorConfig { n: 5000, ..Default::default() };
        let r = test_generator(&cfg, RandomSource::new(8, 0)).unwrap();
        assert!(r.is_consistent());
        assert!(r.statistics["z_score"] < 5.0);
    }
}
