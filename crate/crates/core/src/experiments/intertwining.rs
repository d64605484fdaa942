use serde::{Deserialize, Serialize};

use super::report::{Comparator, ExperimentReport};
use super::stats::{ks_two_sample, permutation_test};
use super::{at_least, keep_ok, nonnegative, par_replicas, positive, ALPHA, DT_CHECK_ALPHA};
use crate::domain::{OrderedConfig, RandomSource, SdeParams};
use crate::error::{Error, Result};
use crate::kernels::sample_corner;
use crate::sde::{Integrator, Stepper};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct IntertwiningConfig {
    /// Initial configuration of the larger system (`N + 1` particles).
    pub x: Vec<f64>,
    pub t: f64,
    pub eta: f64,
    /// `η` of the smaller system in pipeline B. Differs from `eta` only in a
    /// negative control.
    pub eta_b: Option<f64>,
    pub n: usize,
    pub dt: f64,
    pub n_perm: usize,
    pub integrator: Integrator,
    /// Also compare pipeline A at `dt` against `dt / 2` on `n / 5` replicas.
    pub dt_check: bool,
}

impl Default for IntertwiningConfig {
    fn default() -> Self {
        Self {
            x: vec![3.0, 2.0, 1.0],
            t: 0.25,
            eta: 0.0,
            eta_b: None,
            n: 20_000,
            dt: 5e-4,
            n_perm: 200,
            integrator: Integrator::Log,
            dt_check: true,
        }
    }
}

impl IntertwiningConfig {
    fn validate(&self) -> Result<OrderedConfig> {
        let x = OrderedConfig::new(self.x.clone())?;
        x.require_strict_interior()?;
        if x.len() < 2 {
            return Err(Error::InvalidConfig("x needs at least 2 particles".into()));
        }
        nonnegative("t", self.t)?;
        positive("dt", self.dt)?;
        at_least("n", self.n, 10)?;
        Ok(x)
    }
}

/// Evolve the large system, then take the corner.
fn pipeline_a(x: &OrderedConfig, t: f64, params: SdeParams, integ: Integrator, n: usize, source: RandomSource) -> Vec<Result<Vec<f64>>> {
    par_replicas(n, |r| {
        let mut rng = source.replica(r).rng();
        let mut v = x.values().to_vec();
        Stepper::new(integ, params, v.len()).advance(&mut v, t, &mut rng)?;
        Ok(sample_corner(&OrderedConfig::new(v)?, &mut rng)?.into_values())
    })
}

/// Take the corner, then evolve the small system.
fn pipeline_b(x: &OrderedConfig, t: f64, params: SdeParams, integ: Integrator, n: usize, source: RandomSource) -> Vec<Result<Vec<f64>>> {
    par_replicas(n, |r| {
        let mut rng = source.replica(r).rng();
        let mut y = sample_corner(x, &mut rng)?.into_values();
        Stepper::new(integ, params, y.len()).advance(&mut y, t, &mut rng)?;
        Ok(y)
    })
}

/// Checks that evolving then projecting to the corner has the same law as
/// projecting then evolving.
pub fn test_intertwining(cfg: &IntertwiningConfig, source: RandomSource) -> Result<ExperimentReport> {
    let x = cfg.validate()?;
    let params_a = SdeParams::new(cfg.eta, false, cfg.dt)?;
    let params_b = params_a.with_eta(cfg.eta_b.unwrap_or(cfg.eta));
    params_b.validate()?;
    let mut report = ExperimentReport::new("intertwining", cfg, source.master_seed);

    let (a, fail_a) = keep_ok(pipeline_a(&x, cfg.t, params_a, cfg.integrator, cfg.n, source.derive(1)))?;
    let (b, fail_b) = keep_ok(pipeline_b(&x, cfg.t, params_b, cfg.integrator, cfg.n, source.derive(2)))?;
    report.stat("discarded_a", fail_a as f64);
    report.stat("discarded_b", fail_b as f64);

    let test = permutation_test(&a, &b, cfg.n_perm, source.derive(3))?;
    report.stat("energy", test.statistic);
    report.stat("energy_null_mean", test.null_mean);
    report.stat("energy_null_sd", test.null_sd);
    report.check("energy_p", test.p_value, Comparator::Gt, ALPHA);

    let dim = a[0].len();
    for i in 0..dim {
        let ca: Vec<f64> = a.iter().map(|v| v[i]).collect();
        let cb: Vec<f64> = b.iter().map(|v| v[i]).collect();
        let (d, p) = ks_two_sample(&ca, &cb)?;
        report.stat(&format!("ks_d_y{}", i + 1), d);
        report.stat(&format!("ks_p_y{}", i + 1), p);
    }

    if cfg.dt_check && cfg.t > 0.0 {
        let m = (cfg.n / 5).max(10);
        let half = params_a.with_dt_max(0.5 * cfg.dt);
        let (fine, _) = keep_ok(pipeline_a(&x, cfg.t, half, cfg.integrator, m, source.derive(4)))?;
        let coarse = &a[..m.min(a.len())];
        let t = permutation_test(coarse, &fine, cfg.n_perm, source.derive(5))?;
        report.stat("dt_halving_energy", t.statistic);
        report.check("dt_halving_p", t.p_value, Comparator::Gt, DT_CHECK_ALPHA);
    }
    if cfg.eta_b.is_some_and(|e| e != cfg.eta) {
        report.note("negative control: pipelines use different eta, a failing verdict is expected");
    }
    Ok(report)
}
