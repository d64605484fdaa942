use serde::{Deserialize, Serialize};
use statrs::function::gamma::gamma_ur;

use super::report::{Comparator, ExperimentReport, Table};
use super::stats::{ks_one_sample, ks_two_sample, permutation_test};
use super::{at_least, keep_ok, par_replicas, positive, ALPHA, DT_CHECK_ALPHA};
use crate::domain::{OrderedConfig, RandomSource, SdeParams};
use crate::equilibrium::sample_inverse_laguerre;
use crate::error::{Error, Result};
use crate::sde::{Integrator, Stepper};

/// Null standard deviation of `√n D` for the one-sample KS statistic.
const KS_NULL_SD: f64 = 0.2603;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct EquilibriumConfig {
    pub particles: usize,
    pub eta: f64,
    /// Common starting point. `None` starts every replica from its own
    /// draw of the equilibrium law.
    pub x0: Option<Vec<f64>>,
    pub t_grid: Vec<f64>,
    pub n: usize,
    pub dt: f64,
    pub n_perm: usize,
    pub integrator: Integrator,
    pub dt_check: bool,
}

impl Default for EquilibriumConfig {
    fn default() -> Self {
        Self {
            particles: 3,
            eta: 0.5,
            x0: Some(vec![12.0, 8.0, 4.0]),
            t_grid: vec![1.0, 5.0, 20.0],
            n: 10_000,
            dt: 1e-3,
            n_perm: 200,
            integrator: Integrator::Log,
            dt_check: true,
        }
    }
}

impl EquilibriumConfig {
    fn validate(&self) -> Result<Option<OrderedConfig>> {
        at_least("particles", self.particles, 1)?;
        if !(self.eta > -1.0) {
            return Err(Error::InvalidConfig(format!("eta = {} must be > -1", self.eta)));
        }
        if self.t_grid.is_empty() || self.t_grid.windows(2).any(|w| w[0] >= w[1]) || self.t_grid[0] <= 0.0 {
            return Err(Error::InvalidConfig("t_grid must be positive and strictly increasing".into()));
        }
        positive("dt", self.dt)?;
        at_least("n", self.n, 10)?;
        let x0 = match &self.x0 {
            None => None,
            Some(v) => {
                let x = OrderedConfig::new(v.clone())?;
                x.require_strict_interior()?;
                if x.len() != self.particles {
                    return Err(Error::InvalidConfig(format!("x0 has {} entries, particles = {}", x.len(), self.particles)));
                }
                Some(x)
            }
        };
        Ok(x0)
    }
}

/// States of each replica at every time of `t_grid`.
fn evolve(cfg: &EquilibriumConfig, x0: Option<&OrderedConfig>, params: SdeParams, n: usize, source: RandomSource) -> Vec<Result<Vec<Vec<f64>>>> {
    par_replicas(n, |r| {
        let mut rng = source.replica(r).rng();
        let mut x = match x0 {
            Some(x) => x.values().to_vec(),
            None => sample_inverse_laguerre(cfg.particles, cfg.eta, &mut rng)?.into_values(),
        };
        let mut stepper = Stepper::new(cfg.integrator, params, x.len());
        let mut now = 0.0;
        let mut out = Vec::with_capacity(cfg.t_grid.len());
        for &t in &cfg.t_grid {
            stepper.advance(&mut x, t - now, &mut rng)?;
            now = t;
            out.push(x.clone());
        }
        Ok(out)
    })
}

fn logs(v: &[Vec<f64>]) -> Vec<Vec<f64>> {
    v.iter().map(|x| x.iter().map(|c| c.ln()).collect()).collect()
}

/// Runs replicas to each time of `t_grid` and measures the distance to the
/// inverse Laguerre ensemble. One particle uses a one-sample KS test against
/// the exact inverse-gamma law; more particles use the energy permutation
/// test in log coordinates.
pub fn test_equilibrium(cfg: &EquilibriumConfig, source: RandomSource) -> Result<ExperimentReport> {
    let x0 = cfg.validate()?;
    let params = SdeParams::new(cfg.eta, false, cfg.dt)?;
    let mut report = ExperimentReport::new("equilibrium", cfg, source.master_seed);
    let (paths, failed) = keep_ok(evolve(cfg, x0.as_ref(), params, cfg.n, source.derive(1)))?;
    report.stat("discarded", failed as f64);
    let at = |k: usize| -> Vec<Vec<f64>> { paths.iter().map(|p| p[k].clone()).collect() };
    let shape = cfg.eta + 1.0;
    // P(1/Y <= v) for Y ~ Gamma(η + 1).
    let cdf = |v: f64| if v <= 0.0 { 0.0 } else { gamma_ur(shape, 1.0 / v) };

    let mut table = Table::new(&["t", "statistic", "null_sd", "p_value"]);
    let mut stats = Vec::new();
    let reference = if cfg.particles > 1 {
        let src = source.derive(2);
        let refs: Result<Vec<Vec<f64>>> = par_replicas(cfg.n, |r| {
            Ok(sample_inverse_laguerre(cfg.particles, cfg.eta, &mut src.replica(r).rng())?.into_values())
        })
        .into_iter()
        .collect();
        Some(logs(&refs?))
    } else {
        None
    };
    for (k, &t) in cfg.t_grid.iter().enumerate() {
        let sample = at(k);
        let (stat, sd, p) = match &reference {
            None => {
                let xs: Vec<f64> = sample.iter().map(|v| v[0]).collect();
                let (d, p) = ks_one_sample(&xs, cdf)?;
                (d, KS_NULL_SD / (xs.len() as f64).sqrt(), p)
            }
            Some(refs) => {
                let test = permutation_test(&logs(&sample), refs, cfg.n_perm, source.derive(10 + k as u64))?;
                (test.statistic, test.null_sd, test.p_value)
            }
        };
        report.stat(&format!("statistic_t{k}"), stat);
        report.stat(&format!("p_t{k}"), p);
        table.push(vec![t, stat, sd, p]);
        stats.push((stat, sd, p));
    }
    let last = stats.len() - 1;
    report.check("final_p", stats[last].2, Comparator::Gt, ALPHA);
    // Largest rise between consecutive times, in units of the null spread.
    let worst_rise = stats
        .windows(2)
        .map(|w| (w[1].0 - w[0].0) / w[0].1.max(w[1].1).max(f64::MIN_POSITIVE))
        .fold(f64::NEG_INFINITY, f64::max);
    if stats.len() > 1 {
        report.check("max_rise_in_null_sd", worst_rise, Comparator::Le, 2.0);
    }
    report.tables.insert("equilibrium".into(), table);

    if cfg.dt_check {
        let m = (cfg.n / 5).max(10);
        let (fine, _) = keep_ok(evolve(cfg, x0.as_ref(), params.with_dt_max(0.5 * cfg.dt), m, source.derive(3)))?;
        let fine: Vec<Vec<f64>> = fine.iter().map(|p| p[last].clone()).collect();
        let coarse: Vec<Vec<f64>> = paths.iter().take(m).map(|p| p[last].clone()).collect();
        let p = if cfg.particles == 1 {
            let a: Vec<f64> = coarse.iter().map(|v| v[0]).collect();
            let b: Vec<f64> = fine.iter().map(|v| v[0]).collect();
            ks_two_sample(&a, &b)?.1
        } else {
            permutation_test(&logs(&coarse), &logs(&fine), cfg.n_perm, source.derive(4))?.p_value
        };
        report.check("dt_halving_p", p, Comparator::Gt, DT_CHECK_ALPHA);
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn one_particle_small_run() {
        let cfg = EquilibriumConfig {
            particles: 1,
            eta: 1.0,
            x0: Some(vec![3.0]),
            t_grid: vec![10.0],
            n: 2000,
            dt: 2e-3,
            dt_check: false,
            ..Default::default()
        };
        let r = test_equilibrium(&cfg, RandomSource::new(5, 0)).unwrap();
        assert!(r.verdicts["final_p"], "{:?}", r.statistics);
    }

    #[test]
    fn validation() {
        let bad = EquilibriumConfig { t_grid: vec![2.0, 1.0], ..Default::default() };
        assert!(test_equilibrium(&bad, RandomSource::new(0, 0)).is_err());
        let bad = EquilibriumConfig { x0: Some(vec![1.0, 2.0, 3.0]), ..Default::default() };
        assert!(test_equilibrium(&bad, RandomSource::new(0, 0)).is_err());
        let bad = EquilibriumConfig { eta: -1.0, ..Default::default() };
        assert!(test_equilibrium(&bad, RandomSource::new(0, 0)).is_err());
    }
}
