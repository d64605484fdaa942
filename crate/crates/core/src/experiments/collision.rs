use serde::{Deserialize, Serialize};

use super::report::{Comparator, ExperimentReport, Table};
use super::{at_least, par_replicas, positive, step_count};
use crate::domain::{lyapunov_f, OrderedConfig, RandomSource, SdeParams};
use crate::error::{Error, Result};
use crate::sde::{Integrator, Stepper};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct CollisionConfig {
    pub ns: Vec<usize>,
    /// Embedded family `u^(N)_i = first · ratio^(i-1)`.
    pub first: f64,
    pub ratio: f64,
    /// Explicit embedded configurations, used instead of the geometric family.
    pub configs: Option<Vec<Vec<f64>>>,
    pub delta: f64,
    pub eps: f64,
    pub t: f64,
    pub eta: f64,
    pub n: usize,
    pub dt: f64,
}

impl Default for CollisionConfig {
    fn default() -> Self {
        Self {
            ns: vec![2, 4, 8, 16],
            first: 1.0,
            ratio: 0.5,
            configs: None,
            delta: 0.05,
            eps: 0.1,
            t: 1.0,
            eta: 0.0,
            n: 10_000,
            dt: 1e-3,
        }
    }
}

impl CollisionConfig {
    fn family(&self) -> Result<Vec<OrderedConfig>> {
        let family: Vec<OrderedConfig> = match &self.configs {
            Some(cs) => cs.iter().map(|c| OrderedConfig::new(c.clone())).collect::<Result<_>>()?,
            None => {
                positive("first", self.first)?;
                if !(self.ratio > 0.0 && self.ratio < 1.0) {
                    return Err(Error::InvalidConfig(format!("ratio = {} must lie in (0, 1)", self.ratio)));
                }
                self.ns
                    .iter()
                    .map(|&n| OrderedConfig::new((0..n).map(|i| self.first * self.ratio.powi(i as i32)).collect()))
                    .collect::<Result<_>>()?
            }
        };
        if family.is_empty() {
            return Err(Error::InvalidConfig("empty configuration family".into()));
        }
        for c in &family {
            c.require_strict_interior()?;
            at_least("N", c.len(), 2)?;
        }
        Ok(family)
    }
}

/// Whether the top gap closes to `|1 - u_2/u_1| <= δ` before `t` and before
/// `u_1` drops to `ε`. A step failure counts as a collision.
fn collides(x: &OrderedConfig, cfg: &CollisionConfig, params: SdeParams, source: RandomSource) -> bool {
    let mut rng = source.rng();
    let mut u = x.values().to_vec();
    let mut stepper = Stepper::new(Integrator::Log, params, u.len());
    let steps = step_count(cfg.t, cfg.dt);
    let h = cfg.t / steps as f64;
    for _ in 0..steps {
        if stepper.advance(&mut u, h, &mut rng).is_err() {
            return true;
        }
        if u[0] <= cfg.eps {
            return false;
        }
        if (1.0 - u[1] / u[0]).abs() <= cfg.delta {
            return true;
        }
    }
    false
}

/// Estimates `P(τ(δ) < t ∧ σ(ε))` for each size and compares it with the
/// size-independent bound `(C + t/ε) / |log δ|`, where `C` is the largest
/// value of the Lyapunov function `f_1` over the family.
pub fn test_collision_bound(cfg: &CollisionConfig, source: RandomSource) -> Result<ExperimentReport> {
    let family = cfg.family()?;
    if !(cfg.delta > 0.0 && cfg.delta < 1.0) {
        return Err(Error::InvalidConfig(format!("delta = {} must lie in (0, 1)", cfg.delta)));
    }
    positive("eps", cfg.eps)?;
    positive("t", cfg.t)?;
    positive("dt", cfg.dt)?;
    at_least("n", cfg.n, 1)?;
    let params = SdeParams::new(cfg.eta, true, cfg.dt)?;
    let mut report = ExperimentReport::new("collision-bound", cfg, source.master_seed);

    let c = family.iter().map(|x| lyapunov_f(x, 1)).collect::<Result<Vec<_>>>()?.into_iter().fold(f64::NEG_INFINITY, f64::max);
    let bound = (c + cfg.t / cfg.eps) / cfg.delta.ln().abs();
    report.stat("lyapunov_c", c);
    report.stat("bound", bound);
    if bound >= 1.0 {
        report.note("the bound is at least 1 for these parameters, so the check cannot fail");
    }
    let mut table = Table::new(&["N", "estimate", "se", "bound"]);
    for (idx, x) in family.iter().enumerate() {
        let src = source.derive(idx as u64);
        let hits = par_replicas(cfg.n, |r| collides(x, cfg, params, src.replica(r))).into_iter().filter(|&b| b).count();
        let p = hits as f64 / cfg.n as f64;
        let se = (p * (1.0 - p) / cfg.n as f64).sqrt();
        let n = x.len();
        report.stat(&format!("se_N{n}"), se);
        report.check(&format!("estimate_N{n}"), p, Comparator::Le, bound + 3.0 * se);
        table.push(vec![n as f64, p, se, bound]);
    }
    report.tables.insert("collision".into(), table);
    Ok(report)
}
