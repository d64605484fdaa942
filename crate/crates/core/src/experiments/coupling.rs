use serde::{Deserialize, Serialize};

use super::report::{Comparator, ExperimentReport, Table};
use super::stats::mean_se;
use super::{at_least, nonnegative, par_replicas, positive, step_count};
use crate::domain::{OmegaPlusPoint, OrderedConfig, RandomSource, SdeParams};
use crate::error::{Error, Result};
use crate::sde::{CoupledStepper, SharedBrownian};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct CouplingConfig {
    /// Atoms of the target point (finite support, decreasing).
    pub omega: Vec<f64>,
    pub ns: Vec<usize>,
    pub horizon: f64,
    pub dt: f64,
    pub eta: f64,
    pub replicas: usize,
    /// Size of the vanishing tail that keeps the initial configurations
    /// strictly positive.
    pub tail_scale: f64,
    /// Allowed growth factor between consecutive discrepancies.
    pub slack: f64,
    pub dt_check: bool,
}

impl Default for CouplingConfig {
    fn default() -> Self {
        Self {
            omega: vec![0.5],
            ns: vec![8, 16, 32, 64],
            horizon: 1.0,
            dt: 2e-4,
            eta: 0.0,
            replicas: 16,
            tail_scale: 1.0,
            slack: 1.2,
            dt_check: true,
        }
    }
}

/// Embedded initial state of the `n`-particle system: the atoms of `omega`
/// followed by the tail `tail_scale (n - i) / n³`, whose total mass vanishes
/// like `1/n`.
pub(crate) fn initial_state(omega: &OmegaPlusPoint, n: usize, tail_scale: f64) -> Vec<f64> {
    let j = omega.support_len();
    let nf = n as f64;
    (0..n).map(|i| if i < j { omega.x(i) } else { tail_scale * (n - i) as f64 / (nf * nf * nf) }).collect()
}

/// `Σ_i (a_i - b_i)²`, the shorter vector padded with zeros.
fn sq_dist(a: &[f64], b: &[f64]) -> f64 {
    let (long, short) = if a.len() >= b.len() { (a, b) } else { (b, a) };
    long.iter().enumerate().map(|(i, &v)| (v - short.get(i).copied().unwrap_or(0.0)).powi(2)).sum()
}

/// Path of every system size on the shared grid, one state per coarse step.
fn coupled_paths(cfg: &CouplingConfig, omega: &OmegaPlusPoint, params: SdeParams, brownian: SharedBrownian, level: u32) -> Result<Vec<Vec<Vec<f64>>>> {
    let steps = step_count(cfg.horizon, cfg.dt);
    cfg.ns
        .iter()
        .map(|&n| {
            let mut x = initial_state(omega, n, cfg.tail_scale);
            let mut stepper = CoupledStepper::new(params, brownian, n).with_min_level(level);
            let mut path = Vec::with_capacity(steps + 1);
            path.push(x.clone());
            for k in 0..steps {
                stepper.coarse_step(&mut x, k)?;
                path.push(x.clone());
            }
            Ok(path)
        })
        .collect()
}

/// `sup_t Σ_i (u^(N_k)_i(t) - u^(N_{k+1})_i(t))²` for each consecutive pair,
/// averaged over replicas.
fn discrepancies(cfg: &CouplingConfig, omega: &OmegaPlusPoint, params: SdeParams, source: RandomSource, level: u32) -> Result<Vec<Vec<f64>>> {
    let per_replica: Vec<Result<Vec<f64>>> = par_replicas(cfg.replicas, |r| {
        let brownian = SharedBrownian::new(source.derive(r).master_seed, cfg.dt)?;
        let paths = coupled_paths(cfg, omega, params, brownian, level)?;
        Ok(paths
            .windows(2)
            .map(|w| w[0].iter().zip(&w[1]).map(|(a, b)| sq_dist(a, b)).fold(0.0, f64::max))
            .collect())
    });
    per_replica.into_iter().collect()
}

/// Runs all sizes on one set of shared Brownian motions (synchronous
/// coupling) and checks that the sup-ℓ² gap between consecutive sizes does
/// not grow. Coordinates are embedded (divided by `N`), which is the
/// `1/(2N)` form of the SDE.
pub fn test_coupling_l2(cfg: &CouplingConfig, source: RandomSource) -> Result<ExperimentReport> {
    let omega = OmegaPlusPoint::new(cfg.omega.clone(), cfg.omega.iter().sum())?;
    if omega.support_len() == 0 {
        return Err(Error::InvalidConfig("omega needs at least one positive atom".into()));
    }
    if cfg.ns.len() < 2 || cfg.ns.windows(2).any(|w| w[0] > w[1]) {
        return Err(Error::InvalidConfig("ns needs at least two nondecreasing sizes".into()));
    }
    if cfg.ns[0] <= omega.support_len() {
        return Err(Error::InvalidConfig(format!("smallest N must exceed the support size {}", omega.support_len())));
    }
    nonnegative("horizon", cfg.horizon)?;
    positive("dt", cfg.dt)?;
    positive("tail_scale", cfg.tail_scale)?;
    at_least("replicas", cfg.replicas, 1)?;
    for &n in &cfg.ns {
        OrderedConfig::new(initial_state(&omega, n, cfg.tail_scale))?.require_strict_interior()?;
    }
    let params = SdeParams::new(cfg.eta, true, cfg.dt)?;
    let mut report = ExperimentReport::new("coupling-l2", cfg, source.master_seed);
    report.note("synchronous shared-noise coupling: a stronger coupling than the one in the convergence statement");

    let runs = discrepancies(cfg, &omega, params, source, 0)?;
    let pairs = cfg.ns.len() - 1;
    let mut table = Table::new(&["n_small", "n_large", "mean_sup_sq", "se"]);
    let mut means = Vec::with_capacity(pairs);
    for k in 0..pairs {
        let col: Vec<f64> = runs.iter().map(|r| r[k]).collect();
        let (m, se) = mean_se(&col);
        let key = format!("{}_{}", cfg.ns[k], cfg.ns[k + 1]);
        report.stat(&format!("sup_sq_{key}"), m);
        report.stat(&format!("se_{key}"), se);
        table.push(vec![cfg.ns[k] as f64, cfg.ns[k + 1] as f64, m, se]);
        means.push(m);
    }
    let worst = means
        .windows(2)
        .map(|w| match (w[0] > 0.0, w[1] > 0.0) {
            (true, _) => w[1] / w[0],
            (false, false) => 1.0,
            (false, true) => f64::INFINITY,
        })
        .fold(0.0, f64::max);
    if means.len() > 1 {
        report.check("max_ratio", worst, Comparator::Le, cfg.slack);
    }
    report.tables.insert("coupling".into(), table);

    if cfg.dt_check && cfg.horizon > 0.0 {
        // Same Brownian paths, each coarse step split in two.
        let fine = discrepancies(cfg, &omega, params, source, 1)?;
        let rel = (0..pairs)
            .map(|k| {
                let m: f64 = fine.iter().map(|r| r[k]).sum::<f64>() / fine.len() as f64;
                if means[k] > 0.0 {
                    (m - means[k]).abs() / means[k]
                } else {
                    m.abs()
                }
            })
            .fold(0.0, f64::max);
        report.check("dt_halving_max_rel_change", rel, Comparator::Lt, 0.25);
    }
    Ok(report)
}
