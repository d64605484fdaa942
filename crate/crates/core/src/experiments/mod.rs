//! Numerical experiments that turn the limit theorems into pass/fail checks
//! at finite `N`, and the two-sample statistics they rely on.
//!
//! Every experiment takes a serde config (unknown keys rejected) and a
//! [`RandomSource`]. Replica `r` always draws from its own stream, and
//! results are collected in replica order, so a report depends only on the
//! seed and the config, never on the thread count.

mod collision;
mod coupling;
mod equilibrium;
mod generator;
mod hard_edge;
mod intertwining;
mod matrix;
pub mod report;
pub mod stats;
mod uniform;

use rayon::prelude::*;

pub use collision::{test_collision_bound, CollisionConfig};
pub use coupling::{test_coupling_l2, CouplingConfig};
pub use equilibrium::{test_equilibrium, EquilibriumConfig};
pub use generator::{test_generator, GeneratorConfig};
pub use hard_edge::{test_hard_edge_density, HardEdgeConfig};
pub use intertwining::{test_intertwining, IntertwiningConfig};
pub use matrix::{test_matrix_eigen_agreement, MatrixAgreementConfig};
pub use report::{Comparator, ExperimentReport, Table, Threshold, TOLERANCE_NOTE};
pub use stats::{
    chi_square, energy_distance, ks_one_sample, ks_two_sample, mean_se, permutation_test, PermutationTest,
};
pub use uniform::{test_uniform_approx, UniformApproxConfig};

use crate::domain::RandomSource;
use crate::error::{Error, Result};

/// Significance level shared by the distributional checks.
pub const ALPHA: f64 = 0.01;

/// Threshold for the dt-halving sanity comparisons. It is looser than
/// [`ALPHA`] because the check guards against gross discretization bias only.
pub const DT_CHECK_ALPHA: f64 = 1e-3;

/// Names accepted by [`run_named`].
pub const EXPERIMENTS: &[&str] = &[
    "intertwining",
    "uniform-approx",
    "equilibrium",
    "coupling-l2",
    "collision-bound",
    "hard-edge-density",
    "matrix-eigen-agreement",
    "generator",
];

/// Runs `f(r)` for `r in 0..n` in parallel and returns the results in order.
pub(crate) fn par_replicas<T, F>(n: usize, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(u64) -> T + Sync + Send,
{
    (0..n as u64).into_par_iter().map(f).collect()
}

/// Keeps successful replicas. Step failures are counted and dropped, any
/// other error aborts the experiment.
pub(crate) fn keep_ok<T>(results: Vec<Result<T>>) -> Result<(Vec<T>, usize)> {
    let mut ok = Vec::with_capacity(results.len());
    let mut failed = 0;
    for r in results {
        match r {
            Ok(v) => ok.push(v),
            Err(Error::StepFailure { .. }) => failed += 1,
            Err(e) => return Err(e),
        }
    }
    if ok.is_empty() {
        return Err(Error::EmptySample);
    }
    Ok((ok, failed))
}

/// Number of fixed steps of size at most `dt` covering `t`.
pub(crate) fn step_count(t: f64, dt: f64) -> usize {
    if t <= 0.0 {
        0
    } else {
        (t / dt - 1e-9).ceil().max(1.0) as usize
    }
}

pub(crate) fn positive(name: &str, v: f64) -> Result<()> {
    if v > 0.0 && v.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidConfig(format!("{name} = {v} must be positive")))
    }
}

pub(crate) fn nonnegative(name: &str, v: f64) -> Result<()> {
    if v >= 0.0 && v.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidConfig(format!("{name} = {v} must be >= 0")))
    }
}

pub(crate) fn at_least(name: &str, v: usize, min: usize) -> Result<()> {
    if v >= min {
        Ok(())
    } else {
        Err(Error::InvalidConfig(format!("{name} = {v} must be >= {min}")))
    }
}

/// Runs an experiment by name with a JSON parameter document. Missing keys
/// take their defaults; unknown keys are rejected.
pub fn run_named(name: &str, params: serde_json::Value, source: RandomSource) -> Result<ExperimentReport> {
    fn parse<T: serde::de::DeserializeOwned>(v: serde_json::Value) -> Result<T> {
        serde_json::from_value(v).map_err(|e| Error::InvalidConfig(e.to_string()))
    }
    match name {
        "intertwining" => test_intertwining(&parse(params)?, source),
        "uniform-approx" => test_uniform_approx(&parse(params)?, source),
        "equilibrium" => test_equilibrium(&parse(params)?, source),
        "coupling-l2" => test_coupling_l2(&parse(params)?, source),
        "collision-bound" => test_collision_bound(&parse(params)?, source),
        "hard-edge-density" => test_hard_edge_density(&parse(params)?, source),
        "matrix-eigen-agreement" => test_matrix_eigen_agreement(&parse(params)?, source),
        "generator" => test_generator(&parse(params)?, source),
        other => Err(Error::InvalidConfig(format!("unknown experiment `{other}` (expected one of {})", EXPERIMENTS.join(", ")))),
    }
}

/// The default parameter document of an experiment, as JSON.
pub fn default_params(name: &str) -> Result<serde_json::Value> {
    let v = match name {
        "intertwining" => serde_json::to_value(IntertwiningConfig::default()),
        "uniform-approx" => serde_json::to_value(UniformApproxConfig::default()),
        "equilibrium" => serde_json::to_value(EquilibriumConfig::default()),
        "coupling-l2" => serde_json::to_value(CouplingConfig::default()),
        "collision-bound" => serde_json::to_value(CollisionConfig::default()),
        "hard-edge-density" => serde_json::to_value(HardEdgeConfig::default()),
        "matrix-eigen-agreement" => serde_json::to_value(MatrixAgreementConfig::default()),
        "generator" => serde_json::to_value(GeneratorConfig::default()),
        other => return Err(Error::InvalidConfig(format!("unknown experiment `{other}`"))),
    };
    v.map_err(|e| Error::InvalidConfig(e.to_string()))
}
