use serde::{Deserialize, Serialize};

use super::report::{Comparator, ExperimentReport};
use super::stats::ks_two_sample;
use super::{at_least, keep_ok, nonnegative, par_replicas, positive, step_count, ALPHA, DT_CHECK_ALPHA};
use crate::domain::{OrderedConfig, RandomSource, SdeParams};
use crate::error::{Error, Result};
use crate::sde::{eigenvalues, step_matrix_sde, HermitianState, Integrator, Stepper};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct MatrixAgreementConfig {
    /// Spectrum of the diagonal starting matrix `H0`.
    pub x0: Vec<f64>,
    pub t: f64,
    pub eta: f64,
    /// `η` of the eigenvalue chain. Differs from `eta` only in a negative control.
    pub eta_eigen: Option<f64>,
    pub n: usize,
    pub dt: f64,
    pub integrator: Integrator,
    pub dt_check: bool,
}

impl Default for MatrixAgreementConfig {
    fn default() -> Self {
        Self {
            x0: vec![3.0, 2.0, 1.0],
            t: 0.5,
            eta: 0.0,
            eta_eigen: None,
            n: 20_000,
            dt: 2.5e-4,
            integrator: Integrator::Log,
            dt_check: true,
        }
    }
}

fn matrix_chain(x0: &OrderedConfig, t: f64, dt: f64, params: SdeParams, n: usize, source: RandomSource) -> Vec<Result<Vec<f64>>> {
    let steps = step_count(t, dt);
    par_replicas(n, |r| {
        let mut rng = source.replica(r).rng();
        let mut h = HermitianState::from_config(x0);
        for _ in 0..steps {
            h = step_matrix_sde(&h, &params, t / steps as f64, &mut rng);
        }
        // A spectrum pushed far below zero is the matrix analogue of a failed step.
        eigenvalues(&h).map(OrderedConfig::into_values).map_err(|e| match e {
            Error::Domain(_) => Error::StepFailure { time: t, min_dt: dt },
            other => other,
        })
    })
}

fn eigen_chain(x0: &OrderedConfig, t: f64, params: SdeParams, integ: Integrator, n: usize, source: RandomSource) -> Vec<Result<Vec<f64>>> {
    par_replicas(n, |r| {
        let mut rng = source.replica(r).rng();
        let mut v = x0.values().to_vec();
        Stepper::new(integ, params, v.len()).advance(&mut v, t, &mut rng)?;
        Ok(v)
    })
}

/// Two-sample KS `(D, p)` for each ordered coordinate.
fn coordinate_ks(a: &[Vec<f64>], b: &[Vec<f64>]) -> Result<Vec<(f64, f64)>> {
    (0..a[0].len())
        .map(|i| {
            let ca: Vec<f64> = a.iter().map(|v| v[i]).collect();
            let cb: Vec<f64> = b.iter().map(|v| v[i]).collect();
            ks_two_sample(&ca, &cb)
        })
        .collect()
}

/// Compares the spectrum of the Hermitian matrix SDE with the eigenvalue SDE
/// run directly, coordinate by coordinate.
pub fn test_matrix_eigen_agreement(cfg: &MatrixAgreementConfig, source: RandomSource) -> Result<ExperimentReport> {
    let x0 = OrderedConfig::new(cfg.x0.clone())?;
    x0.require_strict_interior()?;
    nonnegative("t", cfg.t)?;
    positive("dt", cfg.dt)?;
    at_least("n", cfg.n, 10)?;
    let params = SdeParams::new(cfg.eta, false, cfg.dt)?;
    let params_eigen = params.with_eta(cfg.eta_eigen.unwrap_or(cfg.eta));
    params_eigen.validate()?;
    let n_coords = x0.len();
    let mut report = ExperimentReport::new("matrix-eigen-agreement", cfg, source.master_seed);

    let (m, fail_m) = keep_ok(matrix_chain(&x0, cfg.t, cfg.dt, params, cfg.n, source.derive(1)))?;
    let (e, fail_e) = keep_ok(eigen_chain(&x0, cfg.t, params_eigen, cfg.integrator, cfg.n, source.derive(2)))?;
    report.stat("discarded_matrix", fail_m as f64);
    report.stat("discarded_eigen", fail_e as f64);
    let level = ALPHA / n_coords as f64;
    for (i, (d, p)) in coordinate_ks(&m, &e)?.into_iter().enumerate() {
        report.stat(&format!("ks_d_x{}", i + 1), d);
        report.check(&format!("ks_p_x{}", i + 1), p, Comparator::Gt, level);
    }

    if cfg.dt_check && cfg.t > 0.0 {
        let k = (cfg.n / 5).max(10);
        let (fine, _) = keep_ok(matrix_chain(&x0, cfg.t, 0.5 * cfg.dt, params, k, source.derive(3)))?;
        let coarse = &m[..k.min(m.len())];
        let min_p = coordinate_ks(coarse, &fine)?.into_iter().map(|(_, p)| p).fold(1.0, f64::min);
        report.check("dt_halving_min_p", min_p, Comparator::Gt, DT_CHECK_ALPHA / n_coords as f64);
    }
    if cfg.eta_eigen.is_some_and(|v| v != cfg.eta) {
        report.note("negative control: chains use different eta, a failing verdict is expected");
    }
    Ok(report)
}
