use serde::{Deserialize, Serialize};

use super::report::{Comparator, ExperimentReport, Table};
use super::{at_least, par_replicas};
use crate::domain::RandomSource;
use crate::equilibrium::{inverse_bessel_kernel_scaled, sample_inverse_laguerre};
use crate::error::{Error, Result};
use crate::linalg::{gauss_legendre, integrate};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct HardEdgeConfig {
    pub particles: usize,
    pub eta: f64,
    pub n: usize,
    /// Increasing bin edges in `(0, x_max]`.
    pub bins: Vec<f64>,
    /// Number of largest embedded coordinates histogrammed per sample.
    pub top: usize,
    /// Scale `c` in `(c/(xy)) 𝕁_η(c/x, c/y)` used for the verdict.
    pub kernel_scale: f64,
    /// Second scale reported alongside, without a verdict.
    pub diagnostic_scale: Option<f64>,
    pub min_count: usize,
    pub tolerance: f64,
}

impl Default for HardEdgeConfig {
    fn default() -> Self {
        Self {
            particles: 200,
            eta: 1.0,
            n: 5000,
            bins: vec![0.15, 0.2, 0.25, 0.3, 0.4, 0.5, 0.65, 0.8, 1.0, 1.3, 1.7, 2.5, 4.0],
            top: 3,
            kernel_scale: 8.0,
            diagnostic_scale: Some(4.0),
            min_count: 100,
            tolerance: 0.15,
        }
    }
}

/// Histograms the largest embedded points `x_i / N` of inverse-Laguerre
/// samples and compares the density with the diagonal of the inverse Bessel
/// kernel, averaged over each bin.
pub fn test_hard_edge_density(cfg: &HardEdgeConfig, source: RandomSource) -> Result<ExperimentReport> {
    at_least("particles", cfg.particles, 100)?;
    at_least("n", cfg.n, 1)?;
    at_least("top", cfg.top, 1)?;
    if cfg.top > cfg.particles {
        return Err(Error::InvalidConfig("top exceeds particles".into()));
    }
    if cfg.bins.len() < 2 || cfg.bins[0] <= 0.0 || cfg.bins.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::InvalidConfig("bins must be at least two positive increasing edges".into()));
    }
    if !(cfg.kernel_scale > 0.0) || cfg.diagnostic_scale.is_some_and(|c| !(c > 0.0)) {
        return Err(Error::InvalidConfig("kernel scales must be positive".into()));
    }
    let nf = cfg.particles as f64;
    let tops: Vec<Vec<f64>> = par_replicas(cfg.n, |r| {
        let x = sample_inverse_laguerre(cfg.particles, cfg.eta, &mut source.replica(r).rng())?;
        Ok(x.values()[..cfg.top].iter().map(|v| v / nf).collect())
    })
    .into_iter()
    .collect::<Result<_>>()?;

    let nb = cfg.bins.len() - 1;
    let mut counts = vec![0usize; nb];
    for v in tops.iter().flatten() {
        // Bins are half open, `[lo, hi)`, the last one closed.
        let k = cfg.bins.partition_point(|&e| e <= *v);
        if k >= 1 && k <= nb {
            counts[k - 1] += 1;
        } else if *v == cfg.bins[nb] {
            counts[nb - 1] += 1;
        }
    }
    let rule = gauss_legendre(12);
    let bin_kernel = |c: f64, lo: f64, hi: f64| {
        integrate(|x| inverse_bessel_kernel_scaled(cfg.eta, x, x, c), lo, hi, &rule) / (hi - lo)
    };
    let mut report = ExperimentReport::new("hard-edge-density", cfg, source.master_seed);
    let mut table = Table::new(&["lo", "hi", "count", "empirical", "kernel", "kernel_diagnostic"]);
    let (mut sup, mut sup_diag, mut used) = (0.0f64, 0.0f64, 0usize);
    for k in 0..nb {
        let (lo, hi) = (cfg.bins[k], cfg.bins[k + 1]);
        let emp = counts[k] as f64 / (cfg.n as f64 * (hi - lo));
        let ker = bin_kernel(cfg.kernel_scale, lo, hi);
        let diag = cfg.diagnostic_scale.map_or(f64::NAN, |c| bin_kernel(c, lo, hi));
        table.push(vec![lo, hi, counts[k] as f64, emp, ker, diag]);
        if counts[k] >= cfg.min_count {
            used += 1;
            sup = sup.max((emp - ker).abs() / ker);
            sup_diag = sup_diag.max((emp - diag).abs() / diag);
        }
    }
    report.stat("bins_used", used as f64);
    if used == 0 {
        report.note("no bin reached the minimum count");
    }
    report.check("sup_rel_error", if used > 0 { sup } else { f64::NAN }, Comparator::Lt, cfg.tolerance);
    if let Some(c) = cfg.diagnostic_scale {
        report.stat("sup_rel_error_diagnostic", sup_diag);
        report.note(format!("diagnostic column uses kernel scale {c}"));
    }
    report.tables.insert("hard_edge".into(), table);
    Ok(report)
}
