use serde::{Deserialize, Serialize};

use super::report::{Comparator, ExperimentReport, Table};
use super::stats::mean_se;
use super::{at_least, par_replicas, positive};
use crate::domain::{OrderedConfig, RandomSource};
use crate::error::{Error, Result};
use crate::kernels::{sample_boundary_corner, sample_corner_direct};

/// Tail mass below which the boundary sampler truncates the sequence.
const TRUNCATION_EPS: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct UniformApproxConfig {
    pub k: usize,
    /// System sizes of the geometric family `x^(N)_i = N · first · ratio^(i-1)`.
    pub ns: Vec<usize>,
    pub first: f64,
    pub ratio: f64,
    /// Explicit configurations, used instead of the geometric family.
    pub configs: Option<Vec<Vec<f64>>>,
    /// The test function is `amplitude · Π_i bump(y_i)`, with `bump`
    /// supported on `[center - half_width, center + half_width]` and peak 1.
    pub center: f64,
    pub half_width: f64,
    pub amplitude: f64,
    pub n: usize,
    pub final_threshold: f64,
}

impl Default for UniformApproxConfig {
    fn default() -> Self {
        Self {
            k: 1,
            ns: vec![4, 8, 16, 32],
            first: 0.5,
            ratio: 0.5,
            configs: None,
            center: 0.5,
            half_width: 0.3,
            amplitude: 1.0,
            n: 100_000,
            final_threshold: 0.02,
        }
    }
}

impl UniformApproxConfig {
    fn family(&self) -> Result<Vec<OrderedConfig>> {
        at_least("k", self.k, 1)?;
        positive("half_width", self.half_width)?;
        at_least("n", self.n, 2)?;
        let family: Vec<OrderedConfig> = match &self.configs {
            Some(cs) => cs.iter().map(|c| OrderedConfig::new(c.clone())).collect::<Result<_>>()?,
            None => {
                positive("first", self.first)?;
                if !(self.ratio > 0.0 && self.ratio < 1.0) {
                    return Err(Error::InvalidConfig(format!("ratio = {} must lie in (0, 1)", self.ratio)));
                }
                self.ns
                    .iter()
                    .map(|&n| OrderedConfig::new((0..n).map(|i| n as f64 * self.first * self.ratio.powi(i as i32)).collect()))
                    .collect::<Result<_>>()?
            }
        };
        if family.is_empty() {
            return Err(Error::InvalidConfig("empty configuration family".into()));
        }
        if let Some(c) = family.iter().find(|c| c.len() <= self.k) {
            return Err(Error::InvalidConfig(format!("N = {} must exceed K = {}", c.len(), self.k)));
        }
        Ok(family)
    }

    fn g(&self, y: &[f64]) -> f64 {
        if self.amplitude == 0.0 {
            return 0.0;
        }
        let bump = |v: f64| {
            let u = (v - self.center) / self.half_width;
            if u.abs() < 1.0 {
                (1.0 - 1.0 / (1.0 - u * u)).exp()
            } else {
                0.0
            }
        };
        self.amplitude * y.iter().map(|&v| bump(v)).product::<f64>()
    }
}

/// Compares `∫ g dΛ_K^N(x^(N), ·)` with `∫ g dΛ_K^∞(ω(x^(N)), ·)` along a
/// family whose embeddings converge.
pub fn test_uniform_approx(cfg: &UniformApproxConfig, source: RandomSource) -> Result<ExperimentReport> {
    let family = cfg.family()?;
    let mut report = ExperimentReport::new("uniform-approx", cfg, source.master_seed);
    let mut table = Table::new(&["N", "finite", "boundary", "difference", "se"]);
    let mut diffs = Vec::new();
    for (idx, x) in family.iter().enumerate() {
        let omega = x.embed();
        let fin = source.derive(2 * idx as u64);
        let inf = source.derive(2 * idx as u64 + 1);
        let a: Vec<f64> = par_replicas(cfg.n, |r| sample_corner_direct(x, cfg.k, &mut fin.replica(r).rng()).map(|y| cfg.g(y.values())))
            .into_iter()
            .collect::<Result<_>>()?;
        let b: Vec<f64> = par_replicas(cfg.n, |r| {
            sample_boundary_corner(&omega, cfg.k, TRUNCATION_EPS, &mut inf.replica(r).rng()).map(|y| cfg.g(y.values()))
        })
        .into_iter()
        .collect::<Result<_>>()?;
        let ((ma, sa), (mb, sb)) = (mean_se(&a), mean_se(&b));
        let (d, se) = ((ma - mb).abs(), sa.hypot(sb));
        let n = x.len();
        report.stat(&format!("abs_diff_N{n}"), d);
        report.stat(&format!("se_N{n}"), se);
        table.push(vec![n as f64, ma, mb, d, se]);
        diffs.push((d, se));
    }
    let (last, _) = diffs[diffs.len() - 1];
    report.check("final_abs_diff", last, Comparator::Lt, cfg.final_threshold);
    if diffs.len() > 1 {
        let worst = diffs
            .windows(2)
            .map(|w| (w[1].0 - w[0].0) / w[0].1.hypot(w[1].1).max(f64::MIN_POSITIVE))
            .fold(f64::NEG_INFINITY, f64::max);
        report.check("max_rise_in_se", worst, Comparator::Le, 2.0);
    }
    report.tables.insert("uniform_approx".into(), table);
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_test_function() {
        let cfg = UniformApproxConfig { amplitude: 0.0, n: 100, ..Default::default() };
        let r = test_uniform_approx(&cfg, RandomSource::new(1, 0)).unwrap();
        assert!(r.passed());
        assert_eq!(r.statistics["final_abs_diff"], 0.0);
    }

    #[test]
    fn constant_configs_concentrate() {
        let c = 0.5;
        let configs = [64usize, 256].iter().map(|&n| vec![c; n]).collect();
        let cfg = UniformApproxConfig { configs: Some(configs), n: 4000, ..Default::default() };
        let r = test_uniform_approx(&cfg, RandomSource::new(3, 0)).unwrap();
        // The finite side is exactly c, where the bump equals 1.
        assert!(r.statistics["abs_diff_N256"] < 0.02, "{:?}", r.statistics);
    }

    #[test]
    fn bump_shape() {
        let cfg = UniformApproxConfig::default();
        assert!((cfg.g(&[0.5]) - 1.0).abs() < 1e-15);
        assert_eq!(cfg.g(&[0.2]), 0.0);
        assert_eq!(cfg.g(&[0.9]), 0.0);
        assert!((cfg.g(&[0.4]) - cfg.g(&[0.6])).abs() < 1e-15);
    }
}
