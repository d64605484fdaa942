//! Two-sample and goodness-of-fit statistics.

use rand::seq::SliceRandom;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use statrs::distribution::{ChiSquared, ContinuousCDF};

use crate::domain::RandomSource;
use crate::error::{Error, Result};

/// Smallest permutation count accepted by [`permutation_test`].
pub const MIN_PERMUTATIONS: usize = 200;

/// Points stored coordinate by coordinate in `f32`, for the distance kernels.
struct Columns {
    cols: Vec<Vec<f32>>,
}

impl Columns {
    fn from_rows(rows: &[&[f64]]) -> Self {
        let dim = rows[0].len();
        Self { cols: (0..dim).map(|d| rows.iter().map(|r| r[d] as f32).collect()).collect() }
    }

    fn len(&self) -> usize {
        self.cols[0].len()
    }

    /// `Σ_{lo <= i < j < hi} |p_i - p_j|`.
    fn pair_sum(&self, lo: usize, hi: usize) -> f64 {
        let mut total = 0.0f64;
        for i in lo..hi {
            total += match self.cols.len() {
                1 => row_sum::<1>(&self.cols, i, hi),
                2 => row_sum::<2>(&self.cols, i, hi),
                3 => row_sum::<3>(&self.cols, i, hi),
                _ => row_sum_dyn(&self.cols, i, hi),
            };
        }
        total
    }
}

/// `Σ_{i < j < hi} |p_i - p_j|` with eight `f32` lanes, flushed to `f64`
/// every block so that rounding stays at the `f32` epsilon of one block.
fn row_sum<const D: usize>(cols: &[Vec<f32>], i: usize, hi: usize) -> f64 {
    const LANES: usize = 8;
    const BLOCK: usize = 1024;
    let p: [f32; D] = std::array::from_fn(|d| cols[d][i]);
    let s: [&[f32]; D] = std::array::from_fn(|d| &cols[d][i + 1..hi]);
    let len = hi - i - 1;
    let mut total = 0.0f64;
    let mut start = 0;
    while start < len {
        let end = (start + BLOCK).min(len);
        let mut acc = [0.0f32; LANES];
        let mut k = start;
        while k + LANES <= end {
            let mut sq = [0.0f32; LANES];
            for d in 0..D {
                let c: &[f32; LANES] = s[d][k..k + LANES].try_into().expect("lane width");
                for l in 0..LANES {
                    let t = c[l] - p[d];
                    sq[l] += t * t;
                }
            }
            for l in 0..LANES {
                acc[l] += sq[l].sqrt();
            }
            k += LANES;
        }
        for kk in k..end {
            let mut sq = 0.0f32;
            for d in 0..D {
                let t = s[d][kk] - p[d];
                sq += t * t;
            }
            acc[0] += sq.sqrt();
        }
        total += acc.iter().map(|&a| a as f64).sum::<f64>();
        start = end;
    }
    total
}

fn row_sum_dyn(cols: &[Vec<f32>], i: usize, hi: usize) -> f64 {
    (i + 1..hi)
        .map(|j| cols.iter().map(|c| ((c[j] - c[i]) as f64).powi(2)).sum::<f64>().sqrt())
        .sum()
}

fn check_samples(a: &[Vec<f64>], b: &[Vec<f64>]) -> Result<usize> {
    if a.is_empty() || b.is_empty() {
        return Err(Error::EmptySample);
    }
    let dim = a[0].len();
    if dim == 0 {
        return Err(Error::EmptySample);
    }
    if let Some(bad) = a.iter().chain(b).find(|r| r.len() != dim) {
        return Err(Error::DimensionMismatch(dim, bad.len()));
    }
    Ok(dim)
}

/// `2 S_AB/(nm) - 2 S_AA/n² - 2 S_BB/m²` from unordered pair sums.
fn energy_from_sums(total: f64, s_aa: f64, s_bb: f64, n: usize, m: usize) -> f64 {
    let s_ab = total - s_aa - s_bb;
    let (nf, mf) = (n as f64, m as f64);
    2.0 * s_ab / (nf * mf) - 2.0 * s_aa / (nf * nf) - 2.0 * s_bb / (mf * mf)
}

/// The energy statistic `2E|A - B| - E|A - A'| - E|B - B'|` (V-statistic
/// form, so identical samples give exactly 0).
pub fn energy_distance(a: &[Vec<f64>], b: &[Vec<f64>]) -> Result<f64> {
    check_samples(a, b)?;
    let rows: Vec<&[f64]> = a.iter().chain(b).map(Vec::as_slice).collect();
    let cols = Columns::from_rows(&rows);
    let n = a.len();
    let total = cols.pair_sum(0, cols.len());
    Ok(energy_from_sums(total, cols.pair_sum(0, n), cols.pair_sum(n, cols.len()), n, b.len()).max(0.0))
}

/// Result of a label-permutation test.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PermutationTest {
    pub statistic: f64,
    pub p_value: f64,
    pub null_mean: f64,
    pub null_sd: f64,
}

/// Energy statistic with its permutation p-value
/// `(1 + #{E_perm >= E_obs}) / (1 + n_perm)`.
///
/// Permutation `r` shuffles with stream `r` of `source`, so the result does
/// not depend on the thread count.
pub fn permutation_test(a: &[Vec<f64>], b: &[Vec<f64>], n_perm: usize, source: RandomSource) -> Result<PermutationTest> {
    check_samples(a, b)?;
    if n_perm < MIN_PERMUTATIONS {
        return Err(Error::Parameter(format!("n_perm = {n_perm} must be >= {MIN_PERMUTATIONS}")));
    }
    let rows: Vec<&[f64]> = a.iter().chain(b).map(Vec::as_slice).collect();
    let (n, m) = (a.len(), b.len());
    let pooled = Columns::from_rows(&rows);
    let total = pooled.pair_sum(0, n + m);
    let observed = energy_from_sums(total, pooled.pair_sum(0, n), pooled.pair_sum(n, n + m), n, m);
    let null: Vec<f64> = (0..n_perm as u64)
        .into_par_iter()
        .map(|r| {
            let mut idx: Vec<usize> = (0..n + m).collect();
            idx.shuffle(&mut source.replica(r).rng());
            let cols = Columns { cols: pooled.cols.iter().map(|c| idx.iter().map(|&i| c[i]).collect()).collect() };
            energy_from_sums(total, cols.pair_sum(0, n), cols.pair_sum(n, n + m), n, m)
        })
        .collect();
    let exceed = null.iter().filter(|&&e| e >= observed).count();
    let (mean, sd) = mean_sd(&null);
    Ok(PermutationTest {
        statistic: observed.max(0.0),
        p_value: (1 + exceed) as f64 / (1 + n_perm) as f64,
        null_mean: mean,
        null_sd: sd,
    })
}

/// Mean and sample standard deviation.
pub fn mean_sd(v: &[f64]) -> (f64, f64) {
    let n = v.len() as f64;
    let mean = v.iter().sum::<f64>() / n;
    let var = if v.len() > 1 { v.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0) } else { 0.0 };
    (mean, var.sqrt())
}

/// Mean and standard error of the mean.
pub fn mean_se(v: &[f64]) -> (f64, f64) {
    let (m, sd) = mean_sd(v);
    (m, sd / (v.len() as f64).sqrt())
}

/// Kolmogorov survival function `Q(λ) = 2 Σ_{k>=1} (-1)^{k-1} e^{-2k²λ²}`.
pub fn kolmogorov_q(lambda: f64) -> f64 {
    if lambda <= 0.0 {
        return 1.0;
    }
    if lambda < 1.18 {
        // Jacobi-transformed series, fast for small λ.
        let y = -std::f64::consts::PI.powi(2) / (8.0 * lambda * lambda);
        let s: f64 = (1..=20).map(|k| (((2 * k - 1) * (2 * k - 1)) as f64 * y).exp()).sum();
        return (1.0 - (2.0 * std::f64::consts::PI).sqrt() / lambda * s).clamp(0.0, 1.0);
    }
    let mut sum = 0.0;
    for k in 1..=100 {
        let term = (-2.0 * (k * k) as f64 * lambda * lambda).exp();
        sum += if k % 2 == 1 { term } else { -term };
        if term < 1e-17 {
            break;
        }
    }
    (2.0 * sum).clamp(0.0, 1.0)
}

fn sorted(v: &[f64]) -> Vec<f64> {
    let mut s = v.to_vec();
    s.sort_by(|a, b| a.total_cmp(b));
    s
}

/// Two-sample Kolmogorov–Smirnov statistic and asymptotic p-value.
pub fn ks_two_sample(a: &[f64], b: &[f64]) -> Result<(f64, f64)> {
    if a.is_empty() || b.is_empty() {
        return Err(Error::EmptySample);
    }
    let (sa, sb) = (sorted(a), sorted(b));
    let (n, m) = (sa.len() as f64, sb.len() as f64);
    let (mut i, mut j, mut d) = (0usize, 0usize, 0.0f64);
    while i < sa.len() && j < sb.len() {
        let v = sa[i].min(sb[j]);
        while i < sa.len() && sa[i] <= v {
            i += 1;
        }
        while j < sb.len() && sb[j] <= v {
            j += 1;
        }
        d = d.max((i as f64 / n - j as f64 / m).abs());
    }
    let en = (n * m / (n + m)).sqrt();
    Ok((d, kolmogorov_q((en + 0.12 + 0.11 / en) * d)))
}

/// One-sample Kolmogorov–Smirnov test against a continuous CDF.
pub fn ks_one_sample<F: Fn(f64) -> f64>(data: &[f64], cdf: F) -> Result<(f64, f64)> {
    if data.is_empty() {
        return Err(Error::EmptySample);
    }
    let s = sorted(data);
    let n = s.len() as f64;
    let d = s
        .iter()
        .enumerate()
        .map(|(i, &x)| {
            let f = cdf(x);
            (f - i as f64 / n).max((i + 1) as f64 / n - f)
        })
        .fold(0.0, f64::max);
    let en = n.sqrt();
    Ok((d, kolmogorov_q((en + 0.12 + 0.11 / en) * d)))
}

/// Pearson χ² goodness of fit. Cells with expected count below 5 are pooled
/// into one cell (dropped if the pool is still below 5). Returns
/// `(statistic, degrees of freedom, p-value)`.
pub fn chi_square(observed: &[f64], expected: &[f64]) -> Result<(f64, usize, f64)> {
    if observed.len() != expected.len() {
        return Err(Error::DimensionMismatch(observed.len(), expected.len()));
    }
    let mut cells: Vec<(f64, f64)> = vec![];
    let (mut po, mut pe) = (0.0, 0.0);
    for (&o, &e) in observed.iter().zip(expected) {
        if e >= 5.0 {
            cells.push((o, e));
        } else {
            po += o;
            pe += e;
        }
    }
    if pe >= 5.0 {
        cells.push((po, pe));
    }
    if cells.len() < 2 {
        return Err(Error::EmptySample);
    }
    let stat: f64 = cells.iter().map(|(o, e)| (o - e).powi(2) / e).sum();
    let dof = cells.len() - 1;
    let p = ChiSquared::new(dof as f64).map_err(|e| Error::Parameter(e.to_string()))?.sf(stat);
    Ok((stat, dof, p))
}
