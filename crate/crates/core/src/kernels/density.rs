//! The density of `Λ_K^N(x, ·)` as a determinant of shifted splines.

use nalgebra::DMatrix;
use rand::Rng;

use super::corner::sample_corner_direct;
use super::spline::m_spline_slice;
use crate::domain::OrderedConfig;
use crate::error::{Error, Result};
use crate::linalg::gauss_legendre;

/// Largest `N` with an exact density.
pub const MAX_DENSITY_N: usize = 30;
/// Largest `K` with an exact density.
pub const MAX_DENSITY_K: usize = 6;
/// Largest accepted Hadamard condition ratio of the spline determinant.
pub const CONDITION_LIMIT: f64 = 1e12;

fn binomial(n: usize, k: usize) -> f64 {
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

fn check_inputs(y: &OrderedConfig, x: &OrderedConfig, k: usize) -> Result<()> {
    let n = x.len();
    if k == 0 || k >= n {
        return Err(Error::Domain(format!("need 1 <= K < N, got K = {k}, N = {n}")));
    }
    if y.len() != k {
        return Err(Error::DimensionMismatch(y.len(), k));
    }
    if x.values().windows(2).any(|w| w[0] <= w[1]) {
        return Err(Error::Domain("density needs strictly decreasing x".into()));
    }
    Ok(())
}

/// Density of `Λ_K^N(x, ·)` at `y` with respect to Lebesgue measure on the
/// ordered chamber:
///
/// ```text
/// Π_{l<K} C(N-K+l, l) · det[M(y_{K-j+1}; x_{K-i+1}, …, x_{N-i+1})]_{i,j≤K} · Δ_K(y)
///     / Π_{j-i ≥ N-K+1} (x_i - x_j)
/// ```
///
/// For `K = 1` this is `M(y; x)`.
pub fn lambda_kn_density(y: &OrderedConfig, x: &OrderedConfig, k: usize) -> Result<f64> {
    check_inputs(y, x, k)?;
    let n = x.len();
    if n > MAX_DENSITY_N || k > MAX_DENSITY_K {
        return Err(Error::OutsideStabilityEnvelope { n, k });
    }
    let (xv, yv) = (x.values(), y.values());
    let vdm: f64 = (0..k).flat_map(|i| (i + 1..k).map(move |j| (i, j))).map(|(i, j)| yv[i] - yv[j]).product();
    if vdm == 0.0 {
        return Ok(0.0);
    }
    let m = DMatrix::from_fn(k, k, |r, c| m_spline_slice(yv[k - 1 - c], &xv[k - 1 - r..n - r]));
    let det = m.clone().lu().determinant();
    if det == 0.0 {
        return Ok(0.0);
    }
    let row_norms: f64 = m.row_iter().map(|r| r.norm()).product();
    let condition = row_norms / det.abs();
    if condition > CONDITION_LIMIT {
        return Err(Error::NumericalInstability { condition, limit: CONDITION_LIMIT });
    }
    let prefactor: f64 = (1..k).map(|l| binomial(n - k + l, l)).product();
    let gap = n - k + 1;
    let denom: f64 = (0..n).flat_map(|i| (i + gap..n).map(move |j| (i, j))).map(|(i, j)| xv[i] - xv[j]).product();
    Ok(prefactor * det * vdm / denom)
}

/// Monte Carlo estimate of the density at `y`: the fraction of `samples`
/// draws falling in the cube of half-width `half_width` around `y`, divided
/// by its volume.
pub fn lambda_kn_density_mc<R: Rng + ?Sized>(
    y: &OrderedConfig,
    x: &OrderedConfig,
    k: usize,
    samples: usize,
    half_width: f64,
    rng: &mut R,
) -> Result<f64> {
    check_inputs(y, x, k)?;
    let mut hits = 0usize;
    for _ in 0..samples {
        let s = sample_corner_direct(x, k, rng)?;
        if s.values().iter().zip(y.values()).all(|(a, b)| (a - b).abs() <= half_width) {
            hits += 1;
        }
    }
    Ok(hits as f64 / samples as f64 / (2.0 * half_width).powi(k as i32))
}

/// The exact density inside the stability envelope; outside it, a Monte
/// Carlo estimate with a logged warning.
pub fn lambda_kn_density_or_estimate<R: Rng + ?Sized>(
    y: &OrderedConfig,
    x: &OrderedConfig,
    k: usize,
    rng: &mut R,
) -> Result<f64> {
    match lambda_kn_density(y, x, k) {
        Err(Error::OutsideStabilityEnvelope { n, k }) => {
            log::warn!("N = {n}, K = {k} is outside the exact density envelope; using a Monte Carlo estimate");
            let width = 0.02 * (x.values()[0] - x.values()[x.len() - 1]);
            lambda_kn_density_mc(y, x, k, 200_000, width, rng)
        }
        other => other,
    }
}

/// Mass of `Λ_2^N(x, ·)` on `{y_1 ∈ [a1, b1], y_2 ∈ [a2, b2], y_1 >= y_2}`.
///
/// The two intervals must be equal or disjoint, with endpoints on a grid
/// that contains every knot; the integrand is then a polynomial on each piece
/// and Gauss–Legendre is exact. Equal intervals are integrated over the
/// triangle below the diagonal.
pub fn cell_mass_k2(x: &OrderedConfig, (a1, b1): (f64, f64), (a2, b2): (f64, f64)) -> Result<f64> {
    let n = x.len();
    let rule = gauss_legendre(n + 2);
    let eval = |u: f64, v: f64| lambda_kn_density(&OrderedConfig::from_sorted_unchecked(vec![u, v]), x, 2);
    let mut acc = 0.0;
    if a1 == a2 && b1 == b2 {
        // y_1 ∈ [a, b], y_2 = a + s (y_1 - a).
        let (h1, m1) = (0.5 * (b1 - a1), 0.5 * (b1 + a1));
        for (t1, w1) in rule.0.iter().zip(&rule.1) {
            let u = m1 + h1 * t1;
            let span = u - a1;
            for (t2, w2) in rule.0.iter().zip(&rule.1) {
                let v = a1 + span * 0.5 * (1.0 + t2);
                acc += w1 * w2 * 0.5 * span * eval(u, v)?;
            }
        }
        Ok(acc * h1)
    } else if a1 >= b2 {
        let (h1, m1) = (0.5 * (b1 - a1), 0.5 * (b1 + a1));
        let (h2, m2) = (0.5 * (b2 - a2), 0.5 * (b2 + a2));
        for (t1, w1) in rule.0.iter().zip(&rule.1) {
            for (t2, w2) in rule.0.iter().zip(&rule.1) {
                acc += w1 * w2 * eval(m1 + h1 * t1, m2 + h2 * t2)?;
            }
        }
        Ok(acc * h1 * h2)
    } else if b1 <= a2 {
        Ok(0.0)
    } else {
        Err(Error::Domain("cells must be equal or disjoint".into()))
    }
}

/// The sorted knots of `x` with each gap split into `parts` equal pieces.
pub fn refined_grid(x: &OrderedConfig, parts: usize) -> Vec<f64> {
    let mut g: Vec<f64> = x.values().iter().rev().copied().collect();
    g.dedup();
    let mut out = vec![g[0]];
    for w in g.windows(2) {
        for p in 1..=parts {
            out.push(w[0] + (w[1] - w[0]) * p as f64 / parts as f64);
        }
    }
    out
}

/// Total mass of `Λ_K^N(x, ·)` for `K ∈ {1, 2}` by piecewise Gauss–Legendre.
pub fn total_mass(x: &OrderedConfig, k: usize) -> Result<f64> {
    let grid = refined_grid(x, 1);
    match k {
        1 => {
            let rule = gauss_legendre(x.len() + 2);
            let mut acc = 0.0;
            for w in grid.windows(2) {
                let (h, m) = (0.5 * (w[1] - w[0]), 0.5 * (w[1] + w[0]));
                for (t, wt) in rule.0.iter().zip(&rule.1) {
                    acc += wt * h * lambda_kn_density(&OrderedConfig::from_sorted_unchecked(vec![m + h * t]), x, 1)?;
                }
            }
            Ok(acc)
        }
        2 => {
            let mut acc = 0.0;
            for (i, c1) in grid.windows(2).enumerate() {
                for c2 in grid.windows(2).take(i + 1) {
                    acc += cell_mass_k2(x, (c1[0], c1[1]), (c2[0], c2[1]))?;
                }
            }
            Ok(acc)
        }
        _ => Err(Error::Domain("total_mass supports K = 1 and K = 2".into())),
    }
}
