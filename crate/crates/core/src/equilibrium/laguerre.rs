//! β = 2 Laguerre and inverse-Laguerre ensembles for real `η > -1`.

use rand::Rng;
use rand_distr::{Distribution, Gamma};

use crate::domain::OrderedConfig;
use crate::error::{Error, Result};
use crate::linalg::tridiagonal_eigenvalues;

fn check_eta(eta: f64) -> Result<()> {
    if !(eta > -1.0 && eta.is_finite()) {
        return Err(Error::Parameter(format!("eta = {eta} must be > -1")));
    }
    Ok(())
}

fn gamma_sqrt<R: Rng + ?Sized>(shape: f64, rng: &mut R) -> f64 {
    Gamma::new(shape, 1.0).expect("positive shape").sample(rng).sqrt()
}

/// Eigenvalues of `B Bᵀ` for the lower bidiagonal `B` with
/// `B_ii = sqrt(Gamma(N + η - i))` and `B_{i+1,i} = sqrt(Gamma(N - 1 - i))`.
/// Their joint density is `∝ Δ(y)² Π y_i^η e^{-y_i}`.
pub fn sample_laguerre<R: Rng + ?Sized>(n: usize, eta: f64, rng: &mut R) -> Result<OrderedConfig> {
    check_eta(eta)?;
    if n == 0 {
        return Err(Error::Parameter("N must be >= 1".into()));
    }
    let d: Vec<f64> = (0..n).map(|i| gamma_sqrt(n as f64 + eta - i as f64, rng)).collect();
    let s: Vec<f64> = (0..n - 1).map(|i| gamma_sqrt((n - 1 - i) as f64, rng)).collect();
    let diag: Vec<f64> = (0..n).map(|i| d[i] * d[i] + if i > 0 { s[i - 1] * s[i - 1] } else { 0.0 }).collect();
    let off: Vec<f64> = (0..n - 1).map(|i| s[i] * d[i]).collect();
    let mut ev = tridiagonal_eigenvalues(&diag, &off)?;
    for v in ev.iter_mut() {
        *v = v.max(0.0);
    }
    Ok(OrderedConfig::from_sorted_unchecked(ev))
}

/// `x_i = 1 / y_{N+1-i}` for a Laguerre sample `y`.
pub fn invert(y: &OrderedConfig) -> OrderedConfig {
    OrderedConfig::from_sorted_unchecked(y.values().iter().rev().map(|v| 1.0 / v.max(f64::MIN_POSITIVE)).collect())
}

/// One draw from the inverse Laguerre ensemble, the equilibrium of the
/// eigenvalue SDE.
pub fn sample_inverse_laguerre<R: Rng + ?Sized>(n: usize, eta: f64, rng: &mut R) -> Result<OrderedConfig> {
    Ok(invert(&sample_laguerre(n, eta, rng)?))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::domain::RandomSource;

    #[test]
    fn rejects_bad_eta() {
        let mut rng = RandomSource::new(0, 0).rng();
        assert!(matches!(sample_laguerre(3, -1.0, &mut rng), Err(Error::Parameter(_))));
    }

    #[test]
    fn one_particle_is_gamma() {
        let mut rng = RandomSource::new(1, 0).rng();
        let n = 100_000;
        let mean = (0..n).map(|_| sample_laguerre(1, 1.5, &mut rng).unwrap().values()[0]).sum::<f64>() / n as f64;
        // Gamma(2.5): sd = sqrt(2.5).
        assert!((mean - 2.5).abs() < 4.0 * 2.5f64.sqrt() / (n as f64).sqrt());
    }

    #[test]
    fn trace_mean() {
        let mut rng = RandomSource::new(2, 0).rng();
        let (n, eta, reps) = (6, 0.5, 20_000);
        let sums: Vec<f64> = (0..reps).map(|_| sample_laguerre(n, eta, &mut rng).unwrap().sum()).collect();
        let mean = sums.iter().sum::<f64>() / reps as f64;
        let sd = (sums.iter().map(|s| (s - mean).powi(2)).sum::<f64>() / reps as f64).sqrt();
        assert!((mean - 6.0 * 6.5).abs() < 4.0 * sd / (reps as f64).sqrt(), "{mean}");
    }

    #[test]
    fn inversion_is_exact() {
        let a = sample_laguerre(7, 0.3, &mut RandomSource::new(3, 4).rng()).unwrap();
        let b = sample_inverse_laguerre(7, 0.3, &mut RandomSource::new(3, 4).rng()).unwrap();
        let mut want: Vec<f64> = a.values().iter().map(|v| 1.0 / v).collect();
        want.sort_by(|p, q| q.total_cmp(p));
        assert_eq!(b.values(), &want[..]);
        assert!(b.values().windows(2).all(|w| w[0] >= w[1]));
    }

    #[test]
    fn inverse_gamma_mean() {
        let mut rng = RandomSource::new(5, 0).rng();
        let n = 200_000;
        let s: Vec<f64> = (0..n).map(|_| sample_inverse_laguerre(1, 1.0, &mut rng).unwrap().values()[0]).collect();
        // Inverse-gamma(2) has infinite variance; compare the median instead:
        // P(X <= m) = e^{-1/m}(1 + 1/m) = 1/2 at m = 0.5958243...
        let below = s.iter().filter(|v| **v <= 0.595_824_3).count() as f64 / n as f64;
        assert!((below - 0.5).abs() < 0.005, "{below}");
        let trimmed: Vec<f64> = s.iter().copied().filter(|v| *v < 1e6).collect();
        let mean = trimmed.iter().sum::<f64>() / trimmed.len() as f64;
        assert!((mean - 1.0).abs() < 0.1, "{mean}");
    }
}
