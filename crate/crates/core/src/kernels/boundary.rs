//! Corners of the infinite boundary matrix `(γ - Σ x_j) I + Σ x_j ξ_j ξ_j†`.

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::Rng;

use super::corner::complex_normal;
use crate::domain::{OmegaPlusPoint, OrderedConfig};
use crate::error::{Error, Result};
use crate::linalg::hermitian_eigenvalues;

/// Number of leading support entries kept: the smallest `J` with
/// `Σ_{j >= J} x_j < eps`, never beyond the support.
pub fn truncation_index(omega: &OmegaPlusPoint, eps: f64) -> usize {
    let xs = &omega.xs()[..omega.support_len()];
    let mut tail: f64 = xs.iter().sum();
    for (j, &x) in xs.iter().enumerate() {
        if tail < eps {
            return j;
        }
        tail -= x;
    }
    xs.len()
}

/// One draw from `Λ_K^∞(ω, ·)`: the eigenvalues of the `K × K` matrix
/// `(γ - Σ_{j<J} x_j) I + Σ_{j<J} x_j ξ_j ξ_j†` with standard complex
/// Gaussian `ξ_j`. The dropped tail mass is absorbed into the scalar term.
pub fn sample_boundary_corner<R: Rng + ?Sized>(
    omega: &OmegaPlusPoint,
    k: usize,
    truncation_eps: f64,
    rng: &mut R,
) -> Result<OrderedConfig> {
    if k == 0 {
        return Err(Error::Domain("K must be >= 1".into()));
    }
    if !(truncation_eps > 0.0) {
        return Err(Error::Parameter("truncation_eps must be > 0".into()));
    }
    let j = truncation_index(omega, truncation_eps);
    let xs = &omega.xs()[..j];
    let scalar = (omega.gamma() - xs.iter().sum::<f64>()).max(0.0);
    if k == 1 {
        let v = scalar + xs.iter().map(|&x| x * rng.sample::<f64, _>(rand_distr::Exp1)).sum::<f64>();
        return Ok(OrderedConfig::from_sorted_unchecked(vec![v]));
    }
    let mut m = DMatrix::<Complex64>::from_diagonal_element(k, k, Complex64::new(scalar, 0.0));
    let mut xi = vec![Complex64::new(0.0, 0.0); k];
    for &x in xs {
        for z in xi.iter_mut() {
            *z = complex_normal(rng);
        }
        for a in 0..k {
            let va = xi[a] * x;
            for b in 0..=a {
                m[(a, b)] += va * xi[b].conj();
            }
        }
    }
    for a in 0..k {
        for b in 0..a {
            m[(b, a)] = m[(a, b)].conj();
        }
        m[(a, a)].im = 0.0;
    }
    let ev = hermitian_eigenvalues(&m)?;
    Ok(OrderedConfig::from_sorted_unchecked(ev.into_iter().map(|v| v.max(scalar)).collect()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::domain::RandomSource;

    #[test]
    fn scalar_point() {
        let mut rng = RandomSource::new(1, 0).rng();
        let w = OmegaPlusPoint::new(vec![], 1.7).unwrap();
        assert_eq!(sample_boundary_corner(&w, 3, 1e-12, &mut rng).unwrap().values(), &[1.7; 3]);
    }

    #[test]
    fn k1_mean_is_gamma() {
        let mut rng = RandomSource::new(2, 0).rng();
        let w = OmegaPlusPoint::new(vec![0.5, 0.2, 0.1], 1.0).unwrap();
        let n = 100_000;
        let s: Vec<f64> = (0..n).map(|_| sample_boundary_corner(&w, 1, 1e-12, &mut rng).unwrap().values()[0]).collect();
        let mean = s.iter().sum::<f64>() / n as f64;
        let sd = (s.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / n as f64).sqrt();
        assert!((mean - 1.0).abs() < 4.0 * sd / (n as f64).sqrt(), "{mean}");
    }

    #[test]
    fn k2_trace_mean() {
        let mut rng = RandomSource::new(3, 0).rng();
        let w = OmegaPlusPoint::new(vec![0.6, 0.3], 1.2).unwrap();
        let n = 50_000;
        let mean = (0..n).map(|_| sample_boundary_corner(&w, 2, 1e-12, &mut rng).unwrap().sum()).sum::<f64>() / n as f64;
        assert!((mean - 2.4).abs() < 0.02, "{mean}");
    }

    #[test]
    fn truncation() {
        let w = OmegaPlusPoint::new(vec![0.5, 0.1, 1e-6, 1e-7], 1.0).unwrap();
        assert_eq!(truncation_index(&w, 1e-12), 4);
        assert_eq!(truncation_index(&w, 1e-5), 2);
        assert_eq!(truncation_index(&w, 10.0), 0);
    }
}
