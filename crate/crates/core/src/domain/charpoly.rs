//! Characteristic-polynomial functionals of a configuration and the singular
//! interaction drift they encode.

use num_complex::Complex64;

use super::{OmegaPlusPoint, OrderedConfig};
use crate::error::{Error, Result};

/// Relative gap below which two coordinates count as coincident.
const COINCIDENCE_TOL: f64 = 1e-13;

/// `Σ_{j≠i} x_i x_j / (x_i - x_j)`, the interaction drift on particle `i`.
pub fn singular_drift(i: usize, config: &OrderedConfig) -> Result<f64> {
    let x = config.values();
    check_index(i, x.len())?;
    let xi = x[i];
    let mut acc = 0.0;
    for (j, &xj) in x.iter().enumerate() {
        if j == i {
            continue;
        }
        let d = xi - xj;
        if d.abs() <= COINCIDENCE_TOL * xi.abs().max(xj.abs()) {
            return Err(Error::CoincidentCoordinates { i, j, xi, xj });
        }
        acc += xi * xj / d;
    }
    Ok(acc)
}

/// The Lyapunov observable `f_n = -log Π_{i<=n<j} (1 - x_j / x_i)` (`n` is 1-based).
pub fn lyapunov_f(config: &OrderedConfig, n: usize) -> Result<f64> {
    config.require_strict_interior()?;
    let x = config.values();
    if n == 0 || n >= x.len() {
        return Err(Error::Domain(format!("n = {n} must satisfy 1 <= n <= N - 1 = {}", x.len() - 1)));
    }
    let mut acc = 0.0;
    for &xi in &x[..n] {
        for &xj in &x[n..] {
            acc -= (-xj / xi).ln_1p();
        }
    }
    Ok(acc)
}

/// `Φ_i(z) = Π_{j≠i} (1 - x_j z)²`.
pub fn char_poly_phi(i: usize, z: f64, config: &OrderedConfig) -> Result<f64> {
    let x = config.values();
    check_index(i, x.len())?;
    Ok(x.iter()
        .enumerate()
        .filter(|(j, _)| *j != i)
        .map(|(_, xj)| {
            let f = 1.0 - xj * z;
            f * f
        })
        .product())
}

/// `d/dz log Φ_i(z) = Σ_{j≠i} -2 x_j / (1 - x_j z)`.
pub fn log_derivative_phi(i: usize, z: f64, config: &OrderedConfig) -> Result<f64> {
    let x = config.values();
    check_index(i, x.len())?;
    Ok(x.iter()
        .enumerate()
        .filter(|(j, _)| *j != i)
        .map(|(_, xj)| -2.0 * xj / (1.0 - xj * z))
        .sum())
}

/// The interaction drift recovered from `Φ_i`: `-½ (log Φ_i)'(1/x_i)`.
///
/// The half log-derivative at `1/x_i` is `Σ_{j≠i} -x_j / (1 - x_j/x_i)`, which
/// is the singular drift with the opposite sign, hence the leading minus.
pub fn drift_via_charpoly(i: usize, config: &OrderedConfig) -> Result<f64> {
    config.require_strict_interior()?;
    check_index(i, config.len())?;
    let z = 1.0 / config.values()[i];
    Ok(-0.5 * log_derivative_phi(i, z, config)?)
}

/// Reverse characteristic polynomial `Π_j (1 - x_j z)` of the given values.
pub fn reverse_char_poly(z: Complex64, xs: &[f64]) -> Complex64 {
    xs.iter().map(|&x| Complex64::new(1.0, 0.0) - z * x).product()
}

/// `E₊(z; ω) = e^{-γz} Π_j e^{x_j z} (1 - x_j z)` over the finite support.
pub fn limit_entire_eplus(z: Complex64, omega: &OmegaPlusPoint) -> Complex64 {
    let shift: f64 = omega.xs().iter().sum::<f64>() - omega.gamma();
    (z * shift).exp() * reverse_char_poly(z, omega.xs())
}

fn check_index(i: usize, n: usize) -> Result<()> {
    if i >= n {
        Err(Error::Domain(format!("index {i} out of range for N = {n}")))
    } else {
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::domain::embed;
    use proptest::prelude::*;

    fn cfg(v: &[f64]) -> OrderedConfig {
        OrderedConfig::new(v.to_vec()).unwrap()
    }

    /// Independent oracle: the drift summed pair by pair.
    fn drift_oracle(i: usize, x: &[f64]) -> f64 {
        (0..x.len()).filter(|&j| j != i).map(|j| x[i] * x[j] / (x[i] - x[j])).sum()
    }

    #[test]
    fn singular_drift_examples() {
        assert_eq!(singular_drift(0, &cfg(&[2.0, 1.0])).unwrap(), 2.0);
        assert_eq!(singular_drift(0, &cfg(&[4.2])).unwrap(), 0.0);
        assert_eq!(singular_drift(1, &cfg(&[3.0, 2.0, 1.0])).unwrap(), -4.0);
    }

    #[test]
    fn singular_drift_rejects_coincidence() {
        let e = singular_drift(0, &cfg(&[1.0, 1.0, 0.5])).unwrap_err();
        assert!(matches!(e, Error::CoincidentCoordinates { i: 0, j: 1, .. }));
        assert!(singular_drift(2, &cfg(&[1.0, 0.0, 0.0])).is_err());
    }

    #[test]
    fn lyapunov_examples() {
        let v = lyapunov_f(&cfg(&[2.0, 1.0]), 1).unwrap();
        assert!((v - 0.693_147_180_559_945_3).abs() < 1e-12);
        let v = lyapunov_f(&cfg(&[4.0, 2.0, 1.0]), 1).unwrap();
        assert!((v - (-(0.5f64 * 0.75).ln())).abs() < 1e-12);
        assert!((v - 0.980_829).abs() < 1e-6);
        assert!(matches!(lyapunov_f(&cfg(&[1.0, 0.0]), 1), Err(Error::Domain(_))));
        assert!(lyapunov_f(&cfg(&[2.0, 1.0]), 2).is_err());
    }

    #[test]
    fn lyapunov_blows_up_monotonically() {
        let mut last = 0.0;
        for k in 1..40 {
            let gap = 0.5f64.powi(k);
            let v = lyapunov_f(&cfg(&[2.0, 2.0 - gap, 0.5]), 1).unwrap();
            assert!(v > last);
            last = v;
        }
        assert!(last > 20.0);
    }

    #[test]
    fn phi_examples() {
        assert_eq!(char_poly_phi(0, 0.7, &cfg(&[3.0])).unwrap(), 1.0);
        assert_eq!(char_poly_phi(0, 1.0, &cfg(&[2.0, 1.0])).unwrap(), 0.0);
        assert_eq!(char_poly_phi(1, 0.25, &cfg(&[2.0, 1.0])).unwrap(), 0.25);
    }

    #[test]
    fn phi_double_roots() {
        let x = cfg(&[5.0, 3.0, 2.0, 0.5]);
        for i in 0..4 {
            for j in (0..4).filter(|&j| j != i) {
                let z = 1.0 / x.values()[j];
                assert!(char_poly_phi(i, z, &x).unwrap().abs() < 1e-18);
                // Double root: the value vanishes to second order.
                let h = 1e-6;
                let v = char_poly_phi(i, z + h, &x).unwrap();
                assert!(v.abs() < 1e-9, "{v}");
            }
        }
    }

    #[test]
    fn drift_via_charpoly_examples() {
        assert!((drift_via_charpoly(0, &cfg(&[2.0, 1.0])).unwrap() - 2.0).abs() < 1e-12);
        assert_eq!(drift_via_charpoly(0, &cfg(&[1.5])).unwrap(), 0.0);
        assert!((drift_via_charpoly(1, &cfg(&[3.0, 2.0, 1.0])).unwrap() + 4.0).abs() < 1e-12);
        assert!(drift_via_charpoly(0, &cfg(&[2.0, 2.0])).is_err());
    }

    #[test]
    fn eplus_examples() {
        let z = Complex64::new(0.7, -0.3);
        let w = OmegaPlusPoint::new(vec![], 1.5).unwrap();
        assert!((limit_entire_eplus(z, &w) - (-z * 1.5).exp()).norm() < 1e-15);
        let w = OmegaPlusPoint::new(vec![1.0], 1.0).unwrap();
        assert!((limit_entire_eplus(z, &w) - (1.0 - z)).norm() < 1e-15);
        let w = OmegaPlusPoint::new(vec![0.4, 0.3], 2.0).unwrap();
        assert_eq!(limit_entire_eplus(Complex64::new(0.0, 0.0), &w), Complex64::new(1.0, 0.0));
    }

    /// Reverse characteristic polynomials of embedded configurations converge
    /// to E₊ on the disc |z| <= 2.
    #[test]
    fn char_poly_converges_to_eplus() {
        let omega = OmegaPlusPoint::new(vec![0.5, 0.25], 1.0).unwrap();
        let grid: Vec<Complex64> = (0..16)
            .flat_map(|k| {
                let th = k as f64 * std::f64::consts::PI / 8.0;
                [0.5, 1.0, 2.0].map(|r| Complex64::from_polar(r, th))
            })
            .collect();
        let mut errs = vec![];
        for n in [8usize, 32, 128, 512] {
            // N·(0.5, 0.25) followed by the excess mass spread evenly with
            // small distinct perturbations.
            let rest = n - 2;
            let mut v = vec![0.5 * n as f64, 0.25 * n as f64];
            let each = 0.25 * n as f64 / rest as f64;
            v.extend((0..rest).map(|k| each * (1.0 + 1e-3 * (rest - k) as f64 / rest as f64)));
            let x = OrderedConfig::new(v).unwrap();
            let w = embed(&x);
            let err = grid
                .iter()
                .map(|&z| (reverse_char_poly(z, w.xs()) - limit_entire_eplus(z, &omega)).norm())
                .fold(0.0, f64::max);
            errs.push(err);
        }
        assert!(errs.windows(2).all(|e| e[1] < e[0]), "{errs:?}");
        assert!(errs[3] < 5e-3, "{errs:?}");
    }

    proptest! {
        #[test]
        fn drift_identity(v in proptest::collection::btree_set(1u32..1_000_000, 2..64)) {
            let mut vals: Vec<f64> = v.into_iter().map(|k| k as f64 * 1e-4).collect();
            vals.reverse();
            let x = OrderedConfig::new(vals).unwrap();
            for i in 0..x.len() {
                let a = drift_via_charpoly(i, &x).unwrap();
                let b = singular_drift(i, &x).unwrap();
                prop_assert!((a - b).abs() <= 1e-9 * (1.0 + b.abs()));
                prop_assert!((b - drift_oracle(i, x.values())).abs() <= 1e-12 * (1.0 + b.abs()));
            }
        }

        #[test]
        fn lyapunov_nonnegative(v in proptest::collection::btree_set(1u32..100_000, 2..20), frac in 0.0f64..1.0) {
            let mut vals: Vec<f64> = v.into_iter().map(|k| k as f64).collect();
            vals.reverse();
            let x = OrderedConfig::new(vals).unwrap();
            let n = 1 + ((x.len() - 1) as f64 * frac) as usize;
            let n = n.min(x.len() - 1);
            prop_assert!(lyapunov_f(&x, n).unwrap() > 0.0);
        }
    }
}
