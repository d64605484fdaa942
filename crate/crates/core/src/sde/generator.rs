//! The infinitesimal generator of the eigenvalue SDE applied to test functions.

use crate::domain::{singular_drift, OrderedConfig, SdeParams};
use crate::error::Result;

/// A twice-differentiable function of the particle positions. Only the
/// diagonal of the Hessian enters, since the noise is diagonal.
pub trait SmoothFunction {
    fn value(&self, x: &[f64]) -> f64;
    fn gradient(&self, x: &[f64], out: &mut [f64]);
    fn hessian_diagonal(&self, x: &[f64], out: &mut [f64]);
}

/// `f(x) = Σ x_i^p`.
#[derive(Debug, Clone, Copy)]
pub struct PowerSum(pub i32);

impl SmoothFunction for PowerSum {
    fn value(&self, x: &[f64]) -> f64 {
        x.iter().map(|v| v.powi(self.0)).sum()
    }

    fn gradient(&self, x: &[f64], out: &mut [f64]) {
        let p = self.0 as f64;
        for (o, v) in out.iter_mut().zip(x) {
            *o = p * v.powi(self.0 - 1);
        }
    }

    fn hessian_diagonal(&self, x: &[f64], out: &mut [f64]) {
        let p = self.0 as f64;
        for (o, v) in out.iter_mut().zip(x) {
            *o = p * (p - 1.0) * v.powi(self.0 - 2);
        }
    }
}

/// `Lf(x) = Σ x_i²/2 ∂²f/∂x_i² + Σ [-(η/2) x_i + ½ + Σ_{j≠i} x_i x_j/(x_i - x_j)] ∂f/∂x_i`.
pub fn generator_apply<F: SmoothFunction + ?Sized>(f: &F, config: &OrderedConfig, eta: f64) -> Result<f64> {
    generator_apply_with(f, config, &SdeParams::default().with_eta(eta))
}

/// As [`generator_apply`], with the constant drift taken from `params`.
pub fn generator_apply_with<F: SmoothFunction + ?Sized>(
    f: &F,
    config: &OrderedConfig,
    params: &SdeParams,
) -> Result<f64> {
    let x = config.values();
    let n = x.len();
    let mut grad = vec![0.0; n];
    let mut hess = vec![0.0; n];
    f.gradient(x, &mut grad);
    f.hessian_diagonal(x, &mut hess);
    let c = params.entrance_drift(n);
    let mut acc = 0.0;
    for i in 0..n {
        let b = -0.5 * params.eta * x[i] + c + singular_drift(i, config)?;
        acc += 0.5 * x[i] * x[i] * hess[i] + b * grad[i];
    }
    Ok(acc)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::error::Error;

    fn cfg(v: &[f64]) -> OrderedConfig {
        OrderedConfig::new(v.to_vec()).unwrap()
    }

    #[test]
    fn examples() {
        assert!((generator_apply(&PowerSum(1), &cfg(&[2.0, 1.0]), 0.0).unwrap() - 1.0).abs() < 1e-12);
        assert_eq!(generator_apply(&PowerSum(0), &cfg(&[2.0, 1.0]), 0.3).unwrap(), 0.0);
        assert!((generator_apply(&PowerSum(2), &cfg(&[2.0, 1.0]), 0.0).unwrap() - 12.0).abs() < 1e-12);
    }

    #[test]
    fn linear_function_closed_form() {
        let x = cfg(&[4.0, 2.5, 1.0, 0.2]);
        let got = generator_apply(&PowerSum(1), &x, 1.3).unwrap();
        assert!((got - (2.0 - 0.65 * x.sum())).abs() < 1e-12);
    }

    #[test]
    fn coincidence_is_an_error() {
        let e = generator_apply(&PowerSum(2), &cfg(&[1.0, 1.0]), 0.0).unwrap_err();
        assert!(matches!(e, Error::CoincidentCoordinates { .. }));
    }
}
