//! Small dense linear-algebra helpers.

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};

const EIGEN_MAX_ITER: usize = 10_000;

/// Eigenvalues of a Hermitian matrix in decreasing order.
pub fn hermitian_eigenvalues(m: &DMatrix<Complex64>) -> Result<Vec<f64>> {
    let n = m.nrows();
    let mut ev: Vec<f64> = match n {
        0 => vec![],
        1 => vec![m[(0, 0)].re],
        2 => {
            let a = m[(0, 0)].re;
            let d = m[(1, 1)].re;
            let b = m[(1, 0)].norm();
            let mid = 0.5 * (a + d);
            let rad = (0.25 * (a - d) * (a - d) + b * b).sqrt();
            vec![mid + rad, mid - rad]
        }
        _ => m
            .clone()
            .try_symmetric_eigen(f64::EPSILON, EIGEN_MAX_ITER)
            .ok_or(Error::EigensolveFailure { dim: n })?
            .eigenvalues
            .iter()
            .copied()
            .collect(),
    };
    if ev.iter().any(|v| !v.is_finite()) {
        return Err(Error::EigensolveFailure { dim: n });
    }
    ev.sort_by(|a, b| b.total_cmp(a));
    Ok(ev)
}

/// Eigenvalues of the symmetric tridiagonal matrix with diagonal `diag` and
/// off-diagonal `off` (`off.len() == diag.len() - 1`), by implicit QL with
/// Wilkinson shifts. Returned in decreasing order.
pub fn tridiagonal_eigenvalues(diag: &[f64], off: &[f64]) -> Result<Vec<f64>> {
    let n = diag.len();
    if n == 0 {
        return Ok(vec![]);
    }
    if off.len() + 1 != n {
        return Err(Error::DimensionMismatch(off.len() + 1, n));
    }
    let mut d = diag.to_vec();
    let mut e = off.to_vec();
    e.push(0.0);
    for l in 0..n {
        let mut iter = 0;
        loop {
            let mut m = l;
            while m + 1 < n {
                let dd = d[m].abs() + d[m + 1].abs();
                if e[m].abs() <= f64::EPSILON * dd {
                    break;
                }
                m += 1;
            }
            if m == l {
                break;
            }
            iter += 1;
            if iter > 60 {
                return Err(Error::EigensolveFailure { dim: n });
            }
            let mut g = (d[l + 1] - d[l]) / (2.0 * e[l]);
            let mut r = g.hypot(1.0);
            g = d[m] - d[l] + e[l] / (g + r.copysign(g));
            let (mut s, mut c, mut p) = (1.0, 1.0, 0.0);
            let mut i = m;
            let mut underflow = false;
            while i > l {
                i -= 1;
                let f = s * e[i];
                let b = c * e[i];
                r = f.hypot(g);
                e[i + 1] = r;
                if r == 0.0 {
                    d[i + 1] -= p;
                    e[m] = 0.0;
                    underflow = true;
                    break;
                }
                s = f / r;
                c = g / r;
                g = d[i + 1] - p;
                r = (d[i] - g) * s + 2.0 * c * b;
                p = s * r;
                d[i + 1] = g + p;
                g = c * r - b;
            }
            if underflow {
                continue;
            }
            d[l] -= p;
            e[l] = g;
            e[m] = 0.0;
        }
    }
    d.sort_by(|a, b| b.total_cmp(a));
    Ok(d)
}

/// Gauss–Legendre nodes and weights on `[-1, 1]`.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    for i in 0..n.div_ceil(2) {
        let mut z = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, z);
            for k in 2..=n {
                let p2 = ((2 * k - 1) as f64 * z * p1 - (k - 1) as f64 * p0) / k as f64;
                p0 = p1;
                p1 = p2;
            }
            let pn = if n == 1 { z } else { p1 };
            let pm1 = if n == 1 { 1.0 } else { p0 };
            dp = n as f64 * (z * pn - pm1) / (z * z - 1.0);
            let dz = pn / dp;
            z -= dz;
            if dz.abs() < 1e-16 {
                break;
            }
        }
        nodes[i] = -z;
        nodes[n - 1 - i] = z;
        let w = 2.0 / ((1.0 - z * z) * dp * dp);
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    (nodes, weights)
}

/// `∫_a^b f` with an `n`-point Gauss–Legendre rule.
pub fn integrate<F: FnMut(f64) -> f64>(mut f: F, a: f64, b: f64, rule: &(Vec<f64>, Vec<f64>)) -> f64 {
    let half = 0.5 * (b - a);
    let mid = 0.5 * (a + b);
    rule.0.iter().zip(&rule.1).map(|(t, w)| w * f(mid + half * t)).sum::<f64>() * half
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gauss_legendre_exact_for_polynomials() {
        for n in 1..12 {
            let rule = gauss_legendre(n);
            for deg in 0..2 * n {
                let got = integrate(|x| x.powi(deg as i32), 0.0, 2.0, &rule);
                let want = 2f64.powi(deg as i32 + 1) / (deg + 1) as f64;
                assert!((got - want).abs() < 1e-12 * want.max(1.0), "n={n} deg={deg}");
            }
        }
    }

    #[test]
    fn tridiagonal_matches_dense() {
        let d = [4.0, 1.0, 3.0, 0.5, 2.0];
        let e = [0.7, -1.2, 0.3, 0.9];
        let got = tridiagonal_eigenvalues(&d, &e).unwrap();
        let mut m = DMatrix::<Complex64>::zeros(5, 5);
        for i in 0..5 {
            m[(i, i)] = d[i].into();
        }
        for i in 0..4 {
            m[(i + 1, i)] = e[i].into();
            m[(i, i + 1)] = e[i].into();
        }
        let want = hermitian_eigenvalues(&m).unwrap();
        for (a, b) in got.iter().zip(&want) {
            assert!((a - b).abs() < 1e-12);
        }
        assert!((got.iter().sum::<f64>() - d.iter().sum::<f64>()).abs() < 1e-12);
    }

    #[test]
    fn hermitian_small_cases() {
        let m = DMatrix::from_row_slice(
            2,
            2,
            &[Complex64::new(2.0, 0.0), Complex64::new(0.0, 1.0), Complex64::new(0.0, -1.0), Complex64::new(2.0, 0.0)],
        );
        let ev = hermitian_eigenvalues(&m).unwrap();
        assert!((ev[0] - 3.0).abs() < 1e-14 && (ev[1] - 1.0).abs() < 1e-14);
    }
}
