//! Exact samplers for corner eigenvalues of Haar-conjugated diagonal matrices.

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;

use crate::domain::OrderedConfig;
use crate::error::{Error, Result};
use crate::linalg::hermitian_eigenvalues;

/// Standard complex Gaussian: real and imaginary parts each have variance ½.
pub(crate) fn complex_normal<R: Rng + ?Sized>(rng: &mut R) -> Complex64 {
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    Complex64::new(re, im) * std::f64::consts::FRAC_1_SQRT_2
}

/// Haar-distributed `n × n` unitary: QR of a complex Ginibre matrix with the
/// phases of `diag(R)` moved into `Q`.
pub fn haar_unitary<R: Rng + ?Sized>(n: usize, rng: &mut R) -> DMatrix<Complex64> {
    let g = DMatrix::from_fn(n, n, |_, _| complex_normal(rng));
    let qr = g.qr();
    let mut q = qr.q();
    let r = qr.r();
    for j in 0..n {
        let d = r[(j, j)];
        let phase = if d.norm() > 0.0 { d / d.norm() } else { Complex64::new(1.0, 0.0) };
        for i in 0..n {
            q[(i, j)] *= phase;
        }
    }
    q
}

/// Eigenvalues of the `K × K` corner `Σ_i x_i v_i v_i†`, where `v_i` are the
/// columns of the first `K` rows of a unitary.
fn corner_eigenvalues(rows: &DMatrix<Complex64>, x: &[f64]) -> Result<Vec<f64>> {
    let k = rows.nrows();
    let mut c = DMatrix::<Complex64>::zeros(k, k);
    for (i, &xi) in x.iter().enumerate() {
        if xi == 0.0 {
            continue;
        }
        for a in 0..k {
            let va = rows[(a, i)] * xi;
            for b in 0..=a {
                c[(a, b)] += va * rows[(b, i)].conj();
            }
        }
    }
    for a in 0..k {
        for b in 0..a {
            c[(b, a)] = c[(a, b)].conj();
        }
        c[(a, a)].im = 0.0;
    }
    hermitian_eigenvalues(&c)
}

/// Clamps `y` into the interlacing region `x_i >= y_i >= x_{i + N - K}`;
/// removes eigensolver round-off only.
fn clamp_interlacing(mut y: Vec<f64>, x: &[f64]) -> OrderedConfig {
    let shift = x.len() - y.len();
    for (i, v) in y.iter_mut().enumerate() {
        debug_assert!(*v <= x[i] + 1e-8 * (1.0 + x[0]) && *v >= x[i + shift] - 1e-8 * (1.0 + x[0]));
        *v = v.clamp(x[i + shift], x[i]);
    }
    OrderedConfig::from_sorted_unchecked(y)
}

/// One draw from `Λ_{N-1}^N(x, ·)`: eigenvalues of the top-left
/// `(N-1) × (N-1)` corner of `U diag(x) U†` with `U` Haar.
pub fn sample_corner<R: Rng + ?Sized>(config: &OrderedConfig, rng: &mut R) -> Result<OrderedConfig> {
    let n = config.len();
    if n < 2 {
        return Err(Error::Domain("sample_corner needs N >= 2".into()));
    }
    let u = haar_unitary(n, rng);
    let rows = u.rows(0, n - 1).into_owned();
    let y = corner_eigenvalues(&rows, config.values())?;
    Ok(clamp_interlacing(y, config.values()))
}

/// One draw from `Λ_K^N(x, ·)` by `N - K` successive corner steps.
pub fn sample_chain<R: Rng + ?Sized>(config: &OrderedConfig, k: usize, rng: &mut R) -> Result<OrderedConfig> {
    if k == 0 || k >= config.len() {
        return Err(Error::Domain(format!("need 1 <= K < N, got K = {k}, N = {}", config.len())));
    }
    let mut y = config.clone();
    while y.len() > k {
        y = sample_corner(&y, rng)?;
    }
    Ok(y)
}

/// One draw from `Λ_K^N(x, ·)` in a single step.
///
/// The first `K` rows of a Haar unitary have the law of `K` independent
/// complex Gaussian rows after Gram–Schmidt, so the `K × K` corner can be
/// formed without the full `N × N` unitary. Costs `O(N K²)` instead of
/// `O(N³)` per step of the chain. For `K = 1` the corner is `Σ x_i D_i` with
/// `D` uniform on the simplex.
pub fn sample_corner_direct<R: Rng + ?Sized>(config: &OrderedConfig, k: usize, rng: &mut R) -> Result<OrderedConfig> {
    let n = config.len();
    if k == 0 || k >= n {
        return Err(Error::Domain(format!("need 1 <= K < N, got K = {k}, N = {n}")));
    }
    let x = config.values();
    if k == 1 {
        let mut total = 0.0;
        let mut acc = 0.0;
        for &xi in x {
            let e: f64 = rng.sample(rand_distr::Exp1);
            total += e;
            acc += xi * e;
        }
        return Ok(clamp_interlacing(vec![acc / total], x));
    }
    let mut rows = DMatrix::from_fn(k, n, |_, _| complex_normal(rng));
    for a in 0..k {
        for b in 0..a {
            let proj: Complex64 = (0..n).map(|i| rows[(b, i)].conj() * rows[(a, i)]).sum();
            for i in 0..n {
                let v = rows[(b, i)];
                rows[(a, i)] -= proj * v;
            }
        }
        let norm = (0..n).map(|i| rows[(a, i)].norm_sqr()).sum::<f64>().sqrt();
        for i in 0..n {
            rows[(a, i)] /= norm;
        }
    }
    let y = corner_eigenvalues(&rows, x)?;
    Ok(clamp_interlacing(y, x))
}
