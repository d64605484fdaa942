//! The Hermitian matrix SDE whose eigenvalues follow the plain eigenvalue SDE.

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::domain::{GaussianNoise, OrderedConfig, SdeParams};
use crate::error::{Error, Result};
use crate::linalg::hermitian_eigenvalues;

/// Eigenvalues in `[-EIGEN_CLIP_TOL, 0)` are reported as zero.
const EIGEN_CLIP_TOL: f64 = 1e-10;

/// A nonnegative-definite Hermitian matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct HermitianState {
    entries: DMatrix<Complex64>,
}

impl HermitianState {
    /// Hermitizes `m` as `(m + m†)/2`. Positivity is not checked.
    pub fn new(m: DMatrix<Complex64>) -> Result<Self> {
        if !m.is_square() {
            return Err(Error::DimensionMismatch(m.nrows(), m.ncols()));
        }
        Ok(Self { entries: hermitize(&m) })
    }

    pub fn diagonal(values: &[f64]) -> Self {
        let d = nalgebra::DVector::from_iterator(values.len(), values.iter().map(|&v| Complex64::new(v, 0.0)));
        Self { entries: DMatrix::from_diagonal(&d) }
    }

    pub fn from_config(x: &OrderedConfig) -> Self {
        Self::diagonal(x.values())
    }

    pub fn entries(&self) -> &DMatrix<Complex64> {
        &self.entries
    }

    pub fn dim(&self) -> usize {
        self.entries.nrows()
    }

    pub fn trace(&self) -> f64 {
        self.entries.diagonal().iter().map(|z| z.re).sum()
    }
}

/// Serialized as the row-major list of `[re, im]` pairs.
impl Serialize for HermitianState {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let n = self.dim();
        let rows: Vec<Vec<[f64; 2]>> =
            (0..n).map(|i| (0..n).map(|j| [self.entries[(i, j)].re, self.entries[(i, j)].im]).collect()).collect();
        rows.serialize(s)
    }
}

impl<'de> Deserialize<'de> for HermitianState {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let rows = Vec::<Vec<[f64; 2]>>::deserialize(d)?;
        let n = rows.len();
        if rows.iter().any(|r| r.len() != n) {
            return Err(serde::de::Error::custom("matrix must be square"));
        }
        let m = DMatrix::from_fn(n, n, |i, j| Complex64::new(rows[i][j][0], rows[i][j][1]));
        HermitianState::new(m).map_err(serde::de::Error::custom)
    }
}

fn hermitize(m: &DMatrix<Complex64>) -> DMatrix<Complex64> {
    (m + m.adjoint()) * Complex64::new(0.5, 0.0)
}

/// Projects a Hermitian matrix onto the nonnegative cone by clipping negative
/// eigenvalues. Positive-definite inputs are returned as is.
fn clip_negative(m: DMatrix<Complex64>) -> DMatrix<Complex64> {
    if is_positive_definite(&m) {
        return m;
    }
    let n = m.nrows();
    match m.clone().try_symmetric_eigen(f64::EPSILON, 10_000) {
        Some(eig) => {
            if eig.eigenvalues.iter().all(|v| *v >= 0.0) {
                return m;
            }
            let d = nalgebra::DVector::from_iterator(n, eig.eigenvalues.iter().map(|v| Complex64::new(v.max(0.0), 0.0)));
            let v = &eig.eigenvectors;
            hermitize(&(v * DMatrix::from_diagonal(&d) * v.adjoint()))
        }
        None => m,
    }
}

/// Attempts a Cholesky factorization of the Hermitian `m`, reading only its
/// lower triangle.
fn is_positive_definite(m: &DMatrix<Complex64>) -> bool {
    let n = m.nrows();
    let mut l = DMatrix::<Complex64>::zeros(n, n);
    for j in 0..n {
        let d = m[(j, j)].re - (0..j).map(|k| l[(j, k)].norm_sqr()).sum::<f64>();
        if !(d > 0.0) {
            return false;
        }
        let djj = d.sqrt();
        l[(j, j)] = Complex64::new(djj, 0.0);
        for i in j + 1..n {
            let s: Complex64 = (0..j).map(|k| l[(i, k)] * l[(j, k)].conj()).sum();
            l[(i, j)] = (m[(i, j)] - s) / djj;
        }
    }
    true
}

/// One Euler step of `dH = ½(dΓ H + H dΓ†) + (-(η+N)/2 H + ½(1 + Tr H) I) dt`,
/// where `dΓ` has independent complex Gaussian entries whose real and
/// imaginary parts each have variance `dt`.
pub fn step_matrix_sde<G: GaussianNoise + ?Sized>(
    h: &HermitianState,
    params: &SdeParams,
    dt: f64,
    noise: &mut G,
) -> HermitianState {
    let n = h.dim();
    let mut z = vec![0.0; 2 * n * n];
    noise.fill_standard_normal(&mut z);
    let sq = dt.sqrt();
    let gamma = DMatrix::from_fn(n, n, |i, j| {
        let k = 2 * (i * n + j);
        Complex64::new(sq * z[k], sq * z[k + 1])
    });
    let hm = &h.entries;
    let gh = &gamma * hm;
    let half = Complex64::new(0.5, 0.0);
    let mut next = hm + (&gh + gh.adjoint()) * half;
    let scale = -(params.eta + n as f64) * 0.5 * dt;
    next += hm * Complex64::new(scale, 0.0);
    let shift = 0.5 * (1.0 + h.trace()) * dt;
    for i in 0..n {
        next[(i, i)] += shift;
    }
    HermitianState { entries: clip_negative(hermitize(&next)) }
}

/// Eigenvalues of `h` in decreasing order, with round-off negatives set to 0.
pub fn eigenvalues(h: &HermitianState) -> Result<OrderedConfig> {
    let mut ev = hermitian_eigenvalues(&h.entries)?;
    for v in ev.iter_mut() {
        if *v < 0.0 {
            if *v < -EIGEN_CLIP_TOL {
                return Err(Error::Domain(format!("eigenvalue {v} is negative")));
            }
            *v = 0.0;
        }
    }
    OrderedConfig::new(ev)
}
