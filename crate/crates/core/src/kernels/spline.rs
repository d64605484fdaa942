//! The normalized B-spline `M(y; x)`: the density of one corner eigenvalue.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{gauss_legendre, integrate};

/// Decreasing knots `x_1 >= ... >= x_N`, `N >= 2`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<f64>", into = "Vec<f64>")]
pub struct KnotVector {
    knots: Vec<f64>,
}

impl KnotVector {
    pub fn new(knots: Vec<f64>) -> Result<Self> {
        if knots.len() < 2 {
            return Err(Error::InvalidConfig("a knot vector needs at least 2 knots".into()));
        }
        if knots.iter().any(|k| !k.is_finite()) {
            return Err(Error::InvalidConfig("knots must be finite".into()));
        }
        if knots.windows(2).any(|w| w[0] < w[1]) {
            return Err(Error::InvalidConfig("knots must be decreasing".into()));
        }
        Ok(Self { knots })
    }

    pub fn knots(&self) -> &[f64] {
        &self.knots
    }

    pub fn len(&self) -> usize {
        self.knots.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// `[x_N, x_1]`.
    pub fn support(&self) -> (f64, f64) {
        (self.knots[self.knots.len() - 1], self.knots[0])
    }
}

impl TryFrom<Vec<f64>> for KnotVector {
    type Error = Error;
    fn try_from(v: Vec<f64>) -> Result<Self> {
        Self::new(v)
    }
}

impl From<KnotVector> for Vec<f64> {
    fn from(k: KnotVector) -> Self {
        k.knots
    }
}

/// M-spline of order `len - 1` on the decreasing knots `x`, by the
/// Curry–Schoenberg recurrence run on the reversed (ascending) knots. Zero
/// length intervals contribute nothing, so tied knots are fine.
pub(crate) fn m_spline_slice(y: f64, x: &[f64]) -> f64 {
    let n = x.len();
    let (lo, hi) = (x[n - 1], x[0]);
    if y < lo || y > hi || hi == lo {
        return 0.0;
    }
    // t ascending.
    let t: Vec<f64> = x.iter().rev().copied().collect();
    // Order-1 pieces; the right endpoint belongs to the last nonempty interval.
    let last = (0..n - 1).rev().find(|&i| t[i + 1] > t[i]).unwrap_or(0);
    let mut m: Vec<f64> = (0..n - 1)
        .map(|i| {
            let w = t[i + 1] - t[i];
            let inside = (t[i] <= y && y < t[i + 1]) || (i == last && y == t[i + 1]);
            if w > 0.0 && inside {
                1.0 / w
            } else {
                0.0
            }
        })
        .collect();
    for k in 2..n {
        let kf = k as f64;
        for i in 0..n - k {
            let w = t[i + k] - t[i];
            m[i] = if w > 0.0 {
                kf * ((y - t[i]) * m[i] + (t[i + k] - y) * m[i + 1]) / ((kf - 1.0) * w)
            } else {
                0.0
            };
        }
    }
    m[0]
}

/// `M(y; x) = (N-1) Σ_i (x_i - y)_+^{N-2} / Π_{j≠i} (x_i - x_j)`, evaluated stably.
pub fn spline_m(y: f64, knots: &KnotVector) -> Result<f64> {
    let (lo, hi) = knots.support();
    if lo == hi {
        return Err(Error::DegenerateKnots(knots.len()));
    }
    Ok(m_spline_slice(y, knots.knots()))
}

/// The `order`-th derivative of `M(·; x)` at `y`, from
/// `M' = (N-1)/(x_1 - x_N) [M(·; x_2..x_N) - M(·; x_1..x_{N-1})]`.
pub fn spline_m_derivative(y: f64, knots: &KnotVector, order: usize) -> Result<f64> {
    let x = knots.knots();
    let n = x.len();
    if order > n - 2 {
        return Err(Error::OrderTooHigh { order, max: n - 2 });
    }
    if x[0] == x[n - 1] {
        return Err(Error::DegenerateKnots(n));
    }
    // Every knot window that appears in the recursion is contiguous, so the
    // recursion tree collapses to a triangle indexed by window start.
    let mut len = n - order;
    let mut vals: Vec<f64> = (0..=order).map(|a| m_spline_slice(y, &x[a..a + len])).collect();
    while len < n {
        len += 1;
        let next: Vec<f64> = (0..vals.len() - 1)
            .map(|a| {
                let w = x[a] - x[a + len - 1];
                if w > 0.0 {
                    (len - 1) as f64 / w * (vals[a + 1] - vals[a])
                } else {
                    0.0
                }
            })
            .collect();
        vals = next;
    }
    Ok(vals[0])
}

/// `∫_{-∞}^y M(s; x) ds`, by Gauss–Legendre quadrature that is exact on each
/// polynomial piece.
pub fn spline_cdf(y: f64, knots: &KnotVector) -> Result<f64> {
    let (lo, hi) = knots.support();
    if lo == hi {
        return Err(Error::DegenerateKnots(knots.len()));
    }
    if y <= lo {
        return Ok(0.0);
    }
    if y >= hi {
        return Ok(1.0);
    }
    let rule = gauss_legendre(knots.len().div_ceil(2) + 1);
    let x = knots.knots();
    let mut acc = 0.0;
    for w in x.windows(2).rev() {
        let (a, b) = (w[1], w[0].min(y));
        if b > a {
            acc += integrate(|s| m_spline_slice(s, x), a, b, &rule);
        }
        if w[0] >= y {
            break;
        }
    }
    Ok(acc.clamp(0.0, 1.0))
}
