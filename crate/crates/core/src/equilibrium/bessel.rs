//! Bessel functions of the first kind and the hard-edge kernels built on them.

use std::io::Write;

use statrs::function::gamma::gamma;

use crate::error::{Error, Result};

/// Series is used up to this argument, Miller's recurrence beyond it.
const SERIES_LIMIT: f64 = 12.0;

fn series(nu: f64, x: f64) -> Result<f64> {
    let h = 0.5 * x;
    let mut term = h.powf(nu) / gamma(nu + 1.0);
    let mut sum = term;
    let q = -h * h;
    for k in 0..500 {
        let kf = k as f64;
        term *= q / ((kf + 1.0) * (kf + nu + 1.0));
        sum += term;
        if term.abs() <= 1e-17 * sum.abs() && kf > h {
            return Ok(sum);
        }
    }
    Err(Error::ConvergenceFailure { nu, x })
}

/// Miller's backward recurrence, normalized by
/// `(x/2)^α = Σ_k (α + 2k) Γ(α + k) / k! · J_{α+2k}(x)` with `α = ν - ⌊ν⌋`.
fn miller(nu: f64, x: f64) -> Result<f64> {
    let shift = nu.floor();
    let alpha = nu - shift;
    // For ν in (-1, 0) the recurrence runs one step below α.
    let target = shift as i64;
    let top = ((1.5 * x).max(nu) + 60.0).ceil() as i64;
    let mut next = 0.0; // J_{α+m+1}
    let mut cur = 1e-300; // J_{α+m}
    let mut at_target = 0.0;
    let mut norm = 0.0;
    // Coefficient of J_{α+2k}: c_0 = Γ(α+1), c_k = (α+2k) g_k, g_k = Γ(α+k)/k!.
    let ga1 = gamma(alpha + 1.0);
    let coeff = |k: i64| -> f64 {
        if k == 0 {
            return ga1;
        }
        let mut g = ga1; // g_1 = Γ(α+1)/1!
        for j in 1..k {
            g *= (alpha + j as f64) / (j + 1) as f64;
        }
        (alpha + 2.0 * k as f64) * g
    };
    let mut m = top;
    loop {
        if m == target {
            at_target = cur;
        }
        if m >= 0 && m % 2 == 0 {
            norm += coeff(m / 2) * cur;
        }
        if m == target.min(0) {
            break;
        }
        let order = alpha + m as f64;
        let prev = 2.0 * order / x * cur - next;
        next = cur;
        cur = prev;
        m -= 1;
        if cur.abs() > 1e250 {
            cur *= 1e-250;
            next *= 1e-250;
            at_target *= 1e-250;
            norm *= 1e-250;
        }
    }
    let value = at_target / norm * (0.5 * x).powf(alpha);
    if value.is_finite() {
        Ok(value)
    } else {
        Err(Error::ConvergenceFailure { nu, x })
    }
}

/// `J_ν(x)` for `ν > -1`, `x >= 0`.
pub fn bessel_j(nu: f64, x: f64) -> Result<f64> {
    if !(nu > -1.0) || !(x >= 0.0) || !nu.is_finite() || !x.is_finite() {
        return Err(Error::Parameter(format!("J_{nu}({x}) needs nu > -1 and finite x >= 0")));
    }
    if x == 0.0 {
        return Ok(match nu {
            n if n == 0.0 => 1.0,
            n if n > 0.0 => 0.0,
            _ => f64::INFINITY,
        });
    }
    if x <= SERIES_LIMIT {
        series(nu, x)
    } else {
        miller(nu, x)
    }
}

/// `J_η`, `J_{η+1}` and `J_{η-1}` at `z`, the last from the three-term
/// recurrence so that `η - 1 <= -1` is allowed.
fn triple(eta: f64, z: f64) -> (f64, f64, f64) {
    let j0 = bessel_j(eta, z).unwrap_or(f64::NAN);
    let j1 = bessel_j(eta + 1.0, z).unwrap_or(f64::NAN);
    (j0, j1, 2.0 * eta / z * j0 - j1)
}

/// The hard-edge Bessel kernel
/// `𝕁_η(x, y) = [√x J_{η+1}(√x) J_η(√y) - √y J_{η+1}(√y) J_η(√x)] / (2(x - y))`,
/// with the diagonal `¼[J_η(√x)² - J_{η+1}(√x) J_{η-1}(√x)]` used when
/// `|x - y| < 1e-6 max(x, y)`.
pub fn bessel_kernel(eta: f64, x: f64, y: f64) -> f64 {
    let (sx, sy) = (x.sqrt(), y.sqrt());
    if (x - y).abs() < 1e-6 * x.max(y) {
        let z = 0.5 * (sx + sy);
        let (j0, j1, jm) = triple(eta, z);
        return 0.25 * (j0 * j0 - j1 * jm);
    }
    let (ax, bx, _) = triple(eta, sx);
    let (ay, by, _) = triple(eta, sy);
    (sx * bx * ay - sy * by * ax) / (2.0 * (x - y))
}

/// `(c/(xy)) 𝕁_η(c/x, c/y)`: the image of the Bessel kernel under `s ↦ c/s`.
pub fn inverse_bessel_kernel_scaled(eta: f64, x: f64, y: f64, c: f64) -> f64 {
    c / (x * y) * bessel_kernel(eta, c / x, c / y)
}

/// The inverse Bessel kernel `𝖪_η(x, y) = (8/(xy)) 𝕁_η(8/x, 8/y)`.
pub fn inverse_bessel_kernel(eta: f64, x: f64, y: f64) -> f64 {
    inverse_bessel_kernel_scaled(eta, x, y, 8.0)
}

/// A kernel tabulated on a grid of points.
#[derive(Debug, Clone, PartialEq)]
pub struct KernelGrid {
    pub points: Vec<f64>,
    /// Row-major, `values[i * n + j] = K(points[i], points[j])`.
    pub values: Vec<f64>,
}

impl KernelGrid {
    pub fn tabulate<F: Fn(f64, f64) -> f64>(points: Vec<f64>, kernel: F) -> Result<Self> {
        if points.is_empty() {
            return Err(Error::EmptySample);
        }
        if points.iter().any(|p| !(*p > 0.0)) || points.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::Parameter("grid points must be positive and increasing".into()));
        }
        let n = points.len();
        let mut values = vec![0.0; n * n];
        for i in 0..n {
            for j in 0..=i {
                let v = if i == j { kernel(points[i], points[i]) } else { kernel(points[i], points[j]) };
                values[i * n + j] = v;
                values[j * n + i] = v;
            }
        }
        Ok(Self { points, values })
    }

    pub fn inverse_bessel(eta: f64, points: Vec<f64>) -> Result<Self> {
        Self::tabulate(points, |x, y| inverse_bessel_kernel(eta, x, y))
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.values[i * self.points.len() + j]
    }

    /// Writes `x,y,value` rows in row-major order.
    pub fn write_csv<W: Write>(&self, mut out: W) -> std::io::Result<()> {
        writeln!(out, "x,y,value")?;
        let n = self.points.len();
        for i in 0..n {
            for j in 0..n {
                writeln!(out, "{:?},{:?},{:?}", self.points[i], self.points[j], self.get(i, j))?;
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Reference values from an independent arbitrary-precision library.
    const ORACLE: [(f64, f64, f64); 12] = [
        (0.0, 1.0, 0.765_197_686_557_966_55),
        (0.0, 30.0, -0.086_367_983_581_040_211),
        (1.0, 10.0, 0.043_472_746_168_861_437),
        (0.5, 1.0, 0.671_396_707_141_803_09),
        (1.5, 45.0, -0.060_233_578_972_053_991),
        (2.0, 50.0, -0.059_712_800_794_258_821),
        (2.5, 7.3, -0.300_849_431_587_499_81),
        (-0.5, 3.0, -0.456_048_820_794_633_18),
        (0.3, 0.2, 0.554_157_725_548_348_13),
        (1.0, 25.0, -0.125_350_249_580_289_9),
        (3.0, 17.5, 0.182_719_130_635_883_8),
        (0.5, 20.0, 0.162_880_763_855_029_87),
    ];

    #[test]
    fn matches_reference_values() {
        for (nu, x, want) in ORACLE {
            let got = bessel_j(nu, x).unwrap();
            assert!((got - want).abs() < 1e-10, "J_{nu}({x}) = {got}, want {want}");
        }
    }

    #[test]
    fn closed_forms() {
        assert_eq!(bessel_j(0.0, 0.0).unwrap(), 1.0);
        assert!((bessel_j(0.0, 1.0).unwrap() - 0.765_197_686_6).abs() < 1e-10);
        for x in [1.0, 5.0, 13.0, 31.0, 49.5] {
            let want = (2.0 / (std::f64::consts::PI * x)).sqrt() * x.sin();
            assert!((bessel_j(0.5, x).unwrap() - want).abs() < 1e-12, "{x}");
            let want = (2.0 / (std::f64::consts::PI * x)).sqrt() * x.cos();
            assert!((bessel_j(-0.5, x).unwrap() - want).abs() < 1e-12, "{x}");
        }
    }

    #[test]
    fn three_term_recurrence() {
        for nu in [0.2, 1.0, 1.7, 3.0] {
            for k in 1..=100 {
                let x = 0.5 * k as f64;
                let lhs = bessel_j(nu - 1.0, x).unwrap() + bessel_j(nu + 1.0, x).unwrap();
                let rhs = 2.0 * nu / x * bessel_j(nu, x).unwrap();
                assert!((lhs - rhs).abs() < 1e-8, "nu={nu} x={x}");
            }
        }
    }

    #[test]
    fn series_and_recurrence_agree_at_the_switch() {
        for nu in [-0.7, 0.0, 0.4, 2.0] {
            let a = series(nu, 12.5).unwrap();
            let b = miller(nu, 12.5).unwrap();
            assert!((a - b).abs() < 1e-11, "{nu}: {a} {b}");
        }
    }

    #[test]
    fn kernel_symmetry_and_diagonal() {
        for eta in [0.0, 1.0, 2.5] {
            assert_eq!(bessel_kernel(eta, 2.0, 7.0), bessel_kernel(eta, 7.0, 2.0));
            for x in [0.5, 3.0, 11.0] {
                let h = 1e-4;
                let gap = (bessel_kernel(eta, x, x) - bessel_kernel(eta, x, x + h)).abs();
                assert!(gap < 10.0 * h, "{eta} {x} {gap}");
            }
            for k in 1..=200 {
                assert!(bessel_kernel(eta, 0.1 * k as f64, 0.1 * k as f64) > 0.0);
            }
        }
        assert!(inverse_bessel_kernel(-0.5, 0.3, 0.3) > 0.0);
    }

    #[test]
    fn inverse_kernel() {
        assert_eq!(inverse_bessel_kernel(1.0, 0.2, 0.9), inverse_bessel_kernel(1.0, 0.9, 0.2));
        for k in 1..=100 {
            assert!(inverse_bessel_kernel(1.0, 0.05 * k as f64, 0.05 * k as f64) >= 0.0);
        }
        // Mass of the first correlation on [a, ∞) is finite and grows as a ↓ 0.
        let rule = crate::linalg::gauss_legendre(20);
        let mass = |a: f64| {
            // Substitute s = 8/x: ∫_a^∞ K(x,x) dx = ∫_0^{8/a} 𝕁(s,s) ds.
            let top = 8.0 / a;
            let pieces = (top / 2.0).ceil() as usize;
            (0..pieces)
                .map(|p| {
                    let (lo, hi) = (top * p as f64 / pieces as f64, top * (p + 1) as f64 / pieces as f64);
                    crate::linalg::integrate(|s| bessel_kernel(1.0, s, s), lo, hi, &rule)
                })
                .sum::<f64>()
        };
        let (m1, m2, m3) = (mass(1.0), mass(0.1), mass(0.01));
        assert!(m1.is_finite() && m1 > 0.0 && m2 > m1 && m3 > m2);
        // 𝕁(s,s) ~ 1/(2π√s), so the mass grows like (8/a)^{1/2}/π.
        let want = (800f64.sqrt() - 80f64.sqrt()) / std::f64::consts::PI;
        assert!(((m3 - m2) / want - 1.0).abs() < 0.02, "{} vs {want}", m3 - m2);
    }

    #[test]
    fn grid_csv() {
        let g = KernelGrid::inverse_bessel(1.0, vec![0.5, 1.0, 2.0]).unwrap();
        assert_eq!(g.get(0, 2), g.get(2, 0));
        let mut buf = vec![];
        g.write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert_eq!(text.lines().count(), 10);
        assert!(text.starts_with("x,y,value\n0.5,0.5,"));
        assert!(KernelGrid::inverse_bessel(1.0, vec![1.0, 0.5]).is_err());
    }
}
