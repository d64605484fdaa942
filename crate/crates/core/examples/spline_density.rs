//! Tabulates the one-dimensional corner density M(y; x), its derivative and
//! its distribution function on a few points.

use hardedge::kernels::{spline_cdf, spline_m, spline_m_derivative, KnotVector};

fn main() -> hardedge::Result<()> {
    let knots = KnotVector::new(vec![5.0, 4.0, 3.0, 2.0, 1.0])?;
    println!("{:>6} {:>10} {:>10} {:>10}", "y", "M", "M'", "CDF");
    for k in 0..=16 {
        let y = 1.0 + 0.25 * k as f64;
        println!(
            "{y:6.2} {:10.6} {:10.6} {:10.6}",
            spline_m(y, &knots)?,
            spline_m_derivative(y, &knots, 1)?,
            spline_cdf(y, &knots)?
        );
    }
    Ok(())
}
