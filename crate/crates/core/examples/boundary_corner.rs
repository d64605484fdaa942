//! Corners of a point of the boundary space: a geometric sequence of weights
//! plus a Gaussian part. The expected trace of the K x K corner is K γ.

use hardedge::kernels::{sample_boundary_corner, truncation_index};
use hardedge::{OmegaPlusPoint, RandomSource};

fn main() -> hardedge::Result<()> {
    let xs: Vec<f64> = (1..=40).map(|i| 0.5f64.powi(i)).collect();
    let omega = OmegaPlusPoint::new(xs, 1.5)?;
    println!("terms kept at eps=1e-12: {}", truncation_index(&omega, 1e-12));
    let mut rng = RandomSource::new(5, 0).rng();
    let k = 3;
    let n = 20_000;
    let mut trace = 0.0;
    for _ in 0..n {
        trace += sample_boundary_corner(&omega, k, 1e-12, &mut rng)?.sum();
    }
    println!("mean trace {:.4}, expected {:.4}", trace / n as f64, k as f64 * omega.gamma());
    Ok(())
}
