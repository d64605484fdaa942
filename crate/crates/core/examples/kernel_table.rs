//! Writes the limiting correlation kernel on a small grid as CSV to stdout.

use hardedge::equilibrium::KernelGrid;

fn main() -> hardedge::Result<()> {
    let points: Vec<f64> = (1..=6).map(|k| 0.25 * k as f64).collect();
    let grid = KernelGrid::inverse_bessel(1.0, points)?;
    grid.write_csv(std::io::stdout().lock())?;
    Ok(())
}
