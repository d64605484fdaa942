//! One path of the eigenvalue SDE from (3, 2, 1), printed every 0.1 time units.

use hardedge::sde::{simulate, Integrator};
use hardedge::{OrderedConfig, RandomSource, SdeParams};

fn main() -> hardedge::Result<()> {
    let x0 = OrderedConfig::new(vec![3.0, 2.0, 1.0])?;
    let params = SdeParams::new(0.5, false, 1e-3)?;
    let saves: Vec<f64> = (1..=10).map(|k| 0.1 * k as f64).collect();
    let traj = simulate(&x0, &params, 1.0, &saves, RandomSource::new(7, 0), Integrator::Log)?;
    for (t, x) in traj.times.iter().zip(&traj.states) {
        let row: Vec<String> = x.values().iter().map(|v| format!("{v:8.4}")).collect();
        println!("t={t:.1}  {}", row.join(" "));
    }
    Ok(())
}
