//! Steps the Hermitian matrix SDE and compares its spectrum with the trace,
//! which the matrix dynamics keep in closed form.

use hardedge::sde::{eigenvalues, step_matrix_sde, HermitianState};
use hardedge::{OrderedConfig, RandomSource, SdeParams};

fn main() -> hardedge::Result<()> {
    let x0 = OrderedConfig::new(vec![3.0, 2.0, 1.0])?;
    let params = SdeParams::default();
    let dt = 2.5e-4;
    let mut h = HermitianState::from_config(&x0);
    let mut rng = RandomSource::new(3, 0).rng();
    for step in 1..=2000 {
        h = step_matrix_sde(&h, &params, dt, &mut rng);
        if step % 400 == 0 {
            let ev = eigenvalues(&h)?;
            println!("t={:.2} eigenvalues {:?} trace {:.4}", step as f64 * dt, ev.values(), h.trace());
        }
    }
    Ok(())
}
