//! Draws the equilibrium law from the Laguerre tridiagonal model and prints
//! the mean of each ordered coordinate.

use hardedge::equilibrium::sample_inverse_laguerre;
use hardedge::RandomSource;

fn main() -> hardedge::Result<()> {
    let (particles, eta, n) = (4, 1.0, 20_000);
    let mut rng = RandomSource::new(13, 0).rng();
    let mut means = vec![0.0; particles];
    for _ in 0..n {
        let x = sample_inverse_laguerre(particles, eta, &mut rng)?;
        for (m, v) in means.iter_mut().zip(x.values()) {
            *m += v / n as f64;
        }
    }
    println!("equilibrium means for N={particles}, eta={eta}: {means:.4?}");
    Ok(())
}
