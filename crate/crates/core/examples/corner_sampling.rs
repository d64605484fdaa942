//! Draws corners of a random conjugate of diag(x): the K x K block directly,
//! and by chaining one-step corners. Both should give the same law; the
//! printed means of the top corner eigenvalue agree within noise.

use hardedge::experiments::mean_se;
use hardedge::kernels::{sample_chain, sample_corner_direct};
use hardedge::{OrderedConfig, RandomSource};

fn main() -> hardedge::Result<()> {
    let x = OrderedConfig::new(vec![5.0, 4.0, 3.0, 2.0, 1.0])?;
    let mut rng = RandomSource::new(11, 0).rng();
    let n = 20_000;
    let mut direct = Vec::with_capacity(n);
    let mut chain = Vec::with_capacity(n);
    for _ in 0..n {
        direct.push(sample_corner_direct(&x, 2, &mut rng)?.values()[0]);
        chain.push(sample_chain(&x, 2, &mut rng)?.values()[0]);
    }
    let (md, sd) = mean_se(&direct);
    let (mc, sc) = mean_se(&chain);
    println!("top eigenvalue of the 2x2 corner: direct {md:.4} ± {sd:.4}, chain {mc:.4} ± {sc:.4}");
    Ok(())
}
