//! Two starting points driven by one shared Brownian motion, with the
//! Euclidean distance between the paths printed along the way.

use hardedge::sde::{simulate_coupled, SharedBrownian};
use hardedge::{OrderedConfig, SdeParams};

fn main() -> hardedge::Result<()> {
    let params = SdeParams::new(0.0, true, 1e-3)?;
    let a = OrderedConfig::new(vec![3.0, 2.0, 1.0, 0.5])?;
    let b = OrderedConfig::new(vec![2.5, 1.8, 1.1, 0.2])?;
    let steps = 1000;
    let mut pa = vec![];
    let mut pb = vec![];
    simulate_coupled(&a, &params, SharedBrownian::new(21, 1e-3)?, steps, |_, x| pa.push(x.to_vec()))?;
    simulate_coupled(&b, &params, SharedBrownian::new(21, 1e-3)?, steps, |_, x| pb.push(x.to_vec()))?;
    for k in (0..=steps).step_by(200) {
        let d: f64 = pa[k].iter().zip(&pb[k]).map(|(u, v)| (u - v).powi(2)).sum::<f64>().sqrt();
        println!("t={:.1} distance {d:.5}", k as f64 * 1e-3);
    }
    Ok(())
}
