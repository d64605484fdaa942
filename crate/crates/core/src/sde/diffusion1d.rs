//! The scalar diffusion `dz = z dw + [(1 - η/2 - N) z + ½] dt` on `[0, ∞)`.

use crate::domain::GaussianNoise;

/// One Euler step, clipped at 0.
pub fn step_1d<G: GaussianNoise + ?Sized>(x: f64, n: usize, eta: f64, dt: f64, noise: &mut G) -> f64 {
    let mut z = [0.0];
    noise.fill_standard_normal(&mut z);
    let drift = (1.0 - 0.5 * eta - n as f64) * x + 0.5;
    (x + x * dt.sqrt() * z[0] + drift * dt).max(0.0)
}
