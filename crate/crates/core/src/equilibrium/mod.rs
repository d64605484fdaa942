//! Equilibrium ensembles: Laguerre and inverse-Laguerre samplers and the
//! hard-edge Bessel kernels describing the large-N limit.

mod bessel;
mod laguerre;

pub use bessel::{bessel_j, bessel_kernel, inverse_bessel_kernel, inverse_bessel_kernel_scaled, KernelGrid};
pub use laguerre::{invert, sample_inverse_laguerre, sample_laguerre};
