//! Interlacing corner kernels: the spline `M`, exact corner samplers, the
//! determinantal density of `Λ_K^N`, and the boundary-matrix sampler.

mod boundary;
mod corner;
mod density;
mod spline;

pub use boundary::{sample_boundary_corner, truncation_index};
pub use corner::{haar_unitary, sample_chain, sample_corner, sample_corner_direct};
pub use density::{
    cell_mass_k2, lambda_kn_density, lambda_kn_density_mc, lambda_kn_density_or_estimate, refined_grid, total_mass,
    CONDITION_LIMIT, MAX_DENSITY_K, MAX_DENSITY_N,
};
pub use spline::{spline_cdf, spline_m, spline_m_derivative, KnotVector};
