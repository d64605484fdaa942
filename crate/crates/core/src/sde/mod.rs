//! Time integrators: the eigenvalue SDE in plain and log coordinates, the
//! Hermitian matrix SDE, the scalar diffusion, shared-noise coupling, and the
//! generator used for martingale checks.

mod coupled;
mod diffusion1d;
mod eigen;
mod generator;
mod matrix;

pub use coupled::{simulate_coupled, CoupledStepper, SharedBrownian};
pub use diffusion1d::step_1d;
pub use eigen::{
    simulate, simulate_with_noise, step_eigen_sde, step_log_sde, Integrator, StepReport, Stepper,
};
pub use generator::{generator_apply, generator_apply_with, PowerSum, SmoothFunction};
pub use matrix::{eigenvalues, step_matrix_sde, HermitianState};
