pub mod domain;
pub mod cli;
pub mod equilibrium;
pub mod experiments;
pub mod error;
pub mod kernels;
pub mod linalg;
pub mod sde;

pub use domain::{embed, OmegaPlusPoint, OrderedConfig, RandomSource, SdeParams, Trajectory};
pub use error::{Error, Result};
