//! Pseudo-spectral simulation and analysis of the Oldroyd-B viscoelastic
//! fluid on the periodic torus, focused on the Newtonian limit of vanishing
//! relaxation time.
//!
//! The crate is organized as:
//! - [`spectral`]: grids, transforms, and linear spectral operators;
//! - [`constitutive`]: model parameters and the Oldroyd-B nonlinearities;
//! - [`solver`]: exponential time steppers, trajectory runs, and the
//!   linear-regime oracle;
//! - [`analysis`]: norms, energy functionals, and rate fits;
//! - [`harness`]: experiment configuration, sweeps, reports, checkpoints.

pub mod analysis;
pub mod constitutive;
pub mod error;
pub mod harness;
pub mod solver;
pub mod spectral;

pub use error::{Error, Result};
