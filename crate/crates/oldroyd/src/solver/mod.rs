//! Time integration: per-mode exponential propagators, the Oldroyd-B and
//! Navier-Stokes steppers, the trajectory runner, and the linear-regime
//! oracle used for cross-checking.

pub mod matexp;
pub mod oracle;
pub mod run;
pub mod scheme;

pub use matexp::CMat;
pub use oracle::{linear_mode_solution, mode_operator};
pub use run::{
    run_newtonian, run_oldroyd, QuadratureLayout, QuadratureTrack, RefTrajectory, RunSettings,
    Trajectory,
};
pub use scheme::{phi1, NewtonianState, NewtonianStepper, OldroydStepper, SchemeOptions};
