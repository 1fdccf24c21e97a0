//! Diagnostics: Sobolev/Besov norms, space-time norms, the weighted energy
//! functionals, and rate extraction.

pub mod functionals;
pub mod norms;
pub mod rates;

pub use functionals::{besov_x_series, energy_residual, free_energy, sobolev_x_series};
pub use norms::{
    besov_norm, sobolev_grad_norm, sobolev_norm, spacetime_norm, BlockSet, NormSeries, TimeExp,
};
pub use rates::{damping_rate, fit_rate, RateFit};
