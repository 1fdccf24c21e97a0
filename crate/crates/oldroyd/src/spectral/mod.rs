//! Fourier-space representation of periodic fields and the linear spectral
//! operators: transforms, derivatives, Leray projection, dealiasing,
//! frequency projectors, Littlewood-Paley blocks.

pub mod field;
pub mod grid;
pub mod lp;
pub mod ops;
pub mod transform;

pub use field::{sym_index, sym_pairs, Rank, SpectralField};
pub use grid::Grid;
pub use lp::{lp_block, lp_block_l2, LPFamily};
pub use ops::{
    dealias, dealias_inplace, differentiate, high_pass, leray_project, leray_project_inplace,
    low_pass, split_frequencies, zero_mean, DiffOp,
};
pub use transform::{to_physical, to_spectral, FftWorkspace, PhysicalField};
