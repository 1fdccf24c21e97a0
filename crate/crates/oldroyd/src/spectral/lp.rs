//! Littlewood-Paley family: dyadic blocks built from a smooth radial bump.
//!
//! The profile is psi_hat(z) = chi(z) - chi(2z) where chi is an even
//! quintic-smoothstep bump with chi = 1 on [-1,1] and support in [-2,2], so
//! the dyadic sums telescope and the partition of unity
//! sum_j psi_hat(2^{-j} z) = 1 (z != 0) holds with exact floating-point
//! cancellation.  On the torus only finitely many j are active; the k = 0
//! mode is excluded (homogeneous convention) and tracked as the mean.

use crate::spectral::field::SpectralField;
use crate::spectral::grid::Grid;

/// Quintic smoothstep on [0,1].
fn smoothstep(t: f64) -> f64 {
    if t <= 0.0 {
        0.0
    } else if t >= 1.0 {
        1.0
    } else {
        t * t * t * (t * (6.0 * t - 15.0) + 10.0)
    }
}

/// Even cutoff: 1 on |z| <= 1, 0 on |z| >= 2, smooth in between.
pub fn chi(z: f64) -> f64 {
    1.0 - smoothstep(z.abs() - 1.0)
}

/// Radial Littlewood-Paley profile, supported in [1/2, 2], 0 <= psi_hat <= 1.
pub fn psi_hat(z: f64) -> f64 {
    if z <= 0.0 {
        return 0.0;
    }
    chi(z) - chi(2.0 * z)
}

/// Low-pass profile phi_hat = 1 - sum_{j>=1} psi_hat(2^{-j} z); equals chi by
/// telescoping.
pub fn phi_hat(z: f64) -> f64 {
    chi(z)
}

/// Dyadic index family active on a grid.
#[derive(Debug, Clone, Copy)]
pub struct LPFamily {
    j_min: i32,
    j_max: i32,
}

impl LPFamily {
    /// Blocks that can be nonzero for 1 <= |k| <= sqrt(dims) * m/2.
    pub fn for_grid(grid: &Grid) -> Self {
        let kmax = (grid.dims() as f64).sqrt() * grid.m() as f64 / 2.0;
        let j_max = kmax.log2().ceil() as i32 + 1;
        LPFamily { j_min: -1, j_max }
    }

    pub fn j_range(&self) -> std::ops::RangeInclusive<i32> {
        self.j_min..=self.j_max
    }

    pub fn contains(&self, j: i32) -> bool {
        j >= self.j_min && j <= self.j_max
    }

    /// Block weight psi_hat(2^{-j} |k|) at squared radius |k|^2.
    #[inline]
    pub fn weight(&self, j: i32, k_sq: f64) -> f64 {
        if k_sq == 0.0 {
            return 0.0;
        }
        psi_hat(2.0f64.powi(-j) * k_sq.sqrt())
    }
}

/// Littlewood-Paley block Delta_j f: coefficient at k scaled by
/// psi_hat(2^{-j}|k|), k = 0 dropped.  Outside the family's range the block
/// is identically zero.
pub fn lp_block(field: &SpectralField, j: i32, family: &LPFamily) -> SpectralField {
    let grid = field.grid();
    let mut out = SpectralField::zeros(grid, field.rank());
    if !family.contains(j) {
        return out;
    }
    for c in 0..field.components() {
        for idx in 0..grid.n() {
            let w = family.weight(j, grid.k_squared(idx));
            if w != 0.0 {
                out.set(c, idx, field.get(c, idx) * w);
            }
        }
    }
    out
}

/// ||Delta_j f||_{L2} without materializing the block.
pub fn lp_block_l2(field: &SpectralField, j: i32, family: &LPFamily) -> f64 {
    let grid = field.grid();
    if !family.contains(j) {
        return 0.0;
    }
    let n = grid.n();
    let mut acc = 0.0;
    for c in 0..field.components() {
        let wgt = field.component_weight(c);
        let comp = field.component(c);
        for idx in 0..n {
            let w = family.weight(j, grid.k_squared(idx));
            if w != 0.0 {
                acc += wgt * (w * w) * comp[idx].norm_sqr();
            }
        }
    }
    acc.sqrt()
}
