//! Sobolev and dyadic-block norms of spectral fields, and Lebesgue norms of
//! scalar time series.

use crate::error::{Error, Result};
use crate::spectral::{lp_block_l2, LPFamily, SpectralField};

/// Inhomogeneous Sobolev norm ||f||_{H^s} = (sum (1+|k|^2)^s |f_k|^2)^{1/2},
/// with off-diagonal symmetric-tensor components counted twice (Frobenius).
pub fn sobolev_norm(field: &SpectralField, s: f64) -> f64 {
    let grid = field.grid();
    let n = grid.n();
    let mut acc = 0.0;
    for c in 0..field.components() {
        let wgt = field.component_weight(c);
        let comp = field.component(c);
        for idx in 0..n {
            let ksq = grid.k_squared(idx);
            acc += wgt * (1.0 + ksq).powf(s) * comp[idx].norm_sqr();
        }
    }
    acc.sqrt()
}

/// ||grad f||_{H^s} = (sum |k|^2 (1+|k|^2)^s |f_k|^2)^{1/2}, computed without
/// materializing the gradient.
pub fn sobolev_grad_norm(field: &SpectralField, s: f64) -> f64 {
    let grid = field.grid();
    let n = grid.n();
    let mut acc = 0.0;
    for c in 0..field.components() {
        let wgt = field.component_weight(c);
        let comp = field.component(c);
        for idx in 0..n {
            let ksq = grid.k_squared(idx);
            acc += wgt * ksq * (1.0 + ksq).powf(s) * comp[idx].norm_sqr();
        }
    }
    acc.sqrt()
}

/// Which dyadic blocks a Besov sum ranges over.  `cutoff` is the frequency
/// threshold (the blocks J stop where 2^j exceeds it).
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum BlockSet {
    /// Every block.
    All,
    /// Low blocks j <= -1.
    Low,
    /// Intermediate blocks j >= 0 with 2^j <= cutoff.
    Mid { cutoff: f64 },
    /// High blocks j >= 0 with 2^j > cutoff.
    High { cutoff: f64 },
    /// Union of `Low` and `Mid`.
    LowMid { cutoff: f64 },
}

impl BlockSet {
    pub fn contains(&self, j: i32) -> bool {
        let pow = 2.0f64.powi(j);
        match *self {
            BlockSet::All => true,
            BlockSet::Low => j <= -1,
            BlockSet::Mid { cutoff } => j >= 0 && pow <= cutoff,
            BlockSet::High { cutoff } => j >= 0 && pow > cutoff,
            BlockSet::LowMid { cutoff } => j <= -1 || pow <= cutoff,
        }
    }
}

/// Besov norm ||f||_{B^s} = sum_j 2^{js} ||Delta_j f||_{L2}, restricted to
/// the blocks in `set`.  The k = 0 mode never contributes (homogeneous
/// blocks).
pub fn besov_norm(field: &SpectralField, s: f64, set: BlockSet, family: &LPFamily) -> f64 {
    family
        .j_range()
        .filter(|&j| set.contains(j))
        .map(|j| 2.0f64.powi(j).powf(s) * lp_block_l2(field, j, family))
        .sum()
}

/// Time exponent for space-time norms.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TimeExp {
    One,
    Two,
    Infinity,
}

/// A scalar diagnostic sampled along a trajectory.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct NormSeries {
    pub times: Vec<f64>,
    pub values: Vec<f64>,
}

impl NormSeries {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn push(&mut self, t: f64, v: f64) {
        self.times.push(t);
        self.values.push(v);
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    /// Trapezoid integral of the series over its time span.
    pub fn integral(&self) -> Result<f64> {
        if self.is_empty() {
            return Err(Error::EmptySeries);
        }
        let mut acc = 0.0;
        for i in 1..self.len() {
            let dt = self.times[i] - self.times[i - 1];
            acc += 0.5 * dt * (self.values[i] + self.values[i - 1]);
        }
        Ok(acc)
    }

    pub fn sup(&self) -> Result<f64> {
        if self.is_empty() {
            return Err(Error::EmptySeries);
        }
        Ok(self.values.iter().fold(f64::NEG_INFINITY, |a, &b| a.max(b)))
    }

    pub fn last(&self) -> Option<(f64, f64)> {
        match (self.times.last(), self.values.last()) {
            (Some(&t), Some(&v)) => Some((t, v)),
            _ => None,
        }
    }
}

/// L^p-in-time norm of a sampled scalar series (trapezoid quadrature for
/// finite p).
pub fn spacetime_norm(series: &NormSeries, p: TimeExp) -> Result<f64> {
    if series.times.len() != series.values.len() {
        return Err(Error::SizeMismatch {
            expected: series.times.len(),
            got: series.values.len(),
        });
    }
    match p {
        TimeExp::Infinity => series.sup(),
        TimeExp::One => {
            let abs = NormSeries {
                times: series.times.clone(),
                values: series.values.iter().map(|v| v.abs()).collect(),
            };
            abs.integral()
        }
        TimeExp::Two => {
            let sq = NormSeries {
                times: series.times.clone(),
                values: series.values.iter().map(|v| v * v).collect(),
            };
            Ok(sq.integral()?.sqrt())
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral::{differentiate, DiffOp, Grid, LPFamily, Rank, SpectralField};
    use num_complex::Complex64 as C;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_field(grid: Grid, rank: Rank, seed: u64) -> SpectralField {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut f = SpectralField::zeros(grid, rank);
        for c in 0..f.components() {
            for idx in 0..grid.n() {
                if grid.is_nyquist(idx) {
                    continue;
                }
                f.set(c, idx, C::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)));
            }
        }
        f
    }

    #[test]
    fn h0_is_l2() {
        let g = Grid::new(2, 16).unwrap();
        let f = random_field(g, Rank::SymTensor, 1);
        assert!((sobolev_norm(&f, 0.0) - f.l2_norm()).abs() < 1e-12);
    }

    #[test]
    fn single_mode_sobolev_weight() {
        let g = Grid::new(2, 16).unwrap();
        let mut f = SpectralField::zeros(g, Rank::Scalar);
        f.set(0, g.index_of(&[2, -1]), C::new(3.0, 4.0)); // |f| = 5, |k|^2 = 5
        let s = 1.7;
        let expect = 5.0 * 6.0f64.powf(s / 2.0);
        assert!((sobolev_norm(&f, s) - expect).abs() < 1e-12);
    }

    #[test]
    fn grad_norm_matches_operator_route() {
        let g = Grid::new(2, 16).unwrap();
        let f = random_field(g, Rank::Vector, 2);
        let grad = differentiate(&f, DiffOp::Gradient).unwrap();
        let direct = sobolev_grad_norm(&f, 2.0);
        let via_op = sobolev_norm(&grad, 2.0);
        assert!(
            (direct - via_op).abs() < 1e-10 * direct.max(1.0),
            "direct {direct} vs operator {via_op}"
        );
    }

    #[test]
    fn besov_subsets_partition_the_norm() {
        let g = Grid::new(2, 32).unwrap();
        let fam = LPFamily::for_grid(&g);
        let f = random_field(g, Rank::SymTensor, 3);
        let cutoff = 4.0;
        let s = 1.5;
        let all = besov_norm(&f, s, BlockSet::All, &fam);
        let low = besov_norm(&f, s, BlockSet::Low, &fam);
        let mid = besov_norm(&f, s, BlockSet::Mid { cutoff }, &fam);
        let high = besov_norm(&f, s, BlockSet::High { cutoff }, &fam);
        let lowmid = besov_norm(&f, s, BlockSet::LowMid { cutoff }, &fam);
        assert!((low + mid + high - all).abs() < 1e-12 * all);
        assert!((low + mid - lowmid).abs() < 1e-12 * all);
    }

    #[test]
    fn single_mode_besov_weights() {
        // |k| = 2 sits exactly at the center of block j = 1; neighbours
        // j = 0, 2 get the complementary smooth weights.
        let g = Grid::new(2, 16).unwrap();
        let fam = LPFamily::for_grid(&g);
        let mut f = SpectralField::zeros(g, Rank::Scalar);
        f.set(0, g.index_of(&[2, 0]), C::new(1.0, 0.0));
        let s = 1.0;
        let b = besov_norm(&f, s, BlockSet::All, &fam);
        // psi_hat(2^{-1} * 2) = 1, all other blocks vanish at |k| = 2
        assert!((b - 2.0f64.powf(s)).abs() < 1e-12, "besov {b}");
    }

    #[test]
    fn series_integrals_and_sup() {
        let mut s = NormSeries::new();
        for i in 0..=100 {
            let t = i as f64 / 100.0;
            s.push(t, t); // integral 1/2, sup 1, L2 = 1/sqrt(3)
        }
        assert!((s.integral().unwrap() - 0.5).abs() < 1e-12);
        assert!((spacetime_norm(&s, TimeExp::Infinity).unwrap() - 1.0).abs() < 1e-15);
        let l2 = spacetime_norm(&s, TimeExp::Two).unwrap();
        assert!((l2 - (1.0f64 / 3.0).sqrt()).abs() < 1e-4);
    }

    #[test]
    fn empty_series_is_rejected() {
        let s = NormSeries::new();
        assert!(matches!(s.integral(), Err(crate::error::Error::EmptySeries)));
        assert!(matches!(s.sup(), Err(crate::error::Error::EmptySeries)));
    }
}
