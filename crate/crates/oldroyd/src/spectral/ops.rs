//! Linear spectral operators: derivatives, Leray projection, dealiasing,
//! low/high frequency splitting.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::spectral::field::{sym_index, Rank, SpectralField};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DiffOp {
    Gradient,
    Divergence,
    Laplacian,
}

/// Exact Fourier-multiplier derivative.
///
/// gradient: scalar -> vector, vector -> dense tensor (d u_m / d x_n at slot m*dims+n);
/// divergence: vector -> scalar, symmetric or dense tensor -> vector
/// (component_m = sum_n i k_n t_{mn}); laplacian: any rank, multiplier -|k|^2.
pub fn differentiate(field: &SpectralField, op: DiffOp) -> Result<SpectralField> {
    let grid = field.grid();
    let dims = grid.dims();
    let n = grid.n();
    let i = Complex64::new(0.0, 1.0);
    match op {
        DiffOp::Laplacian => {
            let mut out = field.clone();
            for c in 0..out.components() {
                let comp = out.component_mut(c);
                for (idx, z) in comp.iter_mut().enumerate() {
                    *z *= -grid.k_squared(idx);
                }
            }
            Ok(out)
        }
        DiffOp::Gradient => match field.rank() {
            Rank::Scalar => {
                let mut out = SpectralField::zeros(grid, Rank::Vector);
                for ax in 0..dims {
                    for idx in 0..n {
                        let k = grid.wavevector(idx);
                        out.set(ax, idx, i * k[ax] as f64 * field.get(0, idx));
                    }
                }
                Ok(out)
            }
            Rank::Vector => {
                let mut out = SpectralField::zeros(grid, Rank::Tensor);
                for m in 0..dims {
                    for ax in 0..dims {
                        for idx in 0..n {
                            let k = grid.wavevector(idx);
                            out.set(m * dims + ax, idx, i * k[ax] as f64 * field.get(m, idx));
                        }
                    }
                }
                Ok(out)
            }
            other => Err(Error::RankMismatch { expected: "scalar or vector", got: other.name() }),
        },
        DiffOp::Divergence => match field.rank() {
            Rank::Vector => {
                let mut out = SpectralField::zeros(grid, Rank::Scalar);
                for idx in 0..n {
                    let k = grid.wavevector(idx);
                    let mut s = Complex64::new(0.0, 0.0);
                    for ax in 0..dims {
                        s += i * k[ax] as f64 * field.get(ax, idx);
                    }
                    out.set(0, idx, s);
                }
                Ok(out)
            }
            Rank::SymTensor => {
                let mut out = SpectralField::zeros(grid, Rank::Vector);
                for m in 0..dims {
                    for idx in 0..n {
                        let k = grid.wavevector(idx);
                        let mut s = Complex64::new(0.0, 0.0);
                        for ax in 0..dims {
                            s += i * k[ax] as f64 * field.get(sym_index(dims, m, ax), idx);
                        }
                        out.set(m, idx, s);
                    }
                }
                Ok(out)
            }
            Rank::Tensor => {
                let mut out = SpectralField::zeros(grid, Rank::Vector);
                for m in 0..dims {
                    for idx in 0..n {
                        let k = grid.wavevector(idx);
                        let mut s = Complex64::new(0.0, 0.0);
                        for ax in 0..dims {
                            s += i * k[ax] as f64 * field.get(m * dims + ax, idx);
                        }
                        out.set(m, idx, s);
                    }
                }
                Ok(out)
            }
            other => Err(Error::RankMismatch { expected: "vector or tensor", got: other.name() }),
        },
    }
}

/// Leray projection onto solenoidal vector fields:
/// v_k -> v_k - k (k.v_k)/|k|^2 per mode, k = 0 untouched (the mean is
/// handled by the zero-mean policy).
pub fn leray_project(v: &SpectralField) -> Result<SpectralField> {
    v.expect_rank(Rank::Vector)?;
    let grid = v.grid();
    let dims = grid.dims();
    let mut out = v.clone();
    for idx in 0..grid.n() {
        let k = grid.wavevector(idx);
        let ksq = grid.k_squared(idx);
        if ksq == 0.0 {
            continue;
        }
        let mut kv = Complex64::new(0.0, 0.0);
        for ax in 0..dims {
            kv += k[ax] as f64 * out.get(ax, idx);
        }
        let factor = kv / ksq;
        for ax in 0..dims {
            let val = out.get(ax, idx) - k[ax] as f64 * factor;
            out.set(ax, idx, val);
        }
    }
    Ok(out)
}

/// In-place variant used in the stepper hot path.
pub fn leray_project_inplace(v: &mut SpectralField) {
    debug_assert_eq!(v.rank(), Rank::Vector);
    let grid = v.grid();
    let dims = grid.dims();
    for idx in 0..grid.n() {
        let ksq = grid.k_squared(idx);
        if ksq == 0.0 {
            continue;
        }
        let k = grid.wavevector(idx);
        let mut kv = Complex64::new(0.0, 0.0);
        for ax in 0..dims {
            kv += k[ax] as f64 * v.get(ax, idx);
        }
        let factor = kv / ksq;
        for ax in 0..dims {
            let val = v.get(ax, idx) - k[ax] as f64 * factor;
            v.set(ax, idx, val);
        }
    }
}

/// Zero the k = 0 coefficient of every component.
pub fn zero_mean(v: &mut SpectralField) {
    for c in 0..v.components() {
        v.component_mut(c)[0] = Complex64::new(0.0, 0.0);
    }
}

/// 2/3-rule dealiasing: zero every mode with any |k_i| > floor(m/3).
/// Idempotent.
pub fn dealias(field: &SpectralField) -> SpectralField {
    let mut out = field.clone();
    dealias_inplace(&mut out);
    out
}

pub fn dealias_inplace(field: &mut SpectralField) {
    let grid = field.grid();
    let dims = grid.dims();
    let limit = grid.dealias_limit();
    for c in 0..field.components() {
        let comp = field.component_mut(c);
        for (idx, z) in comp.iter_mut().enumerate() {
            let k = grid.wavevector(idx);
            if (0..dims).any(|ax| k[ax].abs() > limit) {
                *z = Complex64::new(0.0, 0.0);
            }
        }
    }
}

/// Sharp low/high split at `cutoff`: low keeps |k| <= cutoff, high keeps
/// |k| > cutoff.  Exact partition: low + high = field.
pub fn split_frequencies(field: &SpectralField, cutoff: f64) -> (SpectralField, SpectralField) {
    assert!(cutoff > 0.0, "cutoff must be positive");
    let grid = field.grid();
    let cut2 = cutoff * cutoff;
    let mut low = field.clone();
    let mut high = field.clone();
    for c in 0..field.components() {
        let n = grid.n();
        for idx in 0..n {
            if grid.k_squared(idx) <= cut2 {
                high.component_mut(c)[idx] = Complex64::new(0.0, 0.0);
            } else {
                low.component_mut(c)[idx] = Complex64::new(0.0, 0.0);
            }
        }
    }
    (low, high)
}

/// Apply only the low-pass part of `split_frequencies` (P_eps).
pub fn low_pass(field: &SpectralField, cutoff: f64) -> SpectralField {
    split_frequencies(field, cutoff).0
}

/// Apply only the high-pass part (Q_eps).
pub fn high_pass(field: &SpectralField, cutoff: f64) -> SpectralField {
    split_frequencies(field, cutoff).1
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral::field::Rank;
    use crate::spectral::grid::Grid;
    use crate::spectral::transform::{to_spectral, PhysicalField};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_field(grid: Grid, rank: Rank, seed: u64) -> SpectralField {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut phys = PhysicalField::zeros(grid, rank);
        for v in &mut phys.data {
            *v = rng.gen_range(-1.0..1.0);
        }
        to_spectral(&phys).unwrap()
    }

    #[test]
    fn gradient_of_sin_x() {
        let g = Grid::new(2, 16).unwrap();
        let phys = PhysicalField::from_fn(g, Rank::Scalar, |_, x| x[0].sin());
        let f = to_spectral(&phys).unwrap();
        let grad = differentiate(&f, DiffOp::Gradient).unwrap();
        let back = crate::spectral::transform::to_physical(&grad);
        let cosx = PhysicalField::from_fn(g, Rank::Scalar, |_, x| x[0].cos());
        let err_x = back
            .component(0)
            .iter()
            .zip(cosx.component(0))
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max);
        let err_y = back.component(1).iter().map(|v| v.abs()).fold(0.0, f64::max);
        assert!(err_x < 1e-12 && err_y < 1e-13);
    }

    #[test]
    fn laplacian_scales_single_mode_by_minus_ksq() {
        let g = Grid::new(2, 16).unwrap();
        let mut f = SpectralField::zeros(g, Rank::Scalar);
        let idx = g.index_of(&[1, 1]);
        f.set(0, idx, Complex64::new(1.0, 0.0));
        let lap = differentiate(&f, DiffOp::Laplacian).unwrap();
        assert!((lap.get(0, idx) - Complex64::new(-2.0, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn taylor_green_is_divergence_free() {
        let g = Grid::new(2, 32).unwrap();
        let phys = PhysicalField::from_fn(g, Rank::Vector, |c, x| match c {
            0 => x[0].sin() * x[1].cos(),
            _ => -(x[0].cos() * x[1].sin()),
        });
        let u = to_spectral(&phys).unwrap();
        let div = differentiate(&u, DiffOp::Divergence).unwrap();
        assert!(div.max_abs() < 1e-13);
    }

    #[test]
    fn leray_annihilates_gradients_and_keeps_solenoidal() {
        let g = Grid::new(2, 16).unwrap();
        // gradient of sin x
        let phys = PhysicalField::from_fn(g, Rank::Scalar, |_, x| x[0].sin());
        let f = to_spectral(&phys).unwrap();
        let grad = differentiate(&f, DiffOp::Gradient).unwrap();
        let projected = leray_project(&grad).unwrap();
        assert!(projected.max_abs() < 1e-13);

        // mode k=(0,1), vector (1,0): transverse, unchanged
        let mut v = SpectralField::zeros(g, Rank::Vector);
        let idx = g.index_of(&[0, 1]);
        v.set(0, idx, Complex64::new(1.0, 0.0));
        let p = leray_project(&v).unwrap();
        assert!((p.get(0, idx) - Complex64::new(1.0, 0.0)).norm() < 1e-15);

        // mode k=(1,0), vector (1,0): longitudinal, killed
        let mut w = SpectralField::zeros(g, Rank::Vector);
        let jdx = g.index_of(&[1, 0]);
        w.set(0, jdx, Complex64::new(1.0, 0.0));
        let q = leray_project(&w).unwrap();
        assert!(q.max_abs() < 1e-15);
    }

    #[test]
    fn leray_is_idempotent_and_self_adjoint() {
        let g = Grid::new(2, 16).unwrap();
        let v = random_field(g, Rank::Vector, 3);
        let w = random_field(g, Rank::Vector, 4);
        let pv = leray_project(&v).unwrap();
        let ppv = leray_project(&pv).unwrap();
        let scale = pv.max_abs();
        let idem = pv.data().iter().zip(ppv.data()).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max);
        assert!(idem <= 1e-13 * scale.max(1.0));
        let pw = leray_project(&w).unwrap();
        let lhs = pv.inner(&w);
        let rhs = v.inner(&pw);
        assert!((lhs - rhs).norm() <= 1e-13 * (lhs.norm() + 1.0));
        // divergence of projection vanishes exactly per mode
        let div = differentiate(&pv, DiffOp::Divergence).unwrap();
        assert!(div.max_abs() <= 1e-13 * scale.max(1.0));
    }

    #[test]
    fn dealias_threshold_and_idempotence() {
        let g = Grid::new(2, 32).unwrap();
        let mut f = SpectralField::zeros(g, Rank::Scalar);
        let keep = g.index_of(&[10, 0]);
        let drop1 = g.index_of(&[11, 0]);
        let drop2 = g.index_of(&[12, 0]);
        f.set(0, keep, Complex64::new(1.0, 0.0));
        f.set(0, drop1, Complex64::new(1.0, 0.0));
        f.set(0, drop2, Complex64::new(1.0, 0.0));
        let d = dealias(&f);
        assert_eq!(d.get(0, keep), Complex64::new(1.0, 0.0));
        assert_eq!(d.get(0, drop1), Complex64::new(0.0, 0.0));
        assert_eq!(d.get(0, drop2), Complex64::new(0.0, 0.0));
        assert_eq!(dealias(&d), d);
    }

    #[test]
    fn split_is_exact_partition() {
        let g = Grid::new(2, 16).unwrap();
        let mut f = SpectralField::zeros(g, Rank::Scalar);
        f.set(0, g.index_of(&[1, 0]), Complex64::new(1.0, 0.0));
        f.set(0, g.index_of(&[2, 0]), Complex64::new(1.0, 0.0));
        let (low, high) = split_frequencies(&f, 1.5);
        assert_eq!(low.get(0, g.index_of(&[1, 0])), Complex64::new(1.0, 0.0));
        assert_eq!(low.get(0, g.index_of(&[2, 0])), Complex64::new(0.0, 0.0));
        assert_eq!(high.get(0, g.index_of(&[2, 0])), Complex64::new(1.0, 0.0));

        let r = random_field(g, Rank::Vector, 9);
        let (lo, hi) = split_frequencies(&r, 3.0);
        let sum = lo.add(&hi);
        assert_eq!(sum, r); // exact partition, bitwise
        // orthogonality (Parseval)
        let total = r.l2_norm().powi(2);
        let parts = lo.l2_norm().powi(2) + hi.l2_norm().powi(2);
        assert!((total - parts).abs() <= 1e-12 * total);
    }

    #[test]
    fn high_pass_bernstein_bound() {
        // ||high||_{H^{s'}} <= cutoff^{-(s-s')} ||f||_{H^s} for s' < s
        let g = Grid::new(2, 32).unwrap();
        let f = random_field(g, Rank::Scalar, 11);
        let hi = high_pass(&f, 4.0);
        let s = 2.0;
        let sp = 1.0;
        let hs = crate::analysis::sobolev_norm(&f, s);
        let hsp = crate::analysis::sobolev_norm(&hi, sp);
        assert!(hsp <= 4.0f64.powf(-(s - sp)) * hs * (1.0 + 1e-12));
    }
}
