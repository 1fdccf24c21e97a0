//! Discrete Fourier transform pair between physical samples and spectral coefficients.
//!
//! Normalization is volume-based: `to_spectral` divides by m^dims so the field
//! e^{ik.x} has a single coefficient 1 at k, and Parseval reads
//! ||f||_{L2}^2 = sum_k |f_k|^2.

use std::collections::HashMap;
use std::sync::Arc;

use num_complex::Complex64;
use rustfft::{Fft, FftDirection, FftPlanner};

use crate::error::{Error, Result};
use crate::spectral::field::{Rank, SpectralField};
use crate::spectral::grid::Grid;

/// Real-valued samples on the physical grid, component-major, row-major per
/// component (axis 0 slowest).
#[derive(Debug, Clone, PartialEq)]
pub struct PhysicalField {
    pub grid: Grid,
    pub rank: Rank,
    pub data: Vec<f64>,
}

impl PhysicalField {
    pub fn zeros(grid: Grid, rank: Rank) -> Self {
        let n = grid.n() * rank.components(grid.dims());
        PhysicalField { grid, rank, data: vec![0.0; n] }
    }

    pub fn component(&self, c: usize) -> &[f64] {
        let n = self.grid.n();
        &self.data[c * n..(c + 1) * n]
    }

    pub fn component_mut(&mut self, c: usize) -> &mut [f64] {
        let n = self.grid.n();
        &mut self.data[c * n..(c + 1) * n]
    }

    /// Fill from a closure of physical coordinates (component, x) -> value.
    pub fn from_fn(grid: Grid, rank: Rank, f: impl Fn(usize, &[f64]) -> f64) -> Self {
        let mut out = Self::zeros(grid, rank);
        let m = grid.m();
        let dims = grid.dims();
        let h = 2.0 * std::f64::consts::PI / m as f64;
        let n = grid.n();
        for c in 0..rank.components(dims) {
            for idx in 0..n {
                let mut x = [0.0f64; 3];
                let mut rem = idx;
                for ax in (0..dims).rev() {
                    x[ax] = (rem % m) as f64 * h;
                    rem /= m;
                }
                out.component_mut(c)[idx] = f(c, &x[..dims]);
            }
        }
        out
    }
}

/// FFT plan cache and scratch buffers.  Not synchronized: confine one
/// workspace to one worker.
pub struct FftWorkspace {
    planner: FftPlanner<f64>,
    plans: HashMap<(usize, bool), Arc<dyn Fft<f64>>>,
    line: Vec<Complex64>,
    buf: Vec<Complex64>,
}

impl Default for FftWorkspace {
    fn default() -> Self {
        Self::new()
    }
}

impl FftWorkspace {
    pub fn new() -> Self {
        FftWorkspace {
            planner: FftPlanner::new(),
            plans: HashMap::new(),
            line: Vec::new(),
            buf: Vec::new(),
        }
    }

    fn plan(&mut self, len: usize, forward: bool) -> Arc<dyn Fft<f64>> {
        let dir = if forward { FftDirection::Forward } else { FftDirection::Inverse };
        self.plans
            .entry((len, forward))
            .or_insert_with(|| self.planner.plan_fft(len, dir))
            .clone()
    }

    /// In-place n-dimensional FFT of one component block.
    fn fft_nd(&mut self, grid: Grid, data: &mut [Complex64], forward: bool) {
        let m = grid.m();
        let dims = grid.dims();
        let n = grid.n();
        let plan = self.plan(m, forward);
        for ax in 0..dims {
            let stride = m.pow((dims - 1 - ax) as u32);
            if stride == 1 {
                for line in data.chunks_exact_mut(m) {
                    plan.process(line);
                }
            } else {
                self.line.resize(m, Complex64::new(0.0, 0.0));
                let blocks = n / (stride * m);
                for q in 0..blocks {
                    for r in 0..stride {
                        let start = q * stride * m + r;
                        for t in 0..m {
                            self.line[t] = data[start + t * stride];
                        }
                        plan.process(&mut self.line);
                        for t in 0..m {
                            data[start + t * stride] = self.line[t];
                        }
                    }
                }
            }
        }
    }

    /// Physical samples -> spectral coefficients.
    pub fn to_spectral(&mut self, phys: &PhysicalField) -> Result<SpectralField> {
        if phys.data.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite);
        }
        let grid = phys.grid;
        let n = grid.n();
        let comps = phys.rank.components(grid.dims());
        if phys.data.len() != n * comps {
            return Err(Error::SizeMismatch { expected: n * comps, got: phys.data.len() });
        }
        let mut out = SpectralField::zeros(grid, phys.rank);
        let scale = 1.0 / n as f64;
        for c in 0..comps {
            self.buf.clear();
            self.buf.extend(phys.component(c).iter().map(|&v| Complex64::new(v, 0.0)));
            let mut buf = std::mem::take(&mut self.buf);
            self.fft_nd(grid, &mut buf, true);
            for (dst, src) in out.component_mut(c).iter_mut().zip(&buf) {
                *dst = src * scale;
            }
            self.buf = buf;
        }
        Ok(out)
    }

    /// Spectral coefficients -> physical samples (real part; the imaginary
    /// part is roundoff for Hermitian data).
    pub fn to_physical(&mut self, field: &SpectralField) -> PhysicalField {
        let grid = field.grid();
        let mut out = PhysicalField::zeros(grid, field.rank());
        for c in 0..field.components() {
            self.buf.clear();
            self.buf.extend_from_slice(field.component(c));
            let mut buf = std::mem::take(&mut self.buf);
            self.fft_nd(grid, &mut buf, false);
            for (dst, src) in out.component_mut(c).iter_mut().zip(&buf) {
                *dst = src.re;
            }
            self.buf = buf;
        }
        out
    }
}

/// One-shot transform, for callers without a persistent workspace.
pub fn to_spectral(phys: &PhysicalField) -> Result<SpectralField> {
    FftWorkspace::new().to_spectral(phys)
}

/// One-shot inverse transform.
pub fn to_physical(field: &SpectralField) -> PhysicalField {
    FftWorkspace::new().to_physical(field)
}
