//! Spectral field storage: complex Fourier coefficients per wavevector per component.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::spectral::grid::Grid;

/// Tensor rank of a field.
///
/// `SymTensor` stores only the dims(dims+1)/2 independent components of a
/// symmetric matrix; `Tensor` stores all dims^2 entries (used for velocity
/// gradients and the vorticity tensor, which is antisymmetric but kept dense).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Rank {
    Scalar,
    Vector,
    SymTensor,
    Tensor,
}

impl Rank {
    pub fn components(&self, dims: usize) -> usize {
        match self {
            Rank::Scalar => 1,
            Rank::Vector => dims,
            Rank::SymTensor => dims * (dims + 1) / 2,
            Rank::Tensor => dims * dims,
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            Rank::Scalar => "scalar",
            Rank::Vector => "vector",
            Rank::SymTensor => "symmetric-tensor",
            Rank::Tensor => "tensor",
        }
    }
}

/// Index pairs (row, col) of the stored components of a symmetric tensor,
/// upper triangle in row-major order.
pub fn sym_pairs(dims: usize) -> &'static [(usize, usize)] {
    match dims {
        2 => &[(0, 0), (0, 1), (1, 1)],
        3 => &[(0, 0), (0, 1), (0, 2), (1, 1), (1, 2), (2, 2)],
        _ => unreachable!("dims is 2 or 3"),
    }
}

/// Storage slot of symmetric component (i, j).
#[inline]
pub fn sym_index(dims: usize, i: usize, j: usize) -> usize {
    let (i, j) = if i <= j { (i, j) } else { (j, i) };
    match dims {
        2 => [[0, 1], [usize::MAX, 2]][i][j],
        3 => [[0, 1, 2], [usize::MAX, 3, 4], [usize::MAX, usize::MAX, 5]][i][j],
        _ => unreachable!(),
    }
}

/// Frobenius multiplicity of stored symmetric component `c` (2 off-diagonal).
#[inline]
pub fn sym_weight(dims: usize, c: usize) -> f64 {
    let (i, j) = sym_pairs(dims)[c];
    if i == j {
        1.0
    } else {
        2.0
    }
}

/// Complex Fourier coefficients of a real periodic field.
///
/// Layout is component-major: component `c` occupies the contiguous block
/// `[c*n, (c+1)*n)` where `n = grid.n()`, modes in row-major FFT order.
/// Real fields satisfy the Hermitian symmetry coeff(-k) = conj(coeff(k)).
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralField {
    grid: Grid,
    rank: Rank,
    data: Vec<Complex64>,
}

impl SpectralField {
    pub fn zeros(grid: Grid, rank: Rank) -> Self {
        let n = grid.n() * rank.components(grid.dims());
        SpectralField { grid, rank, data: vec![Complex64::new(0.0, 0.0); n] }
    }

    pub fn from_data(grid: Grid, rank: Rank, data: Vec<Complex64>) -> Result<Self> {
        let expected = grid.n() * rank.components(grid.dims());
        if data.len() != expected {
            return Err(Error::SizeMismatch { expected, got: data.len() });
        }
        Ok(SpectralField { grid, rank, data })
    }

    pub fn grid(&self) -> Grid {
        self.grid
    }

    pub fn rank(&self) -> Rank {
        self.rank
    }

    pub fn components(&self) -> usize {
        self.rank.components(self.grid.dims())
    }

    pub fn data(&self) -> &[Complex64] {
        &self.data
    }

    pub fn data_mut(&mut self) -> &mut [Complex64] {
        &mut self.data
    }

    pub fn component(&self, c: usize) -> &[Complex64] {
        let n = self.grid.n();
        &self.data[c * n..(c + 1) * n]
    }

    pub fn component_mut(&mut self, c: usize) -> &mut [Complex64] {
        let n = self.grid.n();
        &mut self.data[c * n..(c + 1) * n]
    }

    #[inline]
    pub fn get(&self, c: usize, idx: usize) -> Complex64 {
        self.data[c * self.grid.n() + idx]
    }

    #[inline]
    pub fn set(&mut self, c: usize, idx: usize, v: Complex64) {
        let n = self.grid.n();
        self.data[c * n + idx] = v;
    }

    pub fn expect_rank(&self, rank: Rank) -> Result<()> {
        if self.rank != rank {
            return Err(Error::RankMismatch { expected: rank.name(), got: self.rank.name() });
        }
        Ok(())
    }

    pub fn expect_same_grid(&self, other: &SpectralField) -> Result<()> {
        if self.grid != other.grid {
            return Err(Error::GridMismatch);
        }
        Ok(())
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|z| z.re.is_finite() && z.im.is_finite())
    }

    pub fn scale(&mut self, c: f64) {
        for z in &mut self.data {
            *z *= c;
        }
    }

    pub fn scaled(&self, c: f64) -> SpectralField {
        let mut out = self.clone();
        out.scale(c);
        out
    }

    /// self += c * other
    pub fn axpy(&mut self, c: f64, other: &SpectralField) {
        debug_assert_eq!(self.data.len(), other.data.len());
        for (a, b) in self.data.iter_mut().zip(&other.data) {
            *a += c * b;
        }
    }

    pub fn add(&self, other: &SpectralField) -> SpectralField {
        let mut out = self.clone();
        out.axpy(1.0, other);
        out
    }

    pub fn sub(&self, other: &SpectralField) -> SpectralField {
        let mut out = self.clone();
        out.axpy(-1.0, other);
        out
    }

    /// Frobenius weight of stored component `c` (1 except 2 for symmetric
    /// off-diagonal entries).
    pub fn component_weight(&self, c: usize) -> f64 {
        match self.rank {
            Rank::SymTensor => sym_weight(self.grid.dims(), c),
            _ => 1.0,
        }
    }

    /// Volume-normalized L2 inner product: sum_k sum_c w_c f_c(k) conj(g_c(k)).
    pub fn inner(&self, other: &SpectralField) -> Complex64 {
        debug_assert_eq!(self.rank, other.rank);
        let n = self.grid.n();
        let mut acc = Complex64::new(0.0, 0.0);
        for c in 0..self.components() {
            let w = self.component_weight(c);
            let a = &self.data[c * n..(c + 1) * n];
            let b = &other.data[c * n..(c + 1) * n];
            let mut s = Complex64::new(0.0, 0.0);
            for (x, y) in a.iter().zip(b) {
                s += x * y.conj();
            }
            acc += w * s;
        }
        acc
    }

    /// Volume-normalized L2 norm (Parseval).
    pub fn l2_norm(&self) -> f64 {
        let n = self.grid.n();
        let mut acc = 0.0;
        for c in 0..self.components() {
            let w = self.component_weight(c);
            acc += w * self.data[c * n..(c + 1) * n].iter().map(|z| z.norm_sqr()).sum::<f64>();
        }
        acc.sqrt()
    }

    /// Largest coefficient magnitude over all components and modes.
    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    /// Maximum Hermitian-symmetry violation |coeff(-k) - conj(coeff(k))|.
    pub fn hermitian_defect(&self) -> f64 {
        let g = self.grid;
        let mut worst = 0.0f64;
        for c in 0..self.components() {
            let comp = self.component(c);
            for idx in 0..g.n() {
                if g.is_nyquist(idx) {
                    continue;
                }
                let k = g.wavevector(idx);
                let neg: Vec<i64> = (0..g.dims()).map(|ax| -k[ax]).collect();
                let j = g.index_of(&neg);
                let d = (comp[j] - comp[idx].conj()).norm();
                worst = worst.max(d);
            }
        }
        worst
    }

    /// Zero the Nyquist planes (|k_i| = m/2); real-field storage keeps them empty.
    pub fn zero_nyquist(&mut self) {
        let g = self.grid;
        for c in 0..self.components() {
            let n = g.n();
            let comp = &mut self.data[c * n..(c + 1) * n];
            for (idx, z) in comp.iter_mut().enumerate() {
                if g.is_nyquist(idx) {
                    *z = Complex64::new(0.0, 0.0);
                }
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sym_index_agrees_with_pairs() {
        for dims in [2usize, 3] {
            for (c, &(i, j)) in sym_pairs(dims).iter().enumerate() {
                assert_eq!(sym_index(dims, i, j), c);
                assert_eq!(sym_index(dims, j, i), c);
            }
        }
    }

    #[test]
    fn l2_norm_scaling_is_exact() {
        let g = Grid::new(2, 8).unwrap();
        let mut f = SpectralField::zeros(g, Rank::Vector);
        f.set(0, 3, Complex64::new(1.5, -0.5));
        f.set(1, 7, Complex64::new(0.0, 2.0));
        let n1 = f.l2_norm();
        f.scale(-3.0);
        assert!((f.l2_norm() - 3.0 * n1).abs() <= 1e-15 * n1);
    }

    #[test]
    fn frobenius_weights_double_off_diagonals() {
        let g = Grid::new(2, 8).unwrap();
        let mut t = SpectralField::zeros(g, Rank::SymTensor);
        t.set(1, 0, Complex64::new(1.0, 0.0)); // off-diagonal component
        assert!((t.l2_norm() - 2.0f64.sqrt()).abs() < 1e-15);
    }
}
