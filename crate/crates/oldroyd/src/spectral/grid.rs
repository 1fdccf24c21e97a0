//! Periodic grid on the torus [0,2pi)^dims and its integer wavevector lattice.

use crate::error::{Error, Result};

/// Uniform grid on [0,2pi)^dims with `m` points per axis.
///
/// Spectral coefficients live on the integer lattice {k : |k_i| <= m/2} in
/// standard FFT order per axis (0, 1, .., m/2, -m/2+1, .., -1).  The Nyquist
/// plane |k_i| = m/2 carries no Hermitian partner and is kept identically
/// zero; the largest retained frequency is `kmax() = m/2 - 1`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Grid {
    dims: usize,
    m: usize,
}

impl Grid {
    pub fn new(dims: usize, m: usize) -> Result<Self> {
        if dims != 2 && dims != 3 {
            return Err(Error::InvalidGrid(format!("dims must be 2 or 3, got {dims}")));
        }
        if m < 8 || m % 2 != 0 {
            return Err(Error::InvalidGrid(format!("resolution must be even and >= 8, got {m}")));
        }
        Ok(Grid { dims, m })
    }

    pub fn dims(&self) -> usize {
        self.dims
    }

    /// Points per axis.
    pub fn m(&self) -> usize {
        self.m
    }

    /// Total number of lattice points, m^dims.
    pub fn n(&self) -> usize {
        self.m.pow(self.dims as u32)
    }

    /// Largest retained frequency per axis (Nyquist excluded).
    pub fn kmax(&self) -> i64 {
        self.m as i64 / 2 - 1
    }

    /// 2/3-rule dealiasing threshold: modes with any |k_i| > floor(m/3) are dropped.
    pub fn dealias_limit(&self) -> i64 {
        (self.m / 3) as i64
    }

    /// Frequency of axis index `i` in FFT order.
    #[inline]
    pub fn freq(&self, i: usize) -> i64 {
        let m = self.m as i64;
        let i = i as i64;
        if i <= m / 2 {
            i
        } else {
            i - m
        }
    }

    /// Decode a flat storage index (row-major, axis 0 slowest) into wavevector
    /// components.  Components beyond `dims` are zero.
    #[inline]
    pub fn wavevector(&self, mut idx: usize) -> [i64; 3] {
        let mut k = [0i64; 3];
        for ax in (0..self.dims).rev() {
            k[ax] = self.freq(idx % self.m);
            idx /= self.m;
        }
        k
    }

    /// |k|^2 for a flat index.
    #[inline]
    pub fn k_squared(&self, idx: usize) -> f64 {
        let k = self.wavevector(idx);
        (k[0] * k[0] + k[1] * k[1] + k[2] * k[2]) as f64
    }

    /// Flat index of a wavevector (inverse of `wavevector`).
    pub fn index_of(&self, k: &[i64]) -> usize {
        debug_assert_eq!(k.len(), self.dims);
        let m = self.m as i64;
        let mut idx = 0usize;
        for &ki in k {
            debug_assert!(ki > -m / 2 && ki <= m / 2);
            let i = if ki >= 0 { ki } else { ki + m } as usize;
            idx = idx * self.m + i;
        }
        idx
    }

    /// True if the mode sits on a Nyquist plane (|k_i| = m/2 on some axis).
    #[inline]
    pub fn is_nyquist(&self, idx: usize) -> bool {
        let k = self.wavevector(idx);
        let ny = self.m as i64 / 2;
        (0..self.dims).any(|ax| k[ax] == ny || k[ax] == -ny)
    }
}
