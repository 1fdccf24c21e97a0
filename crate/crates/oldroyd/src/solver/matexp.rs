//! Small dense complex matrices and their exponentials, used for the
//! per-mode linear propagators of the stepper.
//!
//! This is the stepper-side implementation (scaling-and-squaring with a
//! converged Taylor series).  The oracle in `solver::oracle` carries its own
//! independent Pade implementation on nalgebra; the two are cross-checked by
//! the acceptance suite.

use num_complex::Complex64;

/// Row-major n x n complex matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct CMat {
    pub n: usize,
    pub data: Vec<Complex64>,
}

impl CMat {
    pub fn zeros(n: usize) -> Self {
        CMat { n, data: vec![Complex64::new(0.0, 0.0); n * n] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = CMat::zeros(n);
        for i in 0..n {
            m.data[i * n + i] = Complex64::new(1.0, 0.0);
        }
        m
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> Complex64 {
        self.data[i * self.n + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: Complex64) {
        self.data[i * self.n + j] = v;
    }

    pub fn scale(&mut self, c: f64) {
        for z in &mut self.data {
            *z *= c;
        }
    }

    pub fn matmul(&self, other: &CMat) -> CMat {
        debug_assert_eq!(self.n, other.n);
        let n = self.n;
        let mut out = CMat::zeros(n);
        for i in 0..n {
            for p in 0..n {
                let a = self.data[i * n + p];
                if a == Complex64::new(0.0, 0.0) {
                    continue;
                }
                for j in 0..n {
                    out.data[i * n + j] += a * other.data[p * n + j];
                }
            }
        }
        out
    }

    pub fn matvec(&self, x: &[Complex64], out: &mut [Complex64]) {
        let n = self.n;
        debug_assert_eq!(x.len(), n);
        debug_assert_eq!(out.len(), n);
        for i in 0..n {
            let mut s = Complex64::new(0.0, 0.0);
            let row = &self.data[i * n..(i + 1) * n];
            for (a, b) in row.iter().zip(x) {
                s += a * b;
            }
            out[i] = s;
        }
    }

    /// Maximum absolute row sum.
    pub fn inf_norm(&self) -> f64 {
        let n = self.n;
        (0..n)
            .map(|i| self.data[i * n..(i + 1) * n].iter().map(|z| z.norm()).sum::<f64>())
            .fold(0.0, f64::max)
    }

    /// Matrix exponential by scaling-and-squaring with a converged Taylor
    /// series on the scaled matrix.
    pub fn expm(&self) -> CMat {
        let n = self.n;
        let norm = self.inf_norm();
        let s = if norm > 0.25 { (norm / 0.25).log2().ceil() as u32 } else { 0 };
        let mut b = self.clone();
        b.scale(0.5f64.powi(s as i32));

        // Taylor on the scaled matrix; terms decay geometrically since |B| <= 1/4.
        let mut result = CMat::identity(n);
        let mut term = CMat::identity(n);
        for m in 1..=32usize {
            term = term.matmul(&b);
            term.scale(1.0 / m as f64);
            for (r, t) in result.data.iter_mut().zip(&term.data) {
                *r += t;
            }
            if term.inf_norm() <= 1e-20 * result.inf_norm().max(1.0) {
                break;
            }
        }
        for _ in 0..s {
            result = result.matmul(&result);
        }
        result
    }
}
