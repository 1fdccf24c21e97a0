//! Independent closed-form reference for the linear (single-mode) regime.
//!
//! With advection and the objective map switched off, each Fourier mode of
//! the coupled (u, tau) system evolves autonomously under a small constant
//! matrix; the exact solution is a matrix exponential.  This module
//! assembles that operator from scratch and exponentiates it with nalgebra's
//! Pade implementation, sharing no numerical code with the stepper, so the
//! two can be cross-checked against each other.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::constitutive::FluidParams;
use crate::spectral::{sym_index, sym_pairs, Grid};

/// Linear evolution operator of the mode `idx` acting on the state
/// [u_0..u_{d-1}, tau_0..tau_{nc-1}].
pub fn mode_operator(grid: Grid, idx: usize, params: &FluidParams) -> DMatrix<Complex64> {
    let dims = grid.dims();
    let nc = dims * (dims + 1) / 2;
    let nm = dims + nc;
    let k = grid.wavevector(idx);
    let ksq = grid.k_squared(idx);
    let re = params.reynolds;
    let om = params.omega;
    let eps = params.epsilon;
    let i = Complex64::new(0.0, 1.0);
    let zero = Complex64::new(0.0, 0.0);

    let mut a = DMatrix::from_element(nm, nm, zero);
    for m in 0..dims {
        a[(m, m)] = Complex64::new(-(1.0 - om) * ksq / re, 0.0);
    }
    for c in 0..nc {
        a[(dims + c, dims + c)] = Complex64::new(-1.0 / eps, 0.0);
    }
    if ksq > 0.0 {
        // Leray projector on the mode
        let mut proj = DMatrix::from_element(dims, dims, zero);
        for m in 0..dims {
            for n in 0..dims {
                let delta = if m == n { 1.0 } else { 0.0 };
                proj[(m, n)] = Complex64::new(delta - (k[m] * k[n]) as f64 / ksq, 0.0);
            }
        }
        // (div tau)_m = sum_n i k_n tau_{mn}
        let mut div = DMatrix::from_element(dims, nc, zero);
        for m in 0..dims {
            for n in 0..dims {
                div[(m, sym_index(dims, m, n))] += i * k[n] as f64;
            }
        }
        let coup = proj * div / Complex64::new(re, 0.0);
        for m in 0..dims {
            for c in 0..nc {
                a[(m, dims + c)] = coup[(m, c)];
            }
        }
        // 2 omega D[u] / eps with D_{pq} = (i/2)(k_q u_p + k_p u_q)
        for (c, &(p, q)) in sym_pairs(dims).iter().enumerate() {
            a[(dims + c, p)] += i * Complex64::new(om / eps * k[q] as f64, 0.0);
            a[(dims + c, q)] += i * Complex64::new(om / eps * k[p] as f64, 0.0);
        }
    }
    a
}

/// Exact state of mode `idx` at time `t` from initial data `(u0, tau0)` and
/// an optional constant forcing on the state vector.
pub fn linear_mode_solution(
    grid: Grid,
    idx: usize,
    params: &FluidParams,
    u0: &[Complex64],
    tau0: &[Complex64],
    force: Option<&[Complex64]>,
    t: f64,
) -> (Vec<Complex64>, Vec<Complex64>) {
    let dims = grid.dims();
    let nc = dims * (dims + 1) / 2;
    let nm = dims + nc;
    assert_eq!(u0.len(), dims);
    assert_eq!(tau0.len(), nc);
    let a = mode_operator(grid, idx, params);
    let x0 = DVector::from_iterator(nm, u0.iter().chain(tau0.iter()).copied());

    let x = match force {
        None => ((a * Complex64::new(t, 0.0)).exp()) * x0,
        Some(b) => {
            assert_eq!(b.len(), nm);
            // exp([[tA, t b],[0, 0]]) = [[e^{tA}, int_0^t e^{sA} b ds],[0, 1]]
            let zero = Complex64::new(0.0, 0.0);
            let mut aug = DMatrix::from_element(nm + 1, nm + 1, zero);
            for r in 0..nm {
                for c in 0..nm {
                    aug[(r, c)] = a[(r, c)] * t;
                }
                aug[(r, nm)] = b[r] * t;
            }
            let e = aug.exp();
            let mut x = DVector::from_element(nm, zero);
            for r in 0..nm {
                let mut s = e[(r, nm)];
                for c in 0..nm {
                    s += e[(r, c)] * x0[c];
                }
                x[r] = s;
            }
            x
        }
    };
    (x.as_slice()[..dims].to_vec(), x.as_slice()[dims..].to_vec())
}
