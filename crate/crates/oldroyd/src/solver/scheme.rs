//! Relaxation-robust exponential time stepping for the Oldroyd-B system and
//! the Navier-Stokes reference solver.
//!
//! The full per-mode linear block (viscous decay, 1/eps relaxation, and the
//! div tau / 2 omega D[u] coupling) is propagated exactly through a
//! precomputed matrix exponential; only advection, the objective map g, and
//! forcing are explicit, integrated against the exponential kernels by a
//! second-order midpoint rule:
//!
//!   x*      = E(h/2) x_n + (h/2) phi1(A h/2) N(x_n)
//!   x_{n+1} = E(h)   x_n +  h    phi1(A h)   N(x*)
//!
//! Both stiff factors are exact, so the admissible step size is independent
//! of eps, and as eps -> 0 at fixed dt the stress relaxes onto 2 omega D[u]
//! to O(dt^2) on frozen velocity.

use std::collections::HashMap;

use num_complex::Complex64;

use crate::constitutive::{advect, objective_bilinear, rate_of_strain, FlowState, FluidParams};
use crate::error::{Error, Result};
use crate::solver::matexp::CMat;
use crate::spectral::{
    leray_project_inplace, sym_pairs, zero_mean, FftWorkspace, Grid, Rank, SpectralField,
};

/// phi1(z) = (e^z - 1)/z, Taylor-expanded near zero to avoid cancellation.
pub fn phi1(z: f64) -> f64 {
    if z.abs() < 1e-4 {
        1.0 + z / 2.0 + z * z / 6.0 + z * z * z / 24.0
    } else {
        (z.exp() - 1.0) / z
    }
}

/// Which right-hand-side terms the stepper evaluates.  The disable switches
/// are test hooks for the linear-regime cross-checks.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SchemeOptions {
    /// (u.grad)u and (u.grad)tau.
    pub advection: bool,
    /// The objective bilinear map g(grad u, tau).
    pub objective: bool,
    /// Two-way linear coupling: div tau in momentum, 2 omega D[u] in stress.
    pub coupling: bool,
    /// Hold the velocity fixed and advance only the stress relaxation.
    pub frozen_velocity: bool,
}

impl Default for SchemeOptions {
    fn default() -> Self {
        SchemeOptions { advection: true, objective: true, coupling: true, frozen_velocity: false }
    }
}

struct ModeSlot {
    idx: usize,
    /// E(h/2) on the per-mode state [u_0..u_{d-1}, tau_0..tau_{nc-1}].
    e2: CMat,
    /// (h/2) phi1(A h/2).
    p2: CMat,
}

struct PropTable {
    slots: Vec<ModeSlot>,
}

/// Assemble the per-mode linear operator A(k) of the coupled (u, tau) block.
fn mode_matrix(grid: Grid, idx: usize, params: &FluidParams, coupling: bool) -> CMat {
    let dims = grid.dims();
    let nc = dims * (dims + 1) / 2;
    let nm = dims + nc;
    let k = grid.wavevector(idx);
    let ksq = grid.k_squared(idx);
    let re = params.reynolds;
    let om = params.omega;
    let eps = params.epsilon;
    let i = Complex64::new(0.0, 1.0);

    let mut a = CMat::zeros(nm);
    // viscous decay of u
    for m in 0..dims {
        a.set(m, m, Complex64::new(-(1.0 - om) * ksq / re, 0.0));
    }
    // stress relaxation
    for c in 0..nc {
        a.set(dims + c, dims + c, Complex64::new(-1.0 / eps, 0.0));
    }
    if coupling && ksq > 0.0 {
        // momentum: + P_k (div tau) / Re; (div tau)_m = sum_n i k_n tau_{(m,n)}
        let mut c_raw = vec![Complex64::new(0.0, 0.0); dims * nc];
        for m in 0..dims {
            for (c, &(p, q)) in sym_pairs(dims).iter().enumerate() {
                if p == m {
                    c_raw[m * nc + c] += i * k[q] as f64;
                }
                if q == m && p != q {
                    c_raw[m * nc + c] += i * k[p] as f64;
                }
            }
        }
        // project rows with P = I - k k^T / |k|^2
        for m in 0..dims {
            for c in 0..nc {
                let mut s = c_raw[m * nc + c];
                for p in 0..dims {
                    s -= (k[m] * k[p]) as f64 / ksq * c_raw[p * nc + c];
                }
                a.set(m, dims + c, s / re);
            }
        }
        // stress: + 2 omega D[u] / eps; D_{(p,q)} = (i/2)(k_q u_p + k_p u_q)
        for (c, &(p, q)) in sym_pairs(dims).iter().enumerate() {
            let half = i * Complex64::new(om / eps, 0.0);
            let mut row = vec![Complex64::new(0.0, 0.0); dims];
            row[p] += half * k[q] as f64;
            row[q] += half * k[p] as f64;
            for (m, v) in row.into_iter().enumerate() {
                let prev = a.get(dims + c, m);
                a.set(dims + c, m, prev + v);
            }
        }
    }
    a
}

/// Exact half-step propagator pair (E(h/2), (h/2) phi1(A h/2)) via the
/// augmented-matrix exponential.
fn propagator_pair(a: &CMat, h2: f64) -> (CMat, CMat) {
    let nm = a.n;
    let mut aug = CMat::zeros(2 * nm);
    for r in 0..nm {
        for c in 0..nm {
            aug.set(r, c, a.get(r, c) * h2);
        }
        aug.set(r, nm + r, Complex64::new(h2, 0.0));
    }
    let e = aug.expm();
    let mut e2 = CMat::zeros(nm);
    let mut p2 = CMat::zeros(nm);
    for r in 0..nm {
        for c in 0..nm {
            e2.set(r, c, e.get(r, c));
            p2.set(r, c, e.get(r, nm + c));
        }
    }
    (e2, p2)
}

fn build_table(grid: Grid, params: &FluidParams, coupling: bool, dt: f64) -> PropTable {
    let limit = grid.dealias_limit();
    let mut slots = Vec::new();
    for idx in 0..grid.n() {
        let k = grid.wavevector(idx);
        if (0..grid.dims()).any(|ax| k[ax].abs() > limit) {
            continue;
        }
        let a = mode_matrix(grid, idx, params, coupling);
        let (e2, p2) = propagator_pair(&a, dt / 2.0);
        slots.push(ModeSlot { idx, e2, p2 });
    }
    PropTable { slots }
}

/// Oldroyd-B stepper with cached per-mode propagators.
pub struct OldroydStepper {
    grid: Grid,
    params: FluidParams,
    opts: SchemeOptions,
    forcing_hat: Option<SpectralField>,
    ws: FftWorkspace,
    tables: HashMap<u64, PropTable>,
}

impl OldroydStepper {
    pub fn new(
        grid: Grid,
        params: FluidParams,
        opts: SchemeOptions,
        forcing_hat: Option<SpectralField>,
    ) -> Result<Self> {
        params.validate()?;
        if let Some(f) = &forcing_hat {
            f.expect_rank(Rank::Vector)?;
        }
        Ok(OldroydStepper {
            grid,
            params,
            opts,
            forcing_hat,
            ws: FftWorkspace::new(),
            tables: HashMap::new(),
        })
    }

    pub fn params(&self) -> &FluidParams {
        &self.params
    }

    pub fn options(&self) -> &SchemeOptions {
        &self.opts
    }

    fn table(&mut self, dt: f64) -> &PropTable {
        let key = dt.to_bits();
        if !self.tables.contains_key(&key) {
            if self.tables.len() > 8 {
                self.tables.clear();
            }
            let t = build_table(self.grid, &self.params, self.opts.coupling, dt);
            self.tables.insert(key, t);
        }
        &self.tables[&key]
    }

    /// Explicit right-hand side terms (everything outside the linear block).
    fn nonlinear(
        &mut self,
        u: &SpectralField,
        tau: &SpectralField,
    ) -> Result<(SpectralField, SpectralField)> {
        let mut nu = SpectralField::zeros(self.grid, Rank::Vector);
        if self.opts.advection {
            nu.axpy(-1.0, &advect(u, u, &mut self.ws)?);
        }
        if let Some(f) = &self.forcing_hat {
            nu.axpy(1.0 / self.params.reynolds, f);
        }
        leray_project_inplace(&mut nu);
        zero_mean(&mut nu);

        let mut ntau = SpectralField::zeros(self.grid, Rank::SymTensor);
        if self.opts.advection {
            ntau.axpy(-1.0, &advect(u, tau, &mut self.ws)?);
        }
        if self.opts.objective {
            ntau.axpy(-1.0, &objective_bilinear(u, tau, self.params.slip, &mut self.ws)?);
        }
        Ok((nu, ntau))
    }

    /// One second-order exponential-midpoint step.
    pub fn step(&mut self, state: &FlowState, dt: f64) -> Result<FlowState> {
        assert!(dt > 0.0, "dt must be positive");
        if self.opts.frozen_velocity {
            return self.frozen_step(state, dt);
        }
        let (nu, ntau) = self.nonlinear(&state.u_hat, &state.tau_hat)?;
        let (mut us, mut taus) = (state.u_hat.clone(), state.tau_hat.clone());
        self.apply_stage(dt, &state.u_hat, &state.tau_hat, &nu, &ntau, &mut us, &mut taus);
        leray_project_inplace(&mut us);
        zero_mean(&mut us);

        let (nus, ntaus) = self.nonlinear(&us, &taus)?;
        let (mut u1, mut tau1) = (state.u_hat.clone(), state.tau_hat.clone());
        self.apply_full(dt, &state.u_hat, &state.tau_hat, &nus, &ntaus, &mut u1, &mut tau1);
        leray_project_inplace(&mut u1);
        zero_mean(&mut u1);

        let t = state.t + dt;
        if !u1.is_finite() || !tau1.is_finite() {
            return Err(Error::BlowUp { t });
        }
        FlowState::new(t, u1, tau1)
    }

    /// x* = E(h/2) x + P2 N(x).
    #[allow(clippy::too_many_arguments)]
    fn apply_stage(
        &mut self,
        dt: f64,
        u: &SpectralField,
        tau: &SpectralField,
        nu: &SpectralField,
        ntau: &SpectralField,
        u_out: &mut SpectralField,
        tau_out: &mut SpectralField,
    ) {
        let dims = self.grid.dims();
        let nc = dims * (dims + 1) / 2;
        let nm = dims + nc;
        let mut x = vec![Complex64::new(0.0, 0.0); nm];
        let mut nvec = vec![Complex64::new(0.0, 0.0); nm];
        let mut y = vec![Complex64::new(0.0, 0.0); nm];
        let mut w = vec![Complex64::new(0.0, 0.0); nm];
        let table = {
            let _ = self.table(dt);
            self.tables.get(&dt.to_bits()).unwrap()
        };
        for slot in &table.slots {
            gather(u, tau, slot.idx, dims, nc, &mut x);
            gather(nu, ntau, slot.idx, dims, nc, &mut nvec);
            slot.e2.matvec(&x, &mut y);
            slot.p2.matvec(&nvec, &mut w);
            for i in 0..nm {
                y[i] += w[i];
            }
            scatter(u_out, tau_out, slot.idx, dims, nc, &y);
        }
    }

    /// x1 = E(h) x + h phi1(A h) N* = E2 (E2 x + w) + w with w = P2 N*.
    #[allow(clippy::too_many_arguments)]
    fn apply_full(
        &mut self,
        dt: f64,
        u: &SpectralField,
        tau: &SpectralField,
        nu: &SpectralField,
        ntau: &SpectralField,
        u_out: &mut SpectralField,
        tau_out: &mut SpectralField,
    ) {
        let dims = self.grid.dims();
        let nc = dims * (dims + 1) / 2;
        let nm = dims + nc;
        let mut x = vec![Complex64::new(0.0, 0.0); nm];
        let mut nvec = vec![Complex64::new(0.0, 0.0); nm];
        let mut y = vec![Complex64::new(0.0, 0.0); nm];
        let mut w = vec![Complex64::new(0.0, 0.0); nm];
        let mut z = vec![Complex64::new(0.0, 0.0); nm];
        let table = {
            let _ = self.table(dt);
            self.tables.get(&dt.to_bits()).unwrap()
        };
        for slot in &table.slots {
            gather(u, tau, slot.idx, dims, nc, &mut x);
            gather(nu, ntau, slot.idx, dims, nc, &mut nvec);
            slot.p2.matvec(&nvec, &mut w);
            slot.e2.matvec(&x, &mut y);
            for i in 0..nm {
                y[i] += w[i];
            }
            slot.e2.matvec(&y, &mut z);
            for i in 0..nm {
                z[i] += w[i];
            }
            scatter(u_out, tau_out, slot.idx, dims, nc, &z);
        }
    }

    /// Frozen-velocity hook: tau relaxes exactly toward 2 omega D[u] with u
    /// held fixed (Z then decays as e^{-t/eps} mode by mode).
    fn frozen_step(&mut self, state: &FlowState, dt: f64) -> Result<FlowState> {
        let om = self.params.omega;
        let eps = self.params.epsilon;
        let decay = (-dt / eps).exp();
        let target = rate_of_strain(&state.u_hat)?.scaled(2.0 * om);
        let mut tau1 = state.tau_hat.clone();
        tau1.scale(decay);
        tau1.axpy(1.0 - decay, &target);
        let t = state.t + dt;
        if !tau1.is_finite() {
            return Err(Error::BlowUp { t });
        }
        FlowState::new(t, state.u_hat.clone(), tau1)
    }
}

#[inline]
fn gather(
    u: &SpectralField,
    tau: &SpectralField,
    idx: usize,
    dims: usize,
    nc: usize,
    out: &mut [Complex64],
) {
    for m in 0..dims {
        out[m] = u.get(m, idx);
    }
    for c in 0..nc {
        out[dims + c] = tau.get(c, idx);
    }
}

#[inline]
fn scatter(
    u: &mut SpectralField,
    tau: &mut SpectralField,
    idx: usize,
    dims: usize,
    nc: usize,
    x: &[Complex64],
) {
    for m in 0..dims {
        u.set(m, idx, x[m]);
    }
    for c in 0..nc {
        tau.set(c, idx, x[dims + c]);
    }
}

/// Navier-Stokes reference state (no stress).
#[derive(Debug, Clone, PartialEq)]
pub struct NewtonianState {
    pub t: f64,
    pub u_hat: SpectralField,
}

/// Reference solver: same exponential-midpoint scheme with full viscosity 1
/// and no stress equation.
pub struct NewtonianStepper {
    grid: Grid,
    reynolds: f64,
    advection: bool,
    forcing_hat: Option<SpectralField>,
    ws: FftWorkspace,
    /// (e^{-|k|^2 h / (2 Re)}, (h/2) phi1) per mode, cached per dt.
    tables: HashMap<u64, Vec<(f64, f64)>>,
}

impl NewtonianStepper {
    pub fn new(
        grid: Grid,
        reynolds: f64,
        advection: bool,
        forcing_hat: Option<SpectralField>,
    ) -> Result<Self> {
        if !(reynolds > 0.0) {
            return Err(Error::InvalidParameter(format!("Re must be > 0, got {reynolds}")));
        }
        Ok(NewtonianStepper {
            grid,
            reynolds,
            advection,
            forcing_hat,
            ws: FftWorkspace::new(),
            tables: HashMap::new(),
        })
    }

    fn table(&mut self, dt: f64) -> &Vec<(f64, f64)> {
        let key = dt.to_bits();
        if !self.tables.contains_key(&key) {
            if self.tables.len() > 8 {
                self.tables.clear();
            }
            let re = self.reynolds;
            let grid = self.grid;
            let t: Vec<(f64, f64)> = (0..grid.n())
                .map(|idx| {
                    let z = -grid.k_squared(idx) * dt / (2.0 * re);
                    (z.exp(), dt / 2.0 * phi1(z))
                })
                .collect();
            self.tables.insert(key, t);
        }
        &self.tables[&key]
    }

    fn nonlinear(&mut self, u: &SpectralField) -> Result<SpectralField> {
        let mut nu = SpectralField::zeros(self.grid, Rank::Vector);
        if self.advection {
            nu.axpy(-1.0, &advect(u, u, &mut self.ws)?);
        }
        if let Some(f) = &self.forcing_hat {
            nu.axpy(1.0 / self.reynolds, f);
        }
        leray_project_inplace(&mut nu);
        zero_mean(&mut nu);
        Ok(nu)
    }

    pub fn step(&mut self, state: &NewtonianState, dt: f64) -> Result<NewtonianState> {
        assert!(dt > 0.0, "dt must be positive");
        let n0 = self.nonlinear(&state.u_hat)?;
        let grid = self.grid;
        let comps = state.u_hat.components();
        let mut us = state.u_hat.clone();
        {
            let table = self.table(dt);
            for c in 0..comps {
                for idx in 0..grid.n() {
                    let (e2, p2) = table[idx];
                    let v = e2 * state.u_hat.get(c, idx) + p2 * n0.get(c, idx);
                    us.set(c, idx, v);
                }
            }
        }
        leray_project_inplace(&mut us);
        zero_mean(&mut us);
        let ns = self.nonlinear(&us)?;
        let mut u1 = state.u_hat.clone();
        {
            let table = self.table(dt);
            for c in 0..comps {
                for idx in 0..grid.n() {
                    let (e2, p2) = table[idx];
                    let w = p2 * ns.get(c, idx);
                    let v = e2 * (e2 * state.u_hat.get(c, idx) + w) + w;
                    u1.set(c, idx, v);
                }
            }
        }
        leray_project_inplace(&mut u1);
        zero_mean(&mut u1);
        let t = state.t + dt;
        if !u1.is_finite() {
            return Err(Error::BlowUp { t });
        }
        Ok(NewtonianState { t, u_hat: u1 })
    }
}
