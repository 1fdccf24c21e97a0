//! Trajectory integration: snapshot scheduling, step-size policy, blow-up
//! detection, and in-loop accumulation of the stiff time integrals.
//!
//! Snapshots sit on a fixed stride; each stride is subdivided into a
//! power-of-two number of micro-steps so that snapshot times are exact and
//! runs with different accuracy settings stay aligned.  Integrands that live
//! on the relaxation scale (anything involving tau or Z) are accumulated by
//! trapezoid on the micro-step grid: on the snapshot grid alone the O(eps)
//! initial layer would be invisible and the integral badly overestimated.

use crate::analysis::{besov_norm, sobolev_grad_norm, sobolev_norm, BlockSet, NormSeries};
use crate::constitutive::{elastic_defect, FlowState};
use crate::error::{Error, Result};
use crate::solver::scheme::{NewtonianState, NewtonianStepper, OldroydStepper};
use crate::spectral::{split_frequencies, to_physical, LPFamily, SpectralField};

/// Growth factor of the state norm (relative to the initial norm) beyond
/// which a run is declared blown up.
const BLOWUP_FACTOR: f64 = 1e8;

/// Which stiff integrals to accumulate along the run.
#[derive(Debug, Clone, PartialEq)]
pub struct QuadratureLayout {
    /// Sobolev indices s; per index the run tracks int ||Z||^2_{H^{s-1}},
    /// int ||Q_eps tau||^2_{H^s}, int ||P_eps tau||^2_{H^s}.
    pub sobolev_indices: Vec<f64>,
    /// Besov indices s; per index the run tracks int ||tau||_{B^s} over the
    /// high and low-mid block sets and int ||Z||_{B^{s-2}_J}, ||Z||_{B^s_I},
    /// ||Z||_{B^s}.
    pub besov_indices: Vec<f64>,
    /// Frequency threshold eps^{-alpha} separating resolved and relaxed
    /// scales.
    pub cutoff: f64,
}

impl QuadratureLayout {
    fn width(&self) -> usize {
        3 * self.sobolev_indices.len() + 5 * self.besov_indices.len() + 2
    }
}

/// Accumulated integrals, sampled at each snapshot time.
#[derive(Debug, Clone, PartialEq)]
pub struct QuadratureTrack {
    pub layout: QuadratureLayout,
    /// samples[i] holds the flat accumulator at snapshot i.
    samples: Vec<Vec<f64>>,
}

impl QuadratureTrack {
    /// Rebuild a track from raw accumulator samples (one row per snapshot),
    /// as stored in checkpoints.
    pub fn from_samples(layout: QuadratureLayout, samples: Vec<Vec<f64>>) -> Result<Self> {
        let width = layout.width();
        if let Some(bad) = samples.iter().find(|row| row.len() != width) {
            return Err(Error::SizeMismatch { expected: width, got: bad.len() });
        }
        Ok(QuadratureTrack { layout, samples })
    }

    pub fn samples(&self) -> &[Vec<f64>] {
        &self.samples
    }

    fn at(&self, snap: usize, offset: usize) -> f64 {
        self.samples[snap][offset]
    }

    /// int_0^{t_snap} ||Z||^2_{H^{s-1}} dt.
    pub fn z_sobolev_sq(&self, snap: usize, si: usize) -> f64 {
        self.at(snap, si)
    }

    /// int_0^{t_snap} ||Q_eps tau||^2_{H^s} dt.
    pub fn q_tau_sq(&self, snap: usize, si: usize) -> f64 {
        self.at(snap, self.layout.sobolev_indices.len() + si)
    }

    /// int_0^{t_snap} ||P_eps tau||^2_{H^s} dt.
    pub fn p_tau_sq(&self, snap: usize, si: usize) -> f64 {
        self.at(snap, 2 * self.layout.sobolev_indices.len() + si)
    }

    /// int_0^{t_snap} ||tau||_{B^s_{K_eps}} dt.
    pub fn tau_besov_high(&self, snap: usize, bi: usize) -> f64 {
        self.at(snap, 3 * self.layout.sobolev_indices.len() + bi)
    }

    /// int_0^{t_snap} ||tau||_{B^s_{I u J_eps}} dt.
    pub fn tau_besov_lowmid(&self, snap: usize, bi: usize) -> f64 {
        let ns = self.layout.sobolev_indices.len();
        self.at(snap, 3 * ns + self.layout.besov_indices.len() + bi)
    }

    /// int_0^{t_snap} ||Z||_{B^{s-2}_{J_eps}} dt.
    pub fn z_besov_mid(&self, snap: usize, bi: usize) -> f64 {
        let ns = self.layout.sobolev_indices.len();
        self.at(snap, 3 * ns + 2 * self.layout.besov_indices.len() + bi)
    }

    /// int_0^{t_snap} ||Z||_{B^s_I} dt.
    pub fn z_besov_low(&self, snap: usize, bi: usize) -> f64 {
        let ns = self.layout.sobolev_indices.len();
        self.at(snap, 3 * ns + 3 * self.layout.besov_indices.len() + bi)
    }

    /// int_0^{t_snap} ||Z||_{B^s} dt over all blocks.
    pub fn z_besov_all(&self, snap: usize, bi: usize) -> f64 {
        let ns = self.layout.sobolev_indices.len();
        self.at(snap, 3 * ns + 4 * self.layout.besov_indices.len() + bi)
    }

    /// int_0^{t_snap} ||tau||^2_{L2} dt.
    pub fn tau_l2_sq(&self, snap: usize) -> f64 {
        let ns = self.layout.sobolev_indices.len();
        self.at(snap, 3 * ns + 5 * self.layout.besov_indices.len())
    }

    /// int_0^{t_snap} ||grad u||^2_{L2} dt.
    pub fn grad_u_l2_sq(&self, snap: usize) -> f64 {
        let ns = self.layout.sobolev_indices.len();
        self.at(snap, 3 * ns + 5 * self.layout.besov_indices.len() + 1)
    }
}

struct Accumulator {
    layout: QuadratureLayout,
    family: LPFamily,
    omega: f64,
    acc: Vec<f64>,
    prev: Vec<f64>,
    /// ||Z||_{L2} sampled on the micro-step grid (dense enough to resolve
    /// the initial layer, unlike the snapshot grid).
    z_l2: NormSeries,
}

impl Accumulator {
    fn new(layout: QuadratureLayout, omega: f64, state: &FlowState) -> Result<Self> {
        let family = LPFamily::for_grid(&state.u_hat.grid());
        let mut a = Accumulator {
            acc: vec![0.0; layout.width()],
            prev: Vec::new(),
            layout,
            family,
            omega,
            z_l2: NormSeries::new(),
        };
        a.prev = a.integrand(state)?;
        Ok(a)
    }

    fn integrand(&mut self, state: &FlowState) -> Result<Vec<f64>> {
        let z = elastic_defect(state, self.omega);
        self.z_l2.push(state.t, z.l2_norm());
        let (p_tau, q_tau) = split_frequencies(&state.tau_hat, self.layout.cutoff);
        let cutoff = self.layout.cutoff;
        let mut out = Vec::with_capacity(self.layout.width());
        for &s in &self.layout.sobolev_indices {
            out.push(sobolev_norm(&z, s - 1.0).powi(2));
        }
        for &s in &self.layout.sobolev_indices {
            out.push(sobolev_norm(&q_tau, s).powi(2));
        }
        for &s in &self.layout.sobolev_indices {
            out.push(sobolev_norm(&p_tau, s).powi(2));
        }
        for &s in &self.layout.besov_indices {
            out.push(besov_norm(&state.tau_hat, s, BlockSet::High { cutoff }, &self.family));
        }
        for &s in &self.layout.besov_indices {
            out.push(besov_norm(&state.tau_hat, s, BlockSet::LowMid { cutoff }, &self.family));
        }
        for &s in &self.layout.besov_indices {
            out.push(besov_norm(&z, s - 2.0, BlockSet::Mid { cutoff }, &self.family));
        }
        for &s in &self.layout.besov_indices {
            out.push(besov_norm(&z, s, BlockSet::Low, &self.family));
        }
        for &s in &self.layout.besov_indices {
            out.push(besov_norm(&z, s, BlockSet::All, &self.family));
        }
        out.push(state.tau_hat.l2_norm().powi(2));
        out.push(sobolev_grad_norm(&state.u_hat, 0.0).powi(2));
        Ok(out)
    }

    fn advance(&mut self, state: &FlowState, dt: f64) -> Result<()> {
        let cur = self.integrand(state)?;
        for ((a, p), c) in self.acc.iter_mut().zip(&self.prev).zip(&cur) {
            *a += 0.5 * dt * (p + c);
        }
        self.prev = cur;
        Ok(())
    }
}

/// Run schedule and accuracy policy.
#[derive(Debug, Clone, PartialEq)]
pub struct RunSettings {
    /// Final time T0 (>= 0).
    pub horizon: f64,
    /// Spacing of stored snapshots; micro-steps subdivide it by powers of
    /// two.
    pub snapshot_stride: f64,
    /// Stiff integrals to accumulate on the micro-step grid; None skips the
    /// extra per-step norms entirely.
    pub quadratures: Option<QuadratureLayout>,
}

impl RunSettings {
    fn validate(&self) -> Result<()> {
        if !(self.horizon >= 0.0) {
            return Err(Error::InvalidParameter(format!(
                "horizon must be >= 0, got {}",
                self.horizon
            )));
        }
        if !(self.snapshot_stride > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "snapshot stride must be > 0, got {}",
                self.snapshot_stride
            )));
        }
        Ok(())
    }

    fn snapshot_times(&self) -> Vec<f64> {
        let mut times = vec![0.0];
        let mut i = 1usize;
        loop {
            let t = i as f64 * self.snapshot_stride;
            if t >= self.horizon - 1e-12 * self.snapshot_stride {
                break;
            }
            times.push(t);
            i += 1;
        }
        if self.horizon > 0.0 {
            times.push(self.horizon);
        }
        times
    }
}

/// Smallest power-of-two subdivision of `stride` whose step does not exceed
/// `target`.
fn substeps(stride: f64, target: f64) -> u32 {
    let mut n = 1u32;
    while stride / n as f64 > target && n < 1 << 24 {
        n *= 2;
    }
    n
}

fn max_velocity(u_hat: &SpectralField) -> f64 {
    let phys = to_physical(u_hat);
    phys.data.iter().fold(0.0f64, |a, &b| a.max(b.abs()))
}

/// Step target from the accuracy cap and the advective CFL bound.
fn dt_target(m: usize, u_max: f64) -> f64 {
    let accuracy = 1e-3 * 32.0 / m as f64;
    let dx = 2.0 * std::f64::consts::PI / m as f64;
    let cfl = 0.5 * dx / u_max.max(1e-12);
    accuracy.min(cfl)
}

/// A completed (or blown-up) Oldroyd-B run.
#[derive(Debug, Clone)]
pub struct Trajectory {
    pub times: Vec<f64>,
    pub states: Vec<FlowState>,
    pub quadratures: Option<QuadratureTrack>,
    /// ||Z||_{L2} on the micro-step grid (present on tracked runs).
    pub z_l2_series: Option<NormSeries>,
    /// Set if the run terminated early; snapshots up to the last good time
    /// are retained.
    pub blowup: Option<f64>,
    /// Total micro-steps taken.
    pub steps: u64,
}

impl Trajectory {
    /// Verify this run and a reference share the same snapshot times.
    pub fn check_aligned(&self, other_times: &[f64]) -> Result<()> {
        if self.times.len() != other_times.len() {
            return Err(Error::SizeMismatch {
                expected: self.times.len(),
                got: other_times.len(),
            });
        }
        for (i, (&a, &b)) in self.times.iter().zip(other_times).enumerate() {
            if (a - b).abs() > 1e-10 {
                return Err(Error::MisalignedTrajectories { index: i, a, b });
            }
        }
        Ok(())
    }
}

/// A completed Navier-Stokes reference run.
#[derive(Debug, Clone)]
pub struct RefTrajectory {
    pub times: Vec<f64>,
    pub states: Vec<NewtonianState>,
    pub blowup: Option<f64>,
    pub steps: u64,
}

/// Integrate the Oldroyd-B system from `initial` to the horizon.
///
/// The step size per stride obeys the accuracy and CFL targets, and while
/// t < 6 eps it is additionally refined to eps/10 to resolve the initial
/// relaxation layer.
pub fn run_oldroyd(
    stepper: &mut OldroydStepper,
    initial: FlowState,
    settings: &RunSettings,
) -> Result<Trajectory> {
    settings.validate()?;
    let eps = stepper.params().epsilon;
    let omega = stepper.params().omega;
    let stride = settings.snapshot_stride;
    let schedule = settings.snapshot_times();

    let norm0 = initial.u_hat.l2_norm() + initial.tau_hat.l2_norm();
    let guard = BLOWUP_FACTOR * (norm0 + 1.0);

    let mut acc = match &settings.quadratures {
        Some(layout) => Some(Accumulator::new(layout.clone(), omega, &initial)?),
        None => None,
    };
    let mut quad_samples: Vec<Vec<f64>> = Vec::new();
    if let Some(a) = &acc {
        quad_samples.push(a.acc.clone());
    }

    let mut state = initial;
    let mut times = vec![0.0];
    let mut states = vec![state.clone()];
    let mut blowup = None;
    let mut steps = 0u64;

    'outer: for pair in schedule.windows(2) {
        let (t0, t1) = (pair[0], pair[1]);
        let span = t1 - t0;
        let u_max = max_velocity(&state.u_hat);
        let mut target = dt_target(state.u_hat.grid().m(), u_max);
        if t0 < 6.0 * eps {
            target = target.min(eps / 10.0);
        }
        // keep micro-steps commensurate with the stride even on a short
        // final interval
        let n = substeps(stride, target).max(substeps(stride, span));
        let dt = stride / n as f64;
        let count = (span / dt).round() as u64;
        for _ in 0..count {
            state = match stepper.step(&state, dt) {
                Ok(s) => s,
                Err(Error::BlowUp { t }) => {
                    blowup = Some(t);
                    break 'outer;
                }
                Err(e) => return Err(e),
            };
            steps += 1;
            if let Some(a) = &mut acc {
                a.advance(&state, dt)?;
            }
            let norm = state.u_hat.l2_norm() + state.tau_hat.l2_norm();
            if !norm.is_finite() || norm > guard {
                blowup = Some(state.t);
                break 'outer;
            }
        }
        times.push(state.t);
        states.push(state.clone());
        if let Some(a) = &acc {
            quad_samples.push(a.acc.clone());
        }
    }

    let (quadratures, z_l2_series) = match acc {
        Some(a) => (
            Some(QuadratureTrack { layout: a.layout, samples: quad_samples }),
            Some(a.z_l2),
        ),
        None => (None, None),
    };
    Ok(Trajectory { times, states, quadratures, z_l2_series, blowup, steps })
}

/// Integrate the Navier-Stokes reference from `initial` to the horizon on
/// the same snapshot schedule.
pub fn run_newtonian(
    stepper: &mut NewtonianStepper,
    initial: NewtonianState,
    settings: &RunSettings,
) -> Result<RefTrajectory> {
    settings.validate()?;
    let stride = settings.snapshot_stride;
    let schedule = settings.snapshot_times();

    let norm0 = initial.u_hat.l2_norm();
    let guard = BLOWUP_FACTOR * (norm0 + 1.0);

    let mut state = initial;
    let mut times = vec![0.0];
    let mut states = vec![state.clone()];
    let mut blowup = None;
    let mut steps = 0u64;

    'outer: for pair in schedule.windows(2) {
        let (_, t1) = (pair[0], pair[1]);
        let span = t1 - state.t;
        let u_max = max_velocity(&state.u_hat);
        let target = dt_target(state.u_hat.grid().m(), u_max);
        let n = substeps(stride, target).max(substeps(stride, span));
        let dt = stride / n as f64;
        let count = (span / dt).round() as u64;
        for _ in 0..count {
            state = match stepper.step(&state, dt) {
                Ok(s) => s,
                Err(Error::BlowUp { t }) => {
                    blowup = Some(t);
                    break 'outer;
                }
                Err(e) => return Err(e),
            };
            steps += 1;
            let norm = state.u_hat.l2_norm();
            if !norm.is_finite() || norm > guard {
                blowup = Some(state.t);
                break 'outer;
            }
        }
        times.push(state.t);
        states.push(state.clone());
    }

    Ok(RefTrajectory { times, states, blowup, steps })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::constitutive::{Forcing, FluidParams, Regime};
    use crate::solver::scheme::SchemeOptions;
    use crate::spectral::{to_spectral, Grid, PhysicalField, Rank};
    use num_complex::Complex64 as C;

    fn params(eps: f64, omega: f64) -> FluidParams {
        FluidParams {
            reynolds: 1.0,
            epsilon: eps,
            omega,
            slip: 0.0,
            regime: Regime::Sobolev { delta: 0.1 },
            forcing: Forcing::Zero,
        }
    }

    fn single_mode_state(grid: Grid) -> FlowState {
        let u = PhysicalField::from_fn(grid, Rank::Vector, |c, x| {
            if c == 1 {
                x[0].cos()
            } else {
                0.0
            }
        });
        FlowState::new(0.0, to_spectral(&u).unwrap(), SpectralField::zeros(grid, Rank::SymTensor))
            .unwrap()
    }

    #[test]
    fn zero_horizon_returns_initial_snapshot() {
        let grid = Grid::new(2, 8).unwrap();
        let mut st =
            OldroydStepper::new(grid, params(0.1, 0.5), SchemeOptions::default(), None).unwrap();
        let settings =
            RunSettings { horizon: 0.0, snapshot_stride: 0.1, quadratures: None };
        let traj = run_oldroyd(&mut st, single_mode_state(grid), &settings).unwrap();
        assert_eq!(traj.times, vec![0.0]);
        assert_eq!(traj.states.len(), 1);
        assert_eq!(traj.steps, 0);
        assert!(traj.blowup.is_none());
    }

    #[test]
    fn snapshots_land_on_the_stride() {
        let grid = Grid::new(2, 8).unwrap();
        let mut st =
            OldroydStepper::new(grid, params(0.1, 0.5), SchemeOptions::default(), None).unwrap();
        let settings =
            RunSettings { horizon: 0.25, snapshot_stride: 0.1, quadratures: None };
        let traj = run_oldroyd(&mut st, single_mode_state(grid), &settings).unwrap();
        let expect = [0.0, 0.1, 0.2, 0.25];
        assert_eq!(traj.times.len(), expect.len());
        for (&a, &b) in traj.times.iter().zip(&expect) {
            assert!((a - b).abs() < 1e-12, "snapshot at {a}, expected {b}");
        }
    }

    #[test]
    fn quadrature_matches_closed_form_on_frozen_velocity() {
        // frozen velocity: Z(t) = Z0 e^{-t/eps}, so
        // int_0^T ||Z||^2 dt = (eps/2)(1 - e^{-2T/eps}) ||Z0||^2
        let grid = Grid::new(2, 16).unwrap();
        let eps = 1e-2;
        let omega = 0.5;
        let opts = SchemeOptions { frozen_velocity: true, ..Default::default() };
        let mut st = OldroydStepper::new(grid, params(eps, omega), opts, None).unwrap();
        let initial = single_mode_state(grid);
        let z0 = crate::constitutive::elastic_defect(&initial, omega);
        let layout = QuadratureLayout {
            sobolev_indices: vec![1.0],
            besov_indices: vec![],
            cutoff: 4.0,
        };
        let horizon = 0.1;
        let settings =
            RunSettings { horizon, snapshot_stride: 0.05, quadratures: Some(layout) };
        let traj = run_oldroyd(&mut st, initial, &settings).unwrap();
        let q = traj.quadratures.as_ref().unwrap();
        let got = q.z_sobolev_sq(traj.times.len() - 1, 0);
        // s - 1 = 0, and Z0 lives at |k| = 1 so H^0 = L2 on the defect
        let expect = eps / 2.0 * (1.0 - (-2.0 * horizon / eps).exp()) * z0.l2_norm().powi(2);
        // trapezoid on the micro-step grid: O((dt/eps)^2) relative error
        let rel = (got - expect).abs() / expect;
        assert!(rel < 5e-3, "quadrature relative error {rel}");
    }

    #[test]
    fn forcing_blowup_is_flagged_not_fatal() {
        let grid = Grid::new(2, 8).unwrap();
        let mut f = SpectralField::zeros(grid, Rank::Vector);
        // transverse forcing at k = (1,0) with huge amplitude
        let idx = grid.index_of(&[1, 0]);
        let idx2 = grid.index_of(&[-1, 0]);
        f.set(1, idx, C::new(5e11, 0.0));
        f.set(1, idx2, C::new(5e11, 0.0));
        let mut st =
            OldroydStepper::new(grid, params(0.1, 0.5), SchemeOptions::default(), Some(f))
                .unwrap();
        let settings =
            RunSettings { horizon: 1.0, snapshot_stride: 0.1, quadratures: None };
        let traj = run_oldroyd(&mut st, single_mode_state(grid), &settings).unwrap();
        assert!(traj.blowup.is_some(), "expected blow-up flag");
        assert!(traj.times.len() < 12, "run should have stopped early");
    }

    #[test]
    fn newtonian_and_oldroyd_schedules_align() {
        let grid = Grid::new(2, 8).unwrap();
        let mut ns = NewtonianStepper::new(grid, 1.0, true, None).unwrap();
        let mut os =
            OldroydStepper::new(grid, params(0.05, 0.5), SchemeOptions::default(), None).unwrap();
        let settings =
            RunSettings { horizon: 0.3, snapshot_stride: 0.1, quadratures: None };
        let initial = single_mode_state(grid);
        let nt = run_newtonian(
            &mut ns,
            NewtonianState { t: 0.0, u_hat: initial.u_hat.clone() },
            &settings,
        )
        .unwrap();
        let ot = run_oldroyd(&mut os, initial, &settings).unwrap();
        ot.check_aligned(&nt.times).unwrap();
    }
}
