//! The Newtonian-limit experiment: one reference Navier-Stokes run, one
//! Oldroyd-B run per epsilon, and the convergence metrics comparing them.

use std::time::Instant;

use crate::analysis::{
    besov_norm, damping_rate, fit_rate, sobolev_norm, sobolev_x_series, besov_x_series,
    BlockSet, NormSeries, RateFit,
};
use crate::constitutive::{FlowState, Regime};
use crate::error::{Error, Result};
use crate::harness::config::ExperimentConfig;
use crate::harness::initial::{generate_initial_data, materialize_forcing};
use crate::solver::{
    run_newtonian, run_oldroyd, NewtonianState, NewtonianStepper, OldroydStepper,
    QuadratureLayout, RefTrajectory, RunSettings, SchemeOptions,
};
use crate::spectral::LPFamily;

/// Per-epsilon outcome of the sweep.
#[derive(Debug, Clone)]
pub struct SweepRow {
    pub epsilon: f64,
    pub omega: f64,
    /// sup_t of the velocity error norm (H^{s'} or B^{N/2-1}).
    pub u_error_sup: f64,
    /// ||Z||_{L2_t H^{s'}} (Sobolev) or ||Z||_{L1_t B^{N/2}} (Besov).
    pub z_norm: f64,
    /// sup_t eps^{1/2} ||tau|| in the regime norm.
    pub tau_sup_scaled: f64,
    /// X at the final time, at index s' (Sobolev) or N/2 (Besov).
    pub x_final: f64,
    /// Fitted initial-layer decay rate times eps, when the window resolves
    /// it and the defect actually decays.
    pub damping_rate_eps: Option<f64>,
    pub blowup: Option<f64>,
    pub wall_seconds: f64,
    pub steps: u64,
    /// Velocity error at each snapshot (for plot data).
    pub u_error_series: NormSeries,
    /// ||Z||_{L2} on the micro-step grid (for plot data).
    pub z_l2_series: NormSeries,
}

#[derive(Debug, Clone, Copy)]
pub struct MonotoneFlags {
    pub u_error: bool,
    pub z_norm: bool,
    pub tau_sup: bool,
}

#[derive(Debug, Clone, Copy)]
pub struct Slopes {
    pub u_error: Option<RateFit>,
    pub z_norm: Option<RateFit>,
    pub tau_sup: Option<RateFit>,
}

/// Result of a full sweep, rows ordered by epsilon descending.
#[derive(Debug, Clone)]
pub struct ConvergenceReport {
    pub config: ExperimentConfig,
    pub rows: Vec<SweepRow>,
    pub monotone: MonotoneFlags,
    pub slopes: Slopes,
    pub reference_steps: u64,
    /// Largest epsilon in the list that did not blow up (empirical eps_0
    /// lower bound); None if everything blew up.
    pub largest_stable_epsilon: Option<f64>,
}

fn quad_layout(cfg: &ExperimentConfig, epsilon: f64) -> QuadratureLayout {
    let cutoff = epsilon.powf(-cfg.split.alpha);
    match cfg.params.regime {
        Regime::Sobolev { .. } => QuadratureLayout {
            sobolev_indices: vec![cfg.norms.s, cfg.norms.s_prime, cfg.norms.s_prime + 1.0],
            besov_indices: vec![],
            cutoff,
        },
        Regime::Besov => {
            let half = cfg.grid.dims as f64 / 2.0;
            QuadratureLayout {
                sobolev_indices: vec![],
                besov_indices: vec![half],
                cutoff,
            }
        }
    }
}

fn run_settings(cfg: &ExperimentConfig, layout: Option<QuadratureLayout>) -> RunSettings {
    RunSettings {
        horizon: cfg.time.horizon,
        snapshot_stride: cfg.time.snapshot_stride,
        quadratures: layout,
    }
}

/// Run the Navier-Stokes reference for a config.
pub fn run_reference(cfg: &ExperimentConfig) -> Result<RefTrajectory> {
    let grid = cfg.grid()?;
    let forcing = materialize_forcing(grid, &cfg.forcing)?;
    let (u0, _) = generate_initial_data(grid, &cfg.initial, cfg.params.omega)?;
    let mut stepper = NewtonianStepper::new(grid, cfg.params.reynolds, true, forcing)?;
    let traj = run_newtonian(
        &mut stepper,
        NewtonianState { t: 0.0, u_hat: u0 },
        &run_settings(cfg, None),
    )?;
    if let Some(t) = traj.blowup {
        return Err(Error::BlowUp { t });
    }
    Ok(traj)
}

/// Run one epsilon of the sweep against a shared reference trajectory.
pub fn run_single(
    cfg: &ExperimentConfig,
    index: usize,
    reference: &RefTrajectory,
) -> Result<SweepRow> {
    let started = Instant::now();
    let grid = cfg.grid()?;
    let params = cfg.fluid_params(index);
    let epsilon = params.epsilon;
    let omega = params.omega;
    let forcing = materialize_forcing(grid, &cfg.forcing)?;
    let (u0, tau0) = generate_initial_data(grid, &cfg.initial, omega)?;
    let initial = FlowState::new(0.0, u0, tau0)?;

    let layout = quad_layout(cfg, epsilon);
    let mut stepper = OldroydStepper::new(grid, params.clone(), SchemeOptions::default(), forcing)?;
    let traj = run_oldroyd(&mut stepper, initial, &run_settings(cfg, Some(layout)))?;

    let family = LPFamily::for_grid(&grid);
    let half = grid.dims() as f64 / 2.0;
    let sp = cfg.norms.s_prime;

    // velocity error over the aligned prefix
    let snaps = traj.times.len().min(reference.times.len());
    let mut u_error_series = NormSeries::new();
    for i in 0..snaps {
        let w = traj.states[i].u_hat.sub(&reference.states[i].u_hat);
        let e = match cfg.params.regime {
            Regime::Sobolev { .. } => sobolev_norm(&w, sp),
            Regime::Besov => besov_norm(&w, half - 1.0, BlockSet::All, &family),
        };
        u_error_series.push(traj.times[i], e);
    }
    let u_error_sup = u_error_series.sup()?;

    let z_l2_series = traj.z_l2_series.clone().unwrap_or_default();
    let quad = traj.quadratures.as_ref().expect("sweep runs are tracked");
    let last = traj.times.len() - 1;

    let (z_norm, tau_sup_scaled, x_final) = if traj.blowup.is_some() {
        (f64::NAN, f64::NAN, f64::NAN)
    } else {
        let z_norm = match cfg.params.regime {
            // index 2 of the layout is s' + 1, so the squared integral is of
            // ||Z||_{H^{s'}}
            Regime::Sobolev { .. } => quad.z_sobolev_sq(last, 2).sqrt(),
            Regime::Besov => quad.z_besov_all(last, 0),
        };
        let tau_sup = traj
            .states
            .iter()
            .map(|st| match cfg.params.regime {
                Regime::Sobolev { .. } => sobolev_norm(&st.tau_hat, sp),
                Regime::Besov => besov_norm(&st.tau_hat, half, BlockSet::All, &family),
            })
            .fold(0.0f64, f64::max)
            * epsilon.sqrt();
        let x = match cfg.params.regime {
            Regime::Sobolev { .. } => {
                sobolev_x_series(&traj, reference, &params, sp, cfg.split.beta)?
            }
            Regime::Besov => besov_x_series(&traj, reference, &params, half, cfg.split.beta)?,
        };
        let (_, x_final) = x.last().ok_or(Error::EmptySeries)?;
        (z_norm, tau_sup, x_final)
    };

    // initial-layer decay fit on [0, 5.5 eps]; the slack past 5 eps keeps
    // float drift at the last micro-step from shrinking the span below the
    // fit's resolution requirement
    let mut window = NormSeries::new();
    for (&t, &v) in z_l2_series.times.iter().zip(&z_l2_series.values) {
        if t <= 5.5 * epsilon {
            window.push(t, v);
        }
    }
    let damping_rate_eps = damping_rate(&window, epsilon).ok().map(|r| r * epsilon);

    Ok(SweepRow {
        epsilon,
        omega,
        u_error_sup,
        z_norm,
        tau_sup_scaled,
        x_final,
        damping_rate_eps,
        blowup: traj.blowup,
        wall_seconds: started.elapsed().as_secs_f64(),
        steps: traj.steps,
        u_error_series,
        z_l2_series,
    })
}

fn strictly_decreasing(values: &[f64]) -> bool {
    values.len() >= 2 && values.windows(2).all(|w| w[1] < w[0])
}

/// Run the full experiment: reference once, one Oldroyd run per epsilon on a
/// bounded worker pool, deterministic assembly in epsilon order.
pub fn sweep(cfg: &ExperimentConfig, workers: usize) -> Result<ConvergenceReport> {
    cfg.validate()?;
    let reference = run_reference(cfg)?;
    let n = cfg.params.epsilons.len();

    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers.max(1))
        .build()
        .map_err(|e| Error::Config(format!("worker pool: {e}")))?;
    let results: Vec<Result<SweepRow>> = pool.install(|| {
        use rayon::prelude::*;
        (0..n).into_par_iter().map(|i| run_single(cfg, i, &reference)).collect()
    });
    let mut rows = Vec::with_capacity(n);
    for r in results {
        rows.push(r?);
    }

    let ok: Vec<&SweepRow> = rows.iter().filter(|r| r.blowup.is_none()).collect();
    let col = |f: fn(&SweepRow) -> f64| -> Vec<f64> { ok.iter().map(|r| f(r)).collect() };
    let u_err = col(|r| r.u_error_sup);
    let z = col(|r| r.z_norm);
    let tau = col(|r| r.tau_sup_scaled);
    let eps: Vec<f64> = ok.iter().map(|r| r.epsilon).collect();

    let monotone = MonotoneFlags {
        u_error: strictly_decreasing(&u_err),
        z_norm: strictly_decreasing(&z),
        tau_sup: strictly_decreasing(&tau),
    };
    let fit = |vals: &[f64]| -> Option<RateFit> {
        if vals.iter().all(|&v| v > 0.0) {
            fit_rate(&eps, vals).ok()
        } else {
            None
        }
    };
    let slopes = Slopes { u_error: fit(&u_err), z_norm: fit(&z), tau_sup: fit(&tau) };
    let largest_stable_epsilon = eps.first().copied();

    Ok(ConvergenceReport {
        config: cfg.clone(),
        rows,
        monotone,
        slopes,
        reference_steps: reference.steps,
        largest_stable_epsilon,
    })
}
