//! The weighted energy functionals X_s measuring the distance to the
//! Newtonian limit along a run.
//!
//! Both variants combine instantaneous norms of W = u - v (difference to the
//! Navier-Stokes reference), the stress tau, and the elastic defect
//! Z = tau - 2 omega D[u] with running dissipation integrals.  Smooth
//! integrands (those built from W) are integrated by trapezoid on the
//! snapshot grid; stiff ones (tau, Z) come from the micro-step accumulators
//! carried by the trajectory.

use crate::analysis::norms::{besov_norm, sobolev_grad_norm, sobolev_norm, BlockSet, NormSeries};
use crate::constitutive::{elastic_defect, gamma_omega, FluidParams};
use crate::error::{Error, Result};
use crate::solver::run::{RefTrajectory, Trajectory};
use crate::spectral::LPFamily;

/// Free energy Re/2 ||u||^2 + eps/(4 omega) ||tau||^2 of a snapshot.
pub fn free_energy(
    u_l2: f64,
    tau_l2: f64,
    params: &FluidParams,
) -> f64 {
    params.reynolds / 2.0 * u_l2 * u_l2
        + params.epsilon / (4.0 * params.omega) * tau_l2 * tau_l2
}

/// Residual of the exact balance
/// E(t) + int_0^t [(1 - omega) ||grad u||^2 + 1/(2 omega) ||tau||^2] = E(0)
/// at each snapshot (a = 0, no forcing).  Requires a tracked run.
pub fn energy_residual(traj: &Trajectory, params: &FluidParams) -> Result<NormSeries> {
    let quad = traj
        .quadratures
        .as_ref()
        .ok_or_else(|| Error::Config("energy residual needs a tracked run".into()))?;
    let mut out = NormSeries::new();
    let e0 = free_energy(
        traj.states[0].u_hat.l2_norm(),
        traj.states[0].tau_hat.l2_norm(),
        params,
    );
    for (i, state) in traj.states.iter().enumerate() {
        let e = free_energy(state.u_hat.l2_norm(), state.tau_hat.l2_norm(), params);
        let diss = (1.0 - params.omega) * quad.grad_u_l2_sq(i)
            + 1.0 / (2.0 * params.omega) * quad.tau_l2_sq(i);
        out.push(traj.times[i], e + diss - e0);
    }
    Ok(out)
}

fn quad_index(indices: &[f64], s: f64, what: &str) -> Result<usize> {
    indices
        .iter()
        .position(|&x| (x - s).abs() < 1e-12)
        .ok_or_else(|| {
            Error::Config(format!("run did not track {what} integrals at index s = {s}"))
        })
}

/// Sobolev-variant functional
///
/// X_s(t) = Re/2 ||W||^2_{H^s} + eps/(4 omega) ||tau||^2_{H^s}
///        + eps^{2 beta}/2 ||Z||^2_{H^{s-1}}
///        + int_0^t [ (1-omega)/4 ||grad W||^2_{H^s} + 1/8 ||Q_eps tau||^2_{H^s}
///                  + eps^beta/8 ||P_eps tau||^2_{H^s}
///                  + eps^{2 beta - 1}/4 ||Z||^2_{H^{s-1}} ].
pub fn sobolev_x_series(
    traj: &Trajectory,
    reference: &RefTrajectory,
    params: &FluidParams,
    s: f64,
    beta: f64,
) -> Result<NormSeries> {
    traj.check_aligned(&reference.times)?;
    let quad = traj
        .quadratures
        .as_ref()
        .ok_or_else(|| Error::Config("X_s needs a tracked run".into()))?;
    let si = quad_index(&quad.layout.sobolev_indices, s, "Sobolev")?;
    let eps = params.epsilon;
    let om = params.omega;
    let re = params.reynolds;

    let mut out = NormSeries::new();
    let mut grad_w_int = 0.0;
    let mut prev_grad_w_sq = 0.0;
    for i in 0..traj.times.len() {
        let state = &traj.states[i];
        let w = state.u_hat.sub(&reference.states[i].u_hat);
        let z = elastic_defect(state, om);
        let grad_w_sq = sobolev_grad_norm(&w, s).powi(2);
        if i > 0 {
            let dt = traj.times[i] - traj.times[i - 1];
            grad_w_int += 0.5 * dt * (prev_grad_w_sq + grad_w_sq);
        }
        prev_grad_w_sq = grad_w_sq;

        let x = re / 2.0 * sobolev_norm(&w, s).powi(2)
            + eps / (4.0 * om) * sobolev_norm(&state.tau_hat, s).powi(2)
            + eps.powf(2.0 * beta) / 2.0 * sobolev_norm(&z, s - 1.0).powi(2)
            + (1.0 - om) / 4.0 * grad_w_int
            + 1.0 / 8.0 * quad.q_tau_sq(i, si)
            + eps.powf(beta) / 8.0 * quad.p_tau_sq(i, si)
            + eps.powf(2.0 * beta - 1.0) / 4.0 * quad.z_sobolev_sq(i, si);
        out.push(traj.times[i], x);
    }
    Ok(out)
}

/// Besov-variant functional
///
/// X_s(t) = Re ||W||_{B^{s-1}} + 4 eps ||tau||_{B^s}
///        + eps^{2 beta} ||Z||_{B^{s-2}_{I u J_eps}}
///        + int_0^t [ gamma(omega)/2 ||W||_{B^{s+1}} + ||tau||_{B^s_{K_eps}}
///                  + eps^beta ||tau||_{B^s_{I u J_eps}}
///                  + eps^{2 beta - 1}/2 ( ||Z||_{B^{s-2}_{J_eps}} + ||Z||_{B^s_I} ) ].
pub fn besov_x_series(
    traj: &Trajectory,
    reference: &RefTrajectory,
    params: &FluidParams,
    s: f64,
    beta: f64,
) -> Result<NormSeries> {
    traj.check_aligned(&reference.times)?;
    let quad = traj
        .quadratures
        .as_ref()
        .ok_or_else(|| Error::Config("X_s needs a tracked run".into()))?;
    let bi = quad_index(&quad.layout.besov_indices, s, "Besov")?;
    let eps = params.epsilon;
    let om = params.omega;
    let re = params.reynolds;
    let gamma = gamma_omega(om);
    let cutoff = quad.layout.cutoff;
    let family = LPFamily::for_grid(&traj.states[0].u_hat.grid());

    let mut out = NormSeries::new();
    let mut w_int = 0.0;
    let mut prev_w = 0.0;
    for i in 0..traj.times.len() {
        let state = &traj.states[i];
        let w = state.u_hat.sub(&reference.states[i].u_hat);
        let z = elastic_defect(state, om);
        let w_high = besov_norm(&w, s + 1.0, BlockSet::All, &family);
        if i > 0 {
            let dt = traj.times[i] - traj.times[i - 1];
            w_int += 0.5 * dt * (prev_w + w_high);
        }
        prev_w = w_high;

        let x = re * besov_norm(&w, s - 1.0, BlockSet::All, &family)
            + 4.0 * eps * besov_norm(&state.tau_hat, s, BlockSet::All, &family)
            + eps.powf(2.0 * beta)
                * besov_norm(&z, s - 2.0, BlockSet::LowMid { cutoff }, &family)
            + gamma / 2.0 * w_int
            + quad.tau_besov_high(i, bi)
            + eps.powf(beta) * quad.tau_besov_lowmid(i, bi)
            + eps.powf(2.0 * beta - 1.0) / 2.0
                * (quad.z_besov_mid(i, bi) + quad.z_besov_low(i, bi));
        out.push(traj.times[i], x);
    }
    Ok(out)
}
