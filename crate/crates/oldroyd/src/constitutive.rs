//! Field-level physics of the Oldroyd-B system: rate-of-strain, vorticity,
//! the objective bilinear map g, advection products, the elastic defect
//! Z = tau - 2 omega D[u], and the dimensionless parameter set.
//!
//! Dimensional symbols enter only through the documented relations
//! Re = rho U L / eta, eps = lambda_1 U / L, omega = 1 - lambda_2 / lambda_1.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::spectral::{
    dealias_inplace, differentiate, sym_index, sym_pairs, DiffOp, FftWorkspace, Grid,
    PhysicalField, Rank, SpectralField,
};

/// gamma(omega) = (1 - omega)/2 - 16 omega, the Besov-regime margin.
pub fn gamma_omega(omega: f64) -> f64 {
    (1.0 - omega) / 2.0 - 16.0 * omega
}

/// Analysis regime, fixing which smallness condition on omega applies.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Regime {
    /// Sobolev theory: 0 < omega <= 1 - delta.
    Sobolev { delta: f64 },
    /// Critical Besov theory: gamma(omega) > 0, i.e. omega < 1/33.
    Besov,
}

/// External forcing specification.  Non-zero forcing is band-limited,
/// seeded, and Leray-projected at ingestion (only P f enters the estimates).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "kind")]
pub enum Forcing {
    Zero,
    RandomBandLimited { kmax: i64, seed: u64, amplitude: f64 },
}

impl Default for Forcing {
    fn default() -> Self {
        Forcing::Zero
    }
}

/// Dimensionless parameters of the Oldroyd-B system.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FluidParams {
    pub reynolds: f64,
    /// Weissenberg number, the singular parameter sent to 0.
    pub epsilon: f64,
    /// Retardation parameter in (0,1).
    pub omega: f64,
    /// Slip parameter of the objective derivative, in [-1,1].
    pub slip: f64,
    pub regime: Regime,
    pub forcing: Forcing,
}

impl FluidParams {
    pub fn validate(&self) -> Result<()> {
        if !(self.reynolds > 0.0) {
            return Err(Error::InvalidParameter(format!("Re must be > 0, got {}", self.reynolds)));
        }
        if !(self.epsilon > 0.0) {
            return Err(Error::InvalidParameter(format!("eps must be > 0, got {}", self.epsilon)));
        }
        if !(self.omega > 0.0 && self.omega < 1.0) {
            return Err(Error::InvalidParameter(format!(
                "omega must lie in (0,1), got {}",
                self.omega
            )));
        }
        if !(-1.0..=1.0).contains(&self.slip) {
            return Err(Error::InvalidParameter(format!(
                "slip parameter must lie in [-1,1], got {}",
                self.slip
            )));
        }
        match self.regime {
            Regime::Sobolev { delta } => {
                if !(delta > 0.0 && delta < 1.0) {
                    return Err(Error::Constraint(format!("delta must lie in (0,1), got {delta}")));
                }
                if self.omega > 1.0 - delta {
                    return Err(Error::Constraint(format!(
                        "omega <= 1 - delta violated: omega = {}, 1 - delta = {}",
                        self.omega,
                        1.0 - delta
                    )));
                }
            }
            Regime::Besov => {
                let g = gamma_omega(self.omega);
                if g <= 0.0 {
                    return Err(Error::Constraint(format!(
                        "gamma(omega) = (1 - omega)/2 - 16 omega = {g} is not > 0 (omega = {}, need omega < 1/33)",
                        self.omega
                    )));
                }
            }
        }
        Ok(())
    }
}

/// Evolving state: time plus solenoidal spectral velocity and symmetric
/// spectral extra-stress.
#[derive(Debug, Clone, PartialEq)]
pub struct FlowState {
    pub t: f64,
    pub u_hat: SpectralField,
    pub tau_hat: SpectralField,
}

impl FlowState {
    pub fn new(t: f64, u_hat: SpectralField, tau_hat: SpectralField) -> Result<Self> {
        u_hat.expect_rank(Rank::Vector)?;
        tau_hat.expect_rank(Rank::SymTensor)?;
        u_hat.expect_same_grid(&tau_hat)?;
        Ok(FlowState { t, u_hat, tau_hat })
    }

    pub fn grid(&self) -> Grid {
        self.u_hat.grid()
    }

    pub fn is_finite(&self) -> bool {
        self.u_hat.is_finite() && self.tau_hat.is_finite()
    }
}

/// Rate-of-strain tensor D[u] = (grad u + grad u^T)/2 as a symmetric
/// spectral field: D_{mn}(k) = (i/2)(k_n u_m + k_m u_n).
pub fn rate_of_strain(u: &SpectralField) -> Result<SpectralField> {
    u.expect_rank(Rank::Vector)?;
    let grid = u.grid();
    let dims = grid.dims();
    let mut out = SpectralField::zeros(grid, Rank::SymTensor);
    let ih = Complex64::new(0.0, 0.5);
    for (c, &(m, nn)) in sym_pairs(dims).iter().enumerate() {
        for idx in 0..grid.n() {
            let k = grid.wavevector(idx);
            let v = ih * (k[nn] as f64 * u.get(m, idx) + k[m] as f64 * u.get(nn, idx));
            out.set(c, idx, v);
        }
    }
    Ok(out)
}

/// Vorticity tensor W[u] = (grad u - grad u^T)/2, antisymmetric, stored dense.
pub fn vorticity_tensor(u: &SpectralField) -> Result<SpectralField> {
    u.expect_rank(Rank::Vector)?;
    let grid = u.grid();
    let dims = grid.dims();
    let mut out = SpectralField::zeros(grid, Rank::Tensor);
    let ih = Complex64::new(0.0, 0.5);
    for m in 0..dims {
        for nn in 0..dims {
            if m == nn {
                continue;
            }
            for idx in 0..grid.n() {
                let k = grid.wavevector(idx);
                let v = ih * (k[nn] as f64 * u.get(m, idx) - k[m] as f64 * u.get(nn, idx));
                out.set(m * dims + nn, idx, v);
            }
        }
    }
    Ok(out)
}

/// The objective bilinear map
/// g(grad u, tau) = tau W[u] - W[u] tau - a (D[u] tau + tau D[u]),
/// evaluated pseudo-spectrally (physical-space matrix products), dealiased
/// and re-symmetrized.
pub fn objective_bilinear(
    u: &SpectralField,
    tau: &SpectralField,
    a: f64,
    ws: &mut FftWorkspace,
) -> Result<SpectralField> {
    u.expect_rank(Rank::Vector)?;
    tau.expect_rank(Rank::SymTensor)?;
    u.expect_same_grid(tau)?;
    let grid = u.grid();
    let dims = grid.dims();
    let n = grid.n();

    let grad = differentiate(u, DiffOp::Gradient)?; // dense du_m/dx_n
    let grad_p = ws.to_physical(&grad);
    let tau_p = ws.to_physical(tau);

    let mut out_p = PhysicalField::zeros(grid, Rank::SymTensor);
    let mut dmat = [[0.0f64; 3]; 3];
    let mut wmat = [[0.0f64; 3]; 3];
    let mut tmat = [[0.0f64; 3]; 3];
    let mut gmat = [[0.0f64; 3]; 3];
    for idx in 0..n {
        for m in 0..dims {
            for nn in 0..dims {
                let gmn = grad_p.component(m * dims + nn)[idx];
                let gnm = grad_p.component(nn * dims + m)[idx];
                dmat[m][nn] = 0.5 * (gmn + gnm);
                wmat[m][nn] = 0.5 * (gmn - gnm);
                tmat[m][nn] = tau_p.component(sym_index(dims, m, nn))[idx];
            }
        }
        // g = tau W - W tau - a (D tau + tau D)
        for m in 0..dims {
            for nn in 0..dims {
                let mut s = 0.0;
                for p in 0..dims {
                    s += tmat[m][p] * wmat[p][nn] - wmat[m][p] * tmat[p][nn]
                        - a * (dmat[m][p] * tmat[p][nn] + tmat[m][p] * dmat[p][nn]);
                }
                gmat[m][nn] = s;
            }
        }
        for (c, &(m, nn)) in sym_pairs(dims).iter().enumerate() {
            out_p.component_mut(c)[idx] = 0.5 * (gmat[m][nn] + gmat[nn][m]);
        }
    }
    let mut out = ws.to_spectral(&out_p)?;
    dealias_inplace(&mut out);
    Ok(out)
}

/// Advection (u . grad) q for q of any rank, pseudo-spectral and dealiased.
pub fn advect(
    u: &SpectralField,
    q: &SpectralField,
    ws: &mut FftWorkspace,
) -> Result<SpectralField> {
    u.expect_rank(Rank::Vector)?;
    u.expect_same_grid(q)?;
    let grid = u.grid();
    let dims = grid.dims();
    let n = grid.n();
    let u_p = ws.to_physical(u);

    let mut out_p = PhysicalField::zeros(grid, q.rank());
    // d q_c / d x_ax as a spectral multiplier, one component at a time
    let i = Complex64::new(0.0, 1.0);
    let mut deriv = SpectralField::zeros(grid, Rank::Scalar);
    for c in 0..q.components() {
        for ax in 0..dims {
            for idx in 0..n {
                let k = grid.wavevector(idx);
                deriv.set(0, idx, i * k[ax] as f64 * q.get(c, idx));
            }
            let deriv_p = ws.to_physical(&deriv);
            let un = u_p.component(ax);
            let dst = out_p.component_mut(c);
            for idx in 0..n {
                dst[idx] += un[idx] * deriv_p.component(0)[idx];
            }
        }
    }
    let mut out = ws.to_spectral(&out_p)?;
    dealias_inplace(&mut out);
    Ok(out)
}

/// Elastic defect Z = tau - 2 omega D[u].
pub fn elastic_defect(state: &FlowState, omega: f64) -> SpectralField {
    let d = rate_of_strain(&state.u_hat).expect("state velocity is a vector field");
    let mut z = state.tau_hat.clone();
    z.axpy(-2.0 * omega, &d);
    z
}
