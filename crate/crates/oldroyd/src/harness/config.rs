//! Experiment configuration: TOML schema, defaults, and validation.
//!
//! Validation rejects with a message naming the violated constraint, so a
//! bad config fails loudly before any compute starts.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::constitutive::{FluidParams, Forcing, Regime};
use crate::error::{Error, Result};
use crate::spectral::Grid;

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct GridConfig {
    pub dims: usize,
    pub m: usize,
}

fn default_reynolds() -> f64 {
    1.0
}
fn default_omega() -> f64 {
    0.5
}
fn default_regime() -> Regime {
    Regime::Sobolev { delta: 0.1 }
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct ParamsConfig {
    #[serde(default = "default_reynolds")]
    pub reynolds: f64,
    #[serde(default = "default_omega")]
    pub omega: f64,
    /// Slip parameter a of the objective derivative.
    #[serde(default)]
    pub slip: f64,
    /// Sweep values, strictly decreasing.
    pub epsilons: Vec<f64>,
    #[serde(default = "default_regime")]
    pub regime: Regime,
    /// Optional per-epsilon omega values (same length as `epsilons`);
    /// default is the single constant `omega`.
    #[serde(default)]
    pub omega_schedule: Option<Vec<f64>>,
}

fn default_alpha() -> f64 {
    0.125
}
fn default_beta() -> f64 {
    0.125
}

/// Frequency-splitting exponents: the cutoff is eps^{-alpha} and beta
/// weights the defect terms of the energy functionals.
#[derive(Debug, Clone, Copy, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct SplitConfig {
    #[serde(default = "default_alpha")]
    pub alpha: f64,
    #[serde(default = "default_beta")]
    pub beta: f64,
}

impl Default for SplitConfig {
    fn default() -> Self {
        SplitConfig { alpha: default_alpha(), beta: default_beta() }
    }
}

fn default_horizon() -> f64 {
    1.0
}
fn default_stride() -> f64 {
    0.05
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct TimeConfig {
    #[serde(default = "default_horizon")]
    pub horizon: f64,
    #[serde(default = "default_stride")]
    pub snapshot_stride: f64,
}

impl Default for TimeConfig {
    fn default() -> Self {
        TimeConfig { horizon: default_horizon(), snapshot_stride: default_stride() }
    }
}

/// Initial velocity specification.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(rename_all = "snake_case", tag = "kind", deny_unknown_fields)]
pub enum VelocitySpec {
    TaylorGreen,
    RandomBandlimited {
        kmax: i64,
        seed: u64,
        #[serde(default = "default_amplitude")]
        amplitude: f64,
    },
}

fn default_amplitude() -> f64 {
    1.0
}

/// Initial stress specification.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(rename_all = "snake_case", tag = "kind", deny_unknown_fields)]
pub enum StressSpec {
    /// tau0 = 2 omega D[u0], so Z(0) = 0.
    WellPrepared,
    /// tau0 = amplitude * (identity + single-mode symmetric perturbation);
    /// Z(0) stays order `amplitude` regardless of eps.
    IllPrepared { amplitude: f64, seed: u64 },
    /// Stress read from a checkpoint file.
    Explicit { path: String },
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct InitialConfig {
    #[serde(default = "default_velocity")]
    pub velocity: VelocitySpec,
    #[serde(default = "default_stress")]
    pub stress: StressSpec,
}

fn default_velocity() -> VelocitySpec {
    VelocitySpec::TaylorGreen
}
fn default_stress() -> StressSpec {
    StressSpec::WellPrepared
}

impl Default for InitialConfig {
    fn default() -> Self {
        InitialConfig { velocity: default_velocity(), stress: default_stress() }
    }
}

fn default_s() -> f64 {
    2.0
}
fn default_s_prime() -> f64 {
    1.5
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct NormConfig {
    #[serde(default = "default_s")]
    pub s: f64,
    #[serde(default = "default_s_prime")]
    pub s_prime: f64,
}

impl Default for NormConfig {
    fn default() -> Self {
        NormConfig { s: default_s(), s_prime: default_s_prime() }
    }
}

fn default_dir() -> String {
    "out".into()
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct OutputConfig {
    #[serde(default = "default_dir")]
    pub dir: String,
}

impl Default for OutputConfig {
    fn default() -> Self {
        OutputConfig { dir: default_dir() }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub grid: GridConfig,
    pub params: ParamsConfig,
    #[serde(default)]
    pub split: SplitConfig,
    #[serde(default)]
    pub time: TimeConfig,
    #[serde(default)]
    pub initial: InitialConfig,
    #[serde(default)]
    pub norms: NormConfig,
    #[serde(default)]
    pub output: OutputConfig,
    #[serde(default)]
    pub forcing: Forcing,
}

impl ExperimentConfig {
    pub fn grid(&self) -> Result<Grid> {
        Grid::new(self.grid.dims, self.grid.m)
    }

    /// Omega used for the i-th sweep entry.
    pub fn omega_at(&self, i: usize) -> f64 {
        match &self.params.omega_schedule {
            Some(sched) => sched[i],
            None => self.params.omega,
        }
    }

    /// Full parameter set for the i-th sweep entry.
    pub fn fluid_params(&self, i: usize) -> FluidParams {
        FluidParams {
            reynolds: self.params.reynolds,
            epsilon: self.params.epsilons[i],
            omega: self.omega_at(i),
            slip: self.params.slip,
            regime: self.params.regime,
            forcing: self.forcing,
        }
    }

    pub fn validate(&self) -> Result<()> {
        self.grid()?;

        let eps = &self.params.epsilons;
        if eps.is_empty() {
            return Err(Error::Config("params.epsilons must be non-empty".into()));
        }
        if eps.iter().any(|&e| !(e > 0.0)) {
            return Err(Error::Config(format!(
                "params.epsilons must all be > 0, got {eps:?}"
            )));
        }
        if eps.windows(2).any(|w| w[1] >= w[0]) {
            return Err(Error::Config(format!(
                "params.epsilons must be strictly decreasing, got {eps:?}"
            )));
        }
        if let Some(sched) = &self.params.omega_schedule {
            if sched.len() != eps.len() {
                return Err(Error::Config(format!(
                    "params.omega_schedule length {} does not match epsilons length {}",
                    sched.len(),
                    eps.len()
                )));
            }
        }
        for i in 0..eps.len() {
            self.fluid_params(i).validate()?;
        }

        let (alpha, beta) = (self.split.alpha, self.split.beta);
        if !(alpha > 0.0 && beta > 0.0) {
            return Err(Error::Constraint(format!(
                "split exponents must be positive: alpha = {alpha}, beta = {beta}"
            )));
        }
        match self.params.regime {
            Regime::Sobolev { .. } => {
                let margin = 1.0 - 3.0 * beta - 2.0 * alpha;
                if margin <= 0.0 {
                    return Err(Error::Constraint(format!(
                        "1 - 3*beta - 2*alpha > 0 violated: 1 - 3({beta}) - 2({alpha}) = {margin}"
                    )));
                }
            }
            Regime::Besov => {
                if alpha >= 0.5 {
                    return Err(Error::Constraint(format!(
                        "alpha < 1/2 violated: alpha = {alpha}"
                    )));
                }
                if 2.0 * beta >= 1.0 - 2.0 * alpha {
                    return Err(Error::Constraint(format!(
                        "2*beta < 1 - 2*alpha violated: 2({beta}) vs 1 - 2({alpha})"
                    )));
                }
            }
        }

        if !(self.time.horizon >= 0.0) {
            return Err(Error::Config(format!(
                "time.horizon must be >= 0, got {}",
                self.time.horizon
            )));
        }
        if !(self.time.snapshot_stride > 0.0) {
            return Err(Error::Config(format!(
                "time.snapshot_stride must be > 0, got {}",
                self.time.snapshot_stride
            )));
        }

        if !(self.norms.s_prime < self.norms.s) {
            return Err(Error::Config(format!(
                "norms.s_prime must be < norms.s, got s' = {} and s = {}",
                self.norms.s_prime, self.norms.s
            )));
        }

        let limit = Grid::new(self.grid.dims, self.grid.m)?.dealias_limit();
        if let VelocitySpec::RandomBandlimited { kmax, .. } = self.initial.velocity {
            if kmax < 1 {
                return Err(Error::Config(format!(
                    "initial.velocity.kmax must be >= 1, got {kmax}"
                )));
            }
            if 3 * kmax >= self.grid.m as i64 {
                return Err(Error::Config(format!(
                    "initial.velocity.kmax = {kmax} would be dealias-clipped on m = {} \
                     (need kmax < m/3, band limit {limit})",
                    self.grid.m
                )));
            }
        }
        if let StressSpec::IllPrepared { amplitude, .. } = self.initial.stress {
            if !(amplitude > 0.0) {
                return Err(Error::Config(format!(
                    "initial.stress.amplitude must be > 0, got {amplitude}"
                )));
            }
        }
        if let Forcing::RandomBandLimited { kmax, .. } = self.forcing {
            if kmax < 1 || 3 * kmax >= self.grid.m as i64 {
                return Err(Error::Config(format!(
                    "forcing.kmax = {kmax} out of range for m = {} (need 1 <= kmax < m/3)",
                    self.grid.m
                )));
            }
        }
        Ok(())
    }
}

/// Parse and validate a config file.
pub fn load_config(path: impl AsRef<Path>) -> Result<ExperimentConfig> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let cfg: ExperimentConfig = toml::from_str(&text)
        .map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
    cfg.validate()?;
    Ok(cfg)
}
