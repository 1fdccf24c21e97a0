//! Initial data generation: divergence-free velocities and well- or
//! ill-prepared stresses, deterministic under their seeds.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::constitutive::rate_of_strain;
use crate::error::{Error, Result};
use crate::harness::checkpoint::load_checkpoint;
use crate::harness::config::{InitialConfig, StressSpec, VelocitySpec};
use crate::spectral::{
    dealias_inplace, leray_project_inplace, sym_pairs, to_spectral, zero_mean, Grid,
    PhysicalField, Rank, SpectralField,
};

/// Canonical representative of a +-k conjugate pair: first nonzero
/// component positive.
fn is_representative(k: &[i64]) -> bool {
    for &c in k {
        if c > 0 {
            return true;
        }
        if c < 0 {
            return false;
        }
    }
    false
}

fn taylor_green(grid: Grid) -> Result<SpectralField> {
    let u = match grid.dims() {
        2 => PhysicalField::from_fn(grid, Rank::Vector, |c, x| match c {
            0 => x[0].sin() * x[1].cos(),
            _ => -x[0].cos() * x[1].sin(),
        }),
        _ => PhysicalField::from_fn(grid, Rank::Vector, |c, x| match c {
            0 => x[0].sin() * x[1].cos() * x[2].cos(),
            1 => -x[0].cos() * x[1].sin() * x[2].cos(),
            _ => 0.0,
        }),
    };
    to_spectral(&u)
}

fn random_bandlimited(grid: Grid, kmax: i64, seed: u64, amplitude: f64) -> Result<SpectralField> {
    if kmax < 1 || 3 * kmax >= grid.m() as i64 {
        return Err(Error::InvalidParameter(format!(
            "band limit kmax = {kmax} out of range for m = {} (need 1 <= kmax < m/3)",
            grid.m()
        )));
    }
    let dims = grid.dims();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut f = SpectralField::zeros(grid, Rank::Vector);
    for idx in 0..grid.n() {
        let k = grid.wavevector(idx);
        let k = &k[..dims];
        if k.iter().any(|&c| c.abs() > kmax) || !is_representative(k) {
            continue;
        }
        let neg: Vec<i64> = k.iter().map(|&c| -c).collect();
        let conj_idx = grid.index_of(&neg);
        for c in 0..dims {
            let v = Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
            f.set(c, idx, v);
            f.set(c, conj_idx, v.conj());
        }
    }
    leray_project_inplace(&mut f);
    zero_mean(&mut f);
    let norm = f.l2_norm();
    if norm == 0.0 {
        return Err(Error::InvalidParameter(
            "band-limited sample projected to zero; change the seed".into(),
        ));
    }
    f.scale(amplitude / norm);
    Ok(f)
}

/// Generate the initial velocity for a spec.
pub fn generate_velocity(grid: Grid, spec: &VelocitySpec) -> Result<SpectralField> {
    let mut u = match spec {
        VelocitySpec::TaylorGreen => taylor_green(grid)?,
        VelocitySpec::RandomBandlimited { kmax, seed, amplitude } => {
            random_bandlimited(grid, *kmax, *seed, *amplitude)?
        }
    };
    dealias_inplace(&mut u);
    Ok(u)
}

fn ill_prepared(grid: Grid, amplitude: f64, seed: u64) -> SpectralField {
    let dims = grid.dims();
    let nc = sym_pairs(dims).len();
    let mut tau = SpectralField::zeros(grid, Rank::SymTensor);
    // identity part: mean stress amplitude * I
    for (c, &(p, q)) in sym_pairs(dims).iter().enumerate() {
        if p == q {
            tau.set(c, 0, Complex64::new(amplitude, 0.0));
        }
    }
    // single-mode symmetric perturbation at k0 = (1, 1[, 1])
    let k0: Vec<i64> = vec![1; dims];
    let neg: Vec<i64> = vec![-1; dims];
    let idx = grid.index_of(&k0);
    let conj_idx = grid.index_of(&neg);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for c in 0..nc {
        let v = Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
        let v = v * 0.3 * amplitude;
        tau.set(c, idx, v);
        tau.set(c, conj_idx, v.conj());
    }
    tau
}

/// Generate the initial stress for a spec.  `u0` and `omega` fix the
/// well-prepared target 2 omega D[u0] and let the ill-prepared guarantee
/// ||Z(0)|| > 0.1 * amplitude be verified.
pub fn generate_stress(
    grid: Grid,
    spec: &StressSpec,
    u0: &SpectralField,
    omega: f64,
) -> Result<SpectralField> {
    let mut tau = match spec {
        StressSpec::WellPrepared => rate_of_strain(u0)?.scaled(2.0 * omega),
        StressSpec::IllPrepared { amplitude, seed } => {
            let tau = ill_prepared(grid, *amplitude, *seed);
            let z = tau.sub(&rate_of_strain(u0)?.scaled(2.0 * omega));
            if z.l2_norm() <= 0.1 * amplitude {
                return Err(Error::Constraint(format!(
                    "ill-prepared stress failed ||Z(0)|| > 0.1*amplitude: got {}",
                    z.l2_norm()
                )));
            }
            tau
        }
        StressSpec::Explicit { path } => {
            let (state, _) = load_checkpoint(path)?;
            if state.grid() != grid {
                return Err(Error::GridMismatch);
            }
            state.tau_hat
        }
    };
    dealias_inplace(&mut tau);
    Ok(tau)
}

/// Materialize the forcing field (Leray-projected at ingestion; only P f
/// enters the dynamics).
pub fn materialize_forcing(
    grid: Grid,
    forcing: &crate::constitutive::Forcing,
) -> Result<Option<SpectralField>> {
    match *forcing {
        crate::constitutive::Forcing::Zero => Ok(None),
        crate::constitutive::Forcing::RandomBandLimited { kmax, seed, amplitude } => {
            Ok(Some(random_bandlimited(grid, kmax, seed, amplitude)?))
        }
    }
}

/// Generate the (u0, tau0) pair of an experiment.
pub fn generate_initial_data(
    grid: Grid,
    initial: &InitialConfig,
    omega: f64,
) -> Result<(SpectralField, SpectralField)> {
    let u0 = generate_velocity(grid, &initial.velocity)?;
    let tau0 = generate_stress(grid, &initial.stress, &u0, omega)?;
    Ok((u0, tau0))
}
