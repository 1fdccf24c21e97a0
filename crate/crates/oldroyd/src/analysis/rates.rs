//! Rate extraction: algebraic convergence orders from parameter sweeps and
//! exponential damping rates from time series.

use crate::analysis::norms::NormSeries;
use crate::error::{Error, Result};

/// Least-squares slope of y against x.
fn lsq_slope(x: &[f64], y: &[f64]) -> f64 {
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let mut num = 0.0;
    let mut den = 0.0;
    for (&xi, &yi) in x.iter().zip(y) {
        num += (xi - mx) * (yi - my);
        den += (xi - mx) * (xi - mx);
    }
    num / den
}

/// Measured algebraic order from a log-log least-squares fit.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RateFit {
    pub slope: f64,
    pub intercept: f64,
    /// Root-mean-square residual of the fit in log coordinates.
    pub residual: f64,
}

/// Fit err ~ C eps^r by least squares in log-log coordinates.  Requires at
/// least three strictly positive samples.
pub fn fit_rate(eps: &[f64], err: &[f64]) -> Result<RateFit> {
    if eps.len() != err.len() {
        return Err(Error::SizeMismatch { expected: eps.len(), got: err.len() });
    }
    if eps.len() < 3 {
        return Err(Error::SeriesTooShort { need: 3, got: eps.len() });
    }
    if eps.iter().chain(err).any(|&v| !(v > 0.0)) {
        return Err(Error::InvalidParameter(
            "rate fit requires strictly positive samples".into(),
        ));
    }
    let lx: Vec<f64> = eps.iter().map(|v| v.ln()).collect();
    let ly: Vec<f64> = err.iter().map(|v| v.ln()).collect();
    let slope = lsq_slope(&lx, &ly);
    let mx = lx.iter().sum::<f64>() / lx.len() as f64;
    let my = ly.iter().sum::<f64>() / ly.len() as f64;
    let intercept = my - slope * mx;
    let residual = (lx
        .iter()
        .zip(&ly)
        .map(|(&x, &y)| {
            let r = y - (intercept + slope * x);
            r * r
        })
        .sum::<f64>()
        / lx.len() as f64)
        .sqrt();
    Ok(RateFit { slope, intercept, residual })
}

/// Fit v(t) ~ C e^{-r t} on a series expected to decay on the time scale
/// `scale` and return r.  The window must span at least 5 * scale and be
/// sampled no coarser than scale / 4, otherwise the fit cannot resolve the
/// decay and the series is rejected.
pub fn damping_rate(series: &NormSeries, scale: f64) -> Result<f64> {
    if !(scale > 0.0) {
        return Err(Error::InvalidParameter(format!("decay scale must be > 0, got {scale}")));
    }
    let n = series.len();
    if n < 5 {
        return Err(Error::SeriesTooShort { need: 5, got: n });
    }
    let span = series.times[n - 1] - series.times[0];
    let max_step = series
        .times
        .windows(2)
        .map(|w| w[1] - w[0])
        .fold(0.0, f64::max);
    if span < 5.0 * scale || max_step > scale / 4.0 {
        return Err(Error::WindowTooCoarse { span, max_step, scale });
    }
    if series.values.iter().any(|&v| !(v > 0.0)) {
        return Err(Error::InvalidParameter(
            "damping fit requires strictly positive values".into(),
        ));
    }
    let ly: Vec<f64> = series.values.iter().map(|v| v.ln()).collect();
    Ok(-lsq_slope(&series.times, &ly))
}
