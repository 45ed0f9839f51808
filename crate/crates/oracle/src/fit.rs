//! Exponential-rate extraction from reduced trajectories.

use decoherence::TimeSeries64;

use crate::error::{OracleError, Result};

/// Which relaxing quantity to fit.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Channel {
    /// `|ρ₁₁(t) − G₁₁|` relaxing toward the equilibrium population.
    Population { gibbs11: f64 },
    /// `|ρ₁₂(t)|` relaxing toward zero.
    Coherence,
}

impl Channel {
    fn signal(&self, rho11: f64, rho12_norm: f64) -> f64 {
        match self {
            Channel::Population { gibbs11 } => rho11 - gibbs11,
            Channel::Coherence => rho12_norm,
        }
    }
}

/// Fitted rate together with the fit diagnostics.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RateFit {
    pub rate: f64,
    /// Fitted `ln |s(t₁)|` intercept at the window start.
    pub intercept: f64,
    /// Root-mean-square residual of `ln |s|`.
    pub rms_residual: f64,
    pub points: usize,
}

/// Least-squares slope of `−ln |s(t)|` over `t ∈ [t1, t2]`.
pub fn fit_decay_rate(series: &TimeSeries64, channel: Channel, t1: f64, t2: f64) -> Result<RateFit> {
    if !(t1 < t2) {
        return Err(OracleError::IllConditionedFit(format!("empty window [{t1}, {t2}]")));
    }
    let mut samples = Vec::new();
    let mut sign = 0.0;
    for (t, rho) in series.iter() {
        if t < t1 || t > t2 {
            continue;
        }
        let s = channel.signal(rho.rho11().re, rho.rho12().norm());
        if s == 0.0 || !s.is_finite() {
            return Err(OracleError::IllConditionedFit(format!("signal vanishes at t = {t}")));
        }
        if sign != 0.0 && s.signum() != sign {
            return Err(OracleError::IllConditionedFit(format!("signal changes sign near t = {t}")));
        }
        sign = s.signum();
        samples.push((t - t1, s.abs().ln()));
    }
    let n = samples.len();
    if n < 3 {
        return Err(OracleError::IllConditionedFit(format!("only {n} samples in [{t1}, {t2}]")));
    }
    let nf = n as f64;
    let mt = samples.iter().map(|p| p.0).sum::<f64>() / nf;
    let my = samples.iter().map(|p| p.1).sum::<f64>() / nf;
    let sxx: f64 = samples.iter().map(|p| (p.0 - mt).powi(2)).sum();
    let sxy: f64 = samples.iter().map(|p| (p.0 - mt) * (p.1 - my)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mt;
    let rms = (samples.iter().map(|p| (p.1 - intercept - slope * p.0).powi(2)).sum::<f64>() / nf).sqrt();
    let span = samples[n - 1].0 - samples[0].0;
    let drop = (slope * span).abs();
    if rms > 0.25 * drop + 1e-12 {
        return Err(OracleError::IllConditionedFit(format!(
            "residual {rms:.3e} is large against the fitted drop {drop:.3e}"
        )));
    }
    Ok(RateFit { rate: -slope, intercept, rms_residual: rms, points: n })
}

/// [`fit_decay_rate`] that refuses windows reaching past half the recurrence time.
pub fn fit_decay_rate_checked(
    series: &TimeSeries64,
    channel: Channel,
    t1: f64,
    t2: f64,
    recurrence_time: f64,
) -> Result<RateFit> {
    if t2 > 0.5 * recurrence_time {
        return Err(OracleError::RecurrenceWindow { t_end: t2, recurrence_time });
    }
    fit_decay_rate(series, channel, t1, t2)
}
