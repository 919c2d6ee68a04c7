//! Posterior summaries: equal-tailed credible intervals from retained draws
//! and coverage/length/bias aggregation across Monte Carlo replications.

use ndarray::prelude::*;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum InferenceError {
    #[error("need at least 2 draws to summarize, got {0}")]
    InsufficientDraws(usize),
    #[error("empty input")]
    EmptyInput,
    #[error("tail mass must lie in (0, 1), got {0}")]
    InvalidAlpha(f64),
    #[error("draw at index {0} is not finite")]
    NonFiniteDraw(usize),
    #[error("mismatched input lengths: {0} vs {1}")]
    LengthMismatch(usize, usize),
}

/// Provenance carried with every set of retained draws.
#[derive(Debug, Clone, PartialEq)]
pub struct DrawsMeta {
    pub seed: u64,
    pub stream_id: u64,
    pub config_digest: String,
}

/// Retained treatment-effect draws, one column per effect component
/// (a single column for a binary treatment).
#[derive(Debug, Clone, PartialEq)]
pub struct PosteriorDraws {
    draws: Array2<f64>,
    pub meta: DrawsMeta,
}

impl PosteriorDraws {
    pub fn new(draws: Array2<f64>, meta: DrawsMeta) -> Result<Self, InferenceError> {
        if draws.nrows() == 0 {
            return Err(InferenceError::EmptyInput);
        }
        if let Some((i, _)) = draws.iter().enumerate().find(|(_, v)| !v.is_finite()) {
            return Err(InferenceError::NonFiniteDraw(i));
        }
        Ok(Self { draws, meta })
    }

    pub fn num_draws(&self) -> usize {
        self.draws.nrows()
    }

    pub fn num_components(&self) -> usize {
        self.draws.ncols()
    }

    pub fn draws(&self) -> &Array2<f64> {
        &self.draws
    }

    pub fn component(&self, j: usize) -> ArrayView1<'_, f64> {
        self.draws.column(j)
    }
}

/// Point estimate with an equal-tailed credible (or confidence) interval.
/// `lower <= point <= upper` is not guaranteed: the bounds are percentiles
/// while the point is the mean.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IntervalEstimate {
    pub point: f64,
    pub se: f64,
    pub lower: f64,
    pub upper: f64,
    pub level: f64,
}

impl IntervalEstimate {
    pub fn contains(&self, value: f64) -> bool {
        self.lower <= value && value <= self.upper
    }

    pub fn length(&self) -> f64 {
        self.upper - self.lower
    }
}

/// Empirical quantile with linear interpolation between closest order
/// statistics (the common "type 7" rule): index `h = (n - 1) p` into the
/// sorted sample, interpolating between floor and ceil.
fn quantile_sorted(sorted: &[f64], p: f64) -> f64 {
    let n = sorted.len();
    debug_assert!(n >= 1);
    let h = (n as f64 - 1.0) * p;
    let lo = h.floor() as usize;
    let hi = h.ceil() as usize;
    if lo == hi {
        sorted[lo]
    } else {
        let w = h - lo as f64;
        sorted[lo] + w * (sorted[hi] - sorted[lo])
    }
}

/// Summarize one component's draws: mean, sample standard deviation, and
/// the equal-tailed `alpha/2` and `1 - alpha/2` percentiles.
///
/// A constant chain yields `se = 0` and a degenerate zero-width interval.
pub fn summarize_slice(values: &[f64], alpha: f64) -> Result<IntervalEstimate, InferenceError> {
    if values.len() < 2 {
        return Err(InferenceError::InsufficientDraws(values.len()));
    }
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(InferenceError::InvalidAlpha(alpha));
    }
    if let Some((i, _)) = values.iter().enumerate().find(|(_, v)| !v.is_finite()) {
        return Err(InferenceError::NonFiniteDraw(i));
    }
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    let ss: f64 = values.iter().map(|v| (v - mean) * (v - mean)).sum();
    let se = (ss / (n - 1.0)).sqrt();
    let mut sorted = values.to_vec();
    sorted.sort_by(|a, b| a.partial_cmp(b).expect("finite draws"));
    Ok(IntervalEstimate {
        point: mean,
        se,
        lower: quantile_sorted(&sorted, alpha / 2.0),
        upper: quantile_sorted(&sorted, 1.0 - alpha / 2.0),
        level: 1.0 - alpha,
    })
}

/// Summarize every component of the retained draws.
pub fn summarize(
    draws: &PosteriorDraws,
    alpha: f64,
) -> Result<Vec<IntervalEstimate>, InferenceError> {
    (0..draws.num_components())
        .map(|j| {
            let col = draws.component(j);
            summarize_slice(col.as_slice().unwrap_or(&col.to_vec()), alpha)
        })
        .collect()
}

/// Coverage/length/bias aggregate over one Monte Carlo cell.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CoverageStats {
    /// Fraction of intervals containing the true value.
    pub coverage: f64,
    /// Mean interval length.
    pub mean_length: f64,
    /// Absolute bias of the mean point estimate.
    pub abs_bias: f64,
    /// Signed mean error, retained alongside the absolute form.
    pub signed_bias: f64,
    pub count: usize,
}

/// Aggregate intervals and point estimates against the true `theta0`.
pub fn coverage_stats(
    intervals: &[IntervalEstimate],
    points: &[f64],
    theta0: f64,
) -> Result<CoverageStats, InferenceError> {
    if intervals.is_empty() {
        return Err(InferenceError::EmptyInput);
    }
    if intervals.len() != points.len() {
        return Err(InferenceError::LengthMismatch(intervals.len(), points.len()));
    }
    let m = intervals.len() as f64;
    let covered = intervals.iter().filter(|iv| iv.contains(theta0)).count();
    let mean_length = intervals.iter().map(IntervalEstimate::length).sum::<f64>() / m;
    let signed_bias = points.iter().sum::<f64>() / m - theta0;
    Ok(CoverageStats {
        coverage: covered as f64 / m,
        mean_length,
        abs_bias: signed_bias.abs(),
        signed_bias,
        count: intervals.len(),
    })
}
