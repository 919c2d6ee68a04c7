//! The variance-weighted projection `h(Z)` and the reparameterized nuisance
//! `phi`.
//!
//! For a binary treatment, `h(Z_i) = 1 / (1 + R_i)` with
//!
//! ```text
//! R_i = [ p0_i (1 - p0_i) (1 - pi_i) ] / [ p1_i (1 - p1_i) pi_i ]
//! ```
//!
//! where `p1`/`p0` are the outcome probabilities under treatment/control and
//! `pi` is the propensity. In words: the conditional mean of the treatment
//! weighted by the outcome variance in each treatment class. Raw `R_i`
//! overflows as soon as a fitted probability saturates, so all ratio
//! arithmetic happens in log space with inputs clamped away from 0 and 1,
//! and `h = logistic(-log R)`.

use ndarray::prelude::*;
use thiserror::Error;

use crate::model::{logistic, Dataset, Treatment};

/// Probabilities are clamped into `[PROB_FLOOR, 1 - PROB_FLOOR]` before any
/// ratio is formed.
pub const PROB_FLOOR: f64 = 1e-12;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ProjectionError {
    #[error("probability at row {0} is exactly 0 or 1")]
    DegenerateProbability(usize),
    #[error("treatment level {code} at row {row} outside 0..={max}")]
    LevelOutOfRange { row: usize, code: usize, max: usize },
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("level probabilities at row {0} do not sum to 1")]
    ProbabilitySumViolation(usize),
    #[error("variance at row {row} of level {level} outside (0, 0.25]")]
    VarianceOutOfRange { row: usize, level: usize },
}

/// Outcome probabilities under forced treatment (`p1`) and control (`p0`),
/// both evaluated at a sample of the nuisance parameters.
#[derive(Debug, Clone, PartialEq)]
pub struct OutcomeProbs {
    pub p1: Array1<f64>,
    pub p0: Array1<f64>,
}

impl OutcomeProbs {
    pub fn new(p1: Array1<f64>, p0: Array1<f64>) -> Result<Self, ProjectionError> {
        if p1.len() != p0.len() {
            return Err(ProjectionError::DimensionMismatch(format!(
                "p1 has {} entries, p0 has {}",
                p1.len(),
                p0.len()
            )));
        }
        for (i, (&a, &b)) in p1.iter().zip(p0.iter()).enumerate() {
            if !(a > 0.0 && a < 1.0 && b > 0.0 && b < 1.0) {
                return Err(ProjectionError::DegenerateProbability(i));
            }
        }
        Ok(Self { p1, p0 })
    }
}

/// Variance-weighted projections, one per row; entries lie strictly in (0, 1).
#[derive(Debug, Clone, PartialEq)]
pub struct ProjectionVec {
    pub h: Array1<f64>,
}

/// The reparameterized nuisance `phi_i = theta_tilde * h(Z_i) + Z_i' beta`.
#[derive(Debug, Clone, PartialEq)]
pub struct PhiVec {
    pub phi: Array1<f64>,
}

fn clamp_prob(p: f64) -> f64 {
    p.clamp(PROB_FLOOR, 1.0 - PROB_FLOOR)
}

/// Outcome probabilities for a binary treatment:
/// `p1_i = logistic(theta_tilde + Z_i' beta)`, `p0_i = logistic(Z_i' beta)`.
pub fn cond_outcome_probs(
    theta_tilde: f64,
    beta: &Array1<f64>,
    data: &Dataset,
) -> Result<OutcomeProbs, ProjectionError> {
    if beta.len() != data.d() {
        return Err(ProjectionError::DimensionMismatch(format!(
            "beta has {} entries for d = {}",
            beta.len(),
            data.d()
        )));
    }
    let eta = data.z().dot(beta);
    let p1 = eta.mapv(|e| clamp_prob(logistic(theta_tilde + e)));
    let p0 = eta.mapv(|e| clamp_prob(logistic(e)));
    Ok(OutcomeProbs { p1, p0 })
}

/// Outcome probabilities for dummy level `j` of a categorical treatment,
/// holding the other dummies at their observed values:
/// `p1_i = logistic(s_i + (1 - X^j_i) theta_tilde_j)` and
/// `p0_i = logistic(s_i - X^j_i theta_tilde_j)` where
/// `s_i = X_i' theta_tilde + Z_i' beta` is the observed predictor.
pub fn cond_outcome_probs_level(
    theta_tilde: &Array1<f64>,
    beta: &Array1<f64>,
    dummies: &Array2<f64>,
    data: &Dataset,
    j: usize,
) -> Result<OutcomeProbs, ProjectionError> {
    let k = dummies.ncols();
    if theta_tilde.len() != k || j >= k {
        return Err(ProjectionError::DimensionMismatch(format!(
            "theta_tilde has {} entries, dummies have {k} columns, level {j}",
            theta_tilde.len()
        )));
    }
    if beta.len() != data.d() {
        return Err(ProjectionError::DimensionMismatch(format!(
            "beta has {} entries for d = {}",
            beta.len(),
            data.d()
        )));
    }
    let mut s = data.z().dot(beta);
    s += &dummies.dot(theta_tilde);
    let tj = theta_tilde[j];
    let xj = dummies.column(j);
    let p1 = Array1::from_shape_fn(s.len(), |i| clamp_prob(logistic(s[i] + (1.0 - xj[i]) * tj)));
    let p0 = Array1::from_shape_fn(s.len(), |i| clamp_prob(logistic(s[i] - xj[i] * tj)));
    Ok(OutcomeProbs { p1, p0 })
}

/// Propensity estimates `logistic(Z_i' gamma)` from the working model for
/// the treatment. With `d = 0` this is the empty-model value 1/2.
pub fn propensity_probs(gamma: &Array1<f64>, data: &Dataset) -> Result<Array1<f64>, ProjectionError> {
    if gamma.len() != data.d() {
        return Err(ProjectionError::DimensionMismatch(format!(
            "gamma has {} entries for d = {}",
            gamma.len(),
            data.d()
        )));
    }
    Ok(data.z().dot(gamma).mapv(|e| clamp_prob(logistic(e))))
}

/// Two-class variance-weighted projection from class weights
/// `w_c = v_c * p_c`: returns `logistic(-(ln w0 - ln w1))`.
fn two_level_h(v0: f64, p_level0: f64, v1: f64, p_level1: f64) -> f64 {
    let log_r = (v0.ln() + p_level0.ln()) - (v1.ln() + p_level1.ln());
    logistic(-log_r)
}

/// Variance-weighted projection for a binary treatment.
pub fn vw_projection_binary(
    probs: &OutcomeProbs,
    propensity: &Array1<f64>,
) -> Result<ProjectionVec, ProjectionError> {
    let n = probs.p1.len();
    if propensity.len() != n {
        return Err(ProjectionError::DimensionMismatch(format!(
            "propensity has {} entries for n = {n}",
            propensity.len()
        )));
    }
    let mut h = Array1::zeros(n);
    for i in 0..n {
        let (p1, p0, pi) = (probs.p1[i], probs.p0[i], propensity[i]);
        for v in [p1, p0, pi] {
            if v <= 0.0 || v >= 1.0 {
                return Err(ProjectionError::DegenerateProbability(i));
            }
        }
        let (p1, p0, pi) = (clamp_prob(p1), clamp_prob(p0), clamp_prob(pi));
        let v1 = p1 * (1.0 - p1);
        let v0 = p0 * (1.0 - p0);
        h[i] = two_level_h(v0, 1.0 - pi, v1, pi);
    }
    Ok(ProjectionVec { h })
}

/// Variance-weighted projection for dummy level `j`: arithmetic identical to
/// the binary form applied with the level-`j` conditional probabilities and
/// propensity.
pub fn vw_projection_categorical(
    probs_j: &OutcomeProbs,
    propensity_j: &Array1<f64>,
) -> Result<ProjectionVec, ProjectionError> {
    vw_projection_binary(probs_j, propensity_j)
}

/// `phi_i = theta_tilde * h_i + Z_i' beta`.
pub fn reparam_phi(
    theta_tilde: f64,
    h: &ProjectionVec,
    beta: &Array1<f64>,
    data: &Dataset,
) -> Result<PhiVec, ProjectionError> {
    if h.h.len() != data.n() || beta.len() != data.d() {
        return Err(ProjectionError::DimensionMismatch(format!(
            "h has {} entries, beta {}, data ({}, {})",
            h.h.len(),
            beta.len(),
            data.n(),
            data.d()
        )));
    }
    let mut phi = data.z().dot(beta);
    phi.scaled_add(theta_tilde, &h.h);
    Ok(PhiVec { phi })
}

/// Categorical reparameterization `phi_i = sum_j theta_tilde_j h_i^j + Z_i' beta`.
pub fn reparam_phi_categorical(
    theta_tilde: &Array1<f64>,
    h_levels: &[ProjectionVec],
    beta: &Array1<f64>,
    data: &Dataset,
) -> Result<PhiVec, ProjectionError> {
    if h_levels.len() != theta_tilde.len() {
        return Err(ProjectionError::DimensionMismatch(format!(
            "{} projection levels for {} effects",
            h_levels.len(),
            theta_tilde.len()
        )));
    }
    let mut phi = data.z().dot(beta);
    for (t, h) in theta_tilde.iter().zip(h_levels) {
        if h.h.len() != data.n() {
            return Err(ProjectionError::DimensionMismatch(format!(
                "projection has {} entries for n = {}",
                h.h.len(),
                data.n()
            )));
        }
        phi.scaled_add(*t, &h.h);
    }
    Ok(PhiVec { phi })
}

/// Dummy-encode level codes in `{0, ..., k}` into an n x k indicator
/// matrix: column `j` flags rows with code `j + 1`; code 0 is the reference
/// with an all-zero row.
pub fn dummy_encode(codes: &[usize], k: usize) -> Result<Array2<f64>, ProjectionError> {
    let mut out = Array2::zeros((codes.len(), k));
    for (i, &c) in codes.iter().enumerate() {
        if c > k {
            return Err(ProjectionError::LevelOutOfRange {
                row: i,
                code: c,
                max: k,
            });
        }
        if c > 0 {
            out[[i, c - 1]] = 1.0;
        }
    }
    Ok(out)
}

/// Dummy matrix for any treatment: the 0/1 column itself when binary,
/// otherwise the indicator encoding of the level codes.
pub fn treatment_dummies(data: &Dataset) -> Result<Array2<f64>, ProjectionError> {
    match data.treatment() {
        Treatment::Binary(x) => Ok(x
            .view()
            .into_shape((x.len(), 1))
            .expect("column reshape")
            .to_owned()),
        Treatment::Categorical { codes, k } => dummy_encode(codes, *k),
    }
}

/// General variance-weighted projection for a discrete treatment with
/// levels `0..=K`:
///
/// ```text
/// h(Z_i) = sum_k k * Var(Y|X=k, Z_i) * P(X=k|Z_i) / sum_k Var(Y|X=k, Z_i) * P(X=k|Z_i)
/// ```
///
/// `var_by_level` and `p_by_level` hold K+1 vectors each. With K = 1 this
/// routes through the same two-class arithmetic as
/// [`vw_projection_binary`], so matching inputs reproduce it bit for bit.
pub fn vw_projection_general(
    var_by_level: &[Array1<f64>],
    p_by_level: &[Array1<f64>],
) -> Result<Array1<f64>, ProjectionError> {
    let levels = var_by_level.len();
    if levels < 2 || p_by_level.len() != levels {
        return Err(ProjectionError::DimensionMismatch(format!(
            "{} variance vectors vs {} probability vectors",
            levels,
            p_by_level.len()
        )));
    }
    let n = var_by_level[0].len();
    for v in var_by_level.iter().chain(p_by_level.iter()) {
        if v.len() != n {
            return Err(ProjectionError::DimensionMismatch(
                "ragged level vectors".to_string(),
            ));
        }
    }
    for i in 0..n {
        let total: f64 = p_by_level.iter().map(|p| p[i]).sum();
        if (total - 1.0).abs() > 1e-8 {
            return Err(ProjectionError::ProbabilitySumViolation(i));
        }
        for (level, v) in var_by_level.iter().enumerate() {
            if !(v[i] > 0.0 && v[i] <= 0.25) {
                return Err(ProjectionError::VarianceOutOfRange { row: i, level });
            }
        }
    }

    let mut h = Array1::zeros(n);
    if levels == 2 {
        for i in 0..n {
            h[i] = two_level_h(
                var_by_level[0][i],
                p_by_level[0][i],
                var_by_level[1][i],
                p_by_level[1][i],
            );
        }
        return Ok(h);
    }
    for i in 0..n {
        // log-domain weights normalized by the largest to dodge underflow
        let log_w: Vec<f64> = (0..levels)
            .map(|k| var_by_level[k][i].ln() + p_by_level[k][i].ln())
            .collect();
        let m = log_w.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        if !m.is_finite() {
            return Err(ProjectionError::DegenerateProbability(i));
        }
        let mut num = 0.0;
        let mut den = 0.0;
        for (k, lw) in log_w.iter().enumerate() {
            let w = (lw - m).exp();
            num += k as f64 * w;
            den += w;
        }
        h[i] = num / den;
    }
    Ok(h)
}
