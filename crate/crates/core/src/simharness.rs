//! Synthetic-data generation and the Monte Carlo coverage harness.
//!
//! The data-generating process follows the simulation design used for the
//! coverage studies: rows of `Z` are multivariate normal with AR(1)
//! covariance `H_ij = rho^|i-j|`, the treatment is Bernoulli with propensity
//! `logistic(Z gamma0)`, and the outcome Bernoulli with success probability
//! `logistic(theta0 X + Z beta0)`. Three estimators are available per
//! replication:
//!
//! - `CB`: the conditional-posterior Gibbs chain from [`crate::gibbs`];
//! - `ORACLE`: a low-dimensional logistic MLE on `X` plus the truly active
//!   nuisance columns, with Wald intervals (infeasible in practice, kept as
//!   the benchmark);
//! - `NAIVE`: post-selection logistic regression — an l1-penalized logistic
//!   fit on `Z` alone picks the nuisance support (BIC over a penalty grid),
//!   then a Wald interval comes from refitting `X` plus the selection.
//!
//! Replications map to independent RNG streams, so results do not depend on
//! the execution schedule.

use ndarray::prelude::*;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use statrs::distribution::{ContinuousCDF, Normal};
use std::fmt;
use std::time::Instant;
use thiserror::Error;

use crate::gibbs::{run_chain, ChainConfig, GibbsError};
use crate::inference::{coverage_stats, summarize, InferenceError, IntervalEstimate};
use crate::model::{derive_spike_slab, logistic, Dataset, ModelError, ThetaPrior, Treatment};

#[derive(Debug, Error)]
pub enum HarnessError {
    #[error("Newton-Raphson did not converge in {0} iterations")]
    Nonconvergence(usize),
    #[error("separation detected: |coefficient| = {0:.1} exceeds 30 on the logit scale")]
    Separation(f64),
    #[error("observed information is singular")]
    Singular,
    #[error("harness methods require a binary treatment")]
    UnsupportedTreatment,
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
    #[error("all {reps} replications failed for {method}")]
    AllReplicationsFailed { method: Method, reps: usize },
    #[error(transparent)]
    Gibbs(#[from] GibbsError),
    #[error(transparent)]
    Inference(#[from] InferenceError),
    #[error(transparent)]
    Model(#[from] ModelError),
}

/// One simulation cell: sizes, true signal, sparse truth, and AR
/// correlation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DgpConfig {
    pub n: usize,
    pub d: usize,
    pub theta0: f64,
    /// Sparse (index, value) pairs of the true outcome nuisance vector.
    pub beta0: Vec<(usize, f64)>,
    /// Sparse (index, value) pairs of the true propensity vector.
    pub gamma0: Vec<(usize, f64)>,
    pub rho: f64,
    pub seed: u64,
}

impl DgpConfig {
    /// The coefficient pattern used throughout the coverage tables:
    /// `beta = (-0.4, 0.8, -1, 1.5, 0, ...)`, `gamma = (0.3, -0.5, -1, 1.5, 0, ...)`,
    /// `rho = 0.5`.
    pub fn paper_design(n: usize, d: usize, theta0: f64, seed: u64) -> Self {
        Self {
            n,
            d,
            theta0,
            beta0: vec![(0, -0.4), (1, 0.8), (2, -1.0), (3, 1.5)],
            gamma0: vec![(0, 0.3), (1, -0.5), (2, -1.0), (3, 1.5)],
            rho: 0.5,
            seed,
        }
    }

    pub fn validate(&self) -> Result<(), HarnessError> {
        if self.n < 10 {
            return Err(HarnessError::InvalidConfig(format!(
                "n = {} below the minimum of 10",
                self.n
            )));
        }
        if self.rho.abs() >= 1.0 {
            return Err(HarnessError::InvalidConfig(format!(
                "|rho| must be below 1, got {}",
                self.rho
            )));
        }
        for &(idx, _) in self.beta0.iter().chain(self.gamma0.iter()) {
            if idx >= self.d {
                return Err(HarnessError::InvalidConfig(format!(
                    "coefficient index {idx} outside d = {}",
                    self.d
                )));
            }
        }
        Ok(())
    }

    pub fn beta0_dense(&self) -> Array1<f64> {
        sparse_to_dense(&self.beta0, self.d)
    }

    pub fn gamma0_dense(&self) -> Array1<f64> {
        sparse_to_dense(&self.gamma0, self.d)
    }

    /// Indices of the truly active outcome nuisance columns.
    pub fn beta_support(&self) -> Vec<usize> {
        self.beta0.iter().filter(|(_, v)| *v != 0.0).map(|(i, _)| *i).collect()
    }
}

fn sparse_to_dense(pairs: &[(usize, f64)], d: usize) -> Array1<f64> {
    let mut out = Array1::zeros(d);
    for &(i, v) in pairs {
        out[i] = v;
    }
    out
}

/// Estimators the harness can run.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    Cb,
    Oracle,
    Naive,
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Method::Cb => write!(f, "CB"),
            Method::Oracle => write!(f, "ORACLE"),
            Method::Naive => write!(f, "NAIVE"),
        }
    }
}

/// One aggregated report row. Equality ignores `wall_ms`, which is the only
/// non-reproducible field.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct McRow {
    pub method: Method,
    pub theta0: f64,
    pub n: usize,
    pub d: usize,
    pub coverage: f64,
    /// Monte Carlo standard error of the coverage estimate.
    pub mc_se: f64,
    pub length: f64,
    /// Absolute bias of the mean point estimate.
    pub bias: f64,
    pub signed_bias: f64,
    pub reps: usize,
    pub failures: usize,
    pub wall_ms: u64,
}

impl PartialEq for McRow {
    fn eq(&self, other: &Self) -> bool {
        self.method == other.method
            && self.theta0 == other.theta0
            && self.n == other.n
            && self.d == other.d
            && self.coverage == other.coverage
            && self.mc_se == other.mc_se
            && self.length == other.length
            && self.bias == other.bias
            && self.signed_bias == other.signed_bias
            && self.reps == other.reps
            && self.failures == other.failures
    }
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct McReport {
    pub rows: Vec<McRow>,
}

/// n x d design with AR(1) covariance `H_ij = rho^|i-j|` per row, generated
/// by the exact recursion `Z_1 ~ N(0,1)`, `Z_j = rho Z_{j-1} + sqrt(1-rho^2) e_j`.
pub fn gen_design(cfg: &DgpConfig, rng: &mut crate::randkit::RngStream) -> Array2<f64> {
    let scale = (1.0 - cfg.rho * cfg.rho).sqrt();
    let mut z = Array2::zeros((cfg.n, cfg.d));
    for i in 0..cfg.n {
        let mut prev = 0.0;
        for j in 0..cfg.d {
            let innov = rng.standard_normal();
            prev = if j == 0 { innov } else { cfg.rho * prev + scale * innov };
            z[[i, j]] = prev;
        }
    }
    z
}

/// Independent Bernoulli(logistic(predictor)) draws.
pub fn gen_binary(
    linear_predictor: &Array1<f64>,
    rng: &mut crate::randkit::RngStream,
) -> Array1<f64> {
    linear_predictor.mapv(|e| if rng.uniform() < logistic(e) { 1.0 } else { 0.0 })
}

/// Generate one replication's dataset from the DGP.
pub fn gen_dataset(
    cfg: &DgpConfig,
    rng: &mut crate::randkit::RngStream,
) -> Result<Dataset, HarnessError> {
    cfg.validate()?;
    let z = gen_design(cfg, rng);
    let x = gen_binary(&z.dot(&cfg.gamma0_dense()), rng);
    let mut eta = z.dot(&cfg.beta0_dense());
    eta.scaled_add(cfg.theta0, &x);
    let y = gen_binary(&eta, rng);
    Ok(Dataset::new(y, Treatment::Binary(x), z)?)
}

/// Full logistic MLE fit: coefficients, inverse observed information, and
/// the maximized log-likelihood.
#[derive(Debug, Clone)]
pub struct LogisticFit {
    pub coef: Array1<f64>,
    pub cov: Array2<f64>,
    pub log_lik: f64,
    pub iterations: usize,
}

const MAX_NEWTON_ITER: usize = 25;
const SEPARATION_BOUND: f64 = 30.0;

fn log_lik(design: &Array2<f64>, y: &Array1<f64>, coef: &Array1<f64>) -> f64 {
    let eta = design.dot(coef);
    eta.iter()
        .zip(y.iter())
        .map(|(&e, &yi)| yi * e - softplus(e))
        .sum()
}

fn softplus(u: f64) -> f64 {
    u.max(0.0) + (-u.abs()).exp().ln_1p()
}

/// Newton-Raphson logistic MLE with step halving. Errors with
/// [`HarnessError::Separation`] when a coefficient escapes past 30 on the
/// logit scale and [`HarnessError::Nonconvergence`] when the iteration cap
/// is exhausted.
pub fn newton_logistic(design: &Array2<f64>, y: &Array1<f64>) -> Result<LogisticFit, HarnessError> {
    let (n, p) = (design.nrows(), design.ncols());
    if n == 0 || p == 0 || y.len() != n {
        return Err(HarnessError::InvalidConfig(format!(
            "design is {n} x {p} with {} outcomes",
            y.len()
        )));
    }
    let mut coef = Array1::zeros(p);
    let mut current_ll = log_lik(design, y, &coef);
    for iter in 1..=MAX_NEWTON_ITER {
        let eta = design.dot(&coef);
        let mu = eta.mapv(logistic);
        let resid = y - &mu;
        let grad = design.t().dot(&resid);
        let hessian = weighted_gram(design, &mu);
        let l = crate::linalg::cholesky_lower(hessian).ok_or(HarnessError::Singular)?;
        let mut delta = grad.clone();
        crate::linalg::solve_lower(&l, &mut delta);
        crate::linalg::solve_lower_transpose(&l, &mut delta);

        let mut step = 1.0;
        let mut halvings = 0;
        let (next_coef, next_ll) = loop {
            let candidate = &coef + &(&delta * step);
            let ll = log_lik(design, y, &candidate);
            if ll >= current_ll - 1e-12 {
                break (candidate, ll);
            }
            halvings += 1;
            if halvings > 20 {
                return Err(HarnessError::Nonconvergence(iter));
            }
            step *= 0.5;
        };
        let move_size = delta.iter().map(|v| (v * step).abs()).fold(0.0, f64::max);
        let gain = next_ll - current_ll;
        coef = next_coef;
        current_ll = next_ll;
        if let Some(worst) = coef.iter().map(|c| c.abs()).reduce(f64::max) {
            if worst > SEPARATION_BOUND {
                return Err(HarnessError::Separation(worst));
            }
            // Separated fits walk the flat likelihood ridge at roughly one
            // logit per iteration; the cap alone would misreport them.
            if iter == MAX_NEWTON_ITER && move_size > 0.1 && gain < 1e-6 {
                return Err(HarnessError::Separation(worst));
            }
        }
        if move_size < 1e-10 {
            let eta = design.dot(&coef);
            let mu = eta.mapv(logistic);
            let hessian = weighted_gram(design, &mu);
            let cov = invert_spd(hessian)?;
            return Ok(LogisticFit {
                coef,
                cov,
                log_lik: current_ll,
                iterations: iter,
            });
        }
    }
    Err(HarnessError::Nonconvergence(MAX_NEWTON_ITER))
}

fn weighted_gram(design: &Array2<f64>, mu: &Array1<f64>) -> Array2<f64> {
    let p = design.ncols();
    let mut scaled = design.to_owned();
    for (mut row, &m) in scaled.rows_mut().into_iter().zip(mu.iter()) {
        row *= (m * (1.0 - m)).sqrt();
    }
    let mut gram = Array2::zeros((p, p));
    ndarray::linalg::general_mat_mul(1.0, &scaled.t(), &scaled, 0.0, &mut gram);
    gram
}

fn invert_spd(m: Array2<f64>) -> Result<Array2<f64>, HarnessError> {
    let p = m.nrows();
    let l = crate::linalg::cholesky_lower(m).ok_or(HarnessError::Singular)?;
    let mut inv = Array2::zeros((p, p));
    for j in 0..p {
        let mut col = Array1::zeros(p);
        col[j] = 1.0;
        crate::linalg::solve_lower(&l, &mut col);
        crate::linalg::solve_lower_transpose(&l, &mut col);
        inv.column_mut(j).assign(&col);
    }
    Ok(inv)
}

fn wald_interval(point: f64, se: f64, alpha: f64) -> IntervalEstimate {
    let z = Normal::standard().inverse_cdf(1.0 - alpha / 2.0);
    IntervalEstimate {
        point,
        se,
        lower: point - z * se,
        upper: point + z * se,
        level: 1.0 - alpha,
    }
}

/// Low-dimensional logistic refit of `Y` on `X` plus the given nuisance
/// columns; Wald interval from the inverse observed information.
pub fn oracle_fit(
    data: &Dataset,
    support: &[usize],
    alpha: f64,
) -> Result<IntervalEstimate, HarnessError> {
    let x = match data.treatment() {
        Treatment::Binary(x) => x,
        Treatment::Categorical { .. } => return Err(HarnessError::UnsupportedTreatment),
    };
    let (n, d) = (data.n(), data.d());
    if let Some(&bad) = support.iter().find(|&&j| j >= d) {
        return Err(HarnessError::InvalidConfig(format!(
            "support index {bad} outside d = {d}"
        )));
    }
    let mut design = Array2::zeros((n, 1 + support.len()));
    design.column_mut(0).assign(x);
    for (c, &j) in support.iter().enumerate() {
        design.column_mut(c + 1).assign(&data.z().column(j));
    }
    let fit = newton_logistic(&design, data.y())?;
    let se = fit.cov[[0, 0]].sqrt();
    Ok(wald_interval(fit.coef[0], se, alpha))
}

/// Result of one l1-penalized logistic fit.
#[derive(Debug, Clone)]
pub struct LassoFit {
    pub beta: Array1<f64>,
    /// Penalized objective after each full coordinate cycle; non-increasing.
    pub objective_trace: Vec<f64>,
    pub cycles: usize,
}

/// Cyclic coordinate descent for l1-penalized logistic regression using the
/// global curvature bound 1/4 (a majorize-minimize update, so the penalized
/// objective cannot increase no matter how coordinates are scheduled).
///
/// Full passes over all coordinates alternate with cycles restricted to the
/// current active set; the residual `logistic(eta) - y` is cached and
/// refreshed only when a coefficient actually moves.
pub fn lasso_logistic(
    y: &Array1<f64>,
    z: &Array2<f64>,
    lambda: f64,
    init: Option<&Array1<f64>>,
    max_cycles: usize,
    tol: f64,
) -> Result<LassoFit, HarnessError> {
    let (n, d) = (z.nrows(), z.ncols());
    if y.len() != n {
        return Err(HarnessError::InvalidConfig(format!(
            "{n} design rows vs {} outcomes",
            y.len()
        )));
    }
    let nf = n as f64;
    // contiguous columns: row j of the transpose is column j of z
    let zt: Array2<f64> = z.t().as_standard_layout().to_owned();
    let curvature: Vec<f64> = (0..d)
        .map(|j| zt.row(j).mapv(|v| v * v).sum() / (4.0 * nf))
        .collect();
    let mut beta = match init {
        Some(b) => b.clone(),
        None => Array1::zeros(d),
    };
    let mut eta = z.dot(&beta);
    let mut residual: Array1<f64> =
        Array1::from_shape_fn(n, |i| logistic(eta[i]) - y[i]);

    let objective = |eta: &Array1<f64>, beta: &Array1<f64>| -> f64 {
        let fit: f64 = eta
            .iter()
            .zip(y.iter())
            .map(|(&e, &yi)| softplus(e) - yi * e)
            .sum();
        fit / nf + lambda * beta.iter().map(|b| b.abs()).sum::<f64>()
    };

    // one majorized update of coordinate j; returns the coefficient change
    let update = |j: usize, beta: &mut Array1<f64>, eta: &mut Array1<f64>, residual: &mut Array1<f64>| -> f64 {
        if curvature[j] == 0.0 {
            return 0.0;
        }
        let col = zt.row(j);
        let grad = residual.dot(&col) / nf;
        let target = curvature[j] * beta[j] - grad;
        let new = soft_threshold(target, lambda) / curvature[j];
        let delta = new - beta[j];
        if delta != 0.0 {
            for i in 0..n {
                eta[i] += delta * col[i];
                residual[i] = logistic(eta[i]) - y[i];
            }
            beta[j] = new;
        }
        delta.abs()
    };

    let mut trace = Vec::with_capacity(64);
    let mut cycles = 0;
    while cycles < max_cycles {
        // full pass: every coordinate, growing the active set
        cycles += 1;
        let mut max_change = 0.0f64;
        for j in 0..d {
            max_change = max_change.max(update(j, &mut beta, &mut eta, &mut residual));
        }
        trace.push(objective(&eta, &beta));
        if max_change < tol {
            break;
        }
        // inner cycles over the active set until it stabilizes
        let active: Vec<usize> = (0..d).filter(|&j| beta[j] != 0.0).collect();
        while cycles < max_cycles {
            cycles += 1;
            let mut inner_change = 0.0f64;
            for &j in &active {
                inner_change = inner_change.max(update(j, &mut beta, &mut eta, &mut residual));
            }
            trace.push(objective(&eta, &beta));
            if inner_change < tol {
                break;
            }
        }
    }
    Ok(LassoFit {
        beta,
        objective_trace: trace,
        cycles,
    })
}

fn soft_threshold(v: f64, lambda: f64) -> f64 {
    if v > lambda {
        v - lambda
    } else if v < -lambda {
        v + lambda
    } else {
        0.0
    }
}

/// 50 log-spaced penalties from the smallest value that zeroes every
/// coefficient down to a hundredth of it (the usual floor when d exceeds n).
pub fn default_lasso_grid(y: &Array1<f64>, z: &Array2<f64>) -> Vec<f64> {
    let n = z.nrows() as f64;
    let mut lambda_max = 0.0f64;
    for j in 0..z.ncols() {
        let g: f64 = z
            .column(j)
            .iter()
            .zip(y.iter())
            .map(|(&zij, &yi)| (0.5 - yi) * zij)
            .sum::<f64>()
            / n;
        lambda_max = lambda_max.max(g.abs());
    }
    if lambda_max == 0.0 {
        lambda_max = 1e-3;
    }
    let len = 50;
    (0..len)
        .map(|i| lambda_max * 10f64.powf(-2.0 * i as f64 / (len - 1) as f64))
        .collect()
}

/// The selection stage of the NAIVE estimator: fit the lasso path on `Z`
/// alone (the treatment is held out) and pick the penalty by BIC.
pub fn naive_select(
    data: &Dataset,
    lasso_grid: &[f64],
) -> Result<Vec<usize>, HarnessError> {
    if lasso_grid.is_empty() {
        return Err(HarnessError::InvalidConfig("empty penalty grid".into()));
    }
    let (y, z) = (data.y(), data.z());
    let mut grid: Vec<f64> = lasso_grid.to_vec();
    grid.sort_by(|a, b| b.partial_cmp(a).unwrap());
    let n = data.n() as f64;
    // BIC cannot prefer supports this large: k ln n alone dwarfs any
    // log-likelihood gain left on the path, so stop descending there.
    let support_cap = (data.n() / 3).max(20);
    let mut warm: Option<Array1<f64>> = None;
    let mut best: Option<(f64, Vec<usize>)> = None;
    for &lambda in &grid {
        let fit = lasso_logistic(y, z, lambda, warm.as_ref(), 1000, 1e-6)?;
        let support: Vec<usize> = fit
            .beta
            .iter()
            .enumerate()
            .filter(|(_, b)| **b != 0.0)
            .map(|(j, _)| j)
            .collect();
        let support_size = support.len();
        let ll = log_lik(z, y, &fit.beta);
        let bic = -2.0 * ll + support_size as f64 * n.ln();
        if best.as_ref().map_or(true, |(b, _)| bic < *b) {
            best = Some((bic, support));
        }
        if support_size > support_cap {
            break;
        }
        warm = Some(fit.beta);
    }
    Ok(best.expect("nonempty grid").1)
}

/// Post-selection logistic regression: lasso-select nuisance columns, then
/// Wald inference from the low-dimensional refit of `X` plus the selection.
/// An empty selection falls back to regressing on `X` alone.
pub fn naive_fit(
    data: &Dataset,
    lasso_grid: &[f64],
    alpha: f64,
) -> Result<IntervalEstimate, HarnessError> {
    let support = naive_select(data, lasso_grid)?;
    oracle_fit(data, &support, alpha)
}

const STREAM_ROLE_DGP: u64 = 0;
const STREAM_ROLE_CHAIN: u64 = 1;

/// Stream id for (configuration, replication, role): replications never
/// share a stream, whatever the execution order.
fn stream_id(cfg_idx: usize, rep: usize, role: u64) -> u64 {
    ((cfg_idx as u64) << 32) | ((rep as u64) << 1) | role
}

struct RepResult {
    method: Method,
    outcome: Result<IntervalEstimate, HarnessError>,
    wall_ms: u64,
}

/// Run the Monte Carlo study: for every configuration and replication,
/// generate data on a dedicated stream, run each requested method, and
/// aggregate coverage, interval length, and bias. Per-replication failures
/// are excluded from the aggregates and surface in the `failures` count.
pub fn run_mc(
    cfgs: &[DgpConfig],
    methods: &[Method],
    reps: usize,
    chain: &ChainConfig,
    tp: &ThetaPrior,
    alpha: f64,
) -> Result<McReport, HarnessError> {
    if reps == 0 {
        return Err(HarnessError::InvalidConfig("reps must be >= 1".into()));
    }
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(HarnessError::InvalidConfig(format!(
            "alpha must lie in (0, 1), got {alpha}"
        )));
    }
    chain.validate()?;
    for cfg in cfgs {
        cfg.validate()?;
    }
    let mut rows = Vec::with_capacity(cfgs.len() * methods.len());
    for (ci, cfg) in cfgs.iter().enumerate() {
        let per_rep: Vec<Vec<RepResult>> = (0..reps)
            .into_par_iter()
            .map(|r| replicate(ci, r, cfg, methods, chain, tp, alpha))
            .collect();
        for &method in methods {
            let mut intervals = Vec::with_capacity(reps);
            let mut points = Vec::with_capacity(reps);
            let mut failures = 0usize;
            let mut wall_ms = 0u64;
            for rep in &per_rep {
                for res in rep.iter().filter(|res| res.method == method) {
                    wall_ms += res.wall_ms;
                    match &res.outcome {
                        Ok(iv) => {
                            intervals.push(*iv);
                            points.push(iv.point);
                        }
                        Err(_) => failures += 1,
                    }
                }
            }
            if intervals.is_empty() {
                return Err(HarnessError::AllReplicationsFailed { method, reps });
            }
            let stats = coverage_stats(&intervals, &points, cfg.theta0)?;
            let m = stats.count as f64;
            rows.push(McRow {
                method,
                theta0: cfg.theta0,
                n: cfg.n,
                d: cfg.d,
                coverage: stats.coverage,
                mc_se: (stats.coverage * (1.0 - stats.coverage) / m).sqrt(),
                length: stats.mean_length,
                bias: stats.abs_bias,
                signed_bias: stats.signed_bias,
                reps: stats.count,
                failures,
                wall_ms,
            });
        }
    }
    Ok(McReport { rows })
}

fn replicate(
    cfg_idx: usize,
    rep: usize,
    cfg: &DgpConfig,
    methods: &[Method],
    chain: &ChainConfig,
    tp: &ThetaPrior,
    alpha: f64,
) -> Vec<RepResult> {
    let mut dgp_rng =
        crate::randkit::RngStream::new(cfg.seed, stream_id(cfg_idx, rep, STREAM_ROLE_DGP));
    let data = gen_dataset(cfg, &mut dgp_rng);
    methods
        .iter()
        .map(|&method| {
            let started = Instant::now();
            let outcome = match &data {
                Err(e) => Err(HarnessError::InvalidConfig(e.to_string())),
                Ok(data) => run_method(cfg_idx, rep, method, cfg, data, chain, tp, alpha),
            };
            RepResult {
                method,
                outcome,
                wall_ms: started.elapsed().as_millis() as u64,
            }
        })
        .collect()
}

#[allow(clippy::too_many_arguments)]
fn run_method(
    cfg_idx: usize,
    rep: usize,
    method: Method,
    cfg: &DgpConfig,
    data: &Dataset,
    chain: &ChainConfig,
    tp: &ThetaPrior,
    alpha: f64,
) -> Result<IntervalEstimate, HarnessError> {
    match method {
        Method::Cb => {
            let ss = derive_spike_slab(cfg.n, cfg.d);
            let mut chain_cfg = *chain;
            chain_cfg.stream_id = stream_id(cfg_idx, rep, STREAM_ROLE_CHAIN);
            let draws = run_chain(data, &ss, tp, &chain_cfg)?;
            Ok(summarize(&draws, alpha)?[0])
        }
        Method::Oracle => oracle_fit(data, &cfg.beta_support(), alpha),
        Method::Naive => {
            let grid = default_lasso_grid(data.y(), data.z());
            naive_fit(data, &grid, alpha)
        }
    }
}
