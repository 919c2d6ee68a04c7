//! Polya-Gamma Gibbs samplers for the three conditional posteriors and the
//! sweep composition that yields treatment-effect draws.
//!
//! Each sweep runs, in order:
//!
//! 1. the propensity block: `omega2 ~ PG(1, Z gamma)` then a Gaussian draw of
//!    `gamma` under its spike-and-slab prior, then its inclusion indicators;
//! 2. the nuisance block: `omega1 ~ PG(1, D [theta_tilde; beta])` with
//!    `D = [X, Z]`, a joint Gaussian draw of `(theta_tilde, beta)`, then the
//!    indicators for `beta`;
//! 3. the projection assembly: outcome probabilities, propensities, the
//!    variance-weighted projection `h`, and `phi`;
//! 4. the theta block: `omega3 ~ PG(1, theta (X - h) + phi)` and a Gaussian
//!    draw of `theta` against the orthogonalized covariate `X - h`.
//!
//! The PG augmentation turns every logistic conditional into a Gaussian one,
//! so each block reduces to forming a precision matrix `B' Omega B + prior`
//! and drawing through its Cholesky factor. Blocks 1 and 2 condition on
//! disjoint quantities, so their relative order does not change the
//! stationary distribution.

use ndarray::linalg::general_mat_mul;
use ndarray::prelude::*;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::inference::{DrawsMeta, InferenceError, PosteriorDraws};
use crate::model::{logistic, Dataset, ModelError, SpikeSlabPrior, ThetaPrior};
use crate::projection::{
    cond_outcome_probs_level, propensity_probs, reparam_phi_categorical, treatment_dummies,
    vw_projection_categorical, PhiVec, ProjectionError, ProjectionVec,
};
use crate::randkit::{bernoulli_draw, mvn_draw_canonical, pg_draw, RandError, RngStream};

const LN_2PI: f64 = 1.8378770664093453;

#[derive(Debug, Error)]
pub enum GibbsError {
    #[error(transparent)]
    Rand(#[from] RandError),
    #[error(transparent)]
    Projection(#[from] ProjectionError),
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error(transparent)]
    Inference(#[from] InferenceError),
    #[error("invalid chain configuration: {0}")]
    InvalidConfig(String),
    #[error("state dimensions do not match the data: {0}")]
    StateMismatch(String),
}

/// State of the `(theta_tilde, beta)` block: coefficients, spike-and-slab
/// indicators, and the PG latents for the outcome model.
#[derive(Debug, Clone, PartialEq)]
pub struct NuisanceState {
    pub theta_tilde: Array1<f64>,
    pub beta: Array1<f64>,
    pub i1: Vec<bool>,
    pub omega1: Array1<f64>,
}

/// State of one propensity block `gamma^j` with its indicators and PG
/// latents for the treatment working model.
#[derive(Debug, Clone, PartialEq)]
pub struct PropensityState {
    pub gamma: Array1<f64>,
    pub i2: Vec<bool>,
    pub omega2: Array1<f64>,
}

/// State of the treatment-effect block.
#[derive(Debug, Clone, PartialEq)]
pub struct ThetaState {
    pub theta: Array1<f64>,
    pub omega3: Array1<f64>,
}

/// The full joint Gibbs state; `propensity` holds one block per dummy level.
#[derive(Debug, Clone, PartialEq)]
pub struct ChainState {
    pub nuisance: NuisanceState,
    pub propensity: Vec<PropensityState>,
    pub theta: ThetaState,
}

/// Chain length, burn-in, thinning, and the stream key.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ChainConfig {
    pub iterations: usize,
    pub burn_in: usize,
    pub thin: usize,
    pub seed: u64,
    pub stream_id: u64,
}

impl Default for ChainConfig {
    fn default() -> Self {
        Self {
            iterations: 6000,
            burn_in: 1000,
            thin: 1,
            seed: 0,
            stream_id: 0,
        }
    }
}

impl ChainConfig {
    pub fn validate(&self) -> Result<(), GibbsError> {
        if self.burn_in >= self.iterations {
            return Err(GibbsError::InvalidConfig(format!(
                "burn_in {} must be below iterations {}",
                self.burn_in, self.iterations
            )));
        }
        if self.thin == 0 {
            return Err(GibbsError::InvalidConfig("thin must be >= 1".into()));
        }
        Ok(())
    }

    pub fn retained(&self) -> usize {
        (self.iterations - self.burn_in).div_ceil(self.thin)
    }
}

/// Relative order of the two nuisance blocks inside a sweep. They condition
/// on disjoint quantities, so both orders target the same joint posterior.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SweepOrder {
    PropensityFirst,
    NuisanceFirst,
}

/// Log-space spike-and-slab inclusion probability
/// `q phi(b; 0, tau1^2) / [(1-q) phi(b; 0, tau0^2) + q phi(b; 0, tau1^2)]`.
pub fn spike_slab_inclusion_probability(coef: f64, ss: &SpikeSlabPrior) -> f64 {
    let log_odds = ss.q.ln() - (1.0 - ss.q).ln() + ln_normal_pdf(coef, ss.tau1_sq)
        - ln_normal_pdf(coef, ss.tau0_sq);
    logistic(log_odds)
}

fn ln_normal_pdf(x: f64, var: f64) -> f64 {
    -0.5 * (LN_2PI + var.ln() + x * x / var)
}

/// Precision and shift of the Gaussian conditional for a PG-augmented
/// logistic block: `precision = B' Omega B + diag(prior_precision)` where
/// `B` is the design. The draw is `N(precision^-1 shift, precision^-1)`.
fn gaussian_block_precision(
    design: &ArrayView2<'_, f64>,
    omega: &Array1<f64>,
    prior_precision: &Array1<f64>,
) -> Array2<f64> {
    let p = design.ncols();
    let mut scaled = design.to_owned();
    for (mut row, &w) in scaled.rows_mut().into_iter().zip(omega.iter()) {
        row *= w.sqrt();
    }
    let mut precision = Array2::zeros((p, p));
    general_mat_mul(1.0, &scaled.t(), &scaled, 0.0, &mut precision);
    for j in 0..p {
        precision[[j, j]] += prior_precision[j];
    }
    precision
}

/// Posterior mean of a PG-augmented block, exposed for cross-checking the
/// draws against a dense solve.
#[cfg_attr(not(test), allow(dead_code))]
pub(crate) fn gaussian_block_mean(
    design: &ArrayView2<'_, f64>,
    omega: &Array1<f64>,
    prior_precision: &Array1<f64>,
    shift: &Array1<f64>,
) -> Result<Array1<f64>, GibbsError> {
    let precision = gaussian_block_precision(design, omega, prior_precision);
    let l = crate::linalg::cholesky_lower(precision).ok_or(RandError::FactorizationFailure)?;
    let mut mean = shift.clone();
    crate::linalg::solve_lower(&l, &mut mean);
    crate::linalg::solve_lower_transpose(&l, &mut mean);
    Ok(mean)
}

fn draw_gaussian_block(
    rng: &mut RngStream,
    design: &ArrayView2<'_, f64>,
    omega: &Array1<f64>,
    prior_precision: &Array1<f64>,
    shift: &Array1<f64>,
) -> Result<Array1<f64>, GibbsError> {
    let precision = gaussian_block_precision(design, omega, prior_precision);
    Ok(mvn_draw_canonical(rng, shift, precision)?)
}

/// Precision and shift of the theta conditional given the orthogonalized
/// covariate `x_tilde = X - h(Z)` and the offset `phi`.
pub(crate) fn theta_gaussian_params(
    y: &Array1<f64>,
    x_tilde: &Array2<f64>,
    phi: &Array1<f64>,
    omega3: &Array1<f64>,
    lambda: f64,
) -> (Array2<f64>, Array1<f64>) {
    let k = x_tilde.ncols();
    let mut precision = Array2::zeros((k, k));
    let mut shift = Array1::zeros(k);
    for i in 0..y.len() {
        let w = omega3[i];
        let row = x_tilde.row(i);
        let resid = (y[i] - 0.5) - w * phi[i];
        for a in 0..k {
            shift[a] += row[a] * resid;
            for b in 0..k {
                precision[[a, b]] += w * row[a] * row[b];
            }
        }
    }
    for a in 0..k {
        precision[[a, a]] += 1.0 / lambda;
    }
    (precision, shift)
}

/// One transition of the theta kernel: refresh `omega3` from
/// `PG(1, x_tilde' theta + phi)` and redraw `theta` from its Gaussian
/// conditional.
fn theta_kernel_step(
    y: &Array1<f64>,
    x_tilde: &Array2<f64>,
    phi: &Array1<f64>,
    lambda: f64,
    state: &mut ThetaState,
    rng: &mut RngStream,
) -> Result<(), GibbsError> {
    let eta = x_tilde.dot(&state.theta) + phi;
    for (w, &e) in state.omega3.iter_mut().zip(eta.iter()) {
        *w = pg_draw(rng, e);
    }
    let (precision, shift) = theta_gaussian_params(y, x_tilde, phi, &state.omega3, lambda);
    state.theta = mvn_draw_canonical(rng, &shift, precision)?;
    Ok(())
}

/// Sweep engine over one dataset: holds the assembled design `[X, Z]` and
/// the constant shift vectors `D'(Y - 1/2)` and `Z'(X^j - 1/2)`.
pub struct GibbsSampler<'a> {
    data: &'a Dataset,
    ss: SpikeSlabPrior,
    tp: ThetaPrior,
    dummies: Array2<f64>,
    design: Array2<f64>,
    shift_nuisance: Array1<f64>,
    shift_propensity: Vec<Array1<f64>>,
}

impl<'a> GibbsSampler<'a> {
    pub fn new(data: &'a Dataset, ss: SpikeSlabPrior, tp: ThetaPrior) -> Result<Self, GibbsError> {
        let dummies = treatment_dummies(data)?;
        let (n, k, d) = (data.n(), dummies.ncols(), data.d());
        let mut design = Array2::zeros((n, k + d));
        design.slice_mut(s![.., ..k]).assign(&dummies);
        design.slice_mut(s![.., k..]).assign(data.z());
        let centered_y = data.y().mapv(|v| v - 0.5);
        let shift_nuisance = design.t().dot(&centered_y);
        let shift_propensity = (0..k)
            .map(|j| {
                let centered_x = dummies.column(j).mapv(|v| v - 0.5);
                data.z().t().dot(&centered_x)
            })
            .collect();
        Ok(Self {
            data,
            ss,
            tp,
            dummies,
            design,
            shift_nuisance,
            shift_propensity,
        })
    }

    pub fn num_effects(&self) -> usize {
        self.dummies.ncols()
    }

    /// Neutral start: zero coefficients, all indicators inactive, and every
    /// PG latent at 1/4 (the PG(1, 0) mean).
    pub fn initial_state(&self) -> ChainState {
        let (n, k, d) = (self.data.n(), self.num_effects(), self.data.d());
        ChainState {
            nuisance: NuisanceState {
                theta_tilde: Array1::zeros(k),
                beta: Array1::zeros(d),
                i1: vec![false; d],
                omega1: Array1::from_elem(n, 0.25),
            },
            propensity: (0..k)
                .map(|_| PropensityState {
                    gamma: Array1::zeros(d),
                    i2: vec![false; d],
                    omega2: Array1::from_elem(n, 0.25),
                })
                .collect(),
            theta: ThetaState {
                theta: Array1::zeros(k),
                omega3: Array1::from_elem(n, 0.25),
            },
        }
    }

    /// S1: refresh `omega1`, redraw `(theta_tilde, beta)` jointly, then the
    /// inclusion indicators from the new `beta`.
    pub fn step_nuisance(
        &self,
        state: &mut NuisanceState,
        rng: &mut RngStream,
    ) -> Result<(), GibbsError> {
        let (k, d) = (self.num_effects(), self.data.d());
        if state.theta_tilde.len() != k || state.beta.len() != d {
            return Err(GibbsError::StateMismatch(format!(
                "nuisance state has ({}, {}) coefficients for (k, d) = ({k}, {d})",
                state.theta_tilde.len(),
                state.beta.len()
            )));
        }
        let mut coef = Array1::zeros(k + d);
        coef.slice_mut(s![..k]).assign(&state.theta_tilde);
        coef.slice_mut(s![k..]).assign(&state.beta);

        let eta = self.design.dot(&coef);
        for (w, &e) in state.omega1.iter_mut().zip(eta.iter()) {
            *w = pg_draw(rng, e);
        }

        let mut prior_precision = Array1::zeros(k + d);
        for j in 0..k {
            prior_precision[j] = 1.0 / self.tp.lambda;
        }
        for j in 0..d {
            let var = if state.i1[j] { self.ss.tau1_sq } else { self.ss.tau0_sq };
            prior_precision[k + j] = 1.0 / var;
        }
        let draw = draw_gaussian_block(
            rng,
            &self.design.view(),
            &state.omega1,
            &prior_precision,
            &self.shift_nuisance,
        )?;
        state.theta_tilde.assign(&draw.slice(s![..k]));
        state.beta.assign(&draw.slice(s![k..]));

        for j in 0..d {
            let p = spike_slab_inclusion_probability(state.beta[j], &self.ss);
            state.i1[j] = bernoulli_draw(rng, p)?;
        }
        Ok(())
    }

    /// S2 for dummy level `level`: refresh `omega2`, redraw `gamma`, then
    /// its indicators. A no-op when `d = 0`.
    pub fn step_propensity(
        &self,
        state: &mut PropensityState,
        level: usize,
        rng: &mut RngStream,
    ) -> Result<(), GibbsError> {
        let d = self.data.d();
        if state.gamma.len() != d {
            return Err(GibbsError::StateMismatch(format!(
                "gamma has {} entries for d = {d}",
                state.gamma.len()
            )));
        }
        if level >= self.num_effects() {
            return Err(GibbsError::StateMismatch(format!(
                "propensity level {level} for {} effects",
                self.num_effects()
            )));
        }
        let eta = self.data.z().dot(&state.gamma);
        for (w, &e) in state.omega2.iter_mut().zip(eta.iter()) {
            *w = pg_draw(rng, e);
        }
        if d == 0 {
            return Ok(());
        }
        let prior_precision = Array1::from_shape_fn(d, |j| {
            1.0 / if state.i2[j] { self.ss.tau1_sq } else { self.ss.tau0_sq }
        });
        state.gamma = draw_gaussian_block(
            rng,
            &self.data.z().view(),
            &state.omega2,
            &prior_precision,
            &self.shift_propensity[level],
        )?;
        for j in 0..d {
            let p = spike_slab_inclusion_probability(state.gamma[j], &self.ss);
            state.i2[j] = bernoulli_draw(rng, p)?;
        }
        Ok(())
    }

    /// Assemble the variance-weighted projections (one per dummy level) and
    /// `phi` from the current nuisance and propensity samples.
    pub fn projections(
        &self,
        nuisance: &NuisanceState,
        propensity: &[PropensityState],
    ) -> Result<(Vec<ProjectionVec>, PhiVec), GibbsError> {
        let k = self.num_effects();
        if propensity.len() != k {
            return Err(GibbsError::StateMismatch(format!(
                "{} propensity blocks for {k} effects",
                propensity.len()
            )));
        }
        let mut h_levels = Vec::with_capacity(k);
        for (j, prop) in propensity.iter().enumerate() {
            let probs = cond_outcome_probs_level(
                &nuisance.theta_tilde,
                &nuisance.beta,
                &self.dummies,
                self.data,
                j,
            )?;
            let pi = propensity_probs(&prop.gamma, self.data)?;
            h_levels.push(vw_projection_categorical(&probs, &pi)?);
        }
        let phi =
            reparam_phi_categorical(&nuisance.theta_tilde, &h_levels, &nuisance.beta, self.data)?;
        Ok((h_levels, phi))
    }

    /// S3: refresh `omega3` and redraw `theta` against `X - h`.
    pub fn step_theta(
        &self,
        state: &mut ThetaState,
        h_levels: &[ProjectionVec],
        phi: &PhiVec,
        rng: &mut RngStream,
    ) -> Result<(), GibbsError> {
        let (n, k) = (self.data.n(), self.num_effects());
        if h_levels.len() != k || state.theta.len() != k {
            return Err(GibbsError::StateMismatch(format!(
                "{} projection levels, theta has {} entries, k = {k}",
                h_levels.len(),
                state.theta.len()
            )));
        }
        let mut x_tilde = self.dummies.clone();
        for (j, h) in h_levels.iter().enumerate() {
            if h.h.len() != n {
                return Err(GibbsError::StateMismatch(format!(
                    "projection level {j} has {} entries for n = {n}",
                    h.h.len()
                )));
            }
            let mut col = x_tilde.column_mut(j);
            col -= &h.h;
        }
        theta_kernel_step(self.data.y(), &x_tilde, &phi.phi, self.tp.lambda, state, rng)
    }

    /// One full sweep in the default order; returns the new theta draw.
    pub fn sweep(
        &self,
        state: &mut ChainState,
        rng: &mut RngStream,
    ) -> Result<Array1<f64>, GibbsError> {
        self.sweep_ordered(state, rng, SweepOrder::PropensityFirst)
    }

    /// One full sweep with an explicit block order.
    pub fn sweep_ordered(
        &self,
        state: &mut ChainState,
        rng: &mut RngStream,
        order: SweepOrder,
    ) -> Result<Array1<f64>, GibbsError> {
        match order {
            SweepOrder::PropensityFirst => {
                for (j, prop) in state.propensity.iter_mut().enumerate() {
                    self.step_propensity(prop, j, rng)?;
                }
                self.step_nuisance(&mut state.nuisance, rng)?;
            }
            SweepOrder::NuisanceFirst => {
                self.step_nuisance(&mut state.nuisance, rng)?;
                for (j, prop) in state.propensity.iter_mut().enumerate() {
                    self.step_propensity(prop, j, rng)?;
                }
            }
        }
        let (h_levels, phi) = self.projections(&state.nuisance, &state.propensity)?;
        self.step_theta(&mut state.theta, &h_levels, &phi, rng)?;
        Ok(state.theta.theta.clone())
    }
}

fn run_chain_ordered(
    data: &Dataset,
    ss: &SpikeSlabPrior,
    tp: &ThetaPrior,
    config: &ChainConfig,
    order: SweepOrder,
) -> Result<PosteriorDraws, GibbsError> {
    config.validate()?;
    let sampler = GibbsSampler::new(data, *ss, *tp)?;
    let mut rng = RngStream::new(config.seed, config.stream_id);
    let mut state = sampler.initial_state();
    let k = sampler.num_effects();
    let mut retained = Array2::zeros((config.retained(), k));
    let mut row = 0;
    for t in 0..config.iterations {
        let draw = sampler.sweep_ordered(&mut state, &mut rng, order)?;
        if t >= config.burn_in && (t - config.burn_in) % config.thin == 0 {
            retained.row_mut(row).assign(&draw);
            row += 1;
        }
    }
    debug_assert_eq!(row, config.retained());
    let meta = DrawsMeta {
        seed: config.seed,
        stream_id: config.stream_id,
        config_digest: chain_digest(data, ss, tp, config),
    };
    Ok(PosteriorDraws::new(retained, meta)?)
}

/// Run the full Gibbs chain: burn-in sweeps are discarded and the remainder
/// thinned by the configured stride. Identical `(seed, stream_id, config,
/// data)` reproduce bit-identical draws.
pub fn run_chain(
    data: &Dataset,
    ss: &SpikeSlabPrior,
    tp: &ThetaPrior,
    config: &ChainConfig,
) -> Result<PosteriorDraws, GibbsError> {
    run_chain_ordered(data, ss, tp, config, SweepOrder::PropensityFirst)
}

/// Variant of [`run_chain`] with the two nuisance blocks exchanged; targets
/// the same posterior and exists to make that checkable.
pub fn run_chain_nuisance_first(
    data: &Dataset,
    ss: &SpikeSlabPrior,
    tp: &ThetaPrior,
    config: &ChainConfig,
) -> Result<PosteriorDraws, GibbsError> {
    run_chain_ordered(data, ss, tp, config, SweepOrder::NuisanceFirst)
}

/// Run the theta block alone against a fixed orthogonalized covariate
/// `x_tilde = X - h` and offset `phi`. This is the one-parameter logistic
/// kernel whose stationary density is available in closed form up to a
/// normalizing constant, which makes it the natural quadrature target.
pub fn run_theta_chain(
    y: &Array1<f64>,
    x_tilde: &Array2<f64>,
    phi: &Array1<f64>,
    tp: &ThetaPrior,
    config: &ChainConfig,
) -> Result<PosteriorDraws, GibbsError> {
    config.validate()?;
    let n = y.len();
    if x_tilde.nrows() != n || phi.len() != n {
        return Err(GibbsError::StateMismatch(format!(
            "x_tilde has {} rows and phi {} entries for n = {n}",
            x_tilde.nrows(),
            phi.len()
        )));
    }
    let k = x_tilde.ncols();
    let mut rng = RngStream::new(config.seed, config.stream_id);
    let mut state = ThetaState {
        theta: Array1::zeros(k),
        omega3: Array1::from_elem(n, 0.25),
    };
    let mut retained = Array2::zeros((config.retained(), k));
    let mut row = 0;
    for t in 0..config.iterations {
        theta_kernel_step(y, x_tilde, phi, tp.lambda, &mut state, &mut rng)?;
        if t >= config.burn_in && (t - config.burn_in) % config.thin == 0 {
            retained.row_mut(row).assign(&state.theta);
            row += 1;
        }
    }
    let meta = DrawsMeta {
        seed: config.seed,
        stream_id: config.stream_id,
        config_digest: format!("theta-only:n={n};k={k};lambda={};", tp.lambda),
    };
    Ok(PosteriorDraws::new(retained, meta)?)
}

/// Hex digest of everything that determines the draw sequence.
fn chain_digest(
    data: &Dataset,
    ss: &SpikeSlabPrior,
    tp: &ThetaPrior,
    config: &ChainConfig,
) -> String {
    let mut hasher = Sha256::new();
    hasher.update(format!(
        "n={};d={};k={};tau0={:.17e};tau1={:.17e};q={:.17e};lambda={:.17e};it={};burn={};thin={};seed={};stream={}",
        data.n(),
        data.d(),
        data.treatment().num_effects(),
        ss.tau0_sq,
        ss.tau1_sq,
        ss.q,
        tp.lambda,
        config.iterations,
        config.burn_in,
        config.thin,
        config.seed,
        config.stream_id,
    ));
    let out = hasher.finalize();
    out.iter().map(|b| format!("{b:02x}")).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{derive_spike_slab, Treatment};
    use crate::simharness::{gen_binary, gen_design, DgpConfig};

    fn small_dataset(n: usize, d: usize, seed: u64) -> Dataset {
        let cfg = DgpConfig::paper_design(n, d, 0.3, seed);
        let mut rng = RngStream::new(seed, 0);
        let z = gen_design(&cfg, &mut rng);
        let x = gen_binary(&z.dot(&cfg.gamma0_dense()), &mut rng);
        let eta = z.dot(&cfg.beta0_dense()) + &(x.mapv(|v| v * cfg.theta0));
        let y = gen_binary(&eta, &mut rng);
        Dataset::new(y, Treatment::Binary(x), z).unwrap()
    }

    #[test]
    fn inclusion_probability_matches_density_ratio_oracle() {
        // direct-density arithmetic, no logs
        let ss = SpikeSlabPrior {
            tau0_sq: 0.0025,
            tau1_sq: 11.63528479147543,
            q: 0.02,
        };
        let pdf = |x: f64, var: f64| (-0.5 * x * x / var).exp() / (2.0 * std::f64::consts::PI * var).sqrt();
        let oracle = |b: f64| {
            let s = ss.q * pdf(b, ss.tau1_sq);
            s / ((1.0 - ss.q) * pdf(b, ss.tau0_sq) + s)
        };
        let got = spike_slab_inclusion_probability(0.0, &ss);
        assert!((got - oracle(0.0)).abs() < 1e-12);
        assert!((got - 2.9905806346072104e-4).abs() < 1e-12, "got {got}");
        // far in the slab tail the spike density underflows but the
        // log-space path stays exact
        let got = spike_slab_inclusion_probability(1.5, &ss);
        assert!(got > 0.999_999);
    }

    #[test]
    fn theta_conditional_hand_value() {
        // n=1, x_tilde=1, phi=0, omega3=1/4, y=1, lambda=10
        let y = array![1.0];
        let x_tilde = array![[1.0]];
        let phi = array![0.0];
        let omega3 = array![0.25];
        let (prec, shift) = theta_gaussian_params(&y, &x_tilde, &phi, &omega3, 10.0);
        let mean = shift[0] / prec[[0, 0]];
        let var = 1.0 / prec[[0, 0]];
        assert!((mean - 0.5 / 0.35).abs() < 1e-12, "mean={mean}");
        assert!((var - 1.0 / 0.35).abs() < 1e-12, "var={var}");
    }

    #[test]
    fn theta_prior_recovery_when_x_tilde_zero() {
        // x_tilde = 0 makes the conditional exactly N(0, lambda)
        let n = 8;
        let y = Array1::from_elem(n, 1.0);
        let x_tilde = Array2::zeros((n, 1));
        let phi = Array1::zeros(n);
        let tp = ThetaPrior::new(10.0).unwrap();
        let config = ChainConfig {
            iterations: 20_000,
            burn_in: 0,
            thin: 1,
            seed: 77,
            stream_id: 0,
        };
        let draws = run_theta_chain(&y, &x_tilde, &phi, &tp, &config).unwrap();
        let col = draws.component(0);
        let mean = col.mean().unwrap();
        let var = col.mapv(|v| v * v).mean().unwrap() - mean * mean;
        assert!(mean.abs() < 0.1, "mean={mean}");
        assert!((var - 10.0).abs() < 0.5, "var={var}");
    }

    #[test]
    fn gaussian_block_mean_matches_dense_solve() {
        // fixed omega = 1/4: mean solves (D' Omega D + Lambda^-1) m = D'(y - 1/2)
        let design = array![
            [1.0, 0.2, -0.3],
            [0.0, -1.1, 0.5],
            [1.0, 0.4, 0.9],
            [0.0, 0.0, -0.7],
            [1.0, -0.6, 0.1],
            [0.0, 1.3, 0.2],
        ];
        let y = array![1.0, 0.0, 1.0, 0.0, 0.0, 1.0];
        let omega = Array1::from_elem(6, 0.25);
        let prior_precision = array![0.1, 400.0, 400.0];
        let shift = design.t().dot(&y.mapv(|v| v - 0.5));
        let mean = gaussian_block_mean(&design.view(), &omega, &prior_precision, &shift).unwrap();

        // independent oracle: build the system by hand and do Gaussian
        // elimination with partial pivoting
        let p = 3;
        let mut a = vec![vec![0.0f64; p + 1]; p];
        for r in 0..p {
            for c in 0..p {
                let mut acc = 0.0;
                for i in 0..6 {
                    acc += design[[i, r]] * 0.25 * design[[i, c]];
                }
                if r == c {
                    acc += prior_precision[r];
                }
                a[r][c] = acc;
            }
            a[r][p] = shift[r];
        }
        for col in 0..p {
            let piv = (col..p).max_by(|&i, &j| a[i][col].abs().partial_cmp(&a[j][col].abs()).unwrap()).unwrap();
            a.swap(col, piv);
            for r in 0..p {
                if r != col {
                    let f = a[r][col] / a[col][col];
                    for c in col..=p {
                        a[r][c] -= f * a[col][c];
                    }
                }
            }
        }
        for r in 0..p {
            let want = a[r][p] / a[r][r];
            assert!((mean[r] - want).abs() < 1e-10, "coef {r}: {} vs {want}", mean[r]);
        }
    }

    #[test]
    fn empty_design_recovers_prior() {
        // no rows: the conditional is exactly the prior N(0, Lambda)
        let design = Array2::<f64>::zeros((0, 2));
        let omega = Array1::zeros(0);
        let prior_precision = array![1.0 / 4.0, 1.0 / 0.25];
        let shift = Array1::zeros(2);
        let mean =
            gaussian_block_mean(&design.view(), &omega, &prior_precision, &shift).unwrap();
        assert_eq!(mean, array![0.0, 0.0]);

        let mut rng = RngStream::new(3, 1);
        let m = 20_000;
        let mut sumsq = [0.0f64; 2];
        for _ in 0..m {
            let draw =
                draw_gaussian_block(&mut rng, &design.view(), &omega, &prior_precision, &shift)
                    .unwrap();
            sumsq[0] += draw[0] * draw[0];
            sumsq[1] += draw[1] * draw[1];
        }
        assert!((sumsq[0] / m as f64 - 4.0).abs() < 0.2);
        assert!((sumsq[1] / m as f64 - 0.25).abs() < 0.02);
    }

    #[test]
    fn chain_is_deterministic() {
        let data = small_dataset(30, 4, 5);
        let ss = derive_spike_slab(30, 4);
        let tp = ThetaPrior::default();
        let config = ChainConfig {
            iterations: 60,
            burn_in: 10,
            thin: 2,
            seed: 9,
            stream_id: 3,
        };
        let a = run_chain(&data, &ss, &tp, &config).unwrap();
        let b = run_chain(&data, &ss, &tp, &config).unwrap();
        assert_eq!(a.draws(), b.draws());
        assert_eq!(a.meta, b.meta);
    }

    #[test]
    fn single_retained_draw() {
        let data = small_dataset(20, 4, 6);
        let ss = derive_spike_slab(20, 4);
        let tp = ThetaPrior::default();
        let config = ChainConfig {
            iterations: 11,
            burn_in: 10,
            thin: 1,
            seed: 1,
            stream_id: 0,
        };
        let draws = run_chain(&data, &ss, &tp, &config).unwrap();
        assert_eq!(draws.num_draws(), 1);
    }

    #[test]
    fn categorical_sweep_shape() {
        let n = 24;
        let codes: Vec<usize> = (0..n).map(|i| i % 3).collect();
        let z = Array2::from_shape_fn((n, 2), |(i, j)| ((i * 7 + j * 3) % 5) as f64 / 5.0 - 0.4);
        let y = Array1::from_shape_fn(n, |i| ((i * 3) % 2) as f64);
        let data = Dataset::new(y, Treatment::Categorical { codes, k: 2 }, z).unwrap();
        let ss = derive_spike_slab(n, 2);
        let tp = ThetaPrior::default();
        let sampler = GibbsSampler::new(&data, ss, tp).unwrap();
        let mut state = sampler.initial_state();
        let mut rng = RngStream::new(4, 0);
        let draw = sampler.sweep(&mut state, &mut rng).unwrap();
        assert_eq!(draw.len(), 2);
        assert_eq!(state.propensity.len(), 2);
    }

    #[test]
    fn omegas_stay_positive_across_sweeps() {
        let data = small_dataset(25, 4, 8);
        let ss = derive_spike_slab(25, 4);
        let tp = ThetaPrior::default();
        let sampler = GibbsSampler::new(&data, ss, tp).unwrap();
        let mut state = sampler.initial_state();
        let mut rng = RngStream::new(2, 0);
        for _ in 0..50 {
            sampler.sweep(&mut state, &mut rng).unwrap();
            assert!(state.nuisance.omega1.iter().all(|&w| w > 0.0));
            assert!(state.propensity[0].omega2.iter().all(|&w| w > 0.0));
            assert!(state.theta.omega3.iter().all(|&w| w > 0.0));
        }
    }

    #[test]
    fn invalid_config_rejected() {
        let config = ChainConfig {
            iterations: 10,
            burn_in: 10,
            ..ChainConfig::default()
        };
        assert!(config.validate().is_err());
        let config = ChainConfig {
            thin: 0,
            ..ChainConfig::default()
        };
        assert!(config.validate().is_err());
    }

    /// Exchanging the propensity and nuisance blocks leaves the theta
    /// marginal unchanged in distribution.
    #[test]
    fn block_order_does_not_shift_theta_marginal() {
        let data = small_dataset(200, 4, 11);
        let ss = derive_spike_slab(200, 4);
        let tp = ThetaPrior::default();
        let config = ChainConfig {
            iterations: 20_000,
            burn_in: 2000,
            thin: 1,
            seed: 21,
            stream_id: 0,
        };
        let a = run_chain(&data, &ss, &tp, &config).unwrap();
        let b = run_chain_nuisance_first(&data, &ss, &tp, &config).unwrap();
        let stats = |d: &PosteriorDraws| {
            let col = d.component(0);
            let m = col.mean().unwrap();
            let sd = (col.mapv(|v| (v - m) * (v - m)).sum() / (col.len() as f64 - 1.0)).sqrt();
            (m, sd)
        };
        let (ma, sa) = stats(&a);
        let (mb, sb) = stats(&b);
        assert!((ma - mb).abs() < 0.02, "means {ma} vs {mb}");
        assert!((sa - sb).abs() < 0.02, "sds {sa} vs {sb}");
    }
}
