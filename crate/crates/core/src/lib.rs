//! Valid Bayesian inference for a binary or categorical treatment effect in
//! high-dimensional logistic regression.
//!
//! The target parameter is the conditional log-odds ratio `theta` in
//! `P[Y=1 | X, Z] = logistic(theta * X + Z' beta)` where the nuisance
//! dimension of `Z` may exceed the sample size. Inference runs through three
//! conditional posteriors sampled by Polya-Gamma Gibbs sweeps:
//!
//! 1. a spike-and-slab logistic block for `(theta_tilde, beta)`,
//! 2. a spike-and-slab logistic block for the propensity parameter `gamma`,
//! 3. a one-dimensional block for `theta` built on the orthogonalized
//!    covariate `X - h(Z)`, where `h(Z)` is the variance-weighted projection
//!    of the treatment on the nuisance covariates.
//!
//! Subtracting `h(Z)` makes the score for `theta` insensitive to first-order
//! estimation error in the nuisance quantities, which is what buys the
//! credible intervals their frequentist coverage.
//!
//! Module map:
//! - [`randkit`]: deterministic splittable streams, exact PG(1, c) sampling,
//!   multivariate normal draws from a precision matrix.
//! - [`model`]: data containers, prior derivation, logistic link.
//! - [`projection`]: the variance-weighted projection and its categorical and
//!   general discrete forms.
//! - [`gibbs`]: the three samplers, full sweeps, and chain drivers.
//! - [`inference`]: credible-interval summaries and coverage aggregation.
//! - [`simharness`]: synthetic-data generation and the Monte Carlo study
//!   harness with ORACLE and NAIVE baselines.

extern crate blas_src;
extern crate openblas_src;

pub mod gibbs;
pub mod inference;
mod linalg;
pub mod model;
pub mod projection;
pub mod randkit;
pub mod simharness;
