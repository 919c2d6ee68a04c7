//! Simulation config file schema. One JSON document with sections `dgp`,
//! `chain`, `priors`, `methods`, and `output`; unknown keys are errors.

use serde::{Deserialize, Serialize};
use vwp_core::gibbs::ChainConfig;
use vwp_core::simharness::{DgpConfig, Method};

use crate::CliError;

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SimulateConfig {
    pub dgp: DgpSection,
    #[serde(default)]
    pub chain: ChainConfig,
    #[serde(default)]
    pub priors: PriorsSection,
    #[serde(default = "default_methods")]
    pub methods: Vec<Method>,
    #[serde(default)]
    pub output: OutputSection,
}

/// Experiment design: sizes, the grid of true signals, sparse truth, AR
/// correlation, and the replication count.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DgpSection {
    pub n: usize,
    pub d: usize,
    #[serde(default = "default_theta0_grid")]
    pub theta0_grid: Vec<f64>,
    #[serde(default = "default_beta0")]
    pub beta0: Vec<(usize, f64)>,
    #[serde(default = "default_gamma0")]
    pub gamma0: Vec<(usize, f64)>,
    #[serde(default = "default_rho")]
    pub rho: f64,
    #[serde(default = "default_seed")]
    pub seed: u64,
    #[serde(default = "default_reps")]
    pub reps: usize,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PriorsSection {
    /// Gaussian prior variance on the treatment effect.
    pub lambda: f64,
}

impl Default for PriorsSection {
    fn default() -> Self {
        Self { lambda: 10.0 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum OutputFormat {
    #[default]
    Csv,
    Jsonl,
    Both,
}

#[derive(Debug, Clone, Serialize, Deserialize, Default)]
#[serde(deny_unknown_fields)]
pub struct OutputSection {
    #[serde(default)]
    pub format: OutputFormat,
}

fn default_theta0_grid() -> Vec<f64> {
    (0..10).map(|i| i as f64 / 10.0).collect()
}

fn default_beta0() -> Vec<(usize, f64)> {
    vec![(0, -0.4), (1, 0.8), (2, -1.0), (3, 1.5)]
}

fn default_gamma0() -> Vec<(usize, f64)> {
    vec![(0, 0.3), (1, -0.5), (2, -1.0), (3, 1.5)]
}

fn default_rho() -> f64 {
    0.5
}

fn default_seed() -> u64 {
    1
}

fn default_reps() -> usize {
    200
}

fn default_methods() -> Vec<Method> {
    vec![Method::Cb, Method::Oracle, Method::Naive]
}

impl SimulateConfig {
    pub fn from_path(path: &std::path::Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)?;
        let cfg: SimulateConfig = serde_json::from_str(&text)
            .map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
        if cfg.methods.is_empty() {
            return Err(CliError::Config("methods list is empty".into()));
        }
        if cfg.dgp.theta0_grid.is_empty() {
            return Err(CliError::Config("theta0_grid is empty".into()));
        }
        Ok(cfg)
    }

    /// One `DgpConfig` per grid point, all sharing the section's seed;
    /// replication streams separate by configuration index.
    pub fn dgp_cells(&self) -> Vec<DgpConfig> {
        self.dgp
            .theta0_grid
            .iter()
            .map(|&theta0| DgpConfig {
                n: self.dgp.n,
                d: self.dgp.d,
                theta0,
                beta0: self.dgp.beta0.clone(),
                gamma0: self.dgp.gamma0.clone(),
                rho: self.dgp.rho,
                seed: self.dgp.seed,
            })
            .collect()
    }

    /// Canonical digest of the whole document, recorded in the manifest.
    pub fn digest(&self) -> String {
        let canonical = serde_json::to_string(self).expect("config serializes");
        let out = sha2::Sha256::digest(canonical.as_bytes());
        out.iter().map(|b| format!("{b:02x}")).collect()
    }
}

use sha2::Digest;

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn minimal_config_parses_with_defaults() {
        let text = r#"{"dgp": {"n": 400, "d": 500}}"#;
        let cfg: SimulateConfig = serde_json::from_str(text).unwrap();
        assert_eq!(cfg.dgp.theta0_grid.len(), 10);
        assert_eq!(cfg.dgp.reps, 200);
        assert_eq!(cfg.chain.iterations, 6000);
        assert_eq!(cfg.priors.lambda, 10.0);
        assert_eq!(cfg.methods.len(), 3);
        assert_eq!(cfg.dgp_cells().len(), 10);
    }

    #[test]
    fn unknown_keys_are_rejected() {
        let text = r#"{"dgp": {"n": 10, "d": 5, "bogus": 1}}"#;
        assert!(serde_json::from_str::<SimulateConfig>(text).is_err());
        let text = r#"{"dgp": {"n": 10, "d": 5}, "extra_section": {}}"#;
        assert!(serde_json::from_str::<SimulateConfig>(text).is_err());
        let text = r#"{"dgp": {"n": 10, "d": 5}, "chain": {"iterations": 100, "burnin": 5}}"#;
        assert!(serde_json::from_str::<SimulateConfig>(text).is_err());
    }

    #[test]
    fn digest_is_stable_and_sensitive() {
        let a: SimulateConfig = serde_json::from_str(r#"{"dgp": {"n": 40, "d": 8}}"#).unwrap();
        let b: SimulateConfig = serde_json::from_str(r#"{"dgp": {"n": 40, "d": 8}}"#).unwrap();
        let c: SimulateConfig = serde_json::from_str(r#"{"dgp": {"n": 41, "d": 8}}"#).unwrap();
        assert_eq!(a.digest(), b.digest());
        assert_ne!(a.digest(), c.digest());
    }
}
