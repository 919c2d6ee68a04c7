//! CB coverage/length scan at the coverage-table scale.
use vwp_core::gibbs::ChainConfig;
use vwp_core::model::ThetaPrior;
use vwp_core::simharness::{run_mc, DgpConfig, Method};

fn main() {
    let reps: usize = std::env::args().nth(1).and_then(|a| a.parse().ok()).unwrap_or(16);
    for theta0 in [0.0, 0.5] {
        let cfg = DgpConfig::paper_design(400, 500, theta0, 101);
        let chain = ChainConfig { iterations: 6000, burn_in: 1000, thin: 1, seed: 202, stream_id: 0 };
        let report = run_mc(&[cfg], &[Method::Cb], reps, &chain, &ThetaPrior::default(), 0.05).unwrap();
        let r = &report.rows[0];
        println!(
            "theta0={theta0}: coverage={:.3} (mc_se {:.3}) length={:.3} bias={:.3} signed={:.3} reps={}",
            r.coverage, r.mc_se, r.length, r.bias, r.signed_bias, r.reps
        );
    }
}
