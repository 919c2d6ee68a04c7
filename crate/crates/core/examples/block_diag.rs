//! Which nuisance block drives the finite-sample bias at (400,500)?
use ndarray::prelude::*;
use vwp_core::gibbs::{ChainConfig, GibbsSampler};
use vwp_core::model::{derive_spike_slab, Dataset, ThetaPrior, Treatment};
use vwp_core::randkit::RngStream;
use vwp_core::simharness::{gen_binary, gen_design, DgpConfig};

fn main() {
    let theta0 = 0.0;
    let reps = 12;
    let cfg = DgpConfig::paper_design(400, 500, theta0, 606);
    let tp = ThetaPrior::default();
    let ss = derive_spike_slab(400, 500);
    let cc = ChainConfig { iterations: 3000, burn_in: 500, thin: 1, seed: 13, stream_id: 0 };

    for mode in ["gamma_fixed_at_truth", "beta_fixed_at_truth", "both_live"] {
        let mut means = Vec::new();
        for r in 0..reps {
            let mut rng = RngStream::new(cfg.seed, r);
            let z = gen_design(&cfg, &mut rng);
            let x = gen_binary(&z.dot(&cfg.gamma0_dense()), &mut rng);
            let eta = z.dot(&cfg.beta0_dense()) + &x.mapv(|v| v * theta0);
            let y = gen_binary(&eta, &mut rng);
            let data = Dataset::new(y, Treatment::Binary(x), z).unwrap();
            let sampler = GibbsSampler::new(&data, ss, tp).unwrap();
            let mut state = sampler.initial_state();
            if mode == "gamma_fixed_at_truth" {
                state.propensity[0].gamma = cfg.gamma0_dense();
            }
            if mode == "beta_fixed_at_truth" {
                state.nuisance.beta = cfg.beta0_dense();
                state.nuisance.theta_tilde = array![theta0];
            }
            let mut chain_rng = RngStream::new(cc.seed, r + 1000);
            let mut kept = Vec::new();
            for t in 0..cc.iterations {
                if mode != "gamma_fixed_at_truth" {
                    for (j, prop) in state.propensity.iter_mut().enumerate() {
                        sampler.step_propensity(prop, j, &mut chain_rng).unwrap();
                    }
                }
                if mode != "beta_fixed_at_truth" {
                    sampler.step_nuisance(&mut state.nuisance, &mut chain_rng).unwrap();
                }
                let (h, phi) = sampler.projections(&state.nuisance, &state.propensity).unwrap();
                sampler.step_theta(&mut state.theta, &h, &phi, &mut chain_rng).unwrap();
                if t >= cc.burn_in {
                    kept.push(state.theta.theta[0]);
                }
            }
            means.push(kept.iter().sum::<f64>() / kept.len() as f64);
        }
        let m = means.iter().sum::<f64>() / reps as f64;
        println!("{mode}: mean of posterior means = {m:.3}");
    }
}
