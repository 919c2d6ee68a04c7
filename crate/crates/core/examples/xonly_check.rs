//! Worst-case post-selection bias: regress Y on X alone.
use vwp_core::randkit::RngStream;
use vwp_core::simharness::{gen_dataset, oracle_fit, DgpConfig};

fn main() {
    for theta0 in [0.5, 0.9] {
        let cfg = DgpConfig::paper_design(400, 500, theta0, 301);
        let reps = 60;
        let mut pts = Vec::new();
        for r in 0..reps {
            let mut rng = RngStream::new(cfg.seed, r);
            let data = gen_dataset(&cfg, &mut rng).unwrap();
            if let Ok(iv) = oracle_fit(&data, &[], 0.05) {
                pts.push(iv.point);
            }
        }
        let m = pts.iter().sum::<f64>() / pts.len() as f64;
        println!("theta0={theta0}: X-only mean estimate {m:.3}, bias {:.3}", (m - theta0).abs());
    }
}
