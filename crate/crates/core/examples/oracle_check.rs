use vwp_core::model::ThetaPrior;
use vwp_core::simharness::{gen_dataset, oracle_fit, DgpConfig};
use vwp_core::randkit::RngStream;

fn main() {
    for theta0 in [0.0, 0.5] {
        let cfg = DgpConfig::paper_design(400, 500, theta0, 101);
        let mut covered = 0;
        let mut points = Vec::new();
        let mut ses = Vec::new();
        let mut lengths = Vec::new();
        let reps = 200;
        for r in 0..reps {
            let mut rng = RngStream::new(cfg.seed, r);
            let data = gen_dataset(&cfg, &mut rng).unwrap();
            let iv = oracle_fit(&data, &cfg.beta_support(), 0.05).unwrap();
            if iv.lower <= theta0 && theta0 <= iv.upper { covered += 1; }
            points.push(iv.point);
            ses.push(iv.se);
            lengths.push(iv.upper - iv.lower);
        }
        let m = points.iter().sum::<f64>() / reps as f64;
        let sd = (points.iter().map(|p| (p - m) * (p - m)).sum::<f64>() / (reps as f64 - 1.0)).sqrt();
        let mean_se = ses.iter().sum::<f64>() / reps as f64;
        let mean_len = lengths.iter().sum::<f64>() / reps as f64;
        println!(
            "theta0={theta0}: coverage={:.3} mean_point={m:.3} mc_sd={sd:.3} mean_wald_se={mean_se:.3} mean_length={mean_len:.3}",
            covered as f64 / reps as f64
        );
    }
    let _ = ThetaPrior::default();
}
