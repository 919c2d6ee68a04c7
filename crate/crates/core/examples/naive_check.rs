//! Bias scan for the NAIVE baseline across signal strengths.
use vwp_core::randkit::RngStream;
use vwp_core::simharness::{default_lasso_grid, gen_dataset, naive_fit, naive_select, DgpConfig};

fn main() {
    for theta0 in [0.5, 0.9] {
        let cfg = DgpConfig::paper_design(400, 500, theta0, 301);
        let reps = 50;
        let mut points = Vec::new();
        let mut covered = 0;
        let mut support_sizes = Vec::new();
        let started = std::time::Instant::now();
        for r in 0..reps {
            let mut rng = RngStream::new(cfg.seed, r);
            let data = gen_dataset(&cfg, &mut rng).unwrap();
            let grid = default_lasso_grid(data.y(), data.z());
            let sel = naive_select(&data, &grid).unwrap();
            support_sizes.push(sel.len());
            match naive_fit(&data, &grid, 0.05) {
                Ok(iv) => {
                    points.push(iv.point);
                    if iv.lower <= theta0 && theta0 <= iv.upper {
                        covered += 1;
                    }
                }
                Err(e) => eprintln!("rep {r} failed: {e}"),
            }
        }
        let m = points.iter().sum::<f64>() / points.len() as f64;
        let mean_support =
            support_sizes.iter().sum::<usize>() as f64 / support_sizes.len() as f64;
        println!(
            "theta0={theta0}: bias={:.3} coverage={:.3} mean_support={mean_support:.1} wall={:.1}s",
            (m - theta0).abs(),
            covered as f64 / reps as f64,
            started.elapsed().as_secs_f64()
        );
    }
}
