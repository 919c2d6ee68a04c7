//! Small Monte Carlo coverage study run straight against the library.
//!
//! ```bash
//! cargo run --release --example coverage_study -- 100 20 0.5 30 1500 300
//! ```
//!
//! Arguments: n d theta0 reps iterations burn_in (all optional).

use vwp_core::gibbs::ChainConfig;
use vwp_core::model::ThetaPrior;
use vwp_core::simharness::{run_mc, DgpConfig, Method};

fn main() {
    let args: Vec<usize> = std::env::args()
        .skip(1)
        .map(|a| a.parse::<f64>().expect("numeric argument") as usize)
        .collect();
    let theta0 = std::env::args()
        .nth(3)
        .map(|a| a.parse::<f64>().unwrap())
        .unwrap_or(0.5);
    let n = args.first().copied().unwrap_or(100);
    let d = args.get(1).copied().unwrap_or(20);
    let reps = args.get(3).copied().unwrap_or(30);
    let iterations = args.get(4).copied().unwrap_or(1500);
    let burn_in = args.get(5).copied().unwrap_or(300);

    let cfg = DgpConfig::paper_design(n, d, theta0, 101);
    let chain = ChainConfig {
        iterations,
        burn_in,
        thin: 1,
        seed: 202,
        stream_id: 0,
    };
    let started = std::time::Instant::now();
    let report = run_mc(
        &[cfg],
        &[Method::Cb, Method::Oracle, Method::Naive],
        reps,
        &chain,
        &ThetaPrior::default(),
        0.05,
    )
    .expect("study failed");
    for row in &report.rows {
        println!(
            "{:>7}  theta0={:<4} n={:<5} d={:<5} coverage={:.3} (mc_se {:.3})  length={:.3}  bias={:.3}  reps={} failures={} wall={}ms",
            row.method.to_string(),
            row.theta0,
            row.n,
            row.d,
            row.coverage,
            row.mc_se,
            row.length,
            row.bias,
            row.reps,
            row.failures,
            row.wall_ms
        );
    }
    eprintln!("total wall: {:.1}s", started.elapsed().as_secs_f64());
}
