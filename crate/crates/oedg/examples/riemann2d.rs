//! The three 2D four-quadrant benchmarks at reduced resolution, with
//! schlieren graymaps of log density written per problem.
//!
//! Usage: cargo run --release --example riemann2d [cells_per_axis]

use oedg::cli::write_snapshot;
use oedg::problems::builtin;
use oedg::time_loop::{run, IntegratorKind, RunControls};
use std::path::Path;

fn main() {
    let n: usize = std::env::args()
        .nth(1)
        .and_then(|s| s.parse().ok())
        .unwrap_or(100);
    std::fs::create_dir_all("out_riemann2d").unwrap();
    for name in ["riemann2d_1", "riemann2d_2", "riemann2d_3"] {
        let spec = builtin(name).unwrap();
        let controls = RunControls {
            nx: n,
            ny: n,
            degree: 2,
            integrator: IntegratorKind::SspRk3,
            t_final: spec.t_final,
            oe_enabled: true,
            pcp_enabled: true,
            max_steps: 10_000_000,
        };
        let started = std::time::Instant::now();
        let result = run(&spec, &controls, None).unwrap();
        let csv = write_snapshot(
            &result.field,
            &result.ws,
            Path::new(&format!("out_riemann2d/{name}")),
        )
        .unwrap();
        println!(
            "{name}: {} steps in {:.2?}, {} limiter activations, wrote {} (+ .pgm)",
            result.steps,
            started.elapsed(),
            result.limiter_activations_total,
            csv.display()
        );
    }
}
