//! Two strong blast waves launched from pressure jumps of 1e5 and 1e4
//! collide in a narrow region. Writes the final profile table.
//!
//! Usage: cargo run --release --example blast_collision [cells]

use oedg::cli::write_snapshot;
use oedg::problems::builtin;
use oedg::time_loop::{run, IntegratorKind, RunControls};
use std::path::Path;

fn main() {
    let n: usize = std::env::args()
        .nth(1)
        .and_then(|s| s.parse().ok())
        .unwrap_or(800);
    let spec = builtin("blast_collision").unwrap();
    let controls = RunControls {
        nx: n,
        ny: 1,
        degree: 2,
        integrator: IntegratorKind::SspRk3,
        t_final: spec.t_final,
        oe_enabled: true,
        pcp_enabled: true,
        max_steps: 10_000_000,
    };
    let started = std::time::Instant::now();
    let result = run(&spec, &controls, None).unwrap();
    std::fs::create_dir_all("out_blast").unwrap();
    let csv = write_snapshot(&result.field, &result.ws, Path::new("out_blast/final")).unwrap();
    println!(
        "{} steps to t = {} in {:.2?}, {} limiter activations, wrote {}",
        result.steps,
        result.t_end,
        started.elapsed(),
        result.limiter_activations_total,
        csv.display()
    );
}
