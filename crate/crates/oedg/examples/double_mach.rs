//! Double Mach reflection of a relativistic oblique shock, with the
//! moving-shock top boundary re-evaluated every stage. Reduced-resolution
//! default; the benchmark scale is 960x240.
//!
//! Usage: cargo run --release --example double_mach [nx] [ny] [t_final]

use oedg::cli::write_snapshot;
use oedg::problems::builtin;
use oedg::time_loop::{run, IntegratorKind, RunControls};
use std::path::Path;

fn main() {
    let mut args = std::env::args().skip(1);
    let nx: usize = args.next().and_then(|s| s.parse().ok()).unwrap_or(240);
    let ny: usize = args.next().and_then(|s| s.parse().ok()).unwrap_or(60);
    let spec = builtin("double_mach").unwrap();
    let t_final: f64 = args
        .next()
        .and_then(|s| s.parse().ok())
        .unwrap_or(spec.t_final);
    let controls = RunControls {
        nx,
        ny,
        degree: 2,
        integrator: IntegratorKind::SspRk3,
        t_final,
        oe_enabled: true,
        pcp_enabled: true,
        max_steps: 10_000_000,
    };
    let started = std::time::Instant::now();
    let result = run(&spec, &controls, None).unwrap();
    std::fs::create_dir_all("out_double_mach").unwrap();
    let csv = write_snapshot(
        &result.field,
        &result.ws,
        Path::new("out_double_mach/final"),
    )
    .unwrap();
    println!(
        "{} steps to t = {} in {:.2?}, {} limiter activations",
        result.steps,
        result.t_end,
        started.elapsed(),
        result.limiter_activations_total
    );
    println!("wrote {} (+ .pgm schlieren)", csv.display());
}
