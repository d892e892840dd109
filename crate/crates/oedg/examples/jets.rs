//! Axisymmetric relativistic jets in cylindrical coordinates: the hot A1
//! and the highly supersonic C2 models, injected through a nozzle on the
//! axis boundary. Reduced resolution and time by default; benchmark scale
//! is 210x1500 (A1) and 360x1080 (C2).
//!
//! Usage: cargo run --release --example jets [a1|c2] [nr] [nz] [t_final]

use oedg::cli::{write_diagnostics, write_snapshot};
use oedg::problems::builtin;
use oedg::time_loop::{run, IntegratorKind, RunControls};
use std::path::Path;

fn main() {
    let mut args = std::env::args().skip(1);
    let which = args.next().unwrap_or_else(|| "a1".into());
    let name = match which.as_str() {
        "c2" => "jet_c2",
        _ => "jet_a1",
    };
    let spec = builtin(name).unwrap();
    let (def_nr, def_nz, def_t) = if name == "jet_c2" {
        (60, 180, 20.0)
    } else {
        (52, 375, 15.0)
    };
    let nr: usize = args.next().and_then(|s| s.parse().ok()).unwrap_or(def_nr);
    let nz: usize = args.next().and_then(|s| s.parse().ok()).unwrap_or(def_nz);
    let t_final: f64 = args.next().and_then(|s| s.parse().ok()).unwrap_or(def_t);
    let controls = RunControls {
        nx: nr,
        ny: nz,
        degree: 1,
        integrator: IntegratorKind::SspRk3,
        t_final,
        oe_enabled: true,
        pcp_enabled: true,
        max_steps: 50_000_000,
    };
    println!("{name} on {nr}x{nz} cells to t = {t_final}");
    let started = std::time::Instant::now();
    let result = run(&spec, &controls, None).unwrap();
    let dir = format!("out_{name}");
    std::fs::create_dir_all(&dir).unwrap();
    let csv = write_snapshot(
        &result.field,
        &result.ws,
        Path::new(&dir).join("final").as_path(),
    )
    .unwrap();
    write_diagnostics(
        Path::new(&dir).join("diagnostics.log").as_path(),
        &result.diagnostics,
    )
    .unwrap();
    println!(
        "{} steps in {:.2?}, {} limiter activations, wrote {}",
        result.steps,
        started.elapsed(),
        result.limiter_activations_total,
        csv.display()
    );
}
