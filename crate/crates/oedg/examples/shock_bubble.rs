//! Relativistic shock-bubble interaction: a left-moving shock hits a light
//! cylindrical bubble. Writes schlieren frames at a fixed cadence.
//!
//! Usage: cargo run --release --example shock_bubble [nx] [ny] [t_final]

use oedg::cli::write_snapshot;
use oedg::dg::DgWorkspace;
use oedg::field::ModalField;
use oedg::problems::builtin;
use oedg::time_loop::{run, IntegratorKind, RunControls};
use std::path::Path;

fn main() {
    let mut args = std::env::args().skip(1);
    let nx: usize = args.next().and_then(|s| s.parse().ok()).unwrap_or(125);
    let ny: usize = args.next().and_then(|s| s.parse().ok()).unwrap_or(35);
    let t_final: f64 = args.next().and_then(|s| s.parse().ok()).unwrap_or(90.0);
    let spec = builtin("shock_bubble").unwrap();
    let controls = RunControls {
        nx,
        ny,
        degree: 2,
        integrator: IntegratorKind::SspRk3,
        t_final,
        oe_enabled: true,
        pcp_enabled: true,
        max_steps: 50_000_000,
    };
    std::fs::create_dir_all("out_shock_bubble").unwrap();
    let mut frames = 0usize;
    let mut observer = |step: usize, t: f64, field: &ModalField, ws: &DgWorkspace| {
        if step % 200 == 0 {
            write_snapshot(
                field,
                ws,
                Path::new(&format!("out_shock_bubble/frame_t{t:07.1}")),
            )?;
            frames += 1;
        }
        Ok(())
    };
    let started = std::time::Instant::now();
    let result = run(&spec, &controls, Some(&mut observer)).unwrap();
    write_snapshot(
        &result.field,
        &result.ws,
        Path::new("out_shock_bubble/final"),
    )
    .unwrap();
    println!(
        "{} steps to t = {} in {:.2?}; wrote {} frames + final (csv + pgm)",
        result.steps,
        result.t_end,
        started.elapsed(),
        frames
    );
}
