//! The two 1D shock-tube benchmarks, checked against a first-order
//! fine-grid reference solve. Writes final profiles as csv tables.
//!
//! Usage: cargo run --release --example riemann_problems [cells] [ref_cells]

use oedg::cli::write_snapshot;
use oedg::problems::{builtin, lax_friedrichs_reference};
use oedg::time_loop::{run, IntegratorKind, RunControls};
use std::path::Path;

fn main() {
    let n: usize = std::env::args()
        .nth(1)
        .and_then(|s| s.parse().ok())
        .unwrap_or(400);
    let ref_n: usize = std::env::args()
        .nth(2)
        .and_then(|s| s.parse().ok())
        .unwrap_or(20_000);
    std::fs::create_dir_all("out_riemann").unwrap();
    for name in ["riemann1d_1", "riemann1d_2"] {
        let spec = builtin(name).unwrap();
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
        let csv = write_snapshot(
            &result.field,
            &result.ws,
            Path::new(&format!("out_riemann/{name}")),
        )
        .unwrap();
        println!(
            "{name}: {} steps in {:.2?}, wrote {}",
            result.steps,
            started.elapsed(),
            csv.display()
        );

        // L1 density distance to the first-order reference.
        let reference = lax_friedrichs_reference(&spec, ref_n).unwrap();
        let ws = &result.ws;
        let mp = ws.metric_at([0.0, 0.0]).unwrap();
        let mut l1 = 0.0;
        for i in 0..n {
            let avg = result.field.average(i, 0);
            let u = oedg::metric::from_w(&oedg::eos::WState { w: avg, dim: 1 }, &mp);
            let q = oedg::recovery::recover_primitives(
                &u,
                &mp,
                &ws.eos,
                oedg::recovery::Method::Newton,
            )
            .unwrap();
            let x = ws.mesh.cell_center(i, 0)[0];
            l1 += (q.rho - reference.sample(x).rho).abs() * ws.mesh.hx;
        }
        println!("  L1(rho) distance to {ref_n}-cell reference: {l1:.4e}");
    }
}
