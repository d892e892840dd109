//! High-frequency density perturbation crossing a shock, checked against
//! the first-order fine-grid reference solve.
//!
//! Usage: cargo run --release --example perturbation [cells] [ref_cells]

use oedg::eos::WState;
use oedg::metric::from_w;
use oedg::problems::{builtin, lax_friedrichs_reference};
use oedg::recovery::{recover_primitives, Method};
use oedg::time_loop::{run, IntegratorKind, RunControls};

fn main() {
    let n: usize = std::env::args()
        .nth(1)
        .and_then(|s| s.parse().ok())
        .unwrap_or(200);
    let ref_n: usize = std::env::args()
        .nth(2)
        .and_then(|s| s.parse().ok())
        .unwrap_or(100_000);
    let spec = builtin("perturbation").unwrap();
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
    let result = run(&spec, &controls, None).unwrap();
    println!("building the {ref_n}-cell first-order reference...");
    let reference = lax_friedrichs_reference(&spec, ref_n).unwrap();
    let ws = &result.ws;
    let mp = ws.metric_at([0.0, 0.0]).unwrap();
    let mut l1 = 0.0;
    for i in 0..n {
        let avg = result.field.average(i, 0);
        let u = from_w(&WState { w: avg, dim: 1 }, &mp);
        let q = recover_primitives(&u, &mp, &ws.eos, Method::Newton).unwrap();
        let x = ws.mesh.cell_center(i, 0)[0];
        l1 += (q.rho - reference.sample(x).rho).abs() * ws.mesh.hx;
    }
    println!(
        "{} steps; L1(rho) distance to the reference profile: {l1:.4e}",
        result.steps
    );
}
