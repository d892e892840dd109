//! Ultra-relativistic wall shock: inflow at Lorentz factor ~7e4 reflects
//! off the right wall and the gas behind the shock comes to rest with
//! specific internal energy W0 - 1. Prints the shock position against the
//! exact front and the post-shock state.

use oedg::eos::WState;
use oedg::metric::from_w;
use oedg::problems::{builtin, shock_heating_speed};
use oedg::recovery::{recover_primitives, Method};
use oedg::time_loop::{run, IntegratorKind, RunControls};

fn main() {
    let n = 200;
    let spec = builtin("shock_heating").unwrap();
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
    println!(
        "{} steps to t = {} in {:.2?}, {} limiter activations",
        result.steps,
        result.t_end,
        started.elapsed(),
        result.limiter_activations_total
    );

    let ws = &result.ws;
    let mp = ws.metric_at([0.0, 0.0]).unwrap();
    let mut front = None;
    let mut post_shock_vmax = 0.0_f64;
    for i in 0..n {
        let avg = result.field.average(i, 0);
        let u = from_w(&WState { w: avg, dim: 1 }, &mp);
        let q = recover_primitives(&u, &mp, &ws.eos, Method::Newton).unwrap();
        let x = ws.mesh.cell_center(i, 0)[0];
        if front.is_none() && q.v[0].abs() < 0.5 {
            front = Some(x);
        }
        if let Some(f) = front {
            if x > f + 2.0 * ws.mesh.hx && x < 1.0 - 2.0 * ws.mesh.hx {
                post_shock_vmax = post_shock_vmax.max(q.v[0].abs());
            }
        }
    }
    let v_s = shock_heating_speed(spec.gamma, 1.0 - 1e-10);
    let exact_front = 1.0 - v_s * result.t_end;
    println!(
        "shock front: computed {:?}, exact {exact_front:.6}, cell width {:.4}",
        front, ws.mesh.hx
    );
    println!("max |v| behind the shock (wall region excluded): {post_shock_vmax:.3e}");

    // Post-shock thermodynamics against the exact relations.
    let mid = (0.6 * n as f64) as usize;
    let avg = result.field.average(mid, 0);
    let u = from_w(&WState { w: avg, dim: 1 }, &mp);
    let q = recover_primitives(&u, &mp, &ws.eos, Method::Newton).unwrap();
    let e_internal = q.p / ((spec.gamma - 1.0) * q.rho);
    let w0 = 1.0 / (1.0 - (1.0 - 1e-10_f64) * (1.0 - 1e-10)).sqrt();
    println!(
        "post-shock internal energy {e_internal:.4e} (exact {:.4e}), compression {:.4} (exact {:.4})",
        w0 - 1.0,
        q.rho / w0,
        spec.gamma / (spec.gamma - 1.0)
    );
}
