//! High-order accuracy on the smooth 1D density wave: run a mesh ladder
//! per polynomial degree and print error norms with observed rates.
//!
//! Usage: cargo run --release --example smooth_convergence [degree]

use oedg::problems::{builtin, error_norms, error_norms_conserved, observed_rate};
use oedg::time_loop::{run, IntegratorKind, RunControls};

fn main() {
    let degree: usize = std::env::args()
        .nth(1)
        .and_then(|s| s.parse().ok())
        .unwrap_or(2);
    let meshes: &[usize] = match degree {
        1 => &[64, 128, 256],
        2 => &[64, 128, 256],
        _ => &[48, 72, 108],
    };
    let integrator = if degree == 3 {
        IntegratorKind::Rk4
    } else {
        IntegratorKind::SspRk3
    };
    let spec = builtin("smooth1d").unwrap();
    let exact = spec.exact.clone().unwrap();

    println!("smooth 1D wave, degree {degree}:");
    println!(
        "{:>6} {:>13} {:>6} {:>13} {:>6}",
        "N", "L1(rho)", "rate", "L1(D)", "rate"
    );
    let mut prev: Option<(f64, f64, usize)> = None;
    for &n in meshes {
        let controls = RunControls {
            nx: n,
            ny: 1,
            degree,
            integrator,
            t_final: spec.t_final,
            oe_enabled: true,
            pcp_enabled: true,
            max_steps: 10_000_000,
        };
        let result = run(&spec, &controls, None).unwrap();
        let prim = error_norms(&result.field, &result.ws, &exact, result.t_end).unwrap();
        let cons = error_norms_conserved(&result.field, &result.ws, &exact, result.t_end).unwrap();
        let (e_rho, e_d) = (prim.l1[0], cons.l1[0]);
        let rates = prev
            .map(|(p_rho, p_d, p_n)| {
                (
                    format!("{:.3}", observed_rate(p_rho, e_rho, p_n, n)),
                    format!("{:.3}", observed_rate(p_d, e_d, p_n, n)),
                )
            })
            .unwrap_or(("-".into(), "-".into()));
        println!(
            "{n:>6} {e_rho:>13.4e} {:>6} {e_d:>13.4e} {:>6}",
            rates.0, rates.1
        );
        prev = Some((e_rho, e_d, n));
    }
}
