//! The randomized property suites behind the solver's guarantees:
//! quasi-linearized admissibility equivalence, flux domination by the
//! signal speeds, weak preservation of cell averages under forward Euler,
//! and the convergence audit of both recovery algorithms.
//!
//! Usage: cargo run --release --example property_suites [states]

use oedg::verify::*;

fn main() {
    let states: usize = std::env::args()
        .nth(1)
        .and_then(|s| s.parse().ok())
        .unwrap_or(1000);

    let rep = gql_suite(states, 41, 0);
    println!(
        "{}  gql-equivalence ({})",
        if rep.passed() { "PASS" } else { "FAIL" },
        rep.detail
    );

    let rep = flux_domination_suite(states.min(500), 41, 1);
    println!(
        "{}  flux-domination ({})",
        if rep.passed() { "PASS" } else { "FAIL" },
        rep.detail
    );

    for form in [
        PcpForm::Flat1d,
        PcpForm::Flat2d,
        PcpForm::Axisymmetric,
        PcpForm::KerrW,
    ] {
        let rep = weak_pcp_suite(form, states.min(200), 2).unwrap();
        println!(
            "{}  weak-pcp ({})",
            if rep.passed() { "PASS" } else { "FAIL" },
            rep.detail
        );
    }

    let audit = recovery_suite(states.max(100_000), 1e3, 3);
    println!(
        "{}  recovery ({} states, newton {:.2} vs hybrid {:.2} mean iterations, max residual {:.2e})",
        if audit.violations == 0 { "PASS" } else { "FAIL" },
        audit.cases,
        audit.newton_mean_iters,
        audit.hybrid_mean_iters,
        audit.max_rel_residual
    );
}
