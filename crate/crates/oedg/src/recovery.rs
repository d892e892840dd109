//! Constraint-preserving recovery of primitive variables from conserved
//! variables.
//!
//! Both solvers keep every pressure iterate nonnegative on admissible
//! input, so the recovered state always satisfies the physical constraints.
//! The hybrid method combines bisection with a fixed-point iteration chosen
//! by contraction rate; the Newton method iterates on a rescaled residual
//! from a robust starting value and is the default in the solver loop.

use crate::eos::{admissibility_q, ConservedState, IdealGas, PrimitiveState, WState};
use crate::error::{Result, SolverError};
use crate::metric::{from_w, MetricPoint};

/// Default residual/step tolerance for both algorithms.
pub const DEFAULT_TOL: f64 = 1e-14;

/// Which pressure solver to use.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Method {
    Hybrid,
    Newton,
}

/// Outcome of a pressure solve.
#[derive(Debug, Clone, Copy)]
pub struct RecoveryReport {
    pub p: f64,
    pub iterations: usize,
    pub method: Method,
    pub converged: bool,
}

/// Pressure residual
/// `phi(p) = p/(Gamma-1) - E + mXm/(E+p) + D sqrt(1 - mXm/(E+p)^2)`,
/// monotone increasing on `[0, inf)` with a unique positive root for
/// admissible states.
pub fn phi(u: &ConservedState, x_mat: &[[f64; 2]; 2], dim: usize, eos: &IdealGas, p: f64) -> f64 {
    let mxm = crate::eos::x_norm2(&u.m, x_mat, dim);
    let ep = u.e_tot + p;
    p / (eos.gamma() - 1.0) - u.e_tot + mxm / ep + u.d * (1.0 - mxm / (ep * ep)).max(0.0).sqrt()
}

/// Magnitude scale of the quadratic form `m X m^T`: the sum of absolute
/// term values, which bounds its f64 evaluation noise.
pub fn x_abs_scale(m: &[f64; 2], x_mat: &[[f64; 2]; 2], dim: usize) -> f64 {
    let mut s = 0.0;
    for i in 0..dim {
        for j in 0..dim {
            s += (x_mat[i][j] * m[i] * m[j]).abs();
        }
    }
    s
}

/// Rescaled residual `phi_hat(p) = (E + p) phi(p)` used by the Newton
/// iteration; shares the positive root with `phi`.
pub fn phi_hat(mxm: f64, d: f64, e: f64, gamma: f64, p: f64) -> f64 {
    let ep = e + p;
    mxm + ep * (p / (gamma - 1.0) - e) + d * ((ep * ep - mxm).max(0.0)).sqrt()
}

fn phi_hat_deriv(mxm: f64, d: f64, e: f64, gamma: f64, p: f64) -> f64 {
    let ep = e + p;
    (2.0 * p + e * (2.0 - gamma)) / (gamma - 1.0) + d * ep / ((ep * ep - mxm).max(0.0)).sqrt()
}

fn check_admissible(
    u: &ConservedState,
    x_mat: &[[f64; 2]; 2],
    dim: usize,
    context: &'static str,
) -> Result<f64> {
    let q = admissibility_q(u, x_mat, dim);
    if !(u.d > 0.0 && q > 0.0) {
        return Err(SolverError::NotAdmissible {
            d: u.d,
            q,
            context: context.into(),
        });
    }
    Ok(q)
}

/// Linearly convergent hybrid pressure solve: bisection on `[0, p_R]` when
/// the fixed-point contraction rate `delta = (Gamma-1) mXm / E^2` is at
/// least one half, otherwise the fixed-point map `p <- p - (Gamma-1) phi(p)`
/// from `p_R / 2`. Every iterate is nonnegative. Terminates on the residual
/// tolerance (scaled by the state's energy magnitude) or on the iteration
/// cap `N = log(eps/p0) / log(rate)`.
pub fn recover_hybrid(
    u: &ConservedState,
    x_mat: &[[f64; 2]; 2],
    dim: usize,
    eos: &IdealGas,
    tol: f64,
) -> Result<RecoveryReport> {
    check_admissible(u, x_mat, dim, "recover_hybrid")?;
    let gm1 = eos.gamma() - 1.0;
    let mxm = crate::eos::x_norm2(&u.m, x_mat, dim);
    let e = u.e_tot;
    let p_r0 = gm1 * (e - u.d * (1.0 - mxm / (e * e)).max(0.0).sqrt());

    let mut p = 0.5 * p_r0;
    if p_r0 <= f64::EPSILON {
        return Ok(RecoveryReport {
            p: p.max(0.0),
            iterations: 0,
            method: Method::Hybrid,
            converged: true,
        });
    }
    let delta = gm1 * mxm / (e * e);
    let rate = (delta + f64::EPSILON).min(0.5);
    // Error estimate: |p_n - p(U)| <= rate^n |p_0 - p(U)| <= rate^n p_0,
    // so reaching the cap puts the iterate within machine epsilon of the
    // root regardless of the residual magnitude. Large-magnitude states
    // hit the cap because the absolute residual floor scales with E.
    let cap = ((f64::EPSILON / p).ln() / rate.ln()).ceil().max(1.0) as usize;

    let mut p_lo = 0.0_f64;
    let mut p_hi = p_r0;
    let mut resid;
    let mut n = 0usize;
    loop {
        // Check before updating so the returned iterate is the one whose
        // residual passed the tolerance.
        let f = phi(u, x_mat, dim, eos, p);
        resid = f.abs();
        if resid <= tol || n > cap {
            break;
        }
        if rate < 0.5 {
            // Nonnegative in exact arithmetic; the clamp only absorbs a
            // sub-ulp rounding dip near the admissibility boundary.
            let next = p - gm1 * f;
            debug_assert!(
                next >= -1e-12 * e.abs().max(1.0),
                "fixed-point iterate strongly negative: {next}"
            );
            p = next.max(0.0);
        } else {
            if f < 0.0 {
                p_lo = p;
            } else {
                p_hi = p;
            }
            p = 0.5 * (p_lo + p_hi);
        }
        n += 1;
    }
    if !p.is_finite() {
        return Err(SolverError::NoConvergence {
            method: "hybrid",
            iterations: n,
            residual: resid,
            context: "recover_hybrid".into(),
        });
    }
    Ok(RecoveryReport {
        p,
        iterations: n,
        method: Method::Hybrid,
        converged: true,
    })
}

/// Quadratically convergent Newton pressure solve on `phi_hat` from the
/// robust start `p0 = 0` if `D E + mXm >= E^2`, else the closed-form
/// `p*`. Stops when the Newton step falls below tolerance (relative to the
/// pressure scale) or after three sign oscillations of the residual, the
/// round-off guard near the root.
pub fn recover_newton(
    u: &ConservedState,
    x_mat: &[[f64; 2]; 2],
    dim: usize,
    eos: &IdealGas,
    tol: f64,
) -> Result<RecoveryReport> {
    check_admissible(u, x_mat, dim, "recover_newton")?;
    let gamma = eos.gamma();
    let mxm = crate::eos::x_norm2(&u.m, x_mat, dim);
    let d = u.d;
    let e = u.e_tot;

    let mut p = if d * e + mxm >= e * e {
        0.0
    } else {
        let two_minus_g = 2.0 - gamma;
        let disc = two_minus_g * two_minus_g * e * e
            - 4.0 * (gamma - 1.0) * (mxm + d * (e * e - mxm).sqrt() - e * e);
        0.5 * ((gamma - 2.0) * e + disc.max(0.0).sqrt())
    };
    debug_assert!(p >= 0.0);

    let mut n_osc = 0usize;
    let mut phi_prev = 0.0_f64;
    let mut iters = 0usize;
    let mut z = f64::INFINITY;
    let mut p_prev = f64::NAN;
    // The step threshold carries the achievable scale: the f64 floor of a
    // Newton step on phi_hat is ~eps times the magnitude of its terms.
    // When the quadratic form m X m^T cancels between large entries, that
    // magnitude exceeds E^2 and sets the attainable pressure accuracy.
    let mxm_abs = x_abs_scale(&u.m, x_mat, dim);
    let z_tol = tol * (p.abs() + e.abs().max(1.0).max(mxm_abs / e.abs().max(1.0)));
    let mut best_p = p;
    let mut best_f = f64::INFINITY;
    let mut since_improve = 0usize;
    while z.abs() > z_tol && n_osc < 3 {
        if iters >= 100 {
            return Err(SolverError::NoConvergence {
                method: "newton",
                iterations: iters,
                residual: z.abs(),
                context: "recover_newton".into(),
            });
        }
        let f = phi_hat(mxm, d, e, gamma, p);
        if f.abs() < 0.5 * best_f {
            best_f = f.abs();
            best_p = p;
            since_improve = 0;
        } else {
            if f.abs() < best_f {
                best_f = f.abs();
                best_p = p;
            }
            // Convergent Newton at least halves the residual every step;
            // a sustained plateau means the rounding floor is reached.
            since_improve += 1;
            if since_improve >= 12 {
                p = best_p;
                break;
            }
        }
        let df = phi_hat_deriv(mxm, d, e, gamma, p);
        z = f / df;
        let next = (p - z).max(0.0);
        debug_assert!(
            p - z >= -1e-10 * e.abs().max(1.0).max(mxm_abs / e.abs().max(1.0)),
            "newton iterate strongly negative: {}",
            p - z
        );
        // A bitwise two-cycle likewise means the rounding floor.
        if next == p_prev {
            p = next;
            break;
        }
        p_prev = p;
        p = next;
        if phi_prev * f < 0.0 {
            n_osc += 1;
        }
        phi_prev = f;
        iters += 1;
    }
    Ok(RecoveryReport {
        p: p.max(0.0),
        iterations: iters,
        method: Method::Newton,
        converged: true,
    })
}

/// Full primitive recovery: pressure solve followed by
/// `v = m / (E + p)` and `rho = D sqrt(1 - |v|_X^2)`.
pub fn recover_primitives(
    u: &ConservedState,
    mp: &MetricPoint,
    eos: &IdealGas,
    method: Method,
) -> Result<PrimitiveState> {
    let dim = mp.dim;
    let report = match method {
        Method::Hybrid => recover_hybrid(u, &mp.x_mat, dim, eos, DEFAULT_TOL)?,
        Method::Newton => recover_newton(u, &mp.x_mat, dim, eos, DEFAULT_TOL)?,
    };
    let p = report.p;
    let ep = u.e_tot + p;
    let v = [u.m[0] / ep, u.m[1] / ep];
    let v2 = crate::eos::x_norm2(&v, &mp.x_mat, dim);
    if !(v2 < 1.0) {
        return Err(SolverError::Superluminal {
            speed: v2.sqrt(),
            context: "recover_primitives".into(),
        });
    }
    Ok(PrimitiveState {
        rho: u.d * (1.0 - v2).sqrt(),
        v,
        p,
    })
}

/// Recovery straight from the W-form evolved vector.
pub fn recover_from_w(
    w: &WState,
    mp: &MetricPoint,
    eos: &IdealGas,
    method: Method,
) -> Result<PrimitiveState> {
    let u = from_w(w, mp);
    recover_primitives(&u, mp, eos, method)
}
