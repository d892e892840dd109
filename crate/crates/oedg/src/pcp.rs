//! Admissibility enforcement: convex cell-average decompositions, the
//! two-step scaling limiter, the source bound `lambda_W`, and the
//! constraint-preserving time-step restriction.

use crate::basis::{gauss_lobatto_rule, gauss_rule, gl_point_count, Basis};
use crate::dg::SpeedRecord;
use crate::eos::{q_of_w, WState};
use crate::error::{Result, SolverError};
use crate::field::ModalField;
use crate::mesh::Mesh;
use rayon::prelude::*;

/// Round-off floors used by the scaling limiter.
const EPS_FLOOR: f64 = 1e-13;

/// Critical nodes of one cell together with the convex decomposition of
/// the cell average over the boundary/internal subset.
#[derive(Debug, Clone)]
pub struct CriticalPointSet {
    pub dim: usize,
    /// All audit nodes: decomposition nodes plus the volume Gauss nodes.
    pub nodes: Vec<[f64; 2]>,
    /// Basis value table over `nodes`, row-major `[node][basis]`.
    pub values: Vec<f64>,
    /// Convex decomposition: reference node and positive weight, summing
    /// to one and reproducing the average of any degree-m polynomial.
    pub decomp: Vec<([f64; 2], f64)>,
    /// 1D boundary Gauss-Lobatto weight.
    pub omega1_gl: f64,
}

/// Build the decomposition and audit node set. The 2D internal-node
/// placement depends on the current wave-speed pair `(a_x, a_y)`; pass the
/// previous step's record and rebuild when it changes.
pub fn build_decomposition(basis: &Basis, mesh: &Mesh, a_x: f64, a_y: f64) -> CriticalPointSet {
    let m = basis.degree;
    assert!((1..=3).contains(&m), "unsupported degree {m}");
    let q = m + 1;
    let gauss = gauss_rule(q);
    let mut decomp: Vec<([f64; 2], f64)> = Vec::new();
    let mut nodes: Vec<[f64; 2]> = Vec::new();
    let omega1_gl;

    if mesh.dim == 1 {
        let l = gl_point_count(m);
        let gl = gauss_lobatto_rule(l);
        omega1_gl = gl[0].1;
        for &(x, w) in &gl {
            decomp.push(([x, 0.0], w));
            nodes.push([x, 0.0]);
        }
        for &(x, _) in &gauss {
            nodes.push([x, 0.0]);
        }
    } else {
        // Optimal split between edge pairs and two interior nodes.
        let (z1, z2) = if a_x > 0.0 || a_y > 0.0 {
            (a_x / mesh.hx, a_y / mesh.hy)
        } else {
            (1.0, 1.0)
        };
        let zs = z1.max(z2);
        let psi = z1 + z2 + 2.0 * zs;
        let mu1 = z1 / psi;
        let mu2 = z2 / psi;
        let om = zs / psi;
        omega1_gl = 0.0;
        for &(g, wg) in &gauss {
            decomp.push(([-1.0, g], 0.5 * mu1 * wg));
            decomp.push(([1.0, g], 0.5 * mu1 * wg));
            decomp.push(([g, -1.0], 0.5 * mu2 * wg));
            decomp.push(([g, 1.0], 0.5 * mu2 * wg));
        }
        let internal = if z1 >= z2 {
            let s = ((zs - z2) / zs).sqrt() / 3.0_f64.sqrt();
            [[0.0, s], [0.0, -s]]
        } else {
            let s = ((zs - z1) / zs).sqrt() / 3.0_f64.sqrt();
            [[s, 0.0], [-s, 0.0]]
        };
        for p in internal {
            decomp.push((p, om));
        }
        nodes.extend(decomp.iter().map(|(p, _)| *p));
        for &(gy, _) in &gauss {
            for &(gx, _) in &gauss {
                nodes.push([gx, gy]);
            }
        }
    }
    let values = basis.value_table(&nodes);
    CriticalPointSet {
        dim: mesh.dim,
        nodes,
        values,
        decomp,
        omega1_gl,
    }
}

/// Two-step scaling limiter in W variables. Enforces `W_0 >= eps_1` and
/// `q(W) >= eps_2` at every critical node without changing cell averages.
/// Returns the number of cells the limiter actually modified. An
/// inadmissible cell average is a hard error: it signals a CFL or flux
/// defect upstream and is never silently repaired.
pub fn pcp_limit(field: &mut ModalField, crit: &CriticalPointSet, basis: &Basis) -> Result<usize> {
    let n = basis.n;
    let n_comp = field.n_comp;
    let dim = field.dim;
    let (nx, ny) = field.shape();
    let stride = n_comp * n;
    let row = nx + 2;
    let n_nodes = crit.nodes.len();

    let results: Vec<Result<usize>> = field
        .data_mut()
        .par_chunks_mut(stride)
        .enumerate()
        .map(|(block_idx, coeffs)| {
            let gi = block_idx % row;
            let gj = block_idx / row;
            if gi == 0 || gi > nx || gj == 0 || gj > ny {
                return Ok(0); // ghost cell
            }
            let mut avg = [0.0; 4];
            for c in 0..n_comp {
                avg[c] = coeffs[c * n];
            }
            let q_avg = q_of_w(&avg, dim);
            if !(avg[0] > 0.0 && q_avg > 0.0) {
                return Err(SolverError::InadmissibleAverage {
                    cell: (gi - 1, gj - 1),
                    w0: avg[0],
                    q: q_avg,
                    state: avg,
                });
            }

            // Node values of every component (34 nodes x 4 components at
            // most, kept on the stack).
            let mut vals = [0.0_f64; 160];
            debug_assert!(n_nodes * n_comp <= vals.len());
            for p in 0..n_nodes {
                let tab = &crit.values[p * n..(p + 1) * n];
                for c in 0..n_comp {
                    let rowc = &coeffs[c * n..(c + 1) * n];
                    let mut s = 0.0;
                    for k in 0..n {
                        s += rowc[k] * tab[k];
                    }
                    vals[p * n_comp + c] = s;
                }
            }

            let mut touched = false;

            // Step 1: positivity of the first component. The floors carry
            // the state's magnitude: an absolute 1e-13 sits below one ulp
            // for the ultra-relativistic benchmark states, which would
            // leave "limited" values at exactly zero after rounding.
            let mut w0_min = f64::INFINITY;
            for p in 0..n_nodes {
                w0_min = w0_min.min(vals[p * n_comp]);
            }
            let eps1 = (EPS_FLOOR * avg[0].abs().max(1.0)).min(avg[0]);
            if w0_min < eps1 {
                let denom = avg[0] - w0_min;
                let theta1 = if denom.abs() <= 1e-15 * avg[0].abs().max(1.0) {
                    1.0
                } else {
                    (avg[0] - eps1) / denom
                };
                if theta1 < 1.0 {
                    for k in 1..n {
                        coeffs[k] *= theta1;
                    }
                    for p in 0..n_nodes {
                        vals[p * n_comp] = theta1 * (vals[p * n_comp] - avg[0]) + avg[0];
                    }
                    touched = true;
                }
            }

            // Step 2: positivity of q(W).
            let mut q_min = f64::INFINITY;
            for p in 0..n_nodes {
                let wp: [f64; 4] = [
                    vals[p * n_comp],
                    vals[p * n_comp + 1],
                    if n_comp > 3 {
                        vals[p * n_comp + 2]
                    } else {
                        0.0
                    },
                    if n_comp > 3 {
                        vals[p * n_comp + 3]
                    } else {
                        0.0
                    },
                ];
                let wp = if n_comp == 3 {
                    [wp[0], wp[1], vals[p * n_comp + 2], 0.0]
                } else {
                    wp
                };
                q_min = q_min.min(q_of_w(&wp, dim));
            }
            let eps2 = (EPS_FLOOR * avg[dim + 1].abs().max(1.0)).min(q_avg);
            if q_min < eps2 {
                let denom = q_avg - q_min;
                let theta2 = if denom.abs() <= 1e-15 * q_avg.abs().max(1.0) {
                    1.0
                } else {
                    (q_avg - eps2) / denom
                };
                if theta2 < 1.0 {
                    for c in 0..n_comp {
                        for k in 1..n {
                            coeffs[c * n + k] *= theta2;
                        }
                    }
                    touched = true;
                }
            }
            Ok(usize::from(touched))
        })
        .collect();

    let mut activations = 0;
    for r in results {
        activations += r?;
    }
    Ok(activations)
}

/// Audit every critical node of every interior cell for admissibility.
pub fn admissibility_audit(field: &ModalField, crit: &CriticalPointSet, basis: &Basis) -> bool {
    let n = basis.n;
    let n_comp = field.n_comp;
    let dim = field.dim;
    let (nx, ny) = field.shape();
    for j in 0..ny {
        for i in 0..nx {
            let coeffs = field.cell(i, j);
            for p in 0..crit.nodes.len() {
                let tab = &crit.values[p * n..(p + 1) * n];
                let w = ModalField::eval_with_row(coeffs, tab, n_comp, n);
                let ws = WState { w, dim };
                if !(ws.w[0] > 0.0 && ws.q() > 0.0) {
                    return false;
                }
            }
        }
    }
    true
}

/// Source bound: 0 when `q(S) >= 0`, otherwise the unique positive
/// `lambda` with `q(W + S / lambda) = 0`. Existence and uniqueness follow
/// from the concavity of `q`; the quadratic root is checked by
/// back-substitution and a residual bound.
pub fn lambda_source(w: &WState, s: &[f64; 4]) -> f64 {
    let dim = w.dim;
    if q_of_w(s, dim) >= 0.0 {
        return 0.0;
    }
    let se = s[dim + 1];
    let we = w.w[dim + 1];
    let mut ss = 0.0;
    let mut wsum = 0.0;
    let mut cross = 0.0;
    for i in 0..=dim {
        ss += s[i] * s[i];
        wsum += w.w[i] * w.w[i];
        cross += w.w[i] * s[i];
    }
    let a = se * se - ss;
    let b = 2.0 * (we * se - cross);
    let c = we * we - wsum;
    debug_assert!(c > 0.0, "lambda_source needs an admissible W");

    let scale = w.w.iter().map(|x| x.abs()).fold(0.0, f64::max).max(1e-300);
    let check = |mu: f64| -> bool {
        if !(mu > 0.0 && mu.is_finite()) {
            return false;
        }
        let mut wm = [0.0; 4];
        for i in 0..4 {
            wm[i] = w.w[i] + mu * s[i];
        }
        wm[dim + 1] >= 0.0 && q_of_w(&wm, dim).abs() <= 1e-10 * scale.max(mu * ss.sqrt())
    };

    let mut best: Option<f64> = None;
    if a.abs() > 1e-14 * (ss + se * se) {
        let disc = b * b - 4.0 * a * c;
        if disc >= 0.0 {
            let root = disc.sqrt();
            // Citardauq form keeps precision when b dominates.
            let mu1 = if b >= 0.0 {
                (-b - root) / (2.0 * a)
            } else {
                (2.0 * c) / (-b + root)
            };
            let mu2 = c / (a * mu1);
            for mu in [mu1, mu2] {
                if check(mu) {
                    best = Some(best.map_or(mu, |b: f64| b.min(mu)));
                }
            }
        }
    } else if b < 0.0 {
        let mu = -c / b;
        if check(mu) {
            best = Some(mu);
        }
    }
    let mu = best.unwrap_or_else(|| {
        // Robust fallback: q(W + mu S) is concave in mu, positive at 0 and
        // eventually negative; bisect for the crossing.
        let qm = |mu: f64| {
            let mut wm = [0.0; 4];
            for i in 0..4 {
                wm[i] = w.w[i] + mu * s[i];
            }
            q_of_w(&wm, dim)
        };
        let mut hi = 1.0;
        let mut guard = 0;
        while qm(hi) > 0.0 && guard < 600 {
            hi *= 2.0;
            guard += 1;
        }
        let mut lo = 0.0;
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if qm(mid) > 0.0 {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        0.5 * (lo + hi)
    });
    1.0 / mu
}

/// Largest time step honoring both the constraint-preserving bound and the
/// accuracy CFL `C_cfl h / eta` with `C_cfl = 0.3, 0.16, 0.1` for
/// degrees 1, 2, 3.
pub fn pcp_dt(rec: &SpeedRecord, mesh: &Mesh, degree: usize) -> f64 {
    let c_cfl = [0.3, 0.16, 0.1][degree - 1];
    let dt_acc = if mesh.dim == 1 {
        if rec.eta_x > 0.0 {
            c_cfl * mesh.hx / rec.eta_x
        } else {
            f64::INFINITY
        }
    } else {
        let denom = rec.eta_x / mesh.hx + rec.eta_y / mesh.hy;
        if denom > 0.0 {
            c_cfl / denom
        } else {
            f64::INFINITY
        }
    };
    let dt_pcp = if mesh.dim == 1 {
        let l = gl_point_count(degree);
        let om1 = gauss_lobatto_rule(l)[0].1;
        if rec.a_x > 0.0 {
            om1 * mesh.hx / rec.a_x
        } else {
            f64::INFINITY
        }
    } else {
        let z1 = rec.a_x / mesh.hx;
        let z2 = rec.a_y / mesh.hy;
        let denom = rec.lambda_max + 2.0 * (z1 + z2 + 2.0 * z1.max(z2));
        if denom > 0.0 {
            1.0 / denom
        } else {
            f64::INFINITY
        }
    };
    // The preservation bound is strict and the speeds are re-sampled only
    // once per step, so it gets a margin.
    dt_acc.min(0.9 * dt_pcp)
}
