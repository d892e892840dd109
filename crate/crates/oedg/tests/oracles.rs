//! Cross-module oracles: independent numerical routes checking the closed
//! forms (finite-difference Jacobians, dual-path source assembly, exact
//! time-derivative comparison, whole-run determinism).

use oedg::basis::Basis;
use oedg::dg::DgWorkspace;
use oedg::eos::{
    characteristic_speeds, flux_g_n, primitive_to_conserved, spectral_radius, ConservedState,
    IdealGas, PrimitiveState,
};
use oedg::mesh::{BcKind, Mesh};
use oedg::metric::{
    christoffel_from_point, evaluate, stress_energy, to_w, MetricKind, MetricPoint,
};
use oedg::problems::builtin;
use oedg::recovery::{recover_primitives, Method};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Extreme eigenvalues of a small matrix by shifted power iteration; the
/// spectra here are real (hyperbolic systems).
fn extreme_eigs(a: &[[f64; 4]; 4], n: usize) -> (f64, f64) {
    let shift = 20.0;
    let mut hi = 0.0;
    let mut lo = 0.0;
    for dir in [1.0_f64, -1.0] {
        let mut v = [1.0, 0.3, -0.2, 0.5];
        let mut lam = 0.0;
        for _ in 0..120_000 {
            let mut w = [0.0; 4];
            for i in 0..n {
                for j in 0..n {
                    w[i] += dir * a[i][j] * v[j];
                }
                w[i] += shift * v[i];
            }
            let norm = w.iter().take(n).map(|x| x * x).sum::<f64>().sqrt();
            for i in 0..n {
                v[i] = w[i] / norm;
            }
            lam = norm;
        }
        if dir > 0.0 {
            hi = lam - shift;
        } else {
            lo = -(lam - shift);
        }
    }
    (lo, hi)
}

fn fd_jacobian_extremes(
    mp: &MetricPoint,
    q: &PrimitiveState,
    n_dir: &[f64; 2],
    eos: &IdealGas,
) -> (f64, f64) {
    let dim = mp.dim;
    let nc = dim + 2;
    let u0 = primitive_to_conserved(q, &mp.x_mat, dim, eos).unwrap();
    let uv0 = u0.as_vec(dim);
    let mut jac = [[0.0_f64; 4]; 4];
    let h = 1e-7;
    for j in 0..nc {
        let scale = uv0[j].abs().max(1e-3);
        let mut up = uv0;
        up[j] += h * scale;
        let mut um = uv0;
        um[j] -= h * scale;
        let cp = ConservedState::from_vec(&up, dim);
        let cm = ConservedState::from_vec(&um, dim);
        let qp = recover_primitives(&cp, mp, eos, Method::Newton).unwrap();
        let qm = recover_primitives(&cm, mp, eos, Method::Newton).unwrap();
        let fp = flux_g_n(&qp, &cp, mp, n_dir);
        let fm = flux_g_n(&qm, &cm, mp, n_dir);
        for i in 0..nc {
            jac[i][j] = (fp[i] - fm[i]) / (2.0 * h * scale);
        }
    }
    extreme_eigs(&jac, nc)
}

#[test]
fn characteristic_speeds_match_fd_jacobian() {
    let mut rng = ChaCha8Rng::seed_from_u64(314);
    for trial in 0..40 {
        let (mp, dim) = match trial % 3 {
            0 => (
                evaluate(&MetricKind::MinkowskiCartesian(1), [0.0, 0.0], 0.0).unwrap(),
                1,
            ),
            1 => (
                evaluate(&MetricKind::MinkowskiCartesian(2), [0.0, 0.0], 0.0).unwrap(),
                2,
            ),
            _ => {
                let a = rng.gen_range(0.0..0.95);
                let r = rng.gen_range(1.5..15.0);
                (
                    evaluate(&MetricKind::new_kerr(a).unwrap(), [r, 0.3], 0.0).unwrap(),
                    2,
                )
            }
        };
        let eos = IdealGas::new([4.0 / 3.0, 5.0 / 3.0][trial % 2]).unwrap();
        // Moderate states keep the finite differences well conditioned.
        let vmag = rng.gen_range(0.0..0.7);
        let ang = rng.gen_range(0.0..std::f64::consts::TAU);
        let vh = if dim == 1 {
            [vmag, 0.0]
        } else {
            [vmag * ang.cos(), vmag * ang.sin()]
        };
        let v = if dim == 1 {
            [vh[0] / mp.theta[0][0], 0.0]
        } else {
            let v1 = vh[1] / mp.theta[1][1];
            [(vh[0] - mp.theta[0][1] * v1) / mp.theta[0][0], v1]
        };
        let q = PrimitiveState {
            rho: rng.gen_range(0.1..3.0),
            v,
            p: rng.gen_range(0.05..5.0),
        };
        let n_dir = if dim == 1 {
            [1.0, 0.0]
        } else {
            let a2 = rng.gen_range(0.0..std::f64::consts::TAU);
            [a2.cos(), a2.sin()]
        };
        let (lo, hi) = characteristic_speeds(&q, &mp, &n_dir, &eos);
        let (lo_fd, hi_fd) = fd_jacobian_extremes(&mp, &q, &n_dir, &eos);
        let scale = lo.abs().max(hi.abs()).max(0.1);
        assert!(
            (lo - lo_fd).abs() <= 1e-6 * scale,
            "trial {trial}: lambda_min {lo} vs fd {lo_fd}"
        );
        assert!(
            (hi - hi_fd).abs() <= 1e-6 * scale,
            "trial {trial}: lambda_max {hi} vs fd {hi_fd}"
        );
    }
}

#[test]
fn spectral_radius_second_evaluation_path() {
    // Re-evaluates the closed form through independently written Kerr
    // metric expressions (no MetricPoint plumbing).
    let a = 0.0;
    let r: f64 = 2.0;
    let eos = IdealGas::new(5.0 / 3.0).unwrap();
    let q = PrimitiveState::new_2d(1.0, 0.0, 0.0, 0.4);
    let mp = evaluate(&MetricKind::new_kerr(a).unwrap(), [r, 0.0], 0.0).unwrap();
    let eta = spectral_radius(&q, &mp, &[1.0, 0.0], &eos);

    let cs2 = eos.gamma() * q.p / (q.rho * (1.0 + eos.gamma() / (eos.gamma() - 1.0) * q.p));
    let alpha = (r / (r + 2.0)).sqrt();
    // Contravariant rr-component of the spatial metric from the closed
    // forms, and the contravariant radial shift.
    let chi = r * (r + 2.0);
    let xinv_rr = (r * r * r + r * a * a + 2.0 * a * a) / (r * chi);
    let beta_r = 2.0 / (r + 2.0);
    // v = 0: eta = alpha c_s sqrt(n X^-1 n) + |n beta|.
    let expect = alpha * cs2.sqrt() * xinv_rr.sqrt() + beta_r;
    assert!(
        (eta - expect).abs() < 1e-13 * expect,
        "{eta} vs independent {expect}"
    );
}

#[test]
fn kerr_source_dual_path() {
    // Independent assembly: finite-difference metric derivatives through
    // an independently coded Christoffel contraction and transform chain.
    let mut rng = ChaCha8Rng::seed_from_u64(2718);
    let eos = IdealGas::new(5.0 / 3.0).unwrap();
    for _ in 0..25 {
        let a = rng.gen_range(0.0..0.99);
        let r = rng.gen_range(1.5..10.0);
        let kind = MetricKind::new_kerr(a).unwrap();
        let mp = evaluate(&kind, [r, 0.2], 0.0).unwrap();
        let vmag = rng.gen_range(0.0..0.6);
        let ang = rng.gen_range(0.0..std::f64::consts::TAU);
        let vh = [vmag * ang.cos(), vmag * ang.sin()];
        let v1 = vh[1] / mp.theta[1][1];
        let q = PrimitiveState {
            rho: rng.gen_range(0.1..2.0),
            v: [(vh[0] - mp.theta[0][1] * v1) / mp.theta[0][0], v1],
            p: rng.gen_range(0.05..2.0),
        };
        let u = primitive_to_conserved(&q, &mp.x_mat, 2, &eos).unwrap();
        let (rvec, svec) =
            oedg::metric::geometric_source(&kind, &q, &u, [r, 0.2], 0.0, &eos).unwrap();
        assert_eq!(rvec[0], 0.0);

        // --- independent route ---
        let h = 1e-6;
        let mp_p = evaluate(&kind, [r + h, 0.2], 0.0).unwrap();
        let mp_m = evaluate(&kind, [r - h, 0.2], 0.0).unwrap();
        // FD metric derivatives drive the Christoffel symbols.
        let mut fd = mp.clone();
        for mu in 0..3 {
            for nu in 0..3 {
                fd.dg[1][mu][nu] = (mp_p.g_cov[mu][nu] - mp_m.g_cov[mu][nu]) / (2.0 * h);
            }
        }
        let gam = christoffel_from_point(&fd);
        let tse = stress_energy(&q, &mp, &eos);
        // Covariant momentum rows and the energy row.
        let mut r_cov = [0.0_f64; 2];
        for (jj, rj) in r_cov.iter_mut().enumerate() {
            let mut sum = 0.0;
            for mu in 0..3 {
                for nu in 0..3 {
                    for sg in 0..3 {
                        sum += tse[mu][nu] * mp.g_cov[nu][sg] * gam[sg][mu][1 + jj];
                    }
                }
            }
            *rj = sum;
        }
        let dalpha = (mp_p.alpha - mp_m.alpha) / (2.0 * h);
        let mut e_sum = tse[1][0] * dalpha;
        for mu in 0..3 {
            for nu in 0..3 {
                e_sum -= mp.alpha * tse[mu][nu] * gam[0][mu][nu];
            }
        }
        // Raise with the FD derivative of the inverse spatial metric.
        let mut dxinv = [[0.0_f64; 2]; 2];
        for k in 0..2 {
            for l in 0..2 {
                dxinv[k][l] = (mp_p.x_inv[k][l] - mp_m.x_inv[k][l]) / (2.0 * h);
            }
        }
        let vt_r = q.v[0] - mp.beta[0] / mp.alpha;
        let m_cov = [
            mp.x_mat[0][0] * u.m[0] + mp.x_mat[0][1] * u.m[1],
            mp.x_mat[1][0] * u.m[0] + mp.x_mat[1][1] * u.m[1],
        ];
        let f_cov_r = [m_cov[0] * vt_r + q.p, m_cov[1] * vt_r];
        let mut r_ind = [0.0_f64; 4];
        for k in 0..2 {
            r_ind[1 + k] = mp.x_inv[k][0] * r_cov[0]
                + mp.x_inv[k][1] * r_cov[1]
                + dxinv[k][0] * f_cov_r[0]
                + dxinv[k][1] * f_cov_r[1];
        }
        r_ind[3] = e_sum;
        // W-form map with the FD derivative of the Cholesky factor.
        let g_r = oedg::eos::flux_g(&q, &u, &mp, 0);
        let dth00 = (mp_p.theta[0][0] - mp_m.theta[0][0]) / (2.0 * h);
        let dth01 = (mp_p.theta[0][1] - mp_m.theta[0][1]) / (2.0 * h);
        let dth11 = (mp_p.theta[1][1] - mp_m.theta[1][1]) / (2.0 * h);
        let sg_fac = mp.sqrt_neg_g();
        let s_ind = [
            sg_fac * r_ind[0],
            sg_fac
                * (mp.theta[0][0] * r_ind[1]
                    + mp.theta[0][1] * r_ind[2]
                    + dth00 * g_r[1]
                    + dth01 * g_r[2]),
            sg_fac * (mp.theta[1][1] * r_ind[2] + dth11 * g_r[2]),
            sg_fac * r_ind[3],
        ];
        let scale = svec
            .iter()
            .map(|x| x.abs())
            .fold(1e-10_f64, f64::max)
            .max(1.0);
        for c in 0..4 {
            assert!(
                (svec[c] - s_ind[c]).abs() <= 1e-6 * scale,
                "component {c}: {} vs independent {} (a={a:.3}, r={r:.3})",
                svec[c],
                s_ind[c]
            );
        }
    }
}

#[test]
fn residual_matches_exact_time_derivative_at_order_m_plus_1() {
    // Smooth 2D wave: the cell-average part of the spatial residual
    // applied to the projected exact state converges to the exact time
    // derivative at order m+1 (the higher modal components carry the
    // usual order-m truncation; the solution itself still converges at
    // m+1, which the end-to-end ladders check). The wave has a 1e-4
    // density trough, so coarse projections need the limiter; the rate is
    // measured on the finest pair where it no longer engages.
    let spec = builtin("smooth2d").unwrap();
    let exact = spec.exact.clone().unwrap();
    for m in [1usize, 2] {
        let mut errs = Vec::new();
        let meshes: [usize; 3] = if m == 1 {
            [256, 512, 1024]
        } else {
            [64, 128, 256]
        };
        for (mesh_idx, &n) in meshes.iter().enumerate() {
            let ws = spec.workspace(n, n, m).unwrap();
            let t0 = 0.0;
            let f0 = {
                let ex = exact.clone();
                move |x: [f64; 2]| ex(x, t0)
            };
            let mut field = ws.project_initial(&f0).unwrap();
            let crit = oedg::pcp::build_decomposition(&ws.basis, &ws.mesh, 1.0, 1.0);
            let activations = oedg::pcp::pcp_limit(&mut field, &crit, &ws.basis).unwrap();
            if mesh_idx >= 1 {
                assert_eq!(
                    activations, 0,
                    "limiter active at N = {n}, the rate pair would be polluted"
                );
            }
            ws.fill_ghosts(&mut field, t0).unwrap();
            let mut res = Vec::new();
            ws.residual(&field, t0, &mut res).unwrap();
            // FD time derivative of the projected exact solution.
            let dt = 1e-6;
            let fp = {
                let ex = exact.clone();
                move |x: [f64; 2]| ex(x, t0 + dt)
            };
            let fm = {
                let ex = exact.clone();
                move |x: [f64; 2]| ex(x, t0 - dt)
            };
            let plus = ws.project_initial(&fp).unwrap();
            let minus = ws.project_initial(&fm).unwrap();
            let nb = ws.basis.n;
            let stride = 4 * nb;
            let mut err2 = 0.0;
            let mut err0 = 0.0;
            for j in 0..n {
                for i in 0..n {
                    let cell = j * n + i;
                    let cp = plus.cell(i, j);
                    let cm = minus.cell(i, j);
                    for c in 0..4 {
                        for k in 0..nb {
                            let dwdt = (cp[c * nb + k] - cm[c * nb + k]) / (2.0 * dt);
                            let diff = res[cell * stride + c * nb + k] - dwdt;
                            err2 +=
                                ws.basis.mass_diag_ref(k) * ws.mesh.cell_measure() * diff * diff;
                            if k == 0 {
                                err0 += ws.mesh.cell_measure() * diff * diff;
                            }
                        }
                    }
                }
            }
            let _ = err2;
            errs.push(err0.sqrt());
        }
        let rate = (errs[1] / errs[2]).log2();
        assert!(
            rate >= (m + 1) as f64 - 0.4,
            "degree {m}: residual consistency rate {rate:.2} (errors {errs:?})"
        );
    }
}

#[test]
fn identical_runs_are_bit_identical() {
    // Same configuration twice: snapshots agree byte for byte.
    use oedg::cli::write_snapshot;
    use oedg::time_loop::{run, IntegratorKind, RunControls};
    let spec = builtin("perturbation").unwrap();
    let controls = RunControls {
        nx: 64,
        ny: 1,
        degree: 2,
        integrator: IntegratorKind::SspRk3,
        t_final: 0.1,
        oe_enabled: true,
        pcp_enabled: true,
        max_steps: 1_000_000,
    };
    let dir = std::env::temp_dir().join("oedg_determinism");
    std::fs::create_dir_all(&dir).unwrap();
    let mut bytes = Vec::new();
    for k in 0..2 {
        let result = run(&spec, &controls, None).unwrap();
        let path = dir.join(format!("run{k}"));
        let csv = write_snapshot(&result.field, &result.ws, &path).unwrap();
        bytes.push(std::fs::read(csv).unwrap());
    }
    assert_eq!(bytes[0], bytes[1], "two identical runs differ");
    std::fs::remove_dir_all(&dir).ok();
}

#[test]
fn results_identical_across_worker_counts() {
    // The per-cell work is parallel but all reductions are deterministic,
    // so a single-threaded pool reproduces the multi-threaded run bit for
    // bit.
    use oedg::time_loop::{run, IntegratorKind, RunControls};
    let spec = builtin("smooth2d").unwrap();
    let controls = RunControls {
        nx: 16,
        ny: 16,
        degree: 2,
        integrator: IntegratorKind::SspRk3,
        t_final: 0.02,
        oe_enabled: true,
        pcp_enabled: true,
        max_steps: 100_000,
    };
    let multi = run(&spec, &controls, None).unwrap();
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(1)
        .build()
        .unwrap();
    let single = pool.install(|| run(&spec, &controls, None)).unwrap();
    assert_eq!(multi.steps, single.steps);
    let a = multi.field.data();
    let b = single.field.data();
    assert_eq!(a.len(), b.len());
    for (x, y) in a.iter().zip(b.iter()) {
        assert!(
            x.to_bits() == y.to_bits(),
            "worker counts changed a coefficient: {x} vs {y}"
        );
    }
}

#[test]
fn damping_with_zero_dt_is_identity() {
    use oedg::field::{EvolutionForm, ModalField};
    use oedg::oe::{apply_oe, DampingProfiles};
    let mesh = Mesh::new_1d(4, 0.0, 1.0, BcKind::Periodic, BcKind::Periodic).unwrap();
    let basis = Basis::new(1, 2);
    let mut field = ModalField::new(&mesh, &basis, EvolutionForm::WForm);
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for i in 0..4 {
        for v in field.cell_mut(i, 0) {
            *v = rng.gen_range(-1.0..1.0);
        }
    }
    let before = field.data().to_vec();
    let profiles = DampingProfiles {
        degree: 2,
        d: (0..4).flat_map(|_| vec![0.0, 3.0, 7.0]).collect(),
    };
    apply_oe(&mut field, &profiles, 0.0, &basis);
    assert_eq!(field.data(), &before[..]);
}

#[test]
fn kerr_recovery_respects_light_cone() {
    // Random admissible conserved states at random rotating-hole points:
    // recovered velocities stay strictly inside the light cone of the
    // local spatial metric.
    let mut rng = ChaCha8Rng::seed_from_u64(4242);
    for _ in 0..10_000 {
        let a = rng.gen_range(0.0..0.99);
        let r = rng.gen_range(1.05..40.0);
        let kind = MetricKind::new_kerr(a).unwrap();
        let mp = evaluate(&kind, [r, rng.gen_range(0.0..6.2)], 0.0).unwrap();
        let d = rng.gen_range(0.01..3.0);
        let m = [rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0)];
        let norm = (d * d + oedg::eos::x_norm2(&m, &mp.x_mat, 2)).sqrt();
        let u = ConservedState {
            d,
            m,
            e_tot: norm * (1.0 + 10f64.powf(rng.gen_range(-6.0..1.0))),
        };
        let q = recover_primitives(&u, &mp, &IdealGas::new(5.0 / 3.0).unwrap(), Method::Newton)
            .unwrap();
        let v2 = oedg::eos::x_norm2(&q.v, &mp.x_mat, 2);
        assert!(v2 < 1.0, "|v|_X = {} at r = {r}, a = {a}", v2.sqrt());
        assert!(q.rho > 0.0 && q.p >= 0.0);
    }
}

#[test]
fn strong_shock_tube_agrees_with_reference_within_golden_threshold() {
    // Desk-scale self-calibration: the L1 density distance between the
    // N = 800 degree-2 run and the first-order fine-grid reference was
    // 6.264e-2 when first computed; frozen here with a small margin for
    // cross-platform rounding.
    use oedg::time_loop::{run, IntegratorKind, RunControls};
    let spec = builtin("riemann1d_2").unwrap();
    let controls = RunControls {
        nx: 800,
        ny: 1,
        degree: 2,
        integrator: IntegratorKind::SspRk3,
        t_final: spec.t_final,
        oe_enabled: true,
        pcp_enabled: true,
        max_steps: 10_000_000,
    };
    let result = run(&spec, &controls, None).unwrap();
    let reference = oedg::problems::lax_friedrichs_reference(&spec, 10_000).unwrap();
    let ws = &result.ws;
    let mp = ws.metric_at([0.0, 0.0]).unwrap();
    let mut l1 = 0.0;
    for i in 0..800 {
        let avg = result.field.average(i, 0);
        let u = oedg::metric::from_w(&oedg::eos::WState { w: avg, dim: 1 }, &mp);
        let q = recover_primitives(&u, &mp, &ws.eos, Method::Newton).unwrap();
        let x = ws.mesh.cell_center(i, 0)[0];
        l1 += (q.rho - reference.sample(x).rho).abs() * ws.mesh.hx;
    }
    assert!(l1 <= 7.5e-2, "L1 distance {l1:.4e} above the frozen threshold");
}

#[test]
fn double_mach_top_boundary_splits_at_moving_front() {
    let spec = builtin("double_mach").unwrap();
    let top = match &spec.bcs[3] {
        BcKind::Dirichlet(f) => f.clone(),
        other => panic!("unexpected top boundary {other:?}"),
    };
    let t = 4.0;
    let xs = 1.0 / 6.0 + (1.0 + 2.0 * 0.4984 * t) / 3.0_f64.sqrt();
    let left = top([xs - 0.01, 1.0], t);
    let right = top([xs + 0.01, 1.0], t);
    assert!((left.rho - 8.564).abs() < 1e-12);
    assert!((right.rho - 1.4).abs() < 1e-12);
    // The split point solves h(x, t) = 1.
    let h_val = 3.0_f64.sqrt() * (xs - 1.0 / 6.0) - 2.0 * 0.4984 * t;
    assert!((h_val - 1.0).abs() < 1e-12);
}

#[test]
fn accretion_velocity_tends_to_uniform_inflow() {
    // Far from the hole the initial field approaches v_inf in +x.
    let spec = builtin("accretion_case4").unwrap();
    let r = 2.0e4;
    for phi in [0.0, 1.0, 2.5, 4.0, 5.5] {
        let q = (spec.initial)([r, phi]);
        // Cartesian velocity from polar components.
        let vx = q.v[0] * phi.cos() - r * q.v[1] * phi.sin();
        let vy = q.v[0] * phi.sin() + r * q.v[1] * phi.cos();
        assert!((vx - 0.5).abs() < 1e-3, "vx = {vx} at phi = {phi}");
        assert!(vy.abs() < 1e-3, "vy = {vy} at phi = {phi}");
    }
}

#[test]
fn conservation_under_2d_periodic_steps() {
    // Totals of every component stay put over a few steps.
    let spec = builtin("smooth2d").unwrap();
    let controls = oedg::time_loop::RunControls {
        nx: 24,
        ny: 24,
        degree: 2,
        integrator: oedg::time_loop::IntegratorKind::SspRk3,
        t_final: 0.01,
        oe_enabled: true,
        pcp_enabled: true,
        max_steps: 100_000,
    };
    let r = oedg::time_loop::run(&spec, &controls, None).unwrap();
    for c in 0..4 {
        let drift =
            (r.final_totals[c] - r.initial_totals[c]).abs() / r.initial_totals[c].abs().max(1e-300);
        assert!(drift < 1e-12, "component {c} drift {drift:.3e}");
    }
}

#[test]
fn jet_inlet_boundary_projects_beam() {
    let spec = builtin("jet_a1").unwrap();
    let ws = spec.workspace(12, 20, 1).unwrap();
    let mut field = ws.project_initial(spec.initial.as_ref()).unwrap();
    ws.fill_ghosts(&mut field, 0.0).unwrap();
    // Bottom ghosts inside the nozzle hold the beam state; outside they
    // copy the interior (outflow).
    let mp = ws.metric_at([0.0, 0.0]).unwrap();
    let n = ws.basis.n;
    for gi in 1..=12usize {
        let center_r = ws.mesh.x_lo + (gi as f64 - 0.5) * ws.mesh.hx;
        let ghost = field.cell_ghost(gi, 0);
        let mut avg = [0.0; 4];
        for c in 0..4 {
            avg[c] = ghost[c * n];
        }
        let u = oedg::metric::from_w(&oedg::eos::WState { w: avg, dim: 2 }, &mp);
        let q = recover_primitives(&u, &mp, &ws.eos, Method::Newton).unwrap();
        if center_r <= 1.0 {
            assert!(
                (q.rho - 0.01).abs() < 1e-10,
                "beam density at r = {center_r}"
            );
            assert!(
                (q.v[1] - 0.99).abs() < 1e-10,
                "beam speed at r = {center_r}"
            );
        } else {
            assert!(
                (q.rho - 1.0).abs() < 1e-10,
                "ambient density at r = {center_r}"
            );
        }
    }
}

#[test]
fn w_field_matches_u_field_in_flat_space() {
    // In flat spacetime the W-form evolution coincides with the conserved
    // ADM variables: to_w is the identity there.
    let mp = evaluate(&MetricKind::MinkowskiCartesian(2), [0.0, 0.0], 0.0).unwrap();
    let eos = IdealGas::new(5.0 / 3.0).unwrap();
    let q = PrimitiveState::new_2d(1.2, 0.3, -0.2, 0.9);
    let u = primitive_to_conserved(&q, &mp.x_mat, 2, &eos).unwrap();
    let w = to_w(&u, &mp);
    assert_eq!(w.w, u.as_vec(2));
    let _ = Mesh::new_1d(4, 0.0, 1.0, BcKind::Periodic, BcKind::Periodic).unwrap();
    let _ = DgWorkspace::new(
        Mesh::new_1d(4, 0.0, 1.0, BcKind::Periodic, BcKind::Periodic).unwrap(),
        Basis::new(1, 1),
        MetricKind::MinkowskiCartesian(1),
        eos,
    )
    .unwrap();
}
