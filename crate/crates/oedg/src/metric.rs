//! Analytic spacetime metrics, Christoffel symbols, the W-form transform,
//! and geometric source terms.
//!
//! Three backgrounds are supported: Minkowski in Cartesian coordinates,
//! Minkowski in cylindrical coordinates for axisymmetric flow (identity
//! spatial metric plus a 1/r source), and the equatorial slice of a Kerr
//! black hole in horizon-regular Kerr-Schild coordinates with unit mass.

use crate::eos::{ConservedState, IdealGas, PrimitiveState, WState};
use crate::error::{Result, SolverError};

/// Which analytic background to evaluate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum MetricKind {
    /// Flat spacetime, `dim` in {1, 2}.
    MinkowskiCartesian(usize),
    /// Flat spacetime in cylindrical `(r, z)` coordinates, axisymmetric flow.
    MinkowskiCylindrical,
    /// Equatorial Kerr black hole in Kerr-Schild coordinates `(r, phi~)`,
    /// mass M = 1, spin `a` in [0, 1).
    KerrSchildEquatorial { a: f64 },
}

impl MetricKind {
    pub fn new_kerr(a: f64) -> Result<Self> {
        if !(0.0..1.0).contains(&a) {
            return Err(SolverError::InvalidParameter(format!(
                "Kerr spin must satisfy 0 <= a < 1, got {a}"
            )));
        }
        Ok(MetricKind::KerrSchildEquatorial { a })
    }

    pub fn dim(&self) -> usize {
        match self {
            MetricKind::MinkowskiCartesian(d) => *d,
            MetricKind::MinkowskiCylindrical => 2,
            MetricKind::KerrSchildEquatorial { .. } => 2,
        }
    }

    pub fn is_flat_cartesian(&self) -> bool {
        matches!(self, MetricKind::MinkowskiCartesian(_))
    }

    /// Event horizon radius `r+ = 1 + sqrt(1 - a^2)` (Kerr only).
    pub fn horizon(&self) -> Option<f64> {
        match self {
            MetricKind::KerrSchildEquatorial { a } => Some(1.0 + (1.0 - a * a).sqrt()),
            _ => None,
        }
    }
}

/// All metric data at one spacetime point.
#[derive(Debug, Clone)]
pub struct MetricPoint {
    pub dim: usize,
    /// Lapse.
    pub alpha: f64,
    /// Contravariant shift vector.
    pub beta: [f64; 2],
    /// Covariant spatial metric X (symmetric positive definite).
    pub x_mat: [[f64; 2]; 2],
    /// Inverse of X.
    pub x_inv: [[f64; 2]; 2],
    /// Upper-triangular Cholesky factor with Theta^T Theta = X.
    pub theta: [[f64; 2]; 2],
    /// det X.
    pub chi: f64,
    pub sqrt_chi: f64,
    /// det g_{mu nu}; sqrt(-g) = alpha sqrt(chi).
    pub g_det: f64,
    /// Covariant spacetime metric, (dim+1) x (dim+1) block in use.
    pub g_cov: [[f64; 3]; 3],
    /// Contravariant spacetime metric.
    pub g_con: [[f64; 3]; 3],
    /// `dg[sigma][mu][nu] = d g_{mu nu} / d x^sigma`, sigma = 0..=dim.
    pub dg: [[[f64; 3]; 3]; 3],
}

impl MetricPoint {
    pub fn sqrt_neg_g(&self) -> f64 {
        self.alpha * self.sqrt_chi
    }

    fn flat(dim: usize) -> MetricPoint {
        let mut g_cov = [[0.0; 3]; 3];
        let mut g_con = [[0.0; 3]; 3];
        g_cov[0][0] = -1.0;
        g_con[0][0] = -1.0;
        for i in 1..=dim {
            g_cov[i][i] = 1.0;
            g_con[i][i] = 1.0;
        }
        MetricPoint {
            dim,
            alpha: 1.0,
            beta: [0.0, 0.0],
            x_mat: [[1.0, 0.0], [0.0, 1.0]],
            x_inv: [[1.0, 0.0], [0.0, 1.0]],
            theta: [[1.0, 0.0], [0.0, 1.0]],
            chi: 1.0,
            sqrt_chi: 1.0,
            g_det: -1.0,
            g_cov,
            g_con,
            dg: [[[0.0; 3]; 3]; 3],
        }
    }
}

/// Evaluate the metric at spatial point `x` and time `t`.
pub fn evaluate(kind: &MetricKind, x: [f64; 2], _t: f64) -> Result<MetricPoint> {
    match kind {
        MetricKind::MinkowskiCartesian(d) => Ok(MetricPoint::flat(*d)),
        MetricKind::MinkowskiCylindrical => Ok(MetricPoint::flat(2)),
        MetricKind::KerrSchildEquatorial { a } => {
            let r = x[0];
            if r <= 0.0 {
                return Err(SolverError::InvalidParameter(format!(
                    "Kerr-Schild radius must be positive, got {r}"
                )));
            }
            let a = *a;
            let alpha = (r / (r + 2.0)).sqrt();
            let beta = [2.0 / (r + 2.0), 0.0];
            let x00 = (r + 2.0) / r;
            let x01 = -a * (r + 2.0) / r;
            let x11 = r * r + a * a + 2.0 * a * a / r;
            let x_mat = [[x00, x01], [x01, x11]];
            let chi = r * (r + 2.0);
            let x_inv = [[x11 / chi, -x01 / chi], [-x01 / chi, x00 / chi]];
            let s = x00.sqrt();
            let theta = [[s, -a * s], [0.0, r]];

            let g_cov = [
                [(2.0 - r) / r, 2.0 / r, -2.0 * a / r],
                [2.0 / r, (2.0 + r) / r, -a * (r + 2.0) / r],
                [-2.0 * a / r, -a * (r + 2.0) / r, x11],
            ];
            let g_con = [
                [-(2.0 + r) / r, 2.0 / r, 0.0],
                [2.0 / r, (a * a + r * r - 2.0 * r) / (r * r), a / (r * r)],
                [0.0, a / (r * r), 1.0 / (r * r)],
            ];
            let r2 = r * r;
            let mut dg = [[[0.0; 3]; 3]; 3];
            dg[1] = [
                [-2.0 / r2, -2.0 / r2, 2.0 * a / r2],
                [-2.0 / r2, -2.0 / r2, 2.0 * a / r2],
                [2.0 * a / r2, 2.0 * a / r2, 2.0 * r - 2.0 * a * a / r2],
            ];
            Ok(MetricPoint {
                dim: 2,
                alpha,
                beta,
                x_mat,
                x_inv,
                theta,
                chi,
                sqrt_chi: chi.sqrt(),
                g_det: -r2,
                g_cov,
                g_con,
                dg,
            })
        }
    }
}

/// Christoffel symbols `Gamma^sigma_{mu nu}` from the analytic metric
/// derivatives; symmetric in the lower pair.
pub fn christoffel(kind: &MetricKind, x: [f64; 2], t: f64) -> Result<[[[f64; 3]; 3]; 3]> {
    let mp = evaluate(kind, x, t)?;
    Ok(christoffel_from_point(&mp))
}

pub fn christoffel_from_point(mp: &MetricPoint) -> [[[f64; 3]; 3]; 3] {
    let n = mp.dim + 1;
    let mut gamma = [[[0.0; 3]; 3]; 3];
    for s in 0..n {
        for mu in 0..n {
            for nu in 0..n {
                let mut sum = 0.0;
                for lam in 0..n {
                    sum += mp.g_con[s][lam]
                        * (mp.dg[mu][nu][lam] + mp.dg[nu][mu][lam] - mp.dg[lam][mu][nu]);
                }
                gamma[s][mu][nu] = 0.5 * sum;
            }
        }
    }
    gamma
}

/// Four-velocity `u^mu = gamma (1/alpha, v^i - beta^i/alpha)`.
fn four_velocity(q: &PrimitiveState, mp: &MetricPoint) -> [f64; 3] {
    let gamma = q.lorentz(&mp.x_mat, mp.dim);
    let mut u = [0.0; 3];
    u[0] = gamma / mp.alpha;
    for i in 0..mp.dim {
        u[1 + i] = gamma * (q.v[i] - mp.beta[i] / mp.alpha);
    }
    u
}

/// Stress-energy tensor `T^{mu nu} = rho h u^mu u^nu + p g^{mu nu}`.
pub fn stress_energy(q: &PrimitiveState, mp: &MetricPoint, eos: &IdealGas) -> [[f64; 3]; 3] {
    let h = eos.enthalpy(q.rho, q.p);
    let u = four_velocity(q, mp);
    let n = mp.dim + 1;
    let mut t = [[0.0; 3]; 3];
    for mu in 0..n {
        for nu in 0..n {
            t[mu][nu] = q.rho * h * u[mu] * u[nu] + q.p * mp.g_con[mu][nu];
        }
    }
    t
}

/// Geometric source: the ADM-form vector `R` and the W-form vector `S`.
///
/// Cartesian flat space has no source. The axisymmetric cylindrical system
/// carries the closed-form `-1/r (D v1, m1 v1, m1 v2, m1)` (note
/// `m1 v2 = m2 v1`, the symmetric radial-axial stress). The Kerr case
/// assembles `R` from the stress-energy tensor and the Christoffel symbols
/// and maps it through `S = sqrt(-g) (L R + dL/dx^i G^i)`; the stationary
/// metrics here have `dL/dt = 0`.
pub fn geometric_source(
    kind: &MetricKind,
    q: &PrimitiveState,
    u: &ConservedState,
    x: [f64; 2],
    t: f64,
    eos: &IdealGas,
) -> Result<([f64; 4], [f64; 4])> {
    match kind {
        MetricKind::MinkowskiCartesian(_) => Ok(([0.0; 4], [0.0; 4])),
        MetricKind::MinkowskiCylindrical => {
            let r = x[0];
            let s = [
                -u.d * q.v[0] / r,
                -u.m[0] * q.v[0] / r,
                -u.m[0] * q.v[1] / r,
                -u.m[0] / r,
            ];
            Ok((s, s))
        }
        MetricKind::KerrSchildEquatorial { a } => {
            let mp = evaluate(kind, x, t)?;
            let gam = christoffel_from_point(&mp);
            let tse = stress_energy(q, &mp, eos);
            let n = mp.dim + 1;
            let r = x[0];

            // Covariant-momentum source rows:
            // R_j = T^{mu nu} g_{nu sigma} Gamma^sigma_{mu j}.
            let mut r_cov = [0.0; 2];
            for (j, rj) in r_cov.iter_mut().enumerate() {
                let mut sum = 0.0;
                for mu in 0..n {
                    for nu in 0..n {
                        for sg in 0..n {
                            sum += tse[mu][nu] * mp.g_cov[nu][sg] * gam[sg][mu][1 + j];
                        }
                    }
                }
                *rj = sum;
            }
            // Energy row: T^{mu 0} d_mu alpha - alpha T^{mu nu} Gamma^0_{mu nu}.
            let dalpha_dr = 1.0 / (mp.alpha * (r + 2.0) * (r + 2.0));
            let mut e_sum = tse[1][0] * dalpha_dr;
            for mu in 0..n {
                for nu in 0..n {
                    e_sum -= mp.alpha * tse[mu][nu] * gam[0][mu][nu];
                }
            }

            // Raise the momentum rows: the contravariant system picks up
            // d_r(X^{-1}) against the covariant momentum flux, with
            // d(X^{-1}) = -X^{-1} dX X^{-1}.
            let dx = [
                [-2.0 / (r * r), 2.0 * a / (r * r)],
                [2.0 * a / (r * r), 2.0 * r - 2.0 * a * a / (r * r)],
            ];
            let mut dxinv = [[0.0; 2]; 2];
            for k in 0..2 {
                for l in 0..2 {
                    let mut s = 0.0;
                    for p1 in 0..2 {
                        for p2 in 0..2 {
                            s -= mp.x_inv[k][p1] * dx[p1][p2] * mp.x_inv[p2][l];
                        }
                    }
                    dxinv[k][l] = s;
                }
            }
            // Covariant momentum and its r-direction flux F^r_j.
            let vt_r = q.v[0] - mp.beta[0] / mp.alpha;
            let m_cov = [
                mp.x_mat[0][0] * u.m[0] + mp.x_mat[0][1] * u.m[1],
                mp.x_mat[1][0] * u.m[0] + mp.x_mat[1][1] * u.m[1],
            ];
            let f_cov_r = [m_cov[0] * vt_r + q.p, m_cov[1] * vt_r];
            let mut rvec = [0.0; 4];
            for k in 0..2 {
                rvec[1 + k] = mp.x_inv[k][0] * r_cov[0]
                    + mp.x_inv[k][1] * r_cov[1]
                    + dxinv[k][0] * f_cov_r[0]
                    + dxinv[k][1] * f_cov_r[1];
            }
            rvec[mp.dim + 1] = e_sum;

            // S = sqrt(-g) (L R + dTheta/dr applied to the momentum block of G^r).
            let sg = mp.sqrt_neg_g();
            let g_r = crate::eos::flux_g(q, u, &mp, 0);
            let s_fac = ((r + 2.0) / r).sqrt();
            let ds = -1.0 / (r * r * s_fac);
            // dTheta/dr = [[ds, -a*ds], [0, 1]].
            let dth_g = [ds * g_r[1] + (-a * ds) * g_r[2], g_r[2]];
            let lr = [
                rvec[0],
                mp.theta[0][0] * rvec[1] + mp.theta[0][1] * rvec[2],
                mp.theta[1][1] * rvec[2],
                rvec[3],
            ];
            let svec = [
                sg * lr[0],
                sg * (lr[1] + dth_g[0]),
                sg * (lr[2] + dth_g[1]),
                sg * lr[3],
            ];
            Ok((rvec, svec))
        }
    }
}

/// `W = sqrt(chi) (D, Theta m, E)`.
pub fn to_w(u: &ConservedState, mp: &MetricPoint) -> WState {
    let dim = mp.dim;
    let mut w = [0.0; 4];
    w[0] = mp.sqrt_chi * u.d;
    for i in 0..dim {
        let mut s = 0.0;
        for j in 0..dim {
            s += mp.theta[i][j] * u.m[j];
        }
        w[1 + i] = mp.sqrt_chi * s;
    }
    w[dim + 1] = mp.sqrt_chi * u.e_tot;
    WState { w, dim }
}

/// Inverse of [`to_w`]: applies `Theta^{-1}` and divides by `sqrt(chi)`.
pub fn from_w(w: &WState, mp: &MetricPoint) -> ConservedState {
    let dim = mp.dim;
    let inv = 1.0 / mp.sqrt_chi;
    let mut m = [0.0; 2];
    if dim == 1 {
        m[0] = w.w[1] * inv / mp.theta[0][0];
    } else {
        // Back substitution with the upper-triangular factor.
        let y1 = w.w[2] * inv;
        let y0 = w.w[1] * inv;
        m[1] = y1 / mp.theta[1][1];
        m[0] = (y0 - mp.theta[0][1] * m[1]) / mp.theta[0][0];
    }
    ConservedState {
        d: w.w[0] * inv,
        m,
        e_tot: w.w[dim + 1] * inv,
    }
}

/// W-form directional flux `H_n(W) = sqrt(-g) L G_n`.
pub fn flux_h_n(
    q: &PrimitiveState,
    u: &ConservedState,
    mp: &MetricPoint,
    n: &[f64; 2],
) -> [f64; 4] {
    let g_n = crate::eos::flux_g_n(q, u, mp, n);
    let sg = mp.sqrt_neg_g();
    let dim = mp.dim;
    let mut h = [0.0; 4];
    h[0] = sg * g_n[0];
    for i in 0..dim {
        let mut s = 0.0;
        for j in 0..dim {
            s += mp.theta[i][j] * g_n[1 + j];
        }
        h[1 + i] = sg * s;
    }
    h[dim + 1] = sg * g_n[dim + 1];
    h
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::eos::{admissibility_q, primitive_to_conserved};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn minkowski_point_is_trivial() {
        let mp = evaluate(&MetricKind::MinkowskiCartesian(2), [0.3, 0.4], 1.0).unwrap();
        assert_eq!(mp.alpha, 1.0);
        assert_eq!(mp.beta, [0.0, 0.0]);
        assert_eq!(mp.theta, [[1.0, 0.0], [0.0, 1.0]]);
        assert_eq!(mp.chi, 1.0);
        assert_eq!(mp.g_det, -1.0);
    }

    #[test]
    fn kerr_closed_forms_at_a0_r2() {
        let kind = MetricKind::new_kerr(0.0).unwrap();
        let mp = evaluate(&kind, [2.0, 0.0], 0.0).unwrap();
        assert!((mp.alpha - (0.5f64).sqrt()).abs() < 1e-15);
        assert!((mp.x_mat[0][0] - 2.0).abs() < 1e-15);
        assert!((mp.x_mat[1][1] - 4.0).abs() < 1e-15);
        assert!((mp.theta[0][0] - 2.0f64.sqrt()).abs() < 1e-15);
        assert!((mp.theta[1][1] - 2.0).abs() < 1e-15);
        assert!((mp.chi - 8.0).abs() < 1e-13);
        assert!((mp.g_det + 4.0).abs() < 1e-13);
    }

    #[test]
    fn kerr_rejects_bad_inputs() {
        assert!(MetricKind::new_kerr(1.0).is_err());
        assert!(MetricKind::new_kerr(-0.1).is_err());
        let kind = MetricKind::new_kerr(0.5).unwrap();
        assert!(evaluate(&kind, [0.0, 0.0], 0.0).is_err());
        assert!(evaluate(&kind, [-1.0, 0.0], 0.0).is_err());
    }

    #[test]
    fn kerr_self_consistency_random_points() {
        // Theta^T Theta = X, g_cov g_con = I, sqrt(-g) = alpha sqrt(chi).
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..10_000 {
            let a = rng.gen_range(0.0..0.999);
            let r = rng.gen_range(0.05..51.0);
            let kind = MetricKind::new_kerr(a).unwrap();
            let mp = evaluate(&kind, [r, 0.0], 0.0).unwrap();
            for i in 0..2 {
                for j in 0..2 {
                    let mut tt = 0.0;
                    for k in 0..2 {
                        tt += mp.theta[k][i] * mp.theta[k][j];
                    }
                    assert!(
                        (tt - mp.x_mat[i][j]).abs() <= 1e-13 * mp.x_mat[i][j].abs().max(1.0),
                        "theta^T theta mismatch at r={r}, a={a}"
                    );
                }
            }
            for i in 0..3 {
                for j in 0..3 {
                    let mut gg = 0.0;
                    for k in 0..3 {
                        gg += mp.g_cov[i][k] * mp.g_con[k][j];
                    }
                    let expect = if i == j { 1.0 } else { 0.0 };
                    assert!(
                        (gg - expect).abs() < 1e-12 * (1.0 + r),
                        "g_cov g_con mismatch at r={r}, a={a}: ({i},{j}) = {gg}"
                    );
                }
            }
            assert!(
                ((-mp.g_det).sqrt() - mp.alpha * mp.sqrt_chi).abs() <= 1e-13 * (-mp.g_det).sqrt()
            );
        }
    }

    #[test]
    fn horizon_regularity() {
        // Condition number of X stays moderate across the horizon.
        for a_step in 0..=99 {
            let a = a_step as f64 * 0.01;
            let kind = MetricKind::new_kerr(a).unwrap();
            let rp = kind.horizon().unwrap();
            for r in [1.0, rp, 2.0, 10.0, 25.0, 51.0] {
                let mp = evaluate(&kind, [r, 0.0], 0.0).unwrap();
                // 2x2 SPD condition number from eigenvalues.
                let tr = mp.x_mat[0][0] + mp.x_mat[1][1];
                let det = mp.chi;
                let disc = (tr * tr / 4.0 - det).max(0.0).sqrt();
                let lmax = tr / 2.0 + disc;
                let lmin = tr / 2.0 - disc;
                assert!(lmin > 0.0);
                assert!(lmax / lmin < 1e6, "cond(X) too large at r={r}, a={a}");
                assert!(mp.alpha.is_finite() && mp.alpha > 0.0);
            }
        }
    }

    #[test]
    fn christoffel_is_zero_in_flat_space_and_symmetric_for_kerr() {
        let flat = christoffel(&MetricKind::MinkowskiCartesian(2), [0.1, 0.2], 0.0).unwrap();
        for s in 0..3 {
            for mu in 0..3 {
                for nu in 0..3 {
                    assert_eq!(flat[s][mu][nu], 0.0);
                }
            }
        }
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..100 {
            let a = rng.gen_range(0.0..0.99);
            let r = rng.gen_range(1.1..20.0);
            let kind = MetricKind::new_kerr(a).unwrap();
            let gam = christoffel(&kind, [r, 0.0], 0.0).unwrap();
            for s in 0..3 {
                for mu in 0..3 {
                    for nu in 0..3 {
                        assert!((gam[s][mu][nu] - gam[s][nu][mu]).abs() < 1e-12);
                    }
                }
            }
        }
    }

    #[test]
    fn christoffel_matches_finite_differences() {
        // Analytic metric derivatives against centered differences of g_cov.
        let kind = MetricKind::new_kerr(0.5).unwrap();
        let r = 3.0;
        let h = 1e-6;
        let mp = evaluate(&kind, [r, 0.0], 0.0).unwrap();
        let mp_p = evaluate(&kind, [r + h, 0.0], 0.0).unwrap();
        let mp_m = evaluate(&kind, [r - h, 0.0], 0.0).unwrap();
        let mut fd = MetricPoint { ..mp.clone() };
        for mu in 0..3 {
            for nu in 0..3 {
                fd.dg[1][mu][nu] = (mp_p.g_cov[mu][nu] - mp_m.g_cov[mu][nu]) / (2.0 * h);
            }
        }
        let gam_analytic = christoffel_from_point(&mp);
        let gam_fd = christoffel_from_point(&fd);
        for s in 0..3 {
            for mu in 0..3 {
                for nu in 0..3 {
                    assert!(
                        (gam_analytic[s][mu][nu] - gam_fd[s][mu][nu]).abs() < 1e-5,
                        "Gamma^{s}_{mu}{nu}: {} vs {}",
                        gam_analytic[s][mu][nu],
                        gam_fd[s][mu][nu]
                    );
                }
            }
        }
    }

    #[test]
    fn source_vanishes_in_flat_cartesian() {
        let eos = IdealGas::new(5.0 / 3.0).unwrap();
        let q = PrimitiveState::new_2d(1.0, 0.3, -0.2, 0.5);
        let mp = evaluate(&MetricKind::MinkowskiCartesian(2), [0.0, 0.0], 0.0).unwrap();
        let u = primitive_to_conserved(&q, &mp.x_mat, 2, &eos).unwrap();
        let (r, s) = geometric_source(
            &MetricKind::MinkowskiCartesian(2),
            &q,
            &u,
            [0.5, 0.5],
            0.0,
            &eos,
        )
        .unwrap();
        assert_eq!(r, [0.0; 4]);
        assert_eq!(s, [0.0; 4]);
    }

    #[test]
    fn cylindrical_source_closed_form() {
        let eos = IdealGas::new(5.0 / 3.0).unwrap();
        let q = PrimitiveState::new_2d(1.3, 0.25, -0.4, 0.7);
        let mp = evaluate(&MetricKind::MinkowskiCylindrical, [2.0, 0.0], 0.0).unwrap();
        let u = primitive_to_conserved(&q, &mp.x_mat, 2, &eos).unwrap();
        let r = 2.0;
        let (_, s) = geometric_source(
            &MetricKind::MinkowskiCylindrical,
            &q,
            &u,
            [r, 1.0],
            0.0,
            &eos,
        )
        .unwrap();
        assert!((s[0] + u.d * q.v[0] / r).abs() < 1e-15);
        assert!((s[1] + u.m[0] * q.v[0] / r).abs() < 1e-15);
        // m1 v2 = m2 v1: the radial flux of axial momentum.
        assert!((s[2] + u.m[1] * q.v[0] / r).abs() < 1e-13);
        assert!((s[3] + u.m[0] / r).abs() < 1e-15);
    }

    #[test]
    fn kerr_source_first_component_vanishes() {
        let eos = IdealGas::new(5.0 / 3.0).unwrap();
        let kind = MetricKind::new_kerr(0.99).unwrap();
        let mp = evaluate(&kind, [2.5, 0.3], 0.0).unwrap();
        let q = PrimitiveState::new_2d(0.8, 0.12, -0.05, 0.3);
        let u = primitive_to_conserved(&q, &mp.x_mat, 2, &eos).unwrap();
        let (r, _) = geometric_source(&kind, &q, &u, [2.5, 0.3], 0.0, &eos).unwrap();
        assert_eq!(r[0], 0.0);
    }

    #[test]
    fn w_transform_identity_in_flat_space() {
        let mp = evaluate(&MetricKind::MinkowskiCartesian(2), [0.0, 0.0], 0.0).unwrap();
        let u = ConservedState {
            d: 1.2,
            m: [0.3, -0.4],
            e_tot: 2.0,
        };
        let w = to_w(&u, &mp);
        assert_eq!(w.w, [1.2, 0.3, -0.4, 2.0]);
        let back = from_w(&w, &mp);
        assert_eq!(back, u);
    }

    #[test]
    fn w_transform_kerr_first_momentum_component() {
        // W_1 = (r + 2)(m_r - a m_phi).
        let kind = MetricKind::new_kerr(0.7).unwrap();
        let r = 3.7;
        let mp = evaluate(&kind, [r, 0.0], 0.0).unwrap();
        let u = ConservedState {
            d: 0.9,
            m: [0.21, -0.13],
            e_tot: 3.1,
        };
        let w = to_w(&u, &mp);
        let expect = (r + 2.0) * (u.m[0] - 0.7 * u.m[1]);
        assert!((w.w[1] - expect).abs() < 1e-12 * expect.abs().max(1.0));
        let back = from_w(&w, &mp);
        assert!((back.d - u.d).abs() < 1e-13);
        assert!((back.m[0] - u.m[0]).abs() < 1e-13);
        assert!((back.m[1] - u.m[1]).abs() < 1e-13);
        assert!((back.e_tot - u.e_tot).abs() < 1e-13);
    }

    #[test]
    fn w_admissibility_equivalence() {
        // q(to_w(U)) > 0 iff q_chi(U) > 0, boundary-straddling samples excluded.
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        let mut checked = 0;
        while checked < 1000 {
            let a = rng.gen_range(0.0..0.99);
            let r = rng.gen_range(1.0..30.0);
            let kind = MetricKind::new_kerr(a).unwrap();
            let mp = evaluate(&kind, [r, 0.0], 0.0).unwrap();
            let u = ConservedState {
                d: rng.gen_range(0.01..2.0),
                m: [rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)],
                e_tot: rng.gen_range(0.1..5.0),
            };
            let qc = admissibility_q(&u, &mp.x_mat, 2);
            if qc.abs() < 1e-6 {
                continue;
            }
            let w = to_w(&u, &mp);
            assert_eq!(w.q() > 0.0, qc > 0.0, "mismatch at r={r}, a={a}");
            checked += 1;
        }
    }

    #[test]
    fn round_trip_w_is_tight() {
        let mut rng = ChaCha8Rng::seed_from_u64(23);
        for _ in 0..1000 {
            let a = rng.gen_range(0.0..0.99);
            let r = rng.gen_range(1.0..40.0);
            let kind = MetricKind::new_kerr(a).unwrap();
            let mp = evaluate(&kind, [r, 0.0], 0.0).unwrap();
            let u = ConservedState {
                d: rng.gen_range(0.01..3.0),
                m: [rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0)],
                e_tot: rng.gen_range(0.1..6.0),
            };
            let back = from_w(&to_w(&u, &mp), &mp);
            for (x, y) in u.as_vec(2).iter().zip(back.as_vec(2).iter()) {
                assert!((x - y).abs() <= 1e-13 * x.abs().max(1.0));
            }
        }
    }
}
