//! Ideal-gas thermodynamics, primitive/conserved algebra, characteristic
//! speeds, and admissibility predicates in both their direct and
//! quasi-linearized (witness-vector) forms.

use crate::error::{Result, SolverError};
use crate::metric::MetricPoint;

/// Velocities with `|v|_X` at or above this are treated as superluminal.
/// Keeps the Lorentz factor below ~2e7, far above any benchmark value.
pub const SUBLUMINAL_GUARD: f64 = 1.0 - 1e-15;

/// Ideal equation of state `e = p / ((Gamma - 1) rho)`.
#[derive(Debug, Clone, Copy)]
pub struct IdealGas {
    gamma: f64,
}

impl IdealGas {
    /// The adiabatic index must satisfy `1 < Gamma <= 2` (this keeps the
    /// sound speed below the speed of light).
    pub fn new(gamma: f64) -> Result<Self> {
        if !(gamma > 1.0 && gamma <= 2.0) {
            return Err(SolverError::InvalidParameter(format!(
                "adiabatic index must be in (1, 2], got {gamma}"
            )));
        }
        Ok(IdealGas { gamma })
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    /// Specific enthalpy `h = 1 + e + p/rho = 1 + Gamma/(Gamma-1) p/rho`.
    pub fn enthalpy(&self, rho: f64, p: f64) -> f64 {
        1.0 + self.gamma / (self.gamma - 1.0) * p / rho
    }

    /// Local sound speed `c_s = sqrt(Gamma p / (rho h))`, always < 1.
    pub fn sound_speed(&self, rho: f64, p: f64) -> f64 {
        (self.gamma * p / (rho * self.enthalpy(rho, p))).sqrt()
    }
}

/// Primitive variables `(rho, v, p)`. In 1D the second velocity slot is 0.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PrimitiveState {
    pub rho: f64,
    pub v: [f64; 2],
    pub p: f64,
}

impl PrimitiveState {
    pub fn new_1d(rho: f64, v: f64, p: f64) -> Self {
        PrimitiveState {
            rho,
            v: [v, 0.0],
            p,
        }
    }

    pub fn new_2d(rho: f64, v1: f64, v2: f64, p: f64) -> Self {
        PrimitiveState {
            rho,
            v: [v1, v2],
            p,
        }
    }

    /// Lorentz factor under the spatial metric `X`.
    pub fn lorentz(&self, x_mat: &[[f64; 2]; 2], dim: usize) -> f64 {
        1.0 / (1.0 - x_norm2(&self.v, x_mat, dim)).sqrt()
    }
}

/// ADM-form conserved variables `(D, m, E)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConservedState {
    pub d: f64,
    pub m: [f64; 2],
    pub e_tot: f64,
}

impl ConservedState {
    pub fn as_vec(&self, dim: usize) -> [f64; 4] {
        let mut u = [0.0; 4];
        u[0] = self.d;
        for i in 0..dim {
            u[1 + i] = self.m[i];
        }
        u[dim + 1] = self.e_tot;
        u
    }

    pub fn from_vec(u: &[f64; 4], dim: usize) -> Self {
        let mut m = [0.0; 2];
        for i in 0..dim {
            m[i] = u[1 + i];
        }
        ConservedState {
            d: u[0],
            m,
            e_tot: u[dim + 1],
        }
    }
}

/// W-form evolved vector: `W = sqrt(chi) (D, Theta m, E)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WState {
    pub w: [f64; 4],
    pub dim: usize,
}

impl WState {
    /// `q(W) = W_{d+1} - sqrt(sum_{i=0..d} W_i^2)`; admissible iff
    /// `W_0 > 0` and `q(W) > 0`, independent of the spacetime point.
    pub fn q(&self) -> f64 {
        q_of_w(&self.w, self.dim)
    }

    pub fn admissible(&self) -> bool {
        self.w[0] > 0.0 && self.q() > 0.0
    }
}

pub fn q_of_w(w: &[f64; 4], dim: usize) -> f64 {
    let mut s = 0.0;
    for wi in w.iter().take(dim + 1) {
        s += wi * wi;
    }
    w[dim + 1] - s.sqrt()
}

/// `sum_ij X_ij a^i b^j`.
pub fn x_inner(a: &[f64; 2], b: &[f64; 2], x_mat: &[[f64; 2]; 2], dim: usize) -> f64 {
    let mut s = 0.0;
    for i in 0..dim {
        for j in 0..dim {
            s += x_mat[i][j] * a[i] * b[j];
        }
    }
    s
}

/// Squared norm `|a|_X^2`.
pub fn x_norm2(a: &[f64; 2], x_mat: &[[f64; 2]; 2], dim: usize) -> f64 {
    x_inner(a, a, x_mat, dim)
}

/// Forward map `D = rho gamma, m = D h gamma v, E = D h gamma - p`.
pub fn primitive_to_conserved(
    q: &PrimitiveState,
    x_mat: &[[f64; 2]; 2],
    dim: usize,
    eos: &IdealGas,
) -> Result<ConservedState> {
    let v2 = x_norm2(&q.v, x_mat, dim);
    if !(v2 < SUBLUMINAL_GUARD * SUBLUMINAL_GUARD) {
        return Err(SolverError::Superluminal {
            speed: v2.sqrt(),
            context: "primitive_to_conserved".into(),
        });
    }
    let gamma = 1.0 / (1.0 - v2).sqrt();
    let h = eos.enthalpy(q.rho, q.p);
    let d = q.rho * gamma;
    let dhg = d * h * gamma;
    Ok(ConservedState {
        d,
        m: [dhg * q.v[0], dhg * q.v[1]],
        e_tot: dhg - q.p,
    })
}

/// `q_chi(U) = E - sqrt(D^2 + m X m^T)`; membership in the admissible set
/// additionally needs `D > 0`.
pub fn admissibility_q(u: &ConservedState, x_mat: &[[f64; 2]; 2], dim: usize) -> f64 {
    let mxm = x_norm2(&u.m, x_mat, dim);
    u.e_tot - (u.d * u.d + mxm).sqrt()
}

pub fn is_admissible(u: &ConservedState, x_mat: &[[f64; 2]; 2], dim: usize) -> bool {
    u.d > 0.0 && admissibility_q(u, x_mat, dim) > 0.0
}

/// Smallest and largest eigenvalues of the flux Jacobian in direction `n`
/// (covector components), including the `-n_i beta^i / alpha` shift.
pub fn characteristic_speeds(
    q: &PrimitiveState,
    mp: &MetricPoint,
    n: &[f64; 2],
    eos: &IdealGas,
) -> (f64, f64) {
    let dim = mp.dim;
    let cs2 = {
        let cs = eos.sound_speed(q.rho, q.p);
        cs * cs
    };
    let v2 = x_norm2(&q.v, &mp.x_mat, dim);
    let gamma_inv = (1.0 - v2).sqrt();
    let vn: f64 = (0..dim).map(|i| n[i] * q.v[i]).sum();
    let nn: f64 = {
        let mut s = 0.0;
        for i in 0..dim {
            for j in 0..dim {
                s += mp.x_inv[i][j] * n[i] * n[j];
            }
        }
        s
    };
    let bn: f64 = (0..dim).map(|i| n[i] * mp.beta[i]).sum();
    let denom = 1.0 - v2 * cs2;
    let disc = (denom * nn - (1.0 - cs2) * vn * vn).max(0.0);
    let root = cs2.sqrt() * gamma_inv * disc.sqrt();
    let shift = bn / mp.alpha;
    let lo = (vn * (1.0 - cs2) - root) / denom - shift;
    let hi = (vn * (1.0 - cs2) + root) / denom - shift;
    (lo, hi)
}

/// Spectral radius of the W-form flux Jacobian in direction `n`.
pub fn spectral_radius(q: &PrimitiveState, mp: &MetricPoint, n: &[f64; 2], eos: &IdealGas) -> f64 {
    let dim = mp.dim;
    let cs2 = {
        let cs = eos.sound_speed(q.rho, q.p);
        cs * cs
    };
    let v2 = x_norm2(&q.v, &mp.x_mat, dim);
    let gamma_inv = (1.0 - v2).sqrt();
    let vn: f64 = (0..dim).map(|i| n[i] * q.v[i]).sum();
    let nn: f64 = {
        let mut s = 0.0;
        for i in 0..dim {
            for j in 0..dim {
                s += mp.x_inv[i][j] * n[i] * n[j];
            }
        }
        s
    };
    let bn: f64 = (0..dim).map(|i| n[i] * mp.beta[i]).sum();
    let denom = 1.0 - v2 * cs2;
    let disc = (denom * nn - (1.0 - cs2) * vn * vn).max(0.0);
    mp.alpha / denom * (vn.abs() * (1.0 - cs2) + cs2.sqrt() * gamma_inv * disc.sqrt()) + bn.abs()
}

/// ADM flux vector for the contravariant momentum convention:
/// `G^i = (D vt^i, m^j vt^i + p chi^(ji), E vt^i + p v^i)` with the
/// transport velocity `vt^i = v^i - beta^i / alpha`. The pressure enters
/// through the contravariant spatial metric (the identity in flat space).
pub fn flux_g(q: &PrimitiveState, u: &ConservedState, mp: &MetricPoint, dir: usize) -> [f64; 4] {
    let dim = mp.dim;
    let vt = q.v[dir] - mp.beta[dir] / mp.alpha;
    let mut g = [0.0; 4];
    g[0] = u.d * vt;
    for j in 0..dim {
        g[1 + j] = u.m[j] * vt + q.p * mp.x_inv[j][dir];
    }
    g[dim + 1] = u.e_tot * vt + q.p * q.v[dir];
    g
}

/// Directional ADM flux `G_n = sum_i n_i G^i`.
pub fn flux_g_n(
    q: &PrimitiveState,
    u: &ConservedState,
    mp: &MetricPoint,
    n: &[f64; 2],
) -> [f64; 4] {
    let dim = mp.dim;
    let mut out = [0.0; 4];
    for i in 0..dim {
        if n[i] == 0.0 {
            continue;
        }
        let g = flux_g(q, u, mp, i);
        for (o, gi) in out.iter_mut().zip(g.iter()).take(dim + 2) {
            *o += n[i] * gi;
        }
    }
    out
}

/// Witness vector for the quasi-linearized admissibility test: states are
/// admissible iff `U . xi > 0` for every witness.
#[derive(Debug, Clone, Copy)]
pub struct GqlWitness {
    pub xi: [f64; 4],
    pub dim: usize,
}

impl GqlWitness {
    /// The distinguished first-unit-vector witness (tests `D > 0`).
    pub fn first_unit(dim: usize) -> Self {
        let mut xi = [0.0; 4];
        xi[0] = 1.0;
        GqlWitness { xi, dim }
    }

    /// Witness from an auxiliary velocity with `|v*|_X < 1`:
    /// `xi = (-sqrt(1 - v* X v*^T), -v* X, 1)`.
    pub fn from_vstar(v_star: &[f64; 2], x_mat: &[[f64; 2]; 2], dim: usize) -> Self {
        let vxv = x_norm2(v_star, x_mat, dim);
        debug_assert!(vxv < 1.0, "witness velocity must satisfy |v*|_X < 1");
        let mut xi = [0.0; 4];
        xi[0] = -(1.0 - vxv).sqrt();
        for j in 0..dim {
            let mut s = 0.0;
            for i in 0..dim {
                s += v_star[i] * x_mat[i][j];
            }
            xi[1 + j] = -s;
        }
        xi[dim + 1] = 1.0;
        GqlWitness { xi, dim }
    }

    /// Hatted witness for W-states: `xi = (-sqrt(1 - |vh|^2), -vh, 1)`.
    pub fn hatted(v_hat: &[f64; 2], dim: usize) -> Self {
        let vv: f64 = v_hat[..dim].iter().map(|x| x * x).sum();
        debug_assert!(vv < 1.0);
        let mut xi = [0.0; 4];
        xi[0] = -(1.0 - vv).sqrt();
        for j in 0..dim {
            xi[1 + j] = -v_hat[j];
        }
        xi[dim + 1] = 1.0;
        GqlWitness { xi, dim }
    }

    pub fn dot(&self, vec: &[f64; 4]) -> f64 {
        let mut s = 0.0;
        for i in 0..self.dim + 2 {
            s += self.xi[i] * vec[i];
        }
        s
    }
}

/// Inner products `U . xi` for a sequence of witnesses.
pub fn gql_inner_products(u: &ConservedState, witnesses: &[GqlWitness], dim: usize) -> Vec<f64> {
    let uv = u.as_vec(dim);
    witnesses.iter().map(|xi| xi.dot(&uv)).collect()
}
