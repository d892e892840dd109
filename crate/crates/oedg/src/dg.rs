//! Modal DG spatial discretization: projection, ghost cells, HLL interface
//! fluxes, and the per-cell residual operator.
//!
//! The evolved variables are always the W-form vector; in flat spacetime
//! this coincides with the conserved ADM vector. The residual of cell K is
//! `(A_S + A_H - A_Hhat) A_K^{-1}` assembled with Gauss quadrature: the
//! `(m+1)^d` tensor rule in the volume and `m+1` points per edge.

use crate::basis::{gauss_rule, Basis};
use crate::eos::{IdealGas, PrimitiveState, WState};
use crate::error::{Result, SolverError};
use crate::field::{EvolutionForm, ModalField};
use crate::mesh::{BcKind, Mesh, Side};
use crate::metric::{evaluate, flux_h_n, from_w, geometric_source, to_w, MetricKind, MetricPoint};
use crate::recovery::{recover_primitives, Method};
use rayon::prelude::*;

/// Maximum wave-speed spreads and source bounds gathered during one
/// residual evaluation; drives the PCP time-step restriction.
#[derive(Debug, Clone, Copy)]
pub struct SpeedRecord {
    /// max over x-edges of `s+ - s-`.
    pub a_x: f64,
    /// max over y-edges of `s+ - s-`.
    pub a_y: f64,
    /// max over volume nodes of the source bound `lambda_W`.
    pub lambda_max: f64,
    /// max over volume nodes of the spectral radius per direction.
    pub eta_x: f64,
    pub eta_y: f64,
}

impl SpeedRecord {
    pub fn trivial() -> Self {
        SpeedRecord {
            a_x: 0.0,
            a_y: 0.0,
            lambda_max: 0.0,
            eta_x: 0.0,
            eta_y: 0.0,
        }
    }

    fn merge(&mut self, other: &SpeedRecord) {
        self.a_x = self.a_x.max(other.a_x);
        self.a_y = self.a_y.max(other.a_y);
        self.lambda_max = self.lambda_max.max(other.lambda_max);
        self.eta_x = self.eta_x.max(other.eta_x);
        self.eta_y = self.eta_y.max(other.eta_y);
    }
}

/// Precomputed evaluation tables and problem context shared by every stage.
pub struct DgWorkspace {
    pub mesh: Mesh,
    pub basis: Basis,
    pub metric: MetricKind,
    pub eos: IdealGas,
    /// Gauss points per axis (`m + 1`).
    pub q: usize,
    pub gauss: Vec<(f64, f64)>,
    /// Volume tensor nodes, their weights (sum 1), value and gradient tables.
    pub vol_nodes: Vec<[f64; 2]>,
    pub vol_weights: Vec<f64>,
    pub vol_values: Vec<f64>,
    pub vol_grad_x: Vec<f64>,
    pub vol_grad_y: Vec<f64>,
    /// Trace tables at edge Gauss points: own-cell east face (`xi_x = +1`),
    /// west face, north face (`xi_y = +1`), south face.
    pub edge_east: Vec<f64>,
    pub edge_west: Vec<f64>,
    pub edge_north: Vec<f64>,
    pub edge_south: Vec<f64>,
    flat_point: Option<MetricPoint>,
    has_source: bool,
}

/// Borrow-or-owned metric point so flat backgrounds skip re-evaluation.
pub enum MetricAt<'a> {
    Shared(&'a MetricPoint),
    Owned(MetricPoint),
}

impl std::ops::Deref for MetricAt<'_> {
    type Target = MetricPoint;
    fn deref(&self) -> &MetricPoint {
        match self {
            MetricAt::Shared(mp) => mp,
            MetricAt::Owned(mp) => mp,
        }
    }
}

impl DgWorkspace {
    pub fn new(mesh: Mesh, basis: Basis, metric: MetricKind, eos: IdealGas) -> Result<Self> {
        assert_eq!(mesh.dim, basis.dim);
        assert_eq!(mesh.dim, metric.dim());
        let q = basis.degree + 1;
        let gauss = gauss_rule(q);
        let mut vol_nodes = Vec::new();
        let mut vol_weights = Vec::new();
        if mesh.dim == 1 {
            for &(x, w) in &gauss {
                vol_nodes.push([x, 0.0]);
                vol_weights.push(w);
            }
        } else {
            for &(y, wy) in &gauss {
                for &(x, wx) in &gauss {
                    vol_nodes.push([x, y]);
                    vol_weights.push(wx * wy);
                }
            }
        }
        let vol_values = basis.value_table(&vol_nodes);
        let vol_grad_x = basis.deriv_table(&vol_nodes, 1, 0);
        let vol_grad_y = basis.deriv_table(&vol_nodes, 0, 1);

        let edge_nodes = |f: &dyn Fn(f64) -> [f64; 2]| -> Vec<[f64; 2]> {
            if mesh.dim == 1 {
                vec![f(0.0)]
            } else {
                gauss.iter().map(|&(g, _)| f(g)).collect()
            }
        };
        let east = edge_nodes(&|g| [1.0, g]);
        let west = edge_nodes(&|g| [-1.0, g]);
        let north = edge_nodes(&|g| [g, 1.0]);
        let south = edge_nodes(&|g| [g, -1.0]);
        let edge_east = basis.value_table(&east);
        let edge_west = basis.value_table(&west);
        let edge_north = basis.value_table(&north);
        let edge_south = basis.value_table(&south);

        let flat_point = if matches!(
            metric,
            MetricKind::MinkowskiCartesian(_) | MetricKind::MinkowskiCylindrical
        ) {
            Some(evaluate(&metric, [0.0, 0.0], 0.0)?)
        } else {
            None
        };
        let has_source = !metric.is_flat_cartesian();
        Ok(DgWorkspace {
            mesh,
            basis,
            metric,
            eos,
            q,
            gauss,
            vol_nodes,
            vol_weights,
            vol_values,
            vol_grad_x,
            vol_grad_y,
            edge_east,
            edge_west,
            edge_north,
            edge_south,
            flat_point,
            has_source,
        })
    }

    #[inline]
    pub fn metric_at(&self, x: [f64; 2]) -> Result<MetricAt<'_>> {
        match &self.flat_point {
            Some(mp) => Ok(MetricAt::Shared(mp)),
            None => Ok(MetricAt::Owned(evaluate(&self.metric, x, 0.0)?)),
        }
    }

    pub fn n_comp(&self) -> usize {
        self.mesh.dim + 2
    }

    /// Number of edge quadrature points per edge.
    pub fn q_edge(&self) -> usize {
        if self.mesh.dim == 1 {
            1
        } else {
            self.q
        }
    }

    /// Edge quadrature weights (sum to one).
    pub fn edge_weight(&self, p: usize) -> f64 {
        if self.mesh.dim == 1 {
            1.0
        } else {
            self.gauss[p].1
        }
    }

    /// L2 projection of a pointwise primitive-state function into W-form
    /// modal coefficients; exact for polynomial data of degree <= m.
    pub fn project_initial(
        &self,
        f: &(dyn Fn([f64; 2]) -> PrimitiveState + Sync),
    ) -> Result<ModalField> {
        let n = self.basis.n;
        let n_comp = self.n_comp();
        let mut field = ModalField::new(&self.mesh, &self.basis, EvolutionForm::WForm);
        let dim = self.mesh.dim;
        for j in 0..self.mesh.ny {
            for i in 0..self.mesh.nx {
                let mut block = vec![0.0; n_comp * n];
                for (p, xi) in self.vol_nodes.iter().enumerate() {
                    let x = self.mesh.point(i, j, *xi);
                    let mp = self.metric_at(x)?;
                    let q = f(x);
                    let u = crate::eos::primitive_to_conserved(&q, &mp.x_mat, dim, &self.eos)
                        .map_err(|e| e.with_context(&format!("projection at cell ({i},{j})")))?;
                    let w = to_w(&u, &mp);
                    let wp = self.vol_weights[p];
                    for c in 0..n_comp {
                        for k in 0..n {
                            block[c * n + k] += wp * w.w[c] * self.vol_values[p * n + k];
                        }
                    }
                }
                let out = field.cell_mut(i, j);
                for c in 0..n_comp {
                    for k in 0..n {
                        out[c * n + k] = block[c * n + k] / self.basis.mass_diag_ref(k);
                    }
                }
            }
        }
        Ok(field)
    }

    /// Populate the ghost layer on one side.
    pub fn apply_boundary(&self, field: &mut ModalField, side: Side, t: f64) -> Result<()> {
        let bc = self.mesh.bc(side).clone();
        let (nx, ny) = (self.mesh.nx, self.mesh.ny);
        let _n = self.basis.n;
        let _n_comp = self.n_comp();
        let along_y = matches!(side, Side::XLow | Side::XHigh);
        let count = if along_y { ny } else { nx };
        for idx in 0..count {
            // Ghost-inclusive coordinates of the ghost cell and its
            // interior mirror for this side.
            let (ghost, interior, wrap) = match side {
                Side::XLow => ((0, idx + 1), (1, idx + 1), (nx, idx + 1)),
                Side::XHigh => ((nx + 1, idx + 1), (nx, idx + 1), (1, idx + 1)),
                Side::YLow => ((idx + 1, 0), (idx + 1, 1), (idx + 1, ny)),
                Side::YHigh => ((idx + 1, ny + 1), (idx + 1, ny), (idx + 1, 1)),
            };
            match &bc {
                BcKind::Periodic => {
                    let src = field.cell_ghost(wrap.0, wrap.1).to_vec();
                    field.cell_ghost_mut(ghost.0, ghost.1).copy_from_slice(&src);
                }
                BcKind::Outflow => {
                    let src = field.cell_ghost(interior.0, interior.1).to_vec();
                    field.cell_ghost_mut(ghost.0, ghost.1).copy_from_slice(&src);
                }
                BcKind::Reflective => {
                    self.reflect_into(field, ghost, interior, side);
                }
                BcKind::Dirichlet(f) => {
                    let fun = f.clone();
                    self.project_ghost(field, ghost, t, &move |x, tt| fun(x, tt))?;
                }
                BcKind::JetInlet { radius, beam } => {
                    // Side coordinate is x for y-sides (the nozzle sits on
                    // the bottom boundary).
                    let center = self.ghost_center(ghost);
                    if center[0] <= *radius {
                        let beam = *beam;
                        self.project_ghost(field, ghost, t, &move |_, _| beam)?;
                    } else {
                        let src = field.cell_ghost(interior.0, interior.1).to_vec();
                        field.cell_ghost_mut(ghost.0, ghost.1).copy_from_slice(&src);
                    }
                }
                BcKind::DirichletReflectiveSplit { split, state } => {
                    let center = self.ghost_center(ghost);
                    if center[0] <= *split {
                        let state = *state;
                        self.project_ghost(field, ghost, t, &move |_, _| state)?;
                    } else {
                        self.reflect_into(field, ghost, interior, side);
                    }
                }
            }
        }
        Ok(())
    }

    /// Fill all ghost cells for the current stage time.
    pub fn fill_ghosts(&self, field: &mut ModalField, t: f64) -> Result<()> {
        self.apply_boundary(field, Side::XLow, t)?;
        self.apply_boundary(field, Side::XHigh, t)?;
        if self.mesh.dim == 2 {
            self.apply_boundary(field, Side::YLow, t)?;
            self.apply_boundary(field, Side::YHigh, t)?;
        }
        Ok(())
    }

    fn ghost_center(&self, ghost: (usize, usize)) -> [f64; 2] {
        // Ghost-inclusive index (0 or n+1) maps to a center outside the
        // domain by half a cell.
        let gx = ghost.0 as f64 - 1.0;
        let gy = ghost.1 as f64 - 1.0;
        [
            self.mesh.x_lo + (gx + 0.5) * self.mesh.hx,
            self.mesh.y_lo + (gy + 0.5) * self.mesh.hy,
        ]
    }

    fn reflect_into(
        &self,
        field: &mut ModalField,
        ghost: (usize, usize),
        interior: (usize, usize),
        side: Side,
    ) {
        let n = self.basis.n;
        let n_comp = self.n_comp();
        let src = field.cell_ghost(interior.0, interior.1).to_vec();
        let dst = field.cell_ghost_mut(ghost.0, ghost.1);
        let x_normal = matches!(side, Side::XLow | Side::XHigh);
        let mom = if x_normal { 1 } else { 2.min(n_comp - 2) };
        for c in 0..n_comp {
            let flip_comp = if c == mom { -1.0 } else { 1.0 };
            for k in 0..n {
                let (a, b) = self.basis.powers[k];
                let parity = if x_normal { a } else { b };
                let sign = if parity % 2 == 1 { -1.0 } else { 1.0 };
                dst[c * n + k] = flip_comp * sign * src[c * n + k];
            }
        }
    }

    fn project_ghost(
        &self,
        field: &mut ModalField,
        ghost: (usize, usize),
        t: f64,
        f: &dyn Fn([f64; 2], f64) -> PrimitiveState,
    ) -> Result<()> {
        let n = self.basis.n;
        let n_comp = self.n_comp();
        let center = self.ghost_center(ghost);
        let dim = self.mesh.dim;
        let mut block = vec![0.0; n_comp * n];
        for (p, xi) in self.vol_nodes.iter().enumerate() {
            let x = [
                center[0] + 0.5 * self.mesh.hx * xi[0],
                center[1] + 0.5 * self.mesh.hy * xi[1],
            ];
            let mp = self.metric_at(x)?;
            let q = f(x, t);
            let u = crate::eos::primitive_to_conserved(&q, &mp.x_mat, dim, &self.eos)
                .map_err(|e| e.with_context("boundary projection"))?;
            let w = to_w(&u, &mp);
            let wp = self.vol_weights[p];
            for c in 0..n_comp {
                for k in 0..n {
                    block[c * n + k] += wp * w.w[c] * self.vol_values[p * n + k];
                }
            }
        }
        let dst = field.cell_ghost_mut(ghost.0, ghost.1);
        for c in 0..n_comp {
            for k in 0..n {
                dst[c * n + k] = block[c * n + k] / self.basis.mass_diag_ref(k);
            }
        }
        Ok(())
    }
}

/// HLL numerical flux in W variables through a face with unit normal `n`
/// (a coordinate direction). Returns the flux and the speed spread
/// `s+ - s-`.
pub fn hll_flux(
    wl: &WState,
    wr: &WState,
    mp: &MetricPoint,
    n: &[f64; 2],
    eos: &IdealGas,
) -> Result<([f64; 4], f64)> {
    let ul = from_w(wl, mp);
    let ur = from_w(wr, mp);
    let ql = recover_primitives(&ul, mp, eos, Method::Newton)?;
    let qr = recover_primitives(&ur, mp, eos, Method::Newton)?;
    let (lo_l, hi_l) = crate::eos::characteristic_speeds(&ql, mp, n, eos);
    let (lo_r, hi_r) = crate::eos::characteristic_speeds(&qr, mp, n, eos);
    let s_minus = mp.alpha * lo_l.min(lo_r).min(0.0);
    let s_plus = mp.alpha * hi_l.max(hi_r).max(0.0);
    let hl = flux_h_n(&ql, &ul, mp, n);
    let hr = flux_h_n(&qr, &ur, mp, n);
    let spread = s_plus - s_minus;
    let dim = mp.dim;
    let mut out = [0.0; 4];
    if spread <= f64::MIN_POSITIVE {
        for c in 0..dim + 2 {
            out[c] = 0.5 * (hl[c] + hr[c]);
        }
        return Ok((out, 0.0));
    }
    for c in 0..dim + 2 {
        out[c] =
            (s_plus * hl[c] - s_minus * hr[c] + s_plus * s_minus * (wr.w[c] - wl.w[c])) / spread;
    }
    Ok((out, spread))
}

struct EdgeFluxes {
    /// `[(n_edges) * q_edge]` flux vectors for one direction.
    flux: Vec<[f64; 4]>,
    spread_max: f64,
}

impl DgWorkspace {
    fn edge_pass_x(&self, field: &ModalField, _t: f64) -> Result<EdgeFluxes> {
        let (nx, ny) = (self.mesh.nx, self.mesh.ny);
        let qe = self.q_edge();
        let n = self.basis.n;
        let n_comp = self.n_comp();
        let dim = self.mesh.dim;
        let rows: Vec<Result<(Vec<[f64; 4]>, f64)>> = (0..ny)
            .into_par_iter()
            .map(|j| {
                let mut row = Vec::with_capacity((nx + 1) * qe);
                let mut spread_max = 0.0_f64;
                for i in 0..=nx {
                    let left = field.cell_ghost(i, j + 1);
                    let right = field.cell_ghost(i + 1, j + 1);
                    let x_edge = self.mesh.x_lo + i as f64 * self.mesh.hx;
                    for p in 0..qe {
                        let wl = ModalField::eval_with_row(
                            left,
                            &self.edge_east[p * n..(p + 1) * n],
                            n_comp,
                            n,
                        );
                        let wr = ModalField::eval_with_row(
                            right,
                            &self.edge_west[p * n..(p + 1) * n],
                            n_comp,
                            n,
                        );
                        let y = if dim == 2 {
                            self.mesh.y_lo + (j as f64 + 0.5 + 0.5 * self.gauss[p].0) * self.mesh.hy
                        } else {
                            0.0
                        };
                        let mp = self.metric_at([x_edge, y])?;
                        let wls = WState { w: wl, dim };
                        let wrs = WState { w: wr, dim };
                        let (f, spread) = hll_flux(&wls, &wrs, &mp, &[1.0, 0.0], &self.eos)
                            .map_err(|e| e.with_context(&format!("x-edge ({i},{j}) point {p}")))?;
                        spread_max = spread_max.max(spread);
                        row.push(f);
                    }
                }
                Ok((row, spread_max))
            })
            .collect();
        let mut flux = Vec::with_capacity((nx + 1) * ny * qe);
        let mut spread_max = 0.0_f64;
        for r in rows {
            let (row, s) = r?;
            flux.extend_from_slice(&row);
            spread_max = spread_max.max(s);
        }
        Ok(EdgeFluxes { flux, spread_max })
    }

    fn edge_pass_y(&self, field: &ModalField, _t: f64) -> Result<EdgeFluxes> {
        let (nx, ny) = (self.mesh.nx, self.mesh.ny);
        let qe = self.q_edge();
        let n = self.basis.n;
        let n_comp = self.n_comp();
        let dim = self.mesh.dim;
        let rows: Vec<Result<(Vec<[f64; 4]>, f64)>> = (0..=ny)
            .into_par_iter()
            .map(|j| {
                let mut row = Vec::with_capacity(nx * qe);
                let mut spread_max = 0.0_f64;
                let y_edge = self.mesh.y_lo + j as f64 * self.mesh.hy;
                for i in 0..nx {
                    let south = field.cell_ghost(i + 1, j);
                    let north = field.cell_ghost(i + 1, j + 1);
                    for p in 0..qe {
                        let wl = ModalField::eval_with_row(
                            south,
                            &self.edge_north[p * n..(p + 1) * n],
                            n_comp,
                            n,
                        );
                        let wr = ModalField::eval_with_row(
                            north,
                            &self.edge_south[p * n..(p + 1) * n],
                            n_comp,
                            n,
                        );
                        let x = self.mesh.x_lo
                            + (i as f64 + 0.5 + 0.5 * self.gauss[p].0) * self.mesh.hx;
                        let mp = self.metric_at([x, y_edge])?;
                        let wls = WState { w: wl, dim };
                        let wrs = WState { w: wr, dim };
                        let (f, spread) = hll_flux(&wls, &wrs, &mp, &[0.0, 1.0], &self.eos)
                            .map_err(|e| e.with_context(&format!("y-edge ({i},{j}) point {p}")))?;
                        spread_max = spread_max.max(spread);
                        row.push(f);
                    }
                }
                Ok((row, spread_max))
            })
            .collect();
        let mut flux = Vec::with_capacity(nx * (ny + 1) * qe);
        let mut spread_max = 0.0_f64;
        for r in rows {
            let (row, s) = r?;
            flux.extend_from_slice(&row);
            spread_max = spread_max.max(s);
        }
        Ok(EdgeFluxes { flux, spread_max })
    }

    /// Time derivative of the modal coefficients on every interior cell.
    /// `field` must have its ghost layer filled for the stage time. The
    /// output layout is `[cell][component][basis]` over interior cells.
    pub fn residual(&self, field: &ModalField, t: f64, out: &mut Vec<f64>) -> Result<SpeedRecord> {
        let (nx, ny) = (self.mesh.nx, self.mesh.ny);
        let n = self.basis.n;
        let n_comp = self.n_comp();
        let dim = self.mesh.dim;
        let qe = self.q_edge();
        let stride = n_comp * n;
        out.clear();
        out.resize(nx * ny * stride, 0.0);

        let ex = self.edge_pass_x(field, t)?;
        let ey = if dim == 2 {
            Some(self.edge_pass_y(field, t)?)
        } else {
            None
        };

        let inv_hx = 1.0 / self.mesh.hx;
        let inv_hy = 1.0 / self.mesh.hy;
        let mut rec = out
            .par_chunks_mut(stride)
            .enumerate()
            .map(|(cell, block)| {
                let i = cell % nx;
                let j = cell / nx;
                let coeffs = field.cell(i, j);
                let mut rec = SpeedRecord::trivial();

                // Volume terms: flux against gradients, plus sources. The
                // spectral radii feed only the accuracy CFL and are sampled
                // at the first volume node of each cell.
                for (p, xi) in self.vol_nodes.iter().enumerate() {
                    let x = self.mesh.point(i, j, *xi);
                    let mp = self.metric_at(x)?;
                    let wv = ModalField::eval_with_row(
                        coeffs,
                        &self.vol_values[p * n..(p + 1) * n],
                        n_comp,
                        n,
                    );
                    let ws = WState { w: wv, dim };
                    let u = from_w(&ws, &mp);
                    let qprim = recover_primitives(&u, &mp, &self.eos, Method::Newton)
                        .map_err(|e| e.with_context(&format!("volume node {p} cell ({i},{j})")))?;
                    let wp = self.vol_weights[p];
                    let hx_flux = flux_h_n(&qprim, &u, &mp, &[1.0, 0.0]);
                    if p == 0 {
                        rec.eta_x = rec.eta_x.max(crate::eos::spectral_radius(
                            &qprim,
                            &mp,
                            &[1.0, 0.0],
                            &self.eos,
                        ));
                    }
                    let grad_x = &self.vol_grad_x[p * n..(p + 1) * n];
                    for c in 0..n_comp {
                        let f = wp * hx_flux[c] * 2.0 * inv_hx;
                        for k in 0..n {
                            block[c * n + k] += f * grad_x[k];
                        }
                    }
                    if dim == 2 {
                        let hy_flux = flux_h_n(&qprim, &u, &mp, &[0.0, 1.0]);
                        if p == 0 {
                            rec.eta_y = rec.eta_y.max(crate::eos::spectral_radius(
                                &qprim,
                                &mp,
                                &[0.0, 1.0],
                                &self.eos,
                            ));
                        }
                        let grad_y = &self.vol_grad_y[p * n..(p + 1) * n];
                        for c in 0..n_comp {
                            let f = wp * hy_flux[c] * 2.0 * inv_hy;
                            for k in 0..n {
                                block[c * n + k] += f * grad_y[k];
                            }
                        }
                    }
                    if self.has_source {
                        let (_, s) = geometric_source(&self.metric, &qprim, &u, x, t, &self.eos)?;
                        rec.lambda_max = rec.lambda_max.max(crate::pcp::lambda_source(&ws, &s));
                        let vals = &self.vol_values[p * n..(p + 1) * n];
                        for c in 0..n_comp {
                            let f = wp * s[c];
                            for k in 0..n {
                                block[c * n + k] += f * vals[k];
                            }
                        }
                    }
                }

                // Edge terms: subtract outward HLL fluxes.
                for p in 0..qe {
                    let we = self.edge_weight(p);
                    let fe = &ex.flux[(j * (nx + 1) + i + 1) * qe + p];
                    let fw = &ex.flux[(j * (nx + 1) + i) * qe + p];
                    let row_e = &self.edge_east[p * n..(p + 1) * n];
                    let row_w = &self.edge_west[p * n..(p + 1) * n];
                    for c in 0..n_comp {
                        let ce = we * inv_hx * fe[c];
                        let cw = we * inv_hx * fw[c];
                        for k in 0..n {
                            block[c * n + k] -= ce * row_e[k];
                            block[c * n + k] += cw * row_w[k];
                        }
                    }
                }
                if let Some(ey) = &ey {
                    for p in 0..qe {
                        let we = self.edge_weight(p);
                        let fn_ = &ey.flux[((j + 1) * nx + i) * qe + p];
                        let fs = &ey.flux[(j * nx + i) * qe + p];
                        let row_n = &self.edge_north[p * n..(p + 1) * n];
                        let row_s = &self.edge_south[p * n..(p + 1) * n];
                        for c in 0..n_comp {
                            let cn = we * inv_hy * fn_[c];
                            let cs = we * inv_hy * fs[c];
                            for k in 0..n {
                                block[c * n + k] -= cn * row_n[k];
                                block[c * n + k] += cs * row_s[k];
                            }
                        }
                    }
                }

                // Mass-matrix inverse (diagonal).
                for c in 0..n_comp {
                    for k in 0..n {
                        block[c * n + k] /= self.basis.mass_diag_ref(k);
                    }
                }
                Ok::<SpeedRecord, SolverError>(rec)
            })
            .try_reduce(SpeedRecord::trivial, |mut a, b| {
                a.merge(&b);
                Ok(a)
            })?;

        rec.a_x = ex.spread_max;
        if let Some(ey) = &ey {
            rec.a_y = ey.spread_max;
        }
        Ok(rec)
    }

    /// Wave-speed scan without assembling the residual; used to size the
    /// very first time step.
    pub fn speed_scan(&self, field: &mut ModalField, t: f64) -> Result<SpeedRecord> {
        self.fill_ghosts(field, t)?;
        let ex = self.edge_pass_x(field, t)?;
        let mut rec = SpeedRecord::trivial();
        rec.a_x = ex.spread_max;
        if self.mesh.dim == 2 {
            let ey = self.edge_pass_y(field, t)?;
            rec.a_y = ey.spread_max;
        }
        let (nx, ny) = (self.mesh.nx, self.mesh.ny);
        let n = self.basis.n;
        let n_comp = self.n_comp();
        let dim = self.mesh.dim;
        for j in 0..ny {
            for i in 0..nx {
                let coeffs = field.cell(i, j);
                for (p, xi) in self.vol_nodes.iter().enumerate() {
                    let x = self.mesh.point(i, j, *xi);
                    let mp = self.metric_at(x)?;
                    let wv = ModalField::eval_with_row(
                        coeffs,
                        &self.vol_values[p * n..(p + 1) * n],
                        n_comp,
                        n,
                    );
                    let ws = WState { w: wv, dim };
                    let u = from_w(&ws, &mp);
                    let qprim = recover_primitives(&u, &mp, &self.eos, Method::Newton)?;
                    rec.eta_x = rec.eta_x.max(crate::eos::spectral_radius(
                        &qprim,
                        &mp,
                        &[1.0, 0.0],
                        &self.eos,
                    ));
                    if dim == 2 {
                        rec.eta_y = rec.eta_y.max(crate::eos::spectral_radius(
                            &qprim,
                            &mp,
                            &[0.0, 1.0],
                            &self.eos,
                        ));
                    }
                    if self.has_source {
                        let (_, s) = geometric_source(&self.metric, &qprim, &u, x, t, &self.eos)?;
                        rec.lambda_max = rec.lambda_max.max(crate::pcp::lambda_source(&ws, &s));
                    }
                }
            }
        }
        Ok(rec)
    }
}
