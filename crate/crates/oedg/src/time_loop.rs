//! Explicit time integration orchestrating the stage -> damping -> limiter
//! pipeline.
//!
//! High-order steps are convex combinations of forward Euler stages; the
//! damping filter and the scaling limiter run after every stage with the
//! full step size, so the weak constraint-preservation argument applies to
//! each stage in turn.

use crate::dg::{DgWorkspace, SpeedRecord};
use crate::eos::q_of_w;
use crate::error::{Result, SolverError};
use crate::field::ModalField;
use crate::oe::{apply_oe, damping_profiles, OeWorkspace};
use crate::pcp::{build_decomposition, pcp_dt, pcp_limit, CriticalPointSet};
use crate::problems::ProblemSpec;

/// Available explicit integrators. Discontinuous production runs use
/// SspRk3; Rk4 serves the fourth-order smooth accuracy studies.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum IntegratorKind {
    Euler,
    SspRk3,
    Rk4,
}

impl IntegratorKind {
    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "euler" => Ok(IntegratorKind::Euler),
            "ssprk3" | "rk3" => Ok(IntegratorKind::SspRk3),
            "rk4" => Ok(IntegratorKind::Rk4),
            other => Err(SolverError::InvalidParameter(format!(
                "unknown integrator '{other}' (use euler, ssprk3, rk4)"
            ))),
        }
    }
}

/// Shu-Osher convex weights of the three-stage scheme.
pub const SSP_RK3_WEIGHTS: [[f64; 2]; 3] = [[1.0, 1.0], [0.75, 0.25], [1.0 / 3.0, 2.0 / 3.0]];

/// Reference ladder for scalar ODEs `dy/dt = f(y)`, sharing the stage
/// weights with the field integrator; used to pin the tableau.
pub fn scalar_stage_ladder(kind: IntegratorKind, y0: f64, dt: f64, f: impl Fn(f64) -> f64) -> f64 {
    match kind {
        IntegratorKind::Euler => y0 + dt * f(y0),
        IntegratorKind::SspRk3 => {
            let y1 = y0 + dt * f(y0);
            let y2 = SSP_RK3_WEIGHTS[1][0] * y0 + SSP_RK3_WEIGHTS[1][1] * (y1 + dt * f(y1));
            SSP_RK3_WEIGHTS[2][0] * y0 + SSP_RK3_WEIGHTS[2][1] * (y2 + dt * f(y2))
        }
        IntegratorKind::Rk4 => {
            let k1 = f(y0);
            let k2 = f(y0 + 0.5 * dt * k1);
            let k3 = f(y0 + 0.5 * dt * k2);
            let k4 = f(y0 + dt * k3);
            y0 + dt / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
        }
    }
}

/// Work counters for one step.
#[derive(Debug, Clone, Copy, Default)]
pub struct StageCounts {
    pub residual_evals: usize,
    pub oe_applications: usize,
    pub pcp_limits: usize,
}

/// One line of the per-step diagnostics series.
#[derive(Debug, Clone, Copy)]
pub struct StepDiagnostics {
    pub step: usize,
    pub t: f64,
    pub dt: f64,
    /// Minimum of `q` over cell averages after the step.
    pub min_q: f64,
    /// Total of the first evolved component (mass proxy).
    pub mass_total: f64,
    pub limiter_activations: usize,
    /// Largest pressure-solve iteration count over the cell averages.
    pub recovery_iter_max: usize,
}

fn axpy_into(dst: &mut ModalField, base: &ModalField, dt: f64, res: &[f64]) {
    use rayon::prelude::*;
    let stride = dst.n_comp * dst.n_basis;
    let (nx, ny) = dst.shape();
    let row = nx + 2;
    dst.data_mut()
        .par_chunks_mut(stride)
        .enumerate()
        .for_each(|(block, d)| {
            let gi = block % row;
            let gj = block / row;
            if gi == 0 || gi > nx || gj == 0 || gj > ny {
                return;
            }
            let cell = (gj - 1) * nx + (gi - 1);
            let src = base.cell(gi - 1, gj - 1);
            let r = &res[cell * stride..(cell + 1) * stride];
            for k in 0..stride {
                d[k] = src[k] + dt * r[k];
            }
        });
}

fn convex_into(dst: &mut ModalField, a: f64, x: &ModalField, b: f64, y: &ModalField) {
    dst.lincomb_interior(a, x, b, y);
}

/// One full step of the chosen integrator, returning the advanced field,
/// the merged speed record over all stages, counters, and the limiter
/// activation count.
#[allow(clippy::too_many_arguments)]
pub fn advance(
    state: &ModalField,
    dt: f64,
    t: f64,
    kind: IntegratorKind,
    ws: &DgWorkspace,
    oe_ws: &OeWorkspace,
    crit: &CriticalPointSet,
    oe_enabled: bool,
    pcp_enabled: bool,
) -> Result<(ModalField, SpeedRecord, StageCounts, usize)> {
    let mut counts = StageCounts::default();
    let mut activations = 0usize;
    let mut record = SpeedRecord::trivial();
    let mut res = Vec::new();

    let post = |field: &mut ModalField,
                t_stage: f64,
                counts: &mut StageCounts,
                acts: &mut usize|
     -> Result<()> {
        if oe_enabled {
            ws.fill_ghosts(field, t_stage)?;
            let profiles = damping_profiles(ws, oe_ws, field, crit)?;
            // The damping equation is integrated over the full step.
            apply_oe(field, &profiles, dt, &ws.basis);
            counts.oe_applications += 1;
        }
        if pcp_enabled {
            *acts += pcp_limit(field, crit, &ws.basis)?;
            counts.pcp_limits += 1;
        }
        Ok(())
    };

    let rhs = |field: &mut ModalField, t_stage: f64, res: &mut Vec<f64>| -> Result<SpeedRecord> {
        ws.fill_ghosts(field, t_stage)?;
        ws.residual(field, t_stage, res)
    };

    match kind {
        IntegratorKind::Euler => {
            let mut w0 = state.clone();
            let rec = rhs(&mut w0, t, &mut res)?;
            record.merge_from(&rec);
            counts.residual_evals += 1;
            let mut w1 = state.clone();
            axpy_into(&mut w1, state, dt, &res);
            post(&mut w1, t + dt, &mut counts, &mut activations)?;
            Ok((w1, record, counts, activations))
        }
        IntegratorKind::SspRk3 => {
            let mut w0 = state.clone();
            let rec = rhs(&mut w0, t, &mut res).map_err(|e| e.with_context("stage 1"))?;
            record.merge_from(&rec);
            counts.residual_evals += 1;
            let mut w1 = state.clone();
            axpy_into(&mut w1, &w0, dt, &res);
            post(&mut w1, t + dt, &mut counts, &mut activations)
                .map_err(|e| e.with_context("stage 1"))?;

            let rec = rhs(&mut w1, t + dt, &mut res).map_err(|e| e.with_context("stage 2"))?;
            record.merge_from(&rec);
            counts.residual_evals += 1;
            let mut w2 = state.clone();
            axpy_into(&mut w2, &w1, dt, &res);
            let mut tmp = state.clone();
            convex_into(
                &mut tmp,
                SSP_RK3_WEIGHTS[1][0],
                &w0,
                SSP_RK3_WEIGHTS[1][1],
                &w2,
            );
            let mut w2 = tmp;
            post(&mut w2, t + 0.5 * dt, &mut counts, &mut activations)
                .map_err(|e| e.with_context("stage 2"))?;

            let rec =
                rhs(&mut w2, t + 0.5 * dt, &mut res).map_err(|e| e.with_context("stage 3"))?;
            record.merge_from(&rec);
            counts.residual_evals += 1;
            let mut w3 = state.clone();
            axpy_into(&mut w3, &w2, dt, &res);
            let mut out = state.clone();
            convex_into(
                &mut out,
                SSP_RK3_WEIGHTS[2][0],
                &w0,
                SSP_RK3_WEIGHTS[2][1],
                &w3,
            );
            post(&mut out, t + dt, &mut counts, &mut activations)
                .map_err(|e| e.with_context("stage 3"))?;
            Ok((out, record, counts, activations))
        }
        IntegratorKind::Rk4 => {
            let mut w0 = state.clone();
            let mut k1 = Vec::new();
            let rec = rhs(&mut w0, t, &mut k1)?;
            record.merge_from(&rec);
            let mut s2 = state.clone();
            axpy_into(&mut s2, &w0, 0.5 * dt, &k1);
            post(&mut s2, t + 0.5 * dt, &mut counts, &mut activations)?;

            let mut k2 = Vec::new();
            let rec = rhs(&mut s2, t + 0.5 * dt, &mut k2)?;
            record.merge_from(&rec);
            let mut s3 = state.clone();
            axpy_into(&mut s3, &w0, 0.5 * dt, &k2);
            post(&mut s3, t + 0.5 * dt, &mut counts, &mut activations)?;

            let mut k3 = Vec::new();
            let rec = rhs(&mut s3, t + 0.5 * dt, &mut k3)?;
            record.merge_from(&rec);
            let mut s4 = state.clone();
            axpy_into(&mut s4, &w0, dt, &k3);
            post(&mut s4, t + dt, &mut counts, &mut activations)?;

            let mut k4 = Vec::new();
            let rec = rhs(&mut s4, t + dt, &mut k4)?;
            record.merge_from(&rec);
            counts.residual_evals += 4;
            let mut out = state.clone();
            {
                use rayon::prelude::*;
                let stride = out.n_comp * out.n_basis;
                let (nx, ny) = out.shape();
                let row = nx + 2;
                let w0_ref = &w0;
                out.data_mut()
                    .par_chunks_mut(stride)
                    .enumerate()
                    .for_each(|(block, d)| {
                        let gi = block % row;
                        let gj = block / row;
                        if gi == 0 || gi > nx || gj == 0 || gj > ny {
                            return;
                        }
                        let cell = (gj - 1) * nx + (gi - 1);
                        let base = w0_ref.cell(gi - 1, gj - 1);
                        for k in 0..stride {
                            let idx = cell * stride + k;
                            d[k] = base[k]
                                + dt / 6.0 * (k1[idx] + 2.0 * k2[idx] + 2.0 * k3[idx] + k4[idx]);
                        }
                    });
            }
            post(&mut out, t + dt, &mut counts, &mut activations)?;
            Ok((out, record, counts, activations))
        }
    }
}

impl SpeedRecord {
    fn merge_from(&mut self, other: &SpeedRecord) {
        self.a_x = self.a_x.max(other.a_x);
        self.a_y = self.a_y.max(other.a_y);
        self.lambda_max = self.lambda_max.max(other.lambda_max);
        self.eta_x = self.eta_x.max(other.eta_x);
        self.eta_y = self.eta_y.max(other.eta_y);
    }
}

/// Run controls: mesh/degree/integrator overrides and ablation toggles.
#[derive(Debug, Clone)]
pub struct RunControls {
    pub nx: usize,
    pub ny: usize,
    pub degree: usize,
    pub integrator: IntegratorKind,
    pub t_final: f64,
    pub oe_enabled: bool,
    pub pcp_enabled: bool,
    pub max_steps: usize,
}

/// Outcome of a full run.
pub struct RunResult {
    pub field: ModalField,
    pub ws: DgWorkspace,
    pub t_end: f64,
    pub steps: usize,
    pub diagnostics: Vec<StepDiagnostics>,
    pub initial_totals: [f64; 4],
    pub final_totals: [f64; 4],
    pub limiter_activations_total: usize,
}

/// Total integral of each evolved component (cell averages times measure).
pub fn conserved_totals(field: &ModalField, ws: &DgWorkspace) -> [f64; 4] {
    let (nx, ny) = field.shape();
    let mut tot = [0.0; 4];
    let k = ws.mesh.cell_measure();
    for j in 0..ny {
        for i in 0..nx {
            let avg = field.average(i, j);
            for c in 0..field.n_comp {
                tot[c] += avg[c] * k;
            }
        }
    }
    tot
}

/// Per-step scan of the cell averages: min q, mass total, and the largest
/// pressure-solve iteration count.
fn average_scan(field: &ModalField, ws: &DgWorkspace) -> (f64, f64, usize) {
    let (nx, ny) = field.shape();
    let mut min_q = f64::INFINITY;
    let mut mass = 0.0;
    let mut iters = 0usize;
    let measure = ws.mesh.cell_measure();
    for j in 0..ny {
        for i in 0..nx {
            let avg = field.average(i, j);
            min_q = min_q.min(q_of_w(&avg, field.dim));
            mass += avg[0] * measure;
            if let Ok(mp) = ws.metric_at(ws.mesh.cell_center(i, j)) {
                let u = crate::metric::from_w(
                    &crate::eos::WState {
                        w: avg,
                        dim: field.dim,
                    },
                    &mp,
                );
                if let Ok(rep) =
                    crate::recovery::recover_newton(&u, &mp.x_mat, field.dim, &ws.eos, 1e-14)
                {
                    iters = iters.max(rep.iterations);
                }
            }
        }
    }
    (min_q, mass, iters)
}

/// Advance a problem to its final time. `observer` is invoked after every
/// accepted step with the step index, current time, and the field.
pub fn run(
    problem: &ProblemSpec,
    controls: &RunControls,
    mut observer: Option<&mut dyn FnMut(usize, f64, &ModalField, &DgWorkspace) -> Result<()>>,
) -> Result<RunResult> {
    let ws = problem.workspace(controls.nx, controls.ny, controls.degree)?;
    let oe_ws = OeWorkspace::new(&ws);
    let mut field = ws.project_initial(problem.initial.as_ref())?;

    // The projected data must already be admissible on average; the first
    // limiter pass enforces the node-value constraints.
    let mut crit = build_decomposition(&ws.basis, &ws.mesh, 1.0, 1.0);
    if controls.pcp_enabled {
        pcp_limit(&mut field, &crit, &ws.basis)?;
    }
    let mut record = ws.speed_scan(&mut field, 0.0)?;

    let initial_totals = conserved_totals(&field, &ws);
    let mut t = 0.0_f64;
    let mut t_comp = 0.0_f64; // Kahan compensation
    let mut steps = 0usize;
    let mut diagnostics = Vec::new();
    let mut limiter_total = 0usize;
    let t_final = controls.t_final;

    while t < t_final {
        if steps >= controls.max_steps {
            return Err(SolverError::InvalidParameter(format!(
                "step limit {} reached at t = {t}",
                controls.max_steps
            )));
        }
        crit = build_decomposition(&ws.basis, &ws.mesh, record.a_x, record.a_y);
        let mut dt = if controls.pcp_enabled {
            pcp_dt(&record, &ws.mesh, ws.basis.degree)
        } else {
            // Ablation: accuracy CFL only.
            let c_cfl = [0.3, 0.16, 0.1][ws.basis.degree - 1];
            let denom = record.eta_x / ws.mesh.hx
                + if ws.mesh.dim == 2 {
                    record.eta_y / ws.mesh.hy
                } else {
                    0.0
                };
            if denom > 0.0 {
                c_cfl / denom
            } else {
                t_final - t
            }
        };
        if !(dt.is_finite() && dt > 0.0) {
            return Err(SolverError::InvalidParameter(format!(
                "non-positive time step {dt} at t = {t}"
            )));
        }
        let mut final_step = false;
        if t + dt >= t_final {
            dt = t_final - t;
            final_step = true;
        }

        // Defensive retry: the preservation bound is strict and speeds are
        // sampled once per step, so a roundoff-edge inadmissible average
        // triggers a halved retry before giving up.
        let mut attempt = 0usize;
        let mut dt_eff = dt;
        let (next, rec, _counts, acts) = loop {
            match advance(
                &field,
                dt_eff,
                t,
                controls.integrator,
                &ws,
                &oe_ws,
                &crit,
                controls.oe_enabled,
                controls.pcp_enabled,
            ) {
                Ok(out) => break out,
                Err(SolverError::InadmissibleAverage { cell, w0, q, state })
                    if attempt < 3 && controls.pcp_enabled =>
                {
                    attempt += 1;
                    dt_eff *= 0.5;
                    final_step = false;
                    let _ = (cell, w0, q, state);
                }
                Err(e) => {
                    return Err(e.with_context(&format!("step {steps} at t = {t}")));
                }
            }
        };
        field = next;
        record = rec;
        limiter_total += acts;

        // Compensated accumulation keeps t exact over many steps.
        let y = dt_eff - t_comp;
        let t_new = t + y;
        t_comp = (t_new - t) - y;
        t = t_new;
        if final_step {
            t = t_final;
            t_comp = 0.0;
        }
        steps += 1;
        let (min_q, mass_total, recovery_iter_max) = average_scan(&field, &ws);
        diagnostics.push(StepDiagnostics {
            step: steps,
            t,
            dt: dt_eff,
            min_q,
            mass_total,
            limiter_activations: acts,
            recovery_iter_max,
        });
        if let Some(obs) = observer.as_deref_mut() {
            obs(steps, t, &field, &ws)?;
        }
    }

    let final_totals = conserved_totals(&field, &ws);
    Ok(RunResult {
        field,
        ws,
        t_end: t,
        steps,
        diagnostics,
        initial_totals,
        final_totals,
        limiter_activations_total: limiter_total,
    })
}
