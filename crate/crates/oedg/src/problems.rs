//! Registry of benchmark problems: initial and boundary conditions,
//! metric and EOS selection, final times, reference solutions, and
//! error/convergence reports.

use crate::basis::Basis;
use crate::dg::DgWorkspace;
use crate::eos::{IdealGas, PrimitiveState};
use crate::error::{Result, SolverError};
use crate::field::ModalField;
use crate::mesh::{BcKind, Mesh};
use crate::metric::{evaluate, from_w, MetricKind};
use crate::recovery::{recover_primitives, Method};
use std::f64::consts::PI;
use std::sync::Arc;

pub type InitialFn = Arc<dyn Fn([f64; 2]) -> PrimitiveState + Send + Sync>;
pub type ExactFn = Arc<dyn Fn([f64; 2], f64) -> PrimitiveState + Send + Sync>;

/// A fully specified benchmark problem.
#[derive(Clone)]
pub struct ProblemSpec {
    pub name: String,
    pub dim: usize,
    pub metric: MetricKind,
    pub gamma: f64,
    pub x_range: [f64; 2],
    pub y_range: [f64; 2],
    pub default_mesh: (usize, usize),
    pub t_final: f64,
    /// x-low, x-high, y-low, y-high.
    pub bcs: [BcKind; 4],
    pub initial: InitialFn,
    pub exact: Option<ExactFn>,
    /// Fine-grid cell count for the first-order reference solve, for 1D
    /// problems without a closed-form solution.
    pub reference_cells: Option<usize>,
}

impl std::fmt::Debug for ProblemSpec {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("ProblemSpec")
            .field("name", &self.name)
            .field("dim", &self.dim)
            .field("metric", &self.metric)
            .field("gamma", &self.gamma)
            .field("t_final", &self.t_final)
            .finish_non_exhaustive()
    }
}

impl ProblemSpec {
    pub fn workspace(&self, nx: usize, ny: usize, degree: usize) -> Result<DgWorkspace> {
        let eos = IdealGas::new(self.gamma)?;
        let mesh = if self.dim == 1 {
            Mesh::new_1d(
                nx,
                self.x_range[0],
                self.x_range[1],
                self.bcs[0].clone(),
                self.bcs[1].clone(),
            )?
        } else {
            Mesh::new_2d(
                nx,
                ny,
                self.x_range[0],
                self.x_range[1],
                self.y_range[0],
                self.y_range[1],
                self.bcs.clone(),
            )?
        };
        DgWorkspace::new(mesh, Basis::new(self.dim, degree), self.metric, eos)
    }
}

/// Shock speed of the reflected wall shock: `(Gamma-1) W0 |v0| / (W0 + 1)`.
pub fn shock_heating_speed(gamma: f64, v0: f64) -> f64 {
    let w0 = 1.0 / (1.0 - v0 * v0).sqrt();
    (gamma - 1.0) * w0 * v0.abs() / (w0 + 1.0)
}

fn quadrant(
    x: [f64; 2],
    ne: PrimitiveState,
    nw: PrimitiveState,
    sw: PrimitiveState,
    se: PrimitiveState,
) -> PrimitiveState {
    match (x[0] > 0.5, x[1] > 0.5) {
        (true, true) => ne,
        (false, true) => nw,
        (false, false) => sw,
        (true, false) => se,
    }
}

/// Initial accretion velocity field: locally rescaled so the flow speed is
/// `v_inf` everywhere in the spatial metric and tends to uniform +x flow
/// far from the hole.
fn accretion_velocity(r: f64, phi: f64, a: f64, v_inf: f64) -> [f64; 2] {
    let g_rr = (2.0 + r) / r;
    let g_rp = -a * (r + 2.0) / r;
    let g_pp = (r * r * r + r * a * a + 2.0 * a * a) / r;
    let f1 = 1.0 / g_rr.sqrt();
    let f3 = -2.0 * g_rp / (g_rr.sqrt() * g_pp);
    let det2 = g_rr * g_pp - g_rp * g_rp;
    let quad = f1 * f1 * g_rr + f3 * f3 * g_pp + 2.0 * f1 * f3 * g_rp;
    let f4 = (f1 * g_rr + f3 * g_rp) / (det2 * quad).sqrt();
    let f2 = f4 * (f1 * g_rp + f3 * g_pp) / (f1 * g_rr + f3 * g_rp);
    let (s, c) = phi.sin_cos();
    [
        f1 * v_inf * c + f2 * v_inf * s,
        f3 * v_inf * c - f4 * v_inf * s,
    ]
}

struct AccretionCase {
    gamma: f64,
    mach: f64,
    v_inf: f64,
    r_min: f64,
    a: f64,
}

const ACCRETION_CASES: [AccretionCase; 10] = [
    AccretionCase {
        gamma: 5.0 / 3.0,
        mach: 5.0,
        v_inf: 0.5,
        r_min: 1.8,
        a: 0.0,
    },
    AccretionCase {
        gamma: 5.0 / 3.0,
        mach: 5.0,
        v_inf: 0.5,
        r_min: 1.8,
        a: 0.5,
    },
    AccretionCase {
        gamma: 5.0 / 3.0,
        mach: 5.0,
        v_inf: 0.5,
        r_min: 1.4,
        a: 0.9,
    },
    AccretionCase {
        gamma: 5.0 / 3.0,
        mach: 5.0,
        v_inf: 0.5,
        r_min: 1.0,
        a: 0.99,
    },
    AccretionCase {
        gamma: 4.0 / 3.0,
        mach: 5.0,
        v_inf: 0.5,
        r_min: 1.0,
        a: 0.99,
    },
    AccretionCase {
        gamma: 2.0,
        mach: 5.0,
        v_inf: 0.5,
        r_min: 1.0,
        a: 0.99,
    },
    AccretionCase {
        gamma: 5.0 / 3.0,
        mach: 5.0,
        v_inf: 0.9,
        r_min: 1.0,
        a: 0.99,
    },
    AccretionCase {
        gamma: 5.0 / 3.0,
        mach: 5.0,
        v_inf: 0.99,
        r_min: 1.0,
        a: 0.99,
    },
    AccretionCase {
        gamma: 5.0 / 3.0,
        mach: 20.0,
        v_inf: 0.5,
        r_min: 1.0,
        a: 0.99,
    },
    AccretionCase {
        gamma: 5.0 / 3.0,
        mach: 50.0,
        v_inf: 0.5,
        r_min: 1.0,
        a: 0.99,
    },
];

fn accretion_spec(case: usize) -> Result<ProblemSpec> {
    let c = &ACCRETION_CASES[case - 1];
    let cs = c.v_inf / c.mach;
    let p_inf = cs * cs * (c.gamma - 1.0) / (c.gamma * (c.gamma - 1.0 - cs * cs));
    let a = c.a;
    let v_inf = c.v_inf;
    let init = move |x: [f64; 2]| -> PrimitiveState {
        let v = accretion_velocity(x[0], x[1], a, v_inf);
        PrimitiveState {
            rho: 1.0,
            v,
            p: p_inf,
        }
    };
    let init_arc: InitialFn = Arc::new(init);
    let outer = init_arc.clone();
    Ok(ProblemSpec {
        name: format!("accretion_case{case}"),
        dim: 2,
        metric: MetricKind::new_kerr(c.a)?,
        gamma: c.gamma,
        x_range: [c.r_min, 50.9],
        y_range: [0.0, 2.0 * PI],
        default_mesh: (600, 250),
        t_final: 500.0,
        bcs: [
            BcKind::Outflow,
            BcKind::Dirichlet(Arc::new(move |x, _| outer(x))),
            BcKind::Periodic,
            BcKind::Periodic,
        ],
        initial: init_arc,
        exact: None,
        reference_cells: None,
    })
}

/// All registered problem names.
pub fn problem_names() -> Vec<String> {
    let mut names = vec![
        "smooth1d".to_string(),
        "shock_heating".to_string(),
        "blast_collision".to_string(),
        "riemann1d_1".to_string(),
        "riemann1d_2".to_string(),
        "perturbation".to_string(),
        "smooth2d".to_string(),
        "riemann2d_1".to_string(),
        "riemann2d_2".to_string(),
        "riemann2d_3".to_string(),
        "double_mach".to_string(),
        "shock_bubble".to_string(),
        "jet_a1".to_string(),
        "jet_c2".to_string(),
    ];
    for k in 1..=10 {
        names.push(format!("accretion_case{k}"));
    }
    names
}

/// Look up a problem by name with the literal benchmark constants.
pub fn builtin(name: &str) -> Result<ProblemSpec> {
    match name {
        "smooth1d" => {
            let f = |x: f64, t: f64| {
                PrimitiveState::new_1d(
                    1.0 + 0.9999 * (2.0 * PI * (x - 0.99 * t)).sin(),
                    0.99,
                    0.001,
                )
            };
            Ok(ProblemSpec {
                name: name.into(),
                dim: 1,
                metric: MetricKind::MinkowskiCartesian(1),
                gamma: 5.0 / 3.0,
                x_range: [0.0, 1.0],
                y_range: [0.0, 1.0],
                default_mesh: (256, 1),
                t_final: 1.0,
                bcs: [
                    BcKind::Periodic,
                    BcKind::Periodic,
                    BcKind::Periodic,
                    BcKind::Periodic,
                ],
                initial: Arc::new(move |x| f(x[0], 0.0)),
                exact: Some(Arc::new(move |x, t| f(x[0], t))),
                reference_cells: None,
            })
        }
        "shock_heating" => {
            let inflow = PrimitiveState::new_1d(1.0, 1.0 - 1e-10, 1e-4 / 3.0);
            Ok(ProblemSpec {
                name: name.into(),
                dim: 1,
                metric: MetricKind::MinkowskiCartesian(1),
                gamma: 4.0 / 3.0,
                x_range: [0.0, 1.0],
                y_range: [0.0, 1.0],
                default_mesh: (200, 1),
                t_final: 2.0,
                bcs: [
                    BcKind::Dirichlet(Arc::new(move |_, _| inflow)),
                    BcKind::Reflective,
                    BcKind::Periodic,
                    BcKind::Periodic,
                ],
                initial: Arc::new(move |_| inflow),
                exact: None,
                reference_cells: None,
            })
        }
        "blast_collision" => Ok(ProblemSpec {
            name: name.into(),
            dim: 1,
            metric: MetricKind::MinkowskiCartesian(1),
            gamma: 1.4,
            x_range: [0.0, 1.0],
            y_range: [0.0, 1.0],
            default_mesh: (4000, 1),
            t_final: 0.43,
            bcs: [
                BcKind::Outflow,
                BcKind::Outflow,
                BcKind::Periodic,
                BcKind::Periodic,
            ],
            initial: Arc::new(|x| {
                if x[0] <= 0.1 {
                    PrimitiveState::new_1d(1.0, 0.0, 1000.0)
                } else if x[0] <= 0.9 {
                    PrimitiveState::new_1d(1.0, 0.0, 0.01)
                } else {
                    PrimitiveState::new_1d(1.0, 0.0, 100.0)
                }
            }),
            exact: None,
            reference_cells: Some(100_000),
        }),
        "riemann1d_1" => Ok(ProblemSpec {
            name: name.into(),
            dim: 1,
            metric: MetricKind::MinkowskiCartesian(1),
            gamma: 5.0 / 3.0,
            x_range: [0.0, 1.0],
            y_range: [0.0, 1.0],
            default_mesh: (400, 1),
            t_final: 0.4,
            bcs: [
                BcKind::Outflow,
                BcKind::Outflow,
                BcKind::Periodic,
                BcKind::Periodic,
            ],
            initial: Arc::new(|x| {
                if x[0] < 0.5 {
                    PrimitiveState::new_1d(10.0, 0.0, 1000.0)
                } else {
                    PrimitiveState::new_1d(1.0, 0.0, 0.01)
                }
            }),
            exact: None,
            reference_cells: Some(100_000),
        }),
        "riemann1d_2" => Ok(ProblemSpec {
            name: name.into(),
            dim: 1,
            metric: MetricKind::MinkowskiCartesian(1),
            gamma: 5.0 / 3.0,
            x_range: [0.0, 1.0],
            y_range: [0.0, 1.0],
            default_mesh: (800, 1),
            t_final: 0.45,
            bcs: [
                BcKind::Outflow,
                BcKind::Outflow,
                BcKind::Periodic,
                BcKind::Periodic,
            ],
            initial: Arc::new(|x| {
                if x[0] < 0.5 {
                    PrimitiveState::new_1d(1.0, 0.0, 1e4)
                } else {
                    PrimitiveState::new_1d(1.0, 0.0, 1e-8)
                }
            }),
            exact: None,
            reference_cells: Some(100_000),
        }),
        "perturbation" => Ok(ProblemSpec {
            name: name.into(),
            dim: 1,
            metric: MetricKind::MinkowskiCartesian(1),
            gamma: 5.0 / 3.0,
            x_range: [0.0, 1.0],
            y_range: [0.0, 1.0],
            default_mesh: (200, 1),
            t_final: 0.35,
            bcs: [
                BcKind::Outflow,
                BcKind::Outflow,
                BcKind::Periodic,
                BcKind::Periodic,
            ],
            initial: Arc::new(|x| {
                if x[0] < 0.5 {
                    PrimitiveState::new_1d(1.0, 0.0, 50.0)
                } else {
                    PrimitiveState::new_1d(2.0 + 0.3 * (50.0 * x[0]).sin(), 0.0, 10.0)
                }
            }),
            exact: None,
            reference_cells: Some(100_000),
        }),
        "smooth2d" => {
            let f = |x: [f64; 2], t: f64| {
                let phase = 2.0 * PI * (x[0] + x[1] - 0.99 * 2.0_f64.sqrt() * t);
                PrimitiveState::new_2d(
                    1.0 + 0.9999 * phase.sin(),
                    0.99 / 2.0_f64.sqrt(),
                    0.99 / 2.0_f64.sqrt(),
                    0.01,
                )
            };
            Ok(ProblemSpec {
                name: name.into(),
                dim: 2,
                metric: MetricKind::MinkowskiCartesian(2),
                gamma: 5.0 / 3.0,
                x_range: [0.0, 1.0],
                y_range: [0.0, 1.0],
                default_mesh: (64, 64),
                t_final: 0.1,
                bcs: [
                    BcKind::Periodic,
                    BcKind::Periodic,
                    BcKind::Periodic,
                    BcKind::Periodic,
                ],
                initial: Arc::new(move |x| f(x, 0.0)),
                exact: Some(Arc::new(f)),
                reference_cells: None,
            })
        }
        "riemann2d_1" => Ok(ProblemSpec {
            name: name.into(),
            dim: 2,
            metric: MetricKind::MinkowskiCartesian(2),
            gamma: 5.0 / 3.0,
            x_range: [0.0, 1.0],
            y_range: [0.0, 1.0],
            default_mesh: (400, 400),
            t_final: 0.4,
            bcs: [
                BcKind::Outflow,
                BcKind::Outflow,
                BcKind::Outflow,
                BcKind::Outflow,
            ],
            initial: Arc::new(|x| {
                quadrant(
                    x,
                    PrimitiveState::new_2d(0.5, 0.5, -0.5, 5.0),
                    PrimitiveState::new_2d(1.0, 0.5, 0.5, 5.0),
                    PrimitiveState::new_2d(3.0, -0.5, 0.5, 5.0),
                    PrimitiveState::new_2d(1.5, -0.5, -0.5, 5.0),
                )
            }),
            exact: None,
            reference_cells: None,
        }),
        "riemann2d_2" => Ok(ProblemSpec {
            name: name.into(),
            dim: 2,
            metric: MetricKind::MinkowskiCartesian(2),
            gamma: 5.0 / 3.0,
            x_range: [0.0, 1.0],
            y_range: [0.0, 1.0],
            default_mesh: (400, 400),
            t_final: 0.4,
            bcs: [
                BcKind::Outflow,
                BcKind::Outflow,
                BcKind::Outflow,
                BcKind::Outflow,
            ],
            initial: Arc::new(|x| {
                quadrant(
                    x,
                    PrimitiveState::new_2d(0.1, 0.0, 0.0, 0.01),
                    PrimitiveState::new_2d(0.1, 0.99, 0.0, 1.0),
                    PrimitiveState::new_2d(0.5, 0.0, 0.0, 1.0),
                    PrimitiveState::new_2d(0.1, 0.0, 0.99, 1.0),
                )
            }),
            exact: None,
            reference_cells: None,
        }),
        "riemann2d_3" => Ok(ProblemSpec {
            name: name.into(),
            dim: 2,
            metric: MetricKind::MinkowskiCartesian(2),
            gamma: 5.0 / 3.0,
            x_range: [0.0, 1.0],
            y_range: [0.0, 1.0],
            default_mesh: (400, 400),
            t_final: 0.4,
            bcs: [
                BcKind::Outflow,
                BcKind::Outflow,
                BcKind::Outflow,
                BcKind::Outflow,
            ],
            initial: Arc::new(|x| {
                quadrant(
                    x,
                    PrimitiveState::new_2d(0.1, 0.0, 0.0, 20.0),
                    PrimitiveState::new_2d(0.00414329639576, 0.9946418833556542, 0.0, 0.05),
                    PrimitiveState::new_2d(0.01, 0.0, 0.0, 0.05),
                    PrimitiveState::new_2d(0.00414329639576, 0.0, 0.9946418833556542, 0.05),
                )
            }),
            exact: None,
            reference_cells: None,
        }),
        "double_mach" => {
            let vs = 0.4984;
            let sin60 = (60.0_f64).to_radians().sin();
            let cos60 = (60.0_f64).to_radians().cos();
            let q_l = PrimitiveState::new_2d(8.564, 0.4247 * sin60, -0.4247 * cos60, 0.3808);
            let q_r = PrimitiveState::new_2d(1.4, 0.0, 0.0, 0.0025);
            let top = move |x: [f64; 2], t: f64| {
                // Shock front at height 1: h(x, t) = 1.
                let xs = 1.0 / 6.0 + (1.0 + 2.0 * vs * t) / 3.0_f64.sqrt();
                if x[0] < xs {
                    q_l
                } else {
                    q_r
                }
            };
            Ok(ProblemSpec {
                name: name.into(),
                dim: 2,
                metric: MetricKind::MinkowskiCartesian(2),
                gamma: 1.4,
                x_range: [0.0, 4.0],
                y_range: [0.0, 1.0],
                default_mesh: (960, 240),
                t_final: 4.0,
                bcs: [
                    BcKind::Dirichlet(Arc::new(move |_, _| q_l)),
                    BcKind::Dirichlet(Arc::new(move |_, _| q_r)),
                    BcKind::DirichletReflectiveSplit {
                        split: 1.0 / 6.0,
                        state: q_l,
                    },
                    BcKind::Dirichlet(Arc::new(top)),
                ],
                initial: Arc::new(move |x| {
                    let front = 1.0 / 6.0 + x[1] / 3.0_f64.sqrt();
                    if x[0] < front {
                        q_l
                    } else {
                        q_r
                    }
                }),
                exact: None,
                reference_cells: None,
            })
        }
        "shock_bubble" => {
            // The left/right states satisfy the jump conditions for a
            // single left-moving shock with Gamma = 5/3.
            let left = PrimitiveState::new_2d(1.0, 0.0, 0.0, 0.05);
            let right = PrimitiveState::new_2d(1.865225080631180, -0.196781107378299, 0.0, 0.15);
            let bubble = PrimitiveState::new_2d(0.1358, 0.0, 0.0, 0.05);
            Ok(ProblemSpec {
                name: name.into(),
                dim: 2,
                metric: MetricKind::MinkowskiCartesian(2),
                gamma: 5.0 / 3.0,
                x_range: [0.0, 325.0],
                y_range: [-45.0, 45.0],
                default_mesh: (500, 140),
                t_final: 450.0,
                bcs: [
                    BcKind::Dirichlet(Arc::new(move |_, _| left)),
                    BcKind::Dirichlet(Arc::new(move |_, _| right)),
                    BcKind::Reflective,
                    BcKind::Reflective,
                ],
                initial: Arc::new(move |x| {
                    let dx = x[0] - 215.0;
                    if (dx * dx + x[1] * x[1]).sqrt() <= 25.0 {
                        bubble
                    } else if x[0] < 265.0 {
                        left
                    } else {
                        right
                    }
                }),
                exact: None,
                reference_cells: None,
            })
        }
        "jet_a1" => {
            let ambient = PrimitiveState::new_2d(1.0, 0.0, 0.0, 0.40611878453038897);
            let beam = PrimitiveState::new_2d(0.01, 0.0, 0.99, 0.40611878453038897);
            Ok(ProblemSpec {
                name: name.into(),
                dim: 2,
                metric: MetricKind::MinkowskiCylindrical,
                gamma: 4.0 / 3.0,
                x_range: [0.0, 7.0],
                y_range: [0.0, 50.0],
                default_mesh: (210, 1500),
                t_final: 60.0,
                bcs: [
                    BcKind::Reflective,
                    BcKind::Outflow,
                    BcKind::JetInlet { radius: 1.0, beam },
                    BcKind::Outflow,
                ],
                initial: Arc::new(move |_| ambient),
                exact: None,
                reference_cells: None,
            })
        }
        "jet_c2" => {
            let ambient = PrimitiveState::new_2d(1.0, 0.0, 0.0, 1.70305e-4);
            let beam = PrimitiveState::new_2d(0.01, 0.0, 0.99, 1.70305e-4);
            Ok(ProblemSpec {
                name: name.into(),
                dim: 2,
                metric: MetricKind::MinkowskiCylindrical,
                gamma: 5.0 / 3.0,
                x_range: [0.0, 15.0],
                y_range: [0.0, 45.0],
                default_mesh: (360, 1080),
                t_final: 100.0,
                bcs: [
                    BcKind::Reflective,
                    BcKind::Outflow,
                    BcKind::JetInlet { radius: 1.0, beam },
                    BcKind::Outflow,
                ],
                initial: Arc::new(move |_| ambient),
                exact: None,
                reference_cells: None,
            })
        }
        _ => {
            if let Some(num) = name.strip_prefix("accretion_case") {
                if let Ok(k) = num.parse::<usize>() {
                    if (1..=10).contains(&k) {
                        return accretion_spec(k);
                    }
                }
            }
            Err(SolverError::UnknownProblem {
                name: name.into(),
                available: problem_names().join(", "),
            })
        }
    }
}

/// Per-component error norms on the recovered primitive variables
/// (density, velocity components, pressure).
#[derive(Debug, Clone)]
pub struct ErrorReport {
    /// Component labels in order.
    pub components: Vec<&'static str>,
    pub l1: Vec<f64>,
    pub l2: Vec<f64>,
    pub linf: Vec<f64>,
}

impl ErrorReport {
    pub fn component(&self, name: &str) -> Option<usize> {
        self.components.iter().position(|c| *c == name)
    }
}

/// Observed order between two meshes: `log(e_c / e_f) / log(n_f / n_c)`.
pub fn observed_rate(err_coarse: f64, err_fine: f64, n_coarse: usize, n_fine: usize) -> f64 {
    (err_coarse / err_fine).ln() / (n_fine as f64 / n_coarse as f64).ln()
}

/// L1/L2 via the volume Gauss rule, Linf over the quadrature nodes, all on
/// recovered primitives against an exact solution.
pub fn error_norms(
    field: &ModalField,
    ws: &DgWorkspace,
    exact: &ExactFn,
    t: f64,
) -> Result<ErrorReport> {
    let comp_names: Vec<&'static str> = if ws.mesh.dim == 1 {
        vec!["rho", "v1", "p"]
    } else {
        vec!["rho", "v1", "v2", "p"]
    };
    let n_prim = comp_names.len();
    let n = ws.basis.n;
    let n_comp = field.n_comp;
    let (nx, ny) = field.shape();
    let mut l1 = vec![0.0; n_prim];
    let mut l2 = vec![0.0; n_prim];
    let mut linf = vec![0.0_f64; n_prim];
    let k_measure = ws.mesh.cell_measure();
    for j in 0..ny {
        for i in 0..nx {
            let coeffs = field.cell(i, j);
            for (p, xi) in ws.vol_nodes.iter().enumerate() {
                let x = ws.mesh.point(i, j, *xi);
                let mp = ws.metric_at(x)?;
                let w = ModalField::eval_with_row(
                    coeffs,
                    &ws.vol_values[p * n..(p + 1) * n],
                    n_comp,
                    n,
                );
                let u = from_w(
                    &crate::eos::WState {
                        w,
                        dim: ws.mesh.dim,
                    },
                    &mp,
                );
                let prim = recover_primitives(&u, &mp, &ws.eos, Method::Newton)?;
                let ex = exact(x, t);
                let diffs: Vec<f64> = if ws.mesh.dim == 1 {
                    vec![prim.rho - ex.rho, prim.v[0] - ex.v[0], prim.p - ex.p]
                } else {
                    vec![
                        prim.rho - ex.rho,
                        prim.v[0] - ex.v[0],
                        prim.v[1] - ex.v[1],
                        prim.p - ex.p,
                    ]
                };
                let wq = ws.vol_weights[p] * k_measure;
                for (c, d) in diffs.iter().enumerate() {
                    l1[c] += wq * d.abs();
                    l2[c] += wq * d * d;
                    linf[c] = linf[c].max(d.abs());
                }
            }
        }
    }
    for v in l2.iter_mut() {
        *v = v.sqrt();
    }
    Ok(ErrorReport {
        components: comp_names,
        l1,
        l2,
        linf,
    })
}

/// Error norms on the conserved variables `(D, m, E)`; the convergence
/// tables report these alongside the primitives.
pub fn error_norms_conserved(
    field: &ModalField,
    ws: &DgWorkspace,
    exact: &ExactFn,
    t: f64,
) -> Result<ErrorReport> {
    let comp_names: Vec<&'static str> = if ws.mesh.dim == 1 {
        vec!["D", "m1", "E"]
    } else {
        vec!["D", "m1", "m2", "E"]
    };
    let n_prim = comp_names.len();
    let n = ws.basis.n;
    let n_comp = field.n_comp;
    let (nx, ny) = field.shape();
    let mut l1 = vec![0.0; n_prim];
    let mut l2 = vec![0.0; n_prim];
    let mut linf = vec![0.0_f64; n_prim];
    let k_measure = ws.mesh.cell_measure();
    for j in 0..ny {
        for i in 0..nx {
            let coeffs = field.cell(i, j);
            for (p, xi) in ws.vol_nodes.iter().enumerate() {
                let x = ws.mesh.point(i, j, *xi);
                let mp = ws.metric_at(x)?;
                let w = ModalField::eval_with_row(
                    coeffs,
                    &ws.vol_values[p * n..(p + 1) * n],
                    n_comp,
                    n,
                );
                let u = from_w(
                    &crate::eos::WState {
                        w,
                        dim: ws.mesh.dim,
                    },
                    &mp,
                );
                let ex = exact(x, t);
                let ue = crate::eos::primitive_to_conserved(&ex, &mp.x_mat, ws.mesh.dim, &ws.eos)?;
                let uh = u.as_vec(ws.mesh.dim);
                let uev = ue.as_vec(ws.mesh.dim);
                let wq = ws.vol_weights[p] * k_measure;
                for c in 0..n_prim {
                    let d = uh[c] - uev[c];
                    l1[c] += wq * d.abs();
                    l2[c] += wq * d * d;
                    linf[c] = linf[c].max(d.abs());
                }
            }
        }
    }
    for v in l2.iter_mut() {
        *v = v.sqrt();
    }
    Ok(ErrorReport {
        components: comp_names,
        l1,
        l2,
        linf,
    })
}

/// First-order finite-volume reference solve with the local two-speed
/// dissipation flux on a fine 1D grid.
pub struct ReferenceSolution {
    pub centers: Vec<f64>,
    pub primitives: Vec<PrimitiveState>,
}

impl ReferenceSolution {
    /// Piecewise-constant lookup.
    pub fn sample(&self, x: f64) -> PrimitiveState {
        let n = self.centers.len();
        let h = self.centers[1] - self.centers[0];
        let lo = self.centers[0] - 0.5 * h;
        let idx = (((x - lo) / h).floor() as isize).clamp(0, n as isize - 1) as usize;
        self.primitives[idx]
    }
}

pub fn lax_friedrichs_reference(spec: &ProblemSpec, n_cells: usize) -> Result<ReferenceSolution> {
    assert_eq!(spec.dim, 1, "reference solver is one-dimensional");
    let eos = IdealGas::new(spec.gamma)?;
    let mp = evaluate(&MetricKind::MinkowskiCartesian(1), [0.0, 0.0], 0.0)?;
    let h = (spec.x_range[1] - spec.x_range[0]) / n_cells as f64;
    let centers: Vec<f64> = (0..n_cells)
        .map(|i| spec.x_range[0] + (i as f64 + 0.5) * h)
        .collect();
    let mut u: Vec<[f64; 4]> = centers
        .iter()
        .map(|&x| {
            let q = (spec.initial)([x, 0.0]);
            crate::eos::primitive_to_conserved(&q, &mp.x_mat, 1, &eos).map(|c| c.as_vec(1))
        })
        .collect::<Result<_>>()?;

    let flux_of = |uv: &[f64; 4]| -> Result<([f64; 4], f64)> {
        let c = crate::eos::ConservedState::from_vec(uv, 1);
        let q = recover_primitives(&c, &mp, &eos, Method::Newton)?;
        let f = crate::eos::flux_g_n(&q, &c, &mp, &[1.0, 0.0]);
        let eta = crate::eos::spectral_radius(&q, &mp, &[1.0, 0.0], &eos);
        Ok((f, eta))
    };

    let mut t = 0.0;
    while t < spec.t_final {
        // Per-cell fluxes and speeds.
        let mut fl: Vec<[f64; 4]> = Vec::with_capacity(n_cells);
        let mut eta: Vec<f64> = Vec::with_capacity(n_cells);
        let mut eta_max = 0.0_f64;
        for uv in &u {
            let (f, e) = flux_of(uv)?;
            fl.push(f);
            eta.push(e);
            eta_max = eta_max.max(e);
        }
        let mut dt = 0.45 * h / eta_max.max(1e-12);
        if t + dt >= spec.t_final {
            dt = spec.t_final - t;
        }
        // Ghost handling per the spec's boundary tags.
        let state_at = |idx: isize, u: &Vec<[f64; 4]>, fl: &Vec<[f64; 4]>, eta: &Vec<f64>| {
            if idx < 0 {
                match &spec.bcs[0] {
                    BcKind::Periodic => (u[n_cells - 1], fl[n_cells - 1], eta[n_cells - 1]),
                    BcKind::Reflective => {
                        let mut g = u[0];
                        g[1] = -g[1];
                        let c = crate::eos::ConservedState::from_vec(&g, 1);
                        let q = recover_primitives(&c, &mp, &eos, Method::Newton).unwrap();
                        let f = crate::eos::flux_g_n(&q, &c, &mp, &[1.0, 0.0]);
                        (g, f, eta[0])
                    }
                    BcKind::Dirichlet(fun) => {
                        let q = fun([spec.x_range[0], 0.0], t);
                        let c = crate::eos::primitive_to_conserved(&q, &mp.x_mat, 1, &eos).unwrap();
                        let g = c.as_vec(1);
                        let f = crate::eos::flux_g_n(&q, &c, &mp, &[1.0, 0.0]);
                        let e = crate::eos::spectral_radius(&q, &mp, &[1.0, 0.0], &eos);
                        (g, f, e)
                    }
                    _ => (u[0], fl[0], eta[0]),
                }
            } else if idx >= n_cells as isize {
                match &spec.bcs[1] {
                    BcKind::Periodic => (u[0], fl[0], eta[0]),
                    BcKind::Reflective => {
                        let mut g = u[n_cells - 1];
                        g[1] = -g[1];
                        let c = crate::eos::ConservedState::from_vec(&g, 1);
                        let q = recover_primitives(&c, &mp, &eos, Method::Newton).unwrap();
                        let f = crate::eos::flux_g_n(&q, &c, &mp, &[1.0, 0.0]);
                        (g, f, eta[n_cells - 1])
                    }
                    BcKind::Dirichlet(fun) => {
                        let q = fun([spec.x_range[1], 0.0], t);
                        let c = crate::eos::primitive_to_conserved(&q, &mp.x_mat, 1, &eos).unwrap();
                        let g = c.as_vec(1);
                        let f = crate::eos::flux_g_n(&q, &c, &mp, &[1.0, 0.0]);
                        let e = crate::eos::spectral_radius(&q, &mp, &[1.0, 0.0], &eos);
                        (g, f, e)
                    }
                    _ => (u[n_cells - 1], fl[n_cells - 1], eta[n_cells - 1]),
                }
            } else {
                let i = idx as usize;
                (u[i], fl[i], eta[i])
            }
        };
        // Interface fluxes with the local two-speed dissipation.
        let mut fhat: Vec<[f64; 4]> = Vec::with_capacity(n_cells + 1);
        for e in 0..=n_cells {
            let (ul, flh, el) = state_at(e as isize - 1, &u, &fl, &eta);
            let (ur, frh, er) = state_at(e as isize, &u, &fl, &eta);
            let a = el.max(er);
            let mut f = [0.0; 4];
            for c in 0..3 {
                f[c] = 0.5 * (flh[c] + frh[c]) - 0.5 * a * (ur[c] - ul[c]);
            }
            fhat.push(f);
        }
        for (i, uv) in u.iter_mut().enumerate() {
            for c in 0..3 {
                uv[c] -= dt / h * (fhat[i + 1][c] - fhat[i][c]);
            }
        }
        t += dt;
    }
    let primitives: Vec<PrimitiveState> = u
        .iter()
        .map(|uv| {
            let c = crate::eos::ConservedState::from_vec(uv, 1);
            recover_primitives(&c, &mp, &eos, Method::Newton)
        })
        .collect::<Result<_>>()?;
    Ok(ReferenceSolution {
        centers,
        primitives,
    })
}
