//! Uniform Cartesian meshes with a one-cell ghost layer and per-side
//! boundary tags.

use crate::eos::PrimitiveState;
use crate::error::{Result, SolverError};
use std::sync::Arc;

/// Time-dependent prescribed boundary state.
pub type BoundaryFn = Arc<dyn Fn([f64; 2], f64) -> PrimitiveState + Send + Sync>;

/// Boundary condition applied on one side of the domain.
#[derive(Clone)]
pub enum BcKind {
    Periodic,
    /// Zero-order extrapolation of the modal coefficients.
    Outflow,
    /// Mirror reflection with the normal momentum component negated.
    Reflective,
    /// Prescribed state, projected into the ghost cells each stage.
    Dirichlet(BoundaryFn),
    /// Inlet beam inside `radius` along the side coordinate, outflow beyond.
    JetInlet {
        radius: f64,
        beam: PrimitiveState,
    },
    /// Prescribed constant state up to `split` along the side coordinate,
    /// reflective beyond (double Mach reflection bottom wall).
    DirichletReflectiveSplit {
        split: f64,
        state: PrimitiveState,
    },
}

impl std::fmt::Debug for BcKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let tag = match self {
            BcKind::Periodic => "Periodic",
            BcKind::Outflow => "Outflow",
            BcKind::Reflective => "Reflective",
            BcKind::Dirichlet(_) => "Dirichlet",
            BcKind::JetInlet { .. } => "JetInlet",
            BcKind::DirichletReflectiveSplit { .. } => "DirichletReflectiveSplit",
        };
        f.write_str(tag)
    }
}

/// Which side of the domain a boundary condition belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    XLow,
    XHigh,
    YLow,
    YHigh,
}

/// Uniform mesh over a rectangular domain.
#[derive(Clone)]
pub struct Mesh {
    pub dim: usize,
    pub nx: usize,
    pub ny: usize,
    pub x_lo: f64,
    pub x_hi: f64,
    pub y_lo: f64,
    pub y_hi: f64,
    pub hx: f64,
    pub hy: f64,
    pub bc_x_lo: BcKind,
    pub bc_x_hi: BcKind,
    pub bc_y_lo: BcKind,
    pub bc_y_hi: BcKind,
}

impl Mesh {
    pub fn new_1d(nx: usize, x_lo: f64, x_hi: f64, bc_lo: BcKind, bc_hi: BcKind) -> Result<Self> {
        if nx < 3 {
            return Err(SolverError::InvalidParameter(format!(
                "need at least 3 cells per axis, got nx = {nx}"
            )));
        }
        Ok(Mesh {
            dim: 1,
            nx,
            ny: 1,
            x_lo,
            x_hi,
            y_lo: 0.0,
            y_hi: 1.0,
            hx: (x_hi - x_lo) / nx as f64,
            hy: 1.0,
            bc_x_lo: bc_lo,
            bc_x_hi: bc_hi,
            bc_y_lo: BcKind::Periodic,
            bc_y_hi: BcKind::Periodic,
        })
    }

    #[allow(clippy::too_many_arguments)]
    pub fn new_2d(
        nx: usize,
        ny: usize,
        x_lo: f64,
        x_hi: f64,
        y_lo: f64,
        y_hi: f64,
        bcs: [BcKind; 4],
    ) -> Result<Self> {
        if nx < 3 || ny < 3 {
            return Err(SolverError::InvalidParameter(format!(
                "need at least 3 cells per axis, got {nx} x {ny}"
            )));
        }
        let [bc_x_lo, bc_x_hi, bc_y_lo, bc_y_hi] = bcs;
        Ok(Mesh {
            dim: 2,
            nx,
            ny,
            x_lo,
            x_hi,
            y_lo,
            y_hi,
            hx: (x_hi - x_lo) / nx as f64,
            hy: (y_hi - y_lo) / ny as f64,
            bc_x_lo,
            bc_x_hi,
            bc_y_lo,
            bc_y_hi,
        })
    }

    /// Center of interior cell `(i, j)`, zero-based.
    pub fn cell_center(&self, i: usize, j: usize) -> [f64; 2] {
        [
            self.x_lo + (i as f64 + 0.5) * self.hx,
            self.y_lo + (j as f64 + 0.5) * self.hy,
        ]
    }

    /// Physical point of a reference coordinate in cell `(i, j)`.
    pub fn point(&self, i: usize, j: usize, xi: [f64; 2]) -> [f64; 2] {
        let c = self.cell_center(i, j);
        [c[0] + 0.5 * self.hx * xi[0], c[1] + 0.5 * self.hy * xi[1]]
    }

    pub fn cell_count(&self) -> usize {
        self.nx * self.ny
    }

    pub fn cell_measure(&self) -> f64 {
        if self.dim == 1 {
            self.hx
        } else {
            self.hx * self.hy
        }
    }

    pub fn bc(&self, side: Side) -> &BcKind {
        match side {
            Side::XLow => &self.bc_x_lo,
            Side::XHigh => &self.bc_x_hi,
            Side::YLow => &self.bc_y_lo,
            Side::YHigh => &self.bc_y_hi,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_too_few_cells() {
        assert!(Mesh::new_1d(2, 0.0, 1.0, BcKind::Periodic, BcKind::Periodic).is_err());
        assert!(Mesh::new_1d(3, 0.0, 1.0, BcKind::Periodic, BcKind::Periodic).is_ok());
    }

    #[test]
    fn geometry_is_uniform() {
        let m = Mesh::new_2d(
            10,
            5,
            0.0,
            2.0,
            -1.0,
            1.0,
            [
                BcKind::Periodic,
                BcKind::Periodic,
                BcKind::Outflow,
                BcKind::Outflow,
            ],
        )
        .unwrap();
        assert!((m.hx - 0.2).abs() < 1e-15);
        assert!((m.hy - 0.4).abs() < 1e-15);
        let c = m.cell_center(0, 0);
        assert!((c[0] - 0.1).abs() < 1e-15);
        assert!((c[1] + 0.8).abs() < 1e-15);
        let p = m.point(0, 0, [1.0, -1.0]);
        assert!((p[0] - 0.2).abs() < 1e-15);
        assert!((p[1] + 1.0).abs() < 1e-15);
    }
}
