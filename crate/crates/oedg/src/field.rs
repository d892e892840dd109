//! Per-cell modal coefficient storage, including a one-cell ghost layer.

use crate::basis::Basis;
use crate::mesh::Mesh;

/// Which variables the field evolves.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EvolutionForm {
    /// Conserved ADM variables; identical to the W-form in flat spacetime.
    AdmU,
    /// W-form evolved variables (always used by the solver loop).
    WForm,
}

/// Modal DG coefficients for all equations on a mesh. Storage covers
/// `(nx + 2) x (ny + 2)` cells; the outer ring holds ghost data.
#[derive(Debug, Clone)]
pub struct ModalField {
    pub dim: usize,
    pub n_comp: usize,
    pub n_basis: usize,
    pub nx: usize,
    pub ny: usize,
    pub form: EvolutionForm,
    data: Vec<f64>,
}

impl ModalField {
    pub fn new(mesh: &Mesh, basis: &Basis, form: EvolutionForm) -> Self {
        let n_comp = mesh.dim + 2;
        let cells = (mesh.nx + 2) * (mesh.ny + 2);
        ModalField {
            dim: mesh.dim,
            n_comp,
            n_basis: basis.n,
            nx: mesh.nx,
            ny: mesh.ny,
            form,
            data: vec![0.0; cells * n_comp * basis.n],
        }
    }

    /// Flat storage index of cell `(i, j)` in ghost-inclusive coordinates
    /// (interior cells are `1..=nx` by `1..=ny`).
    #[inline]
    fn cell_index(&self, gi: usize, gj: usize) -> usize {
        (gj * (self.nx + 2) + gi) * self.n_comp * self.n_basis
    }

    /// Coefficients of interior cell `(i, j)` (zero-based interior index).
    #[inline]
    pub fn cell(&self, i: usize, j: usize) -> &[f64] {
        let base = self.cell_index(i + 1, j + 1);
        &self.data[base..base + self.n_comp * self.n_basis]
    }

    #[inline]
    pub fn cell_mut(&mut self, i: usize, j: usize) -> &mut [f64] {
        let base = self.cell_index(i + 1, j + 1);
        &mut self.data[base..base + self.n_comp * self.n_basis]
    }

    /// Coefficients addressed in ghost-inclusive coordinates where
    /// `gi in 0..nx+2`, `gj in 0..ny+2`.
    #[inline]
    pub fn cell_ghost(&self, gi: usize, gj: usize) -> &[f64] {
        let base = self.cell_index(gi, gj);
        &self.data[base..base + self.n_comp * self.n_basis]
    }

    #[inline]
    pub fn cell_ghost_mut(&mut self, gi: usize, gj: usize) -> &mut [f64] {
        let base = self.cell_index(gi, gj);
        &mut self.data[base..base + self.n_comp * self.n_basis]
    }

    /// Cell average of every component (the zero-mode column).
    #[inline]
    pub fn average(&self, i: usize, j: usize) -> [f64; 4] {
        let coeffs = self.cell(i, j);
        let mut avg = [0.0; 4];
        for c in 0..self.n_comp {
            avg[c] = coeffs[c * self.n_basis];
        }
        avg
    }

    /// Evaluate all components at one reference point given a basis value
    /// row `tab` of length `n_basis`.
    #[inline]
    pub fn eval_with_row(coeffs: &[f64], tab: &[f64], n_comp: usize, n_basis: usize) -> [f64; 4] {
        let mut out = [0.0; 4];
        for c in 0..n_comp {
            let row = &coeffs[c * n_basis..(c + 1) * n_basis];
            let mut s = 0.0;
            for k in 0..n_basis {
                s += row[k] * tab[k];
            }
            out[c] = s;
        }
        out
    }

    /// Raw storage access for whole-field updates.
    pub fn data(&self) -> &[f64] {
        &self.data
    }

    pub fn data_mut(&mut self) -> &mut [f64] {
        &mut self.data
    }

    /// Interior iteration bounds as (nx, ny).
    pub fn shape(&self) -> (usize, usize) {
        (self.nx, self.ny)
    }

    /// Writes `self = a * x + b * y` over all interior coefficients,
    /// leaving ghosts untouched.
    pub fn lincomb_interior(&mut self, a: f64, x: &ModalField, b: f64, y: &ModalField) {
        use rayon::prelude::*;
        let stride = self.n_comp * self.n_basis;
        let (nx, ny) = (self.nx, self.ny);
        let row = nx + 2;
        self.data
            .par_chunks_mut(stride)
            .enumerate()
            .for_each(|(block, d)| {
                let gi = block % row;
                let gj = block / row;
                if gi == 0 || gi > nx || gj == 0 || gj > ny {
                    return;
                }
                let base = block * stride;
                for k in 0..stride {
                    d[k] = a * x.data[base + k] + b * y.data[base + k];
                }
            });
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mesh::BcKind;

    #[test]
    fn averages_read_zero_modes() {
        let mesh = Mesh::new_1d(4, 0.0, 1.0, BcKind::Periodic, BcKind::Periodic).unwrap();
        let basis = Basis::new(1, 2);
        let mut f = ModalField::new(&mesh, &basis, EvolutionForm::WForm);
        let n = basis.n;
        let cell = f.cell_mut(2, 0);
        cell[0] = 1.5; // component 0, zero mode
        cell[n] = -0.25; // component 1, zero mode
        cell[n + 1] = 9.0; // component 1, slope: must not affect the average
        let avg = f.average(2, 0);
        assert_eq!(avg[0], 1.5);
        assert_eq!(avg[1], -0.25);
    }
}
