//! Modal bases and quadrature rules on the reference cell.
//!
//! 1D cells use Legendre polynomials on `[-1, 1]`; 2D cells use total-degree
//! tensor products `P_a(xi_x) P_b(xi_y)` with `a + b <= m`. Both choices are
//! orthogonal, the first function is identically 1, and the mass matrix is
//! diagonal with 1D entries `h / (2i + 1)`.

/// Legendre polynomial value `P_k(xi)` for `k <= 3`.
pub fn legendre(k: usize, xi: f64) -> f64 {
    match k {
        0 => 1.0,
        1 => xi,
        2 => 0.5 * (3.0 * xi * xi - 1.0),
        3 => 0.5 * (5.0 * xi * xi * xi - 3.0 * xi),
        _ => panic!("basis degree {k} unsupported"),
    }
}

/// `order`-th derivative of `P_k` with respect to `xi`.
pub fn legendre_deriv(k: usize, order: usize, xi: f64) -> f64 {
    if order == 0 {
        return legendre(k, xi);
    }
    match (k, order) {
        (0, _) => 0.0,
        (1, 1) => 1.0,
        (1, _) => 0.0,
        (2, 1) => 3.0 * xi,
        (2, 2) => 3.0,
        (2, _) => 0.0,
        (3, 1) => 0.5 * (15.0 * xi * xi - 3.0),
        (3, 2) => 15.0 * xi,
        (3, 3) => 15.0,
        (3, _) => 0.0,
        _ => panic!("basis degree {k} unsupported"),
    }
}

/// Gauss-Legendre rule with `n` points on `[-1, 1]`, weights normalized to
/// sum to one (probability weights: cell integrals are `|K| * sum(w f)`).
pub fn gauss_rule(n: usize) -> Vec<(f64, f64)> {
    match n {
        1 => vec![(0.0, 1.0)],
        2 => {
            let x = 1.0 / 3.0_f64.sqrt();
            vec![(-x, 0.5), (x, 0.5)]
        }
        3 => {
            let x = (3.0 / 5.0_f64).sqrt();
            vec![(-x, 5.0 / 18.0), (0.0, 4.0 / 9.0), (x, 5.0 / 18.0)]
        }
        4 => {
            let s = (6.0 / 5.0_f64).sqrt();
            let x1 = (3.0 / 7.0 - 2.0 / 7.0 * s).sqrt();
            let x2 = (3.0 / 7.0 + 2.0 / 7.0 * s).sqrt();
            let w1 = (18.0 + 30.0_f64.sqrt()) / 72.0;
            let w2 = (18.0 - 30.0_f64.sqrt()) / 72.0;
            vec![(-x2, w2), (-x1, w1), (x1, w1), (x2, w2)]
        }
        _ => panic!("gauss rule with {n} points unsupported"),
    }
}

/// Gauss-Lobatto rule with `n` points on `[-1, 1]`, weights normalized to
/// sum to one. Includes both endpoints; exact for degree `2n - 3`.
pub fn gauss_lobatto_rule(n: usize) -> Vec<(f64, f64)> {
    match n {
        2 => vec![(-1.0, 0.5), (1.0, 0.5)],
        3 => vec![(-1.0, 1.0 / 6.0), (0.0, 2.0 / 3.0), (1.0, 1.0 / 6.0)],
        4 => {
            let x = 1.0 / 5.0_f64.sqrt();
            vec![
                (-1.0, 1.0 / 12.0),
                (-x, 5.0 / 12.0),
                (x, 5.0 / 12.0),
                (1.0, 1.0 / 12.0),
            ]
        }
        _ => panic!("gauss-lobatto rule with {n} points unsupported"),
    }
}

/// Number of Gauss-Lobatto points used by the 1D cell-average decomposition.
pub fn gl_point_count(m: usize) -> usize {
    (m + 3).div_ceil(2)
}

/// Modal basis on the reference cell.
#[derive(Debug, Clone)]
pub struct Basis {
    pub dim: usize,
    /// Polynomial degree m.
    pub degree: usize,
    /// Total dimension N of the polynomial space.
    pub n: usize,
    /// Number of basis functions per total degree q = 0..=m.
    pub block_sizes: Vec<usize>,
    /// Per-basis-function powers (a, b): function is P_a(xi_x) * P_b(xi_y).
    /// In 1D b is always 0.
    pub powers: Vec<(usize, usize)>,
}

impl Basis {
    pub fn new(dim: usize, degree: usize) -> Self {
        assert!(dim == 1 || dim == 2, "only 1D and 2D supported");
        assert!((1..=3).contains(&degree), "degree must be 1..=3");
        let mut powers = Vec::new();
        let mut block_sizes = Vec::new();
        for q in 0..=degree {
            let mut count = 0;
            if dim == 1 {
                powers.push((q, 0));
                count = 1;
            } else {
                // Order within a degree block: x-power descending, matching
                // the listing 1; xi_x, xi_y; xi_x^2, xi_x xi_y, xi_y^2; ...
                for b in 0..=q {
                    powers.push((q - b, b));
                    count += 1;
                }
            }
            block_sizes.push(count);
        }
        let n = powers.len();
        Basis {
            dim,
            degree,
            n,
            block_sizes,
            powers,
        }
    }

    /// Total degree of basis function `k`.
    pub fn degree_of(&self, k: usize) -> usize {
        let (a, b) = self.powers[k];
        a + b
    }

    /// Value of basis function `k` at reference point `xi`.
    pub fn eval(&self, k: usize, xi: [f64; 2]) -> f64 {
        let (a, b) = self.powers[k];
        if self.dim == 1 {
            legendre(a, xi[0])
        } else {
            legendre(a, xi[0]) * legendre(b, xi[1])
        }
    }

    /// Reference-cell partial derivative `d^(ax+ay) phi_k / dxi_x^ax dxi_y^ay`.
    /// Physical derivatives need the extra factor `(2/h_x)^ax (2/h_y)^ay`.
    pub fn eval_deriv(&self, k: usize, ax: usize, ay: usize, xi: [f64; 2]) -> f64 {
        let (a, b) = self.powers[k];
        if self.dim == 1 {
            if ay > 0 {
                return 0.0;
            }
            legendre_deriv(a, ax, xi[0])
        } else {
            legendre_deriv(a, ax, xi[0]) * legendre_deriv(b, ay, xi[1])
        }
    }

    /// Diagonal of the reference mass matrix: average of `phi_k^2` over the
    /// reference cell. The physical mass diagonal is `|K|` times this.
    pub fn mass_diag_ref(&self, k: usize) -> f64 {
        let (a, b) = self.powers[k];
        1.0 / ((2 * a + 1) as f64 * (2 * b + 1) as f64)
    }

    /// Evaluation table: rows are nodes, columns basis functions.
    pub fn value_table(&self, nodes: &[[f64; 2]]) -> Vec<f64> {
        let mut tab = vec![0.0; nodes.len() * self.n];
        for (p, xi) in nodes.iter().enumerate() {
            for k in 0..self.n {
                tab[p * self.n + k] = self.eval(k, *xi);
            }
        }
        tab
    }

    /// Derivative table for a fixed multi-order (ax, ay).
    pub fn deriv_table(&self, nodes: &[[f64; 2]], ax: usize, ay: usize) -> Vec<f64> {
        let mut tab = vec![0.0; nodes.len() * self.n];
        for (p, xi) in nodes.iter().enumerate() {
            for k in 0..self.n {
                tab[p * self.n + k] = self.eval_deriv(k, ax, ay, *xi);
            }
        }
        tab
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn avg_monomial(a: usize) -> f64 {
        // average of xi^a over [-1, 1]
        if a % 2 == 1 {
            0.0
        } else {
            1.0 / (a as f64 + 1.0)
        }
    }

    #[test]
    fn gauss_rules_are_exact() {
        for n in 1..=4 {
            let rule = gauss_rule(n);
            let wsum: f64 = rule.iter().map(|(_, w)| w).sum();
            assert!((wsum - 1.0).abs() < 1e-15);
            for a in 0..=(2 * n - 1) {
                let approx: f64 = rule.iter().map(|(x, w)| w * x.powi(a as i32)).sum();
                assert!(
                    (approx - avg_monomial(a)).abs() < 1e-14,
                    "gauss {n} points, monomial {a}"
                );
            }
        }
    }

    #[test]
    fn gauss_lobatto_rules_are_exact() {
        for n in 2..=4 {
            let rule = gauss_lobatto_rule(n);
            let wsum: f64 = rule.iter().map(|(_, w)| w).sum();
            assert!((wsum - 1.0).abs() < 1e-15);
            for a in 0..=(2 * n - 3) {
                let approx: f64 = rule.iter().map(|(x, w)| w * x.powi(a as i32)).sum();
                assert!(
                    (approx - avg_monomial(a)).abs() < 1e-14,
                    "gl {n} points, monomial {a}"
                );
            }
        }
    }

    #[test]
    fn mass_matrix_is_diagonal() {
        // Gram matrix by high-order quadrature; off-diagonal below 1e-14.
        for dim in [1usize, 2] {
            for m in 1..=3 {
                let basis = Basis::new(dim, m);
                let rule = gauss_rule(4);
                let mut gram = vec![0.0; basis.n * basis.n];
                if dim == 1 {
                    for (x, w) in &rule {
                        for i in 0..basis.n {
                            for j in 0..basis.n {
                                gram[i * basis.n + j] +=
                                    w * basis.eval(i, [*x, 0.0]) * basis.eval(j, [*x, 0.0]);
                            }
                        }
                    }
                } else {
                    for (x, wx) in &rule {
                        for (y, wy) in &rule {
                            for i in 0..basis.n {
                                for j in 0..basis.n {
                                    gram[i * basis.n + j] +=
                                        wx * wy * basis.eval(i, [*x, *y]) * basis.eval(j, [*x, *y]);
                                }
                            }
                        }
                    }
                }
                for i in 0..basis.n {
                    for j in 0..basis.n {
                        if i == j {
                            assert!((gram[i * basis.n + j] - basis.mass_diag_ref(i)).abs() < 1e-14);
                        } else {
                            assert!(
                                gram[i * basis.n + j].abs() < 1e-14,
                                "off-diagonal ({i},{j}) = {}",
                                gram[i * basis.n + j]
                            );
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn first_function_is_one_and_blocks_match() {
        let b = Basis::new(2, 3);
        assert_eq!(b.n, 10);
        assert_eq!(b.block_sizes, vec![1, 2, 3, 4]);
        assert_eq!(b.eval(0, [0.3, -0.7]), 1.0);
        let b1 = Basis::new(1, 2);
        assert_eq!(b1.n, 3);
        assert_eq!(b1.block_sizes, vec![1, 1, 1]);
    }

    #[test]
    fn derivative_tables_match_finite_differences() {
        let b = Basis::new(2, 3);
        let xi = [0.31, -0.44];
        let h = 1e-6;
        for k in 0..b.n {
            let fd_x = (b.eval(k, [xi[0] + h, xi[1]]) - b.eval(k, [xi[0] - h, xi[1]])) / (2.0 * h);
            assert!((fd_x - b.eval_deriv(k, 1, 0, xi)).abs() < 1e-8);
            let fd_y = (b.eval(k, [xi[0], xi[1] + h]) - b.eval(k, [xi[0], xi[1] - h])) / (2.0 * h);
            assert!((fd_y - b.eval_deriv(k, 0, 1, xi)).abs() < 1e-8);
        }
    }
}
