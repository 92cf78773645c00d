//! Small dense matrix kit for the walk/eigenvector rankers. Cases are tiny
//! (tens of nodes), so everything is plain O(n^3) row-major f64.

use crate::eval::AdjacencyMatrix;

#[derive(Debug, Clone, PartialEq)]
pub struct Matrix {
    n: usize,
    data: Vec<f64>,
}

impl Matrix {
    pub fn zeros(n: usize) -> Self {
        Matrix {
            n,
            data: vec![0.0; n * n],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Matrix::zeros(n);
        for i in 0..n {
            m.set(i, i, 1.0);
        }
        m
    }

    pub fn from_adjacency(adj: &AdjacencyMatrix) -> Self {
        let n = adj.n();
        let mut m = Matrix::zeros(n);
        for i in 0..n {
            for j in 0..n {
                if adj.get(i, j) {
                    m.set(i, j, 1.0);
                }
            }
        }
        m
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.n + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: f64) {
        self.data[i * self.n + j] = v;
    }

    pub fn row_sum(&self, i: usize) -> f64 {
        // left-to-right accumulation; tests relying on exact float results
        // assume this association
        (0..self.n).map(|j| self.get(i, j)).sum()
    }

    pub fn col_sum(&self, j: usize) -> f64 {
        (0..self.n).map(|i| self.get(i, j)).sum()
    }

    pub fn transpose(&self) -> Matrix {
        let mut t = Matrix::zeros(self.n);
        for i in 0..self.n {
            for j in 0..self.n {
                t.set(j, i, self.get(i, j));
            }
        }
        t
    }

    pub fn matmul(&self, rhs: &Matrix) -> Matrix {
        assert_eq!(self.n, rhs.n);
        let n = self.n;
        let mut out = Matrix::zeros(n);
        for i in 0..n {
            for k in 0..n {
                let a = self.get(i, k);
                if a == 0.0 {
                    continue;
                }
                for j in 0..n {
                    out.data[i * n + j] += a * rhs.get(k, j);
                }
            }
        }
        out
    }

    pub fn mul_vec(&self, x: &[f64]) -> Vec<f64> {
        assert_eq!(x.len(), self.n);
        (0..self.n)
            .map(|i| (0..self.n).map(|j| self.get(i, j) * x[j]).sum())
            .collect()
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    /// Matrix exponential by plain Taylor summation, stopping once a term's
    /// max-norm drops below `tol`. Fine for the small nonnegative matrices
    /// used here (series terms decay factorially).
    pub fn exp(&self, tol: f64) -> Matrix {
        let n = self.n;
        let mut sum = Matrix::identity(n);
        let mut term = Matrix::identity(n);
        for k in 1..=1000 {
            term = term.matmul(self);
            for v in term.data.iter_mut() {
                *v /= k as f64;
            }
            for (s, t) in sum.data.iter_mut().zip(&term.data) {
                *s += t;
            }
            if term.max_abs() < tol {
                break;
            }
        }
        sum
    }

    /// Gauss-Jordan inverse with partial pivoting; None when singular.
    pub fn inverse(&self) -> Option<Matrix> {
        let n = self.n;
        let mut a = self.clone();
        let mut inv = Matrix::identity(n);
        for col in 0..n {
            let pivot_row = (col..n)
                .max_by(|&p, &q| a.get(p, col).abs().total_cmp(&a.get(q, col).abs()))?;
            if a.get(pivot_row, col).abs() < 1e-12 {
                return None;
            }
            if pivot_row != col {
                for j in 0..n {
                    let (x, y) = (a.get(col, j), a.get(pivot_row, j));
                    a.set(col, j, y);
                    a.set(pivot_row, j, x);
                    let (x, y) = (inv.get(col, j), inv.get(pivot_row, j));
                    inv.set(col, j, y);
                    inv.set(pivot_row, j, x);
                }
            }
            let pivot = a.get(col, col);
            for j in 0..n {
                a.set(col, j, a.get(col, j) / pivot);
                inv.set(col, j, inv.get(col, j) / pivot);
            }
            for row in 0..n {
                if row == col {
                    continue;
                }
                let factor = a.get(row, col);
                if factor == 0.0 {
                    continue;
                }
                for j in 0..n {
                    a.set(row, j, a.get(row, j) - factor * a.get(col, j));
                    inv.set(row, j, inv.get(row, j) - factor * inv.get(col, j));
                }
            }
        }
        Some(inv)
    }
}

/// Power iteration for the dominant right eigenvector of a nonnegative matrix.
/// Starts uniform, renormalizes to unit L1 each step, and converges when the
/// L1 change drops below `tol`. Returns None when the iterate collapses to
/// zero (nilpotent matrix) or the cap is exhausted without converging
/// (e.g. imprimitive matrices oscillating between phases).
pub fn power_iteration(a: &Matrix, tol: f64, max_iter: usize) -> Option<Vec<f64>> {
    let n = a.n();
    if n == 0 {
        return None;
    }
    let mut x = vec![1.0 / n as f64; n];
    for _ in 0..max_iter {
        let y = a.mul_vec(&x);
        let norm: f64 = y.iter().map(|v| v.abs()).sum();
        if norm == 0.0 {
            return None;
        }
        let y: Vec<f64> = y.iter().map(|v| v / norm).collect();
        let delta: f64 = y.iter().zip(&x).map(|(p, q)| (p - q).abs()).sum();
        x = y;
        if delta < tol {
            return Some(x);
        }
    }
    None
}

/// Spectral radius estimate via power iteration on the L1 growth factor.
/// For imprimitive matrices the factor oscillates, so after the cap the
/// largest recently seen factor is returned — an adequate (slightly
/// conservative) bound for divergence prechecks.
pub fn spectral_radius_estimate(a: &Matrix) -> f64 {
    let n = a.n();
    if n == 0 {
        return 0.0;
    }
    let mut x = vec![1.0; n];
    let mut last = 0.0f64;
    let mut recent: Vec<f64> = Vec::new();
    for _ in 0..500 {
        let y = a.mul_vec(&x);
        let norm_y: f64 = y.iter().map(|v| v.abs()).sum();
        let norm_x: f64 = x.iter().map(|v| v.abs()).sum();
        if norm_y == 0.0 {
            return 0.0;
        }
        let factor = norm_y / norm_x;
        if (factor - last).abs() < 1e-9 {
            return factor;
        }
        last = factor;
        recent.push(factor);
        if recent.len() > 20 {
            recent.remove(0);
        }
        x = y.iter().map(|v| v / norm_y).collect();
    }
    recent.iter().fold(0.0f64, |m, &v| m.max(v))
}
