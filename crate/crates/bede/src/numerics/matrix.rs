//! Small dense matrix kernel.
//!
//! Parameter dimensions here are tiny (p ≤ 6), so plain LU with partial
//! pivoting and cyclic Jacobi for symmetric eigenproblems are both exact
//! enough and allocation-cheap.

use crate::error::{Error, Result};

/// Row-major dense matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct Matrix {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl Matrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Matrix {
            rows,
            cols,
            data: vec![0.0; rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Matrix::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = 1.0;
        }
        m
    }

    /// Build from nested rows.
    ///
    /// # Panics
    /// Panics if rows are ragged or empty.
    pub fn from_rows(rows: &[Vec<f64>]) -> Self {
        assert!(!rows.is_empty(), "empty matrix");
        let cols = rows[0].len();
        assert!(cols > 0 && rows.iter().all(|r| r.len() == cols), "ragged rows");
        Matrix {
            rows: rows.len(),
            cols,
            data: rows.iter().flatten().copied().collect(),
        }
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> f64) -> Self {
        let mut m = Matrix::zeros(rows, cols);
        for i in 0..rows {
            for j in 0..cols {
                m[(i, j)] = f(i, j);
            }
        }
        m
    }

    /// Outer product v vᵀ.
    pub fn outer(v: &[f64]) -> Self {
        Matrix::from_fn(v.len(), v.len(), |i, j| v[i] * v[j])
    }

    pub fn n_rows(&self) -> usize {
        self.rows
    }

    pub fn n_cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn transpose(&self) -> Matrix {
        Matrix::from_fn(self.cols, self.rows, |i, j| self[(j, i)])
    }

    pub fn scale(&self, s: f64) -> Matrix {
        Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|v| v * s).collect(),
        }
    }

    pub fn add(&self, other: &Matrix) -> Matrix {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self
                .data
                .iter()
                .zip(&other.data)
                .map(|(a, b)| a + b)
                .collect(),
        }
    }

    pub fn sub(&self, other: &Matrix) -> Matrix {
        self.add(&other.scale(-1.0))
    }

    pub fn mul(&self, other: &Matrix) -> Matrix {
        assert_eq!(self.cols, other.rows, "dimension mismatch");
        let mut out = Matrix::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self[(i, k)];
                if a == 0.0 {
                    continue;
                }
                for j in 0..other.cols {
                    out[(i, j)] += a * other[(k, j)];
                }
            }
        }
        out
    }

    pub fn mul_vec(&self, v: &[f64]) -> Vec<f64> {
        assert_eq!(self.cols, v.len(), "dimension mismatch");
        (0..self.rows)
            .map(|i| self.row(i).iter().zip(v).map(|(a, b)| a * b).sum())
            .collect()
    }

    /// Trace of a square matrix.
    pub fn trace(&self) -> f64 {
        assert!(self.is_square(), "trace requires a square matrix");
        (0..self.rows).map(|i| self[(i, i)]).sum()
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    /// Solve A x = b by LU with partial pivoting. `name` labels this matrix
    /// in singularity diagnostics.
    pub fn solve_named(&self, b: &[f64], name: &str) -> Result<Vec<f64>> {
        assert!(self.is_square() && b.len() == self.rows);
        let n = self.rows;
        let mut lu = self.data.clone();
        let mut x: Vec<f64> = b.to_vec();
        let mut perm: Vec<usize> = (0..n).collect();
        for col in 0..n {
            let (pivot_row, pivot_abs) = (col..n)
                .map(|r| (r, lu[r * n + col].abs()))
                .max_by(|a, b| a.1.total_cmp(&b.1))
                .unwrap();
            if pivot_abs < 1e-300 {
                return Err(Error::Singular {
                    op: "matrix_solve",
                    name: name.to_string(),
                });
            }
            if pivot_row != col {
                for j in 0..n {
                    lu.swap(col * n + j, pivot_row * n + j);
                }
                x.swap(col, pivot_row);
                perm.swap(col, pivot_row);
            }
            let pivot = lu[col * n + col];
            for r in col + 1..n {
                let factor = lu[r * n + col] / pivot;
                lu[r * n + col] = 0.0;
                for j in col + 1..n {
                    lu[r * n + j] -= factor * lu[col * n + j];
                }
                x[r] -= factor * x[col];
            }
        }
        for col in (0..n).rev() {
            x[col] /= lu[col * n + col];
            for r in 0..col {
                x[r] -= lu[r * n + col] * x[col];
            }
        }
        Ok(x)
    }

    pub fn solve(&self, b: &[f64]) -> Result<Vec<f64>> {
        self.solve_named(b, "A")
    }

    /// Inverse via column-wise solves. Satisfies ‖A A⁻¹ − I‖∞ ≤ 1e−8 for
    /// well-conditioned input.
    pub fn inverse_named(&self, name: &str) -> Result<Matrix> {
        assert!(self.is_square());
        let n = self.rows;
        let mut out = Matrix::zeros(n, n);
        for j in 0..n {
            let mut e = vec![0.0; n];
            e[j] = 1.0;
            let col = self.solve_named(&e, name)?;
            for i in 0..n {
                out[(i, j)] = col[i];
            }
        }
        Ok(out)
    }

    pub fn inverse(&self) -> Result<Matrix> {
        self.inverse_named("A")
    }

    /// Eigendecomposition of a symmetric matrix by cyclic Jacobi rotations.
    /// Returns (eigenvalues, eigenvectors as columns), eigenvalues ascending.
    pub fn sym_eigen(&self) -> (Vec<f64>, Matrix) {
        assert!(self.is_square());
        let n = self.rows;
        let mut a = self.clone();
        let mut v = Matrix::identity(n);
        for _sweep in 0..100 {
            let mut off = 0.0;
            for i in 0..n {
                for j in i + 1..n {
                    off += a[(i, j)] * a[(i, j)];
                }
            }
            if off.sqrt() <= 1e-14 * (1.0 + a.max_abs()) {
                break;
            }
            for p in 0..n {
                for q in p + 1..n {
                    let apq = a[(p, q)];
                    if apq.abs() <= 1e-300 {
                        continue;
                    }
                    let theta = (a[(q, q)] - a[(p, p)]) / (2.0 * apq);
                    let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                    let c = 1.0 / (t * t + 1.0).sqrt();
                    let s = t * c;
                    for k in 0..n {
                        let akp = a[(k, p)];
                        let akq = a[(k, q)];
                        a[(k, p)] = c * akp - s * akq;
                        a[(k, q)] = s * akp + c * akq;
                    }
                    for k in 0..n {
                        let apk = a[(p, k)];
                        let aqk = a[(q, k)];
                        a[(p, k)] = c * apk - s * aqk;
                        a[(q, k)] = s * apk + c * aqk;
                    }
                    for k in 0..n {
                        let vkp = v[(k, p)];
                        let vkq = v[(k, q)];
                        v[(k, p)] = c * vkp - s * vkq;
                        v[(k, q)] = s * vkp + c * vkq;
                    }
                }
            }
        }
        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by(|&i, &j| a[(i, i)].total_cmp(&a[(j, j)]));
        let vals: Vec<f64> = order.iter().map(|&i| a[(i, i)]).collect();
        let vecs = Matrix::from_fn(n, n, |i, j| v[(i, order[j])]);
        (vals, vecs)
    }

    /// Inverse symmetric square root A^{−1/2} of a symmetric positive
    /// definite matrix. `name` labels the matrix in diagnostics.
    pub fn sym_inv_sqrt(&self, name: &str) -> Result<Matrix> {
        let (vals, vecs) = self.sym_eigen();
        let scale = vals.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        if vals.iter().any(|&l| l <= 1e-12 * scale.max(1e-300)) {
            return Err(Error::Singular {
                op: "sym_inv_sqrt",
                name: name.to_string(),
            });
        }
        let n = self.rows;
        let mut out = Matrix::zeros(n, n);
        for k in 0..n {
            let w = 1.0 / vals[k].sqrt();
            for i in 0..n {
                for j in 0..n {
                    out[(i, j)] += w * vecs[(i, k)] * vecs[(j, k)];
                }
            }
        }
        Ok(out)
    }

    /// Whether a symmetric matrix is positive semidefinite up to `tol`
    /// relative to its largest eigenvalue magnitude.
    pub fn is_psd(&self, tol: f64) -> bool {
        let (vals, _) = self.sym_eigen();
        let scale = vals.iter().fold(1.0f64, |m, v| m.max(v.abs()));
        vals.iter().all(|&l| l >= -tol * scale)
    }

    /// Symmetrize in place: (A + Aᵀ)/2. Quadrature noise can leave tiny
    /// asymmetries in matrices that are symmetric in exact arithmetic.
    pub fn symmetrized(&self) -> Matrix {
        self.add(&self.transpose()).scale(0.5)
    }
}

impl std::ops::Index<(usize, usize)> for Matrix {
    type Output = f64;
    fn index(&self, (i, j): (usize, usize)) -> &f64 {
        &self.data[i * self.cols + j]
    }
}

impl std::ops::IndexMut<(usize, usize)> for Matrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut f64 {
        &mut self.data[i * self.cols + j]
    }
}

/// Trace of a square matrix (free-function form).
pub fn matrix_trace(m: &Matrix) -> f64 {
    m.trace()
}

/// Inverse of a square matrix (free-function form).
pub fn matrix_inverse(m: &Matrix) -> Result<Matrix> {
    m.inverse()
}
