use super::Matrix;
use crate::{Error, Result};

/// Scaled pivots below this magnitude are treated as singular.
pub const PIVOT_TOLERANCE: f64 = 1e-13;

/// LU factorization with scaled partial pivoting, `P·A = L·U`.
#[derive(Clone, Debug)]
pub struct Lu {
    lu: Matrix,
    perm: Vec<usize>,
    sign: f64,
}

impl Lu {
    pub fn factor(a: &Matrix) -> Result<Self> {
        assert!(a.is_square(), "LU of non-square matrix");
        let n = a.rows();
        let mut lu = a.clone();
        let mut perm: Vec<usize> = (0..n).collect();
        let mut sign = 1.0;

        // Row scales of the original matrix; a zero row is singular outright.
        let mut scale = Vec::with_capacity(n);
        for r in 0..n {
            let s = a.row(r).iter().fold(0.0_f64, |m, x| m.max(x.abs()));
            if s == 0.0 {
                return Err(Error::SingularMatrix { column: 0, pivot: 0.0 });
            }
            scale.push(s);
        }

        for k in 0..n {
            let (p, best) =
                (k..n)
                    .map(|r| (r, lu[(r, k)].abs() / scale[r]))
                    .fold((k, -1.0), |acc, x| if x.1 > acc.1 { x } else { acc });
            if best < PIVOT_TOLERANCE {
                return Err(Error::SingularMatrix { column: k, pivot: best });
            }
            if p != k {
                for c in 0..n {
                    let tmp = lu[(k, c)];
                    lu[(k, c)] = lu[(p, c)];
                    lu[(p, c)] = tmp;
                }
                perm.swap(k, p);
                scale.swap(k, p);
                sign = -sign;
            }
            let pivot = lu[(k, k)];
            for r in k + 1..n {
                let f = lu[(r, k)] / pivot;
                lu[(r, k)] = f;
                if f != 0.0 {
                    for c in k + 1..n {
                        lu[(r, c)] -= f * lu[(k, c)];
                    }
                }
            }
        }
        Ok(Self { lu, perm, sign })
    }

    pub fn dim(&self) -> usize {
        self.lu.rows()
    }

    pub fn solve(&self, b: &[f64]) -> Vec<f64> {
        let n = self.dim();
        assert_eq!(b.len(), n, "rhs length mismatch");
        let mut x: Vec<f64> = self.perm.iter().map(|&p| b[p]).collect();
        for r in 1..n {
            let s: f64 = (0..r).map(|c| self.lu[(r, c)] * x[c]).sum();
            x[r] -= s;
        }
        for r in (0..n).rev() {
            let s: f64 = (r + 1..n).map(|c| self.lu[(r, c)] * x[c]).sum();
            x[r] = (x[r] - s) / self.lu[(r, r)];
        }
        x
    }

    /// Solves `A·X = B` column by column.
    pub fn solve_matrix(&self, b: &Matrix) -> Matrix {
        assert_eq!(b.rows(), self.dim());
        let mut out = Matrix::zeros(b.rows(), b.cols());
        for c in 0..b.cols() {
            let x = self.solve(&b.column(c));
            for (r, v) in x.into_iter().enumerate() {
                out[(r, c)] = v;
            }
        }
        out
    }

    pub fn inverse(&self) -> Matrix {
        self.solve_matrix(&Matrix::identity(self.dim()))
    }

    pub fn determinant(&self) -> f64 {
        (0..self.dim()).fold(self.sign, |d, i| d * self.lu[(i, i)])
    }
}

pub fn solve(a: &Matrix, b: &[f64]) -> Result<Vec<f64>> {
    Ok(Lu::factor(a)?.solve(b))
}

pub fn determinant(a: &Matrix) -> Result<f64> {
    Ok(Lu::factor(a)?.determinant())
}

/// `‖A‖₁·‖A⁻¹‖₁`, computed from the explicit inverse.
pub fn condition_estimate(a: &Matrix) -> Result<f64> {
    let inv = Lu::factor(a)?.inverse();
    Ok(a.norm_1() * inv.norm_1())
}
