use super::{DenseError, Matrix, C64};

/// Relative pivot threshold below which a matrix is declared singular.
pub(crate) const PIVOT_TOL: f64 = 1e-14;

/// LU factorization with partial pivoting, `P A = L U`, stored in place.
#[derive(Debug, Clone)]
pub struct Lu {
    n: usize,
    lu: Vec<C64>,
    perm: Vec<usize>,
}

impl Lu {
    pub fn factor(a: &Matrix) -> Result<Self, DenseError> {
        if !a.is_square() {
            return Err(DenseError::DimensionMismatch(format!(
                "LU needs a square matrix, got {}x{}",
                a.rows(),
                a.cols()
            )));
        }
        let n = a.rows();
        let threshold = PIVOT_TOL * a.norm_sup();
        let mut lu = a.as_slice().to_vec();
        let mut perm: Vec<usize> = (0..n).collect();
        for k in 0..n {
            let (p, pivot) =
                (k..n)
                    .map(|i| (i, lu[i * n + k].norm()))
                    .fold((k, -1.0), |best, cur| if cur.1 > best.1 { cur } else { best });
            if pivot <= threshold || pivot == 0.0 {
                return Err(DenseError::SingularMatrix {
                    step: k,
                    pivot,
                    threshold,
                });
            }
            if p != k {
                for j in 0..n {
                    lu.swap(k * n + j, p * n + j);
                }
                perm.swap(k, p);
            }
            let (top, bottom) = lu.split_at_mut((k + 1) * n);
            let pivot_row = &top[k * n..];
            let inv = pivot_row[k].inv();
            for row in bottom.chunks_exact_mut(n) {
                let l = row[k] * inv;
                row[k] = l;
                if l != C64::default() {
                    for (x, u) in row[k + 1..].iter_mut().zip(&pivot_row[k + 1..]) {
                        *x -= l * u;
                    }
                }
            }
        }
        Ok(Self { n, lu, perm })
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    /// Solves `A X = rhs` for every column of `rhs`.
    pub fn solve(&self, rhs: &Matrix) -> Result<Matrix, DenseError> {
        let n = self.n;
        if rhs.rows() != n {
            return Err(DenseError::DimensionMismatch(format!(
                "right-hand side has {} rows, system has {n}",
                rhs.rows()
            )));
        }
        let m = rhs.cols();
        let mut x = Matrix::zeros(n, m);
        for (i, &p) in self.perm.iter().enumerate() {
            x.row_mut(i).copy_from_slice(rhs.row(p));
        }
        let data = x.data_mut();
        for i in 0..n {
            let (done, rest) = data.split_at_mut(i * m);
            let xi = &mut rest[..m];
            for k in 0..i {
                let l = self.lu[i * n + k];
                if l != C64::default() {
                    for (a, b) in xi.iter_mut().zip(&done[k * m..(k + 1) * m]) {
                        *a -= l * b;
                    }
                }
            }
        }
        for i in (0..n).rev() {
            let (head, tail) = data.split_at_mut((i + 1) * m);
            let xi = &mut head[i * m..];
            for k in i + 1..n {
                let u = self.lu[i * n + k];
                if u != C64::default() {
                    let xk = &tail[(k - i - 1) * m..(k - i) * m];
                    for (a, b) in xi.iter_mut().zip(xk) {
                        *a -= u * b;
                    }
                }
            }
            let inv = self.lu[i * n + i].inv();
            for a in xi.iter_mut() {
                *a *= inv;
            }
        }
        Ok(x)
    }

    pub fn solve_vec(&self, rhs: &[C64]) -> Result<Vec<C64>, DenseError> {
        Ok(self.solve(&Matrix::column(rhs))?.col(0))
    }

    pub fn inverse(&self) -> Matrix {
        self.solve(&Matrix::identity(self.n))
            .expect("identity has matching dimensions")
    }
}

/// Solves `A X = B` by LU with partial pivoting.
pub fn solve_linear(a: &Matrix, b: &Matrix) -> Result<Matrix, DenseError> {
    if a.rows() != b.rows() {
        return Err(DenseError::DimensionMismatch(format!(
            "A is {}x{} but B has {} rows",
            a.rows(),
            a.cols(),
            b.rows()
        )));
    }
    Lu::factor(a)?.solve(b)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dense::{c64, real};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn identity_solve_returns_rhs() {
        let b = Matrix::from_real(3, 1, &[1.0, 2.0, 3.0]).unwrap();
        assert_eq!(solve_linear(&Matrix::identity(3), &b).unwrap(), b);
    }

    #[test]
    fn diagonal_solve() {
        let a = Matrix::from_real(2, 2, &[2.0, 0.0, 0.0, 4.0]).unwrap();
        let b = Matrix::from_real(2, 1, &[2.0, 4.0]).unwrap();
        let x = solve_linear(&a, &b).unwrap();
        assert_eq!(x.col(0), vec![real(1.0), real(1.0)]);
    }

    #[test]
    fn random_dense_residual() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let n = 50;
        let a = Matrix::from_fn(n, n, |_, _| c64(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)));
        let b = Matrix::from_fn(n, 3, |_, _| c64(rng.gen_range(-1.0..1.0), 0.0));
        let x = solve_linear(&a, &b).unwrap();
        let r = &(&a * &x) - &b;
        let rel = r.max_abs() / (a.norm_sup() * x.max_abs());
        assert!(rel <= 1e-10, "relative residual {rel}");
    }

    #[test]
    fn detects_singular_matrix() {
        let a = Matrix::from_real(2, 2, &[1.0, 2.0, 2.0, 4.0]).unwrap();
        assert!(matches!(
            solve_linear(&a, &Matrix::identity(2)),
            Err(DenseError::SingularMatrix { .. })
        ));
    }

    #[test]
    fn inverse_times_matrix_is_identity() {
        let a = Matrix::from_real(3, 3, &[4.0, 1.0, 0.0, 1.0, 3.0, 1.0, 0.0, 1.0, 2.0]).unwrap();
        let inv = Lu::factor(&a).unwrap().inverse();
        let prod = &a * &inv;
        assert!((&prod - &Matrix::identity(3)).max_abs() < 1e-14);
    }
}
