use super::lu::PIVOT_TOL;
use super::{DenseError, Matrix, C64};

/// LU factorization of a banded matrix with partial pivoting.
///
/// Storage stays dense but every loop is clipped to the band, so factoring
/// costs `O(n·kl·(kl+ku))` and inverting costs `O(n²·(kl+ku))`. Multipliers
/// are kept as a sequence of Gauss transforms with interleaved row swaps, the
/// same layout LAPACK's `gbtrf` uses, so fill-in never leaves the band.
#[derive(Debug, Clone)]
pub struct BandLu {
    n: usize,
    kl: usize,
    ku: usize,
    lu: Vec<C64>,
    pivots: Vec<usize>,
}

impl BandLu {
    /// Factors `a`, whose entries outside `kl` sub- and `ku` super-diagonals
    /// must vanish.
    pub fn factor(a: &Matrix, kl: usize, ku: usize) -> Result<Self, DenseError> {
        if !a.is_square() {
            return Err(DenseError::DimensionMismatch(format!(
                "banded LU needs a square matrix, got {}x{}",
                a.rows(),
                a.cols()
            )));
        }
        let n = a.rows();
        for i in 0..n {
            for j in 0..n {
                let outside = j + kl < i || i + ku < j;
                if outside && a[(i, j)] != C64::default() {
                    return Err(DenseError::InvalidArgument(format!(
                        "entry ({i}, {j}) lies outside the band ({kl}, {ku})"
                    )));
                }
            }
        }
        let threshold = PIVOT_TOL * a.norm_sup();
        let mut lu = a.as_slice().to_vec();
        let mut pivots = Vec::with_capacity(n);
        let upper = kl + ku;
        for k in 0..n {
            let last_row = (k + kl).min(n - 1);
            let last_col = (k + upper).min(n - 1);
            let (p, pivot) = (k..=last_row)
                .map(|i| (i, lu[i * n + k].norm()))
                .fold((k, -1.0), |best, cur| if cur.1 > best.1 { cur } else { best });
            if pivot <= threshold || pivot == 0.0 {
                return Err(DenseError::SingularMatrix {
                    step: k,
                    pivot,
                    threshold,
                });
            }
            pivots.push(p);
            if p != k {
                for j in k..=last_col {
                    lu.swap(k * n + j, p * n + j);
                }
            }
            let inv = lu[k * n + k].inv();
            for i in k + 1..=last_row {
                let l = lu[i * n + k] * inv;
                lu[i * n + k] = l;
                if l == C64::default() {
                    continue;
                }
                for j in k + 1..=last_col {
                    let u = lu[k * n + j];
                    lu[i * n + j] -= l * u;
                }
            }
        }
        Ok(Self { n, kl, ku, lu, pivots })
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    /// Solves `A X = rhs` column by column, working on whole rows of `X`.
    pub fn solve(&self, rhs: &Matrix) -> Result<Matrix, DenseError> {
        let n = self.n;
        if rhs.rows() != n {
            return Err(DenseError::DimensionMismatch(format!(
                "right-hand side has {} rows, system has {n}",
                rhs.rows()
            )));
        }
        let m = rhs.cols();
        let mut x = rhs.clone();
        let data = x.data_mut();
        for k in 0..n {
            let p = self.pivots[k];
            if p != k {
                for j in 0..m {
                    data.swap(k * m + j, p * m + j);
                }
            }
            let last_row = (k + self.kl).min(n - 1);
            let (head, tail) = data.split_at_mut((k + 1) * m);
            let xk = &head[k * m..];
            for i in k + 1..=last_row {
                let l = self.lu[i * n + k];
                if l == C64::default() {
                    continue;
                }
                let xi = &mut tail[(i - k - 1) * m..(i - k) * m];
                for (a, b) in xi.iter_mut().zip(xk) {
                    *a -= l * b;
                }
            }
        }
        let upper = self.kl + self.ku;
        for i in (0..n).rev() {
            let last_col = (i + upper).min(n - 1);
            let (head, tail) = data.split_at_mut((i + 1) * m);
            let xi = &mut head[i * m..];
            for k in i + 1..=last_col {
                let u = self.lu[i * n + k];
                if u == C64::default() {
                    continue;
                }
                let xk = &tail[(k - i - 1) * m..(k - i) * m];
                for (a, b) in xi.iter_mut().zip(xk) {
                    *a -= u * b;
                }
            }
            let inv = self.lu[i * n + i].inv();
            for a in xi.iter_mut() {
                *a *= inv;
            }
        }
        Ok(x)
    }

    pub fn inverse(&self) -> Matrix {
        self.solve(&Matrix::identity(self.n))
            .expect("identity has matching dimensions")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dense::{c64, solve_linear};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_band(n: usize, kl: usize, ku: usize, seed: u64) -> Matrix {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        Matrix::from_fn(n, n, |i, j| {
            if j + kl < i || i + ku < j {
                c64(0.0, 0.0)
            } else {
                c64(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))
            }
        })
    }

    #[test]
    fn matches_dense_solve() {
        for (kl, ku) in [(1, 1), (2, 3), (4, 2), (0, 2)] {
            let a = random_band(40, kl, ku, (kl * 10 + ku) as u64);
            let b = random_band(40, 40, 40, 99).block(0, 0, 40, 3);
            let dense = solve_linear(&a, &b).unwrap();
            let band = BandLu::factor(&a, kl, ku).unwrap().solve(&b).unwrap();
            let diff = (&dense - &band).max_abs() / dense.max_abs();
            assert!(diff < 1e-11, "kl={kl} ku={ku} diff={diff}");
        }
    }

    #[test]
    fn rejects_entries_outside_band() {
        let a = Matrix::from_fn(4, 4, |_, _| c64(1.0, 0.0));
        assert!(matches!(BandLu::factor(&a, 1, 1), Err(DenseError::InvalidArgument(_))));
    }

    #[test]
    fn pivoting_handles_zero_diagonal() {
        let a = Matrix::from_real(3, 3, &[0.0, 1.0, 0.0, 1.0, 0.0, 1.0, 0.0, 1.0, 1.0]).unwrap();
        let inv = BandLu::factor(&a, 1, 1).unwrap().inverse();
        assert!((&(&a * &inv) - &Matrix::identity(3)).max_abs() < 1e-14);
    }
}
