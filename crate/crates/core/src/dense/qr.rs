use super::{euclidean_norm, Matrix, C64};

/// Orthonormal null-space basis together with the numerical rank.
#[derive(Debug, Clone)]
pub struct NullSpace {
    /// Columns span the null space; they are orthonormal in the Euclidean
    /// inner product.
    pub basis: Matrix,
    pub rank: usize,
}

/// Null space of `k` (r × m, r ≤ m typical) from a column-pivoted Householder
/// QR of `kᴴ`.
///
/// Diagonal entries of `R` below `rel_tol·|R₀₀|` count as zero.
pub fn null_space(k: &Matrix, rel_tol: f64) -> NullSpace {
    let m = k.cols();
    let r = k.rows();
    let mut a = k.adjoint(); // m × r
    let mut reflectors: Vec<Vec<C64>> = Vec::new();
    let mut diag = Vec::new();
    let steps = r.min(m);
    for j in 0..steps {
        // Column pivoting on the remaining norms.
        let best = (j..r)
            .map(|c| {
                let s: f64 = (j..m).map(|i| a[(i, c)].norm_sqr()).sum();
                (c, s)
            })
            .fold((j, -1.0), |b, cur| if cur.1 > b.1 { cur } else { b })
            .0;
        if best != j {
            for i in 0..m {
                let tmp = a[(i, j)];
                a[(i, j)] = a[(i, best)];
                a[(i, best)] = tmp;
            }
        }
        let x: Vec<C64> = (j..m).map(|i| a[(i, j)]).collect();
        let norm = euclidean_norm(&x);
        if norm == 0.0 {
            diag.push(0.0);
            reflectors.push(Vec::new());
            continue;
        }
        let phase = if x[0].norm() > 0.0 {
            x[0] / x[0].norm()
        } else {
            C64::new(1.0, 0.0)
        };
        let alpha = -phase * norm;
        let mut v = x;
        v[0] -= alpha;
        let vn = euclidean_norm(&v);
        for z in v.iter_mut() {
            *z /= vn;
        }
        for c in j..r {
            let dot: C64 = (j..m).map(|i| v[i - j].conj() * a[(i, c)]).sum();
            for i in j..m {
                a[(i, c)] -= v[i - j] * dot * 2.0;
            }
        }
        diag.push(alpha.norm());
        reflectors.push(v);
    }
    let lead = diag.first().copied().unwrap_or(0.0);
    let rank = diag.iter().filter(|&&d| d > rel_tol * lead && d > 0.0).count();

    // Q = H₀ H₁ ⋯ H_{s−1}; its trailing columns span the null space.
    let cols: Vec<usize> = (rank..m).collect();
    let mut q = Matrix::from_fn(m, cols.len(), |i, c| {
        if i == cols[c] {
            C64::new(1.0, 0.0)
        } else {
            C64::default()
        }
    });
    for (j, v) in reflectors.iter().enumerate().rev() {
        if v.is_empty() {
            continue;
        }
        for c in 0..q.cols() {
            let dot: C64 = (j..m).map(|i| v[i - j].conj() * q[(i, c)]).sum();
            for i in j..m {
                q[(i, c)] -= v[i - j] * dot * 2.0;
            }
        }
    }
    NullSpace { basis: q, rank }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dense::c64;

    #[test]
    fn null_space_of_single_row() {
        let k = Matrix::from_real(1, 3, &[1.0, 1.0, 1.0]).unwrap();
        let ns = null_space(&k, 1e-12);
        assert_eq!(ns.rank, 1);
        assert_eq!(ns.basis.cols(), 2);
        assert!((&k * &ns.basis).max_abs() < 1e-15);
        let gram = &ns.basis.adjoint() * &ns.basis;
        assert!((&gram - &Matrix::identity(2)).max_abs() < 1e-14);
    }

    #[test]
    fn detects_rank_deficiency() {
        let k = Matrix::from_real(2, 4, &[1.0, 2.0, 0.0, 1.0, 2.0, 4.0, 0.0, 2.0]).unwrap();
        let ns = null_space(&k, 1e-12);
        assert_eq!(ns.rank, 1);
        assert_eq!(ns.basis.cols(), 3);
        assert!((&k * &ns.basis).max_abs() < 1e-14);
    }

    #[test]
    fn complex_rows() {
        let k = Matrix::new(
            2,
            4,
            vec![
                c64(1.0, 1.0),
                c64(0.0, -2.0),
                c64(0.5, 0.0),
                c64(0.0, 0.0),
                c64(0.0, 0.0),
                c64(3.0, 0.0),
                c64(0.0, 1.0),
                c64(-1.0, 0.5),
            ],
        )
        .unwrap();
        let ns = null_space(&k, 1e-12);
        assert_eq!(ns.rank, 2);
        assert!((&k * &ns.basis).max_abs() < 1e-14);
    }
}
