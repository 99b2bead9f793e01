use super::{solve_linear, DenseError, Matrix, C64};

const THETA_13: f64 = 5.371920351148152;

const PADE_13: [f64; 14] = [
    64764752532480000.0,
    32382376266240000.0,
    7771770303897600.0,
    1187353796428800.0,
    129060195264000.0,
    10559470521600.0,
    670442572800.0,
    33522128640.0,
    1323241920.0,
    40840800.0,
    960960.0,
    16380.0,
    182.0,
    1.0,
];

fn lin(terms: &[(f64, &Matrix)], n: usize) -> Matrix {
    let mut out = Matrix::zeros(n, n);
    for (c, m) in terms {
        let data = out.data_mut();
        for (o, x) in data.iter_mut().zip(m.as_slice()) {
            *o += x * c;
        }
    }
    out
}

/// `exp(t·a)` by degree-13 Padé approximation with scaling and squaring.
pub fn matrix_exponential(a: &Matrix, t: f64) -> Result<Matrix, DenseError> {
    if !a.is_square() {
        return Err(DenseError::DimensionMismatch(format!(
            "exponential of a {}x{} matrix",
            a.rows(),
            a.cols()
        )));
    }
    if !t.is_finite() || t < 0.0 {
        return Err(DenseError::InvalidArgument(format!(
            "time must be finite and non-negative, got {t}"
        )));
    }
    let n = a.rows();
    let ta = a.scale(C64::new(t, 0.0));
    let norm = ta.norm_one();
    if !norm.is_finite() {
        return Err(DenseError::Overflow("input norm is not finite".into()));
    }
    if norm == 0.0 {
        return Ok(Matrix::identity(n));
    }
    let s = if norm > THETA_13 {
        (norm / THETA_13).log2().ceil() as i32
    } else {
        0
    };
    if s > 1000 {
        return Err(DenseError::Overflow(format!("would need 2^{s} squarings")));
    }
    let x = ta.scale(C64::new(0.5f64.powi(s), 0.0));
    let id = Matrix::identity(n);
    let x2 = &x * &x;
    let x4 = &x2 * &x2;
    let x6 = &x4 * &x2;
    let b = PADE_13;

    let inner_u = lin(&[(b[13], &x6), (b[11], &x4), (b[9], &x2)], n);
    let u_poly = &(&x6 * &inner_u) + &lin(&[(b[7], &x6), (b[5], &x4), (b[3], &x2), (b[1], &id)], n);
    let u = &x * &u_poly;
    let inner_v = lin(&[(b[12], &x6), (b[10], &x4), (b[8], &x2)], n);
    let v = &(&x6 * &inner_v) + &lin(&[(b[6], &x6), (b[4], &x4), (b[2], &x2), (b[0], &id)], n);

    let mut r = solve_linear(&(&v - &u), &(&v + &u))
        .map_err(|e| DenseError::Overflow(format!("Padé denominator could not be factored: {e}")))?;
    for _ in 0..s {
        r = &r * &r;
        if !r.is_finite() {
            return Err(DenseError::Overflow(format!(
                "entries overflowed while squaring (‖tA‖₁ = {norm:.3e})"
            )));
        }
    }
    if !r.is_finite() {
        return Err(DenseError::Overflow("non-finite result".into()));
    }
    Ok(r)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dense::{c64, real};

    fn max_rel(a: &Matrix, b: &Matrix) -> f64 {
        (a - b).max_abs() / b.max_abs()
    }

    #[test]
    fn zero_matrix_gives_identity() {
        let e = matrix_exponential(&Matrix::zeros(3, 3), 1.0).unwrap();
        assert_eq!(e, Matrix::identity(3));
    }

    #[test]
    fn zero_time_gives_identity() {
        let a = Matrix::from_real(2, 2, &[3.0, -1.0, 7.0, 2.0]).unwrap();
        assert!((&matrix_exponential(&a, 0.0).unwrap() - &Matrix::identity(2)).max_abs() < 1e-16);
    }

    #[test]
    fn diagonal_matches_scalar_exponentials() {
        let a = Matrix::from_diagonal(&[real(-1.0), real(-2.0)]);
        let e = matrix_exponential(&a, 1.0).unwrap();
        let expect = Matrix::from_diagonal(&[real((-1.0f64).exp()), real((-2.0f64).exp())]);
        assert!(max_rel(&e, &expect) < 1e-14);
    }

    #[test]
    fn nilpotent_series_terminates() {
        let a = Matrix::from_real(2, 2, &[0.0, 1.0, 0.0, 0.0]).unwrap();
        let e = matrix_exponential(&a, 1.0).unwrap();
        let expect = Matrix::from_real(2, 2, &[1.0, 1.0, 0.0, 1.0]).unwrap();
        assert!((&e - &expect).max_abs() < 1e-15);
    }

    #[test]
    fn rotation_generator_at_large_norm() {
        // exp(t[[0, w],[-w, 0]]) is a rotation by w·t.
        let w = 300.0;
        let a = Matrix::from_real(2, 2, &[0.0, w, -w, 0.0]).unwrap();
        let t = 1.7;
        let e = matrix_exponential(&a, t).unwrap();
        let (s, c) = (w * t).sin_cos();
        let expect = Matrix::from_real(2, 2, &[c, s, -s, c]).unwrap();
        assert!((&e - &expect).max_abs() < 1e-10);
    }

    #[test]
    fn complex_scalar() {
        let z = c64(-0.3, 2.0);
        let e = matrix_exponential(&Matrix::from_diagonal(&[z]), 2.5).unwrap();
        assert!((e[(0, 0)] - (z * 2.5).exp()).norm() < 1e-14);
    }

    #[test]
    fn rejects_negative_time_and_reports_overflow() {
        let a = Matrix::identity(2);
        assert!(matches!(
            matrix_exponential(&a, -1.0),
            Err(DenseError::InvalidArgument(_))
        ));
        let big = Matrix::from_diagonal(&[real(1e3)]);
        assert!(matches!(matrix_exponential(&big, 1.0), Err(DenseError::Overflow(_))));
    }
}
