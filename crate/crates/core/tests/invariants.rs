use proptest::prelude::*;

use wentzell_core::decomposition::{dirichlet_map, dtn_operator, Decomposition, Feedback, LiftingOp};
use wentzell_core::dense::{matrix_exponential, operator_norm, singular_values, solve_linear, Matrix, NormKind, C64};
use wentzell_core::disk::{build_disk_model, disk_generation_report, disk_relative_bound};
use wentzell_core::interval::{build_model, LinOp, Poly, Space, WentzellProblem};
use wentzell_core::operator::Operator;
use wentzell_core::probes::{hille_yosida_probe, sector_angle_estimate, SectorOptions};

fn re(x: f64) -> C64 {
    C64::new(x, 0.0)
}

fn diag_dominant(n: usize, entries: &[(f64, f64)]) -> Matrix {
    let mut m = Matrix::from_fn(n, n, |i, j| {
        let (a, b) = entries[i * n + j];
        C64::new(a, b)
    });
    for i in 0..n {
        let row: f64 = m.row(i).iter().map(|z| z.norm()).sum();
        m.row_mut(i)[i] += re(row + 1.0);
    }
    m
}

fn entries(n: usize) -> impl Strategy<Value = Vec<(f64, f64)>> {
    prop::collection::vec((-1.0..1.0f64, -1.0..1.0f64), n * n)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn solve_residual_is_small(e in entries(6), rhs in prop::collection::vec(-1.0..1.0f64, 6)) {
        let a = diag_dominant(6, &e);
        let b = Matrix::from_real(6, 1, &rhs).unwrap();
        let x = solve_linear(&a, &b).unwrap();
        let r = (&(&a * &x) - &b).norm_sup();
        prop_assert!(r <= 1e-12 * (a.norm_sup() * x.norm_sup() + b.norm_sup()));
    }

    #[test]
    fn exponential_semigroup_law(e in entries(4), s in 0.0..2.0f64, t in 0.0..2.0f64) {
        let a = Matrix::from_fn(4, 4, |i, j| C64::new(e[i * 4 + j].0, e[i * 4 + j].1));
        let lhs = matrix_exponential(&a, s + t).unwrap();
        let rhs = &matrix_exponential(&a, s).unwrap() * &matrix_exponential(&a, t).unwrap();
        prop_assert!((&lhs - &rhs).norm_sup() <= 1e-11 * lhs.norm_sup().max(1.0));
    }

    #[test]
    fn spectral_norm_is_largest_singular_value(e in entries(5), x in prop::collection::vec(-1.0..1.0f64, 5)) {
        let a = Matrix::from_fn(5, 5, |i, j| C64::new(e[i * 5 + j].0, e[i * 5 + j].1));
        let sigma = singular_values(&a).unwrap();
        let norm = operator_norm(&a, NormKind::Spectral);
        prop_assert!((norm - sigma[0]).abs() <= 1e-12 * sigma[0].max(1.0));
        prop_assert!(sigma.windows(2).all(|w| w[0] >= w[1]));
        let v: Vec<C64> = x.iter().map(|&t| re(t)).collect();
        let av = a.mul_vec(&v);
        let n2 = |w: &[C64]| w.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        prop_assert!(n2(&av) <= norm * n2(&v) * (1.0 + 1e-12) + 1e-14);
    }

    #[test]
    fn stencils_exact_on_quadratics(c0 in -2.0..2.0f64, c1 in -2.0..2.0f64, c2 in -2.0..2.0f64, nodes in 5usize..40) {
        let p = WentzellProblem::laplacian(-1.0, 0.0);
        let m = build_model(&p, nodes).unwrap();
        let f = m.sample(|s, _| re(c0 + c1 * s + c2 * s * s));
        let af = m.am().apply(f.values()).unwrap();
        for v in &af {
            prop_assert!((v - re(2.0 * c2)).norm() <= 1e-12 * (nodes * nodes) as f64);
        }
        // B̂f = −(−f'(0)) − f'(1) with the outward normal: f'(0) − f'(1) = −2c₂.
        let bf = m.feedback().apply(f.values()).unwrap();
        prop_assert!((bf[0] + bf[1] - re(-2.0 * c2)).norm() <= 1e-13 * (nodes * nodes) as f64);
    }

    #[test]
    fn lifting_is_a_right_inverse_of_the_trace(nodes in 7usize..40, lambda in 0.0..50.0f64, slope in -1.0..1.0f64) {
        let p = WentzellProblem::laplacian(-1.0, 0.0).with_a(vec![Poly::real(&[1.0, slope.abs() * 0.5])]);
        let m = build_model(&p, nodes).unwrap();
        let d = Decomposition::new(&m).unwrap();
        let l0 = d.lifting();
        let tl = m.trace().matrix() * l0;
        prop_assert!((&tl - &Matrix::identity(2)).max_abs() == 0.0);
        // I − L̂₀L̂ is a projection onto zero-trace functions.
        let proj = &Matrix::identity(nodes) - &(l0 * m.trace().matrix());
        prop_assert!((&(&proj * &proj) - &proj).max_abs() <= 1e-12 * proj.max_abs());
        let l = dirichlet_map(&m, re(lambda), LiftingOp::Am).unwrap();
        prop_assert!(l.interior_residual <= 1e-12);
    }

    #[test]
    fn dtn_is_additive_in_the_feedback(e in prop::collection::vec(-1.0..1.0f64, 2 * 21 * 2), lambda in 0.5..20.0f64) {
        let m = build_model(&WentzellProblem::laplacian(-1.0, 0.0), 21).unwrap();
        let f1 = LinOp::new(Matrix::from_real(2, 21, &e[..42]).unwrap(), Space::FullGrid, Space::Boundary);
        let f2 = LinOp::new(Matrix::from_real(2, 21, &e[42..]).unwrap(), Space::FullGrid, Space::Boundary);
        let sum = f1.add(&f2).unwrap();
        let lam = re(lambda);
        let d1 = dtn_operator(&m, lam, LiftingOp::Am, &Feedback::Custom(f1)).unwrap().matrix;
        let d2 = dtn_operator(&m, lam, LiftingOp::Am, &Feedback::Custom(f2)).unwrap().matrix;
        let ds = dtn_operator(&m, lam, LiftingOp::Am, &Feedback::Custom(sum)).unwrap().matrix;
        prop_assert!((&ds - &(&d1 + &d2)).max_abs() <= 1e-12 * ds.max_abs().max(1.0));
    }

    #[test]
    fn disk_modes_are_even_and_additive(k in 1usize..64, beta in -5.0..-0.01f64, gamma in -3.0..3.0f64, q in 0.0..3.0f64) {
        let m = build_disk_model(k, beta, gamma, q).unwrap();
        let last = m.modes.len() - 1;
        for i in 0..m.modes.len() {
            prop_assert_eq!(m.dtn[i], m.dtn[last - i]);
            prop_assert_eq!(m.dtn_b0[i], m.dtn_b0[last - i]);
            prop_assert_eq!(m.coupling[i], m.coupling[last - i]);
            prop_assert_eq!(m.dtn[i], m.dtn_b0[i] + m.coupling[i]);
            prop_assert_eq!(m.w[i] * m.w[i], -m.beltrami[i]);
        }
        let g = disk_generation_report(&m, &[0.5, 1.0]).unwrap();
        for f in &g.factors {
            prop_assert!(f.factor > 0.0 || f.t * m.dtn[m.max_mode + f.k] < -700.0);
            prop_assert!(f.factor <= (f.t * gamma).exp());
        }
    }

    #[test]
    fn disk_attaining_mode_is_bounded(beta in -5.0..-0.01f64, q in 0.01..3.0f64, eps in 0.01..2.0f64) {
        let m = build_disk_model(4096, beta, 0.0, q).unwrap();
        let r = disk_relative_bound(&m, &[eps]).unwrap();
        prop_assert!(r.rows[0].k_star as f64 <= r.rows[0].k_bound);
        prop_assert!(r.rows[0].m_epsilon >= 0.0 && r.rows[0].m_epsilon.is_finite());
    }

    #[test]
    fn resolvent_asymptotics_and_angle_range(d in prop::collection::vec(-50.0..-0.1f64, 1..6)) {
        let op = Operator::diagonal("d", d.iter().map(|&x| re(x)).collect());
        let hy = hille_yosida_probe(&op, &[1.0, 1e3, 1e9], NormKind::Sup).unwrap();
        prop_assert!(hy.asymptotic_gap.unwrap() <= 1e-6);
        let s = sector_angle_estimate(&op, &SectorOptions::default()).unwrap();
        prop_assert!(s.m >= 1.0 - 1e-8);
        prop_assert!((0.0..=std::f64::consts::FRAC_PI_2).contains(&s.angle_estimate));
    }
}
