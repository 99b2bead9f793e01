use std::f64::consts::FRAC_PI_2;

use wentzell_core::convergence::{log_space, loglog_slope};
use wentzell_core::decomposition::resolvent_block_check;
use wentzell_core::dense::{Matrix, NormKind, C64};
use wentzell_core::interval::{build_model, Poly, PolyMatrix, WentzellProblem};
use wentzell_core::operator::Operator;
use wentzell_core::probes::{
    hille_yosida_probe, relative_bound_probe, sector_angle_estimate, theorem31_experiment, SectorOptions,
    Theorem31Options, Verdict,
};
use wentzell_core::Error;

/// Thomas algorithm for `(λ − Δ_h) u = 1` with homogeneous Dirichlet data.
fn tridiagonal_row_sums(lambda: f64, nodes: usize) -> Vec<f64> {
    let m = nodes - 2;
    let inv_h2 = ((nodes - 1) * (nodes - 1)) as f64;
    let (diag, off) = (lambda + 2.0 * inv_h2, -inv_h2);
    let mut c = vec![0.0; m];
    let mut d = vec![0.0; m];
    c[0] = off / diag;
    d[0] = 1.0 / diag;
    for i in 1..m {
        let den = diag - off * c[i - 1];
        c[i] = off / den;
        d[i] = (1.0 - off * d[i - 1]) / den;
    }
    let mut u = vec![0.0; m];
    u[m - 1] = d[m - 1];
    for i in (0..m - 1).rev() {
        u[i] = d[i] - c[i] * u[i + 1];
    }
    u
}

#[test]
fn dirichlet_realization_is_a_contraction_in_sup_norm() {
    let nodes = 101;
    let lambdas = log_space(1.0, 1e6, 30);
    // Nonnegative resolvent: ‖λR‖∞ is the largest entry of λR·1.
    let oracle = lambdas
        .iter()
        .map(|&l| l * tridiagonal_row_sums(l, nodes).into_iter().fold(0.0, f64::max))
        .fold(0.0, f64::max);
    assert!(oracle <= 1.0 + 1e-12, "{oracle}");
    let m = build_model(&WentzellProblem::laplacian(-1.0, 0.0), nodes).unwrap();
    let bw = m.interior_bandwidth();
    let a0 = Operator::banded("A0", m.a0().matrix().clone(), bw, bw);
    let r = hille_yosida_probe(&a0, &lambdas, NormKind::Sup).unwrap();
    assert!(r.m <= 1.0 + 1e-8, "{}", r.m);
    assert!((r.m - oracle).abs() <= 1e-10);
}

#[test]
fn dirichlet_realization_is_sectorial_of_right_angle() {
    let m = build_model(&WentzellProblem::laplacian(-1.0, 0.0), 51).unwrap();
    let bw = m.interior_bandwidth();
    let a0 = Operator::banded("A0", m.a0().matrix().clone(), bw, bw);
    let r = sector_angle_estimate(&a0, &SectorOptions::default()).unwrap();
    assert!(r.angle_estimate >= FRAC_PI_2 - 0.05);
    assert!(r.monotonicity_violations.is_empty());
}

#[test]
fn derivative_feedback_slope_on_two_grids() {
    // ‖∂ₛR(λ, Δ)‖ decays like λ^{-1/2} in the continuum.
    let lambdas = log_space(1e2, 1e6, 9);
    for nodes in [201, 401] {
        let m = build_model(&WentzellProblem::laplacian(-1.0, 0.0), nodes).unwrap();
        let r = relative_bound_probe(&m, m.feedback(), &lambdas, NormKind::Sup).unwrap();
        let slope = r.slope.unwrap();
        assert!((slope + 0.5).abs() <= 0.1, "N={nodes}: {slope}");
    }
    // Low end of the range, where the grid still resolves the boundary layer.
    let m = build_model(&WentzellProblem::laplacian(-1.0, 0.0), 401).unwrap();
    let low = log_space(1e2, 1e4, 5);
    let r = relative_bound_probe(&m, m.feedback(), &low, NormKind::Sup).unwrap();
    assert!((loglog_slope(&r.lambdas, &r.values).unwrap() + 0.5).abs() <= 0.05);
}

#[test]
fn trace_feedback_gives_negative_identity_dtn() {
    let p = WentzellProblem::laplacian(0.0, -1.0);
    let opts = Theorem31Options::default();
    let r = theorem31_experiment(&p, 41, &opts).unwrap();
    assert_eq!(r.verdict, Verdict::Pass);
    assert!((r.angles.dtn - (FRAC_PI_2 - opts.sector.theta_step)).abs() < 1e-12);
}

#[test]
fn coupled_system_with_random_feedback() {
    let n = 2;
    let vals = [0.3, -0.7, 0.5, 0.2, -0.4, 0.1, 0.6, -0.2];
    let pick = |k: usize| Matrix::from_fn(2 * n, n, |i, j| C64::new(vals[(i * n + j + k) % vals.len()], 0.0));
    let p = WentzellProblem::laplacian_system(n)
        .with_a(vec![Poly::real(&[1.0]), Poly::real(&[1.0, 1.0])])
        .with_feedback(pick(0), pick(1), pick(2), pick(3));
    let r = theorem31_experiment(&p, 41, &Theorem31Options::default()).unwrap();
    match r.verdict {
        Verdict::Pass => assert!(r.minimizing_ray.is_none()),
        _ => assert!(r.minimizing_ray.is_some()),
    }
    for a in [r.angles.wentzell, r.angles.dirichlet, r.angles.g0, r.angles.dtn] {
        assert!((0.0..=FRAC_PI_2).contains(&a));
    }
}

#[test]
fn singular_dirichlet_problem_fails_an_assumption() {
    // At five nodes the interior block is 16·tridiag(1, −2, 1) with eigenvalue −32.
    let p = WentzellProblem::laplacian(-1.0, 0.0).with_c(PolyMatrix::scalar(1, Poly::real(&[32.0])));
    match theorem31_experiment(&p, 5, &Theorem31Options::default()) {
        Err(Error::AssumptionFailed { name, .. }) => assert!(name.contains("Dirichlet")),
        other => panic!("expected AssumptionFailed, got {other:?}"),
    }
}

#[test]
fn zero_is_in_the_spectrum_of_the_neumann_dtn_on_every_grid() {
    // N = [[-1, 1], [1, -1]] annihilates constants.
    for nodes in [51, 101, 201, 401] {
        let m = build_model(&WentzellProblem::laplacian(-1.0, 0.0), nodes).unwrap();
        let r = resolvent_block_check(&m, &[0.0]);
        assert!(matches!(r, Err(Error::SpectrumHit { .. })), "N={nodes}: {r:?}");
        assert!(resolvent_block_check(&m, &[1.0]).is_ok());
    }
}
