use latala_cli::checks::{
    decoupling_check, levy_check, moment_growth_check, paley_zygmund_check, product_vs_sum_check,
    sandwich_check, Coefficients,
};
use latala_cli::oracle::{McConfig, Method, Oracle, OracleEstimate};
use latala_core::{exact_sum_distribution, Marginal, SummandSequence};

fn rademacher(n: usize) -> SummandSequence {
    SummandSequence::iid(Marginal::rademacher(1.0).unwrap(), n).unwrap()
}

fn mc() -> McConfig {
    McConfig::new(20_000, 7, 2).unwrap()
}

#[test]
fn levy_single_rademacher() {
    let r = levy_check(&rademacher(1), 0.5, &Oracle::Exact).unwrap();
    assert_eq!(r.max_tail.value, 1.0);
    assert_eq!(r.sum_tail.value, 1.0);
    assert!(r.pass);
}

#[test]
fn levy_two_rademacher_beyond_atoms() {
    let r = levy_check(&rademacher(2), 1.5, &Oracle::Exact).unwrap();
    assert_eq!(r.max_tail.value, 0.0);
    // both atoms ±2 carry mass 1/4
    assert_eq!(r.sum_tail.value, 0.5);
    assert!(r.pass);
    let far = levy_check(&rademacher(3), 10.0, &Oracle::Exact).unwrap();
    assert_eq!((far.max_tail.value, far.sum_tail.value), (0.0, 0.0));
    assert!(far.pass);
}

#[test]
fn levy_rejects_nonnegative() {
    let seq = SummandSequence::iid(Marginal::point_mass(1.0).unwrap(), 2).unwrap();
    assert!(levy_check(&seq, 1.0, &Oracle::Exact).is_err());
}

#[test]
fn growth_same_order_at_most_one() {
    for t in [0.5, 1.0, 3.0] {
        let r = moment_growth_check(&rademacher(16), t, 3.0, 3.0, &Oracle::Exact).unwrap();
        assert!(r.c_hat <= 1.0);
    }
}

#[test]
fn growth_sixteen_rademacher() {
    let r = moment_growth_check(&rademacher(16), 1.0, 2.0, 4.0, &Oracle::Exact).unwrap();
    assert!((r.norm_p.value - 4.0).abs() < 1e-12);
    // E S^4 = 3n^2 - 2n for n Rademacher signs
    assert!((r.norm_q.value - (3.0f64 * 256.0 - 32.0).powf(0.25)).abs() < 1e-12);
    assert!(r.c_hat.is_finite());
}

#[test]
fn growth_is_homogeneous() {
    let a = moment_growth_check(&rademacher(6), 1.0, 2.0, 6.0, &Oracle::Exact).unwrap();
    let b = moment_growth_check(
        &rademacher(6).scaled(3.0).unwrap(),
        3.0,
        2.0,
        6.0,
        &Oracle::Exact,
    )
    .unwrap();
    assert!((a.c_hat - b.c_hat).abs() < 1e-12);
}

#[test]
fn growth_rejects_q_below_p() {
    assert!(moment_growth_check(&rademacher(2), 1.0, 4.0, 2.0, &Oracle::Exact).is_err());
}

#[test]
fn decoupling_linear_ratio_one() {
    let rad = Marginal::rademacher(1.0).unwrap();
    let r = decoupling_check(&Coefficients::Linear(vec![1.0, 2.0, 3.0]), &rad, 3.0, &mc()).unwrap();
    assert_eq!(r.lhs.method, Method::Exact);
    assert!((r.ratio - 1.0).abs() < 1e-12);
    assert_eq!(r.constant, 3.0);
    assert!(r.pass);
}

#[test]
fn decoupling_bilinear_enumerated() {
    let f: Vec<Vec<f64>> = (0..4)
        .map(|i| (0..4).map(|j| if i == j { 0.0 } else { 1.0 }).collect())
        .collect();
    let rad = Marginal::rademacher(1.0).unwrap();
    let r = decoupling_check(&Coefficients::Bilinear(f), &rad, 2.0, &mc()).unwrap();
    assert_eq!(r.rhs.method, Method::Exact);
    assert_eq!(r.constant, 25.0);
    // coupled: (ΣX)^2 - 4, decoupled: ΣX ΣY - ΣX_iY_i; both have second moment 24
    assert!((r.lhs.value - 24f64.sqrt()).abs() < 1e-12);
    assert!((r.rhs.value - 12f64.sqrt()).abs() < 1e-12);
    assert!(r.pass);
}

#[test]
fn decoupling_zero_coefficients() {
    let rad = Marginal::rademacher(1.0).unwrap();
    let r = decoupling_check(&Coefficients::Linear(vec![0.0; 4]), &rad, 2.0, &mc()).unwrap();
    assert_eq!((r.lhs.value, r.rhs.value), (0.0, 0.0));
    assert!(r.pass);
}

#[test]
fn decoupling_rejects_diagonal() {
    let rad = Marginal::rademacher(1.0).unwrap();
    let f = vec![vec![1.0, 1.0], vec![1.0, 0.0]];
    assert!(decoupling_check(&Coefficients::Bilinear(f), &rad, 2.0, &mc()).is_err());
}

#[test]
fn decoupling_monte_carlo_for_continuous_base() {
    let base = Marginal::exponential(1.0).unwrap();
    let f = vec![
        vec![0.0, 1.0, 2.0],
        vec![1.0, 0.0, 1.0],
        vec![0.5, 1.0, 0.0],
    ];
    let r = decoupling_check(&Coefficients::Bilinear(f), &base, 2.0, &mc()).unwrap();
    assert_eq!(r.lhs.method, Method::MonteCarlo);
    assert!(r.pass);
}

#[test]
fn product_identity_three_bernoulli() {
    let half = Marginal::atoms(vec![(0.0, 0.5), (1.0, 0.5)]).unwrap();
    let seq = SummandSequence::iid(half, 3).unwrap();
    let r = product_vs_sum_check(&seq, 2.0, &Oracle::Exact, &mc()).unwrap();
    assert!(r.identity_rel_err.unwrap() <= 1e-12);
    // E(1+X)^2 = 5/2 for each factor
    assert!((r.identity_log_lhs.unwrap() - 3.0 * 2.5f64.ln()).abs() < 1e-12);
    assert_eq!(r.pointwise_violations, 0);
    assert!(r.pass);
}

#[test]
fn product_identity_degenerate_cases() {
    let zeros = SummandSequence::iid(Marginal::point_mass(0.0).unwrap(), 2).unwrap();
    let r = product_vs_sum_check(&zeros, 2.0, &Oracle::Exact, &mc()).unwrap();
    assert!(r.pass);
    let single = SummandSequence::iid(Marginal::point_mass(2.5).unwrap(), 1).unwrap();
    let r = product_vs_sum_check(&single, 3.0, &Oracle::Exact, &mc()).unwrap();
    assert!(r.identity_rel_err.unwrap() <= 1e-12);
    assert!(r.pass);
}

#[test]
fn paley_zygmund_on_exact_laws() {
    let law = exact_sum_distribution(&rademacher(16)).unwrap();
    for theta in [0.05, 0.3, 0.7, 0.95] {
        let r = paley_zygmund_check(&law, theta).unwrap();
        assert!(r.pass, "{r:?}");
    }
}

#[test]
fn sandwich_sixteen_rademacher() {
    let r = sandwich_check(&rademacher(16), 2.0, OracleEstimate::exact(4.0)).unwrap();
    assert!(r.lower <= 4.0 && 4.0 <= r.upper);
    assert!(r.pass);
    let wrong = sandwich_check(&rademacher(16), 2.0, OracleEstimate::exact(100.0)).unwrap();
    assert!(!wrong.pass);
}
