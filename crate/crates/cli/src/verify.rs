//! The full verification suite over the built-in corpus.

use latala_core::{
    exact_sum_distribution, f_series, kappa, latala_norm, Marginal, SummandSequence, TailConfig,
    DEFAULT_REL_TOL, LATALA_LOWER_CONSTANT,
};
use serde::Serialize;
use serde_json::{json, Value};

use crate::checks::{
    decoupling_check, levy_check, max_tail_check, moment_growth_check, norms_over_grid,
    paley_zygmund_check, product_vs_sum_check, sandwich_check, tail_check, Coefficients,
};
use crate::corpus::{self, Member};
use crate::error::Result;
use crate::oracle::{mc_estimate, McConfig, Oracle, Statistic};
use crate::report::Sink;

pub const SYMMETRIC_ORDERS: [f64; 8] = [2.0, 3.0, 4.0, 6.0, 8.0, 12.0, 16.0, 20.0];
pub const NONNEGATIVE_ORDERS: [f64; 6] = [1.0, 2.0, 3.0, 4.0, 6.0, 8.0];
/// Trials and samples per trial of the Monte Carlo coverage study.
pub const COVERAGE_TRIALS: u64 = 1000;
pub const COVERAGE_SAMPLES: u64 = 10_000;
pub const COVERAGE_REQUIRED: f64 = 0.99;

/// One line of the verification output.
#[derive(Clone, Debug, Serialize)]
pub struct Record {
    pub criterion: u8,
    pub check: &'static str,
    pub case: String,
    pub pass: bool,
    /// Nonnegative when the inequality holds.
    pub slack: f64,
    pub detail: Value,
}

#[derive(Serialize)]
struct CsvRecord<'a> {
    criterion: u8,
    check: &'a str,
    case: &'a str,
    pass: bool,
    slack: f64,
    detail: String,
}

#[derive(Clone, Debug, Serialize)]
pub struct Summary {
    pub check: &'static str,
    pub pass: bool,
    pub records: usize,
    pub failures: usize,
    pub failed_criteria: Vec<u8>,
    /// Smallest `α` for which every lower-bound point holds.
    pub alpha_calibrated: f64,
    pub alpha_used: f64,
    /// Largest empirical constant of the moment growth inequality.
    pub max_c_hat: f64,
    pub mc_coverage: f64,
    pub seed: u64,
    pub samples: u64,
    pub workers: usize,
}

#[derive(Clone, Debug)]
pub struct Outcome {
    pub records: Vec<Record>,
    pub summary: Summary,
}

impl Outcome {
    /// `(criterion, passed, record count)` for criteria 1 to 9.
    pub fn by_criterion(&self) -> Vec<(u8, bool, usize)> {
        (1..=9)
            .map(|c| {
                let rs: Vec<&Record> = self.records.iter().filter(|r| r.criterion == c).collect();
                (c, !rs.is_empty() && rs.iter().all(|r| r.pass), rs.len())
            })
            .collect()
    }

    pub fn write(&self, sink: &mut Sink) -> Result<()> {
        for r in &self.records {
            let row = CsvRecord {
                criterion: r.criterion,
                check: r.check,
                case: &r.case,
                pass: r.pass,
                slack: r.slack,
                detail: serde_json::to_string(&r.detail)?,
            };
            sink.emit(r, &row)?;
        }
        let s = &self.summary;
        let row = CsvRecord {
            criterion: 0,
            check: s.check,
            case: "all",
            pass: s.pass,
            slack: 0.0,
            detail: serde_json::to_string(s)?,
        };
        sink.emit(s, &row)
    }
}

struct Suite {
    records: Vec<Record>,
}

impl Suite {
    fn push(
        &mut self,
        criterion: u8,
        check: &'static str,
        case: String,
        slack: f64,
        pass: bool,
        detail: Value,
    ) {
        self.records.push(Record {
            criterion,
            check,
            case,
            pass,
            slack,
            detail,
        });
    }
}

/// Runs every check; `mc` drives the Monte Carlo parts.
pub fn run(config: &TailConfig, mc: McConfig) -> Result<Outcome> {
    run_selected(config, mc, &ALL_CRITERIA)
}

pub const ALL_CRITERIA: [u8; 9] = [1, 2, 3, 4, 5, 6, 7, 8, 9];

/// Runs the checks of the listed criteria only.
pub fn run_selected(config: &TailConfig, mc: McConfig, criteria: &[u8]) -> Result<Outcome> {
    let oracle = Oracle::Auto(mc);
    let symmetric = corpus::symmetric();
    let nonnegative = corpus::nonnegative();
    let mut suite = Suite {
        records: Vec::new(),
    };
    let want = |c: u8| criteria.contains(&c);

    if want(1) {
        constants(&mut suite);
    }
    if want(2) {
        closed_forms(&mut suite)?;
    }
    if want(3) {
        sandwiches(&mut suite, 3, &symmetric, &SYMMETRIC_ORDERS, &oracle)?;
    }
    if want(4) {
        sandwiches(&mut suite, 4, &nonnegative, &NONNEGATIVE_ORDERS, &oracle)?;
    }
    let alpha_calibrated = if want(5) || want(6) {
        tails(&mut suite, &symmetric, config, &oracle)?
    } else {
        f64::NAN
    };
    if want(7) {
        max_tails(&mut suite, symmetric.iter().chain(&nonnegative))?;
    }
    let max_c_hat = if want(8) {
        auxiliary(&mut suite, &symmetric, &nonnegative, &oracle, mc)?
    } else {
        f64::NAN
    };
    let mc_coverage = if want(9) {
        determinism(&mut suite, mc)?
    } else {
        f64::NAN
    };
    suite.records.retain(|r| want(r.criterion));

    let failures: Vec<&Record> = suite.records.iter().filter(|r| !r.pass).collect();
    let mut failed_criteria: Vec<u8> = failures.iter().map(|r| r.criterion).collect();
    failed_criteria.dedup();
    let summary = Summary {
        check: "summary",
        pass: failures.is_empty(),
        records: suite.records.len(),
        failures: failures.len(),
        failed_criteria,
        alpha_calibrated,
        alpha_used: config.constants.alpha,
        max_c_hat,
        mc_coverage,
        seed: mc.seed,
        samples: mc.samples,
        workers: mc.workers,
    };
    Ok(Outcome {
        records: suite.records,
        summary,
    })
}

fn constants(suite: &mut Suite) {
    let k = kappa();
    let f_k = f_series(k).unwrap_or(f64::NAN);
    let residual = (f_k - std::f64::consts::E).abs();
    let slack = (1e-10 - residual)
        .min(k - 0.1539)
        .min(0.1559 - k)
        .min(LATALA_LOWER_CONSTANT - 0.1152)
        .min(0.1172 - LATALA_LOWER_CONSTANT);
    suite.push(
        1,
        "constants",
        "kappa".into(),
        slack,
        slack >= 0.0,
        json!({
            "kappa": k,
            "f_of_kappa": f_k,
            "f_residual": residual,
            "latala_constant": LATALA_LOWER_CONSTANT,
            "ratio": k / LATALA_LOWER_CONSTANT,
        }),
    );
}

fn closed_forms(suite: &mut Suite) -> Result<()> {
    const TOL: f64 = 1e-7;
    for a in [0.5, 1.0, 3.0] {
        let seq = SummandSequence::iid(Marginal::point_mass(a)?, 1)?;
        let got = latala_norm(&seq, 2.0, DEFAULT_REL_TOL)?.lambda_star;
        let want = a / (std::f64::consts::E - 1.0);
        let rel = (got / want - 1.0).abs();
        suite.push(
            2,
            "closed_form",
            format!("point_mass_{a}"),
            TOL - rel,
            rel <= TOL,
            json!({"lambda_star": got, "expected": want, "rel_err": rel}),
        );
    }
    for n in [1usize, 2, 4, 16] {
        let seq = SummandSequence::iid(Marginal::rademacher(1.0)?, n)?;
        let got = latala_norm(&seq, 2.0, DEFAULT_REL_TOL)?.lambda_star;
        let want = (2.0 / n as f64).exp_m1().powf(-0.5);
        let rel = (got / want - 1.0).abs();
        suite.push(
            2,
            "closed_form",
            format!("rademacher_n{n}_p2"),
            TOL - rel,
            rel <= TOL,
            json!({"lambda_star": got, "expected": want, "rel_err": rel}),
        );
    }
    Ok(())
}

fn sandwiches(
    suite: &mut Suite,
    criterion: u8,
    members: &[Member],
    orders: &[f64],
    oracle: &Oracle,
) -> Result<()> {
    let mut tighter = Vec::new();
    for m in members {
        let norms = norms_over_grid(&m.seq, orders, oracle)?;
        for (&p, norm) in orders.iter().zip(norms) {
            let r = sandwich_check(&m.seq, p, norm)?;
            if r.kappa_tighter() {
                tighter.push(format!("{}@p={p}", m.name));
            }
            suite.push(
                criterion,
                "sandwich",
                format!("{}@p={p}", m.name),
                r.lower_slack.min(r.upper_slack),
                r.pass,
                serde_json::to_value(&r)?,
            );
        }
    }
    if criterion == 4 {
        suite.push(
            4,
            "kappa_tighter",
            "corpus".into(),
            tighter.len() as f64,
            !tighter.is_empty(),
            json!({ "points": tighter }),
        );
    }
    Ok(())
}

/// Criteria 5 and 6; returns the calibrated `α`.
fn tails(
    suite: &mut Suite,
    symmetric: &[Member],
    config: &TailConfig,
    oracle: &Oracle,
) -> Result<f64> {
    let mut alpha = 0.0f64;
    let mut worst = String::new();
    for m in symmetric {
        for t in corpus::t_grid(&m.seq) {
            let c = tail_check(&m.seq, t, config, oracle)?;
            let case = format!("{}@t={t}", m.name);
            if let Some(a) = c.alpha_required {
                if a > alpha {
                    alpha = a;
                    worst = case.clone();
                }
            }
            let detail = serde_json::to_value(&c)?;
            if c.small_t {
                suite.push(
                    6,
                    "small_t_lower",
                    case,
                    c.lower_slack,
                    c.lower_pass,
                    detail,
                );
            } else {
                suite.push(
                    5,
                    "tail_upper",
                    case.clone(),
                    c.upper_slack,
                    c.upper_pass,
                    detail.clone(),
                );
                suite.push(6, "tail_lower", case, c.lower_slack, c.lower_pass, detail);
            }
        }
    }
    suite.push(
        6,
        "alpha_calibration",
        "corpus".into(),
        config.constants.alpha - alpha,
        alpha.is_finite(),
        json!({ "alpha_calibrated": alpha, "alpha_used": config.constants.alpha, "binding_case": worst }),
    );
    Ok(alpha)
}

fn max_tails<'a>(suite: &mut Suite, members: impl Iterator<Item = &'a Member>) -> Result<()> {
    for m in members {
        for u in corpus::u_grid(&m.seq) {
            let r = max_tail_check(&m.seq, u)?;
            suite.push(
                7,
                "max_tail",
                format!("{}@u={u}", m.name),
                r.slack,
                r.pass,
                serde_json::to_value(&r)?,
            );
        }
    }
    Ok(())
}

/// Criterion 8; returns the largest empirical growth constant.
fn auxiliary(
    suite: &mut Suite,
    symmetric: &[Member],
    nonnegative: &[Member],
    oracle: &Oracle,
    mc: McConfig,
) -> Result<f64> {
    let mut max_c_hat = 0.0f64;
    for m in symmetric {
        let sigma = m.seq.l2_norm()?;
        for mult in [0.25, 0.5, 1.0, 2.0] {
            let t = mult * sigma;
            let r = levy_check(&m.seq, t, oracle)?;
            let slack = r.slack_max.min(r.slack_truncated);
            suite.push(
                8,
                "levy",
                format!("{}@t={t}", m.name),
                slack,
                r.pass,
                serde_json::to_value(&r)?,
            );
        }
        let law = exact_sum_distribution(&m.seq)?;
        for theta in [0.1, 0.5, 0.9] {
            let r = paley_zygmund_check(&law, theta)?;
            suite.push(
                8,
                "paley_zygmund",
                format!("{}@theta={theta}", m.name),
                r.slack,
                r.pass,
                serde_json::to_value(&r)?,
            );
        }
        for t in corpus::t_grid(&m.seq) {
            for (p, q) in [(2.0, 2.0), (2.0, 4.0), (2.0, 8.0), (4.0, 8.0), (4.0, 16.0)] {
                let r = moment_growth_check(&m.seq, t, p, q, oracle)?;
                max_c_hat = max_c_hat.max(r.c_hat);
                let same_order_ok = p != q || r.c_hat <= 1.0 + 1e-12;
                let pass = r.c_hat.is_finite() && same_order_ok;
                let slack = if p == q { 1.0 - r.c_hat } else { 0.0 };
                suite.push(
                    8,
                    "moment_growth",
                    format!("{}@t={t},p={p},q={q}", m.name),
                    slack,
                    pass,
                    serde_json::to_value(&r)?,
                );
            }
        }
    }
    suite.push(
        8,
        "moment_growth_max",
        "corpus".into(),
        0.0,
        max_c_hat.is_finite(),
        json!({ "max_c_hat": max_c_hat }),
    );

    let rad = Marginal::rademacher(1.0)?;
    let cases: Vec<(&str, Coefficients, Marginal, f64)> = vec![
        (
            "linear_ones_n8",
            Coefficients::Linear(vec![1.0; 8]),
            rad.clone(),
            4.0,
        ),
        (
            "linear_decay_n6",
            Coefficients::Linear((0..6).map(|k| (-(k as f64)).exp2()).collect()),
            rad.clone(),
            2.0,
        ),
        (
            "linear_zero_n3",
            Coefficients::Linear(vec![0.0; 3]),
            rad.clone(),
            2.0,
        ),
        (
            "linear_exponential_n5",
            Coefficients::Linear(vec![1.0, -2.0, 0.5, 1.5, 1.0]),
            Marginal::exponential(1.0)?,
            3.0,
        ),
        (
            "bilinear_ones_n4",
            Coefficients::Bilinear(off_diagonal(4, |_, _| 1.0)),
            rad.clone(),
            2.0,
        ),
        (
            "bilinear_ones_n4_p4",
            Coefficients::Bilinear(off_diagonal(4, |_, _| 1.0)),
            rad.clone(),
            4.0,
        ),
        (
            "bilinear_signed_n5",
            Coefficients::Bilinear(off_diagonal(
                5,
                |i, j| if (i + j) % 2 == 0 { 1.0 } else { -0.5 },
            )),
            rad.clone(),
            3.0,
        ),
        (
            "bilinear_three_point_n4",
            Coefficients::Bilinear(off_diagonal(4, |i, j| 1.0 / (1 + i + j) as f64)),
            Marginal::atoms(vec![(-1.0, 0.25), (0.0, 0.5), (1.0, 0.25)])?,
            2.0,
        ),
        (
            "bilinear_ones_n12",
            Coefficients::Bilinear(off_diagonal(12, |_, _| 1.0)),
            rad.clone(),
            2.0,
        ),
        (
            "bilinear_uniform_n6",
            Coefficients::Bilinear(off_diagonal(6, |i, j| (i as f64 - j as f64).abs())),
            Marginal::uniform_symmetric(1.0)?,
            2.0,
        ),
    ];
    for (name, coeffs, base, p) in cases {
        let r = decoupling_check(&coeffs, &base, p, &mc)?;
        suite.push(
            8,
            "decoupling",
            format!("{name}@p={p}"),
            r.slack,
            r.pass,
            serde_json::to_value(&r)?,
        );
    }

    for m in nonnegative {
        for p in [1.0, 2.0, 4.0] {
            let r = product_vs_sum_check(&m.seq, p, oracle, &mc)?;
            let slack = r
                .identity_rel_err
                .map_or(0.0, |e| crate::checks::IDENTITY_TOL - e);
            suite.push(
                8,
                "product_vs_sum",
                format!("{}@p={p}", m.name),
                slack,
                r.pass,
                serde_json::to_value(&r)?,
            );
        }
    }
    Ok(max_c_hat)
}

fn off_diagonal(n: usize, f: impl Fn(usize, usize) -> f64) -> Vec<Vec<f64>> {
    (0..n)
        .map(|i| (0..n).map(|j| if i == j { 0.0 } else { f(i, j) }).collect())
        .collect()
}

/// Criterion 9: repeat-run equality and interval coverage against the
/// exact two-Rademacher tail. Returns the observed coverage.
fn determinism(suite: &mut Suite, mc: McConfig) -> Result<f64> {
    let seq = SummandSequence::iid(Marginal::rademacher(1.0)?, 2)?;
    let stat = Statistic::Tail(0.5);
    let first = mc_estimate(&seq, stat, &mc)?;
    let second = mc_estimate(&seq, stat, &mc)?;
    let same = first.value.to_bits() == second.value.to_bits()
        && first.error_radius.to_bits() == second.error_radius.to_bits();
    suite.push(
        9,
        "repeatable",
        "rademacher_n2@t=0.5".into(),
        0.0,
        same,
        json!({ "first": first, "second": second }),
    );

    let exact = exact_sum_distribution(&seq)?.tail(0.5)?;
    let base = McConfig::new(COVERAGE_SAMPLES, mc.seed, mc.workers)?;
    let mut covered = 0u64;
    for trial in 0..COVERAGE_TRIALS {
        let e = mc_estimate(&seq, stat, &base.with_tag(0xC0_0000 + trial))?;
        covered += ((e.value - exact).abs() <= e.error_radius) as u64;
    }
    let coverage = covered as f64 / COVERAGE_TRIALS as f64;
    suite.push(
        9,
        "mc_coverage",
        "rademacher_n2@t=0.5".into(),
        coverage - COVERAGE_REQUIRED,
        coverage >= COVERAGE_REQUIRED,
        json!({
            "exact": exact,
            "trials": COVERAGE_TRIALS,
            "samples": COVERAGE_SAMPLES,
            "covered": covered,
            "coverage": coverage,
        }),
    );
    Ok(coverage)
}
