//! Numeric verification of the inequalities behind the bounds, each
//! returning a serializable report with its slack (nonnegative = holds).

use latala_core::latala::nonnegative_upper_constant;
use latala_core::tails::{small_t_threshold, P_T_TOL};
use latala_core::{
    latala_norm, moment_bounds, tail_bounds, ExactNormOracle, Marginal, MarginalNormOracle,
    NormOracle, Regime, SummandSequence, TailConfig, TailReport, DEFAULT_REL_TOL,
    LATALA_LOWER_CONSTANT,
};
use serde::Serialize;

use crate::error::{CliError, Result};
use crate::oracle::{
    run_workers, samplers, LogMoments, McConfig, McNormOracle, Method, Oracle, OracleEstimate,
    Statistic,
};

/// Floating-point allowance for comparisons between exact quantities.
pub const EXACT_SLACK: f64 = 1e-12;
/// Largest product space enumerated exactly.
pub const ENUMERATION_CAP: usize = 1_000_000;

fn require_symmetric(seq: &SummandSequence, what: &'static str) -> Result<()> {
    match seq.regime()? {
        Regime::Symmetric => Ok(()),
        Regime::Nonnegative => Err(latala_core::Error::UnsupportedRegime(what).into()),
    }
}

/// How `p_t` is solved.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PtMode {
    /// Norms of the truncated sum from the ground-truth oracle.
    Oracle,
    /// Norms replaced by the Orlicz norm of the truncated marginals.
    Marginal,
}

/// The `p_t` norm oracle selected for a run.
pub enum AnyNormOracle {
    Exact(ExactNormOracle),
    MonteCarlo(McNormOracle),
    Marginal(MarginalNormOracle),
}

impl NormOracle for AnyNormOracle {
    fn norm(&mut self, p: f64) -> latala_core::Result<f64> {
        match self {
            AnyNormOracle::Exact(o) => o.norm(p),
            AnyNormOracle::MonteCarlo(o) => o.norm(p),
            AnyNormOracle::Marginal(o) => o.norm(p),
        }
    }

    fn ess_sup(&self) -> Option<f64> {
        match self {
            AnyNormOracle::Exact(o) => o.ess_sup(),
            AnyNormOracle::MonteCarlo(o) => o.ess_sup(),
            AnyNormOracle::Marginal(o) => o.ess_sup(),
        }
    }
}

/// Builds the `p_t` norm oracle for a truncated sequence.
pub fn norm_oracle_for(
    truncated: &SummandSequence,
    oracle: &Oracle,
    mode: PtMode,
) -> latala_core::Result<AnyNormOracle> {
    if mode == PtMode::Marginal {
        return Ok(AnyNormOracle::Marginal(MarginalNormOracle::new(
            truncated.clone(),
        )));
    }
    if oracle.uses_exact(truncated) {
        Ok(AnyNormOracle::Exact(ExactNormOracle::new(truncated)?))
    } else {
        let cfg = oracle
            .mc_config()
            .ok_or(latala_core::Error::NotDiscrete)?
            .with_tag(0x7A11);
        Ok(AnyNormOracle::MonteCarlo(McNormOracle::new(
            truncated, &cfg,
        )))
    }
}

pub fn tail_report(
    seq: &SummandSequence,
    t: f64,
    config: &TailConfig,
    oracle: &Oracle,
    mode: PtMode,
) -> Result<TailReport> {
    Ok(tail_bounds(seq, t, config, |tr| {
        norm_oracle_for(tr, oracle, mode)
    })?)
}

#[derive(Clone, Debug, Serialize)]
pub struct SandwichReport {
    pub p: f64,
    pub regime: &'static str,
    pub lambda_star: f64,
    pub lower: f64,
    pub upper: f64,
    pub norm: OracleEstimate,
    /// `(e−1)/(2e²)·λ*`, for comparison with κ·λ* in the nonnegative case.
    pub latala_lower: f64,
    pub lower_slack: f64,
    pub upper_slack: f64,
    pub pass: bool,
}

impl SandwichReport {
    /// The κ lower bound is a strictly better valid bound than the
    /// `(e−1)/(2e²)` one at this point.
    pub fn kappa_tighter(&self) -> bool {
        self.regime == "nonnegative"
            && self.lower > self.latala_lower + EXACT_SLACK
            && self.lower <= self.norm.hi()
    }
}

/// `lower ≤ ‖S‖_p ≤ upper` with the regime's constants.
pub fn sandwich_check(
    seq: &SummandSequence,
    p: f64,
    norm: OracleEstimate,
) -> Result<SandwichReport> {
    let b = moment_bounds(seq, p)?;
    // The root lies in the solver's bracket, so each side is judged at the
    // end of the bracket that is least favourable to the bound.
    let (lo, hi) = latala_norm(seq, p, DEFAULT_REL_TOL)?.bracket;
    let tol = EXACT_SLACK * b.upper.max(1.0);
    let lower_slack = norm.hi() - b.lower_constant * lo;
    let upper_slack = b.upper_constant * hi - norm.lo();
    Ok(SandwichReport {
        p,
        regime: b.regime.name(),
        lambda_star: b.lambda_star,
        lower: b.lower,
        upper: b.upper,
        norm,
        latala_lower: LATALA_LOWER_CONSTANT * b.lambda_star,
        lower_slack,
        upper_slack,
        pass: lower_slack >= -tol && upper_slack >= -tol,
    })
}

/// `‖S‖_p` over a grid of `p`, sharing one Monte Carlo sample when the
/// oracle is stochastic.
pub fn norms_over_grid(
    seq: &SummandSequence,
    ps: &[f64],
    oracle: &Oracle,
) -> Result<Vec<OracleEstimate>> {
    if oracle.uses_exact(seq) {
        let law = latala_core::exact_sum_distribution(seq)?;
        ps.iter()
            .map(|&p| Ok(OracleEstimate::exact(law.lp_norm(p)?)))
            .collect()
    } else {
        let cfg = oracle.mc_config().ok_or(latala_core::Error::NotDiscrete)?;
        let mc = McNormOracle::new(seq, &cfg);
        Ok(ps.iter().map(|&p| mc.estimate(p, cfg.seed)).collect())
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct TailCheck {
    pub t: f64,
    pub small_t: bool,
    #[serde(serialize_with = "crate::report::ser_p_t")]
    pub p_t: Option<f64>,
    pub max_tail: f64,
    pub sum_tail_t: OracleEstimate,
    pub sum_tail_4t: OracleEstimate,
    pub lower_bound: f64,
    pub upper_bound: f64,
    pub lower_slack: f64,
    pub upper_slack: f64,
    /// Smallest `α` making the lower bound hold at this point (0 when any
    /// `α > 0` works, `None` when `p_t` is infinite or in the small-t regime).
    pub alpha_required: Option<f64>,
    pub resolved: bool,
    pub lower_pass: bool,
    pub upper_pass: bool,
}

/// Both tail bounds at `t` against the oracle's `P(|S_n| > t)` and
/// `P(|S_n| > 4t)`.
pub fn tail_check(
    seq: &SummandSequence,
    t: f64,
    config: &TailConfig,
    oracle: &Oracle,
) -> Result<TailCheck> {
    let report = tail_report(seq, t, config, oracle, PtMode::Oracle)?;
    let sum_tail_t = oracle.estimate(seq, Statistic::Tail(t))?;
    let sum_tail_4t = oracle.estimate(seq, Statistic::Tail(4.0 * t))?;
    let k = config.constants;
    let star = report.max_tail.exact.unwrap_or(report.max_tail.upper);
    let resolved = sum_tail_t.is_resolved_probability() && sum_tail_4t.is_resolved_probability();

    let (lower_slack, upper_slack, alpha_required) = if report.small_t_regime {
        (sum_tail_t.hi() - k.c_lower, f64::INFINITY, None)
    } else {
        let pt = report.p_t.unwrap_or(f64::INFINITY);
        // p_t is the upper end of a bracket of width P_T_TOL around the root.
        let upper = k.c_upper * (star + (-k.delta * (pt - P_T_TOL)).exp());
        let upper_slack = upper - sum_tail_4t.lo();
        let lower_slack = sum_tail_t.hi() - report.lower_bound;
        let alpha_required = pt.is_finite().then(|| {
            let room = sum_tail_t.value / k.c_lower - star;
            if room >= 1.0 {
                0.0
            } else if room <= 0.0 {
                f64::INFINITY
            } else {
                -room.ln() / pt
            }
        });
        (lower_slack, upper_slack, alpha_required)
    };
    Ok(TailCheck {
        t,
        small_t: report.small_t_regime,
        p_t: report.p_t,
        max_tail: star,
        sum_tail_t,
        sum_tail_4t,
        lower_bound: report.lower_bound,
        upper_bound: report.upper_bound,
        lower_slack,
        upper_slack,
        alpha_required,
        resolved,
        lower_pass: !resolved || lower_slack >= -EXACT_SLACK,
        upper_pass: !resolved || upper_slack >= -EXACT_SLACK,
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct MaxTailCheck {
    pub u: f64,
    pub lower: f64,
    pub exact: f64,
    pub upper: f64,
    pub slack: f64,
    pub pass: bool,
}

/// `T/(1+T) ≤ P(X_n^* > u) ≤ 2T/(1+T)` with the exact product formula.
pub fn max_tail_check(seq: &SummandSequence, u: f64) -> Result<MaxTailCheck> {
    let b = latala_core::max_tail_bounds(seq, u)?;
    let exact = b.exact.unwrap_or(f64::NAN);
    let slack = (exact - b.lower).min(b.upper - exact);
    Ok(MaxTailCheck {
        u,
        lower: b.lower,
        exact,
        upper: b.upper,
        slack,
        pass: slack >= -EXACT_SLACK,
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct LevyReport {
    pub t: f64,
    pub max_tail: OracleEstimate,
    pub sum_tail: OracleEstimate,
    pub truncated_tail: OracleEstimate,
    /// `2P(|S_n| > t) − P(X_n^* > t)`, widened by the oracle radii.
    pub slack_max: f64,
    /// `2P(|S_n| > t) − P(|s_n| > t)`, widened by the oracle radii.
    pub slack_truncated: f64,
    pub pass: bool,
}

/// `P(X_n^* > t) ≤ 2P(|S_n| > t)` and `P(|s_n| > t) ≤ 2P(|S_n| > t)`.
pub fn levy_check(seq: &SummandSequence, t: f64, oracle: &Oracle) -> Result<LevyReport> {
    require_symmetric(seq, "levy_check needs symmetric summands")?;
    let max_tail = oracle.estimate(seq, Statistic::MaxTail(t))?;
    let sum_tail = oracle.estimate(seq, Statistic::Tail(t))?;
    let truncated_tail = oracle.estimate(&seq.truncated(t)?, Statistic::Tail(t))?;
    let twice = 2.0 * sum_tail.hi();
    let slack_max = twice - max_tail.lo();
    let slack_truncated = twice - truncated_tail.lo();
    Ok(LevyReport {
        t,
        max_tail,
        sum_tail,
        truncated_tail,
        slack_max,
        slack_truncated,
        pass: slack_max >= -EXACT_SLACK && slack_truncated >= -EXACT_SLACK,
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct PaleyZygmundCheck {
    pub theta: f64,
    pub mean: f64,
    pub second_moment: f64,
    pub bound: f64,
    pub exact: f64,
    pub slack: f64,
    pub pass: bool,
}

/// Compares the Paley–Zygmund bound for `Z = |S|^2` against the exact
/// `P(Z > θ·EZ)` of a discrete law of `S`.
pub fn paley_zygmund_check(law_of_s: &Marginal, theta: f64) -> Result<PaleyZygmundCheck> {
    let mean = law_of_s.abs_moment(2.0)?;
    let second_moment = law_of_s.abs_moment(4.0)?;
    let bound = latala_core::paley_zygmund(mean, second_moment, theta)?;
    // P(S² > θ·ES²) = P(|S| > √(θ·ES²))
    let exact = law_of_s.tail((theta * mean).sqrt())?;
    Ok(PaleyZygmundCheck {
        theta,
        mean,
        second_moment,
        bound,
        exact,
        slack: exact - bound,
        pass: exact - bound >= -EXACT_SLACK,
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct GrowthReport {
    pub t: f64,
    pub p: f64,
    pub q: f64,
    pub norm_p: OracleEstimate,
    pub norm_q: OracleEstimate,
    /// `‖s_n‖_q / ((q/p)(‖s_n‖_p + t))`.
    pub c_hat: f64,
}

/// Empirical constant of `‖s_n‖_q ≤ C(q/p)(‖s_n‖_p + t)` for the sum
/// truncated at `t`.
pub fn moment_growth_check(
    seq: &SummandSequence,
    t: f64,
    p: f64,
    q: f64,
    oracle: &Oracle,
) -> Result<GrowthReport> {
    require_symmetric(seq, "moment_growth_check needs symmetric summands")?;
    if !(p >= 1.0) {
        return Err(latala_core::Error::OrderTooSmall { p, min: 1.0 }.into());
    }
    if q < p {
        return Err(CliError::Usage(format!(
            "moment_growth_check needs q >= p, got p={p} q={q}"
        )));
    }
    let truncated = seq.truncated(t)?;
    let norms = norms_over_grid(&truncated, &[p, q], oracle)?;
    let (norm_p, norm_q) = (norms[0], norms[1]);
    let denom = (q / p) * (norm_p.value + t);
    Ok(GrowthReport {
        t,
        p,
        q,
        norm_p,
        norm_q,
        c_hat: if denom > 0.0 {
            norm_q.value / denom
        } else {
            0.0
        },
    })
}

/// Coefficients of a decoupled form.
#[derive(Clone, Debug, PartialEq)]
pub enum Coefficients {
    /// `Σ a_i X_i` (k = 1).
    Linear(Vec<f64>),
    /// `Σ_{i≠j} f_ij X_i X_j` (k = 2); the diagonal must vanish.
    Bilinear(Vec<Vec<f64>>),
}

impl Coefficients {
    pub fn order(&self) -> u32 {
        match self {
            Coefficients::Linear(_) => 1,
            Coefficients::Bilinear(_) => 2,
        }
    }

    pub fn len(&self) -> usize {
        match self {
            Coefficients::Linear(a) => a.len(),
            Coefficients::Bilinear(f) => f.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    fn validate(&self) -> Result<()> {
        if self.is_empty() {
            return Err(CliError::Usage(
                "decoupling needs at least one coefficient".into(),
            ));
        }
        if let Coefficients::Bilinear(f) = self {
            let n = f.len();
            if f.iter().any(|row| row.len() != n) {
                return Err(CliError::Usage(
                    "k = 2 coefficients must form a square matrix".into(),
                ));
            }
            if (0..n).any(|i| f[i][i] != 0.0) {
                return Err(CliError::Usage(
                    "k = 2 coefficients must vanish on the diagonal (indices distinct)".into(),
                ));
            }
        }
        Ok(())
    }

    /// The coupled form evaluated at `x`, or the decoupled one at `(x, y)`.
    fn eval(&self, x: &[f64], y: Option<&[f64]>) -> f64 {
        match self {
            Coefficients::Linear(a) => {
                let v = y.unwrap_or(x);
                a.iter().zip(v).map(|(a, v)| a * v).sum()
            }
            Coefficients::Bilinear(f) => {
                let second = y.unwrap_or(x);
                let mut s = 0.0;
                for (i, row) in f.iter().enumerate() {
                    for (j, c) in row.iter().enumerate() {
                        if *c != 0.0 {
                            s += c * x[i] * second[j];
                        }
                    }
                }
                s
            }
        }
    }
}

/// `‖f(X_1, …, X_m)‖_p` by enumerating the product of finite supports.
pub fn enumerate_lp_norm<F>(supports: &[Vec<(f64, f64)>], f: F, p: f64) -> f64
where
    F: Fn(&[f64]) -> f64,
{
    let mut idx = vec![0usize; supports.len()];
    let mut point: Vec<f64> = supports.iter().map(|s| s[0].0).collect();
    let mut terms: Vec<f64> = Vec::new();
    loop {
        let log_prob: f64 = idx.iter().zip(supports).map(|(&i, s)| s[i].1.ln()).sum();
        let v = f(&point).abs();
        if v > 0.0 {
            terms.push(log_prob + p * v.ln());
        }
        // odometer
        let mut k = 0;
        loop {
            if k == supports.len() {
                let max = terms.iter().copied().fold(f64::NEG_INFINITY, f64::max);
                if max == f64::NEG_INFINITY {
                    return 0.0;
                }
                let sum: f64 = terms.iter().map(|&l| (l - max).exp()).sum();
                return ((max + sum.ln()) / p).exp();
            }
            idx[k] += 1;
            if idx[k] < supports[k].len() {
                point[k] = supports[k][idx[k]].0;
                break;
            }
            idx[k] = 0;
            point[k] = supports[k][0].0;
            k += 1;
        }
    }
}

fn pattern_count(support_len: usize, slots: usize) -> Option<usize> {
    let mut total: usize = 1;
    for _ in 0..slots {
        total = total.checked_mul(support_len)?;
    }
    Some(total)
}

#[derive(Clone, Debug, Serialize)]
pub struct DecouplingReport {
    pub k: u32,
    pub n: usize,
    pub p: f64,
    pub lhs: OracleEstimate,
    pub rhs: OracleEstimate,
    /// `(2k+1)^k`.
    pub constant: f64,
    pub ratio: f64,
    pub slack: f64,
    pub pass: bool,
}

/// `‖Σ f X_{i1}⋯X_{ik}‖_p ≤ (2k+1)^k ‖Σ f X^{(1)}_{i1}⋯X^{(k)}_{ik}‖_p`
/// for `k ∈ {1, 2}`, exactly when the product space is small enough and by
/// Monte Carlo otherwise.
pub fn decoupling_check(
    coeffs: &Coefficients,
    base: &Marginal,
    p: f64,
    mc: &McConfig,
) -> Result<DecouplingReport> {
    coeffs.validate()?;
    if !(p >= 1.0) {
        return Err(latala_core::Error::OrderTooSmall { p, min: 1.0 }.into());
    }
    let k = coeffs.order();
    let n = coeffs.len();
    let constant = f64::from((2 * k + 1).pow(k));

    let exact_support = base
        .support()
        .filter(|s| pattern_count(s.len(), k as usize * n).is_some_and(|c| c <= ENUMERATION_CAP));
    let (lhs, rhs) = if let Some(support) = exact_support {
        let coupled = vec![support.clone(); n];
        let lhs = enumerate_lp_norm(&coupled, |x| coeffs.eval(x, None), p);
        let decoupled = vec![support; k as usize * n];
        let rhs = enumerate_lp_norm(
            &decoupled,
            |xy| {
                if k == 1 {
                    coeffs.eval(xy, None)
                } else {
                    coeffs.eval(&xy[..n], Some(&xy[n..]))
                }
            },
            p,
        );
        (OracleEstimate::exact(lhs), OracleEstimate::exact(rhs))
    } else {
        let draw = base.sampler();
        let estimate = |cfg: McConfig, decoupled: bool| {
            let parts = run_workers(&cfg, |rng, count| {
                let mut acc = LogMoments::default();
                let mut x = vec![0.0; n];
                let mut y = vec![0.0; n];
                for _ in 0..count {
                    x.iter_mut().for_each(|v| *v = draw.sample(rng));
                    let v = if decoupled && k == 2 {
                        y.iter_mut().for_each(|v| *v = draw.sample(rng));
                        coeffs.eval(&x, Some(&y))
                    } else {
                        coeffs.eval(&x, None)
                    };
                    acc.push(p * v.abs().ln());
                }
                acc
            });
            let mut acc = LogMoments::default();
            parts.iter().for_each(|a| acc.merge(a));
            let (value, error_radius) = acc.p_norm(p);
            OracleEstimate {
                value,
                method: Method::MonteCarlo,
                error_radius,
                samples: Some(cfg.samples),
                seed: Some(cfg.seed),
            }
        };
        (
            estimate(mc.with_tag(0xD1), false),
            estimate(mc.with_tag(0xD2), true),
        )
    };
    let ratio = if rhs.value > 0.0 {
        lhs.value / rhs.value
    } else if lhs.value == 0.0 {
        0.0
    } else {
        f64::INFINITY
    };
    let slack = constant * rhs.hi() - lhs.lo();
    Ok(DecouplingReport {
        k,
        n,
        p,
        lhs,
        rhs,
        constant,
        ratio,
        slack,
        pass: slack >= -EXACT_SLACK,
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct ProductSumReport {
    pub p: f64,
    pub pointwise_samples: u64,
    pub pointwise_violations: u64,
    /// `∏ E|1 + X_n|^p` (log).
    pub identity_log_lhs: Option<f64>,
    /// `E ∏(1 + X_n)^p` by enumeration (log).
    pub identity_log_rhs: Option<f64>,
    pub identity_rel_err: Option<f64>,
    pub lambda_star: f64,
    pub norm: OracleEstimate,
    /// `‖S‖_p / λ*`.
    pub scaled_norm: f64,
    /// `(e^p − 1)^{1/p}`.
    pub upper_constant: f64,
    pub pass: bool,
}

/// Relative tolerance for the product identity.
pub const IDENTITY_TOL: f64 = 1e-12;

/// Pointwise `1 + ΣX_n ≤ ∏(1 + X_n)`, the identity
/// `∏E|1+X_n|^p = ‖∏(1+X_n)‖_p^p`, and `‖S/λ*‖_p ≤ (e^p − 1)^{1/p}`.
pub fn product_vs_sum_check(
    seq: &SummandSequence,
    p: f64,
    oracle: &Oracle,
    mc: &McConfig,
) -> Result<ProductSumReport> {
    if seq.regime()? != Regime::Nonnegative && !seq.is_all_zero() {
        return Err(latala_core::Error::UnsupportedRegime(
            "product_vs_sum_check needs nonnegative summands",
        )
        .into());
    }
    let draws = samplers(seq);
    let violations: u64 = run_workers(&mc.with_tag(0xB5), |rng, count| {
        let mut bad = 0u64;
        for _ in 0..count {
            let (mut sum, mut prod) = (1.0f64, 1.0f64);
            for d in &draws {
                let x = d.sample(rng);
                sum += x;
                prod *= 1.0 + x;
            }
            bad += (sum > prod * (1.0 + 1e-12)) as u64;
        }
        bad
    })
    .into_iter()
    .sum();

    let supports: Option<Vec<Vec<(f64, f64)>>> =
        seq.iter_expanded().map(Marginal::support).collect();
    let identity = supports
        .filter(|s| {
            s.iter()
                .try_fold(1usize, |acc, v| acc.checked_mul(v.len()))
                .is_some_and(|c| c <= ENUMERATION_CAP)
        })
        .map(|supports| -> Result<(f64, f64)> {
            let lhs = seq.entries().iter().try_fold(0.0, |acc, e| {
                Ok::<f64, latala_core::Error>(
                    acc + e.count as f64 * e.marginal.log_orlicz_term(1.0, p)?,
                )
            })?;
            let rhs_norm = enumerate_lp_norm(&supports, |x| x.iter().map(|v| 1.0 + v).product(), p);
            Ok((lhs, p * rhs_norm.ln()))
        })
        .transpose()?;
    let identity_rel_err = identity.map(|(l, r)| (l - r).exp_m1().abs());

    let solved = latala_norm(seq, p, DEFAULT_REL_TOL)?;
    let lambda_star = solved.lambda_star;
    let norm = norms_over_grid(seq, &[p], oracle)?[0];
    let upper_constant = nonnegative_upper_constant(p);
    let scaled_norm = if lambda_star > 0.0 {
        norm.value / lambda_star
    } else {
        0.0
    };
    let scaled_ok = norm.lo() <= upper_constant * solved.bracket.1 * (1.0 + EXACT_SLACK);
    let pass = violations == 0 && identity_rel_err.is_none_or(|e| e <= IDENTITY_TOL) && scaled_ok;
    Ok(ProductSumReport {
        p,
        pointwise_samples: mc.samples,
        pointwise_violations: violations,
        identity_log_lhs: identity.map(|x| x.0),
        identity_log_rhs: identity.map(|x| x.1),
        identity_rel_err,
        lambda_star,
        norm,
        scaled_norm,
        upper_constant,
        pass,
    })
}

/// `½‖s_n‖_2` at level `t`.
pub fn small_t_level(seq: &SummandSequence, t: f64) -> Result<f64> {
    Ok(small_t_threshold(seq, t)?)
}
