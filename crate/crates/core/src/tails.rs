//! Two-sided tail bounds for `S_n` from the moment level `p_t` of the
//! truncated sum `s_n = Σ X_i·1{|X_i| ≤ t}`, plus the maximum-tail
//! sandwich and the Paley–Zygmund bound.
//!
//! For symmetric summands and `t ≥ ½‖s_n‖_2`:
//!
//! ```text
//! P(|S_n| > t)  ≥ c·(P(X_n^* > t) + exp(−α·p_t))
//! P(|S_n| > 4t) ≤ C·(P(X_n^* > t) + exp(−δ·p_t))
//! ```
//!
//! and for `t ≤ ½‖s_n‖_2` the tail `P(|S_n| > t)` is bounded below by a
//! constant. The defaults `c = 1/4`, `C = 1`, `δ = ln 2` follow from the
//! Lévy/contraction and Chebyshev steps. `α` has no closed form; its default
//! is the corpus-calibrated value reported by `latala verify`.

use crate::distributions::{Regime, SummandSequence};
use crate::error::{Error, Result};
use crate::latala::{latala_norm, DEFAULT_REL_TOL};
use crate::math::{exp, exp_m1, ln_1p};

/// Default upper end of the `p_t` search; beyond it `exp(−δp)` underflows
/// any tail of interest and `p_t` is reported as infinite.
pub const DEFAULT_P_MAX: f64 = 200.0;
/// Absolute tolerance of the `p_t` bisection.
pub const P_T_TOL: f64 = 1e-6;
/// Corpus-calibrated default for `α`, rounded up from the value reported
/// by `latala verify`.
pub const DEFAULT_ALPHA: f64 = 1.0;

/// `p ↦ ‖s_n‖_p` for a fixed truncated sum.
pub trait NormOracle {
    /// `‖s_n‖_p`; must be continuous and nondecreasing in `p`.
    fn norm(&mut self, p: f64) -> Result<f64>;

    /// `‖s_n‖_∞` when known.
    fn ess_sup(&self) -> Option<f64> {
        None
    }
}

impl<F> NormOracle for F
where
    F: FnMut(f64) -> Result<f64>,
{
    fn norm(&mut self, p: f64) -> Result<f64> {
        self(p)
    }
}

/// Surrogate `‖s_n‖_p ≈ |||(Y_i)|||_p` computed from the marginals alone.
///
/// The Orlicz norm is within the constants `0.1162` and `e` of the true
/// norm, so the solved `p_t` is an approximation whose quality depends on
/// how tight those constants are for the sequence at hand.
#[derive(Clone, Debug)]
pub struct MarginalNormOracle {
    truncated: SummandSequence,
}

impl MarginalNormOracle {
    pub fn new(truncated: SummandSequence) -> Self {
        Self { truncated }
    }
}

impl NormOracle for MarginalNormOracle {
    fn norm(&mut self, p: f64) -> Result<f64> {
        Ok(latala_norm(&self.truncated, p, DEFAULT_REL_TOL)?.lambda_star)
    }

    fn ess_sup(&self) -> Option<f64> {
        Some(self.truncated.ess_sup_bound())
    }
}

/// `‖s_n‖_2` for the truncation level `t`, exact from the marginals.
pub fn truncated_l2_norm(seq: &SummandSequence, t: f64) -> Result<f64> {
    seq.truncated(t)?.l2_norm()
}

/// The least `p ∈ [p_min, p_max]` with `‖s_n‖_p ≥ 2t`, or `+∞` when even
/// `p_max` falls short.
///
/// `p_min` is 2 for symmetric and 1 for nonnegative sequences. `oracle`
/// evaluates the truncated sum of `seq` at level `t`. Fails with
/// [`Error::BelowSmallT`] when `t < ½‖s_n‖_2`.
pub fn p_t(seq: &SummandSequence, t: f64, oracle: &mut dyn NormOracle, p_max: f64) -> Result<f64> {
    if !(t > 0.0 && t.is_finite()) {
        return Err(Error::InvalidThreshold(t));
    }
    let p_min = seq.regime()?.min_order();
    if !(p_max > p_min) {
        return Err(Error::OrderTooSmall {
            p: p_max,
            min: p_min,
        });
    }
    let threshold = 0.5 * truncated_l2_norm(seq, t)?;
    if t < threshold {
        return Err(Error::BelowSmallT { t, threshold });
    }
    let target = 2.0 * t;
    let mut reaches = |p: f64| -> Result<bool> {
        let v = oracle.norm(p)?;
        if v.is_nan() {
            return Err(Error::Oracle(alloc::format!("norm at p = {p} is NaN")));
        }
        Ok(v >= target)
    };
    if reaches(p_min)? {
        return Ok(p_min);
    }
    if !reaches(p_max)? {
        return Ok(f64::INFINITY);
    }
    let (mut lo, mut hi) = (p_min, p_max);
    while hi - lo > P_T_TOL {
        let mid = 0.5 * (lo + hi);
        if reaches(mid)? {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(hi)
}

/// The constants `c`, `C`, `α`, `δ` of the two-sided tail bound.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BoundConstants {
    pub c_lower: f64,
    pub c_upper: f64,
    pub alpha: f64,
    pub delta: f64,
}

impl Default for BoundConstants {
    fn default() -> Self {
        Self {
            c_lower: 0.25,
            c_upper: 1.0,
            alpha: DEFAULT_ALPHA,
            delta: core::f64::consts::LN_2,
        }
    }
}

impl BoundConstants {
    fn validate(&self) -> Result<()> {
        let ok = self.c_lower > 0.0
            && self.c_lower <= 1.0
            && self.c_upper >= 1.0
            && self.c_upper.is_finite()
            && self.alpha > 0.0
            && self.alpha.is_finite()
            && self.delta > 0.0
            && self.delta.is_finite();
        if ok {
            Ok(())
        } else {
            Err(Error::OutOfDomain {
                value: f64::NAN,
                domain: "c in (0,1], C >= 1, alpha > 0, delta > 0",
            })
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TailConfig {
    pub constants: BoundConstants,
    pub p_max: f64,
    /// Allow nonnegative sequences. The bounds are stated for symmetric
    /// summands; the same argument is expected to carry over but the
    /// constants are not checked for that case.
    pub allow_nonnegative: bool,
}

impl Default for TailConfig {
    fn default() -> Self {
        Self {
            constants: BoundConstants::default(),
            p_max: DEFAULT_P_MAX,
            allow_nonnegative: false,
        }
    }
}

/// `P(X_n^* > u)` bracketed from the marginal tails `q_i = P(|X_i| > u)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MaxTailBounds {
    /// `T/(1+T)` with `T = Σ q_i`.
    pub lower: f64,
    /// `min(1, 2T/(1+T))`.
    pub upper: f64,
    /// `1 − ∏(1 − q_i)`.
    pub exact: Option<f64>,
    pub tail_sum: f64,
}

pub fn max_tail_bounds(seq: &SummandSequence, u: f64) -> Result<MaxTailBounds> {
    if !(u >= 0.0) {
        return Err(Error::InvalidThreshold(u));
    }
    let mut tail_sum = 0.0;
    let mut log_none = 0.0;
    for e in seq.entries() {
        let q = e.marginal.tail(u)?;
        tail_sum += e.count as f64 * q;
        log_none += e.count as f64 * ln_1p(-q);
    }
    let exact = -exp_m1(log_none);
    Ok(MaxTailBounds {
        lower: tail_sum / (1.0 + tail_sum),
        upper: (2.0 * tail_sum / (1.0 + tail_sum)).min(1.0),
        exact: Some(exact.clamp(0.0, 1.0)),
        tail_sum,
    })
}

/// The two addends of each bound.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct BoundComponents {
    /// `c·P(X_n^* > t)`.
    pub lower_max_term: f64,
    /// `c·exp(−α·p_t)`.
    pub lower_exp_term: f64,
    /// `C·P(X_n^* > t)`.
    pub upper_max_term: f64,
    /// `C·exp(−δ·p_t)`.
    pub upper_exp_term: f64,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TailReport {
    pub t: f64,
    /// `None` in the small-t regime, `Some(+∞)` when `‖s_n‖_∞ ≤ 2t`.
    pub p_t: Option<f64>,
    pub max_tail: MaxTailBounds,
    /// Lower bound on `P(|S_n| > t)`.
    pub lower_bound: f64,
    /// Upper bound on `P(|S_n| > 4t)`; 1 in the small-t regime.
    pub upper_bound: f64,
    pub small_t_regime: bool,
    pub components: BoundComponents,
}

/// Tail bounds at level `t`.
///
/// `make_oracle` receives the truncated sequence `(X_i·1{|X_i| ≤ t})` and
/// returns the norm oracle used to solve for `p_t`; it is not called in the
/// small-t regime.
pub fn tail_bounds<F, O>(
    seq: &SummandSequence,
    t: f64,
    config: &TailConfig,
    make_oracle: F,
) -> Result<TailReport>
where
    F: FnOnce(&SummandSequence) -> Result<O>,
    O: NormOracle,
{
    if !(t > 0.0 && t.is_finite()) {
        return Err(Error::InvalidThreshold(t));
    }
    config.constants.validate()?;
    match seq.regime()? {
        Regime::Symmetric => {}
        Regime::Nonnegative if config.allow_nonnegative => {}
        Regime::Nonnegative => {
            return Err(Error::UnsupportedRegime(
                "tail bounds need symmetric summands (enable allow_nonnegative to override)",
            ))
        }
    }
    let k = config.constants;
    let max_tail = max_tail_bounds(seq, t)?;
    let truncated = seq.truncated(t)?;
    let l2 = truncated.l2_norm()?;
    if t <= 0.5 * l2 {
        return Ok(TailReport {
            t,
            p_t: None,
            max_tail,
            lower_bound: k.c_lower,
            upper_bound: 1.0,
            small_t_regime: true,
            components: BoundComponents::default(),
        });
    }
    let mut oracle = make_oracle(&truncated)?;
    let pt = p_t(seq, t, &mut oracle, config.p_max)?;
    let star = max_tail.exact.unwrap_or(max_tail.upper);
    let components = BoundComponents {
        lower_max_term: k.c_lower * star,
        lower_exp_term: k.c_lower * exp(-k.alpha * pt),
        upper_max_term: k.c_upper * star,
        upper_exp_term: k.c_upper * exp(-k.delta * pt),
    };
    Ok(TailReport {
        t,
        p_t: Some(pt),
        max_tail,
        lower_bound: (components.lower_max_term + components.lower_exp_term).min(1.0),
        upper_bound: (components.upper_max_term + components.upper_exp_term).min(1.0),
        small_t_regime: false,
        components,
    })
}

/// `P(Z > θ·EZ) ≥ (1 − θ)²(EZ)²/EZ²` for nonnegative `Z`.
pub fn paley_zygmund(mean: f64, second_moment: f64, theta: f64) -> Result<f64> {
    if !(theta > 0.0 && theta < 1.0) {
        return Err(Error::OutOfDomain {
            value: theta,
            domain: "(0, 1)",
        });
    }
    if !(mean >= 0.0 && mean.is_finite()) {
        return Err(Error::OutOfDomain {
            value: mean,
            domain: "mean >= 0",
        });
    }
    if mean == 0.0 {
        return Ok(0.0);
    }
    let mean_sq = mean * mean;
    if !(second_moment > 0.0) || second_moment < mean_sq * (1.0 - 1e-12) {
        return Err(Error::InconsistentMoments {
            second: second_moment,
            mean_sq,
        });
    }
    Ok(((1.0 - theta) * (1.0 - theta) * mean_sq / second_moment).clamp(0.0, 1.0))
}

/// The small-t chain `9‖s‖₂⁴ / (32·C⁴(‖s‖₂ + t)⁴)` for a given constant `C`
/// of the moment-growth inequality.
pub fn small_t_chain(l2: f64, t: f64, growth_constant: f64) -> f64 {
    let r = l2 / (growth_constant * (l2 + t));
    9.0 * r * r * r * r / 32.0
}

/// `½‖s_n‖_2`; at or below it the small-t clause applies.
pub fn small_t_threshold(seq: &SummandSequence, t: f64) -> Result<f64> {
    Ok(0.5 * truncated_l2_norm(seq, t)?)
}
