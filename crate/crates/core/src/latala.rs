//! The Orlicz norm `|||(X_k)|||_p`, the two-sided moment bounds built on
//! it, and the constant κ.

use core::sync::atomic::{AtomicU64, Ordering};

use crate::distributions::{Regime, SummandSequence};
use crate::error::{Error, Result};
use crate::math::{exp, exp_m1, ln, ln_1p, E};

/// Default relative tolerance of the norm bisection.
pub const DEFAULT_REL_TOL: f64 = 1e-9;
/// Absolute floor under the relative bracket width.
pub const ABS_FLOOR: f64 = 1e-30;
/// Cap on bracket doublings (and halvings).
pub const MAX_DOUBLINGS: u32 = 200;

/// Lower constant `(e−1)/(2e²)` of the symmetric moment sandwich.
pub const LATALA_LOWER_CONSTANT: f64 = (E - 1.0) / (2.0 * E * E);
/// Upper constant of the symmetric moment sandwich.
pub const SYMMETRIC_UPPER_CONSTANT: f64 = E;

/// Right end of the domain accepted by [`f_series`]; the series converges
/// for `x < 1/(2e) ≈ 0.18394` (ratio of consecutive terms → `2e·x`).
pub const F_SERIES_MAX_X: f64 = 0.18;

const KAPPA_TOL: f64 = 1e-12;
const F_SERIES_MAX_TERMS: u32 = 1_000_000;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct NormResult {
    /// `|||(X_k)|||_p`.
    pub lambda_star: f64,
    pub p: f64,
    /// Final bisection interval.
    pub bracket: (f64, f64),
    pub iterations: u32,
    /// `∏ E|1 + X_n/λ*|^p`; close to `e^p` unless the sequence is all zero.
    pub product_at_lambda: f64,
    /// Natural log of `product_at_lambda`, finite even when the product overflows.
    pub log_product_at_lambda: f64,
}

fn log_product(seq: &SummandSequence, lambda: f64, p: f64) -> Result<f64> {
    seq.entries().iter().try_fold(0.0, |acc, e| {
        Ok(acc + e.count as f64 * e.marginal.log_orlicz_term(lambda, p)?)
    })
}

/// `inf { λ > 0 : ∏_n E|1 + X_n/λ|^p ≤ e^p }`.
///
/// The product is evaluated as a sum of logarithms and is strictly
/// decreasing in `λ` for nondegenerate symmetric or nonnegative summands,
/// so plain bisection applies once a bracket is found by doubling/halving
/// from `Σ E|X_n| / (e − 1)`.
pub fn latala_norm(seq: &SummandSequence, p: f64, rel_tol: f64) -> Result<NormResult> {
    seq.regime()?;
    if !(p >= 1.0 && p.is_finite()) {
        return Err(Error::OrderTooSmall { p, min: 1.0 });
    }
    if !(1e-12..=1e-3).contains(&rel_tol) {
        return Err(Error::ToleranceOutOfRange(rel_tol));
    }
    if seq.is_all_zero() {
        return Ok(NormResult {
            lambda_star: 0.0,
            p,
            bracket: (0.0, 0.0),
            iterations: 0,
            product_at_lambda: 1.0,
            log_product_at_lambda: 0.0,
        });
    }

    let fits = |lambda: f64| -> Result<bool> { Ok(log_product(seq, lambda, p)? <= p) };

    let guess = seq.total_abs_mean()? / (E - 1.0) + ABS_FLOOR;
    let mut hi = guess;
    let mut steps = 0;
    while !fits(hi)? {
        hi *= 2.0;
        steps += 1;
        if steps > MAX_DOUBLINGS || !hi.is_finite() {
            return Err(Error::BracketExpansion(MAX_DOUBLINGS));
        }
    }
    let mut lo = if steps > 0 { hi / 2.0 } else { hi };
    steps = 0;
    while fits(lo)? {
        lo /= 2.0;
        steps += 1;
        if steps > MAX_DOUBLINGS {
            return Err(Error::BracketExpansion(MAX_DOUBLINGS));
        }
    }

    let mut iterations = 0;
    while hi - lo > rel_tol * (0.5 * (lo + hi)).max(ABS_FLOOR) {
        let mid = 0.5 * (lo + hi);
        if fits(mid)? {
            hi = mid;
        } else {
            lo = mid;
        }
        iterations += 1;
    }
    let lambda_star = 0.5 * (lo + hi);
    let log_prod = log_product(seq, lambda_star, p)?;
    Ok(NormResult {
        lambda_star,
        p,
        bracket: (lo, hi),
        iterations,
        product_at_lambda: exp(log_prod),
        log_product_at_lambda: log_prod,
    })
}

/// Constants and values of the two-sided bound `lower ≤ ‖S‖_p ≤ upper`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MomentBounds {
    pub lower: f64,
    pub upper: f64,
    pub regime: Regime,
    pub p: f64,
    pub lower_constant: f64,
    pub upper_constant: f64,
    pub lambda_star: f64,
}

/// `(e^p − 1)^{1/p}` without overflow for large `p`.
pub fn nonnegative_upper_constant(p: f64) -> f64 {
    // e · (1 − e^{−p})^{1/p}
    exp(1.0 + ln_1p(-exp(-p)) / p)
}

/// Two-sided bounds on `‖S‖_p` from the Orlicz norm.
///
/// Symmetric sequences need `p ≥ 2` and get `[(e−1)/(2e²)·λ*, e·λ*]`;
/// nonnegative ones need `p ≥ 1` and get `[κ·λ*, (e^p−1)^{1/p}·λ*]`.
pub fn moment_bounds(seq: &SummandSequence, p: f64) -> Result<MomentBounds> {
    let regime = seq.regime()?;
    let min = regime.min_order();
    if !(p >= min && p.is_finite()) {
        return Err(Error::OrderTooSmall { p, min });
    }
    let (lower_constant, upper_constant) = match regime {
        Regime::Symmetric => (LATALA_LOWER_CONSTANT, SYMMETRIC_UPPER_CONSTANT),
        Regime::Nonnegative => (kappa(), nonnegative_upper_constant(p)),
    };
    let lambda_star = latala_norm(seq, p, DEFAULT_REL_TOL)?.lambda_star;
    Ok(MomentBounds {
        lower: lower_constant * lambda_star,
        upper: upper_constant * lambda_star,
        regime,
        p,
        lower_constant,
        upper_constant,
        lambda_star,
    })
}

/// `f(x) = Σ_{k≥0} (2k+1)^k x^k / k!` on `[0, 0.18]`.
///
/// Terms come from `exp(k·ln(2k+1) − ln k! + k·ln x)`. Summation stops once
/// the current term is below `1e-16` of the partial sum and the geometric
/// tail `term·r/(1−r)` is below `1e-14`, where `r` dominates every later
/// ratio: `r = max(observed ratio, e·(2 + 1/(k+1))·x)`.
pub fn f_series(x: f64) -> Result<f64> {
    if !(0.0..=F_SERIES_MAX_X).contains(&x) {
        return Err(Error::OutOfDomain {
            value: x,
            domain: "[0, 0.18]",
        });
    }
    if x == 0.0 {
        return Ok(1.0);
    }
    let ln_x = ln(x);
    let mut sum = 1.0;
    let mut ln_fact = 0.0;
    let mut prev = 1.0;
    for k in 1..F_SERIES_MAX_TERMS {
        let kf = k as f64;
        ln_fact += ln(kf);
        let term = exp(kf * ln(2.0 * kf + 1.0) - ln_fact + kf * ln_x);
        sum += term;
        // (term_{j+1}/term_j) < e·(2 + 1/(j+1))·x for all j ≥ k
        let ratio = (term / prev).max(E * (2.0 + 1.0 / (kf + 1.0)) * x);
        prev = term;
        if ratio < 1.0 && term < 1e-16 * sum && term * ratio / (1.0 - ratio) < 1e-14 {
            return Ok(sum);
        }
    }
    Err(Error::OutOfDomain {
        value: x,
        domain: "series did not converge",
    })
}

static KAPPA_BITS: AtomicU64 = AtomicU64::new(0);

/// The root κ of `f(κ) = e` on `(0, 0.18)`, ≈ 0.1549.
///
/// Computed by bisection on first use and cached; concurrent first calls
/// compute the same value and store identical bits.
pub fn kappa() -> f64 {
    let bits = KAPPA_BITS.load(Ordering::Acquire);
    if bits != 0 {
        return f64::from_bits(bits);
    }
    let k = solve_kappa();
    KAPPA_BITS.store(k.to_bits(), Ordering::Release);
    k
}

fn solve_kappa() -> f64 {
    let f = |x: f64| f_series(x).expect("x within [0, 0.18]");
    let (mut lo, mut hi) = (0.0, F_SERIES_MAX_X);
    assert!(f(lo) < E && f(hi) > E, "f must bracket e on [0, 0.18]");
    while hi - lo > KAPPA_TOL {
        let mid = 0.5 * (lo + hi);
        if f(mid) < E {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// Closed form `(e^{2/n} − 1)^{−1/2}` of the norm of `n` i.i.d. unit
/// Rademacher summands at `p = 2`.
pub fn rademacher_p2_closed_form(n: usize) -> f64 {
    1.0 / crate::math::sqrt(exp_m1(2.0 / n as f64))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::distributions::Marginal;
    use alloc::vec;

    /// Brute-force partial sum, each term built as `∏_{j=1..k} (2k+1)x/j`
    /// so nothing overflows; independent of the log-domain recurrence.
    fn brute_force_f(x: f64, terms: usize) -> f64 {
        let mut sum = 0.0;
        for k in 0..terms {
            let mut term = 1.0;
            for j in 1..=k {
                term *= (2 * k + 1) as f64 * x / j as f64;
            }
            sum += term;
        }
        sum
    }

    #[test]
    fn f_series_at_zero() {
        assert_eq!(f_series(0.0).unwrap(), 1.0);
    }

    #[test]
    fn f_series_matches_brute_force() {
        // 200-term sum at 40 digits: 1.536598393402037973899601646507814021879
        let frozen = 1.536_598_393_402_038;
        let v = f_series(0.1).unwrap();
        assert!((v - frozen).abs() < 1e-12, "{v}");
        assert!((v - brute_force_f(0.1, 200)).abs() < 1e-12);
        for &x in &[0.01, 0.05, 0.15] {
            let v = f_series(x).unwrap();
            assert!((v - brute_force_f(x, 2000)).abs() < 1e-12 * v);
        }
    }

    #[test]
    fn f_series_domain() {
        assert!(f_series(-0.01).is_err());
        assert!(f_series(0.181).is_err());
        assert!(f_series(0.18).unwrap() > E);
    }

    #[test]
    fn kappa_value() {
        let k = kappa();
        // 40-digit root: 0.1549065968860125598489376909912259494125
        assert!((k - 0.154_906_596_886_012_56).abs() < 1e-11, "{k}");
        assert!((f_series(k).unwrap() - E).abs() < 1e-10);
        assert!(k > LATALA_LOWER_CONSTANT);
        assert_eq!(kappa().to_bits(), k.to_bits());
    }

    #[test]
    fn latala_lower_constant_value() {
        assert!((LATALA_LOWER_CONSTANT - 0.116_272_078_967_414_8).abs() < 1e-15);
    }

    #[test]
    fn point_mass_closed_form() {
        for &a in &[1e-3, 1.0, 7.5] {
            for &p in &[1.0, 2.0, 10.0, 100.0] {
                let seq = SummandSequence::iid(Marginal::point_mass(a).unwrap(), 1).unwrap();
                let r = latala_norm(&seq, p, DEFAULT_REL_TOL).unwrap();
                let expected = a / (E - 1.0);
                assert!(
                    ((r.lambda_star - expected) / expected).abs() < 1e-8,
                    "a={a} p={p}"
                );
                assert!(r.bracket.0 <= r.lambda_star && r.lambda_star <= r.bracket.1);
            }
        }
    }

    #[test]
    fn rademacher_closed_form() {
        for n in [1usize, 2, 4, 16] {
            let seq = SummandSequence::iid(Marginal::rademacher(1.0).unwrap(), n).unwrap();
            let r = latala_norm(&seq, 2.0, DEFAULT_REL_TOL).unwrap();
            let expected = rademacher_p2_closed_form(n);
            assert!(
                ((r.lambda_star - expected) / expected).abs() < 1e-8,
                "n={n}"
            );
            assert!(((r.product_at_lambda - exp(2.0)) / exp(2.0)).abs() < 1e-6);
        }
        // (e² − 1)^{−1/2} = 0.395623…
        assert!((rademacher_p2_closed_form(1) - 0.395_623).abs() < 1e-6);
    }

    #[test]
    fn all_zero_sequence() {
        let seq = SummandSequence::iid(Marginal::point_mass(0.0).unwrap(), 5).unwrap();
        assert_eq!(
            latala_norm(&seq, 3.0, DEFAULT_REL_TOL).unwrap().lambda_star,
            0.0
        );
    }

    #[test]
    fn norm_errors() {
        let r = Marginal::rademacher(1.0).unwrap();
        let e = Marginal::exponential(1.0).unwrap();
        let mixed = SummandSequence::from_marginals(vec![r.clone(), e]).unwrap();
        assert_eq!(latala_norm(&mixed, 2.0, 1e-9), Err(Error::MixedRegime));
        let seq = SummandSequence::iid(r, 2).unwrap();
        assert!(matches!(
            latala_norm(&seq, 0.5, 1e-9),
            Err(Error::OrderTooSmall { .. })
        ));
        assert!(matches!(
            latala_norm(&seq, 2.0, 1e-2),
            Err(Error::ToleranceOutOfRange(_))
        ));
        assert!(matches!(
            latala_norm(&seq, 2.0, 1e-13),
            Err(Error::ToleranceOutOfRange(_))
        ));
    }

    #[test]
    fn moment_bound_constants() {
        let pos = SummandSequence::iid(Marginal::exponential(1.0).unwrap(), 3).unwrap();
        let b = moment_bounds(&pos, 1.0).unwrap();
        assert!((b.upper_constant - (E - 1.0)).abs() < 1e-15);
        assert!((b.lower_constant - 0.1549).abs() < 1e-3);
        assert!(b.lower <= b.upper);
        let sym = SummandSequence::iid(Marginal::rademacher(1.0).unwrap(), 3).unwrap();
        let b = moment_bounds(&sym, 2.0).unwrap();
        assert!((b.lower_constant - 0.1162).abs() < 1e-3);
        assert_eq!(b.upper_constant, E);
        assert!(matches!(
            moment_bounds(&sym, 1.0),
            Err(Error::OrderTooSmall { .. })
        ));
        assert!(matches!(
            moment_bounds(&pos, 0.9),
            Err(Error::OrderTooSmall { .. })
        ));
    }

    #[test]
    fn nonnegative_upper_constant_is_stable() {
        assert!((nonnegative_upper_constant(2.0) - libm::sqrt(exp(2.0) - 1.0)).abs() < 1e-14);
        assert!((nonnegative_upper_constant(800.0) - E).abs() < 1e-14);
    }
}
