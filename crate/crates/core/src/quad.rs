//! Adaptive Gauss–Kronrod (7/15) quadrature in the log domain.
//!
//! Integrands are passed as their logarithm `g`, and the routine returns
//! `ln ∫ e^{g(x)} dx`. The running maximum of `g` is factored out before
//! any exponentiation, so moments of order several hundred neither
//! overflow nor lose their relative accuracy.

use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::math::{exp, ln};

/// Relative tolerance on the integral.
pub const REL_TOL: f64 = 1e-10;
/// Maximum number of bisections applied to any one starting piece.
pub const MAX_LEVEL: u32 = 60;

const MAX_SEGMENTS: usize = 200_000;
/// Grid points per piece used to locate the maximum of `g` before integrating.
const SCAN_POINTS: usize = 64;

const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_2,
    0.140_653_259_715_525_9,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_8,
];
// Gauss weights for the odd Kronrod nodes XGK[1], XGK[3], XGK[5], XGK[7].
const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

#[derive(Clone, Copy, Debug)]
struct Segment {
    lo: f64,
    hi: f64,
    value: f64,
    error: f64,
    level: u32,
}

/// Returns `(kronrod, |kronrod - gauss|, max g seen at the nodes)`.
fn gk15<G: Fn(f64) -> f64>(g: &G, shift: f64, lo: f64, hi: f64) -> (f64, f64, f64) {
    let center = 0.5 * (lo + hi);
    let half = 0.5 * (hi - lo);
    let mut kronrod = 0.0;
    let mut gauss = 0.0;
    let mut seen = f64::NEG_INFINITY;
    let mut eval = |x: f64| {
        let gx = g(x);
        seen = seen.max(gx);
        exp(gx - shift)
    };
    let fc = eval(center);
    kronrod += WGK[7] * fc;
    gauss += WG[3] * fc;
    for (j, &node) in XGK.iter().take(7).enumerate() {
        let dx = half * node;
        let pair = eval(center - dx) + eval(center + dx);
        kronrod += WGK[j] * pair;
        if j % 2 == 1 {
            gauss += WG[j / 2] * pair;
        }
    }
    (kronrod * half, ((kronrod - gauss) * half).abs(), seen)
}

/// `ln ∫_lo^hi e^{g(x)} dx` for finite `lo ≤ hi`.
///
/// `g` must be smooth between consecutive `breakpoints` (kinks, zeros of the
/// underlying integrand, and the location of its maximum belong there).
/// Returns `-∞` for an empty interval or an integrand that vanishes.
pub fn log_integral<G>(g: G, lo: f64, hi: f64, breakpoints: &[f64]) -> Result<f64>
where
    G: Fn(f64) -> f64,
{
    if !(lo.is_finite() && hi.is_finite()) || hi < lo {
        return Err(Error::OutOfDomain {
            value: hi - lo,
            domain: "finite interval with lo <= hi",
        });
    }
    if hi == lo {
        return Ok(f64::NEG_INFINITY);
    }

    let mut cuts: Vec<f64> = Vec::with_capacity(breakpoints.len() + 2);
    cuts.push(lo);
    cuts.extend(breakpoints.iter().copied().filter(|&b| b > lo && b < hi));
    cuts.push(hi);
    cuts.sort_by(f64::total_cmp);
    cuts.dedup();

    let mut shift = f64::NEG_INFINITY;
    for w in cuts.windows(2) {
        for i in 0..=SCAN_POINTS {
            let x = w[0] + (w[1] - w[0]) * (i as f64) / (SCAN_POINTS as f64);
            let gx = g(x);
            if !gx.is_nan() {
                shift = shift.max(gx);
            }
        }
    }
    if shift == f64::NEG_INFINITY {
        // The grid only saw zeros; fall back to the node values themselves.
        shift = 0.0;
    }

    // A node can beat the scanned maximum; rescale and restart if it does
    // by enough to threaten overflow.
    for _ in 0..4 {
        match integrate_shifted(&g, shift, &cuts)? {
            Shifted::Done(total) => {
                return Ok(if total > 0.0 {
                    shift + ln(total)
                } else {
                    f64::NEG_INFINITY
                });
            }
            Shifted::Rescale(new_shift) => shift = new_shift,
        }
    }
    Err(Error::QuadratureDiverged)
}

enum Shifted {
    Done(f64),
    Rescale(f64),
}

fn integrate_shifted<G: Fn(f64) -> f64>(g: &G, shift: f64, cuts: &[f64]) -> Result<Shifted> {
    let mut segments: Vec<Segment> = Vec::with_capacity(64);
    let mut peak = f64::NEG_INFINITY;
    for w in cuts.windows(2) {
        let (value, error, seen) = gk15(g, shift, w[0], w[1]);
        peak = peak.max(seen);
        segments.push(Segment {
            lo: w[0],
            hi: w[1],
            value,
            error,
            level: 0,
        });
    }
    loop {
        if peak > shift + 200.0 {
            return Ok(Shifted::Rescale(peak));
        }
        let total: f64 = segments.iter().map(|s| s.value).sum();
        let total_err: f64 = segments.iter().map(|s| s.error).sum();
        if !total.is_finite() || total_err.is_nan() {
            return Err(Error::QuadratureDiverged);
        }
        if total_err <= REL_TOL * total.abs() || total_err < f64::MIN_POSITIVE {
            return Ok(Shifted::Done(total));
        }
        let (worst, _) = segments
            .iter()
            .enumerate()
            .max_by(|a, b| a.1.error.total_cmp(&b.1.error))
            .expect("at least one segment");
        let seg = segments.swap_remove(worst);
        if seg.level >= MAX_LEVEL || segments.len() >= MAX_SEGMENTS {
            return Err(Error::QuadratureDiverged);
        }
        let mid = 0.5 * (seg.lo + seg.hi);
        for (lo, hi) in [(seg.lo, mid), (mid, seg.hi)] {
            let (value, error, seen) = gk15(g, shift, lo, hi);
            peak = peak.max(seen);
            segments.push(Segment {
                lo,
                hi,
                value,
                error,
                level: seg.level + 1,
            });
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn integral<G: Fn(f64) -> f64>(g: G, lo: f64, hi: f64) -> f64 {
        exp(log_integral(g, lo, hi, &[]).unwrap())
    }

    #[test]
    fn polynomial_is_exact() {
        // ∫_0^2 x^3 dx = 4
        let v = integral(|x: f64| 3.0 * ln(x), 0.0, 2.0);
        assert!((v - 4.0).abs() < 1e-12, "{v}");
    }

    #[test]
    fn gaussian_bump_relative_accuracy() {
        // ∫ e^{-x^2} over [-10, 10] = √π to double precision
        let v = integral(|x: f64| -x * x, -10.0, 10.0);
        let sqrt_pi = 1.772_453_850_905_516;
        assert!(((v - sqrt_pi) / sqrt_pi).abs() < 1e-10, "{v}");
    }

    #[test]
    fn huge_log_values_do_not_overflow() {
        // ∫_0^1 e^{2000 + x} dx = e^{2000}(e - 1)
        let l = log_integral(|x: f64| 2000.0 + x, 0.0, 1.0, &[]).unwrap();
        let expected = 2000.0 + ln(core::f64::consts::E - 1.0);
        assert!((l - expected).abs() < 1e-12);
    }

    #[test]
    fn empty_interval_is_neg_infinity() {
        assert_eq!(
            log_integral(|_| 0.0, 1.0, 1.0, &[]).unwrap(),
            f64::NEG_INFINITY
        );
        assert!(log_integral(|_| 0.0, 1.0, 0.0, &[]).is_err());
    }

    #[test]
    fn kink_handled_with_breakpoint() {
        // ∫_{-1}^{1} |x|^{2.5} dx = 2/3.5
        let g = |x: f64| 2.5 * ln(x.abs());
        let v = exp(log_integral(g, -1.0, 1.0, &[0.0]).unwrap());
        assert!((v - 2.0 / 3.5).abs() < 1e-12);
    }
}
