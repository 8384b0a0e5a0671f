//! Marginal laws of the independent summands and the elementary
//! expectations computed from them.
//!
//! Discrete laws are evaluated exactly as finite sums (in the log domain);
//! the two continuous families go through [`crate::quad`]. Truncation
//! `X ↦ X·1{|X| ≤ t}` keeps ties at `|X| = t` and turns a continuous law
//! into a censored one: the continuous part on `[-t, t]` plus an atom at 0.

use alloc::format;
use alloc::vec::Vec;

use rand_core::RngCore;

use crate::error::{Error, Result};
use crate::math::{exp, ln, log_add_exp, log_sum_exp, pow, sqrt};
use crate::quad;

/// Tolerance on the total mass of a user-supplied atom list.
pub const MASS_TOL: f64 = 1e-12;
/// Probabilities below this are reported as exactly 0.
pub const PROB_FLOOR: f64 = 1e-300;

/// Distance past the maximum of the log-integrand at which the infinite
/// exponential tail is cut off (`e^{-60}` relative).
const TAIL_CUTOFF_LOG: f64 = 60.0;

#[derive(Clone, Debug, PartialEq)]
pub enum Kind {
    /// Finite support: `(value, probability)` sorted by value, values distinct.
    DiscreteAtoms(Vec<(f64, f64)>),
    /// `±scale` with probability ½ each.
    ScaledRademacher { scale: f64 },
    /// Exponential with mean `scale`. With a cutoff `c` the law is that of
    /// `X·1{X ≤ c}`.
    Exponential { scale: f64, cutoff: Option<f64> },
    /// Uniform on `[-scale, scale]`, optionally censored to `X·1{|X| ≤ c}`
    /// with `c < scale`.
    UniformSymmetric { scale: f64, cutoff: Option<f64> },
}

/// One independent summand's distribution.
#[derive(Clone, Debug, PartialEq)]
pub struct Marginal {
    kind: Kind,
    symmetric: bool,
    nonnegative: bool,
}

fn check_scale(scale: f64) -> Result<()> {
    if scale.is_finite() && scale > 0.0 {
        Ok(())
    } else {
        Err(Error::InvalidMarginal(format!(
            "scale must be positive and finite, got {scale}"
        )))
    }
}

fn check_order(p: f64) -> Result<()> {
    if p >= 1.0 && p.is_finite() {
        Ok(())
    } else {
        Err(Error::OrderTooSmall { p, min: 1.0 })
    }
}

fn check_threshold(t: f64) -> Result<()> {
    if t >= 0.0 && !t.is_nan() {
        Ok(())
    } else {
        Err(Error::InvalidThreshold(t))
    }
}

fn floor_prob(p: f64) -> f64 {
    if p < PROB_FLOOR {
        0.0
    } else {
        p.min(1.0)
    }
}

impl Marginal {
    /// A discrete law from `(value, probability)` pairs.
    ///
    /// Values must be finite and distinct, probabilities in `(0, 1]` summing
    /// to 1 within [`MASS_TOL`]. Order does not matter.
    pub fn atoms(mut atoms: Vec<(f64, f64)>) -> Result<Self> {
        if atoms.is_empty() {
            return Err(Error::InvalidMarginal("atom list is empty".into()));
        }
        for &(v, p) in &atoms {
            if !v.is_finite() {
                return Err(Error::InvalidMarginal(format!(
                    "atom value {v} is not finite"
                )));
            }
            if !(p > 0.0 && p <= 1.0) {
                return Err(Error::InvalidMarginal(format!(
                    "atom probability {p} outside (0, 1]"
                )));
            }
        }
        let total: f64 = atoms.iter().map(|a| a.1).sum();
        if (total - 1.0).abs() > MASS_TOL {
            return Err(Error::InvalidMarginal(format!(
                "atom probabilities sum to {total}, not 1"
            )));
        }
        atoms.sort_by(|a, b| a.0.total_cmp(&b.0));
        if atoms.windows(2).any(|w| w[0].0 == w[1].0) {
            return Err(Error::InvalidMarginal(
                "atom values must be distinct".into(),
            ));
        }
        Ok(Self::from_sorted_atoms(atoms))
    }

    /// Builds a discrete law from sorted, distinct atoms produced internally
    /// (truncation, convolution); mass is assumed to be 1 up to rounding.
    pub(crate) fn from_sorted_atoms(atoms: Vec<(f64, f64)>) -> Self {
        let symmetric = atoms_symmetric(&atoms);
        let nonnegative = atoms.first().is_none_or(|a| a.0 >= 0.0);
        Self {
            kind: Kind::DiscreteAtoms(atoms),
            symmetric,
            nonnegative,
        }
    }

    pub fn point_mass(value: f64) -> Result<Self> {
        Self::atoms(alloc::vec![(value, 1.0)])
    }

    pub fn rademacher(scale: f64) -> Result<Self> {
        check_scale(scale)?;
        Ok(Self {
            kind: Kind::ScaledRademacher { scale },
            symmetric: true,
            nonnegative: false,
        })
    }

    pub fn exponential(scale: f64) -> Result<Self> {
        check_scale(scale)?;
        Ok(Self {
            kind: Kind::Exponential {
                scale,
                cutoff: None,
            },
            symmetric: false,
            nonnegative: true,
        })
    }

    pub fn uniform_symmetric(scale: f64) -> Result<Self> {
        check_scale(scale)?;
        Ok(Self {
            kind: Kind::UniformSymmetric {
                scale,
                cutoff: None,
            },
            symmetric: true,
            nonnegative: false,
        })
    }

    /// The law of `X·1{X ≤ cutoff}` for `X` exponential with mean `scale`.
    pub fn censored_exponential(scale: f64, cutoff: f64) -> Result<Self> {
        Self::exponential(scale)?.truncate(cutoff)
    }

    /// The law of `X·1{|X| ≤ cutoff}` for `X` uniform on `[-scale, scale]`.
    pub fn censored_uniform(scale: f64, cutoff: f64) -> Result<Self> {
        Self::uniform_symmetric(scale)?.truncate(cutoff)
    }

    pub fn kind(&self) -> &Kind {
        &self.kind
    }

    pub fn is_symmetric(&self) -> bool {
        self.symmetric
    }

    pub fn is_nonnegative(&self) -> bool {
        self.nonnegative
    }

    pub fn is_discrete(&self) -> bool {
        matches!(
            self.kind,
            Kind::DiscreteAtoms(_) | Kind::ScaledRademacher { .. }
        )
    }

    /// True for the point mass at 0.
    pub fn is_zero(&self) -> bool {
        matches!(&self.kind, Kind::DiscreteAtoms(a) if a.len() == 1 && a[0].0 == 0.0)
    }

    /// Support atoms for discrete laws, `None` for the continuous families.
    pub fn support(&self) -> Option<Vec<(f64, f64)>> {
        match &self.kind {
            Kind::DiscreteAtoms(a) => Some(a.clone()),
            Kind::ScaledRademacher { scale } => Some(alloc::vec![(-scale, 0.5), (*scale, 0.5)]),
            _ => None,
        }
    }

    /// `ess sup |X|`, infinite for the uncensored exponential.
    pub fn ess_sup(&self) -> f64 {
        match &self.kind {
            Kind::DiscreteAtoms(a) => a.iter().map(|x| x.0.abs()).fold(0.0, f64::max),
            Kind::ScaledRademacher { scale } => *scale,
            Kind::Exponential { cutoff, .. } => cutoff.unwrap_or(f64::INFINITY),
            Kind::UniformSymmetric { scale, cutoff } => cutoff.unwrap_or(*scale),
        }
    }

    /// The law of `c·X` for `c > 0`.
    pub fn scaled(&self, c: f64) -> Result<Self> {
        check_scale(c)?;
        let kind = match &self.kind {
            Kind::DiscreteAtoms(a) => {
                Kind::DiscreteAtoms(a.iter().map(|&(v, p)| (c * v, p)).collect())
            }
            Kind::ScaledRademacher { scale } => Kind::ScaledRademacher { scale: c * scale },
            Kind::Exponential { scale, cutoff } => Kind::Exponential {
                scale: c * scale,
                cutoff: cutoff.map(|x| c * x),
            },
            Kind::UniformSymmetric { scale, cutoff } => Kind::UniformSymmetric {
                scale: c * scale,
                cutoff: cutoff.map(|x| c * x),
            },
        };
        Ok(Self {
            kind,
            ..self.clone()
        })
    }

    /// The law of `X·1{|X| ≤ t}`; mass with `|X| > t` moves to an atom at 0.
    pub fn truncate(&self, t: f64) -> Result<Self> {
        check_threshold(t)?;
        let zero = || Self::from_sorted_atoms(alloc::vec![(0.0, 1.0)]);
        let out = match &self.kind {
            Kind::DiscreteAtoms(a) => {
                let mut dropped = 0.0;
                let mut kept: Vec<(f64, f64)> = Vec::with_capacity(a.len() + 1);
                for &(v, p) in a {
                    if v.abs() <= t {
                        kept.push((v, p));
                    } else {
                        dropped += p;
                    }
                }
                if dropped > 0.0 {
                    match kept.iter_mut().find(|x| x.0 == 0.0) {
                        Some(z) => z.1 += dropped,
                        None => {
                            kept.push((0.0, dropped));
                            kept.sort_by(|x, y| x.0.total_cmp(&y.0));
                        }
                    }
                }
                Self::from_sorted_atoms(kept)
            }
            Kind::ScaledRademacher { scale } => {
                if *scale <= t {
                    self.clone()
                } else {
                    zero()
                }
            }
            Kind::Exponential { scale, cutoff } => {
                let c = cutoff.map_or(t, |c| c.min(t));
                if c <= 0.0 {
                    zero()
                } else if c.is_infinite() {
                    self.clone()
                } else {
                    Self {
                        kind: Kind::Exponential {
                            scale: *scale,
                            cutoff: Some(c),
                        },
                        symmetric: false,
                        nonnegative: true,
                    }
                }
            }
            Kind::UniformSymmetric { scale, cutoff } => {
                let c = cutoff.unwrap_or(*scale).min(t);
                if c <= 0.0 {
                    zero()
                } else if c >= *scale {
                    self.clone()
                } else {
                    Self {
                        kind: Kind::UniformSymmetric {
                            scale: *scale,
                            cutoff: Some(c),
                        },
                        symmetric: true,
                        nonnegative: false,
                    }
                }
            }
        };
        Ok(out)
    }

    /// `P(|X| > u)` with strict inequality.
    pub fn tail(&self, u: f64) -> Result<f64> {
        check_threshold(u)?;
        let q = match &self.kind {
            Kind::DiscreteAtoms(a) => a.iter().filter(|x| x.0.abs() > u).map(|x| x.1).sum(),
            Kind::ScaledRademacher { scale } => {
                if *scale > u {
                    1.0
                } else {
                    0.0
                }
            }
            Kind::Exponential { scale, cutoff } => match cutoff {
                None => exp(-u / scale),
                Some(c) if u < *c => exp(-u / scale) - exp(-c / scale),
                Some(_) => 0.0,
            },
            Kind::UniformSymmetric { scale, cutoff } => {
                let c = cutoff.unwrap_or(*scale);
                if u < c {
                    (c - u) / scale
                } else {
                    0.0
                }
            }
        };
        Ok(floor_prob(q))
    }

    /// `E X`.
    pub fn mean(&self) -> f64 {
        match &self.kind {
            Kind::DiscreteAtoms(a) => a.iter().map(|&(v, p)| v * p).sum(),
            Kind::ScaledRademacher { .. } | Kind::UniformSymmetric { .. } => 0.0,
            Kind::Exponential { scale, cutoff } => match cutoff {
                None => *scale,
                // ∫_0^c x e^{-x/s}/s dx
                Some(c) => scale - (scale + c) * exp(-c / scale),
            },
        }
    }

    /// `ln E|a + bX|^p` for `b > 0`, `p ≥ 1`.
    ///
    /// Both the Orlicz factor (`a = 1`, `b = 1/λ`) and the absolute moments
    /// (`a = 0`, `b = 1`) are instances.
    pub fn log_abs_affine_moment(&self, a: f64, b: f64, p: f64) -> Result<f64> {
        check_order(p)?;
        let log_abs = |x: f64| {
            let y = (a + b * x).abs();
            if y == 0.0 {
                f64::NEG_INFINITY
            } else {
                p * ln(y)
            }
        };
        match &self.kind {
            Kind::DiscreteAtoms(atoms) => Ok(log_sum_exp(
                atoms.iter().map(|&(v, prob)| ln(prob) + log_abs(v)),
            )),
            Kind::ScaledRademacher { scale } => Ok(log_sum_exp(
                [-scale, *scale]
                    .iter()
                    .map(|&v| -core::f64::consts::LN_2 + log_abs(v)),
            )),
            Kind::Exponential { scale, cutoff } => {
                let s = *scale;
                let g = |x: f64| log_abs(x) - x / s - ln(s);
                // d/dx [p ln(a + bx) - x/s] vanishes at x = p·s - a/b.
                let peak = (p * s - a / b).max(0.0);
                let hi = match cutoff {
                    Some(c) => *c,
                    None => {
                        let top = g(peak);
                        let mut hi = (2.0 * p * s - a / b).max(peak + s).max(s);
                        let mut steps = 0;
                        while g(hi) > top - TAIL_CUTOFF_LOG {
                            hi *= 2.0;
                            steps += 1;
                            if steps > 200 {
                                return Err(Error::QuadratureDiverged);
                            }
                        }
                        hi
                    }
                };
                let width = sqrt(p) * s;
                let hints = [
                    peak,
                    peak - 3.0 * width,
                    peak - width,
                    peak + width,
                    peak + 3.0 * width,
                    peak + 10.0 * width,
                ];
                let continuous = quad::log_integral(g, 0.0, hi, &hints)?;
                Ok(match cutoff {
                    // Atom at 0 carries P(X > c).
                    Some(c) => log_add_exp(-c / s + log_abs(0.0), continuous),
                    None => continuous,
                })
            }
            Kind::UniformSymmetric { scale, cutoff } => {
                let s = *scale;
                let c = cutoff.unwrap_or(s);
                let g = |x: f64| log_abs(x) - ln(2.0 * s);
                let continuous = quad::log_integral(g, -c, c, &[-a / b, 0.0])?;
                let atom = 1.0 - c / s;
                Ok(if atom > 0.0 {
                    log_add_exp(ln(atom) + log_abs(0.0), continuous)
                } else {
                    continuous
                })
            }
        }
    }

    /// `ln E|1 + X/λ|^p`.
    pub fn log_orlicz_term(&self, lambda: f64, p: f64) -> Result<f64> {
        if !(lambda > 0.0 && lambda.is_finite()) {
            return Err(Error::NonPositiveLambda(lambda));
        }
        self.log_abs_affine_moment(1.0, 1.0 / lambda, p)
    }

    /// `E|1 + X/λ|^p`, the factor entering the Orlicz norm. May overflow to
    /// `+∞` for very large `p`; [`Self::log_orlicz_term`] does not.
    pub fn orlicz_term(&self, lambda: f64, p: f64) -> Result<f64> {
        self.log_orlicz_term(lambda, p).map(exp)
    }

    /// `ln E|X|^p` (`-∞` for the point mass at 0).
    pub fn log_abs_moment(&self, p: f64) -> Result<f64> {
        self.log_abs_affine_moment(0.0, 1.0, p)
    }

    /// `E|X|^p`.
    pub fn abs_moment(&self, p: f64) -> Result<f64> {
        self.log_abs_moment(p).map(exp)
    }

    /// `‖X‖_p = (E|X|^p)^{1/p}`, computed without forming `E|X|^p`.
    pub fn lp_norm(&self, p: f64) -> Result<f64> {
        self.log_abs_moment(p).map(|l| exp(l / p))
    }

    /// A reusable sampler; cheaper than [`Self::sample`] in a loop.
    pub fn sampler(&self) -> Sampler {
        let inner = match &self.kind {
            Kind::DiscreteAtoms(a) => {
                let mut acc = 0.0;
                let values = a.iter().map(|x| x.0).collect();
                let cumulative = a
                    .iter()
                    .map(|x| {
                        acc += x.1;
                        acc
                    })
                    .collect();
                SamplerKind::Atoms { values, cumulative }
            }
            Kind::ScaledRademacher { scale } => SamplerKind::Rademacher(*scale),
            Kind::Exponential { scale, cutoff } => SamplerKind::Exponential {
                scale: *scale,
                cutoff: cutoff.unwrap_or(f64::INFINITY),
            },
            Kind::UniformSymmetric { scale, cutoff } => SamplerKind::Uniform {
                scale: *scale,
                cutoff: cutoff.unwrap_or(*scale),
            },
        };
        Sampler(inner)
    }

    /// Draws one variate. Deterministic given the state of `rng`.
    pub fn sample<R: RngCore + ?Sized>(&self, rng: &mut R) -> f64 {
        self.sampler().sample(rng)
    }
}

fn atoms_symmetric(atoms: &[(f64, f64)]) -> bool {
    let n = atoms.len();
    (0..n).all(|i| {
        let (v, p) = atoms[i];
        let (w, q) = atoms[n - 1 - i];
        (v + w).abs() <= 1e-12 * v.abs().max(1.0) && (p - q).abs() <= 1e-12
    })
}

#[derive(Clone, Debug)]
enum SamplerKind {
    Atoms {
        values: Vec<f64>,
        cumulative: Vec<f64>,
    },
    Rademacher(f64),
    Exponential {
        scale: f64,
        cutoff: f64,
    },
    Uniform {
        scale: f64,
        cutoff: f64,
    },
}

/// Inverse-CDF sampler for one [`Marginal`].
#[derive(Clone, Debug)]
pub struct Sampler(SamplerKind);

/// Uniform on the open interval (0, 1) from the top 53 bits.
#[inline]
pub fn open_unit<R: RngCore + ?Sized>(rng: &mut R) -> f64 {
    ((rng.next_u64() >> 11) as f64 + 0.5) * (1.0 / (1u64 << 53) as f64)
}

impl Sampler {
    #[inline]
    pub fn sample<R: RngCore + ?Sized>(&self, rng: &mut R) -> f64 {
        match &self.0 {
            SamplerKind::Atoms { values, cumulative } => {
                let u = open_unit(rng) * cumulative[cumulative.len() - 1];
                let i = cumulative.partition_point(|&c| c < u);
                values[i.min(values.len() - 1)]
            }
            SamplerKind::Rademacher(s) => {
                if rng.next_u64() >> 63 == 0 {
                    -s
                } else {
                    *s
                }
            }
            SamplerKind::Exponential { scale, cutoff } => {
                let x = -scale * ln(open_unit(rng));
                if x <= *cutoff {
                    x
                } else {
                    0.0
                }
            }
            SamplerKind::Uniform { scale, cutoff } => {
                let x = scale * (2.0 * open_unit(rng) - 1.0);
                if x.abs() <= *cutoff {
                    x
                } else {
                    0.0
                }
            }
        }
    }
}

/// Which half of the symmetric / nonnegative dichotomy a sequence is in.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Regime {
    Symmetric,
    Nonnegative,
}

impl Regime {
    /// Smallest moment order for which the moment sandwich is available.
    pub fn min_order(self) -> f64 {
        match self {
            Regime::Symmetric => 2.0,
            Regime::Nonnegative => 1.0,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Regime::Symmetric => "symmetric",
            Regime::Nonnegative => "nonnegative",
        }
    }
}

/// A marginal together with its i.i.d. repetition count.
#[derive(Clone, Debug, PartialEq)]
pub struct Entry {
    pub marginal: Marginal,
    pub count: usize,
}

/// The finite sequence `(X_1, …, X_n)` of independent summands.
#[derive(Clone, Debug, PartialEq)]
pub struct SummandSequence {
    entries: Vec<Entry>,
}

impl SummandSequence {
    pub fn new(entries: Vec<Entry>) -> Result<Self> {
        if entries.is_empty() || entries.iter().any(|e| e.count == 0) {
            return Err(Error::EmptySequence);
        }
        Ok(Self { entries })
    }

    pub fn from_marginals(marginals: Vec<Marginal>) -> Result<Self> {
        Self::new(
            marginals
                .into_iter()
                .map(|marginal| Entry { marginal, count: 1 })
                .collect(),
        )
    }

    /// `n` independent copies of `m`.
    pub fn iid(marginal: Marginal, count: usize) -> Result<Self> {
        Self::new(alloc::vec![Entry { marginal, count }])
    }

    pub fn entries(&self) -> &[Entry] {
        &self.entries
    }

    /// Expanded length `n`.
    pub fn len(&self) -> usize {
        self.entries.iter().map(|e| e.count).sum()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Every summand, with repetitions expanded.
    pub fn iter_expanded(&self) -> impl Iterator<Item = &Marginal> + '_ {
        self.entries
            .iter()
            .flat_map(|e| core::iter::repeat_n(&e.marginal, e.count))
    }

    pub fn is_all_zero(&self) -> bool {
        self.entries.iter().all(|e| e.marginal.is_zero())
    }

    pub fn is_discrete(&self) -> bool {
        self.entries.iter().all(|e| e.marginal.is_discrete())
    }

    /// All-symmetric takes precedence, so a sequence of point masses at 0
    /// reports [`Regime::Symmetric`].
    pub fn regime(&self) -> Result<Regime> {
        if self.entries.iter().all(|e| e.marginal.symmetric) {
            Ok(Regime::Symmetric)
        } else if self.entries.iter().all(|e| e.marginal.nonnegative) {
            Ok(Regime::Nonnegative)
        } else {
            Err(Error::MixedRegime)
        }
    }

    /// `(X_i·1{|X_i| ≤ t})_i`.
    pub fn truncated(&self, t: f64) -> Result<Self> {
        let entries = self
            .entries
            .iter()
            .map(|e| {
                Ok(Entry {
                    marginal: e.marginal.truncate(t)?,
                    count: e.count,
                })
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Self { entries })
    }

    /// `(c·X_i)_i` for `c > 0`.
    pub fn scaled(&self, c: f64) -> Result<Self> {
        let entries = self
            .entries
            .iter()
            .map(|e| {
                Ok(Entry {
                    marginal: e.marginal.scaled(c)?,
                    count: e.count,
                })
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Self { entries })
    }

    /// `Σ E|X_i|`.
    pub fn total_abs_mean(&self) -> Result<f64> {
        self.entries.iter().try_fold(0.0, |acc, e| {
            Ok(acc + e.count as f64 * e.marginal.abs_moment(1.0)?)
        })
    }

    /// `ess sup |S_n|` bounded by `Σ ess sup |X_i|` (attained for atom
    /// sequences with a common sign pattern, e.g. Rademacher sums).
    pub fn ess_sup_bound(&self) -> f64 {
        self.entries
            .iter()
            .map(|e| e.count as f64 * e.marginal.ess_sup())
            .sum()
    }

    /// `‖S_n‖_2`, exact from the marginals: `E S² = Σ Var X_i + (Σ E X_i)²`.
    pub fn l2_norm(&self) -> Result<f64> {
        let mut var = 0.0;
        let mut mean = 0.0;
        for e in &self.entries {
            let m = e.marginal.mean();
            let second = e.marginal.abs_moment(2.0)?;
            var += e.count as f64 * (second - m * m).max(0.0);
            mean += e.count as f64 * m;
        }
        Ok(sqrt(var + mean * mean))
    }
}

/// `(1 + a/λ)^p`, for tests and callers that want the degenerate closed form.
pub fn point_mass_orlicz(a: f64, lambda: f64, p: f64) -> f64 {
    pow(1.0 + a / lambda, p)
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;
    use rand_chacha::rand_core::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn close(a: f64, b: f64, rel: f64) -> bool {
        (a - b).abs() <= rel * b.abs().max(1e-300)
    }

    #[test]
    fn rademacher_orlicz_term_is_two_point_average() {
        let m = Marginal::rademacher(1.0).unwrap();
        assert!(close(m.orlicz_term(1.0, 2.0).unwrap(), 2.0, 1e-14));
    }

    #[test]
    fn point_mass_orlicz_term_closed_form() {
        let m = Marginal::point_mass(3.0).unwrap();
        for &(lambda, p) in &[(1.0, 1.0), (0.5, 2.5), (10.0, 40.0)] {
            let v = m.orlicz_term(lambda, p).unwrap();
            assert!(close(v, point_mass_orlicz(3.0, lambda, p), 1e-13));
        }
    }

    #[test]
    fn exponential_orlicz_term_at_p1_is_one_plus_mean() {
        let m = Marginal::exponential(1.0).unwrap();
        assert!(close(m.orlicz_term(1.0, 1.0).unwrap(), 2.0, 1e-10));
    }

    #[test]
    fn exponential_matches_binomial_expansion_for_integer_p() {
        // E(1 + X/λ)^p = Σ_k C(p,k) k! (s/λ)^k for X ~ Exp(mean s).
        let oracle = |s: f64, lambda: f64, p: u32| {
            let r = s / lambda;
            let mut term = 1.0; // C(p,0)·0!·r^0
            let mut sum = 1.0;
            for k in 1..=p {
                // C(p,k) k! = p!/(p-k)!
                term *= (p - k + 1) as f64 * r;
                sum += term;
            }
            sum
        };
        let m = Marginal::exponential(2.0).unwrap();
        for &(lambda, p) in &[(0.3, 1u32), (1.0, 3), (5.0, 8), (40.0, 25)] {
            let v = m.orlicz_term(lambda, p as f64).unwrap();
            let o = oracle(2.0, lambda, p);
            assert!(close(v, o, 1e-10), "λ={lambda} p={p}: {v} vs {o}");
        }
    }

    #[test]
    fn uniform_matches_closed_form() {
        // (1/2s)∫_{-s}^{s} |1+x/λ|^p dx = λ/(2s(p+1)) [F(1+s/λ) - F(1-s/λ)],
        // F(y) = sign(y)|y|^{p+1}
        let oracle = |s: f64, lambda: f64, p: f64| {
            let f = |y: f64| y.signum() * pow(y.abs(), p + 1.0);
            lambda / (2.0 * s * (p + 1.0)) * (f(1.0 + s / lambda) - f(1.0 - s / lambda))
        };
        let m = Marginal::uniform_symmetric(1.5).unwrap();
        for &(lambda, p) in &[(0.2, 1.0), (1.0, 2.0), (1.5, 3.7), (10.0, 50.0), (0.7, 9.0)] {
            let v = m.orlicz_term(lambda, p).unwrap();
            let o = oracle(1.5, lambda, p);
            assert!(close(v, o, 1e-10), "λ={lambda} p={p}: {v} vs {o}");
        }
    }

    #[test]
    fn large_order_stays_finite_in_log_domain() {
        let m = Marginal::exponential(1.0).unwrap();
        let l = m.log_orlicz_term(0.01, 500.0).unwrap();
        assert!(l.is_finite() && l > 700.0);
        let r = Marginal::rademacher(1.0).unwrap();
        let l = r.log_orlicz_term(1e-3, 500.0).unwrap();
        // ½(1001^500 + 999^500)
        let expected = log_add_exp(500.0 * ln(1001.0), 500.0 * ln(999.0)) - core::f64::consts::LN_2;
        assert!(close(l, expected, 1e-14));
    }

    #[test]
    fn orlicz_term_errors() {
        let m = Marginal::rademacher(1.0).unwrap();
        assert!(matches!(
            m.orlicz_term(0.0, 2.0),
            Err(Error::NonPositiveLambda(_))
        ));
        assert!(matches!(
            m.orlicz_term(-1.0, 2.0),
            Err(Error::NonPositiveLambda(_))
        ));
        assert!(matches!(
            m.orlicz_term(1.0, 0.5),
            Err(Error::OrderTooSmall { .. })
        ));
    }

    #[test]
    fn atom_validation() {
        assert!(Marginal::atoms(vec![]).is_err());
        assert!(Marginal::atoms(vec![(0.0, 0.5), (1.0, 0.4)]).is_err());
        assert!(Marginal::atoms(vec![(1.0, 0.5), (1.0, 0.5)]).is_err());
        assert!(Marginal::atoms(vec![(f64::NAN, 1.0)]).is_err());
        assert!(Marginal::atoms(vec![(1.0, 0.0), (2.0, 1.0)]).is_err());
        let m = Marginal::atoms(vec![(2.0, 0.25), (-2.0, 0.25), (0.0, 0.5)]).unwrap();
        assert!(m.is_symmetric() && !m.is_nonnegative());
        let m = Marginal::atoms(vec![(0.0, 0.5), (1.0, 0.5)]).unwrap();
        assert!(!m.is_symmetric() && m.is_nonnegative());
        let z = Marginal::point_mass(0.0).unwrap();
        assert!(z.is_symmetric() && z.is_nonnegative() && z.is_zero());
        let skew = Marginal::atoms(vec![(-1.0, 0.3), (1.0, 0.7)]).unwrap();
        assert!(!skew.is_symmetric() && !skew.is_nonnegative());
    }

    #[test]
    fn truncation_examples() {
        let m = Marginal::atoms(vec![(-2.0, 0.25), (0.0, 0.5), (2.0, 0.25)]).unwrap();
        assert!(m.truncate(1.0).unwrap().is_zero());
        let r = Marginal::rademacher(1.0).unwrap();
        assert_eq!(r.truncate(1.0).unwrap(), r);
        assert!(r.truncate(0.999).unwrap().is_zero());
        let e = Marginal::exponential(1.0).unwrap().truncate(1.0).unwrap();
        assert_eq!(
            e.kind(),
            &Kind::Exponential {
                scale: 1.0,
                cutoff: Some(1.0)
            }
        );
        // Atom at 0 has mass P(X > 1) = e^{-1}: E|X|^p misses it, E|1+X|^p counts it.
        let atom = exp(-1.0);
        assert!(close(1.0 - e.tail(0.0).unwrap(), atom, 1e-15));
        // E(1 + X·1{X ≤ 1}) = 1 + (1 - 2/e)
        assert!(close(
            e.orlicz_term(1.0, 1.0).unwrap(),
            2.0 - 2.0 * atom,
            1e-10
        ));
        assert!(close(atom, 0.367_879_441_171_442_3, 1e-15));
        assert!(matches!(r.truncate(-1.0), Err(Error::InvalidThreshold(_))));
    }

    #[test]
    fn censored_exponential_moments_match_incomplete_gamma() {
        // E|X 1{X ≤ c}|^2 = s^2 (2 - e^{-c/s}(c²/s² + 2c/s + 2)), s = 1, c = 1.
        let e = Marginal::censored_exponential(1.0, 1.0).unwrap();
        let expected = 2.0 - exp(-1.0) * 5.0;
        assert!(close(e.abs_moment(2.0).unwrap(), expected, 1e-10));
        assert!(close(e.mean(), 1.0 - 2.0 * exp(-1.0), 1e-15));
    }

    #[test]
    fn censored_uniform_moments() {
        let u = Marginal::censored_uniform(2.0, 1.0).unwrap();
        // (1/4)∫_{-1}^{1} x² dx = 1/6
        assert!(close(u.abs_moment(2.0).unwrap(), 1.0 / 6.0, 1e-12));
        assert!(close(u.tail(0.5).unwrap(), 0.25, 1e-15));
        assert_eq!(u.tail(1.0).unwrap(), 0.0);
        // E|1+X|^1 = ½·1 + (1/4)∫_{-1}^{1}(1+x)dx = 1
        assert!(close(u.orlicz_term(1.0, 1.0).unwrap(), 1.0, 1e-12));
    }

    #[test]
    fn tail_examples() {
        let r = Marginal::rademacher(1.0).unwrap();
        assert_eq!(r.tail(1.0).unwrap(), 0.0);
        assert_eq!(r.tail(0.5).unwrap(), 1.0);
        let e = Marginal::exponential(1.0).unwrap();
        assert!(close(e.tail(1.0).unwrap(), exp(-1.0), 1e-15));
        assert_eq!(e.tail(800.0).unwrap(), 0.0);
        assert!(r.tail(-0.1).is_err());
    }

    #[test]
    fn abs_moment_examples() {
        let r = Marginal::rademacher(2.0).unwrap();
        assert!(close(r.abs_moment(3.0).unwrap(), 8.0, 1e-14));
        let z = Marginal::point_mass(0.0).unwrap();
        assert_eq!(z.abs_moment(1.0).unwrap(), 0.0);
        assert_eq!(z.abs_moment(7.5).unwrap(), 0.0);
        // E X^3 = 6 s^3 for the exponential
        let e = Marginal::exponential(0.5).unwrap();
        assert!(close(e.abs_moment(3.0).unwrap(), 0.75, 1e-10));
        let u = Marginal::uniform_symmetric(3.0).unwrap();
        assert!(close(u.abs_moment(2.0).unwrap(), 3.0, 1e-12));
    }

    #[test]
    fn sampling_is_deterministic_given_seed() {
        for m in [
            Marginal::rademacher(1.0).unwrap(),
            Marginal::exponential(2.0).unwrap(),
            Marginal::uniform_symmetric(1.0).unwrap(),
            Marginal::atoms(vec![(0.0, 0.2), (3.0, 0.8)]).unwrap(),
        ] {
            let a = m.sample(&mut ChaCha8Rng::seed_from_u64(42));
            let b = m.sample(&mut ChaCha8Rng::seed_from_u64(42));
            assert_eq!(a.to_bits(), b.to_bits());
        }
    }

    #[test]
    fn truncated_samples_respect_cutoff() {
        let m = Marginal::censored_exponential(1.0, 0.5).unwrap();
        let s = m.sampler();
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let mut zeros = 0;
        for _ in 0..20_000 {
            let x = s.sample(&mut rng);
            assert!((0.0..=0.5).contains(&x));
            zeros += (x == 0.0) as u32;
        }
        // P(atom) = e^{-1/2} ≈ 0.607
        let frac = zeros as f64 / 20_000.0;
        assert!((frac - exp(-0.5)).abs() < 0.02, "{frac}");
    }

    #[test]
    fn regime_detection() {
        let r = Marginal::rademacher(1.0).unwrap();
        let e = Marginal::exponential(1.0).unwrap();
        let z = Marginal::point_mass(0.0).unwrap();
        let sym = SummandSequence::from_marginals(vec![r.clone(), z.clone()]).unwrap();
        assert_eq!(sym.regime().unwrap(), Regime::Symmetric);
        let pos = SummandSequence::from_marginals(vec![e.clone(), z]).unwrap();
        assert_eq!(pos.regime().unwrap(), Regime::Nonnegative);
        let mixed = SummandSequence::from_marginals(vec![r, e]).unwrap();
        assert_eq!(mixed.regime(), Err(Error::MixedRegime));
        assert_eq!(SummandSequence::new(vec![]), Err(Error::EmptySequence));
    }

    #[test]
    fn l2_norm_of_sum_from_marginals() {
        let seq = SummandSequence::iid(Marginal::rademacher(1.0).unwrap(), 16).unwrap();
        assert!(close(seq.l2_norm().unwrap(), 4.0, 1e-14));
        // Two Bernoulli(½): E S² = Var + mean² = 0.5 + 1
        let b = Marginal::atoms(vec![(0.0, 0.5), (1.0, 0.5)]).unwrap();
        let seq = SummandSequence::iid(b, 2).unwrap();
        assert!(close(seq.l2_norm().unwrap(), sqrt(1.5), 1e-14));
    }
}
