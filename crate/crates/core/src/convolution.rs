//! Exact law of `S_n = Σ X_i` for discrete summands by iterated
//! convolution.

use alloc::vec::Vec;

use crate::distributions::{Marginal, SummandSequence};
use crate::error::{Error, Result};
use crate::tails::NormOracle;

/// Largest merged support accepted.
pub const SUPPORT_CAP: usize = 1_000_000;
/// Sums closer than this (absolute) are merged into one atom.
pub const MERGE_TOL: f64 = 1e-12;

/// Sorts by value and merges runs within [`MERGE_TOL`] of the run's first value.
fn merge(mut raw: Vec<(f64, f64)>) -> Vec<(f64, f64)> {
    raw.sort_by(|a, b| a.0.total_cmp(&b.0));
    let mut out: Vec<(f64, f64)> = Vec::with_capacity(raw.len());
    let mut anchor = f64::NAN;
    for (v, p) in raw {
        match out.last_mut() {
            Some(last) if v - anchor <= MERGE_TOL => last.1 += p,
            _ => {
                anchor = v;
                out.push((v, p));
            }
        }
    }
    // Snap values that drifted onto zero so truncation at 0 stays exact.
    for a in &mut out {
        if a.0.abs() <= MERGE_TOL {
            a.0 = 0.0;
        }
    }
    out
}

fn convolve(acc: &[(f64, f64)], next: &[(f64, f64)]) -> Result<Vec<(f64, f64)>> {
    let pairs = acc.len().saturating_mul(next.len());
    if pairs > 64 * SUPPORT_CAP {
        return Err(Error::SupportExplosion {
            size: pairs,
            cap: SUPPORT_CAP,
        });
    }
    let mut raw = Vec::with_capacity(pairs);
    for &(v, p) in acc {
        for &(w, q) in next {
            raw.push((v + w, p * q));
        }
    }
    let merged = merge(raw);
    if merged.len() > SUPPORT_CAP {
        return Err(Error::SupportExplosion {
            size: merged.len(),
            cap: SUPPORT_CAP,
        });
    }
    Ok(merged)
}

/// The distribution of `S_n` as a discrete [`Marginal`].
///
/// Every entry must be discrete (atoms or scaled Rademacher). Equal sums
/// (within [`MERGE_TOL`]) are merged, so i.i.d. Rademacher sums stay at
/// `n + 1` atoms.
pub fn exact_sum_distribution(seq: &SummandSequence) -> Result<Marginal> {
    let mut acc: Vec<(f64, f64)> = alloc::vec![(0.0, 1.0)];
    for entry in seq.entries() {
        let support = entry.marginal.support().ok_or(Error::NotDiscrete)?;
        for _ in 0..entry.count {
            acc = convolve(&acc, &support)?;
        }
    }
    Ok(Marginal::from_sorted_atoms(acc))
}

/// `p ↦ ‖s_n‖_p` read off an exactly convolved distribution.
#[derive(Clone, Debug)]
pub struct ExactNormOracle {
    law: Marginal,
}

impl ExactNormOracle {
    pub fn new(seq: &SummandSequence) -> Result<Self> {
        Ok(Self {
            law: exact_sum_distribution(seq)?,
        })
    }

    pub fn from_law(law: Marginal) -> Self {
        Self { law }
    }

    pub fn law(&self) -> &Marginal {
        &self.law
    }
}

impl NormOracle for ExactNormOracle {
    fn norm(&mut self, p: f64) -> Result<f64> {
        self.law.lp_norm(p)
    }

    fn ess_sup(&self) -> Option<f64> {
        Some(self.law.ess_sup())
    }
}
