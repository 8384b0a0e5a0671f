//! Ground truth for `S_n`: exact laws by convolution for discrete systems,
//! seeded Monte Carlo otherwise.
//!
//! Monte Carlo runs are split across `workers` threads. Worker `w` draws
//! samples `[w·N/W, (w+1)·N/W)` from a ChaCha8 stream seeded by hashing
//! `(seed, tag, w)`, and partial results are combined in worker order, so
//! the output depends only on `(seed, samples, workers)`.

use latala_core::{
    exact_sum_distribution, max_tail_bounds, Marginal, NormOracle, Sampler, SummandSequence,
};
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{CliError, Result};

/// Two-sided 99.9% normal quantile used for Monte Carlo error radii.
pub const Z_999: f64 = 3.29;
pub const MIN_SAMPLES: u64 = 1_000;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    Exact,
    MonteCarlo,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct OracleEstimate {
    pub value: f64,
    pub method: Method,
    /// 0 for exact values, else the half-width of a 99.9% interval.
    pub error_radius: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub samples: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
}

impl OracleEstimate {
    pub fn exact(value: f64) -> Self {
        Self {
            value,
            method: Method::Exact,
            error_radius: 0.0,
            samples: None,
            seed: None,
        }
    }

    pub fn lo(&self) -> f64 {
        self.value - self.error_radius
    }

    pub fn hi(&self) -> f64 {
        self.value + self.error_radius
    }

    /// Monte Carlo probabilities under `10/samples` are too noisy to
    /// compare against bounds.
    pub fn is_resolved_probability(&self) -> bool {
        match (self.method, self.samples) {
            (Method::MonteCarlo, Some(n)) => self.value >= 10.0 / n as f64,
            _ => true,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Statistic {
    /// `P(|S_n| > t)`.
    Tail(f64),
    /// `‖S_n‖_p`.
    PNorm(f64),
    /// `P(X_n^* > t)`.
    MaxTail(f64),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct McConfig {
    pub samples: u64,
    pub seed: u64,
    pub workers: usize,
}

impl McConfig {
    pub fn new(samples: u64, seed: u64, workers: usize) -> Result<Self> {
        if samples < MIN_SAMPLES {
            return Err(CliError::Usage(format!(
                "Monte Carlo needs at least {MIN_SAMPLES} samples, got {samples}"
            )));
        }
        if workers == 0 {
            return Err(CliError::Usage("workers must be at least 1".into()));
        }
        Ok(Self {
            samples,
            seed,
            workers,
        })
    }

    /// Same sample budget on an independent stream family.
    pub fn with_tag(self, tag: u64) -> Self {
        Self {
            seed: splitmix64(self.seed ^ splitmix64(tag.wrapping_add(0x5EED))),
            ..self
        }
    }
}

fn splitmix64(mut x: u64) -> u64 {
    x = x.wrapping_add(0x9E37_79B9_7F4A_7C15);
    x = (x ^ (x >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    x = (x ^ (x >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    x ^ (x >> 31)
}

/// The ChaCha8 stream of worker `w`.
pub fn worker_rng(seed: u64, worker: usize) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(splitmix64(seed ^ splitmix64(worker as u64 + 1)))
}

/// Runs `body(rng, count)` on each worker's share of the samples and
/// returns the partial results in worker order.
pub fn run_workers<A, F>(cfg: &McConfig, body: F) -> Vec<A>
where
    A: Send,
    F: Fn(&mut ChaCha8Rng, u64) -> A + Sync,
{
    let w = cfg.workers as u64;
    let share = |i: u64| cfg.samples * (i + 1) / w - cfg.samples * i / w;
    if cfg.workers == 1 {
        return vec![body(&mut worker_rng(cfg.seed, 0), cfg.samples)];
    }
    std::thread::scope(|scope| {
        let handles: Vec<_> = (0..cfg.workers)
            .map(|i| {
                let body = &body;
                scope.spawn(move || body(&mut worker_rng(cfg.seed, i), share(i as u64)))
            })
            .collect();
        handles
            .into_iter()
            .map(|h| h.join().expect("Monte Carlo worker panicked"))
            .collect()
    })
}

/// Expanded per-summand samplers.
pub fn samplers(seq: &SummandSequence) -> Vec<Sampler> {
    seq.iter_expanded().map(Marginal::sampler).collect()
}

/// Running `ln Σ e^{l_i}` and `ln Σ e^{2 l_i}` with a shared shift.
#[derive(Clone, Copy, Debug)]
pub struct LogMoments {
    shift: f64,
    sum: f64,
    sum_sq: f64,
    count: u64,
}

impl Default for LogMoments {
    fn default() -> Self {
        Self {
            shift: f64::NEG_INFINITY,
            sum: 0.0,
            sum_sq: 0.0,
            count: 0,
        }
    }
}

impl LogMoments {
    pub fn push(&mut self, log_value: f64) {
        self.count += 1;
        if log_value == f64::NEG_INFINITY {
            return;
        }
        if log_value > self.shift {
            let r = (self.shift - log_value).exp();
            self.sum *= r;
            self.sum_sq *= r * r;
            self.shift = log_value;
        }
        let z = (log_value - self.shift).exp();
        self.sum += z;
        self.sum_sq += z * z;
    }

    pub fn merge(&mut self, other: &Self) {
        self.count += other.count;
        if other.shift == f64::NEG_INFINITY {
            return;
        }
        if other.shift > self.shift {
            let r = (self.shift - other.shift).exp();
            self.sum *= r;
            self.sum_sq *= r * r;
            self.shift = other.shift;
        }
        let r = (other.shift - self.shift).exp();
        self.sum += other.sum * r;
        self.sum_sq += other.sum_sq * r * r;
    }

    /// `(‖Z‖_p, radius)` for `Z = e^{l/p}`, i.e. the mean of `e^{l}` turned
    /// into a p-norm with a delta-method error radius.
    pub fn p_norm(&self, p: f64) -> (f64, f64) {
        if self.count == 0 || self.sum == 0.0 {
            return (0.0, 0.0);
        }
        let n = self.count as f64;
        let mean = self.sum / n;
        let var = (self.sum_sq / n - mean * mean).max(0.0);
        let se = (var / n).sqrt();
        let log_mean = self.shift + mean.ln();
        let value = (log_mean / p).exp();
        // d(m^{1/p}) = m^{1/p}/(p·m) dm
        let radius = value * Z_999 * se / (p * mean);
        (value, radius)
    }
}

fn proportion(hits: u64, n: u64, cfg: &McConfig) -> OracleEstimate {
    let q = hits as f64 / n as f64;
    OracleEstimate {
        value: q,
        method: Method::MonteCarlo,
        error_radius: Z_999 * (q * (1.0 - q) / n as f64).sqrt(),
        samples: Some(n),
        seed: Some(cfg.seed),
    }
}

/// Monte Carlo estimate of `stat` for `S_n`.
pub fn mc_estimate(
    seq: &SummandSequence,
    stat: Statistic,
    cfg: &McConfig,
) -> Result<OracleEstimate> {
    let draws = samplers(seq);
    match stat {
        Statistic::Tail(t) | Statistic::MaxTail(t) => {
            if !(t >= 0.0) {
                return Err(latala_core::Error::InvalidThreshold(t).into());
            }
            let use_max = matches!(stat, Statistic::MaxTail(_));
            let hits: u64 = run_workers(cfg, |rng, count| {
                let mut hits = 0u64;
                for _ in 0..count {
                    let (mut sum, mut max) = (0.0f64, 0.0f64);
                    for d in &draws {
                        let x = d.sample(rng);
                        sum += x;
                        max = max.max(x.abs());
                    }
                    let v = if use_max { max } else { sum.abs() };
                    hits += (v > t) as u64;
                }
                hits
            })
            .into_iter()
            .sum();
            Ok(proportion(hits, cfg.samples, cfg))
        }
        Statistic::PNorm(p) => {
            if !(p >= 1.0) {
                return Err(latala_core::Error::OrderTooSmall { p, min: 1.0 }.into());
            }
            let parts = run_workers(cfg, |rng, count| {
                let mut acc = LogMoments::default();
                for _ in 0..count {
                    let s: f64 = draws.iter().map(|d| d.sample(rng)).sum();
                    acc.push(p * s.abs().ln());
                }
                acc
            });
            let mut acc = LogMoments::default();
            for part in &parts {
                acc.merge(part);
            }
            let (value, error_radius) = acc.p_norm(p);
            Ok(OracleEstimate {
                value,
                method: Method::MonteCarlo,
                error_radius,
                samples: Some(cfg.samples),
                seed: Some(cfg.seed),
            })
        }
    }
}

/// Exact value of `stat`; needs discrete summands within the convolution cap.
pub fn exact_estimate(seq: &SummandSequence, stat: Statistic) -> Result<OracleEstimate> {
    let value = match stat {
        Statistic::MaxTail(t) => max_tail_bounds(seq, t)?.exact.unwrap_or(f64::NAN),
        Statistic::Tail(t) => exact_sum_distribution(seq)?.tail(t)?,
        Statistic::PNorm(p) => exact_sum_distribution(seq)?.lp_norm(p)?,
    };
    Ok(OracleEstimate::exact(value))
}

/// Where ground-truth values come from.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Oracle {
    Exact,
    MonteCarlo(McConfig),
    /// Exact when the sequence is discrete, Monte Carlo otherwise.
    Auto(McConfig),
}

impl Oracle {
    pub fn uses_exact(&self, seq: &SummandSequence) -> bool {
        match self {
            Oracle::Exact => true,
            Oracle::MonteCarlo(_) => false,
            Oracle::Auto(_) => seq.is_discrete(),
        }
    }

    pub fn estimate(&self, seq: &SummandSequence, stat: Statistic) -> Result<OracleEstimate> {
        match self {
            Oracle::Exact => exact_estimate(seq, stat),
            Oracle::MonteCarlo(cfg) => mc_estimate(seq, stat, cfg),
            Oracle::Auto(cfg) => {
                // Max tails are exact from the marginals for every family.
                if seq.is_discrete() || matches!(stat, Statistic::MaxTail(_)) {
                    exact_estimate(seq, stat)
                } else {
                    mc_estimate(seq, stat, cfg)
                }
            }
        }
    }

    pub fn mc_config(&self) -> Option<McConfig> {
        match self {
            Oracle::Exact => None,
            Oracle::MonteCarlo(c) | Oracle::Auto(c) => Some(*c),
        }
    }
}

/// `p ↦ ‖s‖_p` from one fixed Monte Carlo sample of `|s|` (common random
/// numbers keep the map monotone in `p`).
#[derive(Clone, Debug)]
pub struct McNormOracle {
    log_abs: Vec<f64>,
    ess_sup: f64,
}

impl McNormOracle {
    pub fn new(seq: &SummandSequence, cfg: &McConfig) -> Self {
        let draws = samplers(seq);
        let parts = run_workers(cfg, |rng, count| {
            (0..count)
                .map(|_| draws.iter().map(|d| d.sample(rng)).sum::<f64>().abs().ln())
                .collect::<Vec<f64>>()
        });
        let log_abs: Vec<f64> = parts.into_iter().flatten().collect();
        let ess_sup = log_abs
            .iter()
            .copied()
            .fold(f64::NEG_INFINITY, f64::max)
            .exp();
        Self { log_abs, ess_sup }
    }

    /// `‖s‖_p` with its 99.9% radius, from the stored sample.
    pub fn estimate(&self, p: f64, seed: u64) -> OracleEstimate {
        let mut acc = LogMoments::default();
        for &l in &self.log_abs {
            acc.push(p * l);
        }
        let (value, error_radius) = acc.p_norm(p);
        OracleEstimate {
            value,
            method: Method::MonteCarlo,
            error_radius,
            samples: Some(self.log_abs.len() as u64),
            seed: Some(seed),
        }
    }

    pub fn norm_at(&self, p: f64) -> f64 {
        let max = self
            .log_abs
            .iter()
            .copied()
            .fold(f64::NEG_INFINITY, f64::max);
        if max == f64::NEG_INFINITY {
            return 0.0;
        }
        let sum: f64 = self.log_abs.iter().map(|&l| (p * (l - max)).exp()).sum();
        let n = self.log_abs.len() as f64;
        (max + (sum.ln() - n.ln()) / p).exp()
    }
}

impl NormOracle for McNormOracle {
    fn norm(&mut self, p: f64) -> latala_core::Result<f64> {
        Ok(self.norm_at(p))
    }

    fn ess_sup(&self) -> Option<f64> {
        Some(self.ess_sup)
    }
}
