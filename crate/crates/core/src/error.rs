use alloc::string::String;

pub type Result<T, E = Error> = core::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("invalid marginal: {0}")]
    InvalidMarginal(String),
    #[error("summand sequence must contain at least one entry with positive count")]
    EmptySequence,
    #[error("lambda must be positive and finite, got {0}")]
    NonPositiveLambda(f64),
    #[error("moment order p = {p} is below the minimum {min}")]
    OrderTooSmall { p: f64, min: f64 },
    #[error("threshold must be nonnegative and finite, got {0}")]
    InvalidThreshold(f64),
    #[error("argument {value} outside the domain {domain}")]
    OutOfDomain { value: f64, domain: &'static str },
    #[error("quadrature did not converge within the refinement cap")]
    QuadratureDiverged,
    #[error("sequence mixes symmetric and nonnegative summands")]
    MixedRegime,
    #[error("{0}")]
    UnsupportedRegime(&'static str),
    #[error("bracket expansion exceeded {0} doublings; moments are probably not finite")]
    BracketExpansion(u32),
    #[error("relative tolerance {0} outside [1e-12, 1e-3]")]
    ToleranceOutOfRange(f64),
    #[error("t = {t} is below the small-t threshold {threshold}")]
    BelowSmallT { t: f64, threshold: f64 },
    #[error("exact convolution needs discrete summands")]
    NotDiscrete,
    #[error("exact convolution support grew to {size} atoms, cap is {cap}")]
    SupportExplosion { size: usize, cap: usize },
    #[error("inconsistent moments: second moment {second} < mean^2 = {mean_sq}")]
    InconsistentMoments { second: f64, mean_sq: f64 },
    #[error("oracle failure: {0}")]
    Oracle(String),
}
