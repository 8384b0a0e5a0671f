//! Argument parsing and command drivers.

use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use latala_core::tails::DEFAULT_P_MAX;
use latala_core::{
    f_series, kappa, latala_norm, BoundConstants, SummandSequence, TailConfig, DEFAULT_REL_TOL,
    LATALA_LOWER_CONSTANT,
};
use serde::Serialize;

use crate::checks::{norms_over_grid, sandwich_check, tail_report, PtMode};
use crate::error::{CliError, Result};
use crate::input::load_sequence;
use crate::oracle::{McConfig, Oracle, OracleEstimate, Statistic};
use crate::report::{ser_p_t, Format, Sink};
use crate::verify;

pub const DEFAULT_VERIFY_SEED: u64 = 7;
pub const DEFAULT_SAMPLES: u64 = 200_000;

#[derive(Debug, Parser)]
#[command(
    name = "latala",
    version,
    about = "Moments and tails of sums of independent random variables"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Print the constant kappa, f(kappa) and the classical constant.
    Kappa(OutputArgs),
    /// Orlicz-type norm lambda* over one or more orders p.
    Norm(NormArgs),
    /// Two-sided moment bounds, with the oracle value of ||S||_p.
    Bounds(BoundsArgs),
    /// Tail bounds over a grid of thresholds.
    Tails(TailsArgs),
    /// Run the verification suite over the built-in corpus.
    Verify(VerifyArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Mode {
    /// Exact convolution of discrete summands.
    Exact,
    /// Monte Carlo simulation (needs --seed).
    Mc,
    /// Marginal-only surrogate for norms of the truncated sum.
    Marginal,
}

#[derive(Debug, Args)]
pub struct OutputArgs {
    #[arg(long, value_enum, default_value = "json", env = "LATALA_FORMAT")]
    pub format: Format,
    /// Write output here instead of stdout.
    #[arg(long, env = "LATALA_OUT")]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct InputArgs {
    /// JSON file, or inline JSON starting with '[' or '{'.
    #[arg(long, env = "LATALA_INPUT")]
    pub input: String,
}

#[derive(Debug, Args)]
pub struct OrderArgs {
    #[arg(long, conflicts_with = "p_grid")]
    pub p: Option<f64>,
    /// Comma-separated, strictly increasing orders.
    #[arg(long, env = "LATALA_P_GRID")]
    pub p_grid: Option<String>,
}

#[derive(Debug, Args)]
pub struct OracleArgs {
    #[arg(long, value_enum, default_value = "exact", env = "LATALA_MODE")]
    pub mode: Mode,
    #[arg(long, default_value_t = DEFAULT_SAMPLES, env = "LATALA_SAMPLES")]
    pub samples: u64,
    #[arg(long, env = "LATALA_SEED")]
    pub seed: Option<u64>,
    #[arg(long, default_value_t = 1, env = "LATALA_WORKERS")]
    pub workers: usize,
}

#[derive(Debug, Args)]
pub struct ConstantArgs {
    #[arg(long, env = "LATALA_ALPHA")]
    pub alpha: Option<f64>,
    #[arg(long, env = "LATALA_DELTA")]
    pub delta: Option<f64>,
    #[arg(long, env = "LATALA_C_LOWER")]
    pub c_lower: Option<f64>,
    #[arg(long, env = "LATALA_C_UPPER")]
    pub c_upper: Option<f64>,
    /// Largest order searched for p_t.
    #[arg(long, default_value_t = DEFAULT_P_MAX, env = "LATALA_P_MAX")]
    pub p_max: f64,
    /// Apply the tail bounds to nonnegative summands as well.
    #[arg(long)]
    pub allow_nonnegative: bool,
}

#[derive(Debug, Args)]
pub struct NormArgs {
    #[command(flatten)]
    pub input: InputArgs,
    #[command(flatten)]
    pub orders: OrderArgs,
    #[arg(long, default_value_t = DEFAULT_REL_TOL, env = "LATALA_REL_TOL")]
    pub rel_tol: f64,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Args)]
pub struct BoundsArgs {
    #[command(flatten)]
    pub input: InputArgs,
    #[command(flatten)]
    pub orders: OrderArgs,
    #[command(flatten)]
    pub oracle: OracleArgs,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Args)]
pub struct TailsArgs {
    #[command(flatten)]
    pub input: InputArgs,
    #[arg(long, conflicts_with = "t_grid")]
    pub t: Option<f64>,
    /// Comma-separated, strictly increasing thresholds.
    #[arg(long, env = "LATALA_T_GRID")]
    pub t_grid: Option<String>,
    #[command(flatten)]
    pub oracle: OracleArgs,
    #[command(flatten)]
    pub constants: ConstantArgs,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    #[arg(long, default_value_t = DEFAULT_SAMPLES, env = "LATALA_SAMPLES")]
    pub samples: u64,
    #[arg(long, default_value_t = DEFAULT_VERIFY_SEED, env = "LATALA_SEED")]
    pub seed: u64,
    #[arg(long, default_value_t = 1, env = "LATALA_WORKERS")]
    pub workers: usize,
    #[command(flatten)]
    pub constants: ConstantArgs,
    #[command(flatten)]
    pub output: OutputArgs,
}

/// Parses a comma-separated grid; it must be nonempty, finite and strictly
/// increasing.
pub fn parse_grid(name: &str, text: &str) -> Result<Vec<f64>> {
    let values = text
        .split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(|s| {
            s.parse::<f64>()
                .map_err(|e| CliError::Usage(format!("--{name}: cannot parse {s:?}: {e}")))
        })
        .collect::<Result<Vec<f64>>>()?;
    check_grid(name, values)
}

fn check_grid(name: &str, values: Vec<f64>) -> Result<Vec<f64>> {
    if values.is_empty() {
        return Err(CliError::Usage(format!("--{name} must not be empty")));
    }
    if let Some(v) = values.iter().find(|v| !v.is_finite()) {
        return Err(CliError::Usage(format!(
            "--{name} has a non-finite value {v}"
        )));
    }
    if values.windows(2).any(|w| w[0] >= w[1]) {
        return Err(CliError::Usage(format!(
            "--{name} must be strictly increasing"
        )));
    }
    Ok(values)
}

fn grid(name: &str, single: Option<f64>, list: Option<&str>) -> Result<Vec<f64>> {
    match (single, list) {
        (Some(v), _) => check_grid(name, vec![v]),
        (None, Some(text)) => parse_grid(name, text),
        (None, None) => Err(CliError::Usage(format!(
            "one of --{} or --{name} is required",
            name.trim_end_matches("-grid")
        ))),
    }
}

impl ConstantArgs {
    pub fn tail_config(&self) -> Result<TailConfig> {
        let d = BoundConstants::default();
        let constants = BoundConstants {
            c_lower: self.c_lower.unwrap_or(d.c_lower),
            c_upper: self.c_upper.unwrap_or(d.c_upper),
            alpha: self.alpha.unwrap_or(d.alpha),
            delta: self.delta.unwrap_or(d.delta),
        };
        for (name, v) in [
            ("c-lower", constants.c_lower),
            ("c-upper", constants.c_upper),
            ("alpha", constants.alpha),
            ("delta", constants.delta),
        ] {
            if !(v > 0.0 && v.is_finite()) {
                return Err(CliError::Usage(format!(
                    "--{name} must be positive and finite, got {v}"
                )));
            }
        }
        if !(self.p_max > 2.0 && self.p_max.is_finite()) {
            return Err(CliError::Usage(format!(
                "--p-max must exceed 2, got {}",
                self.p_max
            )));
        }
        Ok(TailConfig {
            constants,
            p_max: self.p_max,
            allow_nonnegative: self.allow_nonnegative,
        })
    }
}

impl OracleArgs {
    /// The ground-truth oracle and the `p_t` mode for a sequence.
    fn resolve(&self, seq: &SummandSequence) -> Result<(Option<Oracle>, PtMode)> {
        let mc = |seed| McConfig::new(self.samples, seed, self.workers);
        match self.mode {
            Mode::Exact => {
                if !seq.is_discrete() {
                    return Err(CliError::Usage(
                        "--mode exact needs discrete summands; use --mode mc with --seed".into(),
                    ));
                }
                Ok((Some(Oracle::Exact), PtMode::Oracle))
            }
            Mode::Mc => {
                let seed = self
                    .seed
                    .ok_or_else(|| CliError::Usage("--mode mc requires --seed".into()))?;
                Ok((Some(Oracle::MonteCarlo(mc(seed)?)), PtMode::Oracle))
            }
            Mode::Marginal => {
                let oracle = match self.seed {
                    Some(seed) => Some(Oracle::Auto(mc(seed)?)),
                    None if seq.is_discrete() => Some(Oracle::Exact),
                    None => None,
                };
                Ok((oracle, PtMode::Marginal))
            }
        }
    }
}

#[derive(Serialize)]
pub struct KappaRecord {
    pub kappa: f64,
    pub f_of_kappa: f64,
    pub latala_constant: f64,
    pub ratio: f64,
}

#[derive(Serialize)]
struct NormRecord {
    p: f64,
    lambda_star: f64,
    bracket_lo: f64,
    bracket_hi: f64,
    iterations: u32,
    product_at_lambda: f64,
    log_product_at_lambda: f64,
}

#[derive(Serialize)]
struct BoundsRecord {
    p: f64,
    regime: &'static str,
    lambda_star: f64,
    lower: f64,
    upper: f64,
    lower_constant: f64,
    upper_constant: f64,
    oracle_norm: Option<f64>,
    oracle_method: Option<&'static str>,
    oracle_error_radius: Option<f64>,
    within: Option<bool>,
}

#[derive(Serialize)]
struct Components {
    lower_max_term: f64,
    lower_exp_term: f64,
    upper_max_term: f64,
    upper_exp_term: f64,
}

#[derive(Serialize)]
struct TailJson {
    t: f64,
    #[serde(serialize_with = "ser_p_t")]
    p_t: Option<f64>,
    max_tail: f64,
    max_tail_lower: f64,
    max_tail_upper: f64,
    lower: f64,
    upper: f64,
    small_t: bool,
    components: Components,
    oracle_tail_t: Option<OracleEstimate>,
    oracle_tail_4t: Option<OracleEstimate>,
}

#[derive(Serialize)]
struct TailCsv {
    t: f64,
    #[serde(serialize_with = "ser_p_t")]
    p_t: Option<f64>,
    max_tail: f64,
    max_tail_lower: f64,
    max_tail_upper: f64,
    lower: f64,
    upper: f64,
    small_t: bool,
    lower_max_term: f64,
    lower_exp_term: f64,
    upper_max_term: f64,
    upper_exp_term: f64,
    oracle_tail_t: Option<f64>,
    oracle_tail_t_radius: Option<f64>,
    oracle_tail_4t: Option<f64>,
    oracle_tail_4t_radius: Option<f64>,
}

fn method_name(e: &OracleEstimate) -> &'static str {
    match e.method {
        crate::oracle::Method::Exact => "exact",
        crate::oracle::Method::MonteCarlo => "monte_carlo",
    }
}

pub fn kappa_record() -> Result<KappaRecord> {
    let k = kappa();
    Ok(KappaRecord {
        kappa: k,
        f_of_kappa: f_series(k)?,
        latala_constant: LATALA_LOWER_CONSTANT,
        ratio: k / LATALA_LOWER_CONSTANT,
    })
}

fn cmd_norm(args: &NormArgs, sink: &mut Sink) -> Result<i32> {
    let seq = load_sequence(&args.input.input)?;
    let ps = grid("p-grid", args.orders.p, args.orders.p_grid.as_deref())?;
    for p in ps {
        let r = latala_norm(&seq, p, args.rel_tol)?;
        sink.emit_flat(&NormRecord {
            p,
            lambda_star: r.lambda_star,
            bracket_lo: r.bracket.0,
            bracket_hi: r.bracket.1,
            iterations: r.iterations,
            product_at_lambda: r.product_at_lambda,
            log_product_at_lambda: r.log_product_at_lambda,
        })?;
    }
    Ok(0)
}

fn cmd_bounds(args: &BoundsArgs, sink: &mut Sink) -> Result<i32> {
    let seq = load_sequence(&args.input.input)?;
    let ps = grid("p-grid", args.orders.p, args.orders.p_grid.as_deref())?;
    let (oracle, _) = args.oracle.resolve(&seq)?;
    let norms = match &oracle {
        Some(o) => norms_over_grid(&seq, &ps, o)?
            .into_iter()
            .map(Some)
            .collect(),
        None => vec![None; ps.len()],
    };
    for (p, norm) in ps.into_iter().zip(norms) {
        let b = latala_core::moment_bounds(&seq, p)?;
        let check = norm.map(|n| sandwich_check(&seq, p, n)).transpose()?;
        sink.emit_flat(&BoundsRecord {
            p,
            regime: b.regime.name(),
            lambda_star: b.lambda_star,
            lower: b.lower,
            upper: b.upper,
            lower_constant: b.lower_constant,
            upper_constant: b.upper_constant,
            oracle_norm: norm.map(|n| n.value),
            oracle_method: norm.as_ref().map(method_name),
            oracle_error_radius: norm.map(|n| n.error_radius),
            within: check.map(|c| c.pass),
        })?;
    }
    Ok(0)
}

fn cmd_tails(args: &TailsArgs, sink: &mut Sink) -> Result<i32> {
    let seq = load_sequence(&args.input.input)?;
    let ts = grid("t-grid", args.t, args.t_grid.as_deref())?;
    let config = args.constants.tail_config()?;
    let (oracle, mode) = args.oracle.resolve(&seq)?;
    for t in ts {
        let r = match (&oracle, mode) {
            (Some(o), _) => tail_report(&seq, t, &config, o, mode)?,
            (None, PtMode::Marginal) => tail_report(&seq, t, &config, &Oracle::Exact, mode)?,
            (None, PtMode::Oracle) => unreachable!("oracle modes always resolve an oracle"),
        };
        let tail_t = oracle
            .map(|o| o.estimate(&seq, Statistic::Tail(t)))
            .transpose()?;
        let tail_4t = oracle
            .map(|o| o.estimate(&seq, Statistic::Tail(4.0 * t)))
            .transpose()?;
        let star = r.max_tail.exact.unwrap_or(r.max_tail.upper);
        let c = &r.components;
        let json = TailJson {
            t,
            p_t: r.p_t,
            max_tail: star,
            max_tail_lower: r.max_tail.lower,
            max_tail_upper: r.max_tail.upper,
            lower: r.lower_bound,
            upper: r.upper_bound,
            small_t: r.small_t_regime,
            components: Components {
                lower_max_term: c.lower_max_term,
                lower_exp_term: c.lower_exp_term,
                upper_max_term: c.upper_max_term,
                upper_exp_term: c.upper_exp_term,
            },
            oracle_tail_t: tail_t,
            oracle_tail_4t: tail_4t,
        };
        let csv = TailCsv {
            t,
            p_t: r.p_t,
            max_tail: star,
            max_tail_lower: r.max_tail.lower,
            max_tail_upper: r.max_tail.upper,
            lower: r.lower_bound,
            upper: r.upper_bound,
            small_t: r.small_t_regime,
            lower_max_term: c.lower_max_term,
            lower_exp_term: c.lower_exp_term,
            upper_max_term: c.upper_max_term,
            upper_exp_term: c.upper_exp_term,
            oracle_tail_t: tail_t.map(|e| e.value),
            oracle_tail_t_radius: tail_t.map(|e| e.error_radius),
            oracle_tail_4t: tail_4t.map(|e| e.value),
            oracle_tail_4t_radius: tail_4t.map(|e| e.error_radius),
        };
        sink.emit(&json, &csv)?;
    }
    Ok(0)
}

fn cmd_verify(args: &VerifyArgs, sink: &mut Sink) -> Result<i32> {
    let config = args.constants.tail_config()?;
    let mc = McConfig::new(args.samples, args.seed, args.workers)?;
    let outcome = verify::run(&config, mc)?;
    outcome.write(sink)?;
    Ok(if outcome.summary.pass { 0 } else { 1 })
}

fn output_of(command: &Command) -> &OutputArgs {
    match command {
        Command::Kappa(o) => o,
        Command::Norm(a) => &a.output,
        Command::Bounds(a) => &a.output,
        Command::Tails(a) => &a.output,
        Command::Verify(a) => &a.output,
    }
}

/// Executes a parsed command, writing records to `out` (or `--out`).
pub fn execute(cli: &Cli, stdout: &mut dyn Write) -> Result<i32> {
    let output = output_of(&cli.command);
    let mut sink = Sink::new(output.format);
    let code = match &cli.command {
        Command::Kappa(_) => {
            sink.emit_flat(&kappa_record()?)?;
            0
        }
        Command::Norm(a) => cmd_norm(a, &mut sink)?,
        Command::Bounds(a) => cmd_bounds(a, &mut sink)?,
        Command::Tails(a) => cmd_tails(a, &mut sink)?,
        Command::Verify(a) => cmd_verify(a, &mut sink)?,
    };
    sink.finish(output.out.as_deref(), stdout)?;
    Ok(code)
}

/// Parses `args` (including the program name) and runs; returns the exit
/// code. Errors go to `stderr`.
pub fn run<I, S>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = S>,
    S: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = write!(stderr, "{}", e.render());
            if !e.use_stderr() {
                let _ = write!(stdout, "{}", e.render());
            }
            return code;
        }
    };
    match execute(&cli, stdout) {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(stderr, "error: {e}");
            e.exit_code()
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grids_are_validated() {
        assert_eq!(parse_grid("t-grid", "2, 4,8").unwrap(), vec![2.0, 4.0, 8.0]);
        assert!(parse_grid("t-grid", "").is_err());
        assert!(parse_grid("t-grid", "2,2").is_err());
        assert!(parse_grid("t-grid", "3,2").is_err());
        assert!(parse_grid("t-grid", "1,inf").is_err());
        assert!(parse_grid("t-grid", "1,x").is_err());
    }

    #[test]
    fn kappa_record_fields() {
        let r = kappa_record().unwrap();
        assert!((r.f_of_kappa - std::f64::consts::E).abs() < 1e-10);
        assert!((r.ratio - r.kappa / r.latala_constant).abs() < 1e-15);
    }

    #[test]
    fn mc_mode_needs_seed() {
        let seq =
            crate::input::parse_sequence(r#"{"kind":"rademacher","scale":1,"count":2}"#).unwrap();
        let args = OracleArgs {
            mode: Mode::Mc,
            samples: 1000,
            seed: None,
            workers: 1,
        };
        assert!(matches!(args.resolve(&seq), Err(CliError::Usage(_))));
    }

    #[test]
    fn exact_mode_rejects_continuous() {
        let seq =
            crate::input::parse_sequence(r#"{"kind":"exponential","scale":1,"count":2}"#).unwrap();
        let args = OracleArgs {
            mode: Mode::Exact,
            samples: 1000,
            seed: Some(1),
            workers: 1,
        };
        assert!(matches!(args.resolve(&seq), Err(CliError::Usage(_))));
    }
}
