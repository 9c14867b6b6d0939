//! The `nf` command line: constructions, digit-stream analysis, bound
//! reports and property suites.

pub mod analyze;
pub mod bounds;
pub mod config;
pub mod construct;
pub mod error;
pub mod output;
pub mod verify;

use std::ffi::OsString;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use num_bigint::BigInt;
use num_rational::BigRational;

use nf_core::Base;

use crate::config::Config;
pub use crate::error::{CliError, CliResult};

#[derive(Debug, Parser)]
#[command(name = "nf", version, about = "Digit expansions with prescribed normality, and discrepancy traces")]
pub struct Cli {
    /// File of `key = value` defaults; flags take precedence.
    #[arg(long, global = true, value_name = "FILE")]
    pub config: Option<PathBuf>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run a stage construction and write its run file.
    Construct {
        #[command(subcommand)]
        which: construct::Construction,
    },
    /// CSV discrepancy trace of a digit file or run file.
    Analyze(analyze::AnalyzeArgs),
    /// Digits of a run's real in any base.
    Render(construct::RenderArgs),
    /// Print the bounds behind the constructions.
    Bounds {
        #[command(subcommand)]
        which: bounds::BoundsCmd,
    },
    /// Run a property suite; exit 1 on a counterexample.
    Verify {
        #[command(subcommand)]
        suite: verify::Suite,
    },
}

/// Parse `p/q`, an integer, or a decimal like `0.25`.
pub fn parse_rational(s: &str) -> Result<BigRational, String> {
    let s = s.trim();
    let bad = || format!("'{}' is not a rational number", s);
    if let Some((p, q)) = s.split_once('/') {
        let p: BigInt = p.trim().parse().map_err(|_| bad())?;
        let q: BigInt = q.trim().parse().map_err(|_| bad())?;
        if q == BigInt::from(0) {
            return Err(format!("'{}' has a zero denominator", s));
        }
        return Ok(BigRational::new(p, q));
    }
    if let Some((i, f)) = s.split_once('.') {
        let digits = format!("{}{}", i, f);
        let n: BigInt = digits.parse().map_err(|_| bad())?;
        return Ok(BigRational::new(n, num_traits::pow(BigInt::from(10), f.len())));
    }
    s.parse::<BigInt>().map(BigRational::from_integer).map_err(|_| bad())
}

pub fn parse_base(s: &str) -> Result<Base, String> {
    let v: u64 = s.trim().parse().map_err(|_| format!("'{}' is not a base", s))?;
    Base::new(v).map_err(|e| e.to_string())
}

/// Comma-separated bases.
pub fn parse_bases(s: &str) -> Result<Vec<Base>, String> {
    s.split(',').filter(|t| !t.trim().is_empty()).map(parse_base).collect()
}

/// Flags shared by the constructions. Unset values fall back to the
/// config file, then to built-in defaults.
#[derive(Debug, Args, Clone, Default)]
pub struct RunFlags {
    /// Stages to run (added to the loaded run with --resume).
    #[arg(long)]
    pub stages: Option<u64>,
    /// `desk` (capped bounds) or `faithful`.
    #[arg(long)]
    pub mode: Option<String>,
    #[arg(long)]
    pub cap_ell: Option<u64>,
    #[arg(long)]
    pub cap_k: Option<u32>,
    #[arg(long)]
    pub cap_n: Option<u64>,
    #[arg(long)]
    pub cap_t: Option<u64>,
    /// Candidates evaluated per stage in desk mode.
    #[arg(long)]
    pub candidates: Option<u64>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Faithful mode: most candidates or frequencies per stage.
    #[arg(long)]
    pub budget: Option<u64>,
    /// Default constant of the cosine-product estimate.
    #[arg(long)]
    pub c: Option<String>,
    /// Per-pair constant `r,s,c`; repeatable.
    #[arg(long = "c-override", value_name = "R,S,C")]
    pub c_override: Vec<String>,
    /// Continue the run stored in this file.
    #[arg(long, value_name = "FILE")]
    pub resume: Option<PathBuf>,
    /// Where to write the run file; `-` for stdout.
    #[arg(long, default_value = "-")]
    pub out: String,
    /// Write the determined digits in base B to PATH (`-` for stdout); repeatable.
    #[arg(long, value_name = "B=PATH")]
    pub render: Vec<String>,
}

/// Parse `argv`, run the command, and return the process exit code.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    match dispatch(cli) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {}", e);
            e.exit_code()
        }
    }
}

fn dispatch(cli: Cli) -> CliResult<()> {
    let cfg = match &cli.config {
        Some(p) => Config::load(p)?,
        None => Config::default(),
    };
    match cli.command {
        Command::Construct { which } => construct::cmd_construct(which, &cfg),
        Command::Analyze(a) => analyze::cmd_analyze(a, &cfg),
        Command::Render(a) => construct::cmd_render(a),
        Command::Bounds { which } => bounds::cmd_bounds(which),
        Command::Verify { suite } => verify::cmd_verify(suite),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rationals() {
        let q = |n: i64, d: i64| BigRational::new(n.into(), d.into());
        assert_eq!(parse_rational("1/2").unwrap(), q(1, 2));
        assert_eq!(parse_rational("3").unwrap(), q(3, 1));
        assert_eq!(parse_rational("0.25").unwrap(), q(1, 4));
        assert!(parse_rational("1/0").is_err());
        assert!(parse_rational("x").is_err());
    }

    #[test]
    fn base_lists() {
        assert_eq!(parse_bases("2,3").unwrap().len(), 2);
        assert!(parse_bases("1").is_err());
    }
}
