//! `nf analyze`: CSV traces of digit streams.

use clap::Args;

use nf_core::analysis::{geometric_checkpoints, linear_checkpoints, points_available, trace_base, TraceOptions};
use nf_core::construct::{parse_digits, parse_run};
use nf_core::numerics::window_index;
use nf_core::{Base, DigitBlock};

use crate::config::Config;
use crate::error::{CliError, CliResult};
use crate::output::{csv, emit, slurp};
use crate::{parse_base, parse_bases};

#[derive(Debug, Args)]
pub struct AnalyzeArgs {
    /// `nfdig/1` digit file or `nfrun/1` run file; `-` for stdin.
    #[arg(default_value = "-")]
    pub input: String,
    /// Bases to analyze; default the stream's own base.
    #[arg(long, value_parser = parse_base, value_delimiter = ',')]
    pub bases: Vec<Base>,
    /// `geometric` or `linear`.
    #[arg(long)]
    pub checkpoints: Option<String>,
    /// First geometric checkpoint.
    #[arg(long)]
    pub start: Option<u64>,
    /// Linear checkpoint spacing.
    #[arg(long)]
    pub step: Option<u64>,
    /// Largest N with extreme discrepancy.
    #[arg(long)]
    pub exact_cap: Option<u64>,
    /// Block length for the block discrepancy column; 0 leaves it empty.
    #[arg(long)]
    pub block_ell: Option<usize>,
    /// Print exact rationals `p/q` instead of decimals.
    #[arg(long)]
    pub exact: bool,
    /// Checkpoints at the stage boundaries of a run file.
    #[arg(long)]
    pub per_stage: bool,
    #[arg(long, default_value = "-")]
    pub out: String,
}

pub fn cmd_analyze(a: AnalyzeArgs, cfg: &Config) -> CliResult<()> {
    let text = slurp(&a.input)?;
    let (stream, stage_b) = if text.starts_with("nfrun/") {
        let x = parse_run(&text)?;
        let st = x.current();
        let stream = DigitBlock::new(st.s, st.base_digits()?)?;
        (stream, Some(x.stages.iter().map(|r| r.state.b).collect::<Vec<_>>()))
    } else if text.starts_with("nfdig/") {
        (parse_digits(text.as_bytes())?, None)
    } else {
        return Err(CliError::Invalid(format!("{}: not a digit file or run file", a.input)));
    };
    if stream.is_empty() {
        return Err(CliError::Invalid(format!("{}: no digits", a.input)));
    }
    let bases = match a.bases {
        b if !b.is_empty() => b,
        _ => match cfg.pick_opt::<String>(None, "bases")? {
            Some(s) => parse_bases(&s).map_err(CliError::Invalid)?,
            None => vec![stream.base()],
        },
    };
    let block_ell = cfg.pick(a.block_ell, "block-ell", 2)?;
    let exact = cfg.flag(a.exact, "exact")?;
    let opts = TraceOptions {
        exact_cap: cfg.pick(a.exact_cap, "exact-cap", 5000)?,
        exact,
        block_ell: (block_ell > 0).then_some(block_ell),
    };
    let policy = cfg.pick(a.checkpoints, "checkpoints", "geometric".to_string())?;
    let start = cfg.pick(a.start, "start", 64)?;
    let step = cfg.pick(a.step, "step", 1000)?;
    if a.per_stage && stage_b.is_none() {
        return Err(CliError::Invalid("--per-stage needs a run file".into()));
    }

    let mut rows = Vec::new();
    for &r in &bases {
        let total = points_available(stream.base(), stream.len(), r);
        let cps = match (&stage_b, a.per_stage) {
            (Some(bs), true) => {
                let mut v = bs.iter().map(|&b| window_index(b, r)).collect::<Result<Vec<_>, _>>()?;
                v.retain(|&n| n > 0 && n <= total);
                v.dedup();
                v
            }
            _ => match policy.as_str() {
                "geometric" => geometric_checkpoints(start, total),
                "linear" => linear_checkpoints(step, total),
                p => return Err(CliError::Invalid(format!("unknown checkpoint policy '{}'", p))),
            },
        };
        rows.extend(trace_base(&stream, r, &cps, &opts)?);
    }
    emit(&a.out, csv(&rows, exact).as_bytes())
}
