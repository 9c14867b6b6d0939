//! `nf construct` and `nf render`.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use clap::{Args, Subcommand};

use nf_core::analysis::{decimal, points_available};
use nf_core::construct::{
    load_run, parse_run, render_digits, thm2, thm4, thm5, write_digits, write_run, Caps, Clause, ConstructedReal,
    Enumeration, GSchedule, PredicateOracle, RunKind, Schedule,
};
use nf_core::expsums::SchmidtConfig;
use nf_core::Base;

use crate::config::Config;
use crate::error::{CliError, CliResult};
use crate::output::{emit, slurp};
use crate::{parse_base, parse_bases, parse_rational, RunFlags};

#[derive(Debug, Subcommand)]
pub enum Construction {
    /// Normal exactly to the bases satisfying a formula.
    Thm2 {
        /// `true`, `false` or `set:a,b,..`.
        #[arg(long, default_value = "true")]
        oracle: String,
        /// `minimal`, `complement:r,..` or `list:e,..`.
        #[arg(long = "enum", default_value = "minimal")]
        enumeration: String,
        #[command(flatten)]
        run: RunFlags,
    },
    /// Absolutely normal with base-s discrepancy above a schedule g.
    Thm4 {
        #[arg(long, value_parser = parse_base, default_value = "3")]
        s: Base,
        /// `log2` or `harmonic`.
        #[arg(long, default_value = "log2")]
        g: String,
        /// Write the f trace as CSV `N,f,m0`.
        #[arg(long = "f-csv", value_name = "PATH")]
        f_csv: Option<String>,
        #[command(flatten)]
        run: RunFlags,
    },
    /// Normal to every base of R, not simply normal to any base of S.
    Thm5 {
        /// Comma-separated bases, each the least of its class.
        #[arg(long = "R", value_parser = parse_base, value_delimiter = ',')]
        r: Vec<Base>,
        /// `3,5`, `list:..`, `complement:..` or `minimal`; default: every
        /// minimal base independent of R.
        #[arg(long = "S")]
        s: Option<String>,
        #[command(flatten)]
        run: RunFlags,
    },
}

#[derive(Debug, Args)]
pub struct RenderArgs {
    /// Run file, `-` for stdin.
    pub run: String,
    #[arg(long, value_parser = parse_base)]
    pub base: Base,
    /// Digits to render; default every determined digit.
    #[arg(long)]
    pub digits: Option<u64>,
    #[arg(long, default_value = "-")]
    pub out: String,
}

fn schedule(f: &RunFlags, cfg: &Config) -> CliResult<Schedule> {
    let mode = cfg.pick(f.mode.clone(), "mode", "desk".to_string())?;
    let mut sched = match mode.as_str() {
        "desk" => {
            let d = Caps::default();
            Schedule::desk(Caps {
                ell: cfg.pick(f.cap_ell, "cap-ell", d.ell)?,
                k: cfg.pick(f.cap_k, "cap-k", d.k)?,
                n: cfg.pick(f.cap_n, "cap-n", d.n)?,
                t: cfg.pick(f.cap_t, "cap-t", d.t)?,
                candidates: cfg.pick(f.candidates, "candidates", d.candidates)?,
            })
        }
        "faithful" => {
            if f.cap_ell.is_some() || f.cap_k.is_some() || f.cap_n.is_some() || f.cap_t.is_some() {
                return Err(CliError::Invalid("caps apply only to desk mode".into()));
            }
            Schedule::faithful(cfg.pick(f.budget, "budget", 1 << 20)?)
        }
        m => return Err(CliError::Invalid(format!("unknown mode '{}': use desk or faithful", m))),
    };
    if let Some(b) = f.budget {
        sched.budget = b;
    }
    sched.seed = cfg.pick(f.seed, "seed", 0)?;
    let c = match cfg.pick_opt(f.c.clone(), "c")? {
        Some(c) => parse_rational(&c).map_err(CliError::Invalid)?,
        None => SchmidtConfig::default().c,
    };
    let mut schmidt = SchmidtConfig::new(c)?;
    for o in &f.c_override {
        let parts: Vec<&str> = o.split(',').collect();
        let [r, s, c] = parts.as_slice() else {
            return Err(CliError::Invalid(format!("--c-override '{}': expected r,s,c", o)));
        };
        let r = parse_base(r).map_err(CliError::Invalid)?;
        let s = parse_base(s).map_err(CliError::Invalid)?;
        schmidt = schmidt.with_override(r.value(), s.value(), parse_rational(c).map_err(CliError::Invalid)?)?;
    }
    sched.schmidt = schmidt;
    sched.validate()?;
    Ok(sched)
}

fn resumed(f: &RunFlags, kind: &str) -> CliResult<Option<ConstructedReal>> {
    let Some(p) = &f.resume else { return Ok(None) };
    let x = load_run(p)?;
    if x.kind.name() != kind {
        return Err(CliError::Invalid(format!("{} holds a {} run, not {}", p.display(), x.kind.name(), kind)));
    }
    Ok(Some(x))
}

fn parse_s(desc: &str) -> CliResult<Enumeration> {
    let e = if desc.contains(':') || desc == "minimal" {
        Enumeration::parse(desc)?
    } else {
        Enumeration::finite(parse_bases(desc).map_err(CliError::Invalid)?)?
    };
    Ok(e)
}

pub fn cmd_construct(which: Construction, cfg: &Config) -> CliResult<()> {
    let (x, flags, f_csv) = match which {
        Construction::Thm2 { oracle, enumeration, run } => {
            let oracle = PredicateOracle::parse(&oracle)?;
            let stages = cfg.pick(run.stages, "stages", 8)?;
            let x = match resumed(&run, "thm2")? {
                Some(mut x) => {
                    thm2::extend(&mut x, &oracle, stages)?;
                    x
                }
                None => thm2::run(&oracle, Enumeration::parse(&enumeration)?, stages, schedule(&run, cfg)?)?,
            };
            (x, run, None)
        }
        Construction::Thm4 { s, g, f_csv, run } => {
            let stages = cfg.pick(run.stages, "stages", 20)?;
            let x = match resumed(&run, "thm4")? {
                Some(mut x) => {
                    thm4::extend(&mut x, stages)?;
                    x
                }
                None => thm4::run(s, GSchedule::parse(&g)?, stages, schedule(&run, cfg)?)?,
            };
            (x, run, f_csv)
        }
        Construction::Thm5 { r, s, run } => {
            let stages = cfg.pick(run.stages, "stages", 30)?;
            let x = match resumed(&run, "thm5")? {
                Some(mut x) => {
                    thm5::extend(&mut x, stages)?;
                    x
                }
                None => {
                    let ss = s.as_deref().map(parse_s).transpose()?;
                    thm5::run(r, ss, stages, schedule(&run, cfg)?)?
                }
            };
            (x, run, None)
        }
    };

    emit(&flags.out, write_run(&x)?.as_bytes())?;
    for spec in &flags.render {
        let (b, path) = spec
            .split_once('=')
            .ok_or_else(|| CliError::Invalid(format!("--render '{}': expected B=PATH", spec)))?;
        let b = parse_base(b).map_err(CliError::Invalid)?;
        emit(path, write_digits(&determined(&x, b, None)?.0).as_bytes())?;
    }
    let streamed = flags.out == "-" || flags.render.iter().any(|r| r.ends_with("=-")) || f_csv.as_deref() == Some("-");
    if let Some(path) = f_csv {
        let mut out = String::from("N,f,m0\n");
        for p in thm4::f_trace(&x)? {
            let _ = writeln!(out, "{},{},{}", p.n, decimal(&p.value, 12), p.m0);
        }
        emit(&path, out.as_bytes())?;
    }
    let report = report(&x)?;
    if streamed {
        eprint!("{}", report);
    } else {
        print!("{}", report);
    }
    Ok(())
}

/// Digits of the run's real in base `b`, at most `n` of them.
fn determined(x: &ConstructedReal, b: Base, n: Option<u64>) -> CliResult<(nf_core::DigitBlock, u64)> {
    let st = x.current();
    let avail = points_available(st.radix()?, st.digits.len(), b) + 1;
    let r = render_digits(x, b, n.unwrap_or(avail))?;
    Ok((r.digits, r.undetermined))
}

/// Summary of clauses, capped bounds and certificates.
pub fn report(x: &ConstructedReal) -> CliResult<String> {
    let mut out = String::new();
    let st = x.current();
    let desc = match &x.kind {
        RunKind::Thm2 { oracle, enumeration } => format!("thm2 oracle={} enum={}", oracle, enumeration.describe()),
        RunKind::Thm4 { s, g } => format!("thm4 s={} g={}", s, g.name()),
        RunKind::Thm5 { rs, ss } => format!(
            "thm5 R={} S={}",
            rs.iter().map(|b| b.to_string()).collect::<Vec<_>>().join(","),
            ss.describe()
        ),
    };
    let _ = writeln!(out, "run: {}", desc);
    let mut clauses: BTreeMap<String, u64> = BTreeMap::new();
    for rec in &x.stages[1..] {
        *clauses.entry(rec.clause.to_string()).or_default() += 1;
    }
    let counts: Vec<String> = clauses.iter().map(|(c, n)| format!("{} {}", c, n)).collect();
    let _ = writeln!(out, "stages: {} ({})", x.stage_count(), counts.join(", "));
    let _ = writeln!(out, "digits: {} in base {} (b = {})", st.digits.len() * st.k as usize, st.s, st.b);
    match x.schedule.caps() {
        None => {
            let _ = writeln!(out, "mode: faithful; every bound used as defined");
        }
        Some(c) => {
            let _ = writeln!(
                out,
                "mode: desk (ell {}, k {}, N {}, T {}, candidates {})",
                c.ell, c.k, c.n, c.t, c.candidates
            );
            // what -> (stages, used, faithful log2)
            let mut caps: BTreeMap<String, (u64, u64, f64)> = BTreeMap::new();
            for rec in &x.stages {
                for cap in &rec.capped {
                    let e = caps.entry(cap.what.clone()).or_insert((0, cap.used, 0.0));
                    e.0 += 1;
                    e.1 = e.1.max(cap.used);
                    e.2 = e.2.max(cap.faithful_log2);
                }
            }
            if caps.is_empty() {
                let _ = writeln!(out, "capped bounds: none");
            }
            for (what, (n, used, l2)) in caps {
                let _ = writeln!(
                    out,
                    "capped: {} in {} stages, used up to {}, faithful value at least 2^{:.1}",
                    what, n, used, l2
                );
            }
            let evaluated: u64 = x.stages.iter().map(|r| r.evaluated).sum();
            let passing: u64 = x.stages.iter().map(|r| r.passing).sum();
            let _ = writeln!(out, "candidates: {} evaluated, {} passing the checks", evaluated, passing);
        }
    }
    match &x.kind {
        RunKind::Thm2 { .. } => {
            let _ = writeln!(out, "note: x is adopted together with the other parameters when the counter advances");
        }
        RunKind::Thm4 { .. } => {
            let certs = thm4::certificates(x)?;
            let ok = certs.iter().filter(|c| c.holds()).count();
            let _ = writeln!(out, "certificates: {} of {} stage boundaries reach g(N)", ok, certs.len());
            if let Some(f) = thm4::f_trace(x)?.last() {
                let _ = writeln!(out, "f: {} at N = {}", f.value, f.n);
            }
        }
        RunKind::Thm5 { .. } => {
            let certs = thm5::certificates(x)?;
            let mut trig = 0;
            let mut ok = 0;
            for (i, c) in certs.iter().enumerate() {
                if x.stages.get(i + 2).is_some_and(|r| r.clause == Clause::Advance) {
                    trig += 1;
                    ok += c.holds() as u64;
                }
            }
            let _ = writeln!(out, "certificates: {} of {} trigger stages reach 1/(2s)", ok, trig);
        }
    }
    Ok(out)
}

pub fn cmd_render(a: RenderArgs) -> CliResult<()> {
    let x = parse_run(&slurp(&a.run)?)?;
    let (digits, undetermined) = determined(&x, a.base, a.digits)?;
    if undetermined > 0 {
        eprintln!("{} requested digits are not yet determined", undetermined);
    }
    emit(&a.out, write_digits(&digits).as_bytes())
}
