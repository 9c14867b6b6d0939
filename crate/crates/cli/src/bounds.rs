//! `nf bounds`: the bounds behind the constructions, big integers in full.

use std::fmt::Write as _;

use clap::Subcommand;
use num_bigint::BigUint;
use num_rational::BigRational;
use num_traits::ToPrimitive;

use nf_core::analysis::decimal;
use nf_core::basechange::padding;
use nf_core::construct::{ell_budget, transfer_length};
use nf_core::counting::{restricted_digit_params, Bound, Parity};
use nf_core::expsums::{cosine_constant, leveque_parameters, schmidt_p, ApproxReal, SchmidtConfig};
use nf_core::Base;

use crate::error::{CliError, CliResult};
use crate::{parse_base, parse_rational};

#[derive(Debug, Subcommand)]
pub enum BoundsCmd {
    /// Frequencies T = {1..m} and threshold delta for a tolerance.
    Leveque {
        #[arg(long, value_parser = parse_rational)]
        eps: BigRational,
    },
    /// Padding between consecutive bases.
    Padding {
        #[arg(long, value_parser = parse_base)]
        s0: Base,
        #[arg(long, value_parser = parse_base)]
        s1: Base,
    },
    /// Window length for transferring a family bound to the orbit.
    Transfer {
        #[arg(long, value_parser = parse_base)]
        r: Base,
        #[arg(long, value_parser = parse_rational)]
        eps: BigRational,
    },
    /// Exponent k, word count N0 and alphabet size for restricted digits.
    Restricted {
        #[arg(long, value_parser = parse_base)]
        s: Base,
        #[arg(long, value_parser = parse_rational)]
        eps: BigRational,
    },
    /// The extension length l(R, s, k, eps) with its terms. Report only.
    Ell {
        #[arg(long = "R", value_parser = parse_base, value_delimiter = ',')]
        r: Vec<Base>,
        #[arg(long, value_parser = parse_base)]
        s: Base,
        #[arg(long, default_value_t = 1)]
        k: u32,
        #[arg(long, value_parser = parse_rational)]
        eps: BigRational,
        #[arg(long, value_parser = parse_rational)]
        c: Option<BigRational>,
    },
    /// Enclosure of the cosine-product constant c~.
    Cosine {
        /// Radius at most 10^-digits.
        #[arg(long, default_value_t = 30)]
        digits: u32,
    },
}

fn bound(b: &Bound) -> String {
    match b {
        Bound::Exact(v) => v.to_string(),
        Bound::Beyond { log2 } => format!("beyond exact evaluation, about 2^{:.1}", log2),
    }
}

fn enclosure(a: &ApproxReal) -> String {
    format!("[{}, {}]", decimal(&a.lower(), 20), decimal(&a.upper(), 20))
}

fn leveque_lines(out: &mut String, eps: &BigRational) -> CliResult<BigUint> {
    let p = leveque_parameters(eps)?;
    let _ = writeln!(out, "T: {{1..{}}}", p.m);
    let _ = writeln!(out, "delta: {} ~ {}", p.delta, decimal(&p.delta, 12));
    Ok(p.m)
}

pub fn cmd_bounds(which: BoundsCmd) -> CliResult<()> {
    let mut out = String::new();
    match which {
        BoundsCmd::Leveque { eps } => {
            let _ = writeln!(out, "eps: {}", eps);
            leveque_lines(&mut out, &eps)?;
        }
        BoundsCmd::Padding { s0, s1 } => {
            let _ = writeln!(out, "p({}, {}): {}", s0, s1, padding(s0, s1));
        }
        BoundsCmd::Transfer { r, eps } => {
            let _ = writeln!(out, "l0({}, {}): {}", r, eps, transfer_length(r, &eps)?);
        }
        BoundsCmd::Restricted { s, eps } => {
            let parity = if s.value() % 2 == 1 { Parity::Odd } else { Parity::Even };
            let p = restricted_digit_params(s, &eps, parity)?;
            let _ = writeln!(out, "block length l: {}", p.ell);
            let _ = writeln!(out, "k0: {}", p.k);
            let _ = writeln!(out, "s~: {}^{} - {}", s, p.k, if parity == Parity::Odd { 1 } else { 2 });
            let _ = writeln!(out, "N0: {}", bound(&p.n0));
        }
        BoundsCmd::Ell { r, s, k, eps, c } => {
            let cfg = match c {
                Some(c) => SchmidtConfig::new(c)?,
                None => SchmidtConfig::default(),
            };
            let b = ell_budget(&r, s, k, &eps, &cfg)?;
            let _ = writeln!(out, "report only: l(R, s, k, eps) is not used to run desk constructions");
            let _ = writeln!(out, "c: {}", cfg.c);
            for (name, t) in &b.terms {
                let _ = writeln!(out, "term {}: {}", name, bound(t));
            }
            let _ = writeln!(out, "l: {}", bound(&b.value));
            let t = eps.clone() / BigRational::from_integer(10.into());
            let t2 = &t * &t;
            let _ = writeln!(out, "frequencies for (eps/10)^4:");
            let m = leveque_lines(&mut out, &(&t2 * &t2))?;
            let sk = s.pow(k)?;
            match m.to_u64() {
                Some(m) if !r.is_empty() => {
                    let _ = writeln!(out, "p: {}", schmidt_p(&r, m, sk)?);
                }
                _ => {}
            }
            let _ = writeln!(out, "c~: {}", enclosure(&cfg.c_tilde));
        }
        BoundsCmd::Cosine { digits } => {
            if digits == 0 || digits > 2000 {
                return Err(CliError::Invalid("--digits must lie in 1..=2000".into()));
            }
            let prec = BigRational::new(1.into(), num_traits::pow(num_bigint::BigInt::from(10), digits as usize));
            let _ = writeln!(out, "c~: {}", enclosure(&cosine_constant(&prec)?));
        }
    }
    print!("{}", out);
    Ok(())
}
