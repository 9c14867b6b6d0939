//! `nf verify`: property suites. Exit 0 iff no counterexample.

use clap::Subcommand;
use num_bigint::BigUint;
use num_rational::BigRational;
use num_traits::One;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use nf_core::basechange::{adic_subinterval, nested_refinement, AdicInterval};
use nf_core::counting::{base4_defect_survey, block_length_for, suffix_orbit};
use nf_core::discrepancy::{block_discrepancy, extreme_discrepancy, oracle, partition_bound};
use nf_core::expsums::{candidate_survey, leveque_parameters, weyl_power, Threshold};
use nf_core::numerics::window_index;
use nf_core::{AdicRational, Base, DigitBlock, Interval, UnitSequence};

use crate::error::{CliError, CliResult};
use crate::{parse_base, parse_rational};

#[derive(Debug, Subcommand)]
pub enum Suite {
    /// Closed-form extreme discrepancy against the brute-force oracle.
    DiscrepancyOracle {
        #[arg(long, default_value_t = 1000)]
        n: u64,
        #[arg(long, default_value_t = 200)]
        max_len: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Small equipartition discrepancy implies small extreme discrepancy.
    Partition {
        #[arg(long, default_value_t = 10_000)]
        n: u64,
        #[arg(long, value_parser = parse_rational, default_value = "1/3")]
        eps: BigRational,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Small Weyl sums at every frequency imply small extreme discrepancy.
    Leveque {
        #[arg(long, default_value_t = 1000)]
        n: u64,
        #[arg(long, value_parser = parse_rational, default_value = "1/2")]
        eps: BigRational,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Small block discrepancy of a binary word implies small discrepancy
    /// of its orbit.
    Block {
        #[arg(long, default_value_t = 100_000)]
        n: u64,
        #[arg(long, value_parser = parse_rational, default_value = "1/2")]
        eps: BigRational,
        /// Word length.
        #[arg(long, default_value_t = 217)]
        len: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// At least half of the restricted-digit extensions pass the
    /// exponential-sum test.
    #[command(alias = "lemma317")]
    CandidateSurvey {
        #[arg(long = "R", value_parser = parse_base, value_delimiter = ',', default_value = "2")]
        r: Vec<Base>,
        #[arg(long, value_parser = parse_base, default_value = "3")]
        s: Base,
        #[arg(long, default_value_t = 20)]
        ell: u64,
        /// Tolerance whose frequencies and threshold are used.
        #[arg(long, value_parser = parse_rational, default_value = "1")]
        eps: BigRational,
        /// Enumerate every candidate.
        #[arg(long)]
        exhaustive: bool,
        /// Sample this many candidates instead.
        #[arg(long, default_value_t = 4096)]
        samples: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Fraction of binary words whose base-4 reading keeps 5/8 of its
    /// base-2 orbit in [0, 1/2), and its trend in N.
    #[command(alias = "lemma313")]
    Base4Defect {
        #[arg(long = "N", default_value_t = 14)]
        n: u64,
    },
    /// Adic subintervals and nested refinements stay inside their parents.
    BaseChange {
        #[arg(long, default_value_t = 1000)]
        n: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}

fn random_sequence(rng: &mut ChaCha8Rng, n: usize) -> UnitSequence {
    let denom = rng.gen_range(1u64..=1000);
    let nums: Vec<u64> = (0..n).map(|_| rng.gen_range(0..denom)).collect();
    UnitSequence::from_u64(denom, &nums).expect("points below the denominator")
}

/// Points `(i + u_i)/n` in random order with `u_i` on a grid of `jitter`.
fn stratified_sequence(rng: &mut ChaCha8Rng, n: usize, jitter: u64) -> UnitSequence {
    let denom = n as u64 * jitter;
    let mut nums: Vec<u64> = (0..n as u64).map(|i| i * jitter + rng.gen_range(0..jitter)).collect();
    for i in (1..nums.len()).rev() {
        nums.swap(i, rng.gen_range(0..=i));
    }
    UnitSequence::from_u64(denom, &nums).expect("points below the denominator")
}

fn mixed(rng: &mut ChaCha8Rng, i: u64, max_len: usize, jitter: u64) -> UnitSequence {
    let n = rng.gen_range(1..=max_len);
    if i % 2 == 0 {
        stratified_sequence(rng, n, jitter)
    } else {
        random_sequence(rng, n)
    }
}

fn show(seq: &UnitSequence) -> String {
    let pts: Vec<String> = seq.points().iter().map(|p| p.to_string()).collect();
    format!("[{}]", pts.join(", "))
}

fn summary(name: &str, trials: u64, hits: u64) {
    println!("{}: {} trials, hypothesis held in {}, 0 counterexamples: pass", name, trials, hits);
}

pub fn cmd_verify(suite: Suite) -> CliResult<()> {
    match suite {
        Suite::DiscrepancyOracle { n, max_len, seed } => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            for _ in 0..n {
                let len = rng.gen_range(1..=max_len.max(1));
                let seq = random_sequence(&mut rng, len);
                let (a, b) = (extreme_discrepancy(&seq)?, oracle::extreme_discrepancy(&seq)?);
                if a != b {
                    return Err(CliError::Counterexample(format!(
                        "closed form {} but oracle {} for {}",
                        a,
                        b,
                        show(&seq)
                    )));
                }
            }
            println!("discrepancy-oracle: {} sequences agree: pass", n);
        }
        Suite::Partition { n, eps, seed } => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let mut hits = 0;
            for i in 0..n {
                let seq = mixed(&mut rng, i, 300, 8);
                if partition_bound(&eps, &seq)?.1.is_some() {
                    hits += 1;
                    let d = extreme_discrepancy(&seq)?;
                    if d >= eps {
                        return Err(CliError::Counterexample(format!(
                            "partition value small but extreme discrepancy {} >= {} for {}",
                            d,
                            eps,
                            show(&seq)
                        )));
                    }
                }
            }
            summary("partition", n, hits);
        }
        Suite::Leveque { n, eps, seed } => {
            let p = leveque_parameters(&eps)?;
            let ts = p
                .frequencies(1 << 16)
                .ok_or_else(|| CliError::Budget(format!("{} frequencies exceed 2^16", p.m)))?;
            let floor = BigRational::new(1.into(), BigUint::from(2u32).pow(256).into());
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let mut hits = 0;
            for i in 0..n {
                let seq = mixed(&mut rng, i, 200, 4);
                let mut small = true;
                for &t in &ts {
                    let mut prec = BigRational::new(1.into(), (1u64 << 20).into());
                    let below = loop {
                        if let Some(d) = weyl_power(&seq, t, &prec)?.lt(&p.delta) {
                            break d;
                        }
                        if prec < floor {
                            return Err(CliError::Budget(format!(
                                "Weyl sum at frequency {} not separated from delta for {}",
                                t,
                                show(&seq)
                            )));
                        }
                        prec = &prec * &prec;
                    };
                    if !below {
                        small = false;
                        break;
                    }
                }
                if small {
                    hits += 1;
                    let d = extreme_discrepancy(&seq)?;
                    if d >= eps {
                        return Err(CliError::Counterexample(format!(
                            "Weyl sums below delta but extreme discrepancy {} >= {} for {}",
                            d,
                            eps,
                            show(&seq)
                        )));
                    }
                }
            }
            summary("leveque", n, hits);
        }
        Suite::Block { n, eps, len, seed } => {
            let two = Base::new(2)?;
            let ell = block_length_for(two, &eps) as usize;
            let limit = &eps * &eps / BigRational::from_integer(18.into());
            let pattern = [0u64, 0, 0, 1, 0, 1, 1, 1];
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let mut hits = 0;
            for i in 0..n {
                let w: Vec<u64> = if i % 2 == 0 {
                    (0..len).map(|_| rng.gen_range(0..2)).collect()
                } else {
                    let shift = rng.gen_range(0..8);
                    let mut w: Vec<u64> = (0..len).map(|j| pattern[(j + shift) % 8]).collect();
                    for _ in 0..rng.gen_range(0..6) {
                        let at = rng.gen_range(0..len);
                        w[at] ^= 1;
                    }
                    w
                };
                let block = DigitBlock::new(two, w)?;
                if block_discrepancy(&block, ell)? < limit {
                    hits += 1;
                    let d = extreme_discrepancy(&suffix_orbit(&block))?;
                    if d >= eps {
                        let bits: String = block.digits().iter().map(|d| d.to_string()).collect();
                        return Err(CliError::Counterexample(format!(
                            "block discrepancy below {} but orbit discrepancy {} for {}",
                            limit, d, bits
                        )));
                    }
                }
            }
            println!("block length {}, threshold {}", ell, limit);
            summary("block", n, hits);
        }
        Suite::CandidateSurvey { r, s, ell, eps, exhaustive, samples, seed } => {
            let p = leveque_parameters(&eps)?;
            let ts = p.frequencies(64).ok_or_else(|| CliError::Budget(format!("{} frequencies exceed 64", p.m)))?;
            let max_r = *r.iter().max().ok_or_else(|| CliError::Invalid("--R needs a base".into()))?;
            let w = window_index(ell, max_r)?;
            let thr = Threshold::below(&p.delta * BigRational::from_integer((w * w).into()));
            let eta = AdicRational::zero(s, 1)?;
            let sample = (!exhaustive).then_some(samples);
            let res = candidate_survey(&eta, s, 1, 0, ell, &r, &ts, &thr, sample, seed)?;
            println!(
                "candidate-survey: {} of {} pass ({}{})",
                res.passing,
                res.evaluated,
                res.fraction,
                if res.estimate { ", sampled" } else { "" }
            );
            if res.fraction * BigRational::from_integer(2.into()) < BigRational::one() {
                return Err(CliError::Counterexample("fewer than half of the candidates pass".into()));
            }
            println!("candidate-survey: pass");
        }
        Suite::Base4Defect { n } => {
            if n < 2 {
                return Err(CliError::Invalid("--N must be at least 2".into()));
            }
            let mut fractions = Vec::new();
            for m in 2..=n {
                let (count, f) = base4_defect_survey(m)?;
                println!("N={} count={} fraction={}", m, count, f);
                fractions.push((m, f));
            }
            // the 5/8 cut rounds differently for each N mod 4
            let by_class = (0..4).all(|c| {
                let v: Vec<&BigRational> = fractions.iter().filter(|(m, _)| m % 4 == c).map(|(_, f)| f).collect();
                v.windows(2).all(|w| w[0] <= w[1])
            });
            println!("nondecreasing within each class of N mod 4: {}", if by_class { "yes" } else { "no" });
            let even: Vec<&(u64, BigRational)> = fractions.iter().filter(|(m, _)| m % 2 == 0 && *m >= 8).collect();
            if let Some(w) = even.windows(2).find(|w| w[1].1 < w[0].1) {
                return Err(CliError::Counterexample(format!(
                    "fraction over even N >= 8 is not nondecreasing: {} at N={} then {} at N={}",
                    w[0].1, w[0].0, w[1].1, w[1].0
                )));
            }
            println!("base4-defect: nondecreasing over even N from 8: pass");
        }
        Suite::BaseChange { n, seed } => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            for _ in 0..n {
                let s = Base::new(rng.gen_range(2..=12))?;
                let den = rng.gen_range(2u64..=10_000);
                let a = rng.gen_range(0..den);
                let b = rng.gen_range(a + 1..=den);
                let lo = BigRational::new(a.into(), den.into());
                let hi = BigRational::new(b.into(), den.into());
                let iv = Interval::new(lo.clone(), hi.clone())?;
                let cell = adic_subinterval(&iv, s)?;
                let wide = cell.length() * BigRational::from_integer((2 * s.value()).into()) >= iv.measure();
                if !cell.within(&lo, &hi) || !wide {
                    return Err(CliError::Counterexample(format!("{}-adic cell {} for {}", s, cell, iv)));
                }

                let s0 = Base::new(rng.gen_range(2..=12))?;
                let s1 = Base::new(rng.gen_range(2..=12))?;
                let bidx = rng.gen_range(0..200u64);
                let depth = window_index(bidx, s0)?;
                let idx = BigUint::from(rng.gen_range(0..u64::MAX)) % s0.big_pow(depth);
                let parent = AdicInterval::new(s0, 1, depth, idx)?;
                let (_, child) = nested_refinement(&parent, bidx, s1)?;
                if !child.within(&parent.lower(), &parent.upper()) {
                    return Err(CliError::Counterexample(format!("refinement {} leaves {}", child, parent)));
                }
            }
            println!("base-change: {} cases contained: pass", n);
        }
    }
    Ok(())
}
