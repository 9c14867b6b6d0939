//! Stage constructions of reals with prescribed normality, and the
//! extension-length budget they are sized by.
//!
//! A run is a [`ConstructedReal`]: an append-only list of stage records,
//! each holding the stage variables after the stage and the digits it
//! appended. The real lies in the half-open cell of the last record.

mod budget;
mod io;
mod oracle;
mod stage;
pub mod thm2;
pub mod thm4;
pub mod thm5;

#[cfg(test)]
mod tests;

use std::fmt;

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::basechange::AdicInterval;
use crate::expsums::SchmidtConfig;
use crate::{AdicRational, Base, DigitBlock, Error, Result};

pub use budget::{ell_budget, ell_budget_log2, transfer_length, EllBudget};
pub use io::{load_run, parse_digits, parse_run, save_digits, save_run, write_digits, write_run};
pub use oracle::{Enumeration, PredicateOracle, Steps, DEFAULT_STEP_BUDGET};
pub use stage::{digit_avoidance_bound, orbit_cell_discrepancy};

/// Per-stage maxima used in place of the faithful bounds.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Caps {
    /// Extension length `l`.
    pub ell: u64,
    /// Exponent `k` of the restricted alphabet.
    pub k: u32,
    /// Word-count threshold `N`.
    pub n: u64,
    /// Number of frequencies in `T`.
    pub t: u64,
    /// Candidates evaluated per stage.
    pub candidates: u64,
}

impl Default for Caps {
    fn default() -> Self {
        Self { ell: 64, k: 2, n: 16, t: 2, candidates: 256 }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Mode {
    /// Bounds exactly as defined. Runs fail once a bound exceeds the budget.
    Faithful,
    /// Bounds capped, existence claims checked on the candidate set.
    Desk(Caps),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Schedule {
    pub mode: Mode,
    pub schmidt: SchmidtConfig,
    pub seed: u64,
    /// Faithful mode: the most candidates or frequencies a stage may use.
    pub budget: u64,
}

impl Schedule {
    pub fn desk(caps: Caps) -> Self {
        Self { mode: Mode::Desk(caps), schmidt: SchmidtConfig::default(), seed: 0, budget: 1 << 20 }
    }

    pub fn faithful(budget: u64) -> Self {
        Self { mode: Mode::Faithful, schmidt: SchmidtConfig::default(), seed: 0, budget }
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn caps(&self) -> Option<&Caps> {
        match &self.mode {
            Mode::Desk(c) => Some(c),
            Mode::Faithful => None,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if let Some(c) = self.caps() {
            if c.ell == 0 || c.k == 0 || c.n == 0 || c.candidates == 0 {
                return Err(Error::InvalidInput("caps must be positive".into()));
            }
            if c.t < 2 {
                return Err(Error::InvalidInput("the frequency cap must be at least 2".into()));
            }
        } else if self.budget == 0 {
            return Err(Error::InvalidInput("budget must be positive".into()));
        }
        Ok(())
    }
}

/// The stage variables.
///
/// `xi` is kept as its digits in base `s^k`, `digits.len() = <b; s^k>`
/// except after a change of `k` in the one-base construction, where the
/// old digits are zero-padded to a whole number of new digits.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StageState {
    pub stage: u64,
    pub s: Base,
    pub k: u32,
    pub digits: Vec<u64>,
    pub b: u64,
    pub eps: BigRational,
    pub ell: u64,
    pub x: u64,
    pub rs: Vec<Base>,
    pub c: u64,
    pub kbar: u32,
}

impl StageState {
    /// `s^k`.
    pub fn radix(&self) -> Result<Base> {
        self.s.pow(self.k)
    }

    pub fn xi(&self) -> Result<AdicRational> {
        let r = self.radix()?;
        AdicRational::new(self.s, self.k, DigitBlock::new(r, self.digits.clone())?)
    }

    /// Numerator of `xi` over `(s^k)^len`.
    pub fn numerator(&self) -> Result<BigUint> {
        let r = self.radix()?.value();
        Ok(self.digits.iter().fold(BigUint::zero(), |acc, &d| acc * r + d))
    }

    /// `[xi, xi + (s^k)^-len)`.
    pub fn interval(&self) -> Result<AdicInterval> {
        AdicInterval::new(self.s, self.k, self.digits.len() as u64, self.numerator()?)
    }

    /// Digits of `xi` in base `s`.
    pub fn base_digits(&self) -> Result<Vec<u64>> {
        Ok(DigitBlock::new(self.radix()?, self.digits.clone())?.expand(self.s, self.k)?.into_digits())
    }

    /// Largest element of `R`, or 2 when `R` is empty.
    pub fn max_r(&self) -> Base {
        self.rs.last().copied().unwrap_or(Base::new(2).expect("2 is a base"))
    }
}

/// Which branch a stage took.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Clause {
    Init,
    /// The discrepancy of the current base is already small: keep everything.
    Hold,
    /// The counter would advance but the position is not yet large enough.
    Wait,
    /// New base, counter and tolerance adopted.
    Advance,
    /// One-base construction: whether `R` grew and whether `k` was re-chosen.
    Step { grow: bool, refine: bool },
}

impl fmt::Display for Clause {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Clause::Init => write!(f, "init"),
            Clause::Hold => write!(f, "hold"),
            Clause::Wait => write!(f, "wait"),
            Clause::Advance => write!(f, "advance"),
            Clause::Step { grow, refine } => {
                write!(f, "step")?;
                if *grow {
                    write!(f, "+grow")?;
                }
                if *refine {
                    write!(f, "+refine")?;
                }
                Ok(())
            }
        }
    }
}

impl std::str::FromStr for Clause {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "init" => Clause::Init,
            "hold" => Clause::Hold,
            "wait" => Clause::Wait,
            "advance" => Clause::Advance,
            _ => {
                let rest = s.strip_prefix("step").ok_or_else(|| Error::Parse(format!("unknown clause '{}'", s)))?;
                let flags: Vec<&str> = rest.split('+').filter(|t| !t.is_empty()).collect();
                if flags.iter().any(|f| *f != "grow" && *f != "refine") {
                    return Err(Error::Parse(format!("unknown clause '{}'", s)));
                }
                Clause::Step { grow: flags.contains(&"grow"), refine: flags.contains(&"refine") }
            }
        })
    }
}

/// The block appended in a stage: `digits` in base `radix` starting after
/// position `start`, each below `alphabet`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Extension {
    pub radix: Base,
    pub start: u64,
    pub alphabet: u64,
    pub digits: Vec<u64>,
}

/// A bound replaced by a cap: the value used and `log2` of a lower
/// estimate of the faithful value.
#[derive(Clone, Debug, PartialEq)]
pub struct Capped {
    pub what: String,
    pub used: u64,
    pub faithful_log2: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct StageRecord {
    pub state: StageState,
    pub clause: Clause,
    pub a: u64,
    pub extension: Option<Extension>,
    pub evaluated: u64,
    pub passing: u64,
    pub capped: Vec<Capped>,
}

/// A decreasing schedule `g` for the one-base construction.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum GSchedule {
    /// `1 / (2 ceil(log2(n + 2)))`.
    Log2,
    /// `1 / (n + 2)`.
    Harmonic,
}

impl GSchedule {
    pub fn value(&self, n: u64) -> BigRational {
        match self {
            GSchedule::Log2 => {
                let m = n + 2;
                let ceil_log = 64 - (m - 1).leading_zeros() as u64;
                BigRational::new(1.into(), BigInt::from(2 * ceil_log))
            }
            GSchedule::Harmonic => BigRational::new(1.into(), BigInt::from(n) + 2),
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            GSchedule::Log2 => "log2",
            GSchedule::Harmonic => "harmonic",
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "log2" => Ok(GSchedule::Log2),
            "harmonic" => Ok(GSchedule::Harmonic),
            _ => Err(Error::Parse(format!("unknown schedule g '{}'", s))),
        }
    }
}

/// Which construction a run follows, with its inputs.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum RunKind {
    /// Normal exactly to the bases satisfying the oracle's formula.
    Thm2 { oracle: String, enumeration: Enumeration },
    /// Absolutely normal with base-`s` discrepancy above `g`.
    Thm4 { s: Base, g: GSchedule },
    /// Normal to `R`, not simply normal to any base enumerated by `S`.
    Thm5 { rs: Vec<Base>, ss: Enumeration },
}

impl RunKind {
    pub fn name(&self) -> &'static str {
        match self {
            RunKind::Thm2 { .. } => "thm2",
            RunKind::Thm4 { .. } => "thm4",
            RunKind::Thm5 { .. } => "thm5",
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ConstructedReal {
    pub kind: RunKind,
    pub schedule: Schedule,
    pub stages: Vec<StageRecord>,
}

impl ConstructedReal {
    pub fn current(&self) -> &StageState {
        &self.stages.last().expect("a run always has its initial stage").state
    }

    /// Number of stages run after the initial one.
    pub fn stage_count(&self) -> u64 {
        self.current().stage
    }

    pub fn interval(&self) -> Result<AdicInterval> {
        self.current().interval()
    }
}

/// `f(n) = value` with the stage whose tolerance it is.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FPoint {
    pub n: u64,
    pub value: BigRational,
    pub m0: u64,
}

/// A finite-prefix lower bound on the base-`base` discrepancy of the
/// first `n` orbit points: `simple` is the simple discrepancy of the
/// prefix and `avoidance` the bound from an interval the orbit avoids.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Certificate {
    pub stage: u64,
    pub n: u64,
    pub base: Base,
    pub avoidance: Option<BigRational>,
    pub simple: BigRational,
    pub target: BigRational,
}

impl Certificate {
    /// The best certified lower bound.
    pub fn bound(&self) -> BigRational {
        match &self.avoidance {
            Some(a) if *a > self.simple => a.clone(),
            _ => self.simple.clone(),
        }
    }

    pub fn holds(&self) -> bool {
        self.bound() >= self.target
    }
}

/// Digits of the run's real that are fixed by its current cell.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Rendered {
    pub digits: DigitBlock,
    /// Requested digits not yet determined.
    pub undetermined: u64,
}

/// The first `n` base-`b` digits shared by every point of the run's cell.
pub fn render_digits(x: &ConstructedReal, b: Base, n: u64) -> Result<Rendered> {
    let i = x.interval()?;
    render_interval(&i.lower(), &i.upper(), b, n)
}

/// The first `n` base-`b` digits shared by every point of `[lo, hi)`.
pub fn render_interval(lo: &BigRational, hi: &BigRational, b: Base, n: u64) -> Result<Rendered> {
    if lo >= hi || *lo < BigRational::zero() || *hi > BigRational::one() {
        return Err(Error::InvalidInterval { lower: lo.to_string(), upper: hi.to_string() });
    }
    let scale = BigRational::from_integer(BigInt::from(b.big_pow(n)));
    let first = (lo * &scale).floor().to_integer();
    let last: BigInt = (hi * &scale).ceil().to_integer() - 1;
    let da = stage::to_digits(&first.to_biguint().expect("nonnegative"), b.value(), n as usize);
    let db = stage::to_digits(&last.to_biguint().expect("nonnegative"), b.value(), n as usize);
    let common = da.iter().zip(&db).take_while(|(p, q)| p == q).count();
    Ok(Rendered { digits: DigitBlock::new(b, da[..common].to_vec())?, undetermined: n - common as u64 })
}

impl fmt::Display for StageState {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "stage {}: s={} k={} b={} eps={} l={} c={} x={} |R|={}",
            self.stage,
            self.s,
            self.k,
            self.b,
            self.eps,
            self.ell,
            self.c,
            self.x,
            self.rs.len()
        )
    }
}
