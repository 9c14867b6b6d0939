//! Predicate oracles and enumerations with infinite repetition.

use std::fmt;
use std::sync::Arc;

use crate::numerics::{minimal_representative, mult_dependent};
use crate::{Base, Error, Result};

/// Default number of steps a single oracle call may take.
pub const DEFAULT_STEP_BUDGET: u64 = 1 << 20;

/// Step counter handed to every oracle evaluation.
#[derive(Debug)]
pub struct Steps {
    used: u64,
    budget: u64,
}

impl Steps {
    pub fn new(budget: u64) -> Self {
        Self { used: 0, budget }
    }

    /// Count one step, failing once the budget is spent.
    pub fn tick(&mut self) -> Result<()> {
        self.used += 1;
        if self.used > self.budget {
            return Err(Error::OracleBudget(self.budget));
        }
        Ok(())
    }

    pub fn used(&self) -> u64 {
        self.used
    }
}

type Theta = dyn Fn(u64, u64, u64, u64, &mut Steps) -> Result<bool> + Send + Sync;

/// `theta(r, x, y, z)` of the formula `phi(r) = forall x exists y forall z theta`.
///
/// The evaluator must terminate on every input. A per-call step budget
/// turns a runaway evaluation into [`Error::OracleBudget`].
#[derive(Clone)]
pub struct PredicateOracle {
    theta: Arc<Theta>,
    description: String,
    budget: u64,
}

impl fmt::Debug for PredicateOracle {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("PredicateOracle").field("description", &self.description).field("budget", &self.budget).finish()
    }
}

impl PredicateOracle {
    pub fn from_fn(
        description: impl Into<String>,
        budget: u64,
        theta: impl Fn(u64, u64, u64, u64, &mut Steps) -> Result<bool> + Send + Sync + 'static,
    ) -> Self {
        Self { theta: Arc::new(theta), description: description.into(), budget }
    }

    /// `phi` true for every base.
    pub fn always_true() -> Self {
        Self::from_fn("true", DEFAULT_STEP_BUDGET, |_, _, _, _, st| {
            st.tick()?;
            Ok(true)
        })
    }

    /// `theta = (z < y)`, so `phi` is false for every base.
    pub fn always_false() -> Self {
        Self::from_fn("false", DEFAULT_STEP_BUDGET, |_, _, y, z, st| {
            st.tick()?;
            Ok(z < y)
        })
    }

    /// `phi(r)` true exactly for `r` in `set`: `theta = (r in set) or (z < y)`.
    pub fn in_set(set: &[u64]) -> Self {
        let mut set = set.to_vec();
        set.sort_unstable();
        set.dedup();
        let desc = format!("set:{}", set.iter().map(|v| v.to_string()).collect::<Vec<_>>().join(","));
        Self::from_fn(desc, DEFAULT_STEP_BUDGET, move |r, _, y, z, st| {
            st.tick()?;
            Ok(set.binary_search(&r).is_ok() || z < y)
        })
    }

    /// The built-in oracle named by `desc`: `true`, `false` or `set:a,b,..`.
    pub fn parse(desc: &str) -> Result<Self> {
        match desc {
            "true" => Ok(Self::always_true()),
            "false" => Ok(Self::always_false()),
            _ => {
                let list = desc
                    .strip_prefix("set:")
                    .ok_or_else(|| Error::Parse(format!("unknown oracle '{}'", desc)))?;
                let set = list
                    .split(',')
                    .filter(|t| !t.is_empty())
                    .map(|t| t.trim().parse::<u64>().map_err(|e| Error::Parse(format!("oracle set: {}", e))))
                    .collect::<Result<Vec<_>>>()?;
                Ok(Self::in_set(&set))
            }
        }
    }

    pub fn description(&self) -> &str {
        &self.description
    }

    pub fn eval(&self, r: u64, x: u64, y: u64, z: u64) -> Result<bool> {
        let mut st = Steps::new(self.budget);
        (self.theta)(r, x, y, z, &mut st)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
enum Source {
    /// Minimal representatives, skipping the classes of `exclude`.
    Minimal { exclude: Vec<Base> },
    Finite(Vec<Base>),
}

/// An enumeration in which every element appears infinitely often.
///
/// Positions are 1-based. Round `r = 1, 2, ...` lists the first
/// `min(r, n)` elements in order, so the sequence starts
/// `e0, e0 e1, e0 e1 e2, ...`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Enumeration {
    source: Source,
}

impl Enumeration {
    /// All minimal representatives `2, 3, 5, 6, 7, 10, ...`.
    pub fn minimal() -> Self {
        Self { source: Source::Minimal { exclude: Vec::new() } }
    }

    /// Minimal representatives independent of every base in `rs`.
    pub fn minimal_excluding(rs: &[Base]) -> Self {
        Self { source: Source::Minimal { exclude: rs.to_vec() } }
    }

    /// A finite list, each element repeated forever.
    pub fn finite(elements: Vec<Base>) -> Result<Self> {
        if elements.is_empty() {
            return Err(Error::InvalidInput("enumeration needs at least one element".into()));
        }
        let mut seen: Vec<Base> = Vec::new();
        for &e in &elements {
            if seen.contains(&e) {
                return Err(Error::InvalidInput(format!("{} listed twice", e)));
            }
            seen.push(e);
        }
        Ok(Self { source: Source::Finite(elements) })
    }

    /// Number of distinct elements, `None` when infinite.
    pub fn distinct(&self) -> Option<usize> {
        match &self.source {
            Source::Minimal { .. } => None,
            Source::Finite(v) => Some(v.len()),
        }
    }

    /// The `i`-th distinct element, 0-based.
    pub fn element(&self, i: usize) -> Base {
        match &self.source {
            Source::Finite(v) => v[i],
            Source::Minimal { exclude } => (2u64..)
                .map(|v| Base::new(v).expect("v >= 2"))
                .filter(|&b| minimal_representative(b) == b && !exclude.iter().any(|&r| mult_dependent(r, b)))
                .nth(i)
                .expect("infinitely many minimal representatives"),
        }
    }

    fn slot(&self, pos: u64) -> usize {
        assert!(pos >= 1, "positions are 1-based");
        let n = self.distinct();
        let mut rest = pos - 1;
        let mut round = 1u64;
        loop {
            let size = n.map_or(round, |n| round.min(n as u64));
            if rest < size {
                return rest as usize;
            }
            rest -= size;
            round += 1;
        }
    }

    /// The element at 1-based position `pos`.
    pub fn at(&self, pos: u64) -> Base {
        self.element(self.slot(pos))
    }

    /// Largest position `n < pos` holding the same element, or 0.
    pub fn previous(&self, pos: u64) -> u64 {
        let slot = self.slot(pos);
        (1..pos).rev().find(|&n| self.slot(n) == slot).unwrap_or(0)
    }

    /// Distinct elements at positions `1..pos`.
    pub fn before(&self, pos: u64) -> Vec<Base> {
        let mut out: Vec<Base> = (1..pos).map(|n| self.at(n)).collect();
        out.sort();
        out.dedup();
        out
    }

    /// `minimal`, `complement:r,..` or `list:e,..`.
    pub fn describe(&self) -> String {
        let join = |v: &[Base]| v.iter().map(|b| b.to_string()).collect::<Vec<_>>().join(",");
        match &self.source {
            Source::Minimal { exclude } if exclude.is_empty() => "minimal".into(),
            Source::Minimal { exclude } => format!("complement:{}", join(exclude)),
            Source::Finite(v) => format!("list:{}", join(v)),
        }
    }

    pub fn parse(desc: &str) -> Result<Self> {
        let bases = |s: &str| {
            s.split(',')
                .filter(|t| !t.is_empty())
                .map(|t| t.parse::<u64>().map_err(|e| Error::Parse(format!("enumeration: {}", e))).and_then(Base::new))
                .collect::<Result<Vec<_>>>()
        };
        if desc == "minimal" {
            Ok(Self::minimal())
        } else if let Some(rest) = desc.strip_prefix("complement:") {
            Ok(Self::minimal_excluding(&bases(rest)?))
        } else if let Some(rest) = desc.strip_prefix("list:") {
            Self::finite(bases(rest)?)
        } else {
            Err(Error::Parse(format!("unknown enumeration '{}'", desc)))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn b(v: u64) -> Base {
        Base::new(v).unwrap()
    }

    #[test]
    fn minimal_enumeration_interleaves() {
        let e = Enumeration::minimal();
        let got: Vec<u64> = (1..=10).map(|p| e.at(p).value()).collect();
        assert_eq!(got, vec![2, 2, 3, 2, 3, 5, 2, 3, 5, 6]);
        assert_eq!(e.previous(1), 0);
        assert_eq!(e.previous(2), 1);
        assert_eq!(e.previous(5), 3);
        assert_eq!(e.previous(6), 0);
        assert_eq!(e.before(6), vec![b(2), b(3)]);
    }

    #[test]
    fn finite_enumeration_repeats() {
        let e = Enumeration::finite(vec![b(3), b(5)]).unwrap();
        let got: Vec<u64> = (1..=7).map(|p| e.at(p).value()).collect();
        assert_eq!(got, vec![3, 3, 5, 3, 5, 3, 5]);
        assert!(Enumeration::finite(vec![]).is_err());
    }

    #[test]
    fn complement_skips_dependent_classes() {
        let e = Enumeration::minimal_excluding(&[b(2), b(3)]);
        let got: Vec<u64> = (0..4).map(|i| e.element(i).value()).collect();
        assert_eq!(got, vec![5, 6, 7, 10]);
    }

    #[test]
    fn descriptions_round_trip() {
        for e in [
            Enumeration::minimal(),
            Enumeration::minimal_excluding(&[b(2)]),
            Enumeration::finite(vec![b(3), b(7)]).unwrap(),
        ] {
            assert_eq!(Enumeration::parse(&e.describe()).unwrap(), e);
        }
    }

    #[test]
    fn oracles() {
        let t = PredicateOracle::always_true();
        assert!(t.eval(2, 1, 0, 5).unwrap());
        let f = PredicateOracle::always_false();
        assert!(f.eval(2, 1, 3, 2).unwrap());
        assert!(!f.eval(2, 1, 3, 3).unwrap());
        let s = PredicateOracle::parse("set:3,5").unwrap();
        assert!(s.eval(3, 1, 0, 9).unwrap());
        assert!(!s.eval(2, 1, 0, 9).unwrap());
        assert_eq!(s.description(), "set:3,5");
        let slow = PredicateOracle::from_fn("loop", 10, |_, _, _, _, st| {
            loop {
                st.tick()?;
            }
        });
        assert_eq!(slow.eval(2, 1, 1, 1), Err(Error::OracleBudget(10)));
    }
}
