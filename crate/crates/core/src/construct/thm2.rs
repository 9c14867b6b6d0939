//! A real normal to exactly the bases `r` satisfying
//! `phi(r) = forall x exists y forall z theta(r, x, y, z)`.
//!
//! `x` is bound to the tolerance, `y` to the start and `z` to the length of
//! the orbit window, through a counter `c` that walks an enumeration of the
//! minimal representatives.

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, ToPrimitive};

use super::stage::{grow, least_refinement, alphabet, orbit_cell_discrepancy, restricted_parameters, Plan};
use super::{
    ell_budget, ell_budget_log2, Capped, Clause, ConstructedReal, Enumeration, PredicateOracle, RunKind, Schedule,
    StageRecord, StageState,
};
use crate::basechange::padding;
use crate::counting::{big_log2, Bound};
use crate::numerics::certified::{self, certify};
use crate::numerics::window_index;
use crate::{Base, Error, Result};

/// The initial stage: `xi = 0`, `b = 1`, `s = 3`, `k = 1`, `eps = 1`,
/// `x = c = 1`. Desk mode starts `l` at the cap.
pub fn start(oracle: &PredicateOracle, enumeration: Enumeration, sched: Schedule) -> Result<ConstructedReal> {
    sched.validate()?;
    let three = Base::new(3)?;
    let (ell, capped) = match sched.caps() {
        Some(c) => (c.ell, vec![Capped { what: "ell".into(), used: c.ell, faithful_log2: 0.0 }]),
        None => (1, Vec::new()),
    };
    let state = StageState {
        stage: 0,
        s: three,
        k: 1,
        digits: vec![0; window_index(1, three)? as usize],
        b: 1,
        eps: BigRational::one(),
        ell,
        x: 1,
        rs: Vec::new(),
        c: 1,
        kbar: 1,
    };
    Ok(ConstructedReal {
        kind: RunKind::Thm2 { oracle: oracle.description().to_string(), enumeration },
        schedule: sched,
        stages: vec![StageRecord {
            state,
            clause: Clause::Init,
            a: 0,
            extension: None,
            evaluated: 0,
            passing: 0,
            capped,
        }],
    })
}

/// `stages` more stages.
pub fn extend(x: &mut ConstructedReal, oracle: &PredicateOracle, stages: u64) -> Result<()> {
    let enumeration = match &x.kind {
        RunKind::Thm2 { oracle: desc, enumeration } => {
            if desc != oracle.description() {
                return Err(Error::InvalidInput(format!(
                    "run was built with oracle '{}', not '{}'",
                    desc,
                    oracle.description()
                )));
            }
            enumeration.clone()
        }
        k => return Err(Error::InvalidInput(format!("not a thm2 run: {}", k.name()))),
    };
    for _ in 0..stages {
        let rec = stage(x, oracle, &enumeration)?;
        x.stages.push(rec);
    }
    Ok(())
}

pub fn run(oracle: &PredicateOracle, enumeration: Enumeration, stages: u64, sched: Schedule) -> Result<ConstructedReal> {
    let mut x = start(oracle, enumeration, sched)?;
    extend(&mut x, oracle, stages)?;
    Ok(x)
}

/// Least `x < c` with some `y <= n` such that `theta(s, x, y, z)` for all
/// `z < n` and fails for some `z < c`; `c` when there is none.
pub fn x_search(oracle: &PredicateOracle, s: Base, n: u64, c: u64) -> Result<u64> {
    for x in 1..c {
        for y in 0..=n {
            let mut holds = true;
            for z in 0..n {
                if !oracle.eval(s.value(), x, y, z)? {
                    holds = false;
                    break;
                }
            }
            if !holds {
                continue;
            }
            for z in 0..c {
                if !oracle.eval(s.value(), x, y, z)? {
                    return Ok(x);
                }
            }
        }
    }
    Ok(c)
}

/// Whether the base-`s` orbit of `xi` already has discrepancy below
/// `(1/(12 s^k))^2` for the partition into `12 s^k` cells.
fn holds(cur: &StageState) -> Result<bool> {
    let cells = cur.radix()?.value().checked_mul(12).ok_or_else(|| Error::InvalidInput("cell count".into()))?;
    let n = window_index(cur.b, cur.s)?;
    let d = orbit_cell_discrepancy(&cur.base_digits()?, cur.s.value(), cells, 0, n)?;
    let c = BigInt::from(cells);
    Ok(d < BigRational::new(BigInt::one(), &c * &c))
}

/// Least integer above `max{x, c, 2 s^k} ln(max(R + {s})) p`.
fn spread_length(m: u64, max_base: Base, p: u64) -> Result<BigUint> {
    let scale = BigInt::from(m) * BigInt::from(p);
    let v = certify(|bits| Ok(certified::ln_u64(max_base.value(), bits).mul_int(&scale)), |e| e.decided_ceil())?;
    Ok(v.to_biguint().unwrap_or_default())
}

struct Advance {
    s: Base,
    k: u32,
    ell: u64,
    x: u64,
    rs: Vec<Base>,
    c: u64,
    p: u64,
    capped: Vec<Capped>,
}

fn propose(cur: &StageState, sched: &Schedule, oracle: &PredicateOracle, en: &Enumeration) -> Result<Advance> {
    let c = cur.c + 1;
    let s = en.at(c);
    let n = en.previous(c);
    let x = x_search(oracle, s, n, c)?;
    let eps_x = BigRational::new(BigInt::one(), BigInt::from(x));
    let (k, big_n, mut capped) = restricted_parameters(sched, s, &eps_x, None)?;
    let rs: Vec<Base> = en.before(c).into_iter().filter(|&r| r != s).collect();
    let p = padding(cur.s, s);
    let max_base = rs.iter().copied().chain([s]).max().expect("nonempty");
    let sk = s.pow(k)?;
    let m = x.max(c).max(2 * sk.value());
    let eps_c = BigRational::new(BigInt::one(), BigInt::from(c));
    let ell = match sched.caps() {
        Some(caps) => {
            let est = ell_budget_log2(&rs, &eps_c, &sched.schmidt, sk)
                .max(big_log2(&big_n))
                .max((m as f64 * p as f64 * (max_base.value() as f64).ln()).log2());
            capped.push(Capped { what: "ell".into(), used: caps.ell, faithful_log2: est });
            caps.ell
        }
        None => {
            let budget = ell_budget(&rs, s, k, &eps_c, &sched.schmidt)?;
            let Bound::Exact(l) = budget.value else {
                return Err(Error::BudgetExceeded {
                    what: "extension length".into(),
                    needed: format!("2^{:.1}", budget.value.log2()),
                    budget: "exact evaluation".into(),
                });
            };
            let v = spread_length(m, max_base, p)?.max(big_n + 1u32).max(l + 1u32);
            v.to_u64().ok_or_else(|| Error::BudgetExceeded {
                what: "extension length".into(),
                needed: v.to_string(),
                budget: u64::MAX.to_string(),
            })?
        }
    };
    Ok(Advance { s, k, ell, x, rs, c, p, capped })
}

fn stage(run: &ConstructedReal, oracle: &PredicateOracle, en: &Enumeration) -> Result<StageRecord> {
    let sched = &run.schedule;
    let last = run.stages.last().expect("initial stage");
    let cur = &last.state;
    let carried = || last.capped.iter().filter(|c| c.what != "frequencies").cloned().collect::<Vec<_>>();
    let (clause, mut next, mut capped) = if holds(cur)? {
        (Clause::Hold, cur.clone(), carried())
    } else {
        let adv = propose(cur, sched, oracle, en)?;
        let wait = adv.rs.iter().try_fold(false, |acc, &r| -> Result<bool> {
            Ok(acc || window_index(cur.b, r)? <= adv.c * (adv.ell + adv.p))
        })? || window_index(cur.b, adv.s)? <= adv.x * (adv.ell + adv.p);
        if wait {
            (Clause::Wait, cur.clone(), carried())
        } else {
            let mut next = cur.clone();
            next.s = adv.s;
            next.k = adv.k;
            next.eps = BigRational::new(BigInt::one(), BigInt::from(adv.c));
            next.ell = adv.ell;
            next.x = adv.x;
            next.rs = adv.rs;
            next.c = adv.c;
            (Clause::Advance, next, adv.capped)
        }
    };
    next.stage = cur.stage + 1;
    let radix = next.radix()?;
    let (a, depth, idx) =
        least_refinement(&cur.numerator()?, cur.radix()?, cur.digits.len() as u64, cur.b, radix)?;
    let end = a + next.ell;
    let grown = grow(
        Plan {
            stage: next.stage,
            s: next.s,
            k: next.k,
            prefix: idx,
            prefix_len: depth,
            end,
            alphabet: alphabet(next.s, next.k)?,
            eps: &next.eps,
            rs: &next.rs,
            ell: next.ell,
            window_start: a,
            objective_from: Some(a),
            filter: None,
        },
        sched,
    )?;
    next.digits = grown.digits;
    next.b = end;
    capped.extend(grown.capped);
    Ok(StageRecord {
        state: next,
        clause,
        a,
        extension: Some(grown.extension),
        evaluated: grown.evaluated,
        passing: grown.passing,
        capped,
    })
}
