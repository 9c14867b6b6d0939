//! A real normal to every base of `R` and not simply normal to any base
//! enumerated by `S`.
//!
//! While a base `s` of `S` is active every appended base-`s` digit is
//! below `s - 1`, so the orbit avoids `[1 - 1/s, 1)` until its share there
//! falls far enough below `1/s`. Base 2 is handled through base 4, with
//! extensions whose bits are unbalanced.

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, ToPrimitive};

use super::stage::{alphabet, digit_avoidance_bound, grow, least_refinement, split_digits, Plan};
use super::{
    ell_budget, ell_budget_log2, Capped, Certificate, Clause, ConstructedReal, Enumeration, RunKind, Schedule,
    StageRecord, StageState,
};
use crate::basechange::padding;
use crate::counting::{base4_defect_threshold, Bound};
use crate::discrepancy::simple_from_counts;
use crate::numerics::certified::{self, certify};
use crate::numerics::{minimal_representative, mult_dependent, window_index};
use crate::{Base, Error, Result};

fn b(v: u64) -> Base {
    Base::new(v).expect("small base")
}

/// The base used for `S` element `e`: 4 in place of 2.
fn denial_base(e: Base) -> Base {
    if e.value() == 2 {
        b(4)
    } else {
        e
    }
}

fn check_inputs(rs: &[Base], ss: &Enumeration) -> Result<()> {
    for &r in rs {
        if minimal_representative(r) != r {
            return Err(Error::InvalidInput(format!("{} is not the least base of its class", r)));
        }
    }
    // minimal enumerations are checked on a prefix
    for i in 0..ss.distinct().unwrap_or(64) {
        let e = ss.element(i);
        if let Some(&r) = rs.iter().find(|&&r| mult_dependent(r, e)) {
            return Err(Error::DependentBases(r.value(), e.value()));
        }
    }
    Ok(())
}

/// The initial stage: `xi = 0`, `b = 0`, `s` the first base of `S`,
/// `eps = 1`, `R` the least base of `R`, `c = 1`. Desk mode starts `l` at
/// the cap.
pub fn start(rs: Vec<Base>, ss: Option<Enumeration>, sched: Schedule) -> Result<ConstructedReal> {
    sched.validate()?;
    let mut rs = rs;
    rs.sort();
    rs.dedup();
    let ss = ss.unwrap_or_else(|| Enumeration::minimal_excluding(&rs));
    check_inputs(&rs, &ss)?;
    let (ell, capped) = match sched.caps() {
        Some(c) => (c.ell, vec![Capped { what: "ell".into(), used: c.ell, faithful_log2: 0.0 }]),
        None => (0, Vec::new()),
    };
    let state = StageState {
        stage: 0,
        s: denial_base(ss.at(1)),
        k: 1,
        digits: Vec::new(),
        b: 0,
        eps: BigRational::one(),
        ell,
        x: 1,
        rs: rs.first().copied().into_iter().collect(),
        c: 1,
        kbar: 1,
    };
    Ok(ConstructedReal {
        kind: RunKind::Thm5 { rs, ss },
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

pub fn extend(x: &mut ConstructedReal, stages: u64) -> Result<()> {
    let (rs, ss) = match &x.kind {
        RunKind::Thm5 { rs, ss } => (rs.clone(), ss.clone()),
        k => return Err(Error::InvalidInput(format!("not a thm5 run: {}", k.name()))),
    };
    for _ in 0..stages {
        let rec = stage(x, &rs, &ss)?;
        x.stages.push(rec);
    }
    Ok(())
}

pub fn run(rs: Vec<Base>, ss: Option<Enumeration>, stages: u64, sched: Schedule) -> Result<ConstructedReal> {
    let mut x = start(rs, ss, sched)?;
    extend(&mut x, stages)?;
    Ok(x)
}

/// Whether the share of the first `<b; s>` orbit points in `[1 - 1/s, 1)`
/// is within `1/(4s)` of `1/s`; in base 4 also whether the first `<b; 2>`
/// bits have simple discrepancy below `1/16`.
fn holds(cur: &StageState) -> Result<bool> {
    let s = cur.s.value();
    let n = window_index(cur.b, cur.s)?;
    if n == 0 {
        return Ok(false);
    }
    let digits = cur.base_digits()?;
    let hits = digits[..n as usize].iter().filter(|&&d| d == s - 1).count() as u64;
    // |hits/n - 1/s| < 1/(4s)  iff  4 |s hits - n| < n
    if 4 * (s * hits).abs_diff(n) >= n {
        return Ok(false);
    }
    if s == 4 {
        let bits = split_digits(&digits, 2, 2);
        let n2 = (window_index(cur.b, b(2))? as usize).min(bits.len());
        let zeros = bits[..n2].iter().filter(|&&d| d == 0).count() as u64;
        let simple = simple_from_counts(&[zeros, n2 as u64 - zeros]);
        return Ok(simple < BigRational::new(1.into(), 16.into()));
    }
    Ok(true)
}

fn spread_length(c: u64, p: u64, max_r: Base) -> Result<BigUint> {
    let scale = BigInt::from(c) * BigInt::from(p);
    let v = certify(|bits| Ok(certified::ln_u64(max_r.value(), bits).mul_int(&scale)), |e| e.decided_ceil())?;
    Ok(v.to_biguint().unwrap_or_default())
}

fn stage(run: &ConstructedReal, all_r: &[Base], ss: &Enumeration) -> Result<StageRecord> {
    let sched = &run.schedule;
    let last = run.stages.last().expect("initial stage");
    let cur = &last.state;
    let carried = || last.capped.iter().filter(|c| c.what != "frequencies").cloned().collect::<Vec<_>>();
    let (clause, mut next, mut capped) = if holds(cur)? {
        (Clause::Hold, cur.clone(), carried())
    } else {
        let c = cur.c + 1;
        let s = denial_base(ss.at(c));
        let r = all_r.iter().copied().find(|r| !cur.rs.contains(r));
        let mut wider = cur.rs.clone();
        wider.extend(r);
        wider.sort();
        let p = padding(cur.s, s);
        let eps = BigRational::new(BigInt::one(), BigInt::from(c));
        let max_r = cur.max_r();
        let mut capped = Vec::new();
        let ell = match sched.caps() {
            Some(caps) => {
                let est = ell_budget_log2(&wider, &eps, &sched.schmidt, s)
                    .max((c as f64 * p as f64 * (max_r.value() as f64).ln()).log2());
                capped.push(Capped { what: "ell".into(), used: caps.ell, faithful_log2: est });
                caps.ell
            }
            None => {
                let exceeded = |b: &Bound| Error::BudgetExceeded {
                    what: "extension length".into(),
                    needed: format!("2^{:.1}", b.log2()),
                    budget: "exact evaluation".into(),
                };
                let budget = ell_budget(&wider, s, 1, &eps, &sched.schmidt)?;
                let l = budget.value.exact().ok_or_else(|| exceeded(&budget.value))?.clone();
                let mut v = spread_length(c, p, max_r)?.max(l + 1u32);
                if s.value() == 4 {
                    let t = base4_defect_threshold(&BigRational::new(1.into(), 2.into()))?;
                    v = v.max(t.exact().ok_or_else(|| exceeded(&t))? + 1u32);
                }
                v.to_u64().ok_or_else(|| Error::BudgetExceeded {
                    what: "extension length".into(),
                    needed: v.to_string(),
                    budget: u64::MAX.to_string(),
                })?
            }
        };
        if window_index(cur.b, max_r)? <= c * (ell + p) {
            (Clause::Wait, cur.clone(), carried())
        } else {
            let mut next = cur.clone();
            next.s = s;
            next.eps = eps;
            next.ell = ell;
            next.rs = wider;
            next.c = c;
            (Clause::Advance, next, capped)
        }
    };
    next.stage = cur.stage + 1;
    let (a, depth, idx) = least_refinement(&cur.numerator()?, cur.radix()?, cur.digits.len() as u64, cur.b, next.s)?;
    let end = a + next.ell;
    let unbalanced = |w: &[u64]| {
        let len = w.len() as u64;
        let zeros: u64 = w.iter().map(|&d| 2 - d.count_ones().min(2) as u64).sum();
        4 * zeros.abs_diff(len) > len
    };
    let filter: Option<(&str, &(dyn Fn(&[u64]) -> bool + Sync))> =
        (next.s.value() == 4).then_some(("base-2 simple discrepancy above 1/8", &unbalanced));
    let grown = grow(
        Plan {
            stage: next.stage,
            s: next.s,
            k: 1,
            prefix: idx,
            prefix_len: depth,
            end,
            alphabet: alphabet(next.s, 1)?,
            eps: &next.eps,
            rs: &next.rs,
            ell: next.ell,
            window_start: cur.b,
            objective_from: None,
            filter,
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

/// At every stage boundary, the lower bound on the simple discrepancy in
/// the active base `s` from the orbit avoiding `[1 - 1/s, 1)` since the
/// start of the current run of stages with that base.
pub fn certificates(x: &ConstructedReal) -> Result<Vec<Certificate>> {
    if !matches!(x.kind, RunKind::Thm5 { .. }) {
        return Err(Error::InvalidInput(format!("not a thm5 run: {}", x.kind.name())));
    }
    let mut out = Vec::new();
    let mut run_start = 1usize;
    for i in 1..x.stages.len() {
        let rec = &x.stages[i];
        let st = &rec.state;
        if i > 1 && x.stages[i - 1].state.s != st.s {
            run_start = i;
        }
        let s = st.s;
        let digits = st.base_digits()?;
        let n = window_index(st.b, s)?;
        let m = window_index(x.stages[run_start].a, s)? + 1;
        let mut counts = vec![0u64; s.value() as usize];
        for &d in &digits[..n as usize] {
            counts[d as usize] += 1;
        }
        let half_s = BigRational::new(BigInt::one(), BigInt::from(2 * s.value()));
        out.push(Certificate {
            stage: st.stage,
            n,
            base: s,
            avoidance: digit_avoidance_bound(&digits, s, 1, m, n),
            simple: simple_from_counts(&counts),
            target: half_s,
        });
    }
    Ok(out)
}
