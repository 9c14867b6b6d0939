//! An absolutely normal real whose base-`s` discrepancy stays above a
//! given schedule `g` while its discrepancy for every base independent of
//! `s` is eventually below a fixed `f`.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive};

use super::stage::{alphabet, digit_avoidance_bound, grow, k_min, restricted_parameters, split_digits, Plan};
use super::{
    ell_budget, ell_budget_log2, Capped, Certificate, Clause, ConstructedReal, FPoint, GSchedule, RunKind, Schedule,
    StageRecord, StageState,
};
use crate::counting::Bound;
use crate::discrepancy::simple_from_counts;
use crate::numerics::{mult_dependent, window_index};
use crate::{Base, Error, Result};

/// Least base above `after` independent of `s`.
fn next_independent(s: Base, after: u64) -> Base {
    (after + 1..).map(|v| Base::new(v).expect("v >= 2")).find(|&r| !mult_dependent(r, s)).expect("infinitely many")
}

fn half(v: &BigRational) -> BigRational {
    v / BigRational::from_integer(2.into())
}

/// `l(R, s, k, eps)` as a number, or the desk cap.
fn ell_of(sched: &Schedule, rs: &[Base], s: Base, k: u32, eps: &BigRational) -> Result<(Option<u64>, Capped)> {
    let sk = s.pow(k).unwrap_or(s);
    let capped = |used: u64| Capped {
        what: "ell".into(),
        used,
        faithful_log2: ell_budget_log2(rs, eps, &sched.schmidt, sk),
    };
    if let Some(c) = sched.caps() {
        return Ok((Some(c.ell), capped(c.ell)));
    }
    let b = ell_budget(rs, s, k, eps, &sched.schmidt)?;
    let v = match &b.value {
        Bound::Exact(v) => v.to_u64(),
        Bound::Beyond { .. } => None,
    };
    Ok((v, Capped { what: "ell".into(), used: v.unwrap_or(0), faithful_log2: b.value.log2() }))
}

/// The initial stage: `xi = 0`, `b = 1`, `eps = 1`, `l = 0`, `kbar = 1`,
/// `R` the least base independent of `s`, and `k` the least exponent whose
/// restricted alphabet has two digits.
pub fn start(s: Base, g: GSchedule, sched: Schedule) -> Result<ConstructedReal> {
    sched.validate()?;
    let k = k_min(s);
    let radix = s.pow(k)?;
    let state = StageState {
        stage: 0,
        s,
        k,
        digits: vec![0; window_index(1, radix)? as usize],
        b: 1,
        eps: BigRational::one(),
        ell: 0,
        x: 1,
        rs: vec![next_independent(s, 1)],
        c: 1,
        kbar: 1,
    };
    Ok(ConstructedReal {
        kind: RunKind::Thm4 { s, g },
        schedule: sched,
        stages: vec![StageRecord {
            state,
            clause: Clause::Init,
            a: 0,
            extension: None,
            evaluated: 0,
            passing: 0,
            capped: Vec::new(),
        }],
    })
}

pub fn extend(x: &mut ConstructedReal, stages: u64) -> Result<()> {
    let g = match &x.kind {
        RunKind::Thm4 { g, .. } => *g,
        k => return Err(Error::InvalidInput(format!("not a thm4 run: {}", k.name()))),
    };
    for _ in 0..stages {
        let rec = stage(x, g)?;
        x.stages.push(rec);
    }
    Ok(())
}

pub fn run(s: Base, g: GSchedule, stages: u64, sched: Schedule) -> Result<ConstructedReal> {
    let mut x = start(s, g, sched)?;
    extend(&mut x, stages)?;
    Ok(x)
}

fn stage(run: &ConstructedReal, g: GSchedule) -> Result<StageRecord> {
    let sched = &run.schedule;
    let cur = run.current();
    let s = cur.s;
    let mut capped = Vec::new();
    let mut next = cur.clone();
    next.stage = cur.stage + 1;

    // R grows once b is large enough for the halved tolerance
    let r = next_independent(s, cur.max_r().value());
    let mut wider = cur.rs.clone();
    wider.push(r);
    let eps2 = half(&cur.eps);
    let (need, _) = ell_of(sched, &wider, s, cur.kbar + 1, &eps2)?;
    let lhs = &cur.eps * BigRational::from_integer(BigInt::from(window_index(cur.b, r)?));
    let grow_r = need.is_some_and(|l| lhs >= BigRational::from_integer(BigInt::from(2 * l as u128)));
    if grow_r {
        next.eps = eps2;
        next.rs = wider;
        next.kbar = cur.kbar + 1;
    }
    let (ell, ell_cap) = ell_of(sched, &next.rs, s, next.kbar, &next.eps)?;
    let ell = ell.ok_or_else(|| Error::BudgetExceeded {
        what: "extension length".into(),
        needed: format!("2^{:.1}", ell_cap.faithful_log2),
        budget: "exact evaluation".into(),
    })?;
    if sched.caps().is_some() {
        capped.push(ell_cap);
    }
    next.ell = ell;
    let end = cur.b + ell;

    // k follows g while the restricted alphabet still fits
    let sk = s.pow(cur.k)?;
    let eps_k = BigRational::new(BigInt::one(), BigInt::from(4 * sk.value()));
    let (k, big_n, caps_k) = restricted_parameters(sched, s, &eps_k, Some(cur.k + 1))?;
    capped.extend(caps_k);
    let gate = BigRational::new(BigInt::one(), BigInt::from(2) * BigInt::from(s.big_pow(k as u64)));
    let refine = k <= next.kbar
        && big_n <= window_index(ell, s)?.into()
        && gate > g.value(window_index(cur.b, s)?)
        && k != cur.k;
    if refine {
        next.k = k;
    }

    // regroup the current digits for the new exponent
    let mut base = split_digits(&cur.digits, s.value(), cur.k);
    let kk = next.k as usize;
    base.resize(base.len().div_ceil(kk) * kk, 0);
    let radix = next.radix()?;
    let prefix = base.chunks(kk).fold(num_bigint::BigUint::default(), |acc, c| {
        acc * radix.value() + c.iter().fold(0u64, |v, &d| v * s.value() + d)
    });
    let prefix_len = (base.len() / kk) as u64;

    let grown = grow(
        Plan {
            stage: next.stage,
            s,
            k: next.k,
            prefix,
            prefix_len,
            end,
            alphabet: alphabet(s, next.k)?,
            eps: &next.eps,
            rs: &next.rs,
            ell,
            window_start: cur.b,
            objective_from: Some(cur.b),
            filter: None,
        },
        sched,
    )?;
    next.digits = grown.digits;
    next.b = end;
    capped.extend(grown.capped);
    Ok(StageRecord {
        state: next,
        clause: Clause::Step { grow: grow_r, refine },
        a: cur.b,
        extension: Some(grown.extension),
        evaluated: grown.evaluated,
        passing: grown.passing,
        capped,
    })
}

/// `f(b_m) = 4 eps_{m0}` for every stage `m`, with `m0` the last stage up
/// to `m` such that `eps_{m0} <b_m; max R_{m0}> > b_{m0}`.
pub fn f_trace(x: &ConstructedReal) -> Result<Vec<FPoint>> {
    let mut out = Vec::with_capacity(x.stages.len());
    for (m, rec) in x.stages.iter().enumerate() {
        let b = rec.state.b;
        let mut m0 = 0;
        for (j, earlier) in x.stages[..=m].iter().enumerate().rev() {
            let st = &earlier.state;
            let w = BigRational::from_integer(BigInt::from(window_index(b, st.max_r())?));
            if &st.eps * w > BigRational::from_integer(BigInt::from(st.b)) {
                m0 = j;
                break;
            }
        }
        let value = x.stages[m0].state.eps.clone() * BigRational::from_integer(4.into());
        out.push(FPoint { n: b, value, m0: m0 as u64 });
    }
    Ok(out)
}

/// Lower bounds on the base-`s` discrepancy of the first `N = <b_m; s>`
/// orbit points at every stage boundary, against `g(N)`.
pub fn certificates(x: &ConstructedReal) -> Result<Vec<Certificate>> {
    let (s, g) = match &x.kind {
        RunKind::Thm4 { s, g } => (*s, *g),
        k => return Err(Error::InvalidInput(format!("not a thm4 run: {}", k.name()))),
    };
    let digits = x.current().base_digits()?;
    let top = s.value() - 1;
    let mut out = Vec::new();
    for rec in &x.stages[1..] {
        let st = &rec.state;
        let n = window_index(st.b, s)?;
        let mut counts = vec![0u64; s.value() as usize];
        for &d in &digits[..n as usize] {
            counts[d as usize] += 1;
        }
        let k = st.k as u64;
        // 1-based index just past the last orbit point in [1 - s^-k, 1)
        let last_hit = (0..n).rev().find(|&j| (j..j + k).all(|i| digits.get(i as usize).is_none_or(|&d| d == top)));
        let m = last_hit.map_or(1, |j| j + 2);
        out.push(Certificate {
            stage: st.stage,
            n,
            base: s,
            avoidance: digit_avoidance_bound(&digits, s, st.k, m, n),
            simple: simple_from_counts(&counts),
            target: g.value(n),
        });
    }
    Ok(out)
}
