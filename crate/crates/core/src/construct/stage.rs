//! Pieces shared by the three constructions.

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{Capped, Extension, Schedule};
use crate::basechange::nested_refinement_offset;
use crate::counting::{big_log2, block_length_for, restricted_digit_n0, restricted_digit_params, Bound, RestrictedAlphabet};
use crate::discrepancy::cell_counts_discrepancy;
use crate::expsums::{leveque_parameters, CandidateKernel, Threshold, Window};
use crate::numerics::window_index;
use crate::par::{map_items, next_word};
use crate::{Base, Error, Result};

/// `v` as `len` digits in base `base`, most significant first.
pub(crate) fn to_digits(v: &BigUint, base: u64, len: usize) -> Vec<u64> {
    let mut per = 1usize;
    let mut chunk = base;
    while let Some(n) = chunk.checked_mul(base) {
        chunk = n;
        per += 1;
    }
    let mut out = Vec::with_capacity(len + per);
    let mut rest = v.clone();
    let big_chunk = BigUint::from(chunk);
    while out.len() < len {
        let (q, r) = rest.div_rem(&big_chunk);
        let mut r = r.to_u64().expect("remainder below chunk");
        for _ in 0..per {
            out.push(r % base);
            r /= base;
        }
        rest = q;
    }
    debug_assert!(rest.is_zero() || out[len..].iter().all(|&d| d == 0));
    out.truncate(len);
    out.reverse();
    out
}

/// Each base-`s^k` digit as `k` base-`s` digits.
pub(crate) fn split_digits(digits: &[u64], s: u64, k: u32) -> Vec<u64> {
    let mut out = Vec::with_capacity(digits.len() * k as usize);
    for &d in digits {
        let mut v = d;
        let at = out.len();
        out.resize(at + k as usize, 0);
        for slot in out[at..].iter_mut().rev() {
            *slot = v % s;
            v /= s;
        }
    }
    out
}

/// Digits `0..s~` used by the extension in base `s^k`.
pub(crate) fn alphabet(s: Base, k: u32) -> Result<u64> {
    let size = RestrictedAlphabet::for_base(s, k as u64)?
        .size()
        .ok_or_else(|| Error::InvalidInput(format!("alphabet {}^{} does not fit", s, k)))?;
    Ok(size)
}

/// Least `k` whose restricted alphabet has at least two digits.
pub(crate) fn k_min(s: Base) -> u32 {
    if s.value() == 2 {
        2
    } else {
        1
    }
}

/// Least `a` for which the cell `[n, n+1) / R^p` contains a base-`to`
/// cell of depth `<a; to>`, with that depth and the leftmost such cell.
pub(crate) fn least_refinement(num: &BigUint, from: Base, p: u64, b: u64, to: Base) -> Result<(u64, u64, BigUint)> {
    let q = from.big_pow(p);
    let fits = |d: u64| -> Option<BigUint> {
        let x = to.big_pow(d);
        let idx = (num * &x).div_ceil(&q);
        ((&idx + 1u32) * &q <= (num + 1u32) * &x).then_some(idx)
    };
    let a_max = b + nested_refinement_offset(from, to);
    let d_max = window_index(a_max, to)?;
    if fits(d_max).is_none() {
        return Err(Error::InvariantViolation(format!(
            "no {}-adic cell of depth {} inside the current cell",
            to, d_max
        )));
    }
    let (mut lo, mut hi) = (0u64, d_max);
    while lo < hi {
        let mid = lo + (hi - lo) / 2;
        if fits(mid).is_some() {
            hi = mid;
        } else {
            lo = mid + 1;
        }
    }
    let d = lo;
    let (mut alo, mut ahi) = (0u64, a_max);
    while alo < ahi {
        let mid = alo + (ahi - alo) / 2;
        if window_index(mid, to)? >= d {
            ahi = mid;
        } else {
            alo = mid + 1;
        }
    }
    let depth = window_index(alo, to)?;
    let idx = fits(depth).expect("deeper cells fit");
    Ok((alo, depth, idx))
}

/// `D(F, ({s^j nu} : from <= j < to))` for `F` the equipartition into
/// `cells` pieces and `nu = 0.d_1 d_2 ...` in base `s`, `digits[0] = d_1`.
/// Digits past the end are 0.
pub fn orbit_cell_discrepancy(digits: &[u64], s: u64, cells: u64, from: u64, to: u64) -> Result<BigRational> {
    if to <= from {
        return Err(Error::EmptySequence);
    }
    if cells == 0 || cells > 1 << 26 || s < 2 {
        return Err(Error::InvalidInput(format!("cannot bucket {} cells in base {}", cells, s)));
    }
    let digit = |i: u64| digits.get(i as usize).copied().unwrap_or(0);
    let len = digits.len() as u64;
    // lookahead K with cells * s^K < 2^125
    let mut k = 0u32;
    let mut sk: u128 = 1;
    while let Some(n) = sk.checked_mul(s as u128).filter(|&n| n.checked_mul(cells as u128).is_some_and(|v| v < 1 << 125)) {
        sk = n;
        k += 1;
    }
    let top = sk / s as u128;
    let mut v: u128 = (0..k as u64).fold(0, |acc, i| acc * s as u128 + digit(from + i) as u128);
    let mut counts = vec![0u64; cells as usize];
    let c = cells as u128;
    for j in from..to {
        let lo = c * v / sk;
        let cell = if j + k as u64 >= len || lo == (c * (v + 1) - 1) / sk {
            lo as usize
        } else {
            let tail = digits[j as usize..].iter().fold(BigUint::zero(), |acc, &d| acc * s + d);
            let den = BigUint::from(s).pow((len - j) as u32);
            ((tail * cells) / den).to_usize().expect("cell index")
        };
        counts[cell] += 1;
        v = (v % top) * s as u128 + digit(j + k as u64) as u128;
    }
    Ok(cell_counts_discrepancy(&BigUint::from(cells), to - from, counts.into_iter().filter(|&n| n > 0)))
}

/// `mu(I)/2` for `I = [1 - s^-k, 1)` when no orbit point `{s^j nu}` with
/// 1-based index in `m..=n` lies in `I` and `n >= 2 m s^k`.
///
/// Point `j` lies in `I` exactly when digits `j+1..j+k` all equal `s-1`.
/// Digits past the end of `digits` are unknown and treated as `s-1`.
pub fn digit_avoidance_bound(digits: &[u64], s: Base, k: u32, m: u64, n: u64) -> Option<BigRational> {
    let sk = s.big_pow(k as u64);
    if m == 0 || BigUint::from(n) < BigUint::from(2 * m) * &sk {
        return None;
    }
    let top = s.value() - 1;
    let hit = |j: u64| (j..j + k as u64).all(|i| digits.get(i as usize).is_none_or(|&d| d == top));
    if (m - 1..n).any(hit) {
        return None;
    }
    Some(BigRational::new(BigInt::one(), BigInt::from(sk) * 2))
}

/// `T = {1..m}` and `delta` for `(eps/10)^4`, with `m` capped in desk mode
/// by raising the tolerance.
pub(crate) struct Frequencies {
    pub ts: Vec<i64>,
    pub delta: BigRational,
    pub capped: Option<Capped>,
}

pub(crate) fn frequencies(sched: &Schedule, eps: &BigRational) -> Result<Frequencies> {
    let t = eps / BigRational::from_integer(10.into());
    let t2 = &t * &t;
    let source = &t2 * &t2;
    let p = leveque_parameters(&source)?;
    let limit = match sched.caps() {
        Some(c) => c.t,
        None => sched.budget,
    };
    if p.m <= BigUint::from(limit) {
        let ts = p.frequencies(limit).expect("m within limit");
        return Ok(Frequencies { ts, delta: p.delta, capped: None });
    }
    let Some(caps) = sched.caps() else {
        return Err(Error::BudgetExceeded {
            what: "frequency set T".into(),
            needed: p.m.to_string(),
            budget: sched.budget.to_string(),
        });
    };
    // least tolerance on a 2^-20 grid whose m fits the cap
    let guess = (12.0 / (std::f64::consts::PI.powi(2) * caps.t as f64)).cbrt();
    let grid = 1i64 << 20;
    let mut num = ((guess * grid as f64).floor() as i64 - 2).max(1);
    let raised = loop {
        let e = BigRational::new(num.into(), grid.into());
        if e > BigRational::one() {
            return Err(Error::InvalidInput(format!("no tolerance up to 1 has at most {} frequencies", caps.t)));
        }
        let q = leveque_parameters(&e)?;
        if q.m <= BigUint::from(caps.t) {
            break q;
        }
        num += 1;
    };
    let ts = raised.frequencies(caps.t).expect("m within cap");
    Ok(Frequencies {
        capped: Some(Capped { what: "frequencies".into(), used: ts.len() as u64, faithful_log2: big_log2(&p.m) }),
        ts,
        delta: raised.delta,
    })
}

/// `k` and `N` for the restricted-alphabet count at tolerance `eps`.
///
/// Desk mode caps `k` by `cap` and `N` by the schedule, recording both.
pub(crate) fn restricted_parameters(
    sched: &Schedule,
    s: Base,
    eps: &BigRational,
    cap: Option<u32>,
) -> Result<(u32, BigUint, Vec<Capped>)> {
    if *eps >= BigRational::one() {
        return Ok((k_min(s), BigUint::one(), Vec::new()));
    }
    let too_big = |what: &str, b: &dyn std::fmt::Display| Error::BudgetExceeded {
        what: what.into(),
        needed: b.to_string(),
        budget: "exact evaluation".into(),
    };
    let Some(caps) = sched.caps() else {
        let p = restricted_digit_params(s, eps, RestrictedAlphabet::for_base(s, 1)?.parity())?;
        let n = p.n0.exact().cloned().ok_or_else(|| too_big("restricted-alphabet word count", &p.n0))?;
        let k = u32::try_from(p.k).map_err(|_| too_big("restricted-alphabet exponent", &p.k))?;
        return Ok((k, n, Vec::new()));
    };
    let mut capped = Vec::new();
    let g = eps * eps / BigRational::from_integer(18.into());
    let ell = block_length_for(s, eps);
    let lower = (BigRational::from_integer((8 * ell).into()) / &g).ceil().to_integer().to_biguint().unwrap_or_default();
    let limit = cap.unwrap_or(caps.k).min(caps.k);
    let k = if lower > BigUint::from(limit) {
        capped.push(Capped { what: "k".into(), used: limit as u64, faithful_log2: big_log2(&lower) });
        limit
    } else {
        let p = restricted_digit_params(s, eps, RestrictedAlphabet::for_base(s, 1)?.parity())?;
        let kf = u32::try_from(p.k).unwrap_or(u32::MAX);
        if kf > limit {
            capped.push(Capped { what: "k".into(), used: limit as u64, faithful_log2: (kf as f64).log2() });
        }
        kf.min(limit)
    };
    let k = k.max(k_min(s));
    let n_f = restricted_digit_n0(s, k as u64, eps, &RestrictedAlphabet::for_base(s, k as u64)?)?;
    let n = match &n_f {
        Bound::Exact(v) if *v <= BigUint::from(caps.n) => v.clone(),
        _ => {
            capped.push(Capped { what: "N".into(), used: caps.n, faithful_log2: n_f.log2() });
            BigUint::from(caps.n)
        }
    };
    Ok((k, n, capped))
}

/// A stage's candidate space: extensions of `prefix / radix^prefix_len`
/// by `len` digits below `alphabet`.
pub(crate) struct Search<'a> {
    pub stage: u64,
    pub radix: Base,
    pub prefix: &'a BigUint,
    pub prefix_len: u64,
    pub len: u64,
    pub alphabet: u64,
    /// Windows and frequencies of the aggregate exponential-sum test, with
    /// its threshold. `None` when `R` is empty.
    pub test: Option<(Vec<Window>, Vec<i64>, Threshold)>,
}

pub(crate) struct Selection {
    pub digits: Vec<u64>,
    pub evaluated: u64,
    pub passing: u64,
}

pub(crate) type Filter<'a> = (&'a str, &'a (dyn Fn(&[u64]) -> bool + Sync));
pub(crate) type Objective<'a> = &'a (dyn Fn(&[u64]) -> Result<BigRational> + Sync);

fn candidates(search: &Search, sched: &Schedule) -> Result<Vec<Vec<u64>>> {
    let budget = sched.caps().map_or(sched.budget, |c| c.candidates);
    let total = u32::try_from(search.len)
        .ok()
        .and_then(|l| (search.alphabet as u128).checked_pow(l))
        .filter(|&t| t <= budget as u128);
    if let Some(t) = total {
        let mut out = Vec::with_capacity(t as usize);
        let mut w = vec![0u64; search.len as usize];
        loop {
            out.push(w.clone());
            if !next_word(&mut w, search.alphabet) {
                break;
            }
        }
        return Ok(out);
    }
    if sched.caps().is_none() {
        return Err(Error::BudgetExceeded {
            what: "candidate set".into(),
            needed: format!("{}^{}", search.alphabet, search.len),
            budget: budget.to_string(),
        });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(sched.seed);
    rng.set_stream(search.stage);
    let mut out: Vec<Vec<u64>> =
        (0..budget).map(|_| (0..search.len).map(|_| rng.gen_range(0..search.alphabet)).collect()).collect();
    out.sort();
    out.dedup();
    Ok(out)
}

/// The least word minimizing `objective` among candidates passing the
/// exponential-sum test and `filter`; the least passing word without an
/// objective.
pub(crate) fn select(
    search: &Search,
    sched: &Schedule,
    filter: Option<Filter>,
    objective: Option<Objective>,
) -> Result<Selection> {
    let words = candidates(search, sched)?;
    let kernel = match &search.test {
        Some((windows, ts, thr)) => Some((
            CandidateKernel::new(
                search.radix,
                search.prefix,
                search.prefix_len,
                search.len,
                windows.clone(),
                ts.clone(),
            )?,
            thr,
        )),
        None => None,
    };
    let results = map_items(&words, |w| -> Result<(bool, bool, Option<BigRational>)> {
        let a_ok = match &kernel {
            Some((k, thr)) => k.passes(w, thr)?,
            None => true,
        };
        let f_ok = a_ok && filter.is_none_or(|(_, f)| f(w));
        let value = match objective {
            Some(obj) if f_ok => Some(obj(w)?),
            _ => None,
        };
        Ok((a_ok, f_ok, value))
    });
    let mut any_a = false;
    let mut passing = 0u64;
    let mut best: Option<(usize, Option<BigRational>)> = None;
    for (i, r) in results.into_iter().enumerate() {
        let (a_ok, f_ok, value) = r?;
        any_a |= a_ok;
        if !f_ok {
            continue;
        }
        passing += 1;
        let better = match (&best, &value) {
            (None, _) => true,
            (Some((_, Some(b))), Some(v)) => v < b,
            _ => false,
        };
        if better {
            best = Some((i, value));
        }
    }
    let Some((i, _)) = best else {
        let check = if !any_a {
            "aggregate exponential-sum test".to_string()
        } else {
            format!("{} together with the aggregate exponential-sum test", filter.map_or("filter", |f| f.0))
        };
        return Err(Error::NoCandidate { stage: search.stage, check });
    };
    Ok(Selection { digits: words[i].clone(), evaluated: words.len() as u64, passing })
}

/// One stage's extension of the cell `prefix / (s^k)^prefix_len` up to
/// position `end`.
pub(crate) struct Plan<'a> {
    pub stage: u64,
    pub s: Base,
    pub k: u32,
    pub prefix: BigUint,
    pub prefix_len: u64,
    pub end: u64,
    pub alphabet: u64,
    pub eps: &'a BigRational,
    pub rs: &'a [Base],
    pub ell: u64,
    /// Start of the exponential-sum windows.
    pub window_start: u64,
    /// Minimize the discrepancy for `12 s^k` cells of the base-`s` orbit
    /// over `(<from; s>, <end; s>]`.
    pub objective_from: Option<u64>,
    pub filter: Option<Filter<'a>>,
}

pub(crate) struct Grown {
    /// All digits of the new cell in base `s^k`.
    pub digits: Vec<u64>,
    pub extension: Extension,
    pub evaluated: u64,
    pub passing: u64,
    pub capped: Option<Capped>,
}

pub(crate) fn grow(plan: Plan, sched: &Schedule) -> Result<Grown> {
    let radix = plan.s.pow(plan.k)?;
    let total = window_index(plan.end, radix)?;
    let len = total.checked_sub(plan.prefix_len).ok_or_else(|| {
        Error::InvariantViolation(format!("cell of depth {} is deeper than position {}", plan.prefix_len, plan.end))
    })?;
    let fr = frequencies(sched, plan.eps)?;
    let test = match plan.rs.last() {
        None => None,
        Some(&max_r) => {
            let windows = plan.rs.iter().map(|&r| Window::of(r, plan.window_start, plan.ell)).collect::<Result<Vec<_>>>()?;
            Some((windows, fr.ts.clone(), a_threshold(&fr.delta, plan.ell, max_r)?))
        }
    };
    let prefix_digits = to_digits(&plan.prefix, radix.value(), plan.prefix_len as usize);
    let s = plan.s.value();
    let mut span = None;
    if let Some(from) = plan.objective_from {
        let (lo, hi) = (window_index(from, plan.s)? + 1, window_index(plan.end, plan.s)? + 1);
        if hi > lo {
            span = Some((lo, hi));
        }
    }
    let cells = radix.value().checked_mul(12).ok_or_else(|| Error::InvalidInput(format!("12 * {} cells", radix)))?;
    let base_prefix = split_digits(&prefix_digits, s, plan.k);
    let (tail, skip) = match span {
        Some((lo, _)) => {
            let cut = (lo as usize).min(base_prefix.len());
            (base_prefix[cut..].to_vec(), lo as usize - cut)
        }
        None => (Vec::new(), 0),
    };
    let objective = |w: &[u64]| -> Result<BigRational> {
        let (lo, hi) = span.expect("objective has a span");
        let mut d = tail.clone();
        let ext = split_digits(w, s, plan.k);
        d.extend_from_slice(&ext[skip.min(ext.len())..]);
        orbit_cell_discrepancy(&d, s, cells, 0, hi - lo)
    };
    let search = Search {
        stage: plan.stage,
        radix,
        prefix: &plan.prefix,
        prefix_len: plan.prefix_len,
        len,
        alphabet: plan.alphabet,
        test,
    };
    let sel = select(&search, sched, plan.filter, span.map(|_| &objective as Objective))?;
    let mut digits = prefix_digits;
    digits.extend_from_slice(&sel.digits);
    Ok(Grown {
        digits,
        extension: Extension { radix, start: plan.prefix_len, alphabet: plan.alphabet, digits: sel.digits },
        evaluated: sel.evaluated,
        passing: sel.passing,
        capped: fr.capped,
    })
}

/// `delta <l; max R>^2`, the exponential-sum threshold.
pub(crate) fn a_threshold(delta: &BigRational, ell: u64, max_r: Base) -> Result<Threshold> {
    let w = window_index(ell, max_r)?;
    Ok(Threshold::below(delta * BigRational::from_integer(BigInt::from(w) * BigInt::from(w))))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::discrepancy::{avoidance_bound, cell_discrepancy};
    use crate::{fractional_orbit, UnitSequence};
    use proptest::prelude::*;

    fn b(v: u64) -> Base {
        Base::new(v).unwrap()
    }

    fn value(digits: &[u64], s: u64) -> BigRational {
        let num = digits.iter().fold(BigUint::zero(), |acc, &d| acc * s + d);
        BigRational::new(num.into(), BigInt::from(BigUint::from(s).pow(digits.len() as u32)))
    }

    #[test]
    fn to_digits_round_trip() {
        assert_eq!(to_digits(&BigUint::from(5u32), 2, 4), vec![0, 1, 0, 1]);
        assert_eq!(to_digits(&BigUint::zero(), 343, 3), vec![0, 0, 0]);
        let v = BigUint::from(342u32) * 343u32 * 343u32 + 7u32;
        assert_eq!(to_digits(&v, 343, 4), vec![0, 342, 0, 7]);
    }

    #[test]
    fn refinement_by_hand() {
        // [0, 1/3): a = 0 gives depth 0, a = 1 depth 2 in base 2, [0, 1/4) fits
        let (a, d, idx) = least_refinement(&BigUint::zero(), b(3), 1, 1, b(2)).unwrap();
        assert_eq!((a, d, idx), (1, 2, BigUint::zero()));
        // the unit interval is its own cell
        let (a, d, _) = least_refinement(&BigUint::zero(), b(3), 0, 0, b(5)).unwrap();
        assert_eq!((a, d), (0, 0));
        // same base: the cell itself at the least a reaching its depth
        let (a, d, idx) = least_refinement(&BigUint::from(7u32), b(3), 3, 3, b(3)).unwrap();
        assert_eq!((d, idx), (3, BigUint::from(7u32)));
        assert_eq!(window_index(a, b(3)).unwrap(), 3);
        assert!(a == 0 || window_index(a - 1, b(3)).unwrap() < 3);
    }

    #[test]
    fn avoidance_by_hand() {
        let d = vec![0, 1, 0, 0, 1, 1, 0, 1, 0, 0, 1, 0];
        assert_eq!(digit_avoidance_bound(&d, b(3), 1, 1, 6), Some(BigRational::new(1.into(), 6.into())));
        assert_eq!(digit_avoidance_bound(&d, b(3), 1, 1, 5), None);
        assert_eq!(digit_avoidance_bound(&d, b(3), 1, 2, 12), Some(BigRational::new(1.into(), 6.into())));
        let mut e = d.clone();
        e[3] = 2;
        assert_eq!(digit_avoidance_bound(&e, b(3), 1, 1, 12), None);
        assert!(digit_avoidance_bound(&e, b(3), 1, 5, 12).is_none());
        assert!(digit_avoidance_bound(&e, b(3), 1, 5, 30).is_none());
    }

    proptest! {
        #[test]
        fn cell_discrepancy_matches_orbit(digits in proptest::collection::vec(0u64..3, 1..40), cells in 1u64..40, from in 0u64..10, span in 1u64..45) {
            let s = 3u64;
            let x = value(&digits, s);
            let seq = fractional_orbit(&x, b(s), from, from + span).unwrap();
            let want = cell_discrepancy(&BigUint::from(cells), &seq).unwrap();
            prop_assert_eq!(orbit_cell_discrepancy(&digits, s, cells, from, from + span).unwrap(), want);
        }

        #[test]
        fn long_expansions_use_exact_fallback(digits in proptest::collection::vec(0u64..7, 60..90), cells in 1u64..400) {
            let s = 7u64;
            let x = value(&digits, s);
            let n = digits.len() as u64;
            let seq = fractional_orbit(&x, b(s), 0, n).unwrap();
            let want = cell_discrepancy(&BigUint::from(cells), &seq).unwrap();
            prop_assert_eq!(orbit_cell_discrepancy(&digits, s, cells, 0, n).unwrap(), want);
        }

        #[test]
        fn avoidance_matches_orbit_bound(digits in proptest::collection::vec(0u64..3, 1..60), m in 1u64..8) {
            let s = b(3);
            let n = digits.len() as u64;
            let x = value(&digits, 3);
            let seq: UnitSequence = fractional_orbit(&x, s, 0, n).unwrap();
            let top = crate::Interval::new(BigRational::new(2.into(), 3.into()), BigRational::one()).unwrap();
            prop_assert_eq!(digit_avoidance_bound(&digits, s, 1, m, n), avoidance_bound(&top, &seq, m));
        }
    }
}
