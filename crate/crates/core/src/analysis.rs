//! Discrepancy traces of finite digit streams.
//!
//! A stream `d_1 ... d_n` in base `b` is read as the rational
//! `x = 0.d_1 ... d_n`. Its orbit in base `r` is `({r^j x} : j >= 0)`, each
//! point an exact rational over `b^n`. Star discrepancy beyond the exact cap
//! is bracketed from 128-bit keys `floor(2^128 {r^j x})`.

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};

use crate::discrepancy::{block_discrepancy, extreme_discrepancy, simple_from_counts, star_discrepancy};
use crate::par::map_items;
use crate::{Base, DigitBlock, Error, Result, UnitSequence};

/// An exact value, or a bracket `[lo, hi]` around it.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Measured {
    Exact(BigRational),
    Enclosed { lo: BigRational, hi: BigRational },
}

impl Measured {
    pub fn lower(&self) -> &BigRational {
        match self {
            Measured::Exact(v) => v,
            Measured::Enclosed { lo, .. } => lo,
        }
    }

    pub fn upper(&self) -> &BigRational {
        match self {
            Measured::Exact(v) => v,
            Measured::Enclosed { hi, .. } => hi,
        }
    }

    /// `Some(true)` when certainly below `other`, `Some(false)` when
    /// certainly not, `None` when the brackets overlap.
    pub fn lt(&self, other: &Measured) -> Option<bool> {
        if self.upper() < other.lower() {
            Some(true)
        } else if self.lower() >= other.upper() {
            Some(false)
        } else {
            None
        }
    }
}

/// One trace line: discrepancies of the first `n` orbit points in `base`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TraceRow {
    pub n: u64,
    pub base: Base,
    pub star: Measured,
    pub extreme: Option<BigRational>,
    pub simple: BigRational,
    pub block_c: Option<(BigRational, usize)>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TraceOptions {
    /// Extreme discrepancy is computed only up to this many points.
    pub exact_cap: u64,
    /// Compute star discrepancy exactly at every checkpoint.
    pub exact: bool,
    /// Block length for `C(l, w)`, if wanted.
    pub block_ell: Option<usize>,
}

impl Default for TraceOptions {
    fn default() -> Self {
        Self { exact_cap: 5000, exact: false, block_ell: Some(2) }
    }
}

/// Number of base-`r` digits fixed by `n` base-`b` digits: the largest `N`
/// with `r^N <= b^n`.
pub fn points_available(b: Base, n: usize, r: Base) -> u64 {
    if b == r {
        return n as u64;
    }
    let est = (n as f64 * (b.value() as f64).ln() / (r.value() as f64).ln()).floor() as u64;
    let q = b.big_pow(n as u64);
    let mut m = est.saturating_sub(2);
    while r.big_pow(m + 1) <= q {
        m += 1;
    }
    while m > 0 && r.big_pow(m) > q {
        m -= 1;
    }
    m
}

/// The orbit of a stream in base `r`: keys, next digits, and optionally the
/// exact numerators over `b^n`.
struct Walk {
    keys: Vec<u128>,
    digits: Vec<u64>,
    exact: Vec<BigUint>,
    denom: BigUint,
}

fn walk(stream: &DigitBlock, r: Base, count: u64, exact_upto: u64) -> Walk {
    let b = stream.base();
    let q = b.big_pow(stream.len() as u64);
    let mut y = stream.digits().iter().fold(BigUint::zero(), |acc, &d| acc * b.value() + d);
    let rv = r.value();
    let mut keys = Vec::with_capacity(count as usize);
    let mut digits = Vec::with_capacity(count as usize);
    let mut exact = Vec::new();
    for j in 0..count {
        let key = ((&y << 128u32) / &q).to_u128().unwrap_or(u128::MAX);
        keys.push(key);
        let (d, rest) = (&y * rv).div_rem(&q);
        digits.push(d.to_u64().unwrap_or(0));
        if j < exact_upto {
            exact.push(y);
        }
        y = rest;
    }
    Walk { keys, digits, exact, denom: q }
}

/// Bracket of the star discrepancy of points `[k_i, k_i + 1) 2^-128`.
fn star_from_keys(keys: &[u128]) -> Measured {
    let mut sorted = keys.to_vec();
    sorted.sort_unstable();
    let n = BigInt::from(sorted.len());
    let unit = BigInt::one() << 128u32;
    // over N 2^128: max of i 2^128 - N x and N x - (i-1) 2^128
    let mut lo = BigInt::zero();
    let mut hi = BigInt::zero();
    for (i, &k) in sorted.iter().enumerate() {
        let nk = &n * BigInt::from(k);
        let up = BigInt::from(i + 1) * &unit - &nk;
        let down = &nk - BigInt::from(i) * &unit;
        lo = lo.max(&up - &n).max(down.clone());
        hi = hi.max(up).max(down + &n);
    }
    let den = &n * &unit;
    Measured::Enclosed { lo: BigRational::new(lo, den.clone()), hi: BigRational::new(hi, den) }
}

/// One trace row per checkpoint `N` (points `0 <= j < N`) for base `r`.
/// Checkpoints beyond [`points_available`] are dropped.
pub fn trace_base(stream: &DigitBlock, r: Base, checkpoints: &[u64], opts: &TraceOptions) -> Result<Vec<TraceRow>> {
    if stream.is_empty() {
        return Err(Error::EmptySequence);
    }
    let avail = points_available(stream.base(), stream.len(), r);
    let cps: Vec<u64> = checkpoints.iter().copied().filter(|&c| c >= 1 && c <= avail).collect();
    let Some(&top) = cps.iter().max() else {
        return Ok(Vec::new());
    };
    let exact_upto = if opts.exact { top } else { top.min(opts.exact_cap) };
    let w = walk(stream, r, top, exact_upto);
    let rows = map_items(&cps, |&n| -> Result<TraceRow> {
        let nu = n as usize;
        let exact_seq = (n <= exact_upto)
            .then(|| UnitSequence::from_parts(w.denom.clone(), w.exact[..nu].to_vec()))
            .transpose()?;
        let star = match &exact_seq {
            Some(seq) => Measured::Exact(star_discrepancy(seq)?),
            None => star_from_keys(&w.keys[..nu]),
        };
        let extreme = match &exact_seq {
            Some(seq) if n <= opts.exact_cap => Some(extreme_discrepancy(seq)?),
            _ => None,
        };
        let mut counts = vec![0u64; r.value() as usize];
        for &d in &w.digits[..nu] {
            counts[d as usize] += 1;
        }
        let simple = simple_from_counts(&counts);
        let block_c = match opts.block_ell {
            Some(ell) if ell >= 1 && ell <= nu => {
                let block = DigitBlock::new(r, w.digits[..nu].to_vec())?;
                Some((block_discrepancy(&block, ell)?, ell))
            }
            _ => None,
        };
        Ok(TraceRow { n, base: r, star, extreme, simple, block_c })
    });
    rows.into_iter().collect()
}

/// Rows for every base, ordered by base then `N`.
pub fn trace(stream: &DigitBlock, bases: &[Base], checkpoints: &[u64], opts: &TraceOptions) -> Result<Vec<TraceRow>> {
    let mut out = Vec::new();
    for &r in bases {
        out.extend(trace_base(stream, r, checkpoints, opts)?);
    }
    Ok(out)
}

/// `start, 2 start, 4 start, ...` below `total`, then `total`.
pub fn geometric_checkpoints(start: u64, total: u64) -> Vec<u64> {
    let mut out = Vec::new();
    let mut n = start.max(1);
    while n < total {
        out.push(n);
        n = n.saturating_mul(2);
    }
    if total > 0 {
        out.push(total);
    }
    out
}

/// `step, 2 step, ...` up to `total`, then `total`.
pub fn linear_checkpoints(step: u64, total: u64) -> Vec<u64> {
    let step = step.max(1);
    let mut out: Vec<u64> = (1..).map(|i| i * step).take_while(|&n| n < total).collect();
    if total > 0 {
        out.push(total);
    }
    out
}

/// Decimal rendering with `sig` significant digits, rounding half to even.
pub fn decimal(v: &BigRational, sig: usize) -> String {
    if v.is_zero() {
        return "0".into();
    }
    let neg = v < &BigRational::zero();
    let a = if neg { -v.clone() } else { v.clone() };
    // exponent e with 10^e <= a < 10^(e+1)
    let l2 = crate::counting::big_log2(a.numer().magnitude()) - crate::counting::big_log2(a.denom().magnitude());
    let mut e = (l2 * std::f64::consts::LOG10_2).floor() as i64;
    let pow10 = |k: i64| -> BigRational {
        if k >= 0 {
            BigRational::from_integer(num_traits::pow(BigInt::from(10), k as usize))
        } else {
            BigRational::new(1.into(), num_traits::pow(BigInt::from(10), (-k) as usize))
        }
    };
    while pow10(e) > a {
        e -= 1;
    }
    while pow10(e + 1) <= a {
        e += 1;
    }
    let shift = sig as i64 - 1 - e;
    let scaled = &a * pow10(shift);
    let fl = scaled.floor();
    let frac = &scaled - &fl;
    let half = BigRational::new(1.into(), 2.into());
    let mut m = fl.to_integer();
    if frac > half || (frac == half && m.is_odd()) {
        m += 1;
    }
    // rounding may carry to one more digit
    let mut shift = shift;
    if m.to_string().len() > sig {
        m /= 10;
        shift -= 1;
    }
    let digits = m.to_string();
    let s = if shift <= 0 {
        let zeros = "0".repeat((-shift) as usize);
        format!("{}{}", digits, zeros)
    } else if (shift as usize) >= digits.len() {
        let lead = "0".repeat(shift as usize - digits.len());
        trim(format!("0.{}{}", lead, digits))
    } else {
        let cut = digits.len() - shift as usize;
        trim(format!("{}.{}", &digits[..cut], &digits[cut..]))
    };
    if neg {
        format!("-{}", s)
    } else {
        s
    }
}

fn trim(s: String) -> String {
    if !s.contains('.') {
        return s;
    }
    let t = s.trim_end_matches('0').trim_end_matches('.');
    t.to_string()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::counting::suffix_orbit;

    fn b(v: u64) -> Base {
        Base::new(v).unwrap()
    }

    fn q(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    #[test]
    fn decimal_rounding() {
        assert_eq!(decimal(&q(1, 3), 12), "0.333333333333");
        assert_eq!(decimal(&q(2, 3), 12), "0.666666666667");
        assert_eq!(decimal(&q(1, 2), 12), "0.5");
        assert_eq!(decimal(&q(1, 8), 2), "0.12");
        assert_eq!(decimal(&q(3, 8), 2), "0.38");
        assert_eq!(decimal(&q(99995, 100000), 4), "1");
        assert_eq!(decimal(&q(1234, 1), 2), "1200");
    }

    #[test]
    fn checkpoints() {
        assert_eq!(geometric_checkpoints(64, 300), vec![64, 128, 256, 300]);
        assert_eq!(geometric_checkpoints(64, 256), vec![64, 128, 256]);
        assert_eq!(linear_checkpoints(100, 250), vec![100, 200, 250]);
    }

    #[test]
    fn all_zero_stream_has_simple_half() {
        let s = DigitBlock::new(b(2), vec![0; 300]).unwrap();
        let rows = trace(&s, &[b(2)], &geometric_checkpoints(64, 300), &TraceOptions::default()).unwrap();
        assert_eq!(rows.len(), 4);
        for r in rows {
            assert_eq!(r.simple, q(1, 2));
            assert_eq!(r.star, Measured::Exact(BigRational::one()));
        }
    }

    #[test]
    fn same_base_matches_suffix_orbit() {
        let d: Vec<u64> = (0..40).map(|i| (i * 7 + i / 3) % 3).collect();
        let s = DigitBlock::new(b(3), d).unwrap();
        let rows = trace_base(&s, b(3), &[40], &TraceOptions { exact_cap: 5000, exact: true, block_ell: Some(1) }).unwrap();
        let seq = suffix_orbit(&s);
        assert_eq!(rows[0].extreme.as_ref().unwrap(), &extreme_discrepancy(&seq).unwrap());
        assert_eq!(rows[0].star, Measured::Exact(star_discrepancy(&seq).unwrap()));
    }

    #[test]
    fn key_bracket_contains_exact() {
        let d: Vec<u64> = (0..500u64).map(|i| (i * i + 3 * i) % 10 % 2).collect();
        let s = DigitBlock::new(b(2), d).unwrap();
        for r in [b(2), b(3), b(5)] {
            let n = points_available(b(2), 500, r);
            let approx = trace_base(&s, r, &[n], &TraceOptions { exact_cap: 0, exact: false, block_ell: None }).unwrap();
            let exact = trace_base(&s, r, &[n], &TraceOptions { exact_cap: 0, exact: true, block_ell: None }).unwrap();
            let v = exact[0].star.lower().clone();
            assert!(approx[0].star.lower() <= &v && &v <= approx[0].star.upper());
        }
    }

    #[test]
    fn available_points() {
        assert_eq!(points_available(b(2), 10, b(2)), 10);
        // 3^6 = 729 <= 1024 < 2187
        assert_eq!(points_available(b(2), 10, b(3)), 6);
        assert_eq!(points_available(b(10), 3, b(2)), 9);
    }
}
