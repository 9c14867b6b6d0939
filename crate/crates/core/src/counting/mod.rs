//! Counting good digit blocks: large-deviation thresholds for block
//! frequencies, the base-4 defect count, and restricted alphabets whose
//! words expand to normal-looking base-`s` strings.

use std::fmt;

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::discrepancy::extreme_discrepancy;
use crate::numerics::certified;
use crate::par::{index_digits, map_chunks, next_word};
use crate::{Base, DigitBlock, Error, Result, UnitSequence};

/// Largest number of words any exhaustive enumeration may visit.
pub const ENUMERATION_BUDGET: u64 = 1 << 24;

/// Largest result, in bits, that thresholds are certified to exactly.
pub const EXACT_BOUND_BITS: u64 = 1 << 18;

/// A computed bound: an exact integer, or an estimate of its size when
/// certifying it exactly would exceed [`EXACT_BOUND_BITS`].
#[derive(Clone, Debug, PartialEq)]
pub enum Bound {
    Exact(BigUint),
    Beyond { log2: f64 },
}

impl Bound {
    pub fn exact(&self) -> Option<&BigUint> {
        match self {
            Bound::Exact(v) => Some(v),
            Bound::Beyond { .. } => None,
        }
    }

    pub fn log2(&self) -> f64 {
        match self {
            Bound::Exact(v) if v.is_zero() => f64::NEG_INFINITY,
            Bound::Exact(v) => big_log2(v),
            Bound::Beyond { log2 } => *log2,
        }
    }

    pub fn max(self, other: Bound) -> Bound {
        match (&self, &other) {
            (Bound::Exact(a), Bound::Exact(b)) => Bound::Exact(a.max(b).clone()),
            _ if self.log2() >= other.log2() => self,
            _ => other,
        }
    }
}

impl fmt::Display for Bound {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Bound::Exact(v) if v.bits() <= 256 => write!(f, "{}", v),
            Bound::Exact(v) => write!(f, "~2^{:.1} (exact, {} bits)", big_log2(v), v.bits()),
            Bound::Beyond { log2 } => write!(f, "~2^{:.1}", log2),
        }
    }
}

pub(crate) fn big_log2(v: &BigUint) -> f64 {
    let b = v.bits();
    if b <= 1000 {
        return v.to_f64().unwrap_or(f64::MAX).log2();
    }
    let top = (v >> (b - 64)).to_f64().unwrap();
    top.log2() + (b - 64) as f64
}

fn rat_log2(r: &BigRational) -> f64 {
    big_log2(r.numer().magnitude()) - big_log2(r.denom().magnitude())
}

/// `max_u |occ(u)/n - 1/t| < eps` for a complete count vector.
fn counts_below(counts: &[u64], n: u64, eps: &BigRational) -> bool {
    let t = counts.len() as u128;
    let worst = counts
        .iter()
        .map(|&c| (c as i128 * t as i128 - n as i128).unsigned_abs())
        .max()
        .unwrap_or(0);
    // worst / (n t) < num / den
    BigInt::from(worst) * eps.denom() < eps.numer() * BigInt::from(n as u128 * t)
}

/// Whether `C(l, v) < eps` for a word, with `t = s^l` block codes.
fn word_good(v: &[u64], s: u64, ell: usize, t: u64, eps: &BigRational, counts: &mut [u64]) -> bool {
    counts.iter_mut().for_each(|c| *c = 0);
    let mut code = 0u64;
    for (i, &d) in v.iter().enumerate() {
        code = (code * s + d) % t;
        if i + 1 >= ell {
            counts[code as usize] += 1;
        }
    }
    counts_below(counts, v.len() as u64, eps)
}

fn check_budget(s: u64, n: u64, what: &str) -> Result<u64> {
    let total = (s as u128).checked_pow(n as u32).filter(|&t| t <= ENUMERATION_BUDGET as u128);
    total.map(|t| t as u64).ok_or_else(|| Error::BudgetExceeded {
        what: what.into(),
        needed: format!("{}^{}", s, n),
        budget: ENUMERATION_BUDGET.to_string(),
    })
}

/// Count words over `s` symbols of length `n` satisfying a predicate made
/// once per chunk by `make`.
fn count_words<G: FnMut(&[u64]) -> bool>(
    s: u64,
    n: usize,
    total: u64,
    make: impl Fn() -> G + Sync + Send,
) -> u64 {
    let chunk = (total / 256).max(1 << 12);
    map_chunks(total, chunk, |from, to| {
        let mut good = make();
        let mut w = index_digits(from, s, n);
        let mut c = 0u64;
        for _ in from..to {
            if good(&w) {
                c += 1;
            }
            next_word(&mut w, s);
        }
        c
    })
    .into_iter()
    .sum()
}

/// Exact number of words `v` of length `n` over `s` with `C(l, v) < eps`.
pub fn good_block_count(s: Base, ell: u64, eps: &BigRational, n: u64) -> Result<u64> {
    if ell == 0 || n == 0 {
        return Err(Error::InvalidInput("block length and word length must be positive".into()));
    }
    if ell > n {
        return Err(Error::BlockTooShort { len: n as usize, needed: ell as usize });
    }
    let total = check_budget(s.value(), n, "good-block enumeration; use block_frequency_threshold")?;
    let t = s.value().checked_pow(ell as u32).filter(|&t| t <= 1 << 22).ok_or_else(|| {
        Error::BudgetExceeded { what: "block alphabet".into(), needed: format!("{}^{}", s, ell), budget: "2^22".into() }
    })?;
    let sv = s.value();
    Ok(count_words(sv, n as usize, total, || {
        let mut counts = vec![0u64; t as usize];
        move |w: &[u64]| word_good(w, sv, ell as usize, t, eps, &mut counts)
    }))
}

/// Least integer strictly above `2 ln(x) / eps^2`, or its size.
fn hoeffding_length(x: &BigRational, eps: &BigRational) -> Result<Bound> {
    let scale = BigRational::from_integer(2.into()) / (eps * eps);
    let ln_est = rat_log2(x) * std::f64::consts::LN_2;
    let est = ln_est.max(1e-300).log2() + rat_log2(&scale);
    if est > EXACT_BOUND_BITS as f64 {
        return Ok(Bound::Beyond { log2: est });
    }
    let mut bits = (est.max(0.0) as u32) + 96;
    loop {
        let e = certified::ln_rational(x, bits)
            .mul_int(scale.numer())
            .div_int(scale.denom());
        if let Some(v) = e.decided_next_int() {
            return Ok(Bound::Exact(v.to_biguint().unwrap_or_default()));
        }
        if bits > certified::MAX_BITS {
            return Err(Error::PrecisionCap { bits });
        }
        bits *= 2;
    }
}

/// Large-deviation `N_0` for an arbitrary-size alphabet of `s` symbols.
///
/// The `N - l + 1` block positions split into `l` residue classes of
/// independent blocks. A Hoeffding bound per class and a union bound over
/// classes and the `s^l` blocks give the bad fraction below `delta` once
/// each class has more than `2 ln(2 l s^l / delta) / eps^2` positions and
/// the edge correction `(l-1)/(s^l N)` is below `eps/2`.
pub fn block_frequency_bound(s: &BigUint, ell: u64, eps: &BigRational, delta: &BigRational) -> Result<Bound> {
    if ell == 0 || s < &BigUint::from(2u32) {
        return Err(Error::InvalidInput("need l >= 1 and at least two symbols".into()));
    }
    if !eps.is_positive() || !delta.is_positive() {
        return Err(Error::InvalidInput("epsilon and delta must be positive".into()));
    }
    let delta = delta.clone().min(BigRational::one());
    let sl = num_traits::pow(s.clone(), ell as usize);
    let x = BigRational::from_integer(BigInt::from(2 * ell) * BigInt::from(sl.clone())) / &delta;
    let n = match hoeffding_length(&x, eps)? {
        Bound::Exact(n) => n,
        beyond => return Ok(beyond),
    };
    let l = BigUint::from(ell);
    let by_classes = &l * &n + &l - 1u32;
    let edge = (BigRational::from_integer(BigInt::from(2 * (ell - 1))) / (BigRational::from_integer(sl.into()) * eps))
        .floor()
        .to_integer()
        .to_biguint()
        .unwrap_or_default()
        + 1u32;
    Ok(Bound::Exact(by_classes.max(edge).max(l)))
}

/// `N_0` such that for every `N >= N_0` fewer than `delta s^N` words of
/// length `N` over `s` have `C(l, v) >= eps`.
pub fn block_frequency_threshold(s: Base, ell: u64, eps: &BigRational, delta: &BigRational) -> Result<Bound> {
    block_frequency_bound(&s.big(), ell, eps, delta)
}

/// Exhaustive calibration: the least `N_0` such that the bad fraction is
/// below `delta` for every enumerable `N` in `N_0..=checked_up_to`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Calibration {
    pub n0: Option<u64>,
    pub checked_up_to: u64,
}

pub fn block_frequency_calibrate(s: Base, ell: u64, eps: &BigRational, delta: &BigRational) -> Result<Calibration> {
    let mut top = ell;
    while check_budget(s.value(), top + 1, "").is_ok() {
        top += 1;
    }
    let mut n0 = None;
    for n in (ell..=top).rev() {
        let good = good_block_count(s, ell, eps, n)?;
        let total = s.value().pow(n as u32);
        let bad = BigRational::new((total - good).into(), total.into());
        if bad < *delta {
            n0 = Some(n);
        } else {
            break;
        }
    }
    Ok(Calibration { n0, checked_up_to: top })
}

/// Count of `v` in `{0,1}^N` for which at least 5/8 of the points
/// `{2^m eta_v}`, `0 <= m < 2N`, lie in `[0, 1/2)`, where
/// `eta_v = sum v_j 4^-j`.
pub fn base4_defect_survey(n: u64) -> Result<(u64, BigRational)> {
    if n == 0 {
        return Err(Error::InvalidInput("N must be positive".into()));
    }
    let total = check_budget(2, n, "base-4 defect enumeration")?;
    let two_n = 2 * n as u32;
    let count = count_words(2, n as usize, total, || |v: &[u64]| {
        let eta = v.iter().fold(0u64, |acc, &d| acc * 4 + d);
        // {2^m eta} < 1/2 iff binary digit m+1 of eta is 0
        let low = (0..two_n).filter(|&m| (eta >> (two_n - 1 - m)) & 1 == 0).count() as u64;
        8 * low >= 5 * 2 * n
    });
    Ok((count, BigRational::new(count.into(), total.into())))
}

/// `N_0` for the base-4 defect count: the block threshold at `s = 2`,
/// `l = 1`, `eps = 1/12` and `delta = eps`.
pub fn base4_defect_threshold(eps: &BigRational) -> Result<Bound> {
    if !eps.is_positive() || *eps >= BigRational::one() {
        return Err(Error::InvalidInput(format!("epsilon {} must lie in (0,1)", eps)));
    }
    block_frequency_threshold(Base::new(2)?, 1, &BigRational::new(1.into(), 12.into()), eps)
}

/// The `w -> w*` map from base `s^k` digits to base `s` digits.
pub fn expand_block(w: &DigitBlock, s: Base, k: u32) -> Result<DigitBlock> {
    w.expand(s, k)
}

/// Which top symbols of base `s^k` are dropped.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Parity {
    /// `s~ = s^k - 1`.
    Odd,
    /// `s~ = s^k - 2`.
    Even,
}

/// Digits `0..s~` of base `s^k`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RestrictedAlphabet {
    s: Base,
    k: u64,
    drop: u32,
}

impl RestrictedAlphabet {
    pub fn new(s: Base, k: u64, parity: Parity) -> Result<Self> {
        if k == 0 {
            return Err(Error::InvalidInput("k must be positive".into()));
        }
        let drop = match parity {
            Parity::Odd => 1u32,
            Parity::Even => 2,
        };
        let full = (s.value() as u128).checked_pow(k.min(64) as u32).unwrap_or(u128::MAX);
        if full < drop as u128 + 2 {
            return Err(Error::InvalidInput(format!("alphabet for {}^{} is too small", s, k)));
        }
        Ok(Self { s, k, drop })
    }

    /// The alphabet used by the constructions: `s^k - 1` for odd `s`,
    /// `s^k - 2` for even `s`, so `s~` is always even.
    pub fn for_base(s: Base, k: u64) -> Result<Self> {
        Self::new(s, k, if s.value() % 2 == 1 { Parity::Odd } else { Parity::Even })
    }

    pub fn s(&self) -> Base {
        self.s
    }

    pub fn k(&self) -> u64 {
        self.k
    }

    pub fn parity(&self) -> Parity {
        if self.drop == 1 {
            Parity::Odd
        } else {
            Parity::Even
        }
    }

    /// `s~`, computed on demand since `s^k` may be very large.
    pub fn s_tilde(&self) -> BigUint {
        self.s.big_pow(self.k) - self.drop
    }

    pub fn size(&self) -> Option<u64> {
        let k = u32::try_from(self.k).ok()?;
        self.s.value().checked_pow(k).map(|v| v - self.drop as u64)
    }
}

/// Parameters realizing the restricted-alphabet normality count.
#[derive(Clone, Debug, PartialEq)]
pub struct RestrictedDigitParams {
    /// Least `l` with `s^l > 3/eps`.
    pub ell: u64,
    pub k: u64,
    pub n0: Bound,
    pub alphabet: RestrictedAlphabet,
}

/// Least `l` with `s^l > 3/eps`.
pub fn block_length_for(s: Base, eps: &BigRational) -> u64 {
    let target = BigRational::from_integer(3.into()) / eps;
    let mut l = 1;
    let mut p = BigRational::from_integer(s.value().into());
    while p <= target {
        p *= BigRational::from_integer(s.value().into());
        l += 1;
    }
    l
}

/// `k` and `N_0` such that more than half of the words `w` of length
/// `N >= N_0` over the restricted alphabet have
/// `D({s^j eta_w} : 0 <= j < kN) < eps`.
///
/// With `g = eps^2/18`, `l` minimal with `s^l > 3/eps` and `d = g/8`:
/// `k >= 8l/g` and `k` at least the block threshold for `(s, l, d, d)`, so
/// more than `1 - d` of the length-`k` blocks have `C(l, .) < d`. Then
/// `N_0` is the single-letter threshold over `s~` symbols at tolerance
/// `g / (4 s^k)` and fraction 1/2, and at least `l / (g k)`. Together these
/// give `C(l, w*) < g` for more than half of the words.
pub fn restricted_digit_params(s: Base, eps: &BigRational, parity: Parity) -> Result<RestrictedDigitParams> {
    if !eps.is_positive() || *eps >= BigRational::one() {
        return Err(Error::InvalidInput(format!("epsilon {} must lie in (0,1)", eps)));
    }
    let g = eps * eps / BigRational::from_integer(18.into());
    let ell = block_length_for(s, eps);
    let d = &g / BigRational::from_integer(8.into());
    let by_ratio = (BigRational::from_integer((8 * ell).into()) / &g).ceil().to_integer();
    let by_blocks = block_frequency_threshold(s, ell, &d, &d)?;
    let by_blocks = by_blocks.exact().cloned().ok_or_else(|| Error::BudgetExceeded {
        what: "block length k".into(),
        needed: by_blocks.to_string(),
        budget: "u64".into(),
    })?;
    let k = by_blocks.max(by_ratio.to_biguint().unwrap_or_default());
    let k = k.to_u64().ok_or_else(|| Error::BudgetExceeded {
        what: "block length k".into(),
        needed: k.to_string(),
        budget: "u64".into(),
    })?;
    let alphabet = RestrictedAlphabet::new(s, k, parity)?;
    let n0 = restricted_digit_n0(s, k, eps, &alphabet)?;
    Ok(RestrictedDigitParams { ell, k, n0, alphabet })
}

/// `N_0(s, k, eps)` for a given `k`.
pub fn restricted_digit_n0(s: Base, k: u64, eps: &BigRational, alphabet: &RestrictedAlphabet) -> Result<Bound> {
    let g = eps * eps / BigRational::from_integer(18.into());
    let ell = block_length_for(s, eps);
    let sk_bits = k as f64 * (s.value() as f64).log2();
    let letters = if 2.0 * sk_bits > EXACT_BOUND_BITS as f64 {
        // 2 ln(..) (4 s^k / g)^2 has at least 2 k log2 s bits
        Bound::Beyond { log2: 2.0 * sk_bits + 2.0 * (4.0 / g.to_f64().unwrap_or(1.0)).log2() }
    } else {
        let tol = &g / BigRational::from_integer(BigInt::from(s.big_pow(k)) * 4);
        block_frequency_bound(&alphabet.s_tilde(), 1, &tol, &BigRational::new(1.into(), 2.into()))?
    };
    let by_len = (BigRational::from_integer(ell.into()) / (&g * BigRational::from_integer(k.into())))
        .floor()
        .to_integer()
        .to_biguint()
        .unwrap_or_default()
        + 1u32;
    Ok(letters.max(Bound::Exact(by_len)))
}

/// Result of a word survey.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WordSurvey {
    pub passing: u64,
    pub evaluated: u64,
    pub fraction: BigRational,
    pub estimate: bool,
}

/// Fraction of words `w` of length `N` over the restricted alphabet with
/// `D({s^j eta_w} : 0 <= j < kN) < eps`. Samples `sample` words with a
/// seeded ChaCha8 stream when the word count exceeds it.
pub fn restricted_digit_survey(
    alphabet: &RestrictedAlphabet,
    n: u64,
    eps: &BigRational,
    sample: Option<u64>,
    seed: u64,
) -> Result<WordSurvey> {
    if n == 0 {
        return Err(Error::InvalidInput("N must be positive".into()));
    }
    let st = alphabet.size().ok_or_else(|| Error::InvalidInput("alphabet too large".into()))?;
    let s = alphabet.s();
    let k = u32::try_from(alphabet.k()).map_err(|_| Error::InvalidInput("k too large".into()))?;
    let sk = s.pow(k)?;
    let total = (st as u128).checked_pow(n as u32).filter(|&t| t <= ENUMERATION_BUDGET as u128);
    let exhaustive = match (total, sample) {
        (Some(t), Some(m)) => t <= m as u128,
        (Some(_), None) => true,
        (None, _) => false,
    };
    let good = |w: &[u64]| -> bool {
        let block = DigitBlock::new(sk, w.to_vec()).expect("digits below s^k");
        let star = block.expand(s, k).expect("valid expansion");
        let seq = suffix_orbit(&star);
        extreme_discrepancy(&seq).map(|d| d < *eps).unwrap_or(false)
    };
    if exhaustive {
        let t = total.unwrap() as u64;
        let passing = count_words(st, n as usize, t, || good);
        return Ok(WordSurvey { passing, evaluated: t, fraction: BigRational::new(passing.into(), t.into()), estimate: false });
    }
    let m = sample.ok_or_else(|| Error::BudgetExceeded {
        what: "word survey".into(),
        needed: format!("{}^{}", st, n),
        budget: ENUMERATION_BUDGET.to_string(),
    })?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let words: Vec<Vec<u64>> = (0..m).map(|_| (0..n).map(|_| rng.gen_range(0..st)).collect()).collect();
    let passing = crate::par::map_items(&words, |w| good(w) as u64).into_iter().sum();
    Ok(WordSurvey { passing, evaluated: m, fraction: BigRational::new(passing.into(), m.into()), estimate: true })
}

/// `({s^j x} : 0 <= j < n)` for `x = 0.d_1 d_2 ... d_n` in base `s`.
pub fn suffix_orbit(w: &DigitBlock) -> UnitSequence {
    let s = w.base().big();
    let n = w.len();
    let denom = num_traits::pow(s.clone(), n);
    let mut nums = Vec::with_capacity(n);
    // suffix values, scaled back to the full denominator
    let mut suffix = BigUint::zero();
    let mut place = BigUint::one();
    let mut rev = Vec::with_capacity(n);
    for &d in w.digits().iter().rev() {
        suffix += &place * d;
        place *= &s;
        rev.push(suffix.clone());
    }
    // rev[i] is the value of the last i+1 digits over s^(i+1)
    let mut shift = BigUint::one();
    for i in 0..n {
        let v = &rev[n - 1 - i];
        nums.push(v * &shift);
        shift *= &s;
    }
    UnitSequence::from_parts(denom, nums).expect("points below one")
}

#[cfg(test)]
mod tests;
