//! Bases, digit blocks, exact adic rationals and fractional orbits.

pub mod certified;

use std::fmt;

use num_bigint::{BigInt, BigUint};
use num_integer::{Integer, Roots};
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::{Error, Result};
use certified::{certify, Enclosure};

/// An integer base, at least 2.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Base(u64);

impl Base {
    pub fn new(value: u64) -> Result<Self> {
        if value < 2 {
            return Err(Error::InvalidBase(value));
        }
        Ok(Self(value))
    }

    pub fn value(self) -> u64 {
        self.0
    }

    pub fn big(self) -> BigUint {
        BigUint::from(self.0)
    }

    /// `self^k` as a base, failing when it does not fit in 64 bits.
    pub fn pow(self, k: u32) -> Result<Self> {
        if k == 0 {
            return Err(Error::InvalidInput("base power must be positive".into()));
        }
        self.0
            .checked_pow(k)
            .map(Self)
            .ok_or_else(|| Error::BudgetExceeded {
                what: format!("alphabet {}^{}", self.0, k),
                needed: "more than 64 bits".into(),
                budget: "64-bit digits".into(),
            })
    }

    pub fn big_pow(self, k: u64) -> BigUint {
        num_traits::pow(self.big(), k as usize)
    }
}

impl fmt::Display for Base {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// Least `m` with `b = m^j` for some `j >= 1`.
pub fn minimal_representative(b: Base) -> Base {
    let v = b.0;
    let max_j = 63 - v.leading_zeros();
    for j in (2..=max_j).rev() {
        let m = v.nth_root(j);
        if m >= 2 && m.checked_pow(j) == Some(v) {
            return Base(m);
        }
    }
    b
}

/// Whether one base is a rational power of the other.
pub fn mult_dependent(a: Base, b: Base) -> bool {
    minimal_representative(a) == minimal_representative(b)
}

/// `ceil(b / ln r)`, certified.
pub fn scaled_index(b: u64, r: Base) -> Result<u64> {
    if b == 0 {
        return Err(Error::InvalidInput("scaled index needs b >= 1".into()));
    }
    let v = certify(
        |bits| Enclosure::from_int(b, bits).div(&certified::ln_u64(r.0, bits)),
        |e| e.decided_ceil(),
    )?;
    v.to_u64()
        .ok_or_else(|| Error::InvalidInput("scaled index overflow".into()))
}

/// `scaled_index` extended by `<0;r> = 0`, for window endpoints.
pub fn window_index(b: u64, r: Base) -> Result<u64> {
    if b == 0 {
        Ok(0)
    } else {
        scaled_index(b, r)
    }
}

/// A finite block of digits over a fixed alphabet.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct DigitBlock {
    base: Base,
    digits: Vec<u64>,
}

impl DigitBlock {
    pub fn new(base: Base, digits: Vec<u64>) -> Result<Self> {
        if let Some(&d) = digits.iter().find(|&&d| d >= base.0) {
            return Err(Error::InvalidDigit { digit: d, base: base.0 });
        }
        Ok(Self { base, digits })
    }

    pub fn empty(base: Base) -> Self {
        Self { base, digits: Vec::new() }
    }

    pub fn base(&self) -> Base {
        self.base
    }

    pub fn digits(&self) -> &[u64] {
        &self.digits
    }

    pub fn into_digits(self) -> Vec<u64> {
        self.digits
    }

    pub fn len(&self) -> usize {
        self.digits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.digits.is_empty()
    }

    pub fn push(&mut self, d: u64) -> Result<()> {
        if d >= self.base.0 {
            return Err(Error::InvalidDigit { digit: d, base: self.base.0 });
        }
        self.digits.push(d);
        Ok(())
    }

    pub fn extend_from(&mut self, other: &DigitBlock) -> Result<()> {
        if other.base != self.base {
            return Err(Error::InvalidInput(format!(
                "cannot append base {} digits to base {} block",
                other.base, self.base
            )));
        }
        self.digits.extend_from_slice(&other.digits);
        Ok(())
    }

    /// Rewrites each digit of this block as `k` digits in base `s`, where
    /// `self.base() = s^k`.
    pub fn expand(&self, s: Base, k: u32) -> Result<DigitBlock> {
        if s.pow(k)? != self.base {
            return Err(Error::InvalidInput(format!(
                "{} is not {}^{}",
                self.base, s, k
            )));
        }
        let mut out = Vec::with_capacity(self.digits.len() * k as usize);
        for &d in &self.digits {
            let start = out.len();
            let mut v = d;
            for _ in 0..k {
                out.push(v % s.0);
                v /= s.0;
            }
            out[start..].reverse();
        }
        Ok(DigitBlock { base: s, digits: out })
    }

    /// Groups base-`s` digits into base-`s^k` digits. Length must be a
    /// multiple of `k`.
    pub fn group(&self, k: u32) -> Result<DigitBlock> {
        let big = self.base.pow(k)?;
        if self.digits.len() % k as usize != 0 {
            return Err(Error::LengthMismatch(format!(
                "{} digits do not split into groups of {}",
                self.digits.len(),
                k
            )));
        }
        let digits = self
            .digits
            .chunks(k as usize)
            .map(|c| c.iter().fold(0u64, |acc, &d| acc * self.base.0 + d))
            .collect();
        Ok(DigitBlock { base: big, digits })
    }
}

/// `sum_j w_j s^-j`, exact.
pub fn adic_value(w: &DigitBlock) -> BigRational {
    let (num, den) = adic_parts(w);
    BigRational::new(BigInt::from(num), BigInt::from(den))
}

/// Numerator and denominator `s^|w|` of [`adic_value`], unreduced.
pub fn adic_parts(w: &DigitBlock) -> (BigUint, BigUint) {
    // Horner over chunks whose multiplier fits in a u64.
    let per = (64 / (64 - w.base.0.leading_zeros())) as usize;
    let mut num = BigUint::zero();
    let mut den = BigUint::one();
    for chunk in w.digits.chunks(per.max(1)) {
        let mut mul = 1u64;
        let mut add = 0u64;
        for &d in chunk {
            mul *= w.base.0;
            add = add * w.base.0 + d;
        }
        num = num * mul + add;
        den *= mul;
    }
    (num, den)
}

/// An exact rational with an explicit expansion in base `base^power`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AdicRational {
    base: Base,
    power: u32,
    digits: DigitBlock,
}

impl AdicRational {
    pub fn new(base: Base, power: u32, digits: DigitBlock) -> Result<Self> {
        if base.pow(power)? != digits.base {
            return Err(Error::InvalidInput(format!(
                "digit alphabet {} is not {}^{}",
                digits.base, base, power
            )));
        }
        Ok(Self { base, power, digits })
    }

    pub fn zero(base: Base, power: u32) -> Result<Self> {
        Ok(Self { base, power, digits: DigitBlock::empty(base.pow(power)?) })
    }

    pub fn base(&self) -> Base {
        self.base
    }

    pub fn power(&self) -> u32 {
        self.power
    }

    pub fn digits(&self) -> &DigitBlock {
        &self.digits
    }

    /// Number of base-`base^power` digits.
    pub fn precision(&self) -> usize {
        self.digits.len()
    }

    pub fn value(&self) -> BigRational {
        adic_value(&self.digits)
    }
}

/// The half-open interval `[lower, upper)` inside `[0,1]`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Interval {
    lower: BigRational,
    upper: BigRational,
}

impl Interval {
    pub fn new(lower: BigRational, upper: BigRational) -> Result<Self> {
        if lower.is_negative() || lower >= upper || upper > BigRational::one() {
            return Err(Error::InvalidInterval {
                lower: lower.to_string(),
                upper: upper.to_string(),
            });
        }
        Ok(Self { lower, upper })
    }

    pub fn unit() -> Self {
        Self { lower: BigRational::zero(), upper: BigRational::one() }
    }

    pub fn lower(&self) -> &BigRational {
        &self.lower
    }

    pub fn upper(&self) -> &BigRational {
        &self.upper
    }

    pub fn measure(&self) -> BigRational {
        &self.upper - &self.lower
    }

    pub fn contains(&self, x: &BigRational) -> bool {
        &self.lower <= x && x < &self.upper
    }
}

impl fmt::Display for Interval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}, {})", self.lower, self.upper)
    }
}

/// A finite sequence of rationals in `[0,1)` over a common denominator.
///
/// Point `i` equals `nums[i] / denom`. Keeping one denominator makes every
/// comparison an integer comparison.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct UnitSequence {
    denom: BigUint,
    nums: Vec<BigUint>,
}

impl UnitSequence {
    pub fn from_parts(denom: BigUint, nums: Vec<BigUint>) -> Result<Self> {
        if denom.is_zero() {
            return Err(Error::InvalidInput("zero denominator".into()));
        }
        if let Some(n) = nums.iter().find(|n| **n >= denom) {
            return Err(Error::PointOutOfRange(format!("{}/{}", n, denom)));
        }
        Ok(Self { denom, nums })
    }

    pub fn from_points(points: &[BigRational]) -> Result<Self> {
        let mut denom = BigUint::one();
        for p in points {
            if p.is_negative() || *p >= BigRational::one() {
                return Err(Error::PointOutOfRange(p.to_string()));
            }
            denom = denom.lcm(p.denom().magnitude());
        }
        let nums = points
            .iter()
            .map(|p| p.numer().magnitude() * (&denom / p.denom().magnitude()))
            .collect();
        Ok(Self { denom, nums })
    }

    /// Points `a_i / q` for small integers.
    pub fn from_u64(q: u64, nums: &[u64]) -> Result<Self> {
        Self::from_parts(BigUint::from(q), nums.iter().map(|&n| BigUint::from(n)).collect())
    }

    pub fn len(&self) -> usize {
        self.nums.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nums.is_empty()
    }

    pub fn denom(&self) -> &BigUint {
        &self.denom
    }

    pub fn numerators(&self) -> &[BigUint] {
        &self.nums
    }

    pub fn point(&self, i: usize) -> BigRational {
        BigRational::new(BigInt::from(self.nums[i].clone()), BigInt::from(self.denom.clone()))
    }

    pub fn points(&self) -> Vec<BigRational> {
        (0..self.len()).map(|i| self.point(i)).collect()
    }

    pub fn slice(&self, start: usize, end: usize) -> Self {
        Self { denom: self.denom.clone(), nums: self.nums[start..end].to_vec() }
    }

    /// Concatenation; denominators are brought to their lcm.
    pub fn concat(&self, other: &Self) -> Self {
        let denom = self.denom.lcm(&other.denom);
        let fa = &denom / &self.denom;
        let fb = &denom / &other.denom;
        let nums = self
            .nums
            .iter()
            .map(|n| n * &fa)
            .chain(other.nums.iter().map(|n| n * &fb))
            .collect();
        Self { denom, nums }
    }
}

/// `({r^j xi} : j_lo <= j < j_hi)` for a rational `xi` in `[0,1)`.
pub fn fractional_orbit(xi: &BigRational, r: Base, j_lo: u64, j_hi: u64) -> Result<UnitSequence> {
    if j_lo > j_hi {
        return Err(Error::InvalidInput(format!("orbit range {}..{} is reversed", j_lo, j_hi)));
    }
    if xi.is_negative() || *xi >= BigRational::one() {
        return Err(Error::PointOutOfRange(xi.to_string()));
    }
    let q = xi.denom().magnitude().clone();
    let p = xi.numer().magnitude().clone();
    let rb = r.big();
    let mut x = (&p * rb.modpow(&BigUint::from(j_lo), &q)) % &q;
    let n = (j_hi - j_lo) as usize;
    let mut nums = Vec::with_capacity(n);
    for _ in 0..n {
        nums.push(x.clone());
        x = (x * r.0) % &q;
    }
    Ok(UnitSequence { denom: q, nums })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    fn b(v: u64) -> Base {
        Base::new(v).unwrap()
    }

    #[test]
    fn representatives() {
        assert_eq!(minimal_representative(b(8)), b(2));
        assert_eq!(minimal_representative(b(6)), b(6));
        assert_eq!(minimal_representative(b(9)), b(3));
        assert_eq!(minimal_representative(b(1 << 62)), b(2));
        assert!(mult_dependent(b(4), b(8)));
        assert!(!mult_dependent(b(2), b(3)));
        assert!(mult_dependent(b(6), b(36)));
        assert!(Base::new(1).is_err());
    }

    #[test]
    fn scaled_indices() {
        assert_eq!(scaled_index(1, b(2)).unwrap(), 2);
        assert_eq!(scaled_index(10, b(3)).unwrap(), 10);
        assert_eq!(scaled_index(5, b(3)).unwrap(), 5);
        assert!(scaled_index(0, b(3)).is_err());
    }

    #[test]
    fn adic_values() {
        let w = DigitBlock::new(b(2), vec![1, 0, 1]).unwrap();
        assert_eq!(adic_value(&w), q(5, 8));
        let w = DigitBlock::new(b(4), vec![1, 1]).unwrap();
        assert_eq!(adic_value(&w), q(5, 16));
        assert_eq!(adic_value(&DigitBlock::empty(b(7))), q(0, 1));
        assert!(DigitBlock::new(b(2), vec![2]).is_err());
        let big = DigitBlock::new(b(3), vec![2; 100]).unwrap();
        let expect = BigRational::one()
            - BigRational::new(1.into(), BigInt::from(3u32).pow(100));
        assert_eq!(adic_value(&big), expect);
    }

    #[test]
    fn expand_and_group_round_trip() {
        let w = DigitBlock::new(b(9), vec![0, 8, 5]).unwrap();
        let e = w.expand(b(3), 2).unwrap();
        assert_eq!(e.digits(), &[0, 0, 2, 2, 1, 2]);
        assert_eq!(e.group(2).unwrap(), w);
        assert_eq!(adic_value(&e), adic_value(&w));
    }

    #[test]
    fn orbits() {
        let o = fractional_orbit(&q(1, 3), b(2), 0, 3).unwrap();
        assert_eq!(o.points(), vec![q(1, 3), q(2, 3), q(1, 3)]);
        let o = fractional_orbit(&q(0, 1), b(5), 0, 4).unwrap();
        assert_eq!(o.points(), vec![q(0, 1); 4]);
        let o = fractional_orbit(&q(5, 8), b(2), 0, 4).unwrap();
        assert_eq!(o.points(), vec![q(5, 8), q(1, 4), q(1, 2), q(0, 1)]);
        let o = fractional_orbit(&q(5, 8), b(2), 2, 4).unwrap();
        assert_eq!(o.points(), vec![q(1, 2), q(0, 1)]);
        assert!(fractional_orbit(&q(1, 1), b(2), 0, 1).is_err());
    }

    #[test]
    fn intervals() {
        assert!(Interval::new(q(1, 2), q(1, 2)).is_err());
        assert!(Interval::new(q(0, 1), q(3, 2)).is_err());
        let i = Interval::new(q(1, 4), q(1, 2)).unwrap();
        assert!(i.contains(&q(1, 4)) && !i.contains(&q(1, 2)));
    }
}
