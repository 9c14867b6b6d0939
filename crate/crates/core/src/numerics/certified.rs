//! Outward-rounded fixed-point enclosures.
//!
//! An [`Enclosure`] is a closed interval `[lo, hi] * 2^-bits` with integer
//! endpoints. Every operation rounds the lower endpoint down and the upper
//! endpoint up, so the true value of an expression built from exact inputs,
//! `pi` and natural logarithms always lies inside the result. Callers decide
//! a discrete question (a floor, a ceiling, a comparison) with [`certify`],
//! which doubles the working precision until the enclosure is decisive.

use num_bigint::{BigInt, BigUint, Sign};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::{Error, Result};

/// Precision used by the first attempt of [`certify`].
pub const START_BITS: u32 = 64;
/// Hard cap on working precision; reaching it is a [`Error::PrecisionCap`].
pub const MAX_BITS: u32 = 1 << 20;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Enclosure {
    lo: BigInt,
    hi: BigInt,
    bits: u32,
}

fn floor_div(a: &BigInt, b: &BigInt) -> BigInt {
    a.div_floor(b)
}

fn ceil_div(a: &BigInt, b: &BigInt) -> BigInt {
    -((-a).div_floor(b))
}

impl Enclosure {
    pub fn bits(&self) -> u32 {
        self.bits
    }

    fn unit(&self) -> BigInt {
        BigInt::one() << self.bits
    }

    pub fn from_int(v: impl Into<BigInt>, bits: u32) -> Self {
        let v = v.into() << bits;
        Self { lo: v.clone(), hi: v, bits }
    }

    pub fn from_ratio(p: &BigInt, q: &BigInt, bits: u32) -> Self {
        assert!(q.is_positive(), "denominator must be positive");
        let scaled = p << bits;
        Self {
            lo: floor_div(&scaled, q),
            hi: ceil_div(&scaled, q),
            bits,
        }
    }

    pub fn from_rational(r: &BigRational, bits: u32) -> Self {
        Self::from_ratio(r.numer(), r.denom(), bits)
    }

    /// Raw constructor for callers that already hold outward-rounded bounds.
    pub fn from_raw(lo: BigInt, hi: BigInt, bits: u32) -> Self {
        debug_assert!(lo <= hi);
        Self { lo, hi, bits }
    }

    /// The same enclosure at `bits` fractional bits, rounded outward.
    pub fn rescale(&self, bits: u32) -> Self {
        if bits >= self.bits {
            let d = bits - self.bits;
            Self { lo: &self.lo << d, hi: &self.hi << d, bits }
        } else {
            let d = self.bits - bits;
            let hi = -((-&self.hi) >> d);
            Self { lo: &self.lo >> d, hi, bits }
        }
    }

    pub fn lo_raw(&self) -> &BigInt {
        &self.lo
    }

    pub fn hi_raw(&self) -> &BigInt {
        &self.hi
    }

    pub fn lower(&self) -> BigRational {
        BigRational::new(self.lo.clone(), self.unit())
    }

    pub fn upper(&self) -> BigRational {
        BigRational::new(self.hi.clone(), self.unit())
    }

    pub fn width(&self) -> BigRational {
        BigRational::new(&self.hi - &self.lo, self.unit())
    }

    pub fn midpoint_f64(&self) -> f64 {
        let mid = BigRational::new(&self.lo + &self.hi, self.unit() * 2);
        rational_to_f64(&mid)
    }

    fn check(&self, other: &Self) {
        assert_eq!(self.bits, other.bits, "mixed enclosure precisions");
    }

    pub fn add(&self, o: &Self) -> Self {
        self.check(o);
        Self { lo: &self.lo + &o.lo, hi: &self.hi + &o.hi, bits: self.bits }
    }

    pub fn sub(&self, o: &Self) -> Self {
        self.check(o);
        Self { lo: &self.lo - &o.hi, hi: &self.hi - &o.lo, bits: self.bits }
    }

    pub fn neg(&self) -> Self {
        Self { lo: -&self.hi, hi: -&self.lo, bits: self.bits }
    }

    pub fn mul(&self, o: &Self) -> Self {
        self.check(o);
        let unit = self.unit();
        let prods = [
            &self.lo * &o.lo,
            &self.lo * &o.hi,
            &self.hi * &o.lo,
            &self.hi * &o.hi,
        ];
        let min = prods.iter().min().unwrap();
        let max = prods.iter().max().unwrap();
        Self {
            lo: floor_div(min, &unit),
            hi: ceil_div(max, &unit),
            bits: self.bits,
        }
    }

    pub fn mul_int(&self, k: &BigInt) -> Self {
        let (a, b) = (&self.lo * k, &self.hi * k);
        if k.is_negative() {
            Self { lo: b, hi: a, bits: self.bits }
        } else {
            Self { lo: a, hi: b, bits: self.bits }
        }
    }

    pub fn div(&self, o: &Self) -> Result<Self> {
        self.check(o);
        if !o.lo.is_positive() && !o.hi.is_negative() {
            return Err(Error::InvariantViolation(
                "enclosure division by an interval containing zero".into(),
            ));
        }
        let unit = self.unit();
        let mut lo: Option<BigInt> = None;
        let mut hi: Option<BigInt> = None;
        for a in [&self.lo, &self.hi] {
            for b in [&o.lo, &o.hi] {
                let n = a * &unit;
                let f = floor_div(&n, b);
                let c = ceil_div(&n, b);
                lo = Some(lo.map_or(f.clone(), |x| x.min(f)));
                hi = Some(hi.map_or(c.clone(), |x| x.max(c)));
            }
        }
        Ok(Self { lo: lo.unwrap(), hi: hi.unwrap(), bits: self.bits })
    }

    pub fn div_int(&self, k: &BigInt) -> Self {
        assert!(k.is_positive());
        Self {
            lo: floor_div(&self.lo, k),
            hi: ceil_div(&self.hi, k),
            bits: self.bits,
        }
    }

    pub fn pow(&self, mut n: u32) -> Self {
        let mut acc = Self::from_int(1, self.bits);
        let mut base = self.clone();
        while n > 0 {
            if n & 1 == 1 {
                acc = acc.mul(&base);
            }
            n >>= 1;
            if n > 0 {
                base = base.mul(&base);
            }
        }
        acc
    }

    /// `n`-th root of a nonnegative enclosure.
    pub fn root(&self, n: u32) -> Self {
        assert!(n >= 1);
        assert!(!self.lo.is_negative(), "root of a possibly negative value");
        if n == 1 {
            return self.clone();
        }
        // value = X / 2^b, root = (X * 2^(b(n-1)))^(1/n) / 2^b
        let shift = self.bits as usize * (n as usize - 1);
        let lo_s = self.lo.magnitude() << shift;
        let hi_s = self.hi.magnitude() << shift;
        let lo_r = lo_s.nth_root(n);
        let mut hi_r = hi_s.nth_root(n);
        if num_traits::pow(hi_r.clone(), n as usize) != hi_s {
            hi_r += 1u32;
        }
        Self {
            lo: BigInt::from(lo_r),
            hi: BigInt::from(hi_r),
            bits: self.bits,
        }
    }

    /// `self^(p/q)` for a positive rational exponent and nonnegative base.
    pub fn pow_ratio(&self, p: u32, q: u32) -> Self {
        self.pow(p).root(q)
    }

    pub fn max(&self, o: &Self) -> Self {
        self.check(o);
        Self {
            lo: self.lo.clone().max(o.lo.clone()),
            hi: self.hi.clone().max(o.hi.clone()),
            bits: self.bits,
        }
    }

    pub fn min(&self, o: &Self) -> Self {
        self.check(o);
        Self {
            lo: self.lo.clone().min(o.lo.clone()),
            hi: self.hi.clone().min(o.hi.clone()),
            bits: self.bits,
        }
    }

    pub fn floor_lo(&self) -> BigInt {
        floor_div(&self.lo, &self.unit())
    }

    pub fn floor_hi(&self) -> BigInt {
        floor_div(&self.hi, &self.unit())
    }

    /// `floor(x)` when every point of the enclosure has the same floor.
    pub fn decided_floor(&self) -> Option<BigInt> {
        let (a, b) = (self.floor_lo(), self.floor_hi());
        (a == b).then_some(a)
    }

    /// `ceil(x)` when every point of the enclosure has the same ceiling.
    pub fn decided_ceil(&self) -> Option<BigInt> {
        let unit = self.unit();
        let (a, b) = (ceil_div(&self.lo, &unit), ceil_div(&self.hi, &unit));
        (a == b).then_some(a)
    }

    /// Least integer strictly greater than every point of the enclosure,
    /// provided that integer is the same for every point.
    pub fn decided_next_int(&self) -> Option<BigInt> {
        self.decided_floor().map(|f| f + 1)
    }

    /// `Some(true)` if the whole enclosure is `< t`, `Some(false)` if it is
    /// `>= t`, `None` when it straddles.
    pub fn lt_rational(&self, t: &BigRational) -> Option<bool> {
        let unit = BigRational::from_integer(self.unit());
        let ts = t * unit;
        let hi = BigRational::from_integer(self.hi.clone());
        let lo = BigRational::from_integer(self.lo.clone());
        if hi < ts {
            Some(true)
        } else if lo >= ts {
            Some(false)
        } else {
            None
        }
    }

    pub fn contains_rational(&self, v: &BigRational) -> bool {
        let unit = BigRational::from_integer(self.unit());
        let vs = v * unit;
        BigRational::from_integer(self.lo.clone()) <= vs
            && vs <= BigRational::from_integer(self.hi.clone())
    }

    /// Widens by `ulps` units in the last place on both sides.
    pub fn widen(&self, ulps: u64) -> Self {
        Self {
            lo: &self.lo - ulps,
            hi: &self.hi + ulps,
            bits: self.bits,
        }
    }
}

/// Runs `f` at increasing precision until `decide` returns a value.
pub fn certify<T>(
    mut f: impl FnMut(u32) -> Result<Enclosure>,
    decide: impl Fn(&Enclosure) -> Option<T>,
) -> Result<T> {
    let mut bits = START_BITS;
    loop {
        let e = f(bits)?;
        if let Some(v) = decide(&e) {
            return Ok(v);
        }
        if bits >= MAX_BITS {
            return Err(Error::PrecisionCap { bits });
        }
        bits *= 2;
    }
}

/// Guard bits added internally by the series evaluations below.
fn guard(terms: u64) -> u32 {
    16 + 2 * (64 - terms.leading_zeros())
}

/// `atan(1/x)` for an integer `x >= 2`, at `bits` fractional bits.
fn atan_inv(x: u64, bits: u32) -> Enclosure {
    // Terms shrink by x^2 per step.
    let per_term = 2.0 * (x as f64).log2();
    let terms = (bits as f64 / per_term).ceil() as u64 + 2;
    let g = guard(terms);
    let wb = bits + g;
    let one = BigInt::one() << wb;
    let x2 = BigInt::from(x) * BigInt::from(x);
    let mut power = &one / BigInt::from(x); // floor(2^wb / x)
    let mut sum = BigInt::zero();
    let mut k: u64 = 0;
    while !power.is_zero() {
        let term = &power / BigInt::from(2 * k + 1);
        if k % 2 == 0 {
            sum += term;
        } else {
            sum -= term;
        }
        power /= &x2;
        k += 1;
    }
    // Each floor loses < 1 ulp, and the power error grows by < 1 ulp per step
    // but is damped by 1/x^2, so every term is off by < 2 ulps. The
    // alternating tail after the last nonzero term is < 1 ulp.
    let err = BigInt::from(2 * k + 2);
    let lo = (&sum - &err) >> g;
    let hi = ((&sum + &err) >> g) + 1;
    Enclosure { lo, hi, bits }
}

/// Enclosure of pi (Machin's formula).
pub fn pi(bits: u32) -> Enclosure {
    let wb = bits + 8;
    let a = atan_inv(5, wb).mul_int(&BigInt::from(16));
    let b = atan_inv(239, wb).mul_int(&BigInt::from(4));
    let v = a.sub(&b);
    Enclosure {
        lo: v.lo >> 8,
        hi: (v.hi >> 8) + 1,
        bits,
    }
}

/// `atanh(a/b)` for `0 <= a/b <= 1/3`.
fn atanh_ratio(a: &BigInt, b: &BigInt, bits: u32) -> Enclosure {
    debug_assert!(a * 3 <= *b);
    if a.is_zero() {
        return Enclosure::from_int(0, bits);
    }
    let terms = (bits as f64 / 3.17).ceil() as u64 + 2; // (1/3)^2 per step
    let g = guard(terms);
    let wb = bits + g;
    let a2 = a * a;
    let b2 = b * b;
    let mut power = (a << wb) / b;
    let mut sum = BigInt::zero();
    let mut k: u64 = 0;
    while !power.is_zero() {
        sum += &power / BigInt::from(2 * k + 1);
        power = (&power * &a2) / &b2;
        k += 1;
    }
    // Positive series: truncation remainder is below the first dropped
    // term times 1/(1-z^2) <= 9/8, i.e. < 2 ulps.
    let err = BigInt::from(2 * k + 4);
    let lo = (&sum - &err) >> g;
    let hi = ((&sum + &err) >> g) + 1;
    Enclosure { lo, hi, bits }
}

/// Enclosure of `ln 2`.
pub fn ln2(bits: u32) -> Enclosure {
    let e = atanh_ratio(&BigInt::from(1), &BigInt::from(3), bits + 2);
    let v = e.mul_int(&BigInt::from(2));
    Enclosure { lo: v.lo >> 2, hi: (v.hi >> 2) + 1, bits }
}

/// Enclosure of `ln n` for a positive integer.
pub fn ln_uint(n: &BigUint, bits: u32) -> Enclosure {
    assert!(!n.is_zero(), "ln of zero");
    // n = 2^e * y with y in [1, 2); ln y = 2 atanh((y-1)/(y+1)).
    let e = n.bits() - 1;
    let wb = bits + 4;
    let y_num = BigInt::from(n.clone());
    let y_den = BigInt::one() << e;
    let a = &y_num - &y_den;
    let b = &y_num + &y_den;
    let mut v = atanh_ratio(&a, &b, wb).mul_int(&BigInt::from(2));
    if e > 0 {
        v = v.add(&ln2(wb).mul_int(&BigInt::from(e)));
    }
    Enclosure { lo: v.lo >> 4, hi: (v.hi >> 4) + 1, bits }
}

pub fn ln_u64(n: u64, bits: u32) -> Enclosure {
    ln_uint(&BigUint::from(n), bits)
}

/// Enclosure of `ln(p/q)` for a positive rational.
pub fn ln_rational(r: &BigRational, bits: u32) -> Enclosure {
    assert!(r.is_positive());
    let p = r.numer().magnitude().clone();
    let q = r.denom().magnitude().clone();
    ln_uint(&p, bits).sub(&ln_uint(&q, bits))
}

/// Nearest-ish `f64` for a rational; used only for display and estimates.
pub fn rational_to_f64(r: &BigRational) -> f64 {
    let n = r.numer();
    let d = r.denom();
    if n.is_zero() {
        return 0.0;
    }
    let nb = n.bits() as i64;
    let db = d.bits() as i64;
    let shift = 64 - (nb - db);
    let q: BigInt = if shift >= 0 {
        (n << shift as usize) / d
    } else {
        n / (d << (-shift) as usize)
    };
    let (sign, mag) = q.into_parts();
    let digits = mag.to_u64_digits();
    let mut f = 0.0f64;
    for (i, w) in digits.iter().enumerate() {
        f += *w as f64 * 2f64.powi(64 * i as i32);
    }
    let f = f * 2f64.powi(-(shift as i32));
    if sign == Sign::Minus {
        -f
    } else {
        f
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(e: &Enclosure, v: f64, tol: f64) -> bool {
        (e.midpoint_f64() - v).abs() < tol
    }

    #[test]
    fn pi_and_logs_enclose_known_values() {
        for bits in [64, 200, 1000] {
            let p = pi(bits);
            assert!(close(&p, std::f64::consts::PI, 1e-15));
            assert!(p.width() < BigRational::new(BigInt::from(1), BigInt::one() << (bits - 8)));
            let l = ln_u64(10, bits);
            assert!(close(&l, 10f64.ln(), 1e-14));
        }
        assert!(close(&ln2(80), std::f64::consts::LN_2, 1e-16));
        assert!(close(&ln_u64(1, 80), 0.0, 1e-20));
        assert!(close(&ln_u64(1_000_003, 120), (1_000_003f64).ln(), 1e-9));
    }

    #[test]
    fn pi_digits_match_reference() {
        // 50 decimal digits of pi.
        let reference = "314159265358979323846264338327950288419716939937510";
        let p = pi(256);
        let scale = BigInt::from(10u32).pow(50);
        let lo = (&p.lo * &scale) >> 256u32;
        let hi = (&p.hi * &scale) >> 256u32;
        assert!(lo.to_string().starts_with(&reference[..49]) && hi.to_string().starts_with(&reference[..49]));
    }

    #[test]
    fn roots_and_powers_bracket() {
        let two = Enclosure::from_int(2, 96);
        let r = two.root(2);
        assert!(close(&r, 2f64.sqrt(), 1e-15));
        let sq = r.pow(2);
        assert!(sq.contains_rational(&BigRational::from_integer(BigInt::from(2))));
        let c = Enclosure::from_int(3, 64).pow_ratio(5, 3);
        assert!(close(&c, 3f64.powf(5.0 / 3.0), 1e-12));
    }

    #[test]
    fn certify_escalates_until_decisive() {
        // ceil(1000 / ln 2) = 1443
        let v = certify(
            |b| Enclosure::from_int(1000, b).div(&ln2(b)),
            |e| e.decided_ceil(),
        )
        .unwrap();
        assert_eq!(v, BigInt::from(1443));
    }

    #[test]
    fn division_by_zero_interval_is_rejected() {
        let z = Enclosure::from_raw(BigInt::from(-1), BigInt::from(1), 8);
        assert!(Enclosure::from_int(1, 8).div(&z).is_err());
    }
}
