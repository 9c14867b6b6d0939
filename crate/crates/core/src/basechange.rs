//! Adic subintervals across bases, and the offsets that let one stage's
//! interval be refined in the next stage's base.

use std::fmt;

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::numerics::certified::{self, certify, Enclosure};
use crate::numerics::window_index;
use crate::{Base, Error, Interval, Result};

/// The cell `[index L, (index+1) L)` with `L = (base^power)^-depth`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AdicInterval {
    base: Base,
    power: u32,
    depth: u64,
    index: BigUint,
}

impl AdicInterval {
    pub fn new(base: Base, power: u32, depth: u64, index: BigUint) -> Result<Self> {
        if power == 0 {
            return Err(Error::InvalidInput("power must be positive".into()));
        }
        let cells = base.big_pow(power as u64 * depth);
        if index >= cells {
            return Err(Error::InvalidInput(format!("cell {} out of range at depth {}", index, depth)));
        }
        Ok(Self { base, power, depth, index })
    }

    pub fn unit(base: Base) -> Self {
        Self { base, power: 1, depth: 0, index: BigUint::zero() }
    }

    pub fn base(&self) -> Base {
        self.base
    }

    pub fn power(&self) -> u32 {
        self.power
    }

    pub fn depth(&self) -> u64 {
        self.depth
    }

    pub fn index(&self) -> &BigUint {
        &self.index
    }

    /// `(base^power)^depth`.
    pub fn cells(&self) -> BigUint {
        self.base.big_pow(self.power as u64 * self.depth)
    }

    /// Base-`base^power` digits of the left endpoint, one per level.
    pub fn digits(&self) -> Vec<u64> {
        let cb = self.base.big_pow(self.power as u64);
        let mut out = vec![0; self.depth as usize];
        let mut x = self.index.clone();
        for slot in out.iter_mut().rev() {
            *slot = (&x % &cb).to_u64().unwrap();
            x /= &cb;
        }
        out
    }

    pub fn length(&self) -> BigRational {
        BigRational::new(BigInt::one(), self.cells().into())
    }

    pub fn lower(&self) -> BigRational {
        BigRational::new(self.index.clone().into(), self.cells().into())
    }

    pub fn upper(&self) -> BigRational {
        BigRational::new((&self.index + 1u32).into(), self.cells().into())
    }

    pub fn to_interval(&self) -> Interval {
        Interval::new(self.lower(), self.upper()).expect("adic cells are nonempty")
    }

    /// Whether this cell lies inside `[lo, hi)`.
    pub fn within(&self, lo: &BigRational, hi: &BigRational) -> bool {
        self.lower() >= *lo && self.upper() <= *hi
    }
}

impl fmt::Display for AdicInterval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_interval())
    }
}

/// Leftmost cell of `s^-depth` inside `[lo, hi)`, if any.
pub(crate) fn leftmost_cell(lo: &BigRational, hi: &BigRational, s: Base, depth: u64) -> Option<BigUint> {
    let cells = BigRational::from_integer(s.big_pow(depth).into());
    let idx = (lo * &cells).ceil().to_integer();
    let end = BigRational::from_integer(&idx + 1) / &cells;
    (end <= *hi).then(|| idx.to_biguint().expect("nonnegative"))
}

/// The exact adic depth of an interval, if it is a single `s`-adic cell.
fn as_cell(i: &Interval, s: Base) -> Option<(u64, BigUint)> {
    let len = i.measure();
    if !len.numer().is_one() {
        return None;
    }
    let mut d = len.denom().magnitude().clone();
    let mut depth = 0;
    while d > BigUint::one() {
        if (&d % s.value()) != BigUint::zero() {
            return None;
        }
        d /= s.value();
        depth += 1;
    }
    let idx = i.lower() * BigRational::from_integer(len.denom().clone());
    idx.is_integer().then(|| (depth, idx.to_integer().to_biguint().unwrap()))
}

/// An `s`-adic cell inside `I` of length at least `mu(I)/(2s)`.
///
/// Returns `I` itself when it is already an `s`-adic cell. Otherwise takes
/// the least `m` with `s^-m < mu(I)` and the leftmost depth-`m` cell in
/// `I`, or failing that the leftmost depth-`(m+1)` cell beside the single
/// grid point of depth `m` in `I`.
pub fn adic_subinterval(i: &Interval, s: Base) -> Result<AdicInterval> {
    let mu = i.measure();
    if !mu.is_positive() {
        return Err(Error::InvalidInterval { lower: i.lower().to_string(), upper: i.upper().to_string() });
    }
    if i.lower().is_negative() || *i.upper() > BigRational::one() {
        return Err(Error::PointOutOfRange(format!("{} is not inside [0,1)", i)));
    }
    if let Some((depth, index)) = as_cell(i, s) {
        return AdicInterval::new(s, 1, depth, index);
    }
    let mut m = 0u64;
    let mut cell = BigRational::one();
    let sr = BigRational::from_integer(s.value().into());
    while cell >= mu {
        cell /= &sr;
        m += 1;
    }
    if let Some(idx) = leftmost_cell(i.lower(), i.upper(), s, m) {
        return AdicInterval::new(s, 1, m, idx);
    }
    if let Some(idx) = leftmost_cell(i.lower(), i.upper(), s, m + 1) {
        return AdicInterval::new(s, 1, m + 1, idx);
    }
    Err(Error::InvariantViolation(format!("no {}-adic cell of depth {} or {} inside {}", s, m, m + 1, i)))
}

/// `ceil(ln s0 + 3 ln s1)`, certified.
pub fn nested_refinement_offset(s0: Base, s1: Base) -> u64 {
    certify(
        |bits| {
            Ok(certified::ln_u64(s0.value(), bits).add(&certified::ln_u64(s1.value(), bits).mul_int(&3.into())))
        },
        |e: &Enclosure| e.decided_ceil(),
    )
    .expect("logs of integers separate from integers")
    .to_u64()
    .unwrap()
}

/// `2 ceil(ln s0 + 3 ln s1)`.
pub fn padding(s0: Base, s1: Base) -> u64 {
    2 * nested_refinement_offset(s0, s1)
}

/// For `I` of depth `<b; s0>` in base `s0 = I.base^I.power`, the index
/// `a = b + offset(s0, s1)` and the leftmost `s1`-adic cell of depth
/// `<a; s1>` inside `I`.
pub fn nested_refinement(i: &AdicInterval, b: u64, s1: Base) -> Result<(u64, AdicInterval)> {
    let s0 = i.base().pow(i.power())?;
    let want = window_index(b, s0)?;
    if i.depth() != want {
        return Err(Error::InvalidInput(format!(
            "interval has depth {} but <{};{}> = {}",
            i.depth(),
            b,
            s0,
            want
        )));
    }
    let a = b + nested_refinement_offset(s0, s1);
    let depth = window_index(a, s1)?;
    let idx = leftmost_cell(&i.lower(), &i.upper(), s1, depth).ok_or_else(|| {
        Error::InvariantViolation(format!("no {}-adic cell of depth {} inside {}", s1, depth, i))
    })?;
    Ok((a, AdicInterval::new(s1, 1, depth, idx)?))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn q(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    fn b(v: u64) -> Base {
        Base::new(v).unwrap()
    }

    #[test]
    fn subinterval_examples() {
        let i = Interval::new(q(3, 10), q(3, 5)).unwrap();
        let j = adic_subinterval(&i, b(2)).unwrap();
        assert_eq!((j.lower(), j.upper()), (q(3, 8), q(1, 2)));
        let i = Interval::new(q(1, 4), q(1, 2)).unwrap();
        let j = adic_subinterval(&i, b(2)).unwrap();
        assert_eq!(j.to_interval(), i);
        let j = adic_subinterval(&Interval::unit(), b(3)).unwrap();
        assert_eq!((j.depth(), j.lower(), j.upper()), (0, q(0, 1), q(1, 1)));
        assert!(adic_subinterval(&Interval::new(q(1, 2), q(1, 2)).unwrap_or(Interval::unit()), b(2)).is_ok());
    }

    #[test]
    fn offsets() {
        assert_eq!(nested_refinement_offset(b(3), b(2)), 4);
        assert_eq!(nested_refinement_offset(b(2), b(2)), 3);
        assert_eq!(nested_refinement_offset(b(2), b(10)), 8);
        assert_eq!(padding(b(3), b(2)), 8);
        assert_eq!(padding(b(2), b(2)), 6);
    }

    #[test]
    fn refinement_exhaustive() {
        let d = window_index(5, b(3)).unwrap();
        assert_eq!(d, 5);
        for idx in 0..243u32 {
            let i = AdicInterval::new(b(3), 1, d, idx.into()).unwrap();
            let (a, j) = nested_refinement(&i, 5, b(2)).unwrap();
            assert_eq!(a, 9);
            assert_eq!(j.depth(), 13);
            assert!(j.within(&i.lower(), &i.upper()));
            assert_eq!(j.length() * BigRational::from_integer(BigInt::from(8192)), q(1, 1));
            // leftmost: the previous dyadic cell starts before I
            if !j.index().is_zero() {
                let prev = BigRational::new((j.index() - 1u32).into(), BigInt::from(8192));
                assert!(prev < i.lower());
            }
        }
    }

    #[test]
    fn refinement_same_base() {
        for bb in [1u64, 4, 11, 30] {
            let d = window_index(bb, b(5)).unwrap();
            let i = AdicInterval::new(b(5), 1, d, BigUint::from(3u32).min(b(5).big_pow(d) - 1u32)).unwrap();
            let (a, j) = nested_refinement(&i, bb, b(5)).unwrap();
            assert_eq!(a, bb + nested_refinement_offset(b(5), b(5)));
            assert!(j.within(&i.lower(), &i.upper()));
        }
        let i = AdicInterval::new(b(3), 1, 2, 0u32.into()).unwrap();
        assert!(nested_refinement(&i, 5, b(2)).is_err());
    }

    #[test]
    fn digits_of_cells() {
        let i = AdicInterval::new(b(3), 2, 2, BigUint::from(79u32)).unwrap();
        assert_eq!(i.digits(), vec![8, 7]);
        assert!(AdicInterval::new(b(2), 1, 3, BigUint::from(8u32)).is_err());
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(2000))]
        #[test]
        fn subinterval_contained_and_long(
            s in prop::sample::select(vec![2u64, 3, 4, 5, 10]),
            a in 0u64..10_000, w in 1u64..10_000, d in 1u64..10_000,
        ) {
            let lo = q(a.min(d - 1) as i64, d as i64);
            let hi = (lo.clone() + q(w as i64, 10_000 * d as i64)).min(q(1, 1));
            prop_assume!(hi > lo);
            let i = Interval::new(lo.clone(), hi.clone()).unwrap();
            let j = adic_subinterval(&i, b(s)).unwrap();
            prop_assert!(j.within(&lo, &hi));
            prop_assert!(j.length() * BigRational::from_integer((2 * s).into()) >= i.measure());
        }

        #[test]
        fn padding_bounds_index_growth(r in 2u64..50, s0 in 2u64..50, s1 in 2u64..50, bb in 1u64..5000) {
            let off = nested_refinement_offset(b(s0), b(s1));
            let grow = window_index(bb + off, b(r)).unwrap() - window_index(bb, b(r)).unwrap();
            prop_assert!(grow <= padding(b(s0), b(s1)));
            prop_assert!(padding(b(s0), b(s1)) >= 2);
        }

        #[test]
        fn refinement_depth_chain(s0 in 2u64..20, s1 in 2u64..20, bb in 1u64..300, frac in 0u64..1000) {
            let d = window_index(bb, b(s0)).unwrap();
            let cells = b(s0).big_pow(d);
            let idx = (&cells * frac) / 1000u32;
            let i = AdicInterval::new(b(s0), 1, d, idx).unwrap();
            let (a, j) = nested_refinement(&i, bb, b(s1)).unwrap();
            prop_assert!(j.within(&i.lower(), &i.upper()));
            // ceil(ln s0 / ln s1) is the least c with s1^c >= s0
            let ratio = (0u32..).find(|&c| (s1 as u128).pow(c) >= s0 as u128).unwrap() as u64;
            prop_assert!(window_index(a, b(s1)).unwrap() >= window_index(bb, b(s1)).unwrap() + ratio + 1);
        }
    }
}
