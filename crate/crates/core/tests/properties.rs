use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, Zero};
use proptest::prelude::*;

use nf_core::discrepancy::{self, oracle};
use nf_core::{adic_value, fractional_orbit, Base, DigitBlock, UnitSequence};

fn q(n: u64, d: u64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

fn seq_strategy() -> impl Strategy<Value = UnitSequence> {
    (1u64..60).prop_flat_map(|d| {
        prop::collection::vec(0..d, 1..14).prop_map(move |nums| UnitSequence::from_u64(d, &nums).unwrap())
    })
}

fn digits_strategy() -> impl Strategy<Value = (u64, u32, Vec<u64>)> {
    (2u64..7, 1u32..4).prop_flat_map(|(s, k)| {
        let big = s.pow(k);
        prop::collection::vec(0..big, 0..12).prop_map(move |d| (s, k, d))
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn star_matches_brute_force(seq in seq_strategy()) {
        prop_assert_eq!(discrepancy::star_discrepancy(&seq).unwrap(), oracle::star_discrepancy(&seq).unwrap());
    }

    #[test]
    fn extreme_routes_agree(seq in seq_strategy()) {
        let closed = discrepancy::extreme_discrepancy(&seq).unwrap();
        prop_assert_eq!(&closed, &oracle::extreme_discrepancy(&seq).unwrap());
        prop_assert_eq!(&closed, &discrepancy::extreme_discrepancy_pairs(&seq).unwrap());
    }

    #[test]
    fn star_and_extreme_are_comparable(seq in seq_strategy()) {
        let star = discrepancy::star_discrepancy(&seq).unwrap();
        let ext = discrepancy::extreme_discrepancy(&seq).unwrap();
        prop_assert!(star <= ext);
        prop_assert!(ext <= &star * BigRational::from_integer(2.into()));
        prop_assert!(ext <= q(1, 1));
        prop_assert!(star >= q(1, 2 * seq.len() as u64));
    }

    #[test]
    fn star_ignores_order(seq in seq_strategy()) {
        let mut pts = seq.points();
        pts.reverse();
        let rev = UnitSequence::from_points(&pts).unwrap();
        prop_assert_eq!(discrepancy::star_discrepancy(&seq).unwrap(), discrepancy::star_discrepancy(&rev).unwrap());
    }

    #[test]
    fn star_of_concatenation_is_subadditive(a in seq_strategy(), b in seq_strategy()) {
        let ab = a.concat(&b);
        let n = |s: &UnitSequence| BigRational::from_integer(BigInt::from(s.len()));
        let lhs = n(&ab) * discrepancy::star_discrepancy(&ab).unwrap();
        let rhs = n(&a) * discrepancy::star_discrepancy(&a).unwrap() + n(&b) * discrepancy::star_discrepancy(&b).unwrap();
        prop_assert!(lhs <= rhs);
    }

    #[test]
    fn simple_discrepancy_counts_cells(seq in seq_strategy(), r in 2u64..9) {
        let pts = seq.points();
        let rq = BigRational::from_integer(BigInt::from(r));
        let mut worst = BigRational::zero();
        for cell in 0..r {
            let lo = q(cell, r);
            let hi = q(cell + 1, r);
            let c = pts.iter().filter(|x| **x >= lo && **x < hi).count() as u64;
            let dev = (q(c, pts.len() as u64) - rq.recip()).abs();
            if dev > worst {
                worst = dev;
            }
        }
        prop_assert_eq!(discrepancy::simple_discrepancy(&seq, Base::new(r).unwrap()).unwrap(), worst);
    }

    #[test]
    fn expand_then_group_round_trips((s, k, d) in digits_strategy()) {
        let s = Base::new(s).unwrap();
        let w = DigitBlock::new(s.pow(k).unwrap(), d).unwrap();
        let e = w.expand(s, k).unwrap();
        prop_assert_eq!(e.len(), w.len() * k as usize);
        prop_assert_eq!(adic_value(&e), adic_value(&w));
        prop_assert_eq!(e.group(k).unwrap(), w);
    }

    #[test]
    fn adic_value_lies_in_unit_interval((s, k, d) in digits_strategy()) {
        let w = DigitBlock::new(Base::new(s).unwrap().pow(k).unwrap(), d).unwrap();
        let v = adic_value(&w);
        prop_assert!(v >= BigRational::zero() && v < q(1, 1));
    }

    #[test]
    fn orbit_is_the_digit_shift(s in 2u64..11, d in prop::collection::vec(0u64..10, 1..16)) {
        let s = Base::new(s).unwrap();
        let d: Vec<u64> = d.into_iter().map(|x| x % s.value()).collect();
        let w = DigitBlock::new(s, d.clone()).unwrap();
        let orbit = fractional_orbit(&adic_value(&w), s, 0, d.len() as u64).unwrap();
        for j in 0..d.len() {
            let tail = DigitBlock::new(s, d[j..].to_vec()).unwrap();
            prop_assert_eq!(orbit.point(j), adic_value(&tail));
        }
    }
}
