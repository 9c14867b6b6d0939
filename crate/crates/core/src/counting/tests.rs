use super::*;
use crate::discrepancy::block_discrepancy;
use crate::numerics::adic_value;
use proptest::prelude::*;

fn q(n: i64, d: i64) -> BigRational {
    BigRational::new(n.into(), d.into())
}

fn b(v: u64) -> Base {
    Base::new(v).unwrap()
}

fn binom(n: u64, k: u64) -> BigUint {
    let mut v = BigUint::one();
    for i in 0..k {
        v = v * (n - i) / (i + 1);
    }
    v
}

/// Words of weight at most 3N/4 are exactly the passing ones.
fn base4_oracle(n: u64) -> BigUint {
    (0..=n).filter(|&w| 4 * w <= 3 * n).map(|w| binom(n, w)).sum()
}

fn slow_good(s: u64, ell: usize, eps: &BigRational, n: usize) -> u64 {
    let total = s.pow(n as u32);
    (0..total)
        .filter(|&i| {
            let w = DigitBlock::new(b(s), index_digits(i, s, n)).unwrap();
            block_discrepancy(&w, ell).unwrap() < *eps
        })
        .count() as u64
}

#[test]
fn good_block_examples() {
    assert_eq!(good_block_count(b(2), 1, &q(1, 4), 4).unwrap(), 6);
    assert_eq!(good_block_count(b(2), 1, &q(1, 1), 9).unwrap(), 512);
    assert_eq!(good_block_count(b(2), 2, &q(1, 16), 4).unwrap(), 0);
    assert!(matches!(good_block_count(b(2), 1, &q(1, 4), 30), Err(Error::BudgetExceeded { .. })));
}

#[test]
fn good_block_matches_slow_oracle() {
    for (s, ell, eps, n) in [(2, 1, q(1, 8), 10), (3, 2, q(1, 9), 7), (2, 3, q(1, 10), 11), (5, 1, q(1, 10), 5)] {
        assert_eq!(good_block_count(b(s), ell as u64, &eps, n as u64).unwrap(), slow_good(s, ell, &eps, n));
    }
}

#[test]
fn block_frequency_threshold_is_valid_where_enumerable() {
    let t = block_frequency_threshold(b(2), 1, &q(1, 2), &q(1, 2)).unwrap();
    let n0 = t.exact().unwrap().to_u64().unwrap();
    assert!(n0 <= 20, "threshold {}", n0);
    for n in n0..=20 {
        let good = good_block_count(b(2), 1, &q(1, 2), n).unwrap();
        assert!((1u64 << n) - good < (1u64 << n) / 2);
    }
    let loose = block_frequency_threshold(b(3), 2, &q(1, 3), &q(1, 3)).unwrap();
    let tight = block_frequency_threshold(b(3), 2, &q(1, 3), &q(1, 30)).unwrap();
    assert!(tight.exact().unwrap() >= loose.exact().unwrap());
    let cal = block_frequency_calibrate(b(2), 1, &q(1, 4), &q(1, 2)).unwrap();
    assert_eq!(cal.checked_up_to, 24);
    let n0 = cal.n0.unwrap();
    let certified = block_frequency_threshold(b(2), 1, &q(1, 4), &q(1, 2)).unwrap();
    assert!(BigUint::from(n0) <= *certified.exact().unwrap());
}

#[test]
fn base4_examples() {
    assert_eq!(base4_defect_survey(2).unwrap(), (3, q(3, 4)));
    for n in [1, 5, 8, 10, 13, 16] {
        let (c, f) = base4_defect_survey(n).unwrap();
        assert_eq!(BigUint::from(c), base4_oracle(n));
        assert_eq!(f, BigRational::new(c.into(), (1u64 << n).into()));
    }
    assert_eq!(base4_defect_survey(8).unwrap().0, 247);
    assert_eq!(base4_defect_survey(10).unwrap().0, 968);
    assert_eq!(base4_defect_survey(12).unwrap().0, 4017);
    assert_eq!(base4_defect_survey(14).unwrap().0, 15914);
    assert_eq!(base4_defect_survey(16).unwrap().0, 64839);
}

#[test]
fn base4_defect_threshold_holds() {
    let n0 = base4_defect_threshold(&q(3, 10)).unwrap();
    let n0 = n0.exact().unwrap().to_u64().unwrap();
    assert!(n0 >= 1);
    for n in [n0, n0 + 1, n0 + 17, 2 * n0] {
        let frac = BigRational::new(base4_oracle(n).into(), BigInt::one() << n);
        assert!(frac > q(7, 10));
    }
    let a = base4_defect_threshold(&q(1, 10)).unwrap();
    let b_ = base4_defect_threshold(&q(1, 5)).unwrap();
    assert!(a.exact().unwrap() >= b_.exact().unwrap());
}

#[test]
fn expand_examples() {
    let w = DigitBlock::new(b(4), vec![1, 0]).unwrap();
    assert_eq!(expand_block(&w, b(2), 2).unwrap().digits(), &[0, 1, 0, 0]);
    let w = DigitBlock::new(b(3), vec![2, 0, 1]).unwrap();
    assert_eq!(expand_block(&w, b(3), 1).unwrap(), w);
}

#[test]
fn alphabets() {
    let a = RestrictedAlphabet::for_base(b(3), 2).unwrap();
    assert_eq!(a.size(), Some(8));
    let a = RestrictedAlphabet::for_base(b(2), 3).unwrap();
    assert_eq!(a.size(), Some(6));
    assert!(RestrictedAlphabet::for_base(b(2), 1).is_err());
    assert_eq!(RestrictedAlphabet::new(b(2), 2, Parity::Odd).unwrap().size(), Some(3));
}

#[test]
fn restricted_digit_parameters() {
    let p = restricted_digit_params(b(3), &q(1, 2), Parity::Odd).unwrap();
    assert_eq!(p.ell, 2);
    assert!(p.k >= 8 * 2 * 72);
    assert!(matches!(p.n0, Bound::Beyond { .. }));
    let p2 = restricted_digit_params(b(3), &q(1, 4), Parity::Odd).unwrap();
    assert!(p2.k >= p.k);
    let pe = restricted_digit_params(b(2), &q(1, 2), Parity::Even).unwrap();
    assert_eq!(pe.alphabet.parity(), Parity::Even);
    assert_eq!(RestrictedAlphabet::new(b(2), 5, Parity::Even).unwrap().size().unwrap() % 2, 0);
    // N_0 for a small explicit k is exact
    let a = RestrictedAlphabet::for_base(b(3), 2).unwrap();
    let n0 = restricted_digit_n0(b(3), 2, &q(1, 2), &a).unwrap();
    assert!(n0.exact().is_some());
}

#[test]
fn restricted_digit_surveys() {
    let a = RestrictedAlphabet::for_base(b(2), 2).unwrap();
    let all = restricted_digit_survey(&a, 3, &q(1, 1), None, 0).unwrap();
    // only the all-zero word has a constant orbit
    assert_eq!(all.fraction, q(7, 8));
    let a = RestrictedAlphabet::for_base(b(3), 2).unwrap();
    let f = restricted_digit_survey(&a, 5, &q(1, 2), None, 0).unwrap();
    assert!(f.fraction > q(1, 2), "{}", f.fraction);
    let s1 = restricted_digit_survey(&a, 12, &q(1, 2), Some(200), 9).unwrap();
    let s2 = restricted_digit_survey(&a, 12, &q(1, 2), Some(200), 9).unwrap();
    assert!(s1.estimate);
    assert_eq!(s1, s2);
    let e1 = restricted_digit_survey(&a, 4, &q(1, 2), Some(1 << 20), 1).unwrap();
    let e2 = restricted_digit_survey(&a, 4, &q(1, 2), Some(1 << 20), 2).unwrap();
    assert_eq!(e1, e2);
}

#[test]
fn suffix_orbit_points() {
    let w = DigitBlock::new(b(10), vec![1, 2, 3]).unwrap();
    let o = suffix_orbit(&w);
    assert_eq!(o.points(), vec![q(123, 1000), q(23, 100), q(3, 10)]);
}

proptest! {
    #[test]
    fn good_plus_bad_is_everything(s in 2u64..4, ell in 1u64..3, n in 3u64..9, e in 1i64..12) {
        let eps = q(e, 12);
        let good = good_block_count(b(s), ell, &eps, n).unwrap();
        prop_assert!(good <= s.pow(n as u32));
        prop_assert_eq!(good, slow_good(s, ell as usize, &eps, n as usize));
    }

    #[test]
    fn expansion_preserves_value(s in 2u64..7, k in 1u32..4, raw in proptest::collection::vec(0u64..1000, 1..12)) {
        let sk = s.pow(k);
        let w = DigitBlock::new(b(sk), raw.iter().map(|d| d % sk).collect()).unwrap();
        let e = expand_block(&w, b(s), k).unwrap();
        prop_assert_eq!(e.len(), w.len() * k as usize);
        prop_assert_eq!(adic_value(&e), adic_value(&w));
    }
}
