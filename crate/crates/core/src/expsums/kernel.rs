//! Batched A-tests for candidates `nu = eta + V s^-(P+L)` sharing a prefix.

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{
    modulus_bounds, power_big, tiers, trig, ApproxReal, PowerBounds, F64_FRAC, F64_TERM_ULPS,
    MAX_SUM_BITS,
};
use crate::numerics::{mult_dependent, window_index};
use crate::par::{index_digits, map_chunks};
use crate::{fractional_orbit, AdicRational, Base, DigitBlock, Error, Result};

/// Orbit indices `lo < j <= hi` for base `r`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Window {
    pub r: Base,
    pub lo: u64,
    pub hi: u64,
}

impl Window {
    /// The window `(<a;r>, <a+l;r>]` of the aggregate sum.
    pub fn of(r: Base, a: u64, ell: u64) -> Result<Self> {
        Ok(Self { r, lo: window_index(a, r)?, hi: window_index(a + ell, r)? })
    }

    pub fn len(&self) -> u64 {
        self.hi - self.lo
    }

    pub fn is_empty(&self) -> bool {
        self.hi == self.lo
    }
}

/// A threshold known to lie in `[lo, hi]`. A value passes when it is below
/// the threshold, or at most it when `inclusive`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Threshold {
    pub lo: BigRational,
    pub hi: BigRational,
    pub inclusive: bool,
}

impl Threshold {
    pub fn below(t: BigRational) -> Self {
        Self { lo: t.clone(), hi: t, inclusive: false }
    }

    pub fn at_most(t: BigRational) -> Self {
        Self { lo: t.clone(), hi: t, inclusive: true }
    }

    pub fn enclosed(lo: BigRational, hi: BigRational, inclusive: bool) -> Self {
        Self { lo, hi, inclusive }
    }

    /// Decide for a value in `[lo_a, hi_a] * 2^-scale`.
    pub(crate) fn decide(&self, lo_a: &BigInt, hi_a: &BigInt, scale: u32) -> Option<bool> {
        let unit = BigInt::one() << scale;
        let cmp = |x: &BigInt, t: &BigRational| (x * t.denom()).cmp(&(t.numer() * &unit));
        use std::cmp::Ordering::*;
        let pass = match cmp(hi_a, &self.lo) {
            Less => true,
            Equal => self.inclusive,
            Greater => false,
        };
        if pass {
            return Some(true);
        }
        let fail = match cmp(lo_a, &self.hi) {
            Greater => true,
            Equal => !self.inclusive,
            Less => false,
        };
        if fail {
            Some(false)
        } else {
            None
        }
    }

    pub fn decide_approx(&self, a: &ApproxReal) -> Option<bool> {
        let (lo, hi) = (a.lower(), a.upper());
        if hi < self.lo || (self.inclusive && hi <= self.lo) {
            Some(true)
        } else if lo > self.hi || (!self.inclusive && lo >= self.hi) {
            Some(false)
        } else {
            None
        }
    }
}

/// Precomputed orbit data for the family `eta + V / s^(P+L)` with
/// `0 <= V < s^L`.
#[derive(Clone, Debug)]
pub struct CandidateKernel {
    base: Base,
    prefix: BigUint,
    prefix_len: u64,
    len: u64,
    windows: Vec<Window>,
    ts: Vec<i64>,
    limbs: usize,
    // floor({r^j eta} 2^64), all windows concatenated
    f: Vec<u64>,
    // floor({r^j s^-(P+L)} 2^(64 limbs)), `limbs` words per index
    rho: Vec<u64>,
}

fn big_to_limbs(x: &BigUint, n: usize) -> Vec<u64> {
    let mut v = x.to_u64_digits();
    v.resize(n, 0);
    v
}

/// Top limb of `(v * rho) mod 2^(64 n)`.
#[inline]
fn top_limb(v: &[u64], rho: &[u64], acc: &mut [u64]) -> u64 {
    let n = rho.len();
    acc.iter_mut().for_each(|x| *x = 0);
    for (i, &vi) in v.iter().enumerate() {
        if vi == 0 || i >= n {
            continue;
        }
        let mut carry = 0u128;
        for k in 0..n - i {
            let cur = acc[i + k] as u128 + (vi as u128) * (rho[k] as u128) + carry;
            acc[i + k] = cur as u64;
            carry = cur >> 64;
        }
    }
    acc[n - 1]
}

impl CandidateKernel {
    /// `eta = prefix / base^prefix_len`, candidates extend it by `len` digits.
    pub fn new(
        base: Base,
        prefix: &BigUint,
        prefix_len: u64,
        len: u64,
        windows: Vec<Window>,
        ts: Vec<i64>,
    ) -> Result<Self> {
        if ts.is_empty() || ts.contains(&0) || windows.is_empty() {
            return Err(Error::InvalidInput("kernel needs nonzero frequencies and windows".into()));
        }
        let qp = base.big_pow(prefix_len);
        if prefix >= &qp {
            return Err(Error::PointOutOfRange(format!("prefix {} over {}^{}", prefix, base, prefix_len)));
        }
        let q_tail = base.big_pow(len);
        let q = &qp * &q_tail;
        let limbs = (q_tail.bits() as usize).div_ceil(64) + 1;
        let pb = 64 * limbs as u32;
        let mut f = Vec::new();
        let mut rho = Vec::new();
        for w in &windows {
            let rb = w.r.big();
            let mut x = (prefix * rb.modpow(&BigUint::from(w.lo + 1), &qp)) % &qp;
            let mut y = rb.modpow(&BigUint::from(w.lo + 1), &q);
            for _ in w.lo..w.hi {
                f.push(((&x << 64u32) / &qp).to_u64().unwrap_or(0));
                rho.extend(big_to_limbs(&((&y << pb) / &q), limbs));
                x = (x * &rb) % &qp;
                y = (y * &rb) % &q;
            }
        }
        Ok(Self { base, prefix: prefix.clone(), prefix_len, len, windows, ts, limbs, f, rho })
    }

    pub fn base(&self) -> Base {
        self.base
    }

    pub fn extension_len(&self) -> u64 {
        self.len
    }

    pub fn windows(&self) -> &[Window] {
        &self.windows
    }

    pub fn frequencies(&self) -> &[i64] {
        &self.ts
    }

    /// `V` for extension digits, most significant first.
    pub fn extension_value(&self, digits: &[u64]) -> BigUint {
        let mut v = BigUint::zero();
        for &d in digits {
            v = v * self.base.value() + d;
        }
        v
    }

    /// Exact `nu` for an extension value.
    pub fn candidate(&self, v: &BigUint) -> BigRational {
        let q_tail = self.base.big_pow(self.len);
        let num = &self.prefix * &q_tail + v;
        let den = self.base.big_pow(self.prefix_len) * q_tail;
        BigRational::new(num.into(), den.into())
    }

    fn fast_bounds(&self, v: &BigUint) -> PowerBounds {
        let vl = v.to_u64_digits();
        let mut acc = vec![0u64; self.limbs];
        let nt = self.ts.len();
        let mut cs = vec![(0i128, 0i128); nt];
        let mut total = PowerBounds::zero(2 * F64_FRAC);
        let scale = (1u64 << F64_FRAC) as f64;
        let mut idx = 0;
        for w in &self.windows {
            cs.iter_mut().for_each(|x| *x = (0, 0));
            for _ in w.lo..w.hi {
                let rho = &self.rho[idx * self.limbs..(idx + 1) * self.limbs];
                let phase = self.f[idx].wrapping_add(top_limb(&vl, rho, &mut acc));
                for (slot, &t) in cs.iter_mut().zip(&self.ts) {
                    let (c, s) = trig::cis_u64(phase.wrapping_mul(t as u64));
                    slot.0 += (c * scale).round() as i128;
                    slot.1 += (s * scale).round() as i128;
                }
                idx += 1;
            }
            let n = w.len() as i128;
            for (&(c, s), &t) in cs.iter().zip(&self.ts) {
                // phase error below 3 units of 2^-64, times |t|
                let rho = n * (F64_TERM_ULPS + 6 * t.unsigned_abs() as i128);
                total.add(&modulus_bounds(&c.into(), &s.into(), &rho.into(), F64_FRAC));
            }
        }
        total
    }

    fn exact_bounds(&self, nu: &BigRational, bits: u32) -> Result<PowerBounds> {
        let pb = bits + 8;
        let mut total = PowerBounds::zero(2 * bits);
        for w in self.windows.iter().filter(|w| !w.is_empty()) {
            let orbit = fractional_orbit(nu, w.r, w.lo + 1, w.hi + 1)?;
            let base: Vec<BigUint> =
                orbit.numerators().iter().map(|a| (a << pb) / orbit.denom()).collect();
            let m = BigUint::one() << pb;
            for &t in &self.ts {
                let ph: Vec<BigUint> = base
                    .iter()
                    .map(|p| {
                        let v = (p * t.unsigned_abs()) % &m;
                        if t < 0 && !v.is_zero() {
                            &m - v
                        } else {
                            v
                        }
                    })
                    .collect();
                total.add(&power_big(ph.iter(), t.unsigned_abs(), bits));
            }
        }
        Ok(total)
    }

    /// Enclosure of `A(nu)` with radius at most `precision`.
    pub fn a_value(&self, digits: &[u64], precision: &BigRational) -> Result<ApproxReal> {
        let v = self.extension_value(digits);
        let one = BigInt::one();
        let fast = self.fast_bounds(&v);
        if fast.width_bits_ok(&one, precision) {
            return Ok(fast.to_approx(&one));
        }
        let nu = self.candidate(&v);
        for bits in tiers().flatten() {
            let b = self.exact_bounds(&nu, bits)?;
            if b.width_bits_ok(&one, precision) {
                return Ok(b.to_approx(&one));
            }
        }
        Err(Error::PrecisionCap { bits: MAX_SUM_BITS })
    }

    /// Whether `A(nu)` passes `thr`, escalating precision until decided.
    pub fn passes(&self, digits: &[u64], thr: &Threshold) -> Result<bool> {
        let v = self.extension_value(digits);
        let fast = self.fast_bounds(&v);
        if let Some(d) = thr.decide(&fast.lo, &fast.hi, fast.scale) {
            return Ok(d);
        }
        let nu = self.candidate(&v);
        for bits in tiers().flatten() {
            let b = self.exact_bounds(&nu, bits)?;
            if let Some(d) = thr.decide(&b.lo, &b.hi, b.scale) {
                return Ok(d);
            }
        }
        Err(Error::PrecisionCap { bits: MAX_SUM_BITS })
    }
}

/// Outcome of a candidate survey.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SurveyResult {
    pub passing: u64,
    pub evaluated: u64,
    pub fraction: BigRational,
    /// Set when the fraction comes from sampling.
    pub estimate: bool,
    /// Up to 100 passing blocks in lexicographic order.
    pub witnesses: Vec<DigitBlock>,
}

pub(crate) const MAX_WITNESSES: usize = 100;

/// Survey the restricted-alphabet extensions of `eta` in base `s^k`.
///
/// The extension has `<a+l;s^k> - <a;s^k>` digits drawn from
/// `0..s~` where `s~ = s^k - 1` for odd `s` and `s^k - 2` for even `s`.
/// With `sample = Some(n)` and more than `n` candidates, `n` blocks are
/// drawn uniformly with a ChaCha8 stream seeded by `seed`.
#[allow(clippy::too_many_arguments)]
pub fn candidate_survey(
    eta: &AdicRational,
    s: Base,
    k: u32,
    a: u64,
    ell: u64,
    rs: &[Base],
    ts: &[i64],
    threshold: &Threshold,
    sample: Option<u64>,
    seed: u64,
) -> Result<SurveyResult> {
    if ell == 0 || rs.is_empty() || ts.is_empty() {
        return Err(Error::InvalidInput("survey needs l >= 1 and nonempty R and T".into()));
    }
    if let Some(r) = rs.iter().find(|&&r| mult_dependent(r, s)) {
        return Err(Error::DependentBases(r.value(), s.value()));
    }
    let sp = s.pow(k)?;
    let p = window_index(a, sp)?;
    if eta.base() != s || eta.power() != k || eta.precision() as u64 != p {
        return Err(Error::InvalidInput(format!(
            "eta must be {}-adic with precision {}",
            sp, p
        )));
    }
    let len = window_index(a + ell, sp)? - p;
    let alphabet = if s.value() % 2 == 1 { sp.value() - 1 } else { sp.value() - 2 };
    if alphabet < 2 {
        return Err(Error::InvalidInput(format!("alphabet of {} symbols is too small", alphabet)));
    }
    let (prefix, _) = crate::numerics::adic_parts(eta.digits());
    let windows = rs.iter().map(|&r| Window::of(r, a, ell)).collect::<Result<Vec<_>>>()?;
    let kernel = CandidateKernel::new(sp, &prefix, p, len, windows, ts.to_vec())?;
    let total = (alphabet as u128).checked_pow(len as u32).filter(|&t| t <= u64::MAX as u128);
    let exhaustive = match (total, sample) {
        (Some(t), Some(n)) => t <= n as u128,
        (Some(_), None) => true,
        (None, _) => false,
    };
    let n = if exhaustive {
        total.unwrap() as u64
    } else {
        sample.ok_or_else(|| Error::BudgetExceeded {
            what: "survey candidates".into(),
            needed: format!("{}^{}", alphabet, len),
            budget: "u64".into(),
        })?
    };
    let draws: Vec<Vec<u64>> = if exhaustive {
        Vec::new()
    } else {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        (0..n).map(|_| (0..len).map(|_| rng.gen_range(0..alphabet)).collect()).collect()
    };
    let chunk = 256;
    let parts = map_chunks(n, chunk, |from, to| -> Result<(u64, Vec<Vec<u64>>)> {
        let mut pass = 0;
        let mut wit = Vec::new();
        for i in from..to {
            let d = if exhaustive {
                index_digits(i, alphabet, len as usize)
            } else {
                draws[i as usize].clone()
            };
            if kernel.passes(&d, threshold)? {
                pass += 1;
                wit.push(d);
            }
        }
        if exhaustive {
            wit.truncate(MAX_WITNESSES);
        }
        Ok((pass, wit))
    });
    let mut passing = 0;
    let mut wit = Vec::new();
    for part in parts {
        let (p, w) = part?;
        passing += p;
        wit.extend(w);
    }
    wit.sort();
    wit.dedup();
    wit.truncate(MAX_WITNESSES);
    let witnesses = wit
        .into_iter()
        .map(|d| DigitBlock::new(sp, d))
        .collect::<Result<Vec<_>>>()?;
    let fraction = if n == 0 {
        BigRational::one()
    } else {
        BigRational::new(passing.into(), n.into())
    };
    Ok(SurveyResult { passing, evaluated: n, fraction, estimate: !exhaustive, witnesses })
}

#[cfg(test)]
mod tests {
    use super::super::exp_sum_a;
    use super::*;

    fn q(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    fn b(v: u64) -> Base {
        Base::new(v).unwrap()
    }

    #[test]
    fn kernel_matches_exact_sum() {
        let base = b(3);
        let prefix = BigUint::from(5u32);
        let ws = vec![Window::of(b(2), 4, 9).unwrap(), Window::of(b(5), 4, 9).unwrap()];
        let k = CandidateKernel::new(base, &prefix, 3, 6, ws, vec![1, 2, -3]).unwrap();
        let tol = q(1, 1_000_000_000);
        for digits in [[0u64, 1, 2, 0, 1, 1], [2, 2, 2, 2, 2, 2], [0; 6]] {
            let v = k.extension_value(&digits);
            let nu = k.candidate(&v);
            let fast = k.a_value(&digits, &q(1, 1_000_000)).unwrap();
            let mut want = exp_sum_a(&nu, &[b(2)], &[1, 2, -3], 4, 9, &tol).unwrap();
            let other = exp_sum_a(&nu, &[b(5)], &[1, 2, -3], 4, 9, &tol).unwrap();
            want.mid += other.mid;
            assert!((fast.mid_f64() - want.mid_f64()).abs() <= fast.rad.to_f64().unwrap() + 1e-9);
        }
    }

    #[test]
    fn large_extension_phase_error() {
        let base = b(9);
        let prefix = BigUint::from(12345u32);
        let ws = vec![Window::of(b(2), 40, 60).unwrap()];
        let k = CandidateKernel::new(base, &prefix, 6, 30, ws, vec![1, 7]).unwrap();
        let digits: Vec<u64> = (0..30).map(|i| (i * 5 + 3) % 9).collect();
        let nu = k.candidate(&k.extension_value(&digits));
        let fast = k.a_value(&digits, &q(1, 1000)).unwrap();
        let exact = exp_sum_a(&nu, &[b(2)], &[1, 7], 40, 60, &q(1, 1 << 40)).unwrap();
        assert!(fast.contains(&exact.mid) || (fast.mid_f64() - exact.mid_f64()).abs() < 1e-6);
    }

    #[test]
    fn threshold_decisions() {
        let t = Threshold::below(q(1, 2));
        let one = BigInt::one();
        assert_eq!(t.decide(&BigInt::zero(), &one, 2), Some(true));
        assert_eq!(t.decide(&BigInt::from(2), &BigInt::from(2), 2), Some(false));
        assert_eq!(t.decide(&BigInt::from(1), &BigInt::from(3), 2), None);
        let t = Threshold::at_most(q(1, 2));
        assert_eq!(t.decide(&BigInt::from(2), &BigInt::from(2), 2), Some(true));
    }

    #[test]
    fn survey_small() {
        let eta = AdicRational::zero(b(3), 1).unwrap();
        let huge = Threshold::below(q(1_000_000, 1));
        let r = candidate_survey(&eta, b(3), 1, 0, 6, &[b(2)], &[1], &huge, None, 0).unwrap();
        assert_eq!(r.fraction, q(1, 1));
        assert!(!r.estimate);
        assert_eq!(r.evaluated, 1 << 6);
        assert_eq!(r.witnesses.len(), 64);
        assert!(r.witnesses.windows(2).all(|w| w[0].digits() < w[1].digits()));
        let s1 = candidate_survey(&eta, b(3), 1, 0, 12, &[b(2)], &[1], &Threshold::below(q(20, 1)), Some(50), 7)
            .unwrap();
        let s2 = candidate_survey(&eta, b(3), 1, 0, 12, &[b(2)], &[1], &Threshold::below(q(20, 1)), Some(50), 7)
            .unwrap();
        assert!(s1.estimate);
        assert_eq!(s1, s2);
        assert!(candidate_survey(&eta, b(3), 1, 0, 6, &[b(9)], &[1], &huge, None, 0).is_err());
    }
}
