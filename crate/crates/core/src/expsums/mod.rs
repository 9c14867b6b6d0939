//! Weyl sums with certified error, LeVeque thresholds, the aggregate sum
//! `A(xi, R, T, a, l)`, and the constants used to size candidate searches.

mod kernel;
pub mod trig;

use std::collections::BTreeMap;

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::numerics::certified::{self, certify, Enclosure};
use crate::numerics::window_index;
use crate::{fractional_orbit, Base, Error, Result, UnitSequence};

pub use kernel::{candidate_survey, CandidateKernel, SurveyResult, Threshold, Window};

/// Working precision cap for escalating sums.
pub const MAX_SUM_BITS: u32 = 4096;

/// A real number known to lie in `[mid - rad, mid + rad]`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ApproxReal {
    pub mid: BigRational,
    pub rad: BigRational,
}

impl ApproxReal {
    pub fn exact(v: BigRational) -> Self {
        Self { mid: v, rad: BigRational::zero() }
    }

    pub fn from_bounds(lo: BigRational, hi: BigRational) -> Self {
        let two = BigRational::from_integer(2.into());
        Self { mid: (&lo + &hi) / &two, rad: (hi - lo) / two }
    }

    pub fn from_enclosure(e: &Enclosure) -> Self {
        Self::from_bounds(e.lower(), e.upper())
    }

    pub fn lower(&self) -> BigRational {
        &self.mid - &self.rad
    }

    pub fn upper(&self) -> BigRational {
        &self.mid + &self.rad
    }

    pub fn contains(&self, v: &BigRational) -> bool {
        self.lower() <= *v && *v <= self.upper()
    }

    /// `Some(true)` if the whole enclosure is below `t`, `Some(false)` if
    /// it is at or above `t`, `None` if it straddles.
    pub fn lt(&self, t: &BigRational) -> Option<bool> {
        if self.upper() < *t {
            Some(true)
        } else if self.lower() >= *t {
            Some(false)
        } else {
            None
        }
    }

    pub fn mid_f64(&self) -> f64 {
        certified::rational_to_f64(&self.mid)
    }
}

/// Bounds `[lo, hi] * 2^-scale` on a squared modulus.
#[derive(Clone, Debug, PartialEq, Eq)]
pub(crate) struct PowerBounds {
    pub lo: BigInt,
    pub hi: BigInt,
    pub scale: u32,
}

impl PowerBounds {
    pub fn zero(scale: u32) -> Self {
        Self { lo: BigInt::zero(), hi: BigInt::zero(), scale }
    }

    pub fn add(&mut self, o: &PowerBounds) {
        debug_assert_eq!(self.scale, o.scale);
        self.lo += &o.lo;
        self.hi += &o.hi;
    }

    pub fn to_approx(&self, divisor: &BigInt) -> ApproxReal {
        let den = divisor * (BigInt::one() << self.scale);
        ApproxReal::from_bounds(
            BigRational::new(self.lo.clone(), den.clone()),
            BigRational::new(self.hi.clone(), den),
        )
    }

    pub fn width_bits_ok(&self, divisor: &BigInt, precision: &BigRational) -> bool {
        let rad = BigRational::new(&self.hi - &self.lo, divisor * (BigInt::one() << (self.scale + 1)));
        rad <= *precision
    }
}

/// `|c + i s|^2` given both components with a common radius `rho`.
pub(crate) fn modulus_bounds(c: &BigInt, s: &BigInt, rho: &BigInt, frac_bits: u32) -> PowerBounds {
    let part = |x: &BigInt| {
        let a = x.abs();
        let lo = if &a > rho { &a - rho } else { BigInt::zero() };
        let hi = a + rho;
        (&lo * &lo, &hi * &hi)
    };
    let (cl, ch) = part(c);
    let (sl, sh) = part(s);
    PowerBounds { lo: cl + sl, hi: ch + sh, scale: 2 * frac_bits }
}

/// Units of 2^-62 used to accumulate fast-tier sums exactly.
pub(crate) const F64_FRAC: u32 = 62;
/// Per-term error of the fast tier in units of 2^-62, excluding phase error.
pub(crate) const F64_TERM_ULPS: i128 = (1 << 15) + 1;

/// Fast-tier bounds on `|sum e(phase_i)|^2` for 64-bit phases, each
/// accurate to `phase_err` units of 2^-64.
pub(crate) fn power_u64(phases: impl Iterator<Item = u64>, phase_err: u64) -> PowerBounds {
    let scale = (1u64 << F64_FRAC) as f64;
    let mut c = 0i128;
    let mut s = 0i128;
    let mut n = 0i128;
    for p in phases {
        let (x, y) = trig::cis_u64(p);
        c += (x * scale).round() as i128;
        s += (y * scale).round() as i128;
        n += 1;
    }
    // angle error 2 pi e 2^-64 is below 2e units of 2^-62
    let rho = n * (F64_TERM_ULPS + 2 * phase_err as i128);
    modulus_bounds(&BigInt::from(c), &BigInt::from(s), &BigInt::from(rho), F64_FRAC)
}

/// Slow-tier bounds for phases of `bits + 8` bits, each accurate to
/// `phase_err` units of their last place, evaluated at `bits`.
pub(crate) fn power_big<'a>(
    phases: impl Iterator<Item = &'a BigUint>,
    phase_err: u64,
    bits: u32,
) -> PowerBounds {
    let pbits = bits + 8;
    let mut c = BigInt::zero();
    let mut s = BigInt::zero();
    let mut rho = BigInt::zero();
    for p in phases {
        let (x, y, e) = trig::cis_fixed(p, pbits, bits);
        c += x;
        s += y;
        rho += e + phase_err + 1;
    }
    modulus_bounds(&c, &s, &rho, bits)
}

/// `floor(x * 2^64)` for each point.
pub(crate) fn phases_u64(seq: &UnitSequence) -> Vec<u64> {
    seq.numerators()
        .iter()
        .map(|a| ((a << 64u32) / seq.denom()).to_u64().unwrap())
        .collect()
}

/// `floor(x * 2^pbits)` for each point.
pub(crate) fn phases_big(seq: &UnitSequence, pbits: u32) -> Vec<BigUint> {
    seq.numerators().iter().map(|a| (a << pbits) / seq.denom()).collect()
}

fn mul_phase_big(p: &BigUint, t: i64, pbits: u32) -> BigUint {
    let m = BigUint::one() << pbits;
    let v = (p * t.unsigned_abs()) % &m;
    if t < 0 && !v.is_zero() {
        m - v
    } else {
        v
    }
}

/// Bounds on `|sum_j e(t x_j)|^2` at a tier: `None` is the fast tier.
pub(crate) fn power_of(seq: &UnitSequence, t: i64, bits: Option<u32>) -> PowerBounds {
    let e = t.unsigned_abs();
    match bits {
        None => {
            let ph = phases_u64(seq);
            power_u64(ph.iter().map(|p| p.wrapping_mul(t as u64)), e)
        }
        Some(b) => {
            let pb = b + 8;
            let ph: Vec<BigUint> = phases_big(seq, pb).iter().map(|p| mul_phase_big(p, t, pb)).collect();
            power_big(ph.iter(), e, b)
        }
    }
}

fn tiers() -> impl Iterator<Item = Option<u32>> {
    std::iter::once(None).chain((7..=12).map(|k| Some(1u32 << k)))
}

/// `(1/N^2) |sum_j e(t x_j)|^2` with radius at most `precision`.
pub fn weyl_power(seq: &UnitSequence, t: i64, precision: &BigRational) -> Result<ApproxReal> {
    if seq.is_empty() {
        return Err(Error::EmptySequence);
    }
    if t == 0 {
        return Err(Error::InvalidInput("frequency must be nonzero".into()));
    }
    let n2 = BigInt::from(seq.len()) * BigInt::from(seq.len());
    for tier in tiers() {
        let pb = power_of(seq, t, tier);
        if pb.width_bits_ok(&n2, precision) {
            return Ok(pb.to_approx(&n2));
        }
    }
    Err(Error::PrecisionCap { bits: MAX_SUM_BITS })
}

/// Frequencies `1..=m` and threshold `delta` such that small Weyl powers at
/// every frequency force extreme discrepancy below `source_eps`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LevequeParams {
    /// `T = {1, ..., m}`.
    pub m: BigUint,
    pub delta: BigRational,
    pub source_eps: BigRational,
}

impl LevequeParams {
    /// The frequency set, when it has at most `cap` elements.
    pub fn frequencies(&self, cap: u64) -> Option<Vec<i64>> {
        let m = self.m.to_u64().filter(|&m| m <= cap)?;
        Some((1..=m as i64).collect())
    }
}

/// `m = ceil(12 / (eps^3 pi^2))` and `delta` a rational lower bound of
/// `eps^3 pi^2 / (24 m)`.
pub fn leveque_parameters(eps: &BigRational) -> Result<LevequeParams> {
    if !eps.is_positive() || *eps > BigRational::one() {
        return Err(Error::InvalidInput(format!("epsilon {} must lie in (0,1]", eps)));
    }
    let e3 = eps * eps * eps;
    let m = certify(
        |bits| {
            let p = certified::pi(bits);
            let scale = BigRational::from_integer(12.into()) / &e3;
            Enclosure::from_rational(&scale, bits).div(&p.mul(&p))
        },
        |e| e.decided_ceil(),
    )?;
    let m = m.to_biguint().unwrap();
    // pi lower bound at a precision comfortably beyond delta's size
    let extra = e3.denom().bits() as u32 + m.bits() as u32;
    let bits = 96 + extra;
    let pi = certified::pi(bits);
    let pi_lo = pi.lower();
    let exact_lo = &e3 * &pi_lo * &pi_lo / BigRational::from_integer(BigInt::from(m.clone()) * 24);
    // round down to a short dyadic
    let drop = bits + 32;
    let scaled = (&exact_lo * BigRational::from_integer(BigInt::one() << drop)).floor();
    let delta = scaled / BigRational::from_integer(BigInt::one() << drop);
    Ok(LevequeParams { m, delta, source_eps: eps.clone() })
}

/// Truncated LeVeque right-hand side
/// `(6/pi^2 (sum_{h<=m} h^-2 w_h + 1/m))^(1/3)`, an upper bound on the
/// extreme discrepancy.
pub fn leveque_bound(seq: &UnitSequence, m: u64, precision: &BigRational) -> Result<ApproxReal> {
    if m == 0 {
        return Err(Error::InvalidInput("truncation point must be positive".into()));
    }
    let inner = BigRational::new(1.into(), BigInt::one() << 80u32);
    let mut lo = BigRational::zero();
    let mut hi = BigRational::zero();
    for h in 1..=m {
        let w = weyl_power(seq, h as i64, &inner)?;
        let hh = BigRational::from_integer(BigInt::from(h) * BigInt::from(h));
        lo += w.lower().max(BigRational::zero()) / &hh;
        hi += w.upper() / &hh;
    }
    let tail = BigRational::new(1.into(), BigInt::from(m));
    let mut bits = 64;
    loop {
        let p = certified::pi(bits);
        let p2 = p.mul(&p);
        let six = Enclosure::from_int(6, bits);
        let sl = Enclosure::from_rational(&(&lo + &tail), bits);
        let sh = Enclosure::from_rational(&(&hi + &tail), bits);
        let s = Enclosure::from_raw(sl.lo_raw().clone(), sh.hi_raw().clone(), bits);
        let v = six.mul(&s).div(&p2)?.root(3);
        let a = ApproxReal::from_enclosure(&v);
        if a.rad <= *precision || bits >= MAX_SUM_BITS {
            return Ok(a);
        }
        bits *= 2;
    }
}

/// Orbit windows `{r^j xi}` for `<a;r> < j <= <a+l;r>`.
fn a_windows(xi: &BigRational, rs: &[Base], a: u64, ell: u64) -> Result<Vec<UnitSequence>> {
    rs.iter()
        .map(|&r| {
            let lo = window_index(a, r)?;
            let hi = window_index(a + ell, r)?;
            fractional_orbit(xi, r, lo + 1, hi + 1)
        })
        .collect()
}

/// `A(xi, R, T, a, l) = sum_t sum_r |sum_{<a;r> < j <= <a+l;r>} e(r^j t xi)|^2`.
pub fn exp_sum_a(
    xi: &BigRational,
    rs: &[Base],
    ts: &[i64],
    a: u64,
    ell: u64,
    precision: &BigRational,
) -> Result<ApproxReal> {
    if ell == 0 || rs.is_empty() || ts.is_empty() {
        return Err(Error::InvalidInput("A needs l >= 1 and nonempty R and T".into()));
    }
    if ts.contains(&0) {
        return Err(Error::InvalidInput("frequencies must be nonzero".into()));
    }
    let windows = a_windows(xi, rs, a, ell)?;
    let one = BigInt::one();
    for tier in tiers() {
        let scale = tier.map_or(2 * F64_FRAC, |b| 2 * b);
        let mut total = PowerBounds::zero(scale);
        for w in windows.iter().filter(|w| !w.is_empty()) {
            for &t in ts {
                total.add(&power_of(w, t, tier));
            }
        }
        if total.width_bits_ok(&one, precision) {
            return Ok(total.to_approx(&one));
        }
    }
    Err(Error::PrecisionCap { bits: MAX_SUM_BITS })
}

/// Enclosure of `prod_{k>=1} cos(pi 2^-(k+1))` at `bits`.
fn cosine_product(bits: u32) -> Enclosure {
    let kmax = bits / 2 + 4;
    let wb = bits + 16;
    let mut prod = Enclosure::from_int(1, wb);
    for k in 1..=kmax {
        let (c, _, err) = trig::cis_fixed(&BigUint::one(), k + 2, wb);
        prod = prod.mul(&Enclosure::from_raw(&c - err, &c + err, wb));
    }
    // The tail product lies in [1 - 4^-kmax, 1].
    let tail = Enclosure::from_raw(
        (BigInt::one() << wb) - (BigInt::one() << (wb - 2 * kmax)) - 1,
        BigInt::one() << wb,
        wb,
    );
    let lo = prod.mul(&tail);
    let lo = Enclosure::from_raw(lo.lo_raw() >> 16, (prod.hi_raw() >> 16) + 1, bits);
    lo
}

/// Enclosure of `c~ = 1 / prod_{k>=1} cos(pi 2^-(k+1))` (equal to `pi/2`).
///
/// Above 1024 bits the product is replaced by Viete's identity
/// `prod cos(pi 2^-(k+1)) = 2/pi`, as the product costs cubic time.
pub fn cosine_constant_enclosure(bits: u32) -> Enclosure {
    if bits > 1024 {
        return certified::pi(bits).div_int(&BigInt::from(2));
    }
    let p = cosine_product(bits + 8);
    let v = Enclosure::from_int(1, bits + 8).div(&p).expect("product is positive");
    Enclosure::from_raw(v.lo_raw() >> 8, (v.hi_raw() >> 8) + 1, bits)
}

/// `c~` with radius at most `precision`.
pub fn cosine_constant(precision: &BigRational) -> Result<ApproxReal> {
    if !precision.is_positive() {
        return Err(Error::InvalidInput("precision must be positive".into()));
    }
    let mut bits = 64;
    loop {
        let a = ApproxReal::from_enclosure(&cosine_constant_enclosure(bits));
        if a.rad <= *precision {
            return Ok(a);
        }
        if bits >= MAX_SUM_BITS * 4 {
            return Err(Error::PrecisionCap { bits });
        }
        bits *= 2;
    }
}

/// Partial products `prod_{k=1}^{K} cos(pi 2^-(k+1))` as enclosures.
pub fn cosine_partial_products(kmax: u32, bits: u32) -> Vec<Enclosure> {
    let mut prod = Enclosure::from_int(1, bits);
    let mut out = Vec::with_capacity(kmax as usize);
    for k in 1..=kmax {
        let (c, _, err) = trig::cis_fixed(&BigUint::one(), k + 2, bits);
        prod = prod.mul(&Enclosure::from_raw(&c - err, &c + err, bits));
        out.push(prod.clone());
    }
    out
}

/// The constant `c(r, s)` of the cosine-product estimate, per base pair,
/// together with `c~`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SchmidtConfig {
    pub c: BigRational,
    pub overrides: BTreeMap<(u64, u64), BigRational>,
    pub c_tilde: ApproxReal,
}

impl Default for SchmidtConfig {
    fn default() -> Self {
        Self::new(BigRational::new(1.into(), 100.into())).expect("1/100 is valid")
    }
}

impl SchmidtConfig {
    pub fn new(c: BigRational) -> Result<Self> {
        Self::check(&c)?;
        let c_tilde = cosine_constant(&BigRational::new(1.into(), BigInt::from(10u32).pow(30)))?;
        Ok(Self { c, overrides: BTreeMap::new(), c_tilde })
    }

    fn check(c: &BigRational) -> Result<()> {
        if !c.is_positive() || *c >= BigRational::new(1.into(), 2.into()) {
            return Err(Error::InvalidInput(format!("constant c = {} must lie in (0, 1/2)", c)));
        }
        Ok(())
    }

    pub fn with_override(mut self, r: u64, s: u64, c: BigRational) -> Result<Self> {
        Self::check(&c)?;
        self.overrides.insert((r, s), c);
        Ok(self)
    }

    /// `c(R, s)`: the least constant over pairs `(r, s)` with `r` in `R`.
    pub fn c_for(&self, rs: &[Base], s: Base) -> BigRational {
        rs.iter()
            .map(|r| self.overrides.get(&(r.value(), s.value())).unwrap_or(&self.c).clone())
            .min()
            .unwrap_or_else(|| self.c.clone())
    }
}

/// Least `p` with `r^(p-1) >= 2 t_max` and `r^p >= s^2 + 1` for every `r`.
pub fn schmidt_p(rs: &[Base], t_max: u64, s: Base) -> Result<u64> {
    if rs.is_empty() || t_max == 0 {
        return Err(Error::InvalidInput("p needs nonempty R and T".into()));
    }
    let need_t = 2 * t_max as u128;
    let need_s = (s.value() as u128) * (s.value() as u128) + 1;
    let mut p = 1u32;
    loop {
        let ok = rs.iter().all(|r| {
            let pow = |e: u32| (r.value() as u128).checked_pow(e).unwrap_or(u128::MAX);
            pow(p - 1) >= need_t && pow(p) >= need_s
        });
        if ok {
            return Ok(p as u64);
        }
        p += 1;
    }
}

pub(crate) fn rational_exponent(c: &BigRational, scale: u32) -> Result<(u32, u32)> {
    // scale / c = scale * den / num
    let num = c.numer().to_u32();
    let den = c.denom().to_u32();
    match (num, den) {
        (Some(n), Some(d)) => Ok((scale * d, n)),
        _ => Err(Error::InvalidInput(format!("constant {} has too large a numerator or denominator", c))),
    }
}

/// Least integer above every value in `terms`, each an enclosure built at
/// the given precision.
pub(crate) fn least_int_above(
    terms: impl Fn(u32) -> Result<Vec<Enclosure>>,
) -> Result<BigUint> {
    let v = certify(
        |bits| {
            let ts = terms(bits)?;
            let mut it = ts.into_iter();
            let first = it.next().expect("at least one term");
            Ok(it.fold(first, |acc, e| acc.max(&e)))
        },
        |e| e.decided_next_int(),
    )?;
    Ok(v.to_biguint().unwrap_or_default())
}

/// Length beyond which at least half of the restricted-alphabet candidates
/// have a small aggregate sum: the least integer above
/// `(2^(2/c)+1) ln s`, `(16 c~ #T #R)^(4/c)`, `(8 p ln s)^2` and
/// `max ln r`.
pub fn candidate_length(
    rs: &[Base],
    t_count: &BigUint,
    t_max: u64,
    s_pow: Base,
    cfg: &SchmidtConfig,
) -> Result<BigUint> {
    let c = cfg.c_for(rs, s_pow);
    let p = schmidt_p(rs, t_max, s_pow)?;
    let (e2n, e2d) = rational_exponent(&c, 2)?;
    let (e4n, e4d) = rational_exponent(&c, 4)?;
    let count = BigInt::from(t_count.clone()) * BigInt::from(rs.len()) * 16;
    least_int_above(|bits| {
        let ln_s = certified::ln_u64(s_pow.value(), bits);
        let t1 = Enclosure::from_int(2, bits)
            .pow_ratio(e2n, e2d)
            .add(&Enclosure::from_int(1, bits))
            .mul(&ln_s);
        let t2 = cosine_constant_enclosure(bits).mul_int(&count).pow_ratio(e4n, e4d);
        let t3 = ln_s.mul_int(&BigInt::from(8 * p)).pow(2);
        let mut out = vec![t1, t2, t3];
        for r in rs {
            out.push(certified::ln_u64(r.value(), bits));
        }
        Ok(out)
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    fn tiny() -> BigRational {
        q(1, 1_000_000_000_000)
    }

    fn b(v: u64) -> Base {
        Base::new(v).unwrap()
    }

    #[test]
    fn weyl_examples() {
        let s = UnitSequence::from_u64(2, &[0, 1]).unwrap();
        assert!(weyl_power(&s, 1, &tiny()).unwrap().contains(&q(0, 1)));
        let s = UnitSequence::from_u64(1, &[0, 0]).unwrap();
        assert!(weyl_power(&s, 1, &tiny()).unwrap().contains(&q(1, 1)));
        let s = UnitSequence::from_u64(3, &[0, 1, 2]).unwrap();
        let w = weyl_power(&s, 3, &tiny()).unwrap();
        assert!(w.contains(&q(1, 1)));
        assert!(w.rad <= tiny());
        let fine = weyl_power(&s, 1, &q(1, 1 << 40).pow(2)).unwrap();
        assert!(fine.rad <= q(1, 1 << 40).pow(2));
        assert!(fine.contains(&q(0, 1)));
    }

    #[test]
    fn leveque_examples() {
        let p = leveque_parameters(&q(1, 1)).unwrap();
        assert_eq!(p.m, BigUint::from(2u32));
        let d = p.delta.to_f64().unwrap();
        assert!((d - std::f64::consts::PI.powi(2) / 48.0).abs() < 1e-12);
        assert!(p.delta < BigRational::from_float(std::f64::consts::PI.powi(2) / 48.0 + 1e-15).unwrap());
        let p = leveque_parameters(&q(1, 2)).unwrap();
        assert_eq!(p.m, BigUint::from(10u32));
        assert!((p.delta.to_f64().unwrap() - std::f64::consts::PI.powi(2) / 1920.0).abs() < 1e-14);
        assert_eq!(p.frequencies(100).unwrap(), (1..=10).collect::<Vec<_>>());
        assert!(p.frequencies(5).is_none());
        let tiny_eps = leveque_parameters(&q(1, 20).pow(4)).unwrap();
        assert!(tiny_eps.m > BigUint::from(10u64).pow(15));
    }

    #[test]
    fn leveque_bound_examples() {
        let s = UnitSequence::from_u64(64, &(0..64).collect::<Vec<_>>()).unwrap();
        let v = leveque_bound(&s, 8, &tiny()).unwrap();
        assert!(v.lower() >= q(1, 64) && v.upper() <= q(1, 1));
        let s = UnitSequence::from_u64(1, &[0, 0]).unwrap();
        let v = leveque_bound(&s, 1, &tiny()).unwrap();
        assert!(v.lower() > q(97, 100));
    }

    #[test]
    fn aggregate_sum_examples() {
        let a = exp_sum_a(&q(0, 1), &[b(2), b(3)], &[1, 2], 5, 7, &tiny()).unwrap();
        // (<12;2> - <5;2>)^2 + (<12;3> - <5;3>)^2, each counted for two t
        let w2 = (18 - 8) as i64;
        let w3 = (11 - 5) as i64;
        assert!(a.contains(&q(2 * (w2 * w2 + w3 * w3), 1)));
        let a = exp_sum_a(&q(1, 3), &[b(2)], &[1], 0, 2, &tiny()).unwrap();
        assert!(a.contains(&q(3, 1)));
        let x = q(5, 17);
        let both = exp_sum_a(&x, &[b(2), b(5)], &[1, 3], 4, 9, &tiny()).unwrap();
        let one = exp_sum_a(&x, &[b(2)], &[1, 3], 4, 9, &tiny()).unwrap();
        let two = exp_sum_a(&x, &[b(5)], &[1, 3], 4, 9, &tiny()).unwrap();
        assert!((both.mid_f64() - one.mid_f64() - two.mid_f64()).abs() < 1e-9);
    }

    #[test]
    fn cosine_constant_paths_agree() {
        let lo = cosine_constant_enclosure(1024);
        let hi = cosine_constant_enclosure(2048).rescale(1024);
        assert!(lo.lower() <= hi.upper() && hi.lower() <= lo.upper());
    }

    #[test]
    fn cosine_constant_is_half_pi() {
        let c = cosine_constant(&q(1, 1_000_000_000_000)).unwrap();
        assert!(c.rad <= q(1, 1_000_000_000_000));
        assert!((c.mid_f64() - std::f64::consts::FRAC_PI_2).abs() < 1e-12);
        let pi = certified::pi(200);
        let half = ApproxReal::from_bounds(pi.lower() / q(2, 1), pi.upper() / q(2, 1));
        assert!(c.contains(&half.mid));
        let parts = cosine_partial_products(30, 128);
        for w in parts.windows(2) {
            assert!(w[1].upper() < w[0].lower());
        }
    }

    #[test]
    fn schmidt_p_examples() {
        assert_eq!(schmidt_p(&[b(2)], 2, b(3)).unwrap(), 4);
        assert_eq!(schmidt_p(&[b(10)], 1, b(3)).unwrap(), 2);
        assert!(schmidt_p(&[b(2)], 5, b(3)).unwrap() >= 4);
    }

    #[test]
    fn candidate_length_dominates_terms() {
        let cfg = SchmidtConfig::new(q(1, 4)).unwrap();
        let v = candidate_length(&[b(2)], &BigUint::one(), 1, b(3), &cfg).unwrap();
        // (16 c~)^16 with c~ = pi/2 is about 1.0e22
        let approx = (16.0 * std::f64::consts::FRAC_PI_2).powi(16);
        let got = v.to_f64().unwrap();
        assert!((got / approx - 1.0).abs() < 1e-9);
        let p = schmidt_p(&[b(2)], 1, b(3)).unwrap() as f64;
        assert!(got > (8.0 * p * 3f64.ln()).powi(2));
        assert!(SchmidtConfig::new(q(1, 2)).is_err());
    }
}
