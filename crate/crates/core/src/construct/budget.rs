//! The extension-length function `l(R, s, k, eps)` and its four terms.

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive};

use crate::counting::{big_log2, restricted_digit_n0, Bound, RestrictedAlphabet, EXACT_BOUND_BITS};
use crate::expsums::{least_int_above, candidate_length, leveque_parameters, rational_exponent, SchmidtConfig};
use crate::numerics::certified::{self, certify, Enclosure};
use crate::{Base, Error, Result};

/// `ceil(ln r + (18/eps^2) ceil(ln ceil(100/eps^2) + 3 ln r))`: the window
/// length beyond which a small family discrepancy of a nearby point
/// transfers to the orbit itself.
pub fn transfer_length(r: Base, eps: &BigRational) -> Result<BigUint> {
    if !eps.is_positive() {
        return Err(Error::InvalidInput(format!("epsilon {} must be positive", eps)));
    }
    let e2 = eps * eps;
    let n100 = (BigRational::from_integer(100.into()) / &e2).ceil().to_integer();
    let n100 = n100.to_biguint().expect("positive");
    let inner = certify(
        |bits| Ok(certified::ln_uint(&n100, bits).add(&certified::ln_u64(r.value(), bits).mul_int(&3.into()))),
        |e| e.decided_ceil(),
    )?;
    let scale = BigRational::from_integer(BigInt::from(18) * inner) / &e2;
    let v = certify(
        |bits| Ok(certified::ln_u64(r.value(), bits).add(&Enclosure::from_rational(&scale, bits))),
        |e| e.decided_ceil(),
    )?;
    Ok(v.to_biguint().unwrap_or_default())
}

/// The value of `l(R, s, k, eps)` with each contributing term.
#[derive(Clone, Debug, PartialEq)]
pub struct EllBudget {
    pub value: Bound,
    pub terms: Vec<(&'static str, Bound)>,
}

fn rat_log2(r: &BigRational) -> f64 {
    big_log2(r.numer().magnitude()) - big_log2(r.denom().magnitude())
}

/// Least integer above: the transfer length for every `r` in `R`, the
/// restricted-alphabet `N_0(s, k, eps)`, the candidate-count length for
/// `R`, `T` and `s^k` with `T`, `delta` the LeVeque parameters of
/// `(eps/10)^4`, and `((ln r)^2/delta)^(4/c)`.
///
/// Terms whose size exceeds `2^EXACT_BOUND_BITS` are reported as
/// [`Bound::Beyond`] and so is the value.
pub fn ell_budget(rs: &[Base], s: Base, k: u32, eps: &BigRational, cfg: &SchmidtConfig) -> Result<EllBudget> {
    if !eps.is_positive() || *eps > BigRational::one() {
        return Err(Error::InvalidInput(format!("epsilon {} must lie in (0,1]", eps)));
    }
    if k == 0 {
        return Err(Error::InvalidInput("k must be positive".into()));
    }
    if let Some(r) = rs.iter().find(|&&r| crate::mult_dependent(r, s)) {
        return Err(Error::DependentBases(r.value(), s.value()));
    }
    let mut terms = Vec::new();

    let transfer = rs.iter().map(|&r| transfer_length(r, eps)).collect::<Result<Vec<_>>>()?;
    let transfer = transfer.into_iter().max().unwrap_or_default();
    terms.push(("transfer", Bound::Exact(transfer.clone())));

    let alphabet = RestrictedAlphabet::for_base(s, k as u64)?;
    let n0 = restricted_digit_n0(s, k as u64, eps, &alphabet)?;
    terms.push(("restricted-alphabet", n0.clone()));

    let sk = s.pow(k).ok();
    let c = cfg.c_for(rs, sk.unwrap_or(s));
    let inv_c = 1.0 / certified::rational_to_f64(&c);
    let source = {
        let t = eps / BigRational::from_integer(10.into());
        let t2 = &t * &t;
        &t2 * &t2
    };
    let lev = leveque_parameters(&source)?;
    // delta ~ eps'^3 pi^2 / (24 m)
    let delta_log2 = rat_log2(&lev.delta);
    let m_log2 = big_log2(&lev.m);

    let mut cosine = None;
    if !rs.is_empty() {
        let count_log2 = (16.0 * std::f64::consts::FRAC_PI_2 * rs.len() as f64).log2() + m_log2;
        let est = (4.0 * inv_c * count_log2).max(2.0 * inv_c);
        let exact = match (sk, lev.m.to_u64()) {
            (Some(sk), Some(m)) if est <= EXACT_BOUND_BITS as f64 => Some(candidate_length(rs, &lev.m, m, sk, cfg)?),
            _ => None,
        };
        let b = exact.map(Bound::Exact).unwrap_or(Bound::Beyond { log2: est });
        terms.push(("exponential-sum", b));

        let ln_max = (rs.iter().map(|r| r.value()).max().unwrap() as f64).ln();
        let est4 = 4.0 * inv_c * (2.0 * ln_max.log2() - delta_log2);
        cosine = Some(est4);
    }

    let beyond = terms.iter().any(|(_, b)| matches!(b, Bound::Beyond { .. }))
        || cosine.is_some_and(|e| e > EXACT_BOUND_BITS as f64);
    if beyond {
        if let Some(e) = cosine {
            terms.push(("cosine-product", Bound::Beyond { log2: e.max(0.0) }));
        }
        let log2 = terms.iter().map(|(_, b)| b.log2()).fold(0.0, f64::max);
        return Ok(EllBudget { value: Bound::Beyond { log2 }, terms });
    }

    let ints: Vec<BigUint> = terms.iter().filter_map(|(_, b)| b.exact().cloned()).collect();
    let (e4n, e4d) = rational_exponent(&c, 4)?;
    let e3 = &source * &source * &source;
    // 1/delta = 24 m / (eps'^3 pi^2)
    let inv_delta = BigRational::from_integer(BigInt::from(lev.m.clone()) * 24) / &e3;
    let rs_v: Vec<u64> = rs.iter().map(|r| r.value()).collect();
    let cosine_term = |bits: u32| -> Result<Option<Enclosure>> {
        if rs_v.is_empty() {
            return Ok(None);
        }
        let p = certified::pi(bits);
        let scale = Enclosure::from_rational(&inv_delta, bits).div(&p.mul(&p))?;
        let mut best: Option<Enclosure> = None;
        for &r in &rs_v {
            let l = certified::ln_u64(r, bits);
            let v = l.mul(&l).mul(&scale).pow_ratio(e4n, e4d);
            best = Some(match best {
                Some(b) => b.max(&v),
                None => v,
            });
        }
        Ok(best)
    };
    let value = least_int_above(|bits| {
        let mut out: Vec<Enclosure> = ints.iter().map(|v| Enclosure::from_int(BigInt::from(v.clone()), bits)).collect();
        if let Some(e) = cosine_term(bits)? {
            out.push(e);
        }
        Ok(out)
    })?;
    if !rs.is_empty() {
        // report the last term as its least integer above
        let t4 = least_int_above(|bits| Ok(vec![cosine_term(bits)?.expect("nonempty R")]))?;
        terms.push(("cosine-product", Bound::Exact(t4)));
    }
    Ok(EllBudget { value: Bound::Exact(value), terms })
}

/// A cheap lower estimate of `log2 l(R, s, k, eps)` from the
/// exponential-sum and cosine-product terms, for reports.
pub fn ell_budget_log2(rs: &[Base], eps: &BigRational, cfg: &SchmidtConfig, s_pow: Base) -> f64 {
    if rs.is_empty() {
        return 0.0;
    }
    let c = certified::rational_to_f64(&cfg.c_for(rs, s_pow));
    let e = certified::rational_to_f64(eps) / 10.0;
    let e1 = e.powi(4);
    let pi2 = std::f64::consts::PI * std::f64::consts::PI;
    let m_log2 = (12.0f64).log2() - 3.0 * e1.log2() - pi2.log2();
    let delta_log2 = 3.0 * e1.log2() + pi2.log2() - (24.0f64).log2() - m_log2;
    let ln_max = (rs.iter().map(|r| r.value()).max().unwrap() as f64).ln();
    let t3 = 4.0 / c * ((16.0 * std::f64::consts::FRAC_PI_2 * rs.len() as f64).log2() + m_log2);
    let t4 = 4.0 / c * (2.0 * ln_max.log2() - delta_log2);
    t3.max(t4)
}
