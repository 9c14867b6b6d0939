//! Brute-force discrepancy by enumerating interval endpoints.
//!
//! Candidate intervals have endpoints in the point set together with 0 and
//! 1. For each pair `u <= v` the four limits `[u,v)`, `(u,v)`, `[u,v]` and
//! `(u,v]` are scored; together they reach every one-sided limit of the
//! supremum in the definition.

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::{Error, Result, UnitSequence};

fn endpoints(seq: &UnitSequence) -> (Vec<BigUint>, Vec<BigUint>) {
    let mut sorted = seq.numerators().to_vec();
    sorted.sort();
    let mut ends = sorted.clone();
    ends.push(BigUint::zero());
    ends.push(seq.denom().clone());
    ends.sort();
    ends.dedup();
    (sorted, ends)
}

fn below(sorted: &[BigUint], x: &BigUint) -> usize {
    sorted.partition_point(|p| p < x)
}

fn at_most(sorted: &[BigUint], x: &BigUint) -> usize {
    sorted.partition_point(|p| p <= x)
}

fn score(count: usize, len: &BigUint, n: usize, q: &BigUint) -> BigInt {
    // |count/N - len/q| scaled by N*q
    let a = BigInt::from(count) * BigInt::from(q.clone());
    let b = BigInt::from(n) * BigInt::from(len.clone());
    let d = a - b;
    if d < BigInt::zero() {
        -d
    } else {
        d
    }
}

/// Extreme discrepancy by endpoint enumeration, `O(N^2 log N)`.
pub fn extreme_discrepancy(seq: &UnitSequence) -> Result<BigRational> {
    if seq.is_empty() {
        return Err(Error::EmptySequence);
    }
    let n = seq.len();
    let q = seq.denom();
    let (sorted, ends) = endpoints(seq);
    let mut best = BigInt::zero();
    for (i, u) in ends.iter().enumerate() {
        let lt_u = below(&sorted, u);
        let le_u = at_most(&sorted, u);
        // closed degenerate interval [u,u]
        best = best.max(score(le_u - lt_u, &BigUint::zero(), n, q));
        for v in &ends[i + 1..] {
            let len = v - u;
            let lt_v = below(&sorted, v);
            let le_v = at_most(&sorted, v);
            for c in [lt_v - lt_u, lt_v - le_u, le_v - lt_u, le_v - le_u] {
                best = best.max(score(c, &len, n, q));
            }
        }
    }
    let den = BigInt::from(n) * BigInt::from(q.clone());
    Ok(BigRational::new(best, den).min(BigRational::one()))
}

/// Star discrepancy by enumerating anchored intervals `[0,v)` and `[0,v]`.
pub fn star_discrepancy(seq: &UnitSequence) -> Result<BigRational> {
    if seq.is_empty() {
        return Err(Error::EmptySequence);
    }
    let n = seq.len();
    let q = seq.denom();
    let (sorted, ends) = endpoints(seq);
    let mut best = BigInt::zero();
    for v in &ends {
        best = best.max(score(below(&sorted, v), v, n, q));
        best = best.max(score(at_most(&sorted, v), v, n, q));
    }
    let den = BigInt::from(n) * BigInt::from(q.clone());
    Ok(BigRational::new(best, den).min(BigRational::one()))
}
