//! Exact discrepancy kernels over [`UnitSequence`]s.
//!
//! Intervals are half-open, `[u, v)`. Every value is an exact rational.

pub mod oracle;

use std::collections::HashMap;

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::{Base, DigitBlock, Error, Interval, Result, UnitSequence};

/// A finite family of subintervals of `[0,1)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IntervalFamily {
    intervals: Vec<Interval>,
}

impl IntervalFamily {
    pub fn new(intervals: Vec<Interval>) -> Self {
        Self { intervals }
    }

    pub fn intervals(&self) -> &[Interval] {
        &self.intervals
    }

    pub fn len(&self) -> usize {
        self.intervals.len()
    }

    pub fn is_empty(&self) -> bool {
        self.intervals.is_empty()
    }
}

/// Overlapping occurrence counts of every length-`block_length` block.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BlockStats {
    pub block_length: usize,
    pub counts: HashMap<Vec<u64>, u64>,
}

fn ratio(num: BigInt, n: usize, q: &BigUint) -> BigRational {
    BigRational::new(num, BigInt::from(n) * BigInt::from(q.clone()))
}

fn sorted_nums(seq: &UnitSequence) -> Vec<&BigUint> {
    let mut v: Vec<&BigUint> = seq.numerators().iter().collect();
    v.sort_unstable();
    v
}

/// `i*q - N*x_(i)` for the sorted points, `i` 1-based.
fn offsets(seq: &UnitSequence) -> Vec<BigInt> {
    let n = BigInt::from(seq.len());
    let q = BigInt::from(seq.denom().clone());
    sorted_nums(seq)
        .into_iter()
        .enumerate()
        .map(|(i, a)| BigInt::from(i + 1) * &q - &n * BigInt::from(a.clone()))
        .collect()
}

/// Extreme discrepancy `sup_{u<v} |#{u <= x < v}/N - (v-u)|`.
///
/// Uses `1/N + max_i (i/N - x_(i)) - min_i (i/N - x_(i))` over sorted points.
pub fn extreme_discrepancy(seq: &UnitSequence) -> Result<BigRational> {
    if seq.is_empty() {
        return Err(Error::EmptySequence);
    }
    let off = offsets(seq);
    let max = off.iter().max().unwrap();
    let min = off.iter().min().unwrap();
    let q = BigInt::from(seq.denom().clone());
    Ok(ratio(q + max - min, seq.len(), seq.denom()))
}

/// Extreme discrepancy from the pairwise form over sorted points,
/// `max_{i<=j} max((j-i+1)/N - (x_j - x_i), (x_j - x_i) - (j-i-1)/N)`.
pub fn extreme_discrepancy_pairs(seq: &UnitSequence) -> Result<BigRational> {
    if seq.is_empty() {
        return Err(Error::EmptySequence);
    }
    let n = seq.len();
    let nb = BigInt::from(n);
    let q = BigInt::from(seq.denom().clone());
    let xs: Vec<BigInt> = sorted_nums(seq).into_iter().map(|a| &nb * BigInt::from(a.clone())).collect();
    let mut best = BigInt::zero();
    for i in 0..n {
        for j in i..n {
            let gap = &xs[j] - &xs[i];
            let c = (j - i) as i64;
            let a = BigInt::from(c + 1) * &q - &gap;
            let b = &gap - BigInt::from(c - 1) * &q;
            best = best.max(a).max(b);
        }
    }
    let d = ratio(best, n, seq.denom());
    Ok(d.clamp(BigRational::zero(), BigRational::one()))
}

/// Extreme discrepancy computed by both routes, failing if they disagree.
pub fn extreme_discrepancy_audited(seq: &UnitSequence) -> Result<BigRational> {
    let fast = extreme_discrepancy(seq)?;
    let brute = oracle::extreme_discrepancy(seq)?;
    if fast != brute {
        return Err(Error::InvariantViolation(format!(
            "closed form {} disagrees with endpoint enumeration {}",
            fast, brute
        )));
    }
    Ok(fast)
}

/// Star discrepancy `sup_v |#{x < v}/N - v|`.
pub fn star_discrepancy(seq: &UnitSequence) -> Result<BigRational> {
    if seq.is_empty() {
        return Err(Error::EmptySequence);
    }
    let n = BigInt::from(seq.len());
    let q = BigInt::from(seq.denom().clone());
    let mut best = BigInt::zero();
    for (i, a) in sorted_nums(seq).into_iter().enumerate() {
        let na = &n * BigInt::from(a.clone());
        let up = BigInt::from(i + 1) * &q - &na;
        let down = na - BigInt::from(i) * &q;
        best = best.max(up).max(down);
    }
    Ok(ratio(best, seq.len(), seq.denom()))
}

/// `#{x in seq : x < t}` with `seq` given as sorted numerators over `q`.
fn count_below(sorted: &[&BigUint], q: &BigUint, t: &BigRational) -> usize {
    // x/q < tn/td  <=>  x*td < tn*q
    let tn = t.numer().magnitude();
    let td = t.denom().magnitude();
    let rhs = tn * q;
    sorted.partition_point(|x| *x * td < rhs)
}

/// `max_{I in F} |#{x in I}/N - mu(I)|`.
pub fn family_discrepancy(family: &IntervalFamily, seq: &UnitSequence) -> Result<BigRational> {
    if seq.is_empty() {
        return Err(Error::EmptySequence);
    }
    if family.is_empty() {
        return Err(Error::EmptyFamily);
    }
    let sorted = sorted_nums(seq);
    let n = BigInt::from(seq.len());
    let mut best = BigRational::zero();
    for i in family.intervals() {
        let c = count_below(&sorted, seq.denom(), i.upper()) - count_below(&sorted, seq.denom(), i.lower());
        let d = (BigRational::new(BigInt::from(c), n.clone()) - i.measure()).abs();
        best = best.max(d);
    }
    Ok(best)
}

/// The `n` cells `[a/n, (a+1)/n)`.
pub fn equipartition(n: u64) -> Result<IntervalFamily> {
    if n == 0 {
        return Err(Error::InvalidInput("partition needs at least one cell".into()));
    }
    let nb = BigInt::from(n);
    let intervals = (0..n)
        .map(|a| {
            Interval::new(
                BigRational::new(BigInt::from(a), nb.clone()),
                BigRational::new(BigInt::from(a + 1), nb.clone()),
            )
        })
        .collect::<Result<_>>()?;
    Ok(IntervalFamily::new(intervals))
}

/// Discrepancy of `seq` for the equipartition into `cells` pieces, computed
/// by bucketing. Equal to `family_discrepancy(equipartition(cells), seq)`.
pub fn cell_discrepancy(cells: &BigUint, seq: &UnitSequence) -> Result<BigRational> {
    if seq.is_empty() {
        return Err(Error::EmptySequence);
    }
    if cells.is_zero() {
        return Err(Error::InvalidInput("partition needs at least one cell".into()));
    }
    let mut counts: HashMap<BigUint, u64> = HashMap::new();
    for a in seq.numerators() {
        *counts.entry((a * cells) / seq.denom()).or_default() += 1;
    }
    let n = seq.len() as u64;
    Ok(cell_counts_discrepancy(cells, n, counts.values().copied()))
}

/// `max |c/N - 1/cells|` over all cells given the nonzero counts.
pub fn cell_counts_discrepancy(
    cells: &BigUint,
    n: u64,
    counts: impl Iterator<Item = u64>,
) -> BigRational {
    let inv = BigRational::new(BigInt::one(), BigInt::from(cells.clone()));
    let mut occupied = 0u64;
    let mut max_c = 0u64;
    let mut min_c = u64::MAX;
    for c in counts {
        occupied += 1;
        max_c = max_c.max(c);
        min_c = min_c.min(c);
    }
    let nb = BigInt::from(n);
    let mut best = BigRational::zero();
    if occupied > 0 {
        best = best.max((BigRational::new(BigInt::from(max_c), nb.clone()) - &inv).abs());
        best = best.max((BigRational::new(BigInt::from(min_c), nb.clone()) - &inv).abs());
    }
    if BigUint::from(occupied) < *cells {
        best = best.max(inv);
    }
    best
}

/// Equipartition discrepancy for `r` cells, bucketed.
pub fn simple_discrepancy(seq: &UnitSequence, r: Base) -> Result<BigRational> {
    if seq.is_empty() {
        return Err(Error::EmptySequence);
    }
    let mut counts = vec![0u64; r.value() as usize];
    let rb = r.big();
    for a in seq.numerators() {
        let d = ((a * &rb) / seq.denom()).to_usize().unwrap();
        counts[d] += 1;
    }
    Ok(simple_from_counts(&counts))
}

/// Simple discrepancy from a complete vector of per-cell counts.
pub fn simple_from_counts(counts: &[u64]) -> BigRational {
    let n: u64 = counts.iter().sum();
    let r = counts.len() as u64;
    // |c/N - 1/r| = |c*r - N| / (N*r)
    let best = counts
        .iter()
        .map(|&c| (c as i128 * r as i128 - n as i128).unsigned_abs())
        .max()
        .unwrap_or(0);
    BigRational::new(BigInt::from(best), BigInt::from(n) * BigInt::from(r))
}

/// Family value for the equipartition into `ceil(3/eps)` cells, and `eps`
/// when that value is below `(eps/3)^2`.
pub fn partition_bound(
    eps: &BigRational,
    seq: &UnitSequence,
) -> Result<(BigRational, Option<BigRational>)> {
    if !eps.is_positive() || *eps >= BigRational::one() {
        return Err(Error::InvalidInput(format!("epsilon {} must lie in (0,1)", eps)));
    }
    let cells = (BigRational::from_integer(3.into()) / eps).ceil().to_integer();
    let value = cell_discrepancy(cells.magnitude(), seq)?;
    let third = eps / BigRational::from_integer(3.into());
    let implied = (value < &third * &third).then(|| eps.clone());
    Ok((value, implied))
}

/// Overlapping occurrence counts of length-`ell` blocks.
pub fn block_stats(w: &DigitBlock, ell: usize) -> Result<BlockStats> {
    if ell == 0 || ell > w.len() {
        return Err(Error::BlockTooShort { len: w.len(), needed: ell.max(1) });
    }
    let mut counts: HashMap<Vec<u64>, u64> = HashMap::new();
    for win in w.digits().windows(ell) {
        *counts.entry(win.to_vec()).or_default() += 1;
    }
    Ok(BlockStats { block_length: ell, counts })
}

/// `C(ell, w) = max_u |occ(w,u)/|w| - s^-ell|`.
pub fn block_discrepancy(w: &DigitBlock, ell: usize) -> Result<BigRational> {
    if ell == 0 || ell > w.len() {
        return Err(Error::BlockTooShort { len: w.len(), needed: ell.max(1) });
    }
    let s = w.base().value();
    let n = w.len() as u64;
    // Fast path: encode blocks as integers when s^ell is small.
    if let Some(total) = s.checked_pow(ell as u32).filter(|&t| t <= 1 << 22) {
        let mut counts = vec![0u64; total as usize];
        let mut code = 0u64;
        for (i, &d) in w.digits().iter().enumerate() {
            code = (code * s + d) % total;
            if i + 1 >= ell {
                counts[code as usize] += 1;
            }
        }
        return Ok(block_from_counts(&counts, n));
    }
    let stats = block_stats(w, ell)?;
    let total = w.base().big_pow(ell as u64);
    Ok(cell_counts_discrepancy(&total, n, stats.counts.values().copied()))
}

/// `max_u |counts[u]/n - 1/len|` for a complete count vector.
pub fn block_from_counts(counts: &[u64], n: u64) -> BigRational {
    let t = counts.len() as u128;
    let best = counts
        .iter()
        .map(|&c| (c as i128 * t as i128 - n as i128).unsigned_abs())
        .max()
        .unwrap_or(0);
    BigRational::new(BigInt::from(best), BigInt::from(n) * BigInt::from(t))
}

/// Whether `n < eps * N`, which licenses the doubled bound after adding at
/// most `n` points to a sequence of length `N`.
pub fn perturbation_bound(eps: &BigRational, total: u64, n: u64) -> Result<bool> {
    if total == 0 {
        return Err(Error::InvalidInput("sequence length must be positive".into()));
    }
    Ok(BigRational::from_integer(n.into()) < eps * BigRational::from_integer(total.into()))
}

/// `2 eps` when every gap satisfies `b_{m+1} - b_m <= eps b_m` and every
/// block discrepancy is below `eps`.
pub fn chain_bound(
    eps: &BigRational,
    breakpoints: &[u64],
    block_discrepancies: &[BigRational],
) -> Result<Option<BigRational>> {
    if breakpoints.len() != block_discrepancies.len() + 1 {
        return Err(Error::LengthMismatch(format!(
            "{} breakpoints need {} block values, got {}",
            breakpoints.len(),
            breakpoints.len().saturating_sub(1),
            block_discrepancies.len()
        )));
    }
    if breakpoints.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::InvalidInput("breakpoints must be strictly increasing".into()));
    }
    let gaps_ok = breakpoints.windows(2).all(|w| {
        BigRational::from_integer((w[1] - w[0]).into()) <= eps * BigRational::from_integer(w[0].into())
    });
    let blocks_ok = block_discrepancies.iter().all(|d| d < eps);
    Ok((gaps_ok && blocks_ok).then(|| eps * BigRational::from_integer(2.into())))
}

/// `mu(I)/2` as a lower bound on `D({I}, seq)` when `N >= ceil(2m/mu(I))`
/// and no point with 1-based index in `m..=N` lies in `I`.
pub fn avoidance_bound(interval: &Interval, seq: &UnitSequence, m: u64) -> Option<BigRational> {
    let mu = interval.measure();
    let need = (BigRational::from_integer((2 * m).into()) / &mu).ceil().to_integer();
    if BigInt::from(seq.len()) < need || m == 0 {
        return None;
    }
    let start = (m - 1) as usize;
    let q = BigInt::from(seq.denom().clone());
    let lo = interval.lower();
    let hi = interval.upper();
    let hit = seq.numerators()[start.min(seq.len())..].iter().any(|a| {
        let x = BigInt::from(a.clone());
        // lo <= x/q < hi
        &x * lo.denom() >= lo.numer() * &q && &x * hi.denom() < hi.numer() * &q
    });
    (!hit).then(|| mu / BigRational::from_integer(2.into()))
}
