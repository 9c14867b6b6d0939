//! Certified evaluation of `e(x) = exp(2 pi i x)` at binary phases.
//!
//! A phase is a fixed-point number `p / 2^bits` in `[0,1)`. The fast tier
//! takes 64-bit phases and evaluates in `f64`; the slow tier takes phases of
//! any width and evaluates in big fixed-point arithmetic. Both return error
//! bounds that callers fold into an enclosure.

use num_bigint::{BigInt, BigUint};
use num_traits::{One, ToPrimitive, Zero};

use crate::numerics::certified;

/// Absolute error bound of [`cis_u64`] on each component, for an exact phase.
///
/// Octant reduction is exact in integers. The remaining error comes from
/// converting the residue to `f64`, scaling by `pi/4`, and a degree-17
/// Taylor evaluation on `[0, pi/4]`; together these stay below `2e-15`.
pub const F64_ERR: f64 = 7.105427357601002e-15; // 2^-47

/// `cos` and `sin` on `[0, pi/4]`.
fn cos_sin_small(theta: f64) -> (f64, f64) {
    let x2 = theta * theta;
    // 1/(2k)! and 1/(2k+1)!
    const C: [f64; 9] = [
        1.0,
        -0.5,
        4.166666666666666666e-2,
        -1.388888888888888889e-3,
        2.480158730158730159e-5,
        -2.755731922398589065e-7,
        2.087675698786809898e-9,
        -1.147074559772972471e-11,
        4.779477332387385297e-14,
    ];
    const S: [f64; 9] = [
        1.0,
        -1.666666666666666667e-1,
        8.333333333333333333e-3,
        -1.984126984126984127e-4,
        2.755731922398589065e-6,
        -2.505210838544171878e-8,
        1.605904383682161460e-10,
        -7.647163731819816476e-13,
        2.811457254345520763e-15,
    ];
    let mut c = C[8];
    let mut s = S[8];
    for k in (0..8).rev() {
        c = c * x2 + C[k];
        s = s * x2 + S[k];
    }
    (c, s * theta)
}

/// `(cos 2 pi p/2^64, sin 2 pi p/2^64)`, each within [`F64_ERR`].
pub fn cis_u64(phase: u64) -> (f64, f64) {
    const OCT: u64 = 1 << 61;
    let oct = phase >> 61;
    let mut r = phase & (OCT - 1);
    if oct & 1 == 1 {
        r = OCT - r;
    }
    let theta = (r as f64) * (std::f64::consts::FRAC_PI_4 / OCT as f64);
    let (c, s) = cos_sin_small(theta);
    match oct {
        0 => (c, s),
        1 => (s, c),
        2 => (-s, c),
        3 => (-c, s),
        4 => (-c, -s),
        5 => (-s, -c),
        6 => (s, -c),
        _ => (c, -s),
    }
}

/// Fixed-point `(cos, sin)` of `2 pi p / 2^pbits` at `bits` fractional bits,
/// with a common error bound in ulps.
pub fn cis_fixed(phase: &BigUint, pbits: u32, bits: u32) -> (BigInt, BigInt, u64) {
    assert!(pbits >= 3);
    let g = 16u32;
    let wb = bits + g;
    let shift = pbits - 3;
    let oct_unit = BigUint::one() << shift;
    let oct = (phase >> shift).to_u64().unwrap() & 7;
    let mut r = phase % &oct_unit;
    if oct & 1 == 1 {
        r = &oct_unit - r;
    }
    // theta = (pi/4) * r / 2^shift
    let pi = certified::pi(wb + 4);
    let theta_lo = (BigInt::from(r.clone()) * pi.lo_raw()) >> (shift + 2 + 4);
    let theta = theta_lo;
    let one = BigInt::one() << wb;
    let theta2 = (&theta * &theta) >> wb;
    // cos: sum (-1)^k theta^(2k)/(2k)!, sin: sum (-1)^k theta^(2k+1)/(2k+1)!
    let mut cos = BigInt::zero();
    let mut sin = BigInt::zero();
    let mut tc = one.clone();
    let mut ts = theta.clone();
    let mut k: u64 = 0;
    while !tc.is_zero() || !ts.is_zero() {
        if k % 2 == 0 {
            cos += &tc;
            sin += &ts;
        } else {
            cos -= &tc;
            sin -= &ts;
        }
        k += 1;
        tc = (&tc * &theta2) / BigInt::from((2 * k - 1) * (2 * k));
        tc >>= wb;
        ts = (&ts * &theta2) / BigInt::from((2 * k) * (2 * k + 1));
        ts >>= wb;
    }
    // theta is off by < 2 ulps and theta^2 by < 5. Each recursive term then
    // carries < 7 ulps of error, and the dropped tail is below 1 ulp.
    let err_wb = 20 + 8 * k;
    let c = cos >> g;
    let s = sin >> g;
    let err = (err_wb >> g) + 2;
    let (c, s) = match oct {
        0 => (c, s),
        1 => (s, c),
        2 => (-s, c),
        3 => (-c, s),
        4 => (-c, -s),
        5 => (-s, -c),
        6 => (s, -c),
        _ => (c, -s),
    };
    (c, s, err)
}
