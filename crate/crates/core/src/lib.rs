//! Digit expansions with prescribed normality across bases, and exact
//! discrepancy and exponential-sum kernels for analyzing digit streams.
//!
//! Real-valued state is kept as exact rationals. Only exponential sums are
//! approximate, and every approximation carries a certified error radius.

pub mod analysis;
pub mod basechange;
pub mod construct;
pub mod counting;
pub mod discrepancy;
mod error;
pub mod expsums;
pub mod numerics;
mod par;

pub use error::{Error, Result};
pub use numerics::{
    adic_value, fractional_orbit, minimal_representative, mult_dependent, scaled_index,
    AdicRational, Base, DigitBlock, Interval, UnitSequence,
};
