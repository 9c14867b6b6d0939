//! Browser bindings: discrepancy of a point list, traces of a digit
//! stream, and a small desk-mode construction.
//!
//! Each operation has a plain Rust form returning `Result<String, String>`
//! and a `#[wasm_bindgen]` wrapper around it.

use std::fmt::Write as _;

use num_rational::BigRational;
use wasm_bindgen::prelude::*;

use nf_core::analysis::{decimal, geometric_checkpoints, points_available, trace, Measured, TraceOptions};
use nf_core::construct::{render_digits, thm4, thm5, Caps, Clause, Enumeration, GSchedule, Schedule};
use nf_core::discrepancy::{extreme_discrepancy, star_discrepancy};
use nf_core::{Base, DigitBlock, UnitSequence};

fn err(e: impl std::fmt::Display) -> String {
    e.to_string()
}

fn parse_rational(s: &str) -> Result<BigRational, String> {
    let s = s.trim();
    let bad = || format!("'{}' is not a rational number", s);
    if let Some((p, q)) = s.split_once('/') {
        let p: num_bigint::BigInt = p.trim().parse().map_err(|_| bad())?;
        let q: num_bigint::BigInt = q.trim().parse().map_err(|_| bad())?;
        if q == 0.into() {
            return Err(bad());
        }
        return Ok(BigRational::new(p, q));
    }
    if let Some((i, f)) = s.split_once('.') {
        let n: num_bigint::BigInt = format!("{}{}", i, f).parse().map_err(|_| bad())?;
        return Ok(BigRational::new(n, num_traits::pow(num_bigint::BigInt::from(10), f.len())));
    }
    s.parse::<num_bigint::BigInt>().map(BigRational::from_integer).map_err(|_| bad())
}

fn parse_bases(s: &str) -> Result<Vec<Base>, String> {
    s.split(',')
        .map(str::trim)
        .filter(|t| !t.is_empty())
        .map(|t| t.parse::<u64>().map_err(err).and_then(|v| Base::new(v).map_err(err)))
        .collect()
}

fn fmt_measured(m: &Measured) -> String {
    match m {
        Measured::Exact(v) => decimal(v, 8),
        Measured::Enclosed { lo, hi } => decimal(&((lo + hi) / BigRational::from_integer(2.into())), 8),
    }
}

/// Exact star and extreme discrepancy of points given as `p/q` or
/// decimals separated by commas or whitespace.
pub fn point_discrepancy(points: &str) -> Result<String, String> {
    let pts = points
        .split(|c: char| c == ',' || c.is_whitespace())
        .filter(|t| !t.is_empty())
        .map(parse_rational)
        .collect::<Result<Vec<_>, _>>()?;
    if pts.is_empty() {
        return Err("enter at least one point".into());
    }
    if pts.len() > 2000 {
        return Err("at most 2000 points".into());
    }
    let seq = UnitSequence::from_points(&pts).map_err(err)?;
    let star = star_discrepancy(&seq).map_err(err)?;
    let ext = extreme_discrepancy(&seq).map_err(err)?;
    Ok(format!(
        "N = {}\nstar discrepancy = {} ~ {}\nextreme discrepancy = {} ~ {}\n",
        seq.len(),
        star,
        decimal(&star, 12),
        ext,
        decimal(&ext, 12)
    ))
}

/// The first `count` digits of Champernowne's constant in base 10.
pub fn champernowne(count: usize) -> String {
    let mut s = String::new();
    let mut i = 1u64;
    while s.len() < count {
        s.push_str(&i.to_string());
        i += 1;
    }
    s.truncate(count);
    s
}

/// CSV trace `N,base,star,extreme,simple` of a digit string in base
/// `base` (digits as characters `0-9a-z`) for each analysis base.
pub fn digit_trace(digits: &str, base: u64, bases: &str) -> Result<String, String> {
    let b = Base::new(base).map_err(err)?;
    if b.value() > 36 {
        return Err("digit strings support bases up to 36".into());
    }
    let ds = digits
        .chars()
        .filter(|c| !c.is_whitespace())
        .map(|c| c.to_digit(36).map(u64::from).ok_or_else(|| format!("'{}' is not a digit", c)))
        .collect::<Result<Vec<_>, _>>()?;
    if ds.len() > 20_000 {
        return Err("at most 20000 digits".into());
    }
    let stream = DigitBlock::new(b, ds).map_err(err)?;
    if stream.is_empty() {
        return Err("enter some digits".into());
    }
    let bases = parse_bases(bases)?;
    let opts = TraceOptions { exact_cap: 2000, exact: false, block_ell: None };
    let mut out = String::from("N,base,star,extreme,simple\n");
    for &r in &bases {
        let total = points_available(b, stream.len(), r);
        let rows = trace(&stream, &[r], &geometric_checkpoints(16, total), &opts).map_err(err)?;
        for row in rows {
            let _ = writeln!(
                out,
                "{},{},{},{},{}",
                row.n,
                row.base,
                fmt_measured(&row.star),
                row.extreme.as_ref().map(|v| decimal(v, 8)).unwrap_or_default(),
                decimal(&row.simple, 8)
            );
        }
    }
    Ok(out)
}

/// A desk-mode run. `kind` is `thm5` (with `rs`, `ss`) or `thm4` (with
/// `ss` holding the single base `s`). Returns a summary, then the first
/// rendered digits in base `show_base`.
pub fn construct(kind: &str, rs: &str, ss: &str, stages: u64, cap_ell: u64, seed: u64, show_base: u64) -> Result<String, String> {
    if stages > 40 || cap_ell > 256 {
        return Err("the demo allows at most 40 stages and cap_ell 256".into());
    }
    let sched = Schedule::desk(Caps { ell: cap_ell, ..Caps::default() }).with_seed(seed);
    let x = match kind {
        "thm5" => {
            let ss = Enumeration::finite(parse_bases(ss)?).map_err(err)?;
            thm5::run(parse_bases(rs)?, Some(ss), stages, sched).map_err(err)?
        }
        "thm4" => {
            let s = *parse_bases(ss)?.first().ok_or("enter the base s")?;
            thm4::run(s, GSchedule::Log2, stages, sched).map_err(err)?
        }
        k => return Err(format!("unknown construction '{}'", k)),
    };
    let st = x.current();
    let mut out = String::new();
    let advances = x.stages.iter().filter(|r| r.clause == Clause::Advance).count();
    let _ = writeln!(out, "{} stages, {} advances, {} digits in base {}", x.stage_count(), advances, st.digits.len() * st.k as usize, st.s);
    for rec in &x.stages[1..] {
        let s = &rec.state;
        let _ = writeln!(
            out,
            "stage {:>2} {:<14} s={} k={} eps={} b={} passing {}/{}",
            s.stage,
            rec.clause.to_string(),
            s.s,
            s.k,
            s.eps,
            s.b,
            rec.passing,
            rec.evaluated
        );
    }
    let show = Base::new(show_base).map_err(err)?;
    let want = points_available(st.radix().map_err(err)?, st.digits.len(), show).min(400);
    let r = render_digits(&x, show, want).map_err(err)?;
    let digits: String = r.digits.digits().iter().map(|&d| std::char::from_digit(d as u32, 36).unwrap_or('?')).collect();
    let _ = writeln!(out, "first {} digits in base {}:\n{}", r.digits.len(), show, digits);
    Ok(out)
}

#[wasm_bindgen(js_name = pointDiscrepancy)]
pub fn point_discrepancy_js(points: &str) -> Result<String, JsValue> {
    point_discrepancy(points).map_err(|e| JsValue::from_str(&e))
}

#[wasm_bindgen(js_name = digitTrace)]
pub fn digit_trace_js(digits: &str, base: u32, bases: &str) -> Result<String, JsValue> {
    digit_trace(digits, base as u64, bases).map_err(|e| JsValue::from_str(&e))
}

#[wasm_bindgen(js_name = champernowne)]
pub fn champernowne_js(count: u32) -> String {
    champernowne(count.min(20_000) as usize)
}

#[wasm_bindgen(js_name = construct)]
pub fn construct_js(kind: &str, rs: &str, ss: &str, stages: u32, cap_ell: u32, seed: u32, show_base: u32) -> Result<String, JsValue> {
    construct(kind, rs, ss, stages as u64, cap_ell as u64, seed as u64, show_base as u64).map_err(|e| JsValue::from_str(&e))
}
