//! Output plumbing: atomic file writes, stdout streaming and CSV cells.

use std::fs;
use std::io::Write;
use std::path::Path;

use num_rational::BigRational;
use num_traits::Zero;

use nf_core::analysis::{decimal, Measured, TraceRow};

use crate::error::{CliError, CliResult};

/// Write `bytes` to `path`, or to stdout for `-`. Files appear whole or
/// not at all.
pub fn emit(path: &str, bytes: &[u8]) -> CliResult<()> {
    if path == "-" {
        let mut out = std::io::stdout().lock();
        return match out.write_all(bytes).and_then(|_| out.flush()) {
            Err(e) if e.kind() != std::io::ErrorKind::BrokenPipe => Err(CliError::io("stdout", e)),
            _ => Ok(()),
        };
    }
    let p = Path::new(path);
    let tmp = format!("{}.tmp", path);
    let write = || -> std::io::Result<()> {
        let mut f = fs::File::create(&tmp)?;
        f.write_all(bytes)?;
        f.sync_all()?;
        fs::rename(&tmp, p)
    };
    write().map_err(|e| {
        let _ = fs::remove_file(&tmp);
        CliError::io(path, e)
    })
}

/// Read a whole file, or stdin for `-`.
pub fn slurp(path: &str) -> CliResult<String> {
    if path == "-" {
        let mut s = String::new();
        std::io::Read::read_to_string(&mut std::io::stdin().lock(), &mut s).map_err(|e| CliError::io("stdin", e))?;
        return Ok(s);
    }
    fs::read_to_string(path).map_err(|e| CliError::io(path, e))
}

pub fn rational(v: &BigRational, exact: bool) -> String {
    if exact {
        if v.denom() == &1.into() {
            v.numer().to_string()
        } else {
            format!("{}/{}", v.numer(), v.denom())
        }
    } else {
        decimal(v, 12)
    }
}

fn measured(m: &Measured, exact: bool) -> String {
    match m {
        Measured::Exact(v) => rational(v, exact),
        Measured::Enclosed { lo, hi } => {
            let mid = (lo + hi) / BigRational::from_integer(2.into());
            if mid.is_zero() {
                "0".into()
            } else {
                decimal(&mid, 12)
            }
        }
    }
}

pub const CSV_HEADER: &str = "N,base,star,extreme,simple,block_C,block_ell";

pub fn csv_row(r: &TraceRow, exact: bool) -> String {
    let (c, ell) = match &r.block_c {
        Some((c, ell)) => (rational(c, exact), ell.to_string()),
        None => (String::new(), String::new()),
    };
    format!(
        "{},{},{},{},{},{},{}",
        r.n,
        r.base,
        measured(&r.star, exact),
        r.extreme.as_ref().map(|v| rational(v, exact)).unwrap_or_default(),
        rational(&r.simple, exact),
        c,
        ell
    )
}

pub fn csv(rows: &[TraceRow], exact: bool) -> String {
    let mut out = String::from(CSV_HEADER);
    out.push('\n');
    for r in rows {
        out.push_str(&csv_row(r, exact));
        out.push('\n');
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use nf_core::Base;

    fn q(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    #[test]
    fn missing_values_are_empty() {
        let r = TraceRow {
            n: 64,
            base: Base::new(2).unwrap(),
            star: Measured::Exact(q(1, 3)),
            extreme: None,
            simple: q(0, 1),
            block_c: None,
        };
        assert_eq!(csv_row(&r, false), "64,2,0.333333333333,,0,,");
        assert_eq!(csv_row(&r, true), "64,2,1/3,,0,,");
    }
}
