//! `nfrun/1` run files and `nfdig/1` digit files.

use std::fs;
use std::io::{BufRead, Write};
use std::path::Path;
use std::str::FromStr;

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::Zero;

use super::stage::to_digits;
use super::{
    Caps, Capped, Clause, ConstructedReal, Enumeration, Extension, GSchedule, Mode, RunKind, Schedule, StageRecord,
    StageState,
};
use crate::expsums::SchmidtConfig;
use crate::{Base, DigitBlock, Error, Result};

const RUN_HEADER: &str = "nfrun/1";
const DIGIT_HEADER: &str = "nfdig/1";
const PER_LINE: usize = 64;

fn bases(v: &[Base]) -> String {
    if v.is_empty() {
        return "-".into();
    }
    v.iter().map(|b| b.to_string()).collect::<Vec<_>>().join(",")
}

fn header(x: &ConstructedReal) -> String {
    let mut t = vec![RUN_HEADER.to_string(), format!("kind={}", x.kind.name())];
    match &x.kind {
        RunKind::Thm2 { oracle, enumeration } => {
            t.push(format!("oracle={}", oracle.replace(' ', "_")));
            t.push(format!("enum={}", enumeration.describe()));
        }
        RunKind::Thm4 { s, g } => {
            t.push(format!("s={}", s));
            t.push(format!("g={}", g.name()));
        }
        RunKind::Thm5 { rs, ss } => {
            t.push(format!("R={}", bases(rs)));
            t.push(format!("S={}", ss.describe()));
        }
    }
    let sc = &x.schedule;
    match &sc.mode {
        Mode::Faithful => t.push("mode=faithful".into()),
        Mode::Desk(c) => {
            t.push("mode=desk".into());
            t.push(format!("cap_ell={}", c.ell));
            t.push(format!("cap_k={}", c.k));
            t.push(format!("cap_n={}", c.n));
            t.push(format!("cap_t={}", c.t));
            t.push(format!("candidates={}", c.candidates));
        }
    }
    t.push(format!("seed={}", sc.seed));
    t.push(format!("budget={}", sc.budget));
    t.push(format!("c={}", sc.schmidt.c));
    for ((r, s), c) in &sc.schmidt.overrides {
        t.push(format!("c_override={},{},{}", r, s, c));
    }
    t.join(" ")
}

fn record(rec: &StageRecord) -> Result<String> {
    let st = &rec.state;
    let ext = match &rec.extension {
        Some(e) => format!("{}:{}:{}", e.radix, e.start, e.alphabet),
        None => "-".into(),
    };
    let capped = if rec.capped.is_empty() {
        "-".into()
    } else {
        rec.capped.iter().map(|c| format!("{}:{}:{}", c.what, c.used, c.faithful_log2)).collect::<Vec<_>>().join(";")
    };
    let iv = st.interval()?;
    let mut line = format!(
        "stage={} clause={} s={} k={} eps={} b={} l={} c={} x={} R={} kbar={} a={} len={} ext={} evaluated={} passing={} capped={} lo={} hi={} block:",
        st.stage,
        rec.clause,
        st.s,
        st.k,
        st.eps,
        st.b,
        st.ell,
        st.c,
        st.x,
        bases(&st.rs),
        st.kbar,
        rec.a,
        st.digits.len(),
        ext,
        rec.evaluated,
        rec.passing,
        capped,
        iv.lower(),
        iv.upper(),
    );
    if let Some(e) = &rec.extension {
        for d in &e.digits {
            line.push(' ');
            line.push_str(&d.to_string());
        }
    }
    Ok(line)
}

/// The run as `nfrun/1` text.
pub fn write_run(x: &ConstructedReal) -> Result<String> {
    let mut out = header(x);
    out.push('\n');
    for r in &x.stages {
        out.push_str(&record(r)?);
        out.push('\n');
    }
    Ok(out)
}

fn perr(msg: impl Into<String>) -> Error {
    Error::Parse(msg.into())
}

fn num<T: FromStr>(key: &str, v: &str) -> Result<T>
where
    T::Err: std::fmt::Display,
{
    v.parse().map_err(|e| perr(format!("{}='{}': {}", key, v, e)))
}

fn rational(key: &str, v: &str) -> Result<BigRational> {
    let (p, q) = v.split_once('/').unwrap_or((v, "1"));
    let p: BigInt = num(key, p)?;
    let q: BigInt = num(key, q)?;
    if q.is_zero() {
        return Err(perr(format!("{}='{}' has a zero denominator", key, v)));
    }
    Ok(BigRational::new(p, q))
}

fn base_list(key: &str, v: &str) -> Result<Vec<Base>> {
    if v == "-" {
        return Ok(Vec::new());
    }
    v.split(',').map(|t| num::<u64>(key, t).and_then(Base::new)).collect()
}

struct Fields<'a> {
    pairs: Vec<(&'a str, &'a str)>,
}

impl<'a> Fields<'a> {
    fn new(tokens: &[&'a str]) -> Result<Self> {
        let pairs = tokens
            .iter()
            .map(|t| t.split_once('=').ok_or_else(|| perr(format!("expected key=value, got '{}'", t))))
            .collect::<Result<Vec<_>>>()?;
        Ok(Self { pairs })
    }

    fn opt(&self, key: &str) -> Option<&'a str> {
        self.pairs.iter().find(|(k, _)| *k == key).map(|(_, v)| *v)
    }

    fn get(&self, key: &str) -> Result<&'a str> {
        self.opt(key).ok_or_else(|| perr(format!("missing field '{}'", key)))
    }

    fn num<T: FromStr>(&self, key: &str) -> Result<T>
    where
        T::Err: std::fmt::Display,
    {
        num(key, self.get(key)?)
    }
}

fn parse_header(line: &str) -> Result<(RunKind, Schedule)> {
    let tokens: Vec<&str> = line.split(' ').collect();
    if tokens.first() != Some(&RUN_HEADER) {
        return Err(perr(format!("expected header '{}'", RUN_HEADER)));
    }
    let f = Fields::new(&tokens[1..])?;
    let kind = match f.get("kind")? {
        "thm2" => RunKind::Thm2 { oracle: f.get("oracle")?.to_string(), enumeration: Enumeration::parse(f.get("enum")?)? },
        "thm4" => RunKind::Thm4 { s: Base::new(f.num("s")?)?, g: GSchedule::parse(f.get("g")?)? },
        "thm5" => RunKind::Thm5 { rs: base_list("R", f.get("R")?)?, ss: Enumeration::parse(f.get("S")?)? },
        k => return Err(perr(format!("unknown run kind '{}'", k))),
    };
    let mode = match f.get("mode")? {
        "faithful" => Mode::Faithful,
        "desk" => Mode::Desk(Caps {
            ell: f.num("cap_ell")?,
            k: f.num("cap_k")?,
            n: f.num("cap_n")?,
            t: f.num("cap_t")?,
            candidates: f.num("candidates")?,
        }),
        m => return Err(perr(format!("unknown mode '{}'", m))),
    };
    let mut schmidt = SchmidtConfig::new(rational("c", f.get("c")?)?)?;
    for (k, v) in &f.pairs {
        if *k == "c_override" {
            let parts: Vec<&str> = v.splitn(3, ',').collect();
            if parts.len() != 3 {
                return Err(perr(format!("c_override='{}' needs r,s,c", v)));
            }
            schmidt = schmidt.with_override(num(k, parts[0])?, num(k, parts[1])?, rational(k, parts[2])?)?;
        }
    }
    let sched = Schedule { mode, schmidt, seed: f.num("seed")?, budget: f.num("budget")? };
    sched.validate()?;
    Ok((kind, sched))
}

fn parse_record(line: &str) -> Result<StageRecord> {
    let (head, block) = line.split_once(" block:").ok_or_else(|| perr("record without block"))?;
    let tokens: Vec<&str> = head.split(' ').collect();
    let f = Fields::new(&tokens)?;
    let s = Base::new(f.num("s")?)?;
    let k: u32 = f.num("k")?;
    let len: usize = f.num("len")?;
    let lo = rational("lo", f.get("lo")?)?;
    let hi = rational("hi", f.get("hi")?)?;
    let radix = s.pow(k)?;
    let scale = BigInt::from(radix.big_pow(len as u64));
    let n = &lo * BigRational::from_integer(scale.clone());
    if !n.is_integer() {
        return Err(perr(format!("lo={} is not a cell endpoint at depth {}", lo, len)));
    }
    let n: BigUint = n.to_integer().to_biguint().ok_or_else(|| perr("negative endpoint"))?;
    if hi != &lo + BigRational::new(1.into(), scale) {
        return Err(perr(format!("hi={} does not close the cell of lo={}", hi, lo)));
    }
    let digits = to_digits(&n, radix.value(), len);
    let block: Vec<u64> = block.split_whitespace().map(|t| num("block", t)).collect::<Result<_>>()?;
    let extension = match f.get("ext")? {
        "-" => {
            if !block.is_empty() {
                return Err(perr("block digits without an extension"));
            }
            None
        }
        e => {
            let p: Vec<&str> = e.split(':').collect();
            if p.len() != 3 {
                return Err(perr(format!("ext='{}' needs radix:start:alphabet", e)));
            }
            Some(Extension {
                radix: Base::new(num("ext", p[0])?)?,
                start: num("ext", p[1])?,
                alphabet: num("ext", p[2])?,
                digits: block,
            })
        }
    };
    let capped = match f.get("capped")? {
        "-" => Vec::new(),
        v => v
            .split(';')
            .map(|c| {
                let p: Vec<&str> = c.split(':').collect();
                if p.len() != 3 {
                    return Err(perr(format!("capped entry '{}' needs what:used:log2", c)));
                }
                Ok(Capped { what: p[0].into(), used: num("capped", p[1])?, faithful_log2: num("capped", p[2])? })
            })
            .collect::<Result<_>>()?,
    };
    let state = StageState {
        stage: f.num("stage")?,
        s,
        k,
        digits,
        b: f.num("b")?,
        eps: rational("eps", f.get("eps")?)?,
        ell: f.num("l")?,
        x: f.num("x")?,
        rs: base_list("R", f.get("R")?)?,
        c: f.num("c")?,
        kbar: f.num("kbar")?,
    };
    Ok(StageRecord {
        state,
        clause: Clause::from_str(f.get("clause")?)?,
        a: f.num("a")?,
        extension,
        evaluated: f.num("evaluated")?,
        passing: f.num("passing")?,
        capped,
    })
}

/// Parse `nfrun/1` text.
pub fn parse_run(text: &str) -> Result<ConstructedReal> {
    let mut lines = text.lines().filter(|l| !l.trim().is_empty());
    let (kind, schedule) = parse_header(lines.next().ok_or_else(|| perr("empty run file"))?)?;
    let stages = lines.map(parse_record).collect::<Result<Vec<_>>>()?;
    if stages.is_empty() {
        return Err(perr("run file has no stages"));
    }
    for (i, r) in stages.iter().enumerate() {
        if r.state.stage != i as u64 {
            return Err(perr(format!("record {} has stage index {}", i, r.state.stage)));
        }
    }
    Ok(ConstructedReal { kind, schedule, stages })
}

/// Write `contents` to `path` through a temporary file and a rename.
fn atomic_write(path: &Path, contents: &[u8]) -> Result<()> {
    let io = |e: std::io::Error| Error::InvalidInput(format!("{}: {}", path.display(), e));
    let mut tmp = path.as_os_str().to_owned();
    tmp.push(".tmp");
    let tmp = std::path::PathBuf::from(tmp);
    let mut f = fs::File::create(&tmp).map_err(io)?;
    f.write_all(contents).map_err(io)?;
    f.sync_all().map_err(io)?;
    drop(f);
    fs::rename(&tmp, path).map_err(io)
}

pub fn save_run(x: &ConstructedReal, path: &Path) -> Result<()> {
    atomic_write(path, write_run(x)?.as_bytes())
}

pub fn load_run(path: &Path) -> Result<ConstructedReal> {
    let text = fs::read_to_string(path).map_err(|e| Error::InvalidInput(format!("{}: {}", path.display(), e)))?;
    parse_run(&text)
}

/// The digits as `nfdig/1` text.
pub fn write_digits(d: &DigitBlock) -> String {
    let mut out = format!("{} base={}\n", DIGIT_HEADER, d.base());
    for chunk in d.digits().chunks(PER_LINE) {
        out.push_str(&chunk.iter().map(|v| v.to_string()).collect::<Vec<_>>().join(" "));
        out.push('\n');
    }
    out
}

/// Parse `nfdig/1` text from a reader.
pub fn parse_digits(r: impl BufRead) -> Result<DigitBlock> {
    let mut lines = r.lines();
    let io = |e: std::io::Error| Error::InvalidInput(e.to_string());
    let head = lines.next().ok_or_else(|| perr("empty digit file"))?.map_err(io)?;
    let base = head
        .trim_end()
        .strip_prefix(DIGIT_HEADER)
        .and_then(|r| r.trim().strip_prefix("base="))
        .ok_or_else(|| perr(format!("expected header '{} base=<b>'", DIGIT_HEADER)))?;
    let base = Base::new(num("base", base)?)?;
    let mut out = DigitBlock::empty(base);
    for line in lines {
        for t in line.map_err(io)?.split_whitespace() {
            out.push(num("digit", t)?)?;
        }
    }
    Ok(out)
}

pub fn save_digits(d: &DigitBlock, path: &Path) -> Result<()> {
    atomic_write(path, write_digits(d).as_bytes())
}
