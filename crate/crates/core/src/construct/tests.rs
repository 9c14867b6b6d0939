use num_rational::BigRational;
use num_traits::{One, Zero};

use super::*;
use crate::numerics::window_index;

fn b(v: u64) -> Base {
    Base::new(v).unwrap()
}

fn q(n: i64, d: i64) -> BigRational {
    BigRational::new(n.into(), d.into())
}

fn small() -> Schedule {
    Schedule::desk(Caps { ell: 48, k: 2, n: 16, t: 2, candidates: 64 }).with_seed(3)
}

/// Every stage's cell lies inside the previous one and has the recorded depth.
fn assert_nested(x: &ConstructedReal) {
    for w in x.stages.windows(2) {
        let (p, c) = (w[0].state.interval().unwrap(), w[1].state.interval().unwrap());
        assert!(p.lower() <= c.lower() && c.upper() <= p.upper(), "stage {} leaves its parent", w[1].state.stage);
        assert!(c.length() < p.length() || w[1].state.b == w[0].state.b);
        assert!(w[1].state.b > w[0].state.b);
    }
}

#[test]
fn render_examples() {
    let r = render_interval(&q(3, 8), &q(1, 2), b(2), 3).unwrap();
    assert_eq!(r.digits.digits(), &[0, 1, 1]);
    assert_eq!(r.undetermined, 0);
    let r = render_interval(&BigRational::zero(), &q(1, 9), b(3), 2).unwrap();
    assert_eq!(r.digits.digits(), &[0, 0]);
    // 0.25 and 0.4999.. already differ in the first decimal
    let r = render_interval(&q(1, 4), &q(1, 2), b(10), 2).unwrap();
    assert!(r.digits.is_empty());
    assert_eq!(r.undetermined, 2);
    assert!(render_interval(&q(1, 2), &q(1, 4), b(10), 2).is_err());
}

#[test]
fn clause_names_round_trip() {
    for c in [
        Clause::Init,
        Clause::Hold,
        Clause::Wait,
        Clause::Advance,
        Clause::Step { grow: false, refine: false },
        Clause::Step { grow: true, refine: false },
        Clause::Step { grow: false, refine: true },
        Clause::Step { grow: true, refine: true },
    ] {
        assert_eq!(c.to_string().parse::<Clause>().unwrap(), c);
    }
    assert!("step+jump".parse::<Clause>().is_err());
}

#[test]
fn g_schedules_decrease() {
    for g in [GSchedule::Log2, GSchedule::Harmonic] {
        for n in 0..200 {
            assert!(g.value(n + 1) <= g.value(n));
        }
        assert_eq!(GSchedule::parse(g.name()).unwrap(), g);
    }
    assert_eq!(GSchedule::Log2.value(510), q(1, 18));
    assert_eq!(GSchedule::Log2.value(511), q(1, 20));
}

#[test]
fn x_search_follows_the_formula() {
    let t = PredicateOracle::always_true();
    let f = PredicateOracle::always_false();
    // no z below c refutes a true formula
    assert_eq!(thm2::x_search(&t, b(3), 2, 5).unwrap(), 5);
    // y = n and z = n settle x at 1
    assert_eq!(thm2::x_search(&f, b(3), 2, 5).unwrap(), 1);
    assert_eq!(thm2::x_search(&f, b(3), 0, 1).unwrap(), 1);
}

#[test]
fn schedule_validation() {
    assert!(Schedule::desk(Caps { t: 1, ..Caps::default() }).validate().is_err());
    assert!(Schedule::desk(Caps { ell: 0, ..Caps::default() }).validate().is_err());
    assert!(Schedule::faithful(0).validate().is_err());
    assert!(Schedule::desk(Caps::default()).validate().is_ok());
}

#[test]
fn thm2_desk_run() {
    let oracle = PredicateOracle::always_true();
    let x = thm2::run(&oracle, Enumeration::minimal(), 8, small()).unwrap();
    assert_eq!(x.stage_count(), 8);
    assert_nested(&x);
    for rec in &x.stages[1..] {
        let st = &rec.state;
        assert_eq!(st.digits.len() as u64, window_index(st.b, st.radix().unwrap()).unwrap());
        let e = rec.extension.as_ref().unwrap();
        assert!(e.digits.iter().all(|&d| d < e.alphabet));
        assert!(rec.passing >= 1 && rec.passing <= rec.evaluated);
        assert!(rec.capped.iter().any(|c| c.what == "ell"));
    }
    assert!(x.stages.iter().any(|r| r.clause == Clause::Advance));
    // the oracle must match on resume
    let mut y = x.clone();
    assert!(thm2::extend(&mut y, &PredicateOracle::always_false(), 1).is_err());
}

#[test]
fn thm2_resume_matches_straight_run() {
    let oracle = PredicateOracle::always_false();
    let full = thm2::run(&oracle, Enumeration::minimal(), 6, small()).unwrap();
    let mut part = thm2::run(&oracle, Enumeration::minimal(), 3, small()).unwrap();
    let text = write_run(&part).unwrap();
    part = parse_run(&text).unwrap();
    thm2::extend(&mut part, &oracle, 3).unwrap();
    assert_eq!(write_run(&part).unwrap(), write_run(&full).unwrap());
    // a false formula keeps the tolerance at 1/x = 1
    for rec in &full.stages {
        assert_eq!(rec.state.x, 1);
    }
}

#[test]
fn thm4_desk_run() {
    let x = thm4::run(b(3), GSchedule::Log2, 10, small()).unwrap();
    assert_nested(&x);
    let f = thm4::f_trace(&x).unwrap();
    assert_eq!(f.len(), x.stages.len());
    for w in f.windows(2) {
        assert!(w[1].value <= w[0].value);
        assert!(w[1].n > w[0].n);
    }
    let last = f.last().unwrap();
    assert_eq!(last.value, x.stages[last.m0 as usize].state.eps.clone() * BigRational::from_integer(4.into()));
    // extension digits omit s^k - 1
    for rec in &x.stages[1..] {
        let e = rec.extension.as_ref().unwrap();
        assert_eq!(e.alphabet, e.radix.value() - 1);
        assert!(e.digits.iter().all(|&d| d < e.alphabet));
    }
    let certs = thm4::certificates(&x).unwrap();
    assert_eq!(certs.len(), 10);
    for c in &certs {
        assert_eq!(c.target, GSchedule::Log2.value(c.n));
    }
}

#[test]
fn thm4_even_base_uses_two_digit_alphabet() {
    let x = thm4::run(b(2), GSchedule::Harmonic, 3, small()).unwrap();
    assert_nested(&x);
    for rec in &x.stages[1..] {
        let e = rec.extension.as_ref().unwrap();
        assert!(e.radix.value() >= 4);
        assert_eq!(e.alphabet, e.radix.value() - 2);
    }
}

#[test]
fn thm5_without_r_omits_top_digit() {
    let ss = Enumeration::finite(vec![b(3)]).unwrap();
    let x = thm5::run(Vec::new(), Some(ss), 6, small()).unwrap();
    assert_nested(&x);
    for rec in &x.stages[1..] {
        let e = rec.extension.as_ref().unwrap();
        assert_eq!(e.alphabet, 2);
        assert!(e.digits.iter().all(|&d| d <= 1));
    }
    for c in thm5::certificates(&x).unwrap() {
        if c.n >= 6 {
            assert_eq!(c.avoidance, Some(q(1, 6)));
            assert!(c.holds());
        }
    }
}

#[test]
fn thm5_base_two_runs_through_base_four() {
    let ss = Enumeration::finite(vec![b(2)]).unwrap();
    let x = thm5::run(vec![b(3)], Some(ss), 4, small()).unwrap();
    assert_nested(&x);
    assert_eq!(x.stages[0].state.s, b(4));
    for rec in &x.stages[1..] {
        let e = rec.extension.as_ref().unwrap();
        assert_eq!(e.radix, b(4));
        let zeros: usize = e.digits.iter().filter(|&&d| d == 0).count();
        let len = e.digits.len();
        // bits 00 and 01: zero bits exceed half by the number of 0 digits
        assert!(4 * zeros > len);
    }
}

#[test]
fn thm5_rejects_overlap() {
    let ss = Enumeration::finite(vec![b(4)]).unwrap();
    assert!(matches!(thm5::start(vec![b(2)], Some(ss), small()), Err(Error::DependentBases(2, 4))));
    assert!(thm5::start(vec![b(4)], None, small()).is_err());
}

#[test]
fn run_files_round_trip() {
    let x = thm5::run(vec![b(2)], Some(Enumeration::finite(vec![b(3)]).unwrap()), 3, small()).unwrap();
    let text = write_run(&x).unwrap();
    assert!(text.starts_with("nfrun/1 kind=thm5 R=2 S=list:3 mode=desk"));
    assert!(!text.contains('\r'));
    let back = parse_run(&text).unwrap();
    assert_eq!(back, x);
    assert_eq!(write_run(&back).unwrap(), text);

    let y = thm4::run(b(3), GSchedule::Log2, 2, Schedule::faithful(1 << 10)).err();
    // faithful bounds overflow the budget at once
    assert!(matches!(y, Some(Error::BudgetExceeded { .. })));

    let dir = std::env::temp_dir().join(format!("nf-run-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("run.nfr");
    save_run(&x, &path).unwrap();
    assert_eq!(load_run(&path).unwrap(), x);
    std::fs::remove_dir_all(&dir).unwrap();
}

#[test]
fn malformed_run_files_are_rejected() {
    let x = thm5::run(vec![b(2)], Some(Enumeration::finite(vec![b(3)]).unwrap()), 1, small()).unwrap();
    let text = write_run(&x).unwrap();
    assert!(parse_run("").is_err());
    assert!(parse_run(&text.replacen("nfrun/1", "nfrun/2", 1)).is_err());
    assert!(parse_run(&text.replacen("stage=1", "stage=5", 1)).is_err());
    assert!(parse_run(&text.replacen("mode=desk", "mode=lazy", 1)).is_err());
    let header = text.lines().next().unwrap();
    assert!(parse_run(header).is_err());
}

#[test]
fn digit_files_round_trip() {
    let d = DigitBlock::new(b(3), (0..150).map(|i| i % 3).collect()).unwrap();
    let text = write_digits(&d);
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "nfdig/1 base=3");
    assert_eq!(lines.len(), 4);
    assert_eq!(lines[1].split(' ').count(), 64);
    assert_eq!(parse_digits(text.as_bytes()).unwrap(), d);
    assert!(parse_digits("nfdig/1 base=2\n0 1 2\n".as_bytes()).is_err());
    assert!(parse_digits("digits base=2\n0\n".as_bytes()).is_err());
}

#[test]
fn render_run_digits() {
    let x = thm5::run(Vec::new(), Some(Enumeration::finite(vec![b(3)]).unwrap()), 2, small()).unwrap();
    let st = x.current();
    let r = render_digits(&x, b(3), st.digits.len() as u64).unwrap();
    assert_eq!(r.undetermined, 0);
    assert_eq!(r.digits.digits(), st.digits.as_slice());
    let r = render_digits(&x, b(2), 10).unwrap();
    assert_eq!(r.digits.len() as u64 + r.undetermined, 10);
}

#[test]
fn certificate_picks_larger_bound() {
    let c = Certificate {
        stage: 1,
        n: 12,
        base: b(3),
        avoidance: Some(q(1, 6)),
        simple: q(1, 12),
        target: q(1, 6),
    };
    assert_eq!(c.bound(), q(1, 6));
    assert!(c.holds());
    let d = Certificate { avoidance: None, ..c };
    assert!(!d.holds());
    assert!(BigRational::one() > d.bound());
}
