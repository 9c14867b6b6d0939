use std::fs;
use std::io::Write;
use std::path::Path;
use std::process::{Command, Output, Stdio};

fn nf(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_nf")).args(args).output().expect("run nf")
}

fn nf_stdin(args: &[&str], input: &str) -> Output {
    let mut child = Command::new(env!("CARGO_BIN_EXE_nf"))
        .args(args)
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .stderr(Stdio::piped())
        .spawn()
        .expect("spawn nf");
    child.stdin.take().unwrap().write_all(input.as_bytes()).unwrap();
    child.wait_with_output().unwrap()
}

fn text(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exit code")
}

fn path(dir: &Path, name: &str) -> String {
    dir.join(name).to_string_lossy().into_owned()
}

fn csv_rows(s: &str) -> Vec<Vec<String>> {
    s.lines().skip(1).map(|l| l.split(',').map(String::from).collect()).collect()
}

#[test]
fn bounds_reports() {
    let o = nf(&["bounds", "leveque", "--eps", "1"]);
    assert_eq!(code(&o), 0);
    let t = text(&o);
    assert!(t.contains("T: {1..2}"));
    assert!(t.contains("~ 0.2056"));

    let o = nf(&["bounds", "padding", "--s0", "3", "--s1", "2"]);
    assert_eq!(text(&o).trim(), "p(3, 2): 8");

    let o = nf(&["bounds", "ell", "--R", "2", "--s", "3", "--k", "1", "--eps", "1/2", "--c", "1/100"]);
    assert_eq!(code(&o), 0);
    let t = text(&o);
    assert!(t.starts_with("report only"));
    let l = t.lines().find_map(|l| l.strip_prefix("l: ")).unwrap();
    assert!(l.len() > 100 && l.bytes().all(|b| b.is_ascii_digit()), "{}", l);

    let o = nf(&["bounds", "padding", "--s0", "1", "--s1", "2"]);
    assert_eq!(code(&o), 2);
}

#[test]
fn construct_thm5_writes_identical_runs() {
    let dir = tempfile::tempdir().unwrap();
    let (a, b) = (path(dir.path(), "a.nfr"), path(dir.path(), "b.nfr"));
    let d3 = path(dir.path(), "x3.nfdig");
    let args = |out: &str| {
        vec!["construct", "thm5", "--R", "2", "--S", "3", "--stages", "30", "--mode", "desk", "--cap-ell", "64", "--seed", "7", "--out"]
            .into_iter()
            .map(String::from)
            .chain([out.to_string()])
            .collect::<Vec<_>>()
    };
    let mut first = args(&a);
    first.extend(["--render".into(), format!("3={}", d3)]);
    let o = nf(&first.iter().map(|s| s.as_str()).collect::<Vec<_>>());
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let report = text(&o);
    assert!(report.contains("stages: 30"));
    assert!(report.contains("capped: ell"));
    let o = nf(&args(&b).iter().map(|s| s.as_str()).collect::<Vec<_>>());
    assert_eq!(code(&o), 0);
    let (ra, rb) = (fs::read(&a).unwrap(), fs::read(&b).unwrap());
    assert_eq!(ra, rb);
    assert!(ra.starts_with(b"nfrun/1 kind=thm5 R=2 S=list:3 mode=desk cap_ell=64"));
    let digits = fs::read_to_string(&d3).unwrap();
    assert!(digits.starts_with("nfdig/1 base=3\n"));
    // denial digits avoid 2 after the first stage
    assert!(digits.lines().skip(2).all(|l| !l.split(' ').any(|d| d == "2")));
}

#[test]
fn construct_thm4_f_trace() {
    let dir = tempfile::tempdir().unwrap();
    let f = path(dir.path(), "f.csv");
    let out = path(dir.path(), "r.nfr");
    let o = nf(&["construct", "thm4", "--s", "3", "--g", "log2", "--stages", "20", "--out", &out, "--f-csv", &f]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    assert!(text(&o).contains("certificates: 20 of 20"));
    let csv = fs::read_to_string(&f).unwrap();
    assert!(csv.starts_with("N,f,m0\n"));
    let f: Vec<f64> = csv_rows(&csv).iter().map(|r| r[1].parse().unwrap()).collect();
    assert_eq!(f.len(), 21);
    assert!(f.windows(2).all(|w| w[1] <= w[0]));
}

#[test]
fn resume_matches_straight_run() {
    let dir = tempfile::tempdir().unwrap();
    let (a, b, c) = (path(dir.path(), "a"), path(dir.path(), "b"), path(dir.path(), "c"));
    let base = ["construct", "thm2", "--oracle", "set:2", "--cap-ell", "48", "--seed", "5"];
    let run = |extra: &[&str]| {
        let mut v: Vec<&str> = base.to_vec();
        v.extend_from_slice(extra);
        assert_eq!(code(&nf(&v)), 0);
    };
    run(&["--stages", "4", "--out", &a]);
    run(&["--stages", "3", "--resume", &a, "--out", &b]);
    run(&["--stages", "7", "--out", &c]);
    assert_eq!(fs::read(&b).unwrap(), fs::read(&c).unwrap());
    // the oracle must match the stored run
    let o = nf(&["construct", "thm2", "--oracle", "true", "--stages", "1", "--resume", &a, "--out", &c]);
    assert_eq!(code(&o), 2);
    let o = nf(&["construct", "thm4", "--stages", "1", "--resume", &a, "--out", &c]);
    assert_eq!(code(&o), 2);
}

#[test]
fn config_defaults_yield_to_flags() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = path(dir.path(), "nf.conf");
    fs::write(&cfg, "# defaults\nseed = 9\ncap-ell = 40\nstages = 2\n").unwrap();
    let o = nf(&["--config", &cfg, "construct", "thm5", "--R", "2", "--S", "3", "--out", "-"]);
    assert_eq!(code(&o), 0);
    let head = text(&o).lines().next().unwrap().to_string();
    assert!(head.contains("cap_ell=40") && head.contains("seed=9"), "{}", head);
    assert_eq!(text(&o).lines().count(), 4);
    let o = nf(&["--config", &cfg, "construct", "thm5", "--R", "2", "--S", "3", "--seed", "1", "--out", "-"]);
    assert!(text(&o).lines().next().unwrap().contains("seed=1"));
    fs::write(&cfg, "colour = red\n").unwrap();
    let o = nf(&["--config", &cfg, "bounds", "padding", "--s0", "3", "--s1", "2"]);
    assert_eq!(code(&o), 2);
}

#[test]
fn analyze_all_zeros() {
    let digits = format!("nfdig/1 base=2\n{}\n", vec!["0"; 300].join(" "));
    let o = nf_stdin(&["analyze", "-", "--bases", "2"], &digits);
    assert_eq!(code(&o), 0);
    let t = text(&o);
    assert_eq!(t.lines().next().unwrap(), "N,base,star,extreme,simple,block_C,block_ell");
    let rows = csv_rows(&t);
    let ns: Vec<&str> = rows.iter().map(|r| r[0].as_str()).collect();
    assert_eq!(ns, ["64", "128", "256", "300"]);
    for r in &rows {
        assert_eq!(r[4], "0.5");
        assert_eq!(r[2], "1");
    }
}

#[test]
fn analyze_champernowne() {
    let s: String = (1..5000).map(|i| i.to_string()).collect::<String>()[..10_000].to_string();
    let body: Vec<String> = s.chars().map(|c| c.to_string()).collect();
    let input = format!("nfdig/1 base=10\n{}\n", body.join(" "));
    let o = nf_stdin(&["analyze", "--bases", "10", "--exact-cap", "5000"], &input);
    assert_eq!(code(&o), 0);
    let rows = csv_rows(&text(&o));
    assert_eq!(rows.first().unwrap()[0], "64");
    assert_eq!(rows.last().unwrap()[0], "10000");
    let star: Vec<f64> = rows.iter().map(|r| r[2].parse().unwrap()).collect();
    assert!(star.last().unwrap() < star.first().unwrap());
    // extreme discrepancy only up to the exact cap, never rendered as zero
    for r in &rows {
        let n: u64 = r[0].parse().unwrap();
        assert_eq!(r[3].is_empty(), n > 5000);
    }
}

#[test]
fn analyze_run_per_stage_exact() {
    let dir = tempfile::tempdir().unwrap();
    let run = path(dir.path(), "r.nfr");
    assert_eq!(code(&nf(&["construct", "thm5", "--R", "2", "--S", "3", "--stages", "4", "--out", &run])), 0);
    let o = nf(&["analyze", &run, "--bases", "3", "--per-stage", "--exact", "--block-ell", "0"]);
    assert_eq!(code(&o), 0);
    let rows = csv_rows(&text(&o));
    assert!(!rows.is_empty());
    for r in &rows {
        assert!(r[2].contains('/') || r[2] == "0" || r[2] == "1");
        assert!(r[5].is_empty() && r[6].is_empty());
    }
    let o = nf_stdin(&["analyze", "--per-stage"], "nfdig/1 base=2\n0 1\n");
    assert_eq!(code(&o), 2);
    let o = nf_stdin(&["analyze"], "nfdig/1 base=2\n0 1 2\n");
    assert_eq!(code(&o), 2);
}

#[test]
fn render_from_run() {
    let dir = tempfile::tempdir().unwrap();
    let run = path(dir.path(), "r.nfr");
    assert_eq!(code(&nf(&["construct", "thm5", "--R", "2", "--S", "3", "--stages", "3", "--out", &run])), 0);
    let o = nf(&["render", &run, "--base", "10", "--digits", "20"]);
    assert_eq!(code(&o), 0);
    let t = text(&o);
    assert!(t.starts_with("nfdig/1 base=10\n"));
    assert_eq!(t.lines().nth(1).unwrap().split(' ').count(), 20);
}

#[test]
fn exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let out = path(dir.path(), "x.nfr");
    // dependent bases
    let o = nf(&["construct", "thm5", "--R", "2", "--S", "4", "--out", &out]);
    assert_eq!(code(&o), 2);
    assert!(!Path::new(&out).exists());
    // no candidate passes the checks
    let o = nf(&["construct", "thm5", "--R", "3", "--S", "2", "--cap-ell", "4", "--candidates", "1", "--out", &out]);
    assert_eq!(code(&o), 3);
    assert!(String::from_utf8_lossy(&o.stderr).contains("stage 1"));
    assert!(!Path::new(&out).exists());
    // faithful bounds exceed the execution budget
    let o = nf(&["construct", "thm4", "--mode", "faithful", "--stages", "1", "--out", &out]);
    assert_eq!(code(&o), 4);
    assert!(!Path::new(&out).exists());
    let o = nf(&["construct", "thm4", "--mode", "lazy", "--out", &out]);
    assert_eq!(code(&o), 2);
    let o = nf(&["verify", "no-such-suite"]);
    assert_eq!(code(&o), 2);
}

#[test]
fn verify_suites() {
    let o = nf(&["verify", "discrepancy-oracle", "--n", "300"]);
    assert_eq!(code(&o), 0);
    assert!(text(&o).contains("pass"));
    let o = nf(&["verify", "partition", "--n", "2000", "--eps", "1/5"]);
    assert_eq!(code(&o), 0);
    let o = nf(&["verify", "leveque", "--n", "200"]);
    assert_eq!(code(&o), 0);
    let o = nf(&["verify", "block", "--n", "5000"]);
    assert_eq!(code(&o), 0);
    let o = nf(&["verify", "lemma317", "--R", "2", "--s", "3", "--ell", "16", "--exhaustive"]);
    assert_eq!(code(&o), 0);
    assert!(!text(&o).contains("sampled"));
    let o = nf(&["verify", "base-change", "--n", "300"]);
    assert_eq!(code(&o), 0);
}

#[test]
fn base4_defect_trend_reports_its_counterexample() {
    let o = nf(&["verify", "lemma313", "--N", "14"]);
    let t = text(&o);
    assert!(t.contains("N=2 count=3 fraction=3/4"));
    assert!(t.contains("nondecreasing within each class of N mod 4: yes"));
    // 247/256 at N = 8 exceeds 121/128 at N = 10
    assert_eq!(code(&o), 1);
    assert!(String::from_utf8_lossy(&o.stderr).contains("N=10"));
}
