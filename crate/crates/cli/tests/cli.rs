use std::fs;
use std::io::Write;
use std::path::Path;
use std::process::{Command, Output, Stdio};

use antloop::corpus::read_corpus;
use antloop::corpus::curated::{HALF, MOTIVATING, MOTIVATING_LOCUS};
use antloop::loopfront::parse_locus;
use antloop::semilinear::default_names;
use antloop::semilinear::set_equivalent;

fn antloop(args: &[&str], stdin: Option<&str>) -> Output {
    let mut child = Command::new(env!("CARGO_BIN_EXE_antloop"))
        .args(args)
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .stderr(Stdio::piped())
        .spawn()
        .expect("binary runs");
    {
        let mut pipe = child.stdin.take().unwrap();
        if let Some(s) = stdin {
            pipe.write_all(s.as_bytes()).unwrap();
        }
    }
    child.wait_with_output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8(o.stderr.clone()).unwrap()
}

fn locus_line(text: &str) -> &str {
    text.lines().find_map(|l| l.strip_prefix("Locus of ANT: ")).expect("locus line")
}

#[test]
fn motivating_example_is_nonterminating_over_the_rationals() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("ex1.loop");
    fs::write(&path, MOTIVATING).unwrap();
    let o = antloop(&["analyze", path.to_str().unwrap(), "--domain", "rational"], None);
    assert_eq!(o.status.code(), Some(1), "{}", stderr(&o));
    let names = default_names("u", 3);
    let got = parse_locus(locus_line(&stdout(&o)), &names).unwrap();
    let want = parse_locus(MOTIVATING_LOCUS, &names).unwrap();
    assert!(set_equivalent(&got, &want).unwrap());
}

#[test]
fn trivially_terminating_loop_exits_zero_with_empty_locus() {
    let o = antloop(&["analyze", "-"], Some("while (x > 0) { x := -x; }"));
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(locus_line(&stdout(&o)), "empty");
}

#[test]
fn irrational_spectrum_exits_65_with_the_factor() {
    let o = antloop(&["analyze", "--json", "-"], Some(r#"{"A":[["0","2"],["1","0"]],"F":[["1","0"]]}"#));
    assert_eq!(o.status.code(), Some(65));
    assert!(stderr(&o).contains("T^2 - 2"), "{}", stderr(&o));
}

#[test]
fn input_errors_exit_64() {
    let o = antloop(&["analyze", "-"], Some("while (x >= 0) { x := x; }"));
    assert_eq!(o.status.code(), Some(64));
    assert!(stderr(&o).contains("strict"));
    let o = antloop(&["analyze", "/nonexistent/loop.txt"], None);
    assert_eq!(o.status.code(), Some(64));
    let o = antloop(&["analyze", "--json", "-"], Some("{\"A\": 3}"));
    assert_eq!(o.status.code(), Some(64));
}

#[test]
fn domains_select_the_exit_code() {
    let code = |d: &str| antloop(&["analyze", "-", "--domain", d], Some(HALF)).status.code();
    assert_eq!(code("real"), Some(1));
    assert_eq!(code("rational"), Some(1));
    assert_eq!(code("integer"), Some(0));
}

#[test]
fn json_reports_are_byte_identical() {
    let run = || antloop(&["analyze", "-", "--format", "json", "--trace"], Some(MOTIVATING));
    let (a, b) = (run(), run());
    assert_eq!(a.stdout, b.stdout);
    let v: serde_json::Value = serde_json::from_slice(&a.stdout).unwrap();
    assert_eq!(v["verdict"], "NonTerminating");
    assert_eq!(v["domain"], "rational");
    assert!(v.get("trace").is_some());
    let plain: serde_json::Value =
        serde_json::from_slice(&antloop(&["analyze", "-", "--format", "json"], Some(MOTIVATING)).stdout).unwrap();
    assert!(plain.get("trace").is_none());
}

#[test]
fn smt2_export_declares_parameters() {
    let o = antloop(&["analyze", "-", "--format", "smt2"], Some(MOTIVATING));
    let s = stdout(&o);
    assert!(s.starts_with("(set-logic QF_LRA)"));
    assert!(s.contains("(declare-fun u3 () Real)"));
    assert!(s.contains("(check-sat)"));
}

#[test]
fn simulate_reports_violation_or_horizon() {
    let o = antloop(&["simulate", "-", "--point", "-9,3,-2"], Some(MOTIVATING));
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("step 0: x = (-9, 3, -2), guard = (-13/2)"));
    assert!(stdout(&o).contains("guard row 1 fails at step 0"));
    let o = antloop(&["simulate", "-", "--point", "63,3,22", "--horizon", "500"], Some(MOTIVATING));
    assert_eq!(o.status.code(), Some(2));
    assert!(stdout(&o).contains("guard holds for all 500 steps"));
    let o = antloop(&["simulate", "-", "--point", "1,2", "--format", "json"], Some(MOTIVATING));
    assert_eq!(o.status.code(), Some(64));
}

fn dir_bytes(dir: &Path) -> Vec<(String, Vec<u8>)> {
    let mut files: Vec<(String, Vec<u8>)> = fs::read_dir(dir)
        .unwrap()
        .map(|e| e.unwrap())
        .map(|e| (e.file_name().to_string_lossy().into_owned(), fs::read(e.path()).unwrap()))
        .collect();
    files.sort();
    files
}

#[test]
fn generate_is_deterministic_in_the_seed() {
    let tmp = tempfile::tempdir().unwrap();
    let (a, b, c) = (tmp.path().join("a"), tmp.path().join("b"), tmp.path().join("c"));
    for d in [&a, &b] {
        let o = antloop(&["generate", "--out", d.to_str().unwrap(), "--n-min", "3", "--n-max", "4", "--count", "10", "--seed", "42"], None);
        assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    }
    antloop(&["generate", "--out", c.to_str().unwrap(), "--count", "10", "--seed", "43"], None);
    assert_eq!(dir_bytes(&a), dir_bytes(&b));
    assert_ne!(dir_bytes(&a), dir_bytes(&c));
    let corpus = read_corpus(&a).unwrap();
    assert_eq!(corpus.entries.len(), 10);
    assert_eq!(corpus.manifest.seed, Some(42));
}

#[test]
fn generate_handles_empty_and_affine_corpora() {
    let tmp = tempfile::tempdir().unwrap();
    let empty = tmp.path().join("empty");
    antloop(&["generate", "--out", empty.to_str().unwrap(), "--count", "0"], None);
    assert!(read_corpus(&empty).unwrap().entries.is_empty());
    let affine = tmp.path().join("affine");
    antloop(&["generate", "--out", affine.to_str().unwrap(), "--class", "a", "--m-min", "2", "--m-max", "4", "--count", "6"], None);
    for e in read_corpus(&affine).unwrap().entries {
        assert!(e.program.is_affine());
        assert!((2..=4).contains(&e.program.m()));
    }
}

#[test]
fn check_passes_on_the_curated_corpus() {
    let o = antloop(&["check", "--curated"], None);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    assert!(stdout(&o).contains("11 of 11 programs passed"));
}

#[test]
fn check_fails_with_a_diff_on_a_corrupted_fixture() {
    let tmp = tempfile::tempdir().unwrap();
    let dir = tmp.path().join("curated");
    antloop(&["generate", "--curated", "--out", dir.to_str().unwrap()], None);
    let file = dir.join("motivating.json");
    let mut v: serde_json::Value = serde_json::from_str(&fs::read_to_string(&file).unwrap()).unwrap();
    v["expected_locus"] = "[[u1<-u2+3*u3]]OR[[u1==4*u3,u2==-u3,0<u3]]".into();
    fs::write(&file, serde_json::to_string_pretty(&v).unwrap()).unwrap();
    let o = antloop(&["check", dir.to_str().unwrap()], None);
    assert_eq!(o.status.code(), Some(1));
    let out = stdout(&o);
    assert!(out.contains("FAIL motivating"), "{out}");
    assert!(out.contains("expected_locus: computed"), "{out}");
    assert!(out.contains("is not within expected"), "{out}");
    assert!(out.contains("10 of 11 programs passed"), "{out}");
}

#[test]
fn check_runs_on_a_seeded_random_corpus() {
    let tmp = tempfile::tempdir().unwrap();
    let dir = tmp.path().join("rand");
    antloop(&["generate", "--out", dir.to_str().unwrap(), "--class", "h,g,a", "--n-min", "3", "--n-max", "5", "--count", "12"], None);
    let o = antloop(&["check", dir.to_str().unwrap(), "--format", "json"], None);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["summary"]["passed"], 12);
}

#[test]
fn help_documents_every_flag() {
    let top = stdout(&antloop(&["--help"], None));
    for cmd in ["analyze", "simulate", "generate", "check"] {
        assert!(top.contains(cmd));
    }
    let analyze = stdout(&antloop(&["analyze", "--help"], None));
    for flag in ["--domain", "--format", "--int-budget", "--trace", "--json"] {
        assert!(analyze.contains(flag), "{flag}");
    }
    let sim = stdout(&antloop(&["simulate", "--help"], None));
    assert!(sim.contains("--horizon"));
    let check = stdout(&antloop(&["check", "--help"], None));
    for flag in ["--horizon", "--seed", "--int-budget"] {
        assert!(check.contains(flag), "{flag}");
    }
    let gen = stdout(&antloop(&["generate", "--help"], None));
    assert!(gen.contains("--seed"));
}
