use std::path::Path;
use std::process::{Command, Output};

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_hcrecover"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn count_of(o: &Output) -> u64 {
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let text = stdout(o);
    let mut lines = text.lines().filter(|l| !l.starts_with('#'));
    assert_eq!(lines.next().unwrap(), "d,r,kind,class,count,rate,ratio");
    // the class label may be quoted and contain commas, so read from the right
    lines.next().unwrap().rsplit(',').nth(2).unwrap().parse().unwrap()
}

#[test]
fn count_examples() {
    assert_eq!(count_of(&run(&["count", "--d", "2", "--r", "3"])), 9);
    assert_eq!(count_of(&run(&["count", "--d", "1", "--r", "3"])), 5);
    assert_eq!(count_of(&run(&["count", "--r", "4", "--mixed", "1"])), 5);
    assert_eq!(count_of(&run(&["count", "--r", "1", "--sum", "1,1"])), 1);
}

#[test]
fn output_starts_with_metadata() {
    let o = run(&["count", "--d", "2", "--r", "3"]);
    let first = stdout(&o).lines().next().unwrap().to_string();
    let meta: serde_json::Value = serde_json::from_str(first.strip_prefix("# ").unwrap()).unwrap();
    assert_eq!(meta["command"], "count");
    assert!(meta["prng"].as_str().unwrap().contains("ChaCha8"));
    assert_eq!(meta["config"]["d"], 2);
}

#[test]
fn validation_errors_exit_2() {
    let o = run(&["sweep", "--m-grid", "", "--seeds", "0"]);
    assert_eq!(o.status.code(), Some(2));
    let o = run(&["recover", "--epsilon", "1.5"]);
    assert_eq!(o.status.code(), Some(2));
    let o = run(&["count", "--d", "3", "--r", "4", "--mixed", "1,1"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn oversized_index_set_exits_3() {
    let o = run(&["count", "--d", "3", "--r", "1e12"]);
    assert_eq!(o.status.code(), Some(3));
}

#[test]
fn strict_nonconvergence_exits_4() {
    let args = ["recover", "--m-grid", "64", "--seeds", "0", "--max-iters", "1", "--tol", "1e-14"];
    assert_eq!(run(&args).status.code(), Some(0));
    let mut strict = args.to_vec();
    strict.push("--strict");
    assert_eq!(run(&strict).status.code(), Some(4));
}

#[test]
fn recover_report_is_json() {
    let o = run(&["recover", "--m-grid", "128", "--seeds", "3", "--c-prime", "0.1", "--function", "sparse:2"]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let v: serde_json::Value = serde_json::from_str(stdout(&o).trim()).unwrap();
    assert_eq!(v["report"]["plan"]["m"], 128);
    assert_eq!(v["report"]["seed"], 3);
}

fn sweep_args(out: &str) -> Vec<&str> {
    vec![
        "sweep", "--classes", "mixed:1,1;sum:2,2", "--m-grid", "64,128", "--seeds", "0..3", "--max-iters", "300",
        "--out", out,
    ]
}

#[test]
fn sweep_writes_identical_files() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a.csv");
    let b = dir.path().join("b.csv");
    for p in [&a, &b] {
        let o = run(&sweep_args(p.to_str().unwrap()));
        assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
        assert!(o.stdout.is_empty());
    }
    let (ta, tb) = (std::fs::read(&a).unwrap(), std::fs::read(&b).unwrap());
    assert!(!ta.is_empty());
    // only the echoed output path differs
    let strip = |t: &[u8], p: &Path| String::from_utf8(t.to_vec()).unwrap().replace(p.to_str().unwrap(), "OUT");
    assert_eq!(strip(&ta, &a), strip(&tb, &b));
    let text = String::from_utf8(ta).unwrap();
    let rows = text.lines().filter(|l| !l.starts_with('#')).count();
    assert_eq!(rows, 1 + 2 * 2 * 3);
    assert_eq!(text.lines().filter(|l| l.starts_with("# summary")).count(), 2);
}

#[test]
fn flags_override_config_file() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("cfg.json");
    std::fs::write(&cfg, r#"{"d": 2, "r": 3.0, "count_kind": "hc"}"#).unwrap();
    let path = cfg.to_str().unwrap();
    assert_eq!(count_of(&run(&["count", "--config", path])), 9);
    assert_eq!(count_of(&run(&["count", "--config", path, "--d", "1"])), 5);
    std::fs::write(&cfg, r#"{"d": 2, "bogus": 1}"#).unwrap();
    assert_eq!(run(&["count", "--config", path]).status.code(), Some(2));
}

#[test]
fn widths_table() {
    let o = run(&["widths", "--classes", "sum:1", "--m-grid", "1,2,3"]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let text = stdout(&o);
    let body: Vec<&str> = text.lines().filter(|l| !l.starts_with('#')).collect();
    assert_eq!(body[0], "m,lower,upper,rate");
    assert_eq!(body[1], "1,5e-1,5e-1,");
}
