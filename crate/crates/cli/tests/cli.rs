use std::path::Path;
use std::process::{Command, Output};

fn lightpath(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_lightpath")).args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn json(args: &[&str]) -> serde_json::Value {
    let mut all = args.to_vec();
    all.extend(["--format", "json"]);
    let o = lightpath(&all);
    assert!(o.status.success(), "{}", stderr(&o));
    serde_json::from_slice(&o.stdout).unwrap()
}

fn path(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn bench_examples() {
    let plain = json(&["bench", "--method", "plain", "--n", "1048576", "--ops", "100"]);
    assert!(plain["init_write_probes"].as_u64().unwrap() >= 1 << 20);

    let lp = json(&["bench", "--method", "lightpath", "--n", "1048576", "--t", "2", "--ops", "2000"]);
    assert!(lp["redundancy_bits"].as_u64().unwrap() <= 256);
    assert!(lp["init_write_probes"].as_u64().unwrap() <= 28);

    let folk = json(&["bench", "--method", "folklore", "--n", "1048576", "--ops", "100"]);
    assert_eq!(folk["redundancy_bits"].as_u64().unwrap(), 2 * (1 << 20) * 20 + 21);
}

#[test]
fn bench_is_reproducible_and_csv_shaped() {
    let args = ["bench", "--method", "lightpath", "--n", "5000", "--t", "3", "--dist", "zipf", "--seed", "4"];
    let a = lightpath(&args);
    let b = lightpath(&args);
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
    let text = stdout(&a);
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines.len(), 2);
    assert_eq!(lines[0].split(',').count(), lines[1].split(',').count());
    assert!(lines[0].starts_with("method,n,w,"));

    let timed = lightpath(&["bench", "--method", "simple", "--n", "100", "--ops", "50", "--timing"]);
    assert!(stdout(&timed).lines().next().unwrap().contains("write_ns_p99"));
}

#[test]
fn bench_small_words() {
    for w in ["8", "16", "32"] {
        let r = json(&["bench", "--method", "lightpath", "--n", "200", "--w", w, "--ops", "500"]);
        assert_eq!(r["w"].as_u64().unwrap().to_string(), w);
    }
}

#[test]
fn usage_errors_exit_2() {
    for args in [
        vec!["bench", "--method", "nope", "--n", "10"],
        vec!["bench", "--method", "lightpath-core", "--n", "37"],
        vec!["bench", "--method", "packed", "--n", "10", "--b", "65"],
        vec!["bench", "--method", "plain"],
        vec!["bench", "--method", "plain", "--n", "10", "--w", "12"],
        vec!["fuzz", "--method", "lightpath", "--n", "10", "--inject-fault", "skip-case5-move"],
    ] {
        let o = lightpath(&args);
        assert_eq!(o.status.code(), Some(2), "{args:?}: {}", stderr(&o));
    }
}

#[test]
fn fuzz_every_method_passes() {
    let dir = tempfile::tempdir().unwrap();
    let art = dir.path().join("f.jsonl");
    for n in ["1", "37", "300"] {
        let o = lightpath(&["fuzz", "--n", n, "--ops", "400", "--seeds", "1", "--artifact", path(&art)]);
        assert!(o.status.success(), "n={n}: {}{}", stdout(&o), stderr(&o));
        assert!(stdout(&o).contains("lightpath: 12 runs ok"));
    }
    assert!(!art.exists());
}

#[test]
fn fuzz_reports_case_coverage() {
    let o = lightpath(&[
        "fuzz", "--method", "lightpath-core", "--n", "64", "--t", "3", "--dist", "crafted", "--ops", "600", "--seeds", "10",
    ]);
    assert!(o.status.success());
    let text = stdout(&o);
    for k in 1..=5 {
        let key = format!("case{k}=");
        let v: u64 = text.split(&key).nth(1).unwrap().split(|c: char| !c.is_ascii_digit()).next().unwrap().parse().unwrap();
        assert!(v >= 100, "case {k}: {v}");
    }
}

#[test]
fn mutation_is_caught_and_replays() {
    let dir = tempfile::tempdir().unwrap();
    let art = dir.path().join("fail.jsonl");
    let o = lightpath(&[
        "fuzz", "--method", "lightpath-core", "--n", "16", "--t", "4", "--dist", "crafted", "--ops", "3000", "--seeds", "2",
        "--inject-fault", "skip-case5-move", "--artifact", path(&art),
    ]);
    assert_eq!(o.status.code(), Some(1), "{}", stdout(&o));
    let report: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&art).unwrap()).unwrap();
    assert_eq!(report["fault"], "skip-case5-move");

    let r = lightpath(&["validate", "--artifact", path(&art)]);
    assert_eq!(r.status.code(), Some(1));
    assert!(stderr(&r).starts_with("reproduced recorded divergence"), "{}", stderr(&r));
}

#[test]
fn validate_traces() {
    let dir = tempfile::tempdir().unwrap();
    let write = |name: &str, body: &str| {
        let p = dir.path().join(name);
        std::fs::write(&p, body).unwrap();
        p
    };
    let ok = write("ok.txt", "W 3 5\nR 3 5\nR 2 0\nW 7 1\nR 0\n");
    let o = lightpath(&["validate", "--n", "8", "--ops-file", path(&ok)]);
    assert!(o.status.success(), "{}", stderr(&o));
    assert!(stdout(&o).starts_with("ok:"));

    let wrong = write("wrong.txt", "W 3 5\nR 3 6\n");
    let o = lightpath(&["validate", "--n", "8", "--ops-file", path(&wrong)]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("op 1"));

    let oob = write("oob.txt", "W 1 1\nW 2 2\nW 8 3\n");
    let o = lightpath(&["validate", "--method", "lightpath-partial", "--n", "8", "--t", "3", "--ops-file", path(&oob)]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("op 2") && stderr(&o).contains("arena fault"), "{}", stderr(&o));

    let bad = write("bad.txt", "W 1 1\nQ 2\n");
    let o = lightpath(&["validate", "--n", "8", "--ops-file", path(&bad)]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn dump_lists_written_blocks() {
    let dir = tempfile::tempdir().unwrap();
    let ops = dir.path().join("ops.txt");
    std::fs::write(&ops, "W 3 1\nW 700 2\nR 5\nW 12345 3\n").unwrap();
    let o = lightpath(&["dump", "--n", "100000", "--t", "2", "--ops-file", path(&ops)]);
    assert!(o.status.success());
    assert_eq!(stdout(&o), "0\n682\n12342\n");

    let fresh = dir.path().join("none.txt");
    std::fs::write(&fresh, "R 1\n").unwrap();
    let o = lightpath(&["dump", "--method", "lightpath-core", "--n", "1024", "--ops-file", path(&fresh)]);
    assert_eq!(stdout(&o), "");

    let o = lightpath(&["dump", "--method", "lightpath-partial", "--n", "1000", "--ops-file", path(&ops)]);
    assert_eq!(o.status.code(), Some(2));
}
