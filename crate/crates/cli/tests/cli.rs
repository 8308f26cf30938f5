use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;

fn bin() -> Command {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_fraisse"));
    cmd.env_remove("FRAISSE_CACHE_DIR");
    cmd
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().unwrap()
}

fn code(out: &Output) -> i32 {
    out.status.code().unwrap()
}

fn chain(dir: &Path, n: usize) -> PathBuf {
    let pairs: Vec<String> = (0..n)
        .flat_map(|i| (i + 1..n).map(move |j| format!("({i},{j})")))
        .collect();
    let path = dir.join(format!("c{n}.st"));
    std::fs::write(&path, format!("signature: lt/2\nsize: {n}\nlt: {}\n", pairs.join(" "))).unwrap();
    path
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

struct Fixture {
    dir: tempfile::TempDir,
    c2: PathBuf,
    c3: PathBuf,
    c5: PathBuf,
    c6: PathBuf,
}

fn fixture() -> Fixture {
    let dir = tempfile::tempdir().unwrap();
    let (c2, c3, c5, c6) = (chain(dir.path(), 2), chain(dir.path(), 3), chain(dir.path(), 5), chain(dir.path(), 6));
    Fixture { dir, c2, c3, c5, c6 }
}

fn arrow_args<'a>(f: &'a Fixture, c: &'a Path) -> Vec<&'a str> {
    vec!["arrow", "--age", "linear_order", "--a", s(&f.c2), "--b", s(&f.c3), "--c", s(c), "--colors", "2"]
}

#[test]
fn arrow_exit_codes() {
    let f = fixture();
    assert_eq!(code(&run(&arrow_args(&f, &f.c6))), 0);
    let coloring = f.dir.path().join("bad.col");
    let mut args = arrow_args(&f, &f.c5);
    args.extend(["--coloring-out", s(&coloring)]);
    assert_eq!(code(&run(&args)), 1);
    let text = std::fs::read_to_string(&coloring).unwrap();
    assert!(text.contains("kind: colors"));
    let out = run(&["arrow", "--a", s(&f.c2), "--b", s(&f.c3), "--c", s(&f.c5)]);
    assert_eq!(code(&out), 2);
    assert!(String::from_utf8_lossy(&out.stderr).contains("--age"));
}

#[test]
fn certificates_replay() {
    let f = fixture();
    let cert = f.dir.path().join("fail.cert");
    let mut args = arrow_args(&f, &f.c5);
    args.extend(["--certificate", s(&cert)]);
    assert_eq!(code(&run(&args)), 1);

    assert_eq!(code(&run(&["verify", s(&cert)])), 0);
    assert_eq!(code(&run(&["verify", s(&cert), "--c", s(&f.c5), "--a", s(&f.c2)])), 0);
    let mut replay = arrow_args(&f, &f.c5);
    replay.extend(["--verify", s(&cert)]);
    assert_eq!(code(&run(&replay)), 0);

    let wrong = run(&["verify", s(&cert), "--c", s(&f.c6)]);
    assert_eq!(code(&wrong), 2);
    assert!(String::from_utf8_lossy(&wrong.stderr).contains("digest mismatch"));

    let mut doc: Value = serde_json::from_str(&std::fs::read_to_string(&cert).unwrap()).unwrap();
    let first = &mut doc["outcome"]["coloring"][0];
    *first = Value::from(1 - first.as_u64().unwrap());
    let flipped = f.dir.path().join("flipped.cert");
    std::fs::write(&flipped, serde_json::to_string(&doc).unwrap()).unwrap();
    assert_eq!(code(&run(&["verify", s(&flipped)])), 1);

    let garbage = f.dir.path().join("garbage.cert");
    std::fs::write(&garbage, "{ not json").unwrap();
    assert_eq!(code(&run(&["verify", s(&garbage)])), 2);
}

#[test]
fn machine_reports_are_deterministic_and_cached() {
    let f = fixture();
    let cache = f.dir.path().join("cache");
    let mut args = vec!["--json"];
    args.extend(arrow_args(&f, &f.c5));
    let fresh = run(&args);
    let first = bin().args(&args).env("FRAISSE_CACHE_DIR", &cache).output().unwrap();
    assert_eq!(std::fs::read_dir(&cache).unwrap().count(), 1);
    let second = bin().args(&args).env("FRAISSE_CACHE_DIR", &cache).output().unwrap();
    let mut no_cache = args.clone();
    no_cache.push("--no-cache");
    let third = bin().args(&no_cache).env("FRAISSE_CACHE_DIR", &cache).output().unwrap();
    assert_eq!(fresh.stdout, first.stdout);
    assert_eq!(first.stdout, second.stdout);
    assert_eq!(second.stdout, third.stdout);
    assert_eq!(code(&second), 1);
    let doc: Value = serde_json::from_slice(&fresh.stdout).unwrap();
    assert_eq!(doc["outcome"], "fails");
    assert_eq!(doc["exit"], 1);
}

#[test]
fn resource_limits_exit_3() {
    let f = fixture();
    let out = run(&[
        "--node-budget", "50", "--json", "arrow-search", "--age", "linear_order", "--a", s(&f.c2), "--b", s(&f.c3), "--max-n", "6",
    ]);
    assert_eq!(code(&out), 3);
    let doc: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(doc["outcome"], "resource-limit");
}

#[test]
fn input_errors_exit_2() {
    let f = fixture();
    let bad = f.dir.path().join("bad.st");
    std::fs::write(&bad, "signature: lt/2\nsize: 2\nlt: (0,5)\n").unwrap();
    assert_eq!(code(&run(&["parse", s(&bad)])), 2);
    assert_eq!(code(&run(&["parse", s(&f.c3)])), 0);
    assert_eq!(code(&run(&["nonsense"])), 2);
    let out = run(&[
        "convex-arrow", "--age", "linear_order", "--a", s(&f.c2), "--b", s(&f.c3), "--c", s(&f.c5), "--epsilon", "1.5",
    ]);
    assert_eq!(code(&out), 2);
    assert_eq!(code(&run(&["pattern-count", "--age", "graph", "--a", s(&f.c2), "--z", s(&f.c2)])), 2);
}

#[test]
fn structural_commands() {
    let f = fixture();
    let pt = chain(f.dir.path(), 1);
    let out = run(&["--json", "pattern-count", "--age", "linear_order", "--a", s(&pt), "--z", s(&pt)]);
    assert_eq!(code(&out), 0);
    let doc: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(doc["result"]["count"], 3);

    let out = run(&["patterns", "--age", "linear_order", "--a", s(&f.c2), "--z", s(&pt)]);
    let text = String::from_utf8_lossy(&out.stdout);
    assert_eq!(text.lines().filter(|l| l.starts_with("pattern ")).count(), 5);

    let out = run(&["--json", "enumerate", "--age", "graph", "--max-n", "4", "--counts"]);
    let doc: Value = serde_json::from_slice(&out.stdout).unwrap();
    let counts: Vec<u64> = doc["result"]["levels"].as_array().unwrap().iter().map(|l| l["count"].as_u64().unwrap()).collect();
    assert_eq!(counts, vec![1, 2, 4, 11]);

    let out = run(&["amalgamation", "--age", "linear_order", "--property", "free", "--max-n", "2"]);
    assert_eq!(code(&out), 1);
    let out = run(&["amalgamation", "--age", "graph", "--property", "free", "--max-n", "2"]);
    assert_eq!(code(&out), 0);
}

#[test]
fn stability_witness_file() {
    let f = fixture();
    let pt = chain(f.dir.path(), 1);
    let host = f.dir.path().join("host.st");
    let cert = f.dir.path().join("st.cert");
    let out = run(&[
        "stability", "--age", "linear_order", "--a", s(&pt), "--z", s(&pt), "--depth", "4", "--witness-out", s(&host), "--certificate", s(&cert),
    ]);
    assert_eq!(code(&out), 0);
    assert_eq!(code(&run(&["parse", s(&host), "--age", "linear_order"])), 0);
    assert_eq!(code(&run(&["verify", s(&cert)])), 0);
}
