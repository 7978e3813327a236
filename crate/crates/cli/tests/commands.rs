use std::collections::BTreeMap;
use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::Value;

fn treeemb(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_treeemb")).args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn scratch(name: &str, contents: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("treeemb-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let p = dir.join(name);
    std::fs::write(&p, contents).unwrap();
    p
}

fn gallery_spec(name: &str) -> PathBuf {
    let o = treeemb(&["examples", "--show", name]);
    assert!(o.status.success());
    scratch(&format!("{name}.spec"), &stdout(&o))
}

fn report(args: &[&str]) -> Value {
    let mut all = args.to_vec();
    all.extend(["--json", "-"]);
    let o = treeemb(&all);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let v: Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["schema"], "treeemb-report/1");
    v
}

#[test]
fn examples_list_names_everything() {
    let o = treeemb(&["examples", "--list"]);
    assert!(o.status.success());
    let text = stdout(&o);
    for name in ["binary_plus_path", "binary_plus_ray", "decorated_binary_ray", "shift", "translations", "ping_pong"] {
        assert!(text.contains(name), "{name} missing");
    }
}

#[test]
fn shift_is_parabolic() {
    let spec = scratch("shift.spec", "tree ray;\nembedding s = shift(ray);\n");
    let v = report(&["--spec", spec.to_str().unwrap(), "classify", "--embedding", "s"]);
    assert_eq!(v["command"], "classify");
    assert_eq!(v["result"]["s"]["tag"], "Parabolic");
    assert_eq!(v["result"]["s"]["translation_length"], 1);
    assert_eq!(v["parameters"]["horizon"], 32);
}

#[test]
fn ping_pong_alternative() {
    let spec = gallery_spec("ping_pong");
    let v = report(&["--spec", spec.to_str().unwrap(), "alternative", "--monoid", "M"]);
    assert_eq!(v["result"]["verdict"]["case"], "TwoIndependentNonElliptics");
    assert_eq!(v["result"]["certificate_checked"], true);
}

#[test]
fn translations_need_longer_words() {
    let spec = gallery_spec("translations");
    let s = spec.to_str().unwrap();
    let short = report(&["--spec", s, "diagnostics", "--monoid", "M"]);
    assert_eq!(short["result"]["cardinality_class"], "Unresolved");
    let long = report(&["--spec", s, "--max-len", "10", "alternative", "--monoid", "M"]);
    assert_eq!(long["result"]["verdict"]["case"], "TwoLimitEnds");
}

#[test]
fn cubic_dot_matches_reported_histogram() {
    let spec = gallery_spec("ping_pong_unit");
    let dot = spec.with_extension("dot");
    let v = report(&["--spec", spec.to_str().unwrap(), "extract-cubic", "--monoid", "M", "--dot", dot.to_str().unwrap()]);
    let text = std::fs::read_to_string(&dot).unwrap();
    let mut degree: BTreeMap<String, usize> = BTreeMap::new();
    let mut nodes = 0;
    for line in text.lines().map(str::trim) {
        if let Some((a, b)) = line.trim_end_matches(';').split_once(" -- ") {
            *degree.entry(a.to_string()).or_default() += 1;
            *degree.entry(b.to_string()).or_default() += 1;
        } else if line.contains("[degree=") {
            nodes += 1;
        }
    }
    assert_eq!(nodes, v["result"]["vertices"].as_u64().unwrap() as usize);
    assert_eq!(degree.len(), nodes);
    let mut hist: BTreeMap<String, u64> = BTreeMap::new();
    for d in degree.values() {
        *hist.entry(d.to_string()).or_default() += 1;
    }
    let reported: BTreeMap<String, u64> = serde_json::from_value(v["result"]["degree_histogram"].clone()).unwrap();
    assert_eq!(hist, reported);
    assert!(degree.values().all(|&d| d <= 3));
}

#[test]
fn exit_codes() {
    let bad = scratch("bad.spec", "tree ray;\nembedding s = shfit(ray);\n");
    let o = treeemb(&["--spec", bad.to_str().unwrap(), "classify"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("2:15"));
    let o = treeemb(&["classify"]);
    assert_eq!(o.status.code(), Some(2));
    let ray = scratch("ray.spec", "tree ray;\nembedding s = shift(ray);\nmonoid M = [s];\n");
    let o = treeemb(&["--spec", ray.to_str().unwrap(), "limit-set", "--monoid", "M", "--depth", "40"]);
    assert!(o.status.success());
    let o = treeemb(&["--spec", ray.to_str().unwrap(), "free-cert", "--monoid", "M", "--g", "s", "--h", "s"]);
    assert_eq!(o.status.code(), Some(1), "{}", String::from_utf8_lossy(&o.stderr));
}
