use std::process::{Command, Output};

use serde_json::Value;

fn wcycles(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_wcycles")).args(args).output().unwrap()
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).unwrap()
}

#[test]
fn fold_examples() {
    let out = wcycles(&["fold", "--gens", "aa,b"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert_eq!(v["euler_characteristic"], -1);
    assert_eq!(v["immersion"]["domain"]["vertices"].as_array().unwrap().len(), 2);

    let empty = json(&wcycles(&["fold"]));
    assert_eq!(empty["immersion"]["domain"]["vertices"].as_array().unwrap().len(), 1);
    assert_eq!(empty["immersion"]["domain"]["edges"].as_array().unwrap().len(), 0);

    let rose = json(&wcycles(&["fold", "--gens", "a,b"]));
    assert_eq!(rose["immersion"]["domain"], rose["immersion"]["codomain"]);
}

#[test]
fn stack_examples() {
    let dir = tempfile::tempdir().unwrap();
    let svg = dir.path().join("aabbb.svg");
    let out = wcycles(&["stack", "aabbb", "--svg", svg.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert_eq!(v["stacking"]["edge_orders"]["0"], serde_json::json!([[0, 0], [0, 1]]));
    assert_eq!(v["stacking"]["edge_orders"]["1"], serde_json::json!([[0, 4], [0, 3], [0, 2]]));
    assert_eq!((v["arcs_above"].as_u64(), v["depth"].as_u64()), (Some(1), Some(1)));
    let picture = std::fs::read_to_string(&svg).unwrap();
    assert_eq!(picture.matches("class=\"arc\"").count(), 5);

    let single = json(&wcycles(&["stack", "a"]));
    assert_eq!(single["stacking"]["edge_orders"]["0"], serde_json::json!([[0, 0]]));
    assert_eq!(single["stacking"]["vertex_orders"]["0"], serde_json::json!([[0, 0]]));

    let power = wcycles(&["stack", "aa"]);
    assert_eq!(power.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&power.stderr).contains("primitive"));
}

#[test]
fn strict_mode_refuses_unreduced_words() {
    assert_eq!(wcycles(&["stack", "abA"]).status.code(), Some(0));
    assert_eq!(wcycles(&["--strict", "stack", "abA"]).status.code(), Some(2));
}

/// Higher in the edge order is drawn higher (smaller y), and arcs over one
/// edge never share a height.
#[test]
fn svg_heights_follow_the_orders() {
    let dir = tempfile::tempdir().unwrap();
    let svg = dir.path().join("w.svg");
    let out = wcycles(&["stack", "aabAbABBab", "--svg", svg.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    let text = std::fs::read_to_string(&svg).unwrap();
    let attr = |line: &str, key: &str| -> f64 {
        let start = line.find(&format!(" {key}=\"")).unwrap() + key.len() + 3;
        line[start..].split('"').next().unwrap().parse().unwrap()
    };
    let mut arcs: Vec<(u32, usize, f64)> = text
        .lines()
        .filter(|l| l.contains("class=\"arc\""))
        .map(|l| (attr(l, "data-edge") as u32, attr(l, "data-rank") as usize, attr(l, "y1")))
        .collect();
    assert_eq!(arcs.len(), 10);
    arcs.sort_by_key(|a| (a.0, a.1));
    for pair in arcs.windows(2) {
        if pair[0].0 == pair[1].0 {
            assert!(pair[1].2 < pair[0].2, "{pair:?}");
        }
    }
}

#[test]
fn verify_exit_codes() {
    let ok = wcycles(&["verify", "--word", "abAB"]);
    assert_eq!(ok.status.code(), Some(0));
    assert!(String::from_utf8_lossy(&ok.stdout).contains("PASS"));

    let red = wcycles(&["--json", "verify", "--gens", "aa,b", "--word", "a"]);
    assert_eq!(red.status.code(), Some(0));
    let first: Value = serde_json::from_str(String::from_utf8_lossy(&red.stdout).lines().next().unwrap()).unwrap();
    assert_eq!(first["branch"], "reducible");

    let dir = tempfile::tempdir().unwrap();
    let spec = dir.path().join("specs.json");
    std::fs::write(
        &spec,
        r#"[{"name": "good", "relator": "abAB"},
            {"name": "broken", "graph": {"vertices": [0], "edges": [{"id": 0, "src": 0, "dst": 7}]}, "relator": "a"}]"#,
    )
    .unwrap();
    let mixed = wcycles(&["verify", "--spec", spec.to_str().unwrap()]);
    assert_eq!(mixed.status.code(), Some(2));
    let text = String::from_utf8_lossy(&mixed.stdout);
    assert!(text.contains("PASS good") && text.contains("ERROR broken"));

    std::fs::write(&spec, "{ not json").unwrap();
    assert_eq!(wcycles(&["verify", "--spec", spec.to_str().unwrap()]).status.code(), Some(2));
}

#[test]
fn wcycles_npi_pullback_and_dot() {
    let w = wcycles(&["wcycles", "--gens", "aa,bb,abab", "--word", "ab"]);
    assert_eq!(w.status.code(), Some(0));

    let npi = wcycles(&["--json", "npi", "--word", "abAB"]);
    assert_eq!(npi.status.code(), Some(0));
    let v: Value = serde_json::from_slice(&npi.stdout).unwrap();
    assert_eq!(v["verdict"]["chi"], 0);
    assert_eq!(v["replay_ok"], true);

    let pb = json(&wcycles(&["pullback", "--gens", "aa,b", "--word", "a"]));
    assert_eq!(pb["report"]["deg_sigma"], 2);

    let dot = wcycles(&["export-dot", "--gens", "aa,b"]);
    let text = String::from_utf8_lossy(&dot.stdout);
    assert!(text.starts_with("digraph") && text.matches("->").count() == 3);
}

#[test]
fn harness_summary() {
    let a = wcycles(&["harness", "--seed", "3", "--count", "60", "--json"]);
    let b = wcycles(&["harness", "--seed", "3", "--count", "60", "--json"]);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
    let s = json(&a);
    assert_eq!((s["passed"].as_u64(), s["failed"].as_u64()), (Some(60), Some(0)));
    assert!(String::from_utf8_lossy(&a.stderr).contains("harness: 60 instances"));

    assert_eq!(wcycles(&["harness", "--count", "0"]).status.code(), Some(2));
    assert_eq!(wcycles(&["harness", "--bogus"]).status.code(), Some(2));
}
