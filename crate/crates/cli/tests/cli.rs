use std::path::Path;
use std::process::{Command, Output};

fn mixdih(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_mixdih"))
        .args(args)
        .env_remove("DF_THREADS")
        .output()
        .expect("spawn mixdih")
}

fn arg(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn header(path: &Path) -> String {
    std::fs::read_to_string(path).unwrap().lines().next().unwrap().to_string()
}

#[test]
fn build_writes_expected_widths() {
    let dir = tempfile::tempdir().unwrap();
    for (target, n) in [("p59", 59), ("h56", 56), ("toy2", 8)] {
        let out = dir.path().join(format!("{target}.pc"));
        let o = mixdih(&["build", target, "--out", arg(&out)]);
        assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
        assert_eq!(header(&out), format!("pc2 v1 n={n}"));
    }
}

#[test]
fn verify_toy_passes_and_writes_report() {
    let dir = tempfile::tempdir().unwrap();
    let pc = dir.path().join("toy.pc");
    let report = dir.path().join("report.json");
    assert!(mixdih(&["build", "toy2", "--out", arg(&pc)]).status.success());
    let o = mixdih(&["verify", "toy2", "--presentation", arg(&pc), "--report", arg(&report)]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let json: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&report).unwrap()).unwrap();
    assert_eq!(json["failed"], 0);
    assert_eq!(json["target"], "toy2");
    assert!(json["checks"].as_array().unwrap().iter().all(|c| c["passed"] == true));
}

#[test]
fn corrupted_presentation_fails_on_consistency() {
    let dir = tempfile::tempdir().unwrap();
    let pc = dir.path().join("toy.pc");
    assert!(mixdih(&["build", "toy2", "--out", arg(&pc)]).status.success());
    let text = std::fs::read_to_string(&pc).unwrap();
    assert!(text.contains("conj 2 0 14\n"));
    let bad = dir.path().join("bad.pc");
    std::fs::write(&bad, text.replace("conj 2 0 14\n", "conj 2 0 c\n")).unwrap();
    let report = dir.path().join("bad.json");
    let o = mixdih(&["verify", "toy2", "--presentation", arg(&bad), "--report", arg(&report)]);
    assert_ne!(o.status.code(), Some(0));
    let json: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&report).unwrap()).unwrap();
    let first = &json["checks"][0];
    assert_eq!(first["name"], "presentation_file_consistency");
    assert_eq!(first["passed"], false);
}

#[test]
fn unreadable_presentation_is_an_io_error() {
    let dir = tempfile::tempdir().unwrap();
    let missing = dir.path().join("nope.pc");
    let o = mixdih(&["verify", "toy2", "--presentation", arg(&missing)]);
    assert_eq!(o.status.code(), Some(65));
    let garbage = dir.path().join("garbage.pc");
    std::fs::write(&garbage, "hello\n").unwrap();
    assert_eq!(mixdih(&["verify", "toy2", "--presentation", arg(&garbage)]).status.code(), Some(65));
}

#[test]
fn search_budget_abort() {
    let o = mixdih(&["search", "--max-survivors", "1"]);
    assert_eq!(o.status.code(), Some(64));
}

#[test]
fn search_resume_matches_full_run() {
    let dir = tempfile::tempdir().unwrap();
    let ck = dir.path().join("ck");
    let full = dir.path().join("full.json");
    let o = mixdih(&["search", "--threads", "2", "--checkpoint-dir", arg(&ck), "--report", arg(&full)]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let full: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&full).unwrap()).unwrap();
    let counts: Vec<u64> = full["levels"].as_array().unwrap().iter().map(|l| l["survivors"].as_u64().unwrap()).collect();
    assert_eq!(counts, [2, 2, 12, 48, 128, 0]);
    assert_eq!(full["regular_subgroup_exists"], false);

    let resumed = dir.path().join("resumed.json");
    let level3 = ck.join("level-3.txt");
    let o = mixdih(&["search", "--resume", arg(&level3), "--report", arg(&resumed)]);
    assert_eq!(o.status.code(), Some(0));
    let resumed: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&resumed).unwrap()).unwrap();
    assert_eq!(resumed["start_depth"], 3);
    assert_eq!(resumed["levels"].as_array().unwrap()[..], full["levels"].as_array().unwrap()[3..]);
}

#[test]
fn maps_accepts_and_rejects() {
    let dir = tempfile::tempdir().unwrap();
    let good = dir.path().join("alpha1.map");
    std::fs::write(
        &good,
        "# shift on X\nx1 -> x1*x2\nx2 -> x2*x3\nx3 -> x3*x4\nx4 -> x1*x2*x3\ny1 -> y1\ny2 -> y2\ny3 -> y3\ny4 -> y4\n",
    )
    .unwrap();
    let o = mixdih(&["maps", arg(&good)]);
    assert_eq!(o.status.code(), Some(0));
    assert!(String::from_utf8_lossy(&o.stdout).contains("order 15"));

    let bad = dir.path().join("sigma1.map");
    std::fs::write(&bad, "x1 -> x1\nx2 -> x1*x3\nx3 -> x2*x3\nx4 -> x2*x4\ny1 -> y1\ny2 -> y2\ny3 -> y3\ny4 -> y4\n").unwrap();
    let o = mixdih(&["maps", arg(&bad)]);
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stdout).contains("not a homomorphism"));

    let twice = dir.path().join("twice.map");
    std::fs::write(&twice, "x1 -> x1\nx1 -> x2\n").unwrap();
    assert_eq!(mixdih(&["maps", arg(&twice)]).status.code(), Some(65));

    let stranger = dir.path().join("stranger.map");
    std::fs::write(&stranger, "c11 -> x1\n").unwrap();
    assert_eq!(mixdih(&["maps", arg(&stranger)]).status.code(), Some(65));
}

#[test]
fn graph_export_headers() {
    let dir = tempfile::tempdir().unwrap();
    for (kind, header_line) in [("sigma", "128 256"), ("gamma", "256 768"), ("quotient", "8 16")] {
        let out = dir.path().join(format!("{kind}.txt"));
        let o = mixdih(&["graph", kind, "--emit-graph", arg(&out)]);
        assert!(o.status.success());
        assert_eq!(header(&out), header_line);
    }
}

#[test]
fn reports_are_stable_apart_from_timings() {
    let dir = tempfile::tempdir().unwrap();
    let mut docs = Vec::new();
    for k in 0..2 {
        let path = dir.path().join(format!("r{k}.json"));
        assert_eq!(mixdih(&["verify", "toy2", "--report", arg(&path)]).status.code(), Some(0));
        let mut json: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
        json.as_object_mut().unwrap().remove("timings");
        docs.push(json);
    }
    assert_eq!(docs[0], docs[1]);
    for key in ["engine_version", "target", "seed", "checks", "failed"] {
        assert!(docs[0].get(key).is_some(), "{key}");
    }
}
