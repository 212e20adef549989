use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use kgs_core::graph::load_graph_json;
use kgs_core::kirchhoff::InstanceDocument;
use kgs_core::solvers::CriticalPointRecord;
use serde_json::Value;

fn instance(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../instances").join(name)
}

fn kgs(out: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_kgs"))
        .args(args)
        .arg("--out")
        .arg(out)
        .env_remove("KGS_SEED")
        .output()
        .expect("binary runs")
}

fn run_dirs(out: &Path) -> Vec<PathBuf> {
    let mut dirs: Vec<PathBuf> = fs::read_dir(out).unwrap().map(|e| e.unwrap().path()).collect();
    dirs.sort();
    dirs
}

fn read_json(path: &Path) -> Value {
    serde_json::from_str(&fs::read_to_string(path).unwrap()).unwrap()
}

fn p(name: &str) -> String {
    instance(name).display().to_string()
}

#[test]
fn check_passes_on_acceptance_instance() {
    let out = tempfile::tempdir().unwrap();
    let o = kgs(out.path(), &["check", &p("p7_graph.json"), &p("mountain_pass.json")]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let dir = &run_dirs(out.path())[0];
    assert!(dir.file_name().unwrap().to_str().unwrap().ends_with("-seed0"));
    let doc = read_json(&dir.join("hypotheses.json"));
    assert_eq!(doc["manifest"]["command"], "check");
    assert!(doc["manifest"].get("wall_clock_seconds").is_none());
    assert!(read_json(&dir.join("manifest.json"))["wall_clock_seconds"].is_number());
    for h in doc["report"]["hypotheses"].as_array().unwrap() {
        for c in h["checks"].as_array().unwrap() {
            assert!(c["margin"].as_f64().unwrap() > 0.0, "{c}");
        }
    }
    assert!(fs::read_to_string(dir.join("hypotheses.txt")).unwrap().contains("H4"));
}

#[test]
fn check_reports_violated_exponent_chain() {
    let out = tempfile::tempdir().unwrap();
    let o = kgs(out.path(), &["check", &p("p7_graph.json"), &p("violates_exponents.json")]);
    assert_eq!(o.status.code(), Some(2));
    let stdout = String::from_utf8_lossy(&o.stdout);
    assert!(stdout.lines().any(|l| l.starts_with("H3") && l.contains("FAIL") && l.contains("r < min{p,q}")));
}

#[test]
fn malformed_input_exits_with_one() {
    let out = tempfile::tempdir().unwrap();
    let bad = out.path().join("bad.json");
    fs::write(&bad, "{ not json").unwrap();
    let o = kgs(out.path(), &["check", &p("p7_graph.json"), bad.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).contains("bad.json"));

    let o = kgs(out.path(), &["solve", &p("p7_graph.json"), &p("mountain_pass.json"), "--method", "nope"]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn solve_writes_two_solutions_of_opposite_sign() {
    let out = tempfile::tempdir().unwrap();
    let o = kgs(out.path(), &["solve", &p("p7_graph.json"), &p("mountain_pass.json"), "--method", "both", "--threads", "1"]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let dir = &run_dirs(out.path())[0];
    let high = read_json(&dir.join("mountain_pass.json"));
    let low = read_json(&dir.join("minimize.json"));
    assert!(high["solution"]["energy"].as_f64().unwrap() > 0.0);
    assert!(low["solution"]["energy"].as_f64().unwrap() < 0.0);
    assert_eq!(high["solution"]["classification"], "fully-non-trivial");

    let csv = fs::read_to_string(dir.join("mountain_pass_path.csv")).unwrap();
    let mut lines = csv.lines();
    assert!(lines.next().unwrap().starts_with("# manifest: {"));
    assert_eq!(lines.next().unwrap(), "index,t,energy");
    assert!(lines.count() >= 2);

    // The solution record reloads against the instance and re-serializes
    // unchanged.
    let (_, domain) = load_graph_json(&fs::read_to_string(instance("p7_graph.json")).unwrap()).unwrap();
    let inst = InstanceDocument::from_json(&fs::read_to_string(instance("mountain_pass.json")).unwrap())
        .unwrap()
        .build(&domain)
        .unwrap();
    let record: CriticalPointRecord = serde_json::from_value(high["solution"].clone()).unwrap();
    let state = record.state(&inst).unwrap();
    assert!(inst.gradient_vector(&state).unwrap().iter().all(|g| g.abs() < 1e-8));
    assert_eq!(serde_json::to_value(&record).unwrap(), high["solution"]);
}

#[test]
fn single_threaded_runs_are_reproducible() {
    let out = tempfile::tempdir().unwrap();
    let args = ["solve", &p("p3_coupled_graph.json"), &p("p3_coupled.json"), "--threads", "1", "--seed", "7"];
    for _ in 0..2 {
        assert_eq!(kgs(out.path(), &args).status.code(), Some(0));
    }
    let dirs = run_dirs(out.path());
    assert_eq!(dirs.len(), 2);
    for name in ["minimize.json", "mountain_pass.json", "mountain_pass_path.csv"] {
        assert_eq!(fs::read(dirs[0].join(name)).unwrap(), fs::read(dirs[1].join(name)).unwrap(), "{name}");
    }
}

#[test]
fn seed_environment_variable_overrides_flag() {
    let out = tempfile::tempdir().unwrap();
    let o = Command::new(env!("CARGO_BIN_EXE_kgs"))
        .args(["certify", &p("p5_graph.json"), &p("decoupled_negative.json"), "--seed", "3", "--out"])
        .arg(out.path())
        .env("KGS_SEED", "42")
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(0));
    let dir = &run_dirs(out.path())[0];
    assert!(dir.file_name().unwrap().to_str().unwrap().ends_with("-seed42"));
    assert_eq!(read_json(&dir.join("verdict.json"))["manifest"]["seed"], 42);
}

#[test]
fn solve_fails_where_no_solution_exists() {
    let out = tempfile::tempdir().unwrap();
    let o = kgs(out.path(), &["solve", &p("p5_graph.json"), &p("decoupled_negative.json"), "--threads", "1"]);
    assert_eq!(o.status.code(), Some(3));
    assert!(!String::from_utf8_lossy(&o.stderr).is_empty());
}

#[test]
fn scalar_multiplicity_finds_three_pairs() {
    let out = tempfile::tempdir().unwrap();
    let o = kgs(out.path(), &["scalar", &p("p5_graph.json"), &p("p5_multiplicity.json"), "--component", "u", "--multiplicity"]);
    assert_eq!(o.status.code(), Some(0));
    let doc = read_json(&run_dirs(out.path())[0].join("solutions.json"));
    assert!(doc["solutions"]["pairs"].as_u64().unwrap() >= 3);
    assert_eq!(doc["solutions"]["target"], 3);
    assert_eq!(doc["solutions"]["points"].as_array().unwrap().len(), 6);
}

#[test]
fn scalar_closed_form_has_one_pair() {
    let out = tempfile::tempdir().unwrap();
    let o = kgs(out.path(), &["scalar", &p("p3_graph.json"), &p("p3_closed_form.json"), "--component", "v", "--multiplicity"]);
    assert_eq!(o.status.code(), Some(0));
    let doc = read_json(&run_dirs(out.path())[0].join("solutions.json"));
    assert_eq!(doc["solutions"]["pairs"], 1);
    let values: Vec<f64> = doc["solutions"]["points"]
        .as_array()
        .unwrap()
        .iter()
        .map(|pt| pt["v"]["b"].as_f64().unwrap())
        .collect();
    assert_eq!(values.len(), 2);
    assert!(values.iter().all(|v| (v.abs() - 1.0).abs() < 1e-10));
}

#[test]
fn scalar_multiplicity_with_forcing_warns_and_solves_once() {
    let out = tempfile::tempdir().unwrap();
    let forced = out.path().join("forced.json");
    let mut doc = read_json(&instance("p3_closed_form.json"));
    doc["coefficients"]["g1"] = serde_json::json!({ "const": 0.1 });
    fs::write(&forced, doc.to_string()).unwrap();
    let runs = out.path().join("runs");
    let o = kgs(&runs, &["scalar", &p("p3_graph.json"), forced.to_str().unwrap(), "--component", "u", "--multiplicity"]);
    assert!(String::from_utf8_lossy(&o.stderr).contains("not even"));
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let doc = read_json(&run_dirs(&runs)[0].join("solutions.json"));
    assert_eq!(doc["solutions"]["points"].as_array().unwrap().len(), 1);
}

#[test]
fn certify_exit_codes() {
    let out = tempfile::tempdir().unwrap();
    let cases = [
        ("decoupled_negative.json", "integral", 0),
        ("p5_multiplicity.json", "integral", 4),
        ("decoupled_negative.json", "literal", 5),
    ];
    for (file, mode, code) in cases {
        let o = kgs(out.path(), &["certify", &p("p5_graph.json"), &p(file), "--mode", mode]);
        assert_eq!(o.status.code(), Some(code), "{file} {mode}");
    }
    let refuted = run_dirs(out.path())
        .into_iter()
        .map(|d| read_json(&d.join("verdict.json")))
        .find(|v| v["verdict"]["verdict"]["kind"] == "refuted")
        .unwrap();
    assert!(refuted["verdict"]["verdict"]["value"].as_f64().unwrap() >= 0.0);
}

#[test]
fn inputs_are_not_modified() {
    let out = tempfile::tempdir().unwrap();
    let before = fs::read(instance("p3_coupled.json")).unwrap();
    kgs(out.path(), &["check", &p("p3_coupled_graph.json"), &p("p3_coupled.json")]);
    assert_eq!(before, fs::read(instance("p3_coupled.json")).unwrap());
}
