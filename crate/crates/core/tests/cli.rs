use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use dqcopt::circuit::{layerize, parse_circuit};
use dqcopt::network::build_grid;
use dqcopt::schedule::{cost, CostBreakdown, Schedule, DEFAULT_LAMBDA};

fn dqcopt(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_dqcopt"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn ok(out: &Output) {
    assert!(
        out.status.success(),
        "exit {:?}\nstderr: {}",
        out.status.code(),
        String::from_utf8_lossy(&out.stderr)
    );
}

fn path(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn gen_schedule_verify_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let circuit = dir.path().join("c.txt");
    ok(&dqcopt(&["gen-circuit", "--qubits", "6", "--depth", "8", "--seed", "4", "-o", path(&circuit)]));
    let c = parse_circuit(&fs::read_to_string(&circuit).unwrap()).unwrap();
    assert_eq!(layerize(&c).depth(), 8);

    for alg in ["sa", "ea", "gp", "seq", "randseq"] {
        let out_dir = dir.path().join(alg);
        let mut args = vec![
            "schedule", "--alg", alg, "--circuit", path(&circuit), "--topology", "grid:2x2",
            "--seed", "1", "-o", path(&out_dir),
        ];
        let params = dir.path().join("params.json");
        match alg {
            "sa" => fs::write(&params, r#"{"max_iterations": 3000}"#).unwrap(),
            "ea" => fs::write(&params, r#"{"population_size": 10, "generations": 20}"#).unwrap(),
            _ => {}
        }
        if alg == "sa" || alg == "ea" {
            args.extend(["--params", path(&params)]);
        }
        ok(&dqcopt(&args));

        let reported: CostBreakdown =
            serde_json::from_str(&fs::read_to_string(out_dir.join("cost.json")).unwrap()).unwrap();
        let s = Schedule::from_csv(&fs::read_to_string(out_dir.join("schedule.csv")).unwrap()).unwrap();
        let net = build_grid(2, 2, 2).unwrap();
        assert_eq!(cost(&s, &layerize(&c), &net, DEFAULT_LAMBDA).unwrap(), reported, "{alg}");
        assert_eq!(out_dir.join("trace.csv").exists(), alg == "sa" || alg == "ea");

        let verify = dqcopt(&[
            "verify", "--schedule", path(&out_dir.join("schedule.csv")), "--circuit", path(&circuit),
            "--topology", "grid:2x2",
        ]);
        ok(&verify);
        let recomputed: CostBreakdown = serde_json::from_slice(&verify.stdout).unwrap();
        assert_eq!(recomputed, reported);
    }
}

#[test]
fn qco_writes_report_and_circuit() {
    let dir = tempfile::tempdir().unwrap();
    let circuit = dir.path().join("c.txt");
    ok(&dqcopt(&["gen-circuit", "--qubits", "4", "--depth", "6", "--seed", "2", "-o", path(&circuit)]));
    let params = dir.path().join("qco.json");
    fs::write(&params, r#"{"population_size": 12, "generations": 5}"#).unwrap();
    let out_dir = dir.path().join("out");
    ok(&dqcopt(&[
        "qco", "--circuit", path(&circuit), "--topology", "star:3", "--seed", "0", "--params",
        path(&params), "-o", path(&out_dir),
    ]));
    let report: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(out_dir.join("report.json")).unwrap()).unwrap();
    for key in ["best_fitness", "fidelity", "u_original", "u_optimized", "generations_run", "seed"] {
        assert!(report.get(key).is_some(), "missing {key}");
    }
    assert_eq!(report["generations_run"], 5);
    parse_circuit(&fs::read_to_string(out_dir.join("optimized.circuit")).unwrap()).unwrap();
}

#[test]
fn bench_exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let run = |name: &str, cfg: &str| {
        let file = dir.path().join(format!("{name}.json"));
        fs::write(&file, cfg).unwrap();
        dqcopt(&["bench", "--config", path(&file), "-o", path(&dir.path().join(name))])
    };

    let empty = run("empty", r#"{"circuits": [], "topologies": ["grid:2x2"], "algorithms": ["gp"]}"#);
    assert_eq!(empty.status.code(), Some(0));
    let raw = fs::read_to_string(dir.path().join("empty/raw.csv")).unwrap();
    assert_eq!(raw.trim(), "circuit,topology,algorithm,seed,a,b,c,total,fidelity,wall_ms");

    let bad = run("bad", r#"{"circuits": [], "topologies": [], "algorithms": ["gp"], "seeds": []}"#);
    assert_eq!(bad.status.code(), Some(1));
    let unknown = run("unknown", r#"{"circuits": [], "topologies": [], "algorithms": ["magic"]}"#);
    assert_eq!(unknown.status.code(), Some(1));

    let infeasible = run(
        "infeasible",
        r#"{"circuits": [{"qubits": 9, "depth": 2}], "topologies": ["grid:2x2"], "algorithms": ["gp"]}"#,
    );
    assert_eq!(infeasible.status.code(), Some(2));

    let mixed = run(
        "mixed",
        r#"{"circuits": [{"qubits": 9, "depth": 2}, {"qubits": 4, "depth": 2}],
            "topologies": ["grid:2x2"], "algorithms": ["gp", "seq"], "seeds": [0]}"#,
    );
    assert_eq!(mixed.status.code(), Some(0));
    assert!(String::from_utf8_lossy(&mixed.stderr).contains("skipped"));
}

#[test]
fn bench_resolves_files_relative_to_config() {
    let dir = tempfile::tempdir().unwrap();
    let sub = dir.path().join("inputs");
    fs::create_dir(&sub).unwrap();
    fs::write(sub.join("tiny.txt"), "qubits 3\ncx 0 1\ncx 1 2\n").unwrap();
    fs::write(sub.join("line.topo"), "nodes 2\ncap 0 2\ncap 1 2\nedge 0 1\n").unwrap();
    fs::write(
        sub.join("cfg.json"),
        r#"{"circuits": [{"file": "tiny.txt"}], "topologies": ["line.topo"], "algorithms": ["gp"], "seeds": [0]}"#,
    )
    .unwrap();
    let out = dir.path().join("out");
    ok(&dqcopt(&["bench", "--config", path(&sub.join("cfg.json")), "--format", "json", "-o", path(&out)]));
    let summary: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(out.join("summary.json")).unwrap()).unwrap();
    assert_eq!(summary["rows"][0]["circuit"], "tiny");
    assert_eq!(summary["rows"][0]["mean_total"], 1.0);
}

#[test]
fn errors_exit_nonzero() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.txt");
    fs::write(&bad, "qubits 2\ncx 0 0\n").unwrap();
    let out = dqcopt(&["schedule", "--alg", "gp", "--circuit", path(&bad), "--topology", "grid:2x2", "-o", path(dir.path())]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("line 2"));

    let big = dir.path().join("big.txt");
    ok(&dqcopt(&["gen-circuit", "--qubits", "5", "--depth", "2", "-o", path(&big)]));
    let out = dqcopt(&["schedule", "--alg", "seq", "--circuit", path(&big), "--topology", "star:2", "-o", path(dir.path())]);
    assert_eq!(out.status.code(), Some(2));
}
