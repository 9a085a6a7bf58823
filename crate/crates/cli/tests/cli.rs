use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use cutdens::densities::min_cut_density;
use cutdens::{Balance, Optimum, WeightedGraph};
use serde_json::{json, Value};
use tempfile::TempDir;

fn bin() -> Command {
    let mut c = Command::new(env!("CARGO_BIN_EXE_cutdens"));
    c.env_remove("CUTDENS_SEED");
    c
}

fn run(args: &[&str], dir: &Path) -> Output {
    bin().args(args).current_dir(dir).output().expect("binary runs")
}

fn stdout_json(out: &Output) -> Value {
    assert!(out.status.success(), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

fn write(dir: &Path, name: &str, v: &Value) -> PathBuf {
    let p = dir.join(name);
    std::fs::write(&p, v.to_string()).unwrap();
    p
}

fn small_graph() -> Value {
    json!({
        "alpha": [1.0, 2.0, 1.0, 1.5, 1.0, 0.5],
        "beta": [
            [0.0, 0.9, 0.8, 0.1, 0.0, 0.2],
            [0.9, 0.3, 0.7, 0.0, 0.1, 0.0],
            [0.8, 0.7, 0.0, 0.2, 0.0, 0.1],
            [0.1, 0.0, 0.2, 0.5, 0.9, 0.6],
            [0.0, 0.1, 0.0, 0.9, 0.0, 0.8],
            [0.2, 0.0, 0.1, 0.6, 0.8, 0.0]
        ]
    })
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exit code")
}

#[test]
fn single_cluster_density_is_zero() {
    let dir = TempDir::new().unwrap();
    write(dir.path(), "g.json", &small_graph());
    let v = stdout_json(&run(&["density", "--graph", "g.json", "--q", "1"], dir.path()));
    assert_eq!(v["result"]["optimum"]["value"], json!(0.0));
    assert_eq!(v["tool"], "cutdens");
    assert_eq!(v["seed"], 0);
    assert_eq!(v["config"]["q"], "1");
}

#[test]
fn replay_is_byte_identical_across_thread_counts() {
    let dir = TempDir::new().unwrap();
    write(dir.path(), "g.json", &small_graph());
    for args in [
        vec!["qp", "--graph", "g.json", "--q", "3", "--c", "0.1", "--seed", "9"],
        vec!["sample-test", "--graph", "g.json", "--k", "4", "--reps", "40", "--seed", "9"],
        vec!["cutnorm", "--graph", "g.json", "--method", "heuristic", "--seed", "9"],
        vec!["noise-sweep", "--ns", "4,6", "--seeds", "3", "--seed", "9", "--out", "csv"],
    ] {
        let mut outputs = Vec::new();
        for threads in ["1", "3", "1"] {
            let mut a = args.clone();
            a.extend(["--threads", threads]);
            let out = run(&a, dir.path());
            assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
            outputs.push(out.stdout);
        }
        assert_eq!(outputs[0], outputs[1], "{args:?}");
        assert_eq!(outputs[0], outputs[2], "{args:?}");
    }
}

#[test]
fn qp_then_density_pipeline() {
    let dir = TempDir::new().unwrap();
    write(dir.path(), "g.json", &small_graph());
    for (q, c) in [("2", "0.2"), ("3", "0.1"), ("2", "0")] {
        let qp = stdout_json(&run(&["qp", "--graph", "g.json", "--q", q, "--c", c], dir.path()));
        let exact = stdout_json(&run(
            &["density", "--graph", "g.json", "--q", q, "--balance", &format!("c:{c}")],
            dir.path(),
        ));
        let relaxed = qp["result"]["report"]["objective"].as_f64().unwrap();
        let exact_value = exact["result"]["optimum"]["value"].as_f64().unwrap();
        let rounded = qp["result"]["rounded"]["value"].as_f64().unwrap();
        let combined = json!({
            "q": q,
            "c": c,
            "relaxation": relaxed,
            "exact": exact_value,
            "rounded": rounded,
            "relaxation_below_exact": relaxed <= exact_value + 1e-9,
        });
        let report = write(dir.path(), "combined.json", &combined);
        let back: Value = serde_json::from_str(&std::fs::read_to_string(report).unwrap()).unwrap();
        assert_eq!(back["relaxation_below_exact"], json!(true), "{back}");
        assert!(rounded >= exact_value - 1e-9);

        let joint = stdout_json(&run(&["qp", "--graph", "g.json", "--q", q, "--c", c, "--with-exact"], dir.path()));
        assert_eq!(joint["result"]["exact"]["value"].as_f64().unwrap(), exact_value);
        assert_eq!(joint["result"]["exact"]["relaxation_below_exact"], json!(true));
    }
}

#[test]
fn json_round_trips_into_library_values() {
    let dir = TempDir::new().unwrap();
    write(dir.path(), "g.json", &small_graph());
    let out = run(&["density", "--graph", "g.json", "--q", "2", "--balance", "c:0.3"], dir.path());
    let text = String::from_utf8(out.stdout).unwrap();
    let v: Value = serde_json::from_str(&text).unwrap();
    let reparsed: Value = serde_json::from_str(&serde_json::to_string_pretty(&v).unwrap()).unwrap();
    assert_eq!(v, reparsed);
    let opt: Optimum = serde_json::from_value(v["result"]["optimum"].clone()).unwrap();
    let g = WeightedGraph::from_json_str(&small_graph().to_string()).unwrap();
    assert_eq!(opt, min_cut_density(&g, 2, &Balance::C { c: 0.3 }).unwrap());
}

#[test]
fn asymmetric_beta_names_the_entry() {
    let dir = TempDir::new().unwrap();
    write(dir.path(), "g.json", &json!({"alpha": [1, 1, 1], "beta": [[0, 0.5, 0], [0.5, 0, 0.1], [0, 0.4, 0]]}));
    let out = run(&["density", "--graph", "g.json"], dir.path());
    assert_eq!(code(&out), 2);
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("max asymmetry |beta[1][2] - beta[2][1]|"), "{err}");
}

#[test]
fn every_diagnostic_is_reported() {
    let dir = TempDir::new().unwrap();
    write(dir.path(), "g.json", &json!({"alpha": [1, -1], "beta": [[0, 2], [0.5, 0]]}));
    let out = run(&["density", "--graph", "g.json", "--functional", "nope"], dir.path());
    assert_eq!(code(&out), 2);
    let err = String::from_utf8_lossy(&out.stderr);
    for needle in ["alpha[1]", "[0,1]", "not symmetric", "functional"] {
        assert!(err.contains(needle), "missing `{needle}` in {err}");
    }
}

#[test]
fn balance_above_one_over_q_cites_the_bound() {
    let dir = TempDir::new().unwrap();
    write(dir.path(), "g.json", &small_graph());
    let out = run(&["density", "--graph", "g.json", "--q", "3", "--balance", "c:0.4"], dir.path());
    assert_eq!(code(&out), 2);
    assert!(String::from_utf8_lossy(&out.stderr).contains("c <= 1/q"));
}

#[test]
fn qp_overfull_balance_is_infeasible() {
    let dir = TempDir::new().unwrap();
    write(dir.path(), "g.json", &small_graph());
    let out = run(&["qp", "--graph", "g.json", "--q", "3", "--c", "0.4"], dir.path());
    assert_eq!(code(&out), 4);
    assert!(String::from_utf8_lossy(&out.stderr).contains("infeasible"));
}

#[test]
fn unreachable_balance_is_infeasible() {
    let dir = TempDir::new().unwrap();
    // one heavy vertex: no 2-partition gives both sides 0.45 of the weight
    write(dir.path(), "g.json", &json!({"alpha": [10, 1, 1], "beta": [[0, 1, 1], [1, 0, 1], [1, 1, 0]]}));
    let out = run(&["density", "--graph", "g.json", "--q", "2", "--balance", "c:0.45"], dir.path());
    assert_eq!(code(&out), 4, "{}", String::from_utf8_lossy(&out.stderr));
}

#[test]
fn resource_guard_exit_code_and_override() {
    let dir = TempDir::new().unwrap();
    let n = 9;
    let beta: Vec<Vec<f64>> = (0..n)
        .map(|i| (0..n).map(|j| (((i + j) * 31 + i * j * 13) % 97) as f64 / 96.0).collect())
        .collect();
    write(dir.path(), "g.json", &json!({"alpha": vec![1.0; n], "beta": beta}));
    let out = run(&["cutdist", "--graph", "g.json", "--other", "g.json"], dir.path());
    assert_eq!(code(&out), 3, "{}", String::from_utf8_lossy(&out.stderr));
    assert!(String::from_utf8_lossy(&out.stderr).contains("perm_max_n"));
    let out = run(&["cutdist", "--graph", "g.json", "--other", "g.json", "--guards", "off"], dir.path());
    let v = stdout_json(&out);
    assert_eq!(v["result"]["value"], json!(0.0));
    assert_eq!(v["guards"], "off");
    assert!(String::from_utf8_lossy(&out.stderr).contains("guards are off"));
}

#[test]
fn config_file_precedence_and_seed_sources() {
    let dir = TempDir::new().unwrap();
    write(dir.path(), "g.json", &small_graph());
    write(dir.path(), "cfg.json", &json!({"graph": "g.json", "q": 3, "balance": "c:0.1", "seed": 5}));
    let v = stdout_json(&run(&["density", "--config", "cfg.json"], dir.path()));
    assert_eq!(v["result"]["q"], 3);
    assert_eq!(v["seed"], 5);
    let v = stdout_json(&run(&["density", "--config", "cfg.json", "--q", "2", "--seed", "8"], dir.path()));
    assert_eq!(v["result"]["q"], 2);
    assert_eq!(v["seed"], 8);
    let out = bin()
        .args(["density", "--graph", "g.json"])
        .env("CUTDENS_SEED", "42")
        .current_dir(dir.path())
        .output()
        .unwrap();
    assert_eq!(stdout_json(&out)["seed"], 42);
}

#[test]
fn csv_output_to_file_has_header_and_full_precision() {
    let dir = TempDir::new().unwrap();
    write(dir.path(), "g.json", &small_graph());
    let out = run(
        &["sample-test", "--graph", "g.json", "--k", "4", "--reps", "5", "--seed", "3", "--out", "csv", "-o", "r.csv"],
        dir.path(),
    );
    assert!(out.status.success());
    let text = std::fs::read_to_string(dir.path().join("r.csv")).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert!(lines[0].starts_with("# tool: cutdens "));
    assert_eq!(lines[2], "# seed: 3");
    assert_eq!(lines[5], "rep,f_sample,deviation");
    assert_eq!(lines.len(), 11);
    for line in &lines[6..] {
        let dev = line.split(',').nth(2).unwrap();
        assert!(dev.contains('e'));
        let _: f64 = dev.parse().unwrap();
    }
}

#[test]
fn check_mode_validates_without_running() {
    let dir = TempDir::new().unwrap();
    write(dir.path(), "g.json", &small_graph());
    let v = stdout_json(&run(&["--check", "density", "--graph", "g.json", "--q", "3"], dir.path()));
    assert_eq!(v["valid"], json!(true));
    let out = run(&["--check", "qp", "--graph", "g.json", "--q", "4", "--c", "0.3"], dir.path());
    assert_eq!(code(&out), 4);
}

#[test]
fn noise_commands_respect_the_bound() {
    let dir = TempDir::new().unwrap();
    write(dir.path(), "p.json", &json!([[0.7, 0.2], [0.2, 0.6]]));
    let out = run(&["spectral", "--pattern", "p.json", "--ratios", "0.5,0.5", "--K", "0.25", "--ns", "8"], dir.path());
    assert_eq!(code(&out), 2);
    assert!(String::from_utf8_lossy(&out.stderr).contains("min(min p, 1 - max p) = 0.2"));
    let v = stdout_json(&run(&["limit-graph", "--pattern", "p.json", "--ratios", "0.5,0.5"], dir.path()));
    assert_eq!(v["result"]["limit"]["vweights"], json!([0.5, 0.5]));
    let v = stdout_json(&run(
        &["spectral", "--pattern", "p.json", "--ratios", "0.5,0.5", "--K", "0", "--ns", "8"],
        dir.path(),
    ));
    assert!(v["result"]["rows"][0]["s_q2"].as_f64().unwrap() < 1e-20);
}

#[test]
fn subcommands_cover_the_toolbox() {
    let dir = TempDir::new().unwrap();
    write(dir.path(), "g.json", &small_graph());
    write(dir.path(), "f.json", &json!({"k": 3, "edges": [[0, 1], [1, 2]]}));
    let v = stdout_json(&run(&["hom", "--graph", "g.json", "--pattern", "f.json", "--kind", "tinj"], dir.path()));
    assert!(v["result"]["value"].as_f64().unwrap() > 0.0);
    let v = stdout_json(&run(&["hausdorff", "--graph", "g.json", "--other", "g.json", "--q", "2"], dir.path()));
    assert_eq!(v["result"]["value"], json!(0.0));
    let v = stdout_json(&run(&["energy", "--graph", "g.json", "--q", "2"], dir.path()));
    let f = stdout_json(&run(&["density", "--graph", "g.json", "--q", "2"], dir.path()));
    let e = v["result"]["optimum"]["value"].as_f64().unwrap();
    let d = f["result"]["optimum"]["value"].as_f64().unwrap();
    assert!((e - d).abs() < 1e-12, "ground state {e} vs density {d}");
    let v = stdout_json(&run(&["mu-demo", "--ns", "8,12"], dir.path()));
    assert_eq!(v["result"]["rows"].as_array().unwrap().len(), 2);
}

#[test]
fn short_parameter_names_and_qp_summary() {
    let dir = TempDir::new().unwrap();
    write(dir.path(), "g.json", &small_graph());
    let short = run(
        &["sample-test", "--G", "g.json", "--k", "4", "--param", "f2c", "--c", "0.25", "--reps", "5", "--seed", "7", "--out", "csv"],
        dir.path(),
    );
    let long = run(
        &["sample-test", "--graph", "g.json", "--k", "4", "--q", "2", "--balance", "c:0.25", "--reps", "5", "--seed", "7", "--out", "csv"],
        dir.path(),
    );
    assert!(short.status.success(), "{}", String::from_utf8_lossy(&short.stderr));
    let rows = |o: &Output| String::from_utf8_lossy(&o.stdout).lines().filter(|l| !l.starts_with('#')).map(String::from).collect::<Vec<_>>();
    assert_eq!(rows(&short)[0], "rep,f_sample,deviation");
    assert_eq!(rows(&short).len(), 6);
    assert_eq!(rows(&short), rows(&long));

    let clash = run(&["sample-test", "--G", "g.json", "--k", "4", "--param", "f2", "--q", "3", "--c", "0.2"], dir.path());
    assert_eq!(code(&clash), 2);
    let err = String::from_utf8_lossy(&clash.stderr);
    assert!(err.contains("--param and --q"), "{err}");
    assert!(err.contains("--c needs a balanced"), "{err}");

    let v = stdout_json(&run(&["qp", "--G", "g.json", "--q", "2", "--c", "0.2", "--seed", "1"], dir.path()));
    let r = &v["result"];
    for key in ["relaxation_value", "rounded_value", "partition", "fw_gap", "kkt_residual", "per_start_table"] {
        assert!(!r[key].is_null(), "missing {key}");
    }
    assert!(r["rounded_value"].as_f64().unwrap() >= r["relaxation_value"].as_f64().unwrap() - 1e-9);
    assert_eq!(r["per_start_table"].as_array().unwrap().len(), 16);
}
