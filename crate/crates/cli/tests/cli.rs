use std::path::PathBuf;
use std::process::{Command, Output};

fn fracvol(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_fracvol")).args(args).env_remove("FRACVOL_THREADS").output().unwrap()
}

fn scratch(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_TARGET_TMPDIR")).join(name)
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8(o.stderr.clone()).unwrap()
}

struct Table {
    header: serde_json::Value,
    columns: Vec<String>,
    rows: Vec<Vec<f64>>,
}

fn parse_csv(text: &str) -> Table {
    let mut lines = text.lines();
    let first = lines.next().unwrap().strip_prefix("# fracvol ").expect("header line");
    let (_, config) = first.split_once(' ').unwrap();
    let columns = lines.next().unwrap().split(',').map(str::to_string).collect();
    let rows = lines.map(|l| l.split(',').map(|v| v.parse().unwrap()).collect()).collect();
    Table { header: serde_json::from_str(config).unwrap(), columns, rows }
}

fn read_csv(path: &PathBuf) -> Table {
    parse_csv(&std::fs::read_to_string(path).unwrap())
}

#[test]
fn no_arguments_prints_usage_and_exits_2() {
    let o = fracvol(&[]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("Usage"));
}

#[test]
fn help_and_version_exit_0() {
    assert_eq!(fracvol(&["--help"]).status.code(), Some(0));
    assert_eq!(fracvol(&["--version"]).status.code(), Some(0));
    assert_eq!(fracvol(&["price", "--help"]).status.code(), Some(0));
}

#[test]
fn unknown_flags_exit_2() {
    assert_eq!(fracvol(&["price", "--bogus"]).status.code(), Some(2));
    assert_eq!(fracvol(&["nosuch"]).status.code(), Some(2));
}

#[test]
fn simulate_writes_time_and_z_with_config_header() {
    let o = fracvol(&["simulate", "--span", "1", "--seed", "4"]);
    assert_eq!(o.status.code(), Some(0));
    let t = parse_csv(&stdout(&o));
    assert_eq!(t.columns, ["time", "z"]);
    assert_eq!(t.rows.len(), 201);
    assert_eq!(t.header["seed"], 4);
    assert_eq!(t.header["hurst"], 0.6);
    assert_eq!(t.header["eps"], 0.1);
    assert!((t.rows[200][0] - 1.0).abs() < 1e-12);
}

#[test]
fn simulate_methods_and_multiple_paths() {
    for method in ["moving-average", "cholesky", "circulant"] {
        let o = fracvol(&["simulate", "--span", "0.5", "--paths", "3", "--method", method, "--with-ou"]);
        assert_eq!(o.status.code(), Some(0), "{method}: {}", stderr(&o));
        let t = parse_csv(&stdout(&o));
        assert_eq!(t.columns, ["time", "z_0", "z_1", "z_2", "z_ou_0", "z_ou_1", "z_ou_2"]);
        assert!(t.rows.iter().flatten().all(|v| v.is_finite()));
    }
}

#[test]
fn simulate_rejects_coarse_grids_by_field() {
    let o = fracvol(&["simulate", "--steps-per-eps", "5"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("steps-per-eps"));
}

#[test]
fn price_emits_decomposition_fields() {
    let o = fracvol(&[
        "price",
        "--hurst",
        "0.6",
        "--epsilon",
        "0.05",
        "--rho",
        "-0.5",
        "--strike",
        "90,100",
        "--maturity",
        "1",
        "--spot",
        "100",
        "--seed",
        "3",
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let doc: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(doc["command"], "price");
    assert_eq!(doc["config"]["seed"], 3);
    let prices = doc["result"]["prices"].as_array().unwrap();
    assert_eq!(prices.len(), 2);
    for p in prices {
        for key in ["q0", "phi", "random_term", "skew_term", "total", "a_F", "tau_bar"] {
            assert!(p[key].is_f64(), "missing {key}");
        }
        let sum = p["q0"].as_f64().unwrap() + p["random_term"].as_f64().unwrap() + p["skew_term"].as_f64().unwrap();
        assert!((sum - p["total"].as_f64().unwrap()).abs() < 1e-12);
    }
}

#[test]
fn price_csv_and_config_file() {
    let cfg = scratch("price_config.json");
    std::fs::write(&cfg, r#"{"model": {"hurst": 0.7, "eps": 0.02}, "options": {"kind": "put", "strikes": [95, 105], "maturities": [0.5, 1]}}"#).unwrap();
    let o = fracvol(&["price", "--config", cfg.to_str().unwrap(), "--format", "csv"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let t = parse_csv(&stdout(&o));
    assert_eq!(t.columns[..7], ["strike", "maturity", "q0", "phi", "random_term", "skew_term", "total"]);
    assert_eq!(t.rows.len(), 4);
    assert_eq!(t.header["model"]["hurst"], 0.7);
    assert_eq!(t.header["options"]["kind"], "put");
}

#[test]
fn validation_errors_name_the_field_and_exit_2() {
    let cases: [(&[&str], &str); 6] = [
        (&["price", "--rho", "1.5"], "market.rho"),
        (&["price", "--hurst", "0.45"], "model.hurst"),
        (&["price", "--spot", "-1"], "market.spot"),
        (&["price", "--maturity", "0"], "options.maturities"),
        (&["price", "--vol-spec", r#"{"kind": "logistic", "params": {"lo": 0.5, "hi": 0.1}}"#], "vol"),
        (&["validate", "--paths", "10"], "mc"),
    ];
    for (args, field) in cases {
        let o = fracvol(args);
        assert_eq!(o.status.code(), Some(2), "{args:?}");
        assert!(stderr(&o).contains(field), "{args:?}: {}", stderr(&o));
    }
}

#[test]
fn unknown_config_keys_are_rejected() {
    let cfg = scratch("typo_config.json");
    std::fs::write(&cfg, r#"{"model": {"hurst": 0.6}, "sed": 1}"#).unwrap();
    let o = fracvol(&["price", "--config", cfg.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("sed"));
}

#[test]
fn io_failures_exit_3() {
    let o = fracvol(&["figures", "--fig", "2", "--out", "/nonexistent-dir/fig.csv"]);
    assert_eq!(o.status.code(), Some(3));
    let o = fracvol(&["price", "--config", "/nonexistent-dir/cfg.json"]);
    assert_eq!(o.status.code(), Some(3));
}

#[test]
fn thread_cap_is_validated() {
    let bad = Command::new(env!("CARGO_BIN_EXE_fracvol"))
        .args(["figures", "--fig", "2"])
        .env("FRACVOL_THREADS", "zero")
        .output()
        .unwrap();
    assert_eq!(bad.status.code(), Some(2));
    assert!(stderr(&bad).contains("FRACVOL_THREADS"));
    let ok = Command::new(env!("CARGO_BIN_EXE_fracvol"))
        .args(["figures", "--fig", "2"])
        .env("FRACVOL_THREADS", "1")
        .output()
        .unwrap();
    assert_eq!(ok.status.code(), Some(0));
}

#[test]
fn figure_3_columns_and_ordering() {
    let out = scratch("fig3.csv");
    let o = fracvol(&["figures", "--fig", "3", "--seed", "1", "--out", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    let t = read_csv(&out);
    assert_eq!(t.columns[..4], ["tau_rel", "mean_0.9", "mean_1.0", "mean_1.1"]);
    assert!(t.columns.contains(&"plus_sd_1.0".to_string()) && t.columns.contains(&"minus_sd_1.1".to_string()));
    assert_eq!(t.header["fig"], 3);
    assert_eq!(t.header["job"]["config"]["hurst"], 0.6);
    assert_eq!(t.header["job"]["config"]["a_f"], 0.1);
    assert_eq!(t.header["job"]["config"]["amplitude"], 0.04);
    for r in &t.rows {
        assert!(r[1] < r[2] && r[2] < r[3], "bottom to top at τ/τ̄ = {}", r[0]);
        for k in 1..4 {
            assert!(r[k + 3] > r[k] && r[k + 6] < r[k]);
        }
    }
}

#[test]
fn figure_5_iv_ordering() {
    let o = fracvol(&["figures", "--fig", "5"]);
    let t = parse_csv(&stdout(&o));
    assert_eq!(t.columns[..4], ["tau_rel", "mean_0.9", "mean_1.0", "mean_1.1"]);
    assert!(t.rows.iter().all(|r| r[1] < r[2] && r[2] < r[3]));
}

#[test]
fn ivsurface_columns() {
    let o = fracvol(&["ivsurface", "--fig", "6", "--n-tau", "5", "--moneyness", "0.9,1.1"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let t = parse_csv(&stdout(&o));
    assert_eq!(t.columns, ["tau_rel", "moneyness", "mean_iv", "iv_plus_sd", "iv_minus_sd"]);
    assert_eq!(t.rows.len(), 10);
    let o = fracvol(&["ivsurface", "--fig", "4", "--n-tau", "3"]);
    let t = parse_csv(&stdout(&o));
    assert_eq!(t.columns, ["tau_rel", "moneyness", "mean_price", "price_plus_sd", "price_minus_sd"]);
}

#[test]
fn correlation_figures_hit_their_anchors() {
    let t = parse_csv(&stdout(&fracvol(&["figures", "--fig", "7"])));
    assert_eq!(t.columns, ["delta", "correlation"]);
    let mid = t.rows.len() / 2;
    assert_eq!(t.rows[mid][0], 0.0);
    assert!((t.rows[mid][1] - 1.0).abs() < 1e-12);
    assert!(t.rows[0][1] < 1e-3 && t.rows.last().unwrap()[1] < 1e-3);
    assert!(t.rows.iter().flat_map(|r| r.iter().skip(1)).all(|c| (-1.0..=1.0).contains(c)));

    let t = parse_csv(&stdout(&fracvol(&["figures", "--fig", "10"])));
    assert_eq!(t.columns, ["delta", "correlation", "reference"]);
    let last = t.rows.last().unwrap();
    assert!((last[0] - 1e3).abs() < 1e-9);
    // The asymptote is approached from above, slowly.
    assert!(last[1] < last[2] && last[1] > 0.3 * last[2]);

    for fig in ["9", "13"] {
        let t = parse_csv(&stdout(&fracvol(&["figures", "--fig", fig])));
        assert!((t.rows[0][1] - 1.0).abs() < 1e-12);
        assert!(t.rows.windows(2).all(|w| w[1][1] <= w[0][1]), "fig {fig} decreasing");
    }
}

#[test]
fn figure_2_correlation_panel() {
    let t = parse_csv(&stdout(&fracvol(&["figures", "--fig", "2"])));
    assert_eq!(t.columns, ["s", "c_fou", "c_ou"]);
    let far = t.rows.last().unwrap();
    assert!(far[1] > far[2], "the fOU tail is heavier");
}

#[test]
fn ttfield_realisations_are_seeded() {
    let run = |seed: &str| {
        stdout(&fracvol(&[
            "ttfield",
            "--mode",
            "fixed-ttm",
            "--output",
            "realization",
            "--grid-size",
            "64",
            "--seed",
            seed,
        ]))
    };
    let a = run("5");
    assert_eq!(a, run("5"));
    assert_ne!(a, run("6"));
    let t = parse_csv(&a);
    assert_eq!(t.columns, ["t", "psi"]);
    assert_eq!(t.rows.len(), 64);
}

#[test]
fn ttfield_free_mode_lattice() {
    let o = fracvol(&["ttfield", "--mode", "free", "--grid-size", "4"]);
    let t = parse_csv(&stdout(&o));
    assert_eq!(t.columns, ["t", "maturity", "correlation"]);
    assert_eq!(t.rows.len(), 16);
    let o = fracvol(&["ttfield", "--mode", "free", "--output", "realization", "--grid-size", "4", "--draws", "2"]);
    let t = parse_csv(&stdout(&o));
    assert_eq!(t.columns, ["t", "maturity", "psi_0", "psi_1"]);
    assert_eq!(fracvol(&["ttfield", "--mode", "free", "--grid-size", "64"]).status.code(), Some(2));
}

#[test]
fn every_figure_is_produced() {
    for fig in 1..=13 {
        let out = scratch(&format!("all_fig{fig}.csv"));
        let o = fracvol(&["figures", "--fig", &fig.to_string(), "--out", out.to_str().unwrap()]);
        assert_eq!(o.status.code(), Some(0), "fig {fig}: {}", stderr(&o));
        let t = read_csv(&out);
        assert_eq!(t.header["fig"], fig);
        assert!(!t.rows.is_empty());
    }
    assert_eq!(fracvol(&["figures", "--fig", "0"]).status.code(), Some(2));
}

#[test]
fn replay_reproduces_files_byte_for_byte() {
    let runs: [&[&str]; 3] = [
        &["figures", "--fig", "11"],
        &["simulate", "--span", "0.5", "--seed", "9"],
        &["price", "--strike", "100", "--maturity", "0.5"],
    ];
    for (k, args) in runs.iter().enumerate() {
        let first = scratch(&format!("replay_src_{k}"));
        let mut full = args.to_vec();
        full.extend(["--out", first.to_str().unwrap()]);
        assert_eq!(fracvol(&full).status.code(), Some(0));
        let again = fracvol(&["replay", first.to_str().unwrap()]);
        assert_eq!(again.status.code(), Some(0), "{}", stderr(&again));
        assert_eq!(stdout(&again), std::fs::read_to_string(&first).unwrap(), "{args:?}");
    }
}

#[test]
fn validate_reports_a_verdict_and_exits_0() {
    let out = scratch("validate.json");
    let o = fracvol(&[
        "validate",
        "--eps-ladder",
        "0.1,0.05,0.025,0.0125",
        "--paths",
        "1000",
        "--hurst",
        "0.6",
        "--rho",
        "-0.5",
        "--seed",
        "2",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let doc: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&out).unwrap()).unwrap();
    let verdict = doc["result"]["verdict"].as_str().unwrap();
    assert!(["pass", "fail", "inconclusive"].contains(&verdict));
    assert_eq!(doc["result"]["convergence"]["rungs"].as_array().unwrap().len(), 4);
    assert_eq!(doc["config"]["run"]["options"]["kind"], "put");
    assert_eq!(doc["config"]["run"]["mc"]["seed"], 2);
}

#[test]
fn validate_rejects_short_ladders() {
    let o = fracvol(&["validate", "--eps-ladder", "0.1,0.05"]);
    assert_eq!(o.status.code(), Some(2));
}
