use bubres_cli::run_command;

fn run(args: &[&str]) -> (i32, String) {
    let mut out = Vec::new();
    let argv = std::iter::once("bubres").chain(args.iter().copied());
    let code = run_command(argv, &mut out);
    (code, String::from_utf8(out).unwrap())
}

fn data_rows(csv: &str) -> Vec<&str> {
    csv.lines().filter(|l| !l.starts_with('#')).skip(1).collect()
}

#[test]
fn resonances_json_has_four_entries() {
    let (code, out) = run(&[
        "resonances", "--l", "2", "--epsilon", "0.1", "--weber", "1", "--ca", "2", "--gamma", "1.4", "--format", "json",
    ]);
    assert_eq!(code, 0);
    let v: serde_json::Value = serde_json::from_str(&out).unwrap();
    let rows = v.as_array().unwrap();
    assert_eq!(rows.len(), 4);
    assert!(rows.iter().all(|r| r["value"]["im"].as_f64().unwrap() < 0.0));
}

#[test]
fn csv_header_echoes_every_knob() {
    let (code, out) = run(&["rigid", "--l", "3", "--epsilon", "0.5", "--polish-tol", "1e-13", "--method-boundary", "20"]);
    assert_eq!(code, 0);
    for key in ["epsilon", "weber", "cavitation", "gamma", "method_boundary", "polish_tol", "symmetry_tol", "residue_tol", "max_iter", "axis_k2"] {
        assert!(out.lines().any(|l| l.starts_with(&format!("# {key} = "))), "missing {key}");
    }
    assert!(out.contains("# polish_tol = 1e-13"));
    assert!(out.contains("# method_boundary = 20"));
    assert_eq!(data_rows(&out).len(), 4);
}

#[test]
fn verify_passes() {
    let (code, out) = run(&["verify", "--l-max", "8", "--epsilon", "0.1"]);
    assert_eq!(code, 0);
    assert!(data_rows(&out).iter().all(|r| r.contains(",true,")));
}

#[test]
fn scan_writes_one_row_per_order_plus_summary() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("scan.csv");
    let (code, out) = run(&["scan", "--epsilon", "0.2", "--weber", "1", "--l-max", "12", "--out", path.to_str().unwrap()]);
    assert_eq!(code, 0);
    assert!(out.is_empty());
    let text = std::fs::read_to_string(&path).unwrap();
    let rows = data_rows(&text);
    assert_eq!(rows.len(), 11 + 1);
    assert!(rows.last().unwrap().starts_with("l_star,"));
    assert!(text.contains("# stirling_l = "));
}

#[test]
fn identical_runs_are_byte_identical() {
    let args = ["resonances", "--l-min", "0", "--l-max", "6", "--epsilon", "0.3"];
    assert_eq!(run(&args), run(&args));
}

#[test]
fn config_file_round_trip_and_override() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.toml");
    let (code, first) = run(&["asymptotic", "--l", "4", "--epsilon", "0.5", "--save-config", cfg.to_str().unwrap()]);
    assert_eq!(code, 0);
    let (code, again) = run(&["asymptotic", "--l", "4", "--config", cfg.to_str().unwrap()]);
    assert_eq!(code, 0);
    assert_eq!(first, again);
    let (code, other) = run(&["asymptotic", "--l", "4", "--config", cfg.to_str().unwrap(), "--epsilon", "0.25"]);
    assert_eq!(code, 0);
    assert!(other.contains("# epsilon = 0.25"));
}

#[test]
fn evolve_grid() {
    let (code, out) = run(&[
        "evolve", "--epsilon", "0.1", "--mode", "2,0,1,0", "--mode", "1,0,0.5,0", "--r-max", "3", "--r-steps", "4",
        "--t-max", "0.1", "--t-steps", "2", "--theta", "0.3",
    ]);
    assert_eq!(code, 0);
    let rows = data_rows(&out);
    assert_eq!(rows.len(), 5 * 3);
    // t = 0.05 reaches r = 1.5; beyond it the potential is exactly zero.
    let outside = rows.iter().find(|r| r.starts_with("2.0000000000000000e0,") && r.contains(",5.0000000000000003e-2,")).unwrap();
    let cells: Vec<&str> = outside.split(',').collect();
    assert_eq!(cells[4].parse::<f64>().unwrap(), 0.0);
    assert_eq!(cells[5].parse::<f64>().unwrap(), 0.0);
}

#[test]
fn exit_codes() {
    assert_eq!(run(&["bogus"]).0, 1);
    assert_eq!(run(&["resonances", "--l", "2", "--epsilon", "0.1", "--no-such-flag"]).0, 1);
    assert_eq!(run(&["resonances", "--l", "1", "--epsilon", "0.1"]).0, 1);
    assert_eq!(run(&["resonances", "--l", "2", "--epsilon", "0"]).0, 1);
    assert_eq!(run(&["resonances", "--l", "2"]).0, 1);
    assert_eq!(run(&["resonances", "--l", "2", "--epsilon", "0.1", "--format", "xml"]).0, 1);
    assert_eq!(run(&["evolve", "--epsilon", "0.1", "--mode", "2,0,x,0"]).0, 1);
    assert_eq!(run(&["resonances", "--l", "2", "--epsilon", "0.1", "--out", "/nonexistent-dir/x.csv"]).0, 1);
    // An iteration budget of one cannot converge: numerical failure.
    assert_eq!(run(&["resonances", "--l", "8", "--epsilon", "0.3", "--max-iter", "1"]).0, 2);
    assert_eq!(run(&["--help"]).0, 0);
}

#[test]
fn thread_cap_from_environment() {
    let bin = env!("CARGO_BIN_EXE_bubres");
    let args = ["resonances", "--l-min", "2", "--l-max", "8", "--epsilon", "0.2"];
    let one = std::process::Command::new(bin).args(args).env("BUBRES_THREADS", "1").output().unwrap();
    let many = std::process::Command::new(bin).args(args).env("BUBRES_THREADS", "4").output().unwrap();
    assert!(one.status.success() && many.status.success());
    assert_eq!(one.stdout, many.stdout);
    let bad = std::process::Command::new(bin).args(args).env("BUBRES_THREADS", "zero").output().unwrap();
    assert_eq!(bad.status.code(), Some(1));
}
