use std::process::{Command, Output};

fn gkcs(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_gkcs"))
        .args(args)
        .output()
        .expect("spawn gkcs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn table(o: &Output) -> (Vec<String>, Vec<Vec<String>>) {
    let mut rdr = csv::Reader::from_reader(o.stdout.as_slice());
    let headers = rdr.headers().unwrap().iter().map(String::from).collect();
    let rows = rdr
        .records()
        .map(|r| r.unwrap().iter().map(String::from).collect())
        .collect();
    (headers, rows)
}

fn column(o: &Output, name: &str) -> Vec<f64> {
    let (h, rows) = table(o);
    let k = h
        .iter()
        .position(|c| c == name)
        .unwrap_or_else(|| panic!("no column {name}"));
    rows.iter().map(|r| r[k].parse().unwrap()).collect()
}

#[test]
fn eigen_spacing_is_four_beta() {
    let o = gkcs(&[
        "eigen",
        "--rho",
        "1",
        "--kappa0",
        "1",
        "--m-max",
        "5",
        "--xi-grid",
        "0.5:2:4",
    ]);
    assert_eq!(o.status.code(), Some(0));
    let (h, rows) = table(&o);
    assert_eq!(h, ["m", "lambda_m", "xi", "psi"]);
    assert_eq!(rows.len(), 6 * 4);
    let lam = column(&o, "lambda_m");
    for m in 0..5 {
        assert!((lam[(m + 1) * 4] - lam[m * 4] - 4.0).abs() < 1e-13);
    }
}

#[test]
fn cs_eval_at_zero_label_is_real_and_routes_agree() {
    let o = gkcs(&[
        "cs-eval",
        "--gamma",
        "2.5",
        "--beta",
        "1",
        "--theta",
        "1.5707963267948966",
        "--epsilon",
        "0.1",
        "--x",
        "0",
        "--xi-grid",
        "0.1:4:25",
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let scale = column(&o, "closed_abs2").into_iter().fold(0.0, f64::max).sqrt();
    assert!(column(&o, "closed_im").iter().all(|v| v.abs() <= 1e-9 * scale));
    assert!(column(&o, "abs_diff").iter().all(|&v| v <= 1e-8 * scale));
}

#[test]
fn cs_norm_routes_agree() {
    let o = gkcs(&[
        "cs-norm", "--alpha", "2", "--beta", "0.5", "--theta", "2.0", "--x", "-2:3:6",
    ]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(column(&o, "x"), [-2.0, -1.0, 0.0, 1.0, 2.0, 3.0]);
    assert!(column(&o, "rel_diff").iter().all(|&v| v < 1e-8));
}

#[test]
fn overlap_matrix_has_unit_diagonal() {
    let o = gkcs(&[
        "overlap", "--gamma", "1.8", "--beta", "2", "--x", "-1,0,2.5", "--theta", "1.1",
    ]);
    assert_eq!(o.status.code(), Some(0));
    let (_, rows) = table(&o);
    assert_eq!(rows.len(), 9);
    let abs = column(&o, "abs");
    for i in 0..3 {
        assert!((abs[4 * i] - 1.0).abs() < 1e-12);
    }
    assert!(column(&o, "series_abs_diff").iter().all(|&v| v < 1e-8));
}

#[test]
fn measure_and_mp_poly_tables() {
    let o = gkcs(&["measure", "--gamma", "2.5", "--beta", "1", "--x-grid", "-3:3:7"]);
    assert_eq!(o.status.code(), Some(0));
    let d = column(&o, "density");
    assert!(d.iter().all(|&v| v > 0.0));
    // θ = π/2 makes the density even in x.
    for k in 0..3 {
        assert!((d[k] - d[6 - k]).abs() <= 1e-12 * d[k]);
    }

    let o = gkcs(&[
        "mp-poly", "--gamma", "3", "--beta", "1", "--m-max", "12", "--theta", "0.8", "--x-grid", "-2:2:5",
    ]);
    assert_eq!(o.status.code(), Some(0));
    let (rec, hyp) = (column(&o, "recurrence"), column(&o, "hypergeometric"));
    assert_eq!(rec.len(), 13 * 5);
    for (r, h) in rec.iter().zip(&hyp) {
        assert!((r - h).abs() <= 1e-10 * r.abs().max(1.0));
    }
}

#[test]
fn outputs_are_byte_identical_across_runs() {
    let args = [
        "cs-eval",
        "--gamma",
        "3.5",
        "--beta",
        "2",
        "--x",
        "-1,0.7",
        "--xi-grid",
        "0.2:3:40",
        "--format",
        "json",
    ];
    assert_eq!(gkcs(&args).stdout, gkcs(&args).stdout);
}

#[test]
fn json_has_config_rows_and_reports() {
    let o = gkcs(&[
        "eigen",
        "--gamma",
        "2.5",
        "--beta",
        "1",
        "--m-max",
        "1",
        "--xi-grid",
        "1",
        "--format",
        "json",
    ]);
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["config"]["command"], "eigen");
    assert_eq!(v["rows"].as_array().unwrap().len(), 2);
    assert_eq!(v["rows"][1]["m"], 1);
    assert!(v["reports"].as_array().unwrap().is_empty());
    // 17 significant digits survive into the JSON text.
    assert!(stdout(&o).contains("\"lambda_m\": 5.0000000000000000e+0"));

    let o = gkcs(&["verify", "--suite", "kernel_oracle", "--format", "json"]);
    assert_eq!(o.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["reports"][0]["module"], "resolution");
    assert_eq!(v["reports"][0]["passed"], true);
}

#[test]
fn config_file_values_are_overridden_by_flags() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.cfg");
    let out = dir.path().join("out.csv");
    std::fs::write(&cfg, "# model\ngamma = 2.5\nbeta = 1\nm_max = 3\nxi-grid = 1\n").unwrap();
    let o = gkcs(&[
        "eigen",
        "--config",
        cfg.to_str().unwrap(),
        "--beta",
        "2",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(0));
    assert!(o.stdout.is_empty());
    let text = std::fs::read_to_string(&out).unwrap();
    let lam0: f64 = text.lines().nth(1).unwrap().split(',').nth(1).unwrap().parse().unwrap();
    assert_eq!(lam0, 2.0 * 2.0 * 2.5);
    assert_eq!(text.lines().count(), 1 + 4);
}

#[test]
fn validation_errors_exit_1() {
    for args in [
        vec!["eigen"],
        vec!["eigen", "--gamma", "2.5", "--alpha", "1", "--beta", "1"],
        vec!["eigen", "--rho", "1"],
        vec!["eigen", "--rho", "1", "--kappa0", "1", "--beta", "1"],
        vec!["cs-eval", "--gamma", "2.5", "--beta", "1", "--theta", "4"],
        vec!["cs-eval", "--gamma", "2.5", "--beta", "1", "--tol", "-1"],
        vec!["eigen", "--gamma", "2.5", "--beta", "1", "--xi-grid", "0:1:0"],
        vec!["verify", "--suite", "nonexistent"],
        vec!["eigen", "--gamma", "2.5", "--beta", "1", "--format", "xml"],
        vec!["frobnicate"],
    ] {
        let o = gkcs(&args);
        assert_eq!(o.status.code(), Some(1), "{args:?}");
        assert!(!o.stderr.is_empty());
    }
}

#[test]
fn verification_failure_exits_3_and_names_the_invariant() {
    let o = gkcs(&[
        "verify",
        "--suite",
        "kernel_oracle",
        "--inject-lanczos-perturbation",
        "3:1e-6",
    ]);
    assert_eq!(o.status.code(), Some(3));
    let err = String::from_utf8_lossy(&o.stderr);
    assert!(err.contains("resolution::kernel_series_vs_hardy_hille"), "{err}");
    // The report is still written.
    let (h, rows) = table(&o);
    let k = h.iter().position(|c| c == "passed").unwrap();
    assert_eq!(rows[0][k], "false");
}

#[test]
fn help_exits_0() {
    assert_eq!(gkcs(&["--help"]).status.code(), Some(0));
    assert_eq!(gkcs(&["verify", "--help"]).status.code(), Some(0));
}

#[test]
fn non_convergence_exits_2() {
    let o = gkcs(&[
        "cs-eval",
        "--gamma",
        "2.5",
        "--beta",
        "1",
        "--x",
        "0",
        "--xi-grid",
        "1",
        "--tol",
        "1e-300",
    ]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("did not converge"));
}
