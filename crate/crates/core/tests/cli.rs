use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn fixture(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("../../fixtures")
        .join(name)
}

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_chaincarbon"))
        .args(args)
        .output()
        .unwrap()
}

fn run_scenario(cmd: &[&str], scenario: &Path) -> Output {
    let mut args = cmd.to_vec();
    args.extend(["--scenario", scenario.to_str().unwrap()]);
    run(&args)
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8(o.stderr.clone()).unwrap()
}

fn code(o: &Output) -> i32 {
    o.status.code().unwrap()
}

/// Writes `json` as a scenario in a temp dir next to copies of `datasets`.
fn scenario_in_tempdir(json: &str, datasets: &[(&str, &str)]) -> (tempfile::TempDir, PathBuf) {
    let dir = tempfile::tempdir().unwrap();
    for (name, content) in datasets {
        std::fs::write(dir.path().join(name), content).unwrap();
    }
    let path = dir.path().join("scenario.json");
    std::fs::write(&path, json).unwrap();
    (dir, path)
}

fn csv_rows(text: &str) -> Vec<Vec<String>> {
    text.lines()
        .map(|l| l.split(',').map(str::to_owned).collect())
        .collect()
}

#[test]
fn pow_footprint_eth_fixture() {
    let o = run_scenario(&["pow-footprint"], &fixture("eth_pow.json"));
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let rows = csv_rows(&stdout(&o));
    assert_eq!(
        rows[0].join(","),
        "year,bound,energy_twh,carbon_mtco2,emission_factor_kgco2_per_kwh"
    );
    let lower = rows
        .iter()
        .find(|r| r[0] == "2020" && r[1] == "lower")
        .unwrap();
    assert!((lower[2].parse::<f64>().unwrap() - 2.22).abs() < 0.01);
    assert!((lower[3].parse::<f64>().unwrap() - 0.96).abs() < 0.005);
}

#[test]
fn pow_footprint_weighted_table() {
    let o = run_scenario(&["pow-footprint"], &fixture("eth_pow_weighted.json"));
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    assert!(stdout(&o).contains("2020,upper,11.9100,5.4691,0.4592"));
}

#[test]
fn pow_footprint_missing_dataset() {
    let (_dir, path) = scenario_in_tempdir(
        r#"{"datasets": {"network_series": "gone.csv", "hardware": "hw.csv"}}"#,
        &[],
    );
    let o = run_scenario(&["pow-footprint"], &path);
    assert_eq!(code(&o), 2);
    assert!(stderr(&o).contains("gone.csv"), "{}", stderr(&o));
}

#[test]
fn pow_footprint_empty_series() {
    let (_dir, path) = scenario_in_tempdir(
        r#"{"datasets": {"network_series": "net.csv", "hardware": "hw.csv"}}"#,
        &[
            ("net.csv", "date,hash_rate_ghs,block_reward,tx_fees,market_price_usd\n"),
            ("hw.csv", "name,power_w,price_usd,efficiency_j_per_mh,release_year\nasic,1000,1000,0.1,2020\n"),
        ],
    );
    let o = run_scenario(&["pow-footprint"], &path);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    assert_eq!(
        stdout(&o),
        "year,bound,energy_twh,carbon_mtco2,emission_factor_kgco2_per_kwh\n"
    );
}

#[test]
fn pow_footprint_data_error_is_exit_1() {
    let (_dir, path) = scenario_in_tempdir(
        r#"{"datasets": {"network_series": "net.csv", "hardware": "hw.csv"}, "pow": {"emission_factor": {"2020": 0.4}, "electricity_price": {"2020": 0.1}}}"#,
        &[
            (
                "net.csv",
                "date,hash_rate_ghs,block_reward,tx_fees,market_price_usd\n2020-01-02,1,1,1,1\n2020-01-01,1,1,1,1\n",
            ),
            ("hw.csv", "name,power_w,price_usd,efficiency_j_per_mh,release_year\nasic,1000,1000,0.1,2020\n"),
        ],
    );
    let o = run_scenario(&["pow-footprint"], &path);
    assert_eq!(code(&o), 1);
    assert!(stderr(&o).contains("2020-01-01"), "{}", stderr(&o));
}

#[test]
fn pow_footprint_needs_factors() {
    let (_dir, path) = scenario_in_tempdir(
        r#"{"datasets": {"network_series": "net.csv", "hardware": "hw.csv"}}"#,
        &[
            ("net.csv", "date,hash_rate_ghs,block_reward,tx_fees,market_price_usd\n2020-01-01,1,1,1,1\n"),
            ("hw.csv", "name,power_w,price_usd,efficiency_j_per_mh,release_year\nasic,1000,1000,0.1,2020\n"),
        ],
    );
    assert_eq!(code(&run_scenario(&["pow-footprint"], &path)), 2);
    assert_eq!(code(&run(&["pow-footprint"])), 2);
}

#[test]
fn pos_footprint_defaults() {
    for o in [
        run(&["pos-footprint"]),
        run_scenario(&["pos-footprint"], &fixture("pos_default.json")),
    ] {
        assert_eq!(code(&o), 0, "{}", stderr(&o));
        let rows = csv_rows(&stdout(&o));
        assert_eq!(rows.len(), 3);
        let (lower, upper) = (&rows[1], &rows[2]);
        assert_eq!(&lower[6..], ["903569", "0.0396", "0.0171"]);
        assert_eq!(&upper[6..], ["439507", "0.3119", "0.1348"]);
    }
}

#[test]
fn pos_footprint_overrides() {
    let o = run(&["pos-footprint", "--stake", "32"]);
    assert_eq!(code(&o), 0);
    assert!(csv_rows(&stdout(&o))[1..].iter().all(|r| r[2] == "1"));

    let o = run(&["pos-footprint", "--price", "0"]);
    assert_eq!(code(&o), 1);
    assert!(stderr(&o).contains("zero"), "{}", stderr(&o));
}

#[test]
fn pos_footprint_json() {
    let o = run(&["pos-footprint", "--format", "json"]);
    assert_eq!(code(&o), 0);
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v[0]["bound"], "lower");
    assert_eq!(v[1]["node_count"].as_f64().unwrap().round(), 439_507.0);
}

#[test]
fn project_logistic_crossing() {
    let o = run_scenario(
        &["project", "--model", "logistic"],
        &fixture("logistic_pow.json"),
    );
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let rows = csv_rows(&stdout(&o));
    assert_eq!(
        rows[0].join(","),
        "year,annual_mtco2,cumulative_gtco2,dT_low_c,dT_mean_c,dT_high_c"
    );
    assert_eq!(rows.len(), 101);
    let summary = stderr(&o);
    let mean: i32 = summary
        .split("mean=")
        .nth(1)
        .unwrap()
        .split_whitespace()
        .next()
        .unwrap()
        .parse()
        .unwrap();
    assert!((2065..=2075).contains(&mean), "{summary}");
}

#[test]
fn project_adoption_fixture() {
    let o = run_scenario(
        &["project", "--model", "adoption"],
        &fixture("pos_adoption.json"),
    );
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let rows = csv_rows(&stdout(&o));
    let total: f64 = rows.last().unwrap()[2].parse().unwrap();
    assert!((total - 17.0).abs() <= 0.85);
}

#[test]
fn project_zero_baseline() {
    let (_dir, path) = scenario_in_tempdir(
        r#"{"projection": {"logistic": {"baseline_annual_mtco2": 0}}}"#,
        &[],
    );
    let o = run_scenario(&["project", "--model", "logistic"], &path);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    for row in &csv_rows(&stdout(&o))[1..] {
        assert!(row[1..].iter().all(|v| v.parse::<f64>().unwrap() == 0.0));
    }
    assert!(stderr(&o).contains("low=never mean=never high=never"));
}

#[test]
fn project_flat_full_adoption() {
    let (_dir, path) = scenario_in_tempdir(
        r#"{"datasets": {"adoption": "curves.csv"},
            "projection": {"horizon_years": 10,
                           "adoption": {"baseline_annual_mtco2": 2.5, "current_fraction": 0.5, "introduction_year": 2020}}}"#,
        &[(
            "curves.csv",
            "technology,years_since_introduction,adoption_fraction\nflat,0,1\nflat,50,1\n",
        )],
    );
    let o = run_scenario(&["project", "--model", "adoption"], &path);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let rows = csv_rows(&stdout(&o));
    assert_eq!(rows.len(), 11);
    assert!(rows[1..].iter().all(|r| r[1] == "5.000000"));
}

#[test]
fn project_requires_section() {
    let o = run_scenario(
        &["project", "--model", "adoption"],
        &fixture("logistic_pow.json"),
    );
    assert_eq!(code(&o), 2);
}

#[test]
fn equilibrium_matches_closed_form_and_is_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("eq.csv");
    let args = [
        "equilibrium",
        "--seed",
        "11",
        "--out",
        out.to_str().unwrap(),
    ];
    assert_eq!(code(&run(&args)), 0);
    let first = std::fs::read(&out).unwrap();
    assert_eq!(code(&run(&args)), 0);
    assert_eq!(first, std::fs::read(&out).unwrap());

    let rows = csv_rows(&String::from_utf8(first).unwrap());
    let err: f64 = rows[1][8].parse().unwrap();
    assert!(err <= 0.01);
    assert_eq!(rows[1][2], "903569");
}

#[test]
fn equilibrium_step_limit() {
    let o = run(&["equilibrium", "--max-steps", "1"]);
    assert_eq!(code(&o), 1);
    assert!(stderr(&o).contains("1 steps"), "{}", stderr(&o));
}

#[test]
fn fit_logistic_commands() {
    let tx = fixture("transactions_logistic.csv");
    let o = run(&[
        "fit-logistic",
        "--transactions",
        tx.to_str().unwrap(),
        "--k",
        "779.1e9",
    ]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let rows = csv_rows(&stdout(&o));
    assert_eq!(rows[0].join(","), "k,p0,r0,t0_year,residual_ss,iterations");
    let r0: f64 = rows[1][2].parse().unwrap();
    assert!((r0 - 0.219).abs() < 1e-3);

    let two = fixture("transactions_endpoints.csv");
    assert_eq!(
        code(&run(&[
            "fit-logistic",
            "--transactions",
            two.to_str().unwrap(),
            "--k",
            "779.1e9"
        ])),
        1
    );
    assert_eq!(
        code(&run(&[
            "fit-logistic",
            "--transactions",
            tx.to_str().unwrap(),
            "--k",
            "1000"
        ])),
        2
    );
    assert_eq!(
        code(&run(&[
            "fit-logistic",
            "--transactions",
            "/no/such.csv",
            "--k",
            "1e9"
        ])),
        2
    );
}

#[test]
fn fit_logistic_exact_series() {
    let (k, p0, r0) = (2.0e10_f64, 5.0e4_f64, 0.31_f64);
    let mut csv = String::from("year,transactions\n");
    for year in 2005..2020 {
        let t = f64::from(year - 2005);
        csv.push_str(&format!(
            "{year},{}\n",
            k * p0 / (p0 + (k - p0) * (-r0 * t).exp())
        ));
    }
    let (dir, _) = scenario_in_tempdir("{}", &[("tx.csv", &csv)]);
    let path = dir.path().join("tx.csv");
    let o = run(&[
        "fit-logistic",
        "--transactions",
        path.to_str().unwrap(),
        "--k",
        "2e10",
        "--format",
        "json",
    ]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    let got_p0 = v["params"]["p0"].as_f64().unwrap();
    let got_r0 = v["params"]["r0"].as_f64().unwrap();
    assert!(((got_p0 - p0) / p0).abs() <= 1e-6);
    assert!(((got_r0 - r0) / r0).abs() <= 1e-6);
}

#[test]
fn usage_errors_exit_2() {
    assert_eq!(code(&run(&[])), 2);
    assert_eq!(code(&run(&["nonsense"])), 2);
    assert_eq!(code(&run(&["project", "--model", "cubic"])), 2);
    assert_eq!(code(&run(&["pos-footprint", "--jobs", "0"])), 2);
    assert_eq!(code(&run(&["--help"])), 0);
}

#[test]
fn scenario_errors_exit_2() {
    let (_dir, path) = scenario_in_tempdir(r#"{"pos": {"stake": 5}}"#, &[]);
    assert_eq!(code(&run_scenario(&["pos-footprint"], &path)), 2);
    let (_dir, path) = scenario_in_tempdir("not json", &[]);
    assert_eq!(code(&run_scenario(&["pos-footprint"], &path)), 2);
    assert_eq!(
        code(&run(&[
            "pos-footprint",
            "--scenario",
            "/no/such/scenario.json"
        ])),
        2
    );
}

#[test]
fn parallel_output_matches_serial() {
    let scenario = fixture("eth_pow.json");
    let serial = run_scenario(&["pow-footprint"], &scenario);
    let parallel = run_scenario(&["pow-footprint", "--jobs", "4"], &scenario);
    assert_eq!(serial.stdout, parallel.stdout);
}
