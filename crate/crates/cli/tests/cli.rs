use std::process::{Command, Output};

use probfubini::exact::{parse_rational, Polynomial, Rational};
use probfubini::probabilistic::prob_fubini_poly;
use serde_json::Value;

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_probfubini"))
        .args(args)
        .env("NO_COLOR", "1")
        .output()
        .expect("binary runs")
}

fn json(args: &[&str]) -> Value {
    let out = run(args);
    assert!(
        out.status.success(),
        "{args:?}: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    serde_json::from_slice(&out.stdout).expect("valid JSON")
}

fn strings(v: &Value) -> Vec<String> {
    v.as_array()
        .unwrap()
        .iter()
        .map(|s| s.as_str().unwrap().to_string())
        .collect()
}

#[test]
fn table_bernoulli_row() {
    let doc = json(&[
        "table",
        "--dist",
        "bernoulli:2/5",
        "--lambda",
        "1/2",
        "--n-max",
        "2",
    ]);
    assert_eq!(doc["command"], "table");
    assert_eq!(doc["params"]["lambda"], "1/2");
    let row = &doc["rows"][2];
    assert_eq!(row["n"], 2);
    assert_eq!(strings(&row["coeffs"]), ["0", "1/5", "8/25"]);
    assert_eq!(row["value_at_1"], "13/25");
}

#[test]
fn table_classical_values() {
    let doc = json(&[
        "table", "--dist", "point:1", "--lambda", "0", "--n-max", "4",
    ]);
    let values: Vec<&str> = doc["rows"]
        .as_array()
        .unwrap()
        .iter()
        .map(|r| r["value_at_1"].as_str().unwrap())
        .collect();
    assert_eq!(values, ["1", "1", "3", "13", "75"]);
}

#[test]
fn table_order_r() {
    let doc = json(&[
        "table",
        "--dist",
        "bernoulli:2/5",
        "--lambda",
        "1/2",
        "--n-max",
        "1",
        "--r",
        "2",
    ]);
    assert_eq!(strings(&doc["rows"][1]["coeffs"]), ["0", "4/5"]);
}

#[test]
fn table_coefficients_round_trip() {
    for dist in ["gamma:3/2,2", "discrete:0=1/6,1=1/2,3=1/3", "poisson:3/2"] {
        let doc = json(&["table", "--dist", dist, "--lambda", "-7/2", "--n-max", "6"]);
        for (n, row) in doc["rows"].as_array().unwrap().iter().enumerate() {
            let coeffs: Vec<Rational> = strings(&row["coeffs"])
                .iter()
                .map(|s| parse_rational(s).unwrap())
                .collect();
            let poly = Polynomial::new(coeffs);
            let one = Rational::from_integer(1.into());
            let value = parse_rational(row["value_at_1"].as_str().unwrap()).unwrap();
            assert_eq!(poly.eval(&one), value);
            let lib = prob_fubini_poly(&dist.parse().unwrap(), n, &parse_rational("-7/2").unwrap());
            assert_eq!(poly, lib);
        }
    }
}

#[test]
fn table_csv_format() {
    let out = run(&[
        "table",
        "--dist",
        "bernoulli:2/5",
        "--lambda",
        "1/2",
        "--n-max",
        "2",
        "--format",
        "csv",
    ]);
    assert!(out.status.success());
    assert_eq!(
        String::from_utf8(out.stdout).unwrap(),
        "n,coeffs,value_at_1\n0,1,1\n1,\"0,2/5\",2/5\n2,\"0,1/5,8/25\",13/25\n"
    );
}

#[test]
fn parse_and_domain_errors_exit_2() {
    let out = run(&[
        "table",
        "--dist",
        "poisson:0",
        "--lambda",
        "0",
        "--n-max",
        "2",
    ]);
    assert_eq!(out.status.code(), Some(2));
    let out = run(&[
        "table", "--dist", "point:1", "--lambda", "1/x", "--n-max", "2",
    ]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("1/x"));
    let out = run(&[
        "table",
        "--dist",
        "weibull:2",
        "--lambda",
        "0",
        "--n-max",
        "2",
    ]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("weibull"));
    let out = run(&[
        "table", "--dist", "point:1", "--lambda", "0", "--n-max", "2", "--r", "0",
    ]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn series_examples() {
    let coeffs = |args: &[&str]| -> Vec<String> {
        json(args)["rows"]
            .as_array()
            .unwrap()
            .iter()
            .map(|r| r["coeff"].as_str().unwrap().to_string())
            .collect()
    };
    assert_eq!(
        coeffs(&["series", "--dist", "point:1", "--lambda", "1", "--order", "2", "--x", "1"]),
        ["1", "1", "2"]
    );
    assert_eq!(
        coeffs(&[
            "series",
            "--dist",
            "bernoulli:2/5",
            "--lambda",
            "1/2",
            "--order",
            "0"
        ]),
        ["1"]
    );
    assert_eq!(
        coeffs(&[
            "series",
            "--dist",
            "gamma:1,1",
            "--lambda",
            "1/2",
            "--order",
            "1",
            "--x",
            "1"
        ]),
        ["1", "1"]
    );
}

#[test]
fn series_matches_table_values() {
    let table = json(&[
        "table",
        "--dist",
        "poisson:3/2",
        "--lambda",
        "-1/4",
        "--n-max",
        "6",
    ]);
    let series = json(&[
        "series",
        "--dist",
        "poisson:3/2",
        "--lambda",
        "-1/4",
        "--order",
        "6",
        "--x",
        "1",
    ]);
    for n in 0..=6 {
        assert_eq!(table["rows"][n]["value_at_1"], series["rows"][n]["coeff"]);
    }
}

#[test]
fn verify_selected_identity() {
    let doc = json(&["verify", "--suite", "THM2_16", "--dists", "bernoulli:1"]);
    let rows = doc["rows"].as_array().unwrap();
    assert_eq!(rows.len(), 1);
    assert_eq!(rows[0]["status"], "pass");
    assert!(rows[0]["cases"].as_u64().unwrap() > 0);
}

#[test]
fn verify_unknown_identity() {
    let out = run(&["verify", "--suite", "NOPE"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("unknown identity"));
}

#[test]
fn verify_reports_printed_form_discrepancy() {
    let doc = json(&[
        "verify",
        "--suite",
        "THM2_9_PRINTED,THM2_9_CORRECTED",
        "--dists",
        "bernoulli:2/5",
        "--lambdas",
        "1/2",
        "--n-max",
        "1",
        "--r-max",
        "1",
    ]);
    let rows = doc["rows"].as_array().unwrap();
    assert_eq!(rows[0]["status"], "known-discrepancy");
    assert_eq!(rows[0]["counterexample"]["n"], "1");
    assert_eq!(rows[0]["counterexample"]["r"], "1");
    assert_eq!(rows[0]["lhs"], "2/5");
    assert_eq!(rows[0]["rhs"], "2/5 + 4/5*x");
    assert_eq!(rows[1]["status"], "pass");
}

#[test]
fn verify_spot_check_accompanies_series_identity() {
    let doc = json(&[
        "verify",
        "--suite",
        "THM2_2",
        "--n-max",
        "4",
        "--lambdas",
        "0,1/2,-3,2,7/5",
    ]);
    let spot = &doc["rows"][0]["spot_check"];
    assert_eq!(spot["within_tolerance"], true);
    assert!(spot["abs_error"].as_f64().unwrap() < 1e-9);
}

#[test]
fn verify_rejects_empty_grid_values() {
    let out = run(&["verify", "--n-max", "0"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn output_is_deterministic() {
    let args = [
        "mc",
        "--dist",
        "gamma:3/2,2",
        "--k",
        "2",
        "--n",
        "3",
        "--lambda",
        "1/3",
        "--samples",
        "20000",
        "--seed",
        "9",
    ];
    assert_eq!(run(&args).stdout, run(&args).stdout);
    let args = [
        "table",
        "--dist",
        "discrete:0=1/6,1=1/2,3=1/3",
        "--lambda",
        "13/4",
        "--n-max",
        "5",
        "--format",
        "csv",
    ];
    assert_eq!(run(&args).stdout, run(&args).stdout);
}

#[test]
fn out_flag_writes_file() {
    let dir = std::env::temp_dir().join(format!("probfubini-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("table.json");
    let out = run(&[
        "table",
        "--dist",
        "point:1",
        "--lambda",
        "0",
        "--n-max",
        "3",
        "--out",
        path.to_str().unwrap(),
    ]);
    assert!(out.status.success());
    assert!(out.stdout.is_empty());
    let doc: Value = serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    assert_eq!(doc["rows"][3]["value_at_1"], "13");
    std::fs::remove_dir_all(dir).unwrap();
}

#[test]
fn mc_point_mass_is_exact() {
    let doc = json(&[
        "mc",
        "--dist",
        "point:1",
        "--k",
        "3",
        "--n",
        "2",
        "--lambda",
        "1/2",
        "--samples",
        "1000",
        "--seed",
        "5",
    ]);
    let row = &doc["rows"][0];
    assert_eq!(row["estimate"], 7.5);
    assert_eq!(row["stderr"], 0.0);
    assert_eq!(row["exact"], "15/2");
    assert_eq!(row["z_score"], Value::Null);
}

#[test]
fn mc_rejects_small_samples() {
    let out = run(&[
        "mc",
        "--dist",
        "bernoulli:2/5",
        "--k",
        "2",
        "--n",
        "2",
        "--lambda",
        "1/2",
        "--samples",
        "10",
    ]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn mc_z_scores_stay_small_across_seeds() {
    let configs: [&[&str]; 3] = [
        &["--dist", "bernoulli:2/5", "--k", "2", "--n", "2"],
        &["--dist", "poisson:2", "--k", "3", "--n", "4"],
        &["--dist", "gamma:1,1", "--k", "2", "--n", "3"],
    ];
    for config in configs {
        for seed in 0..20 {
            let seed = seed.to_string();
            let mut args = vec![
                "mc",
                "--lambda",
                "1/2",
                "--samples",
                "50000",
                "--seed",
                &seed,
            ];
            args.extend_from_slice(config);
            let doc = json(&args);
            let z = doc["rows"][0]["z_score"].as_f64().unwrap();
            assert!(z.abs() < 5.0, "{config:?} seed {seed}: z = {z}");
        }
    }
}
