use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn dmim(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_dmim"))
        .args(args)
        .env_remove("DMIM_SEED")
        .output()
        .expect("binary runs")
}

fn ok_json(args: &[&str]) -> Value {
    let out = dmim(args);
    assert_eq!(
        out.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    serde_json::from_slice(&out.stdout).unwrap()
}

fn code(args: &[&str]) -> i32 {
    dmim(args).status.code().unwrap()
}

fn stderr(out: &Output) -> String {
    String::from_utf8_lossy(&out.stderr).into_owned()
}

#[test]
fn envelope_shape() {
    let v = ok_json(&["relate", "--sigma", "1", "--epsilon", "0.01", "--d", "0.01"]);
    assert_eq!(v["schema_version"], "1");
    assert_eq!(v["command"], "relate");
    assert_eq!(v["inputs"]["sigma"], 1.0);
    assert!((v["results"]["beta"].as_f64().unwrap() - 1.8034).abs() < 5e-5);
    assert_eq!(v["results"]["vacuous"], true);
}

#[test]
fn json_output_round_trips_byte_for_byte() {
    let commands: [&[&str]; 5] = [
        &[
            "compute",
            "--dist",
            r#"{"family":"normal","params":{"mu":0,"sigma":1}}"#,
        ],
        &["compute", "--dist", "normal", "sigma=0.05"],
        &[
            "plan",
            "--epsilon",
            "0.003",
            "--sigma",
            "2",
            "--beta",
            "0.5",
        ],
        &["relate", "--sigma", "1.5", "--beta", "0.2", "--d", "0.02"],
        &[
            "mc", "--dist", "uniform", "a=0", "b=1", "--n", "500", "--reps", "50",
        ],
    ];
    for args in commands {
        let out = dmim(args);
        assert_eq!(out.status.code(), Some(0), "{args:?}");
        let text = String::from_utf8(out.stdout).unwrap();
        let parsed: Value = serde_json::from_str(&text).unwrap();
        let again = serde_json::to_string_pretty(&parsed).unwrap() + "\n";
        assert_eq!(again, text, "{args:?}");
    }
}

#[test]
fn compute_uniform_is_inverse_e() {
    let v = ok_json(&[
        "compute",
        "--dist",
        r#"{"family":"uniform","params":{"a":0,"b":1}}"#,
    ]);
    assert!((v["results"]["value"].as_f64().unwrap() - (-1f64).exp()).abs() < 1e-15);
    assert_eq!(v["results"]["engine"], "closed_form");
}

#[test]
fn compute_small_sigma_flags_bound() {
    let v = ok_json(&["compute", "--dist", "normal", "σ=0.05", "--engine", "auto"]);
    let r = &v["results"];
    assert_eq!(r["engine"], "normal_hat");
    let bound = 3.0 * 0.05 / std::f64::consts::E;
    assert!((r["abs_error_bound"].as_f64().unwrap() - bound).abs() < 1e-15);
    assert!(r["warnings"][0].as_str().unwrap().contains("3σ/e"));
}

#[test]
fn compute_every_engine_on_normal() {
    let mut values = Vec::new();
    for engine in ["quadrature", "series", "renyi"] {
        let v = ok_json(&["compute", "--dist", "normal:sigma=1", "--engine", engine]);
        values.push(v["results"]["value"].as_f64().unwrap());
    }
    assert!(
        values
            .iter()
            .all(|x| (x - 0.758_997_778_271_017_1).abs() < 1e-9),
        "{values:?}"
    );
    let auto = ok_json(&["compute", "--dist", "normal:sigma=1"]);
    assert!(auto["results"]["approximations"]["tilde2"]["value"].is_number());
}

#[test]
fn series_divergence_exits_three() {
    let out = dmim(&[
        "compute", "--engine", "series", "--dist", "gamma", "α=0.5", "λ=1",
    ]);
    assert_eq!(out.status.code(), Some(3));
    let err = stderr(&out);
    assert!(err.contains("diverges"), "{err}");
    assert!(err.contains("--engine quadrature"), "{err}");
}

#[test]
fn input_errors_exit_two() {
    assert_eq!(code(&["compute", "--dist", "normal", "sigma=-1"]), 2);
    assert_eq!(code(&["compute", "--dist", "{not json"]), 2);
    assert_eq!(
        code(&["compute", "--engine", "closed", "--dist", "normal", "sigma=1"]),
        2
    );
    assert_eq!(code(&["plan", "--epsilon", "1.5", "--sigma", "1"]), 2);
    assert_eq!(
        code(&["plan", "--epsilon", "0.01", "--sigma", "1", "--beta", "2.2"]),
        2
    );
    assert_eq!(code(&["relate", "--sigma", "1", "--epsilon", "0.01"]), 2);
    assert_eq!(code(&["table2", "--families", "cauchy", "--reps", "1"]), 2);
    assert_eq!(code(&["nonsense"]), 2);
}

#[test]
fn plan_examples() {
    let v = ok_json(&[
        "plan",
        "--epsilon",
        "0.001",
        "--sigma",
        "1",
        "--rounding",
        "paper-floor",
    ]);
    assert_eq!(v["results"]["n"], 79497);

    let v = ok_json(&[
        "plan",
        "--epsilon",
        "0.01",
        "--dist",
        "nakagami",
        "m=2",
        "Ω=10",
    ]);
    let sigma = v["results"]["sigma"].as_f64().unwrap();
    assert!((sigma * sigma - 1.16427).abs() < 1e-5);
    // 787.8 / 1.16427 rounded up
    assert_eq!(v["results"]["n"], 677);

    let v = ok_json(&["plan", "--epsilon", "0.5", "--sigma", "1"]);
    assert!(v["results"]["n"].as_u64().unwrap() >= 1);

    let v = ok_json(&[
        "plan",
        "--epsilon",
        "0.01",
        "--sigma",
        "1",
        "--l-of-x",
        "0.759",
    ]);
    assert!(v["results"]["n_with_l_of_x"].as_u64().unwrap() > 0);
}

#[test]
fn table2_csv_deterministic_columns() {
    let out = dmim(&["table2", "--reps", "20"]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    let text = String::from_utf8(out.stdout).unwrap();
    let mut rdr = csv::Reader::from_reader(text.as_bytes());
    assert_eq!(
        rdr.headers().unwrap().iter().collect::<Vec<_>>(),
        ["family", "epsilon", "sigma", "n", "beta", "p_hat", "ci95"]
    );
    let rows: Vec<csv::StringRecord> = rdr.records().map(Result::unwrap).collect();
    assert_eq!(rows.len(), 32);
    let expected = [
        (0.01, 1.0, 787),
        (0.003, 1.0, 8815),
        (0.002, 1.0, 19854),
        (0.001, 1.0, 79497),
        (0.01, 2.0, 196),
        (0.003, 2.0, 2203),
        (0.002, 2.0, 4963),
        (0.001, 2.0, 19874),
    ];
    for r in &rows {
        let eps: f64 = r[1].parse().unwrap();
        let sigma: f64 = r[2].parse().unwrap();
        let n: u64 = r[3].parse().unwrap();
        let want = expected
            .iter()
            .find(|(e, s, _)| *e == eps && *s == sigma)
            .unwrap();
        assert_eq!(n, want.2);
    }
}

#[test]
fn seed_env_var_is_honoured() {
    let run = |seed: Option<&str>| {
        let mut cmd = Command::new(env!("CARGO_BIN_EXE_dmim"));
        cmd.args([
            "mc", "--dist", "normal", "sigma=1", "--n", "3000", "--reps", "200",
        ]);
        match seed {
            Some(s) => cmd.env("DMIM_SEED", s),
            None => cmd.env_remove("DMIM_SEED"),
        };
        let v: Value = serde_json::from_slice(&cmd.output().unwrap().stdout).unwrap();
        v["results"]["seed"].as_u64().unwrap()
    };
    assert_eq!(run(Some("99")), 99);
    assert_eq!(run(None), dmim::simulate::DEFAULT_SEED);
}

#[test]
fn mc_is_reproducible_across_workers() {
    let p = |workers: &str| {
        let v = ok_json(&[
            "mc",
            "--dist",
            "exponential",
            "lambda=2",
            "--n",
            "2000",
            "--reps",
            "300",
            "--workers",
            workers,
        ]);
        v["results"]["p_hat"].as_f64().unwrap()
    };
    assert_eq!(p("1").to_bits(), p("4").to_bits());
}

fn max_gap(path: &Path) -> f64 {
    let mut rdr = csv::Reader::from_path(path).unwrap();
    assert_eq!(
        rdr.headers().unwrap().iter().collect::<Vec<_>>(),
        ["x", "ecdf", "cdf", "abs_gap"]
    );
    rdr.records()
        .map(|r| r.unwrap()[3].parse::<f64>().unwrap())
        .fold(0.0, f64::max)
}

#[test]
fn fit_defaults_write_four_files_with_shrinking_gap() {
    let dir = tempfile::tempdir().unwrap();
    let v = ok_json(&["fit", "--out-dir", dir.path().to_str().unwrap()]);
    let items = v["results"].as_array().unwrap();
    assert_eq!(items.len(), 4);
    let gaps: Vec<f64> = items
        .iter()
        .map(|i| max_gap(Path::new(i["path"].as_str().unwrap())))
        .collect();
    assert!(gaps.windows(2).all(|w| w[1] < w[0]), "{gaps:?}");
    assert_eq!(std::fs::read_dir(dir.path()).unwrap().count(), 4);
}

#[test]
fn fit_single_small_epsilon() {
    let dir = tempfile::tempdir().unwrap();
    let v = ok_json(&[
        "fit",
        "--epsilons",
        "0.001",
        "--out-dir",
        dir.path().to_str().unwrap(),
    ]);
    let path = v["results"][0]["path"].as_str().unwrap();
    assert!(max_gap(Path::new(path)) < 0.02);
    assert_eq!(
        code(&[
            "fit",
            "--epsilons",
            "",
            "--out-dir",
            dir.path().to_str().unwrap()
        ]),
        2
    );
}

#[test]
fn out_flag_writes_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("plan.json");
    let out = dmim(&[
        "plan",
        "--epsilon",
        "0.01",
        "--sigma",
        "1",
        "--out",
        path.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0));
    assert!(out.stdout.is_empty());
    let v: Value = serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap();
    assert_eq!(v["results"]["n"], 788);
}

#[test]
fn figure_csv_headers() {
    let out = dmim(&["figure", "normal-curve", "--sigmas", "1,2"]);
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.starts_with("sigma,l,l_tilde1,l_tilde2,"));
    assert_eq!(text.lines().count(), 3);
    let out = dmim(&[
        "figure",
        "truncation",
        "--sigmas",
        "0.05",
        "--max-terms",
        "30",
    ]);
    assert_eq!(String::from_utf8(out.stdout).unwrap().lines().count(), 32);
}
