use std::path::{Path, PathBuf};
use std::process::{Command, Output};
use std::time::Instant;

use clap::CommandFactory;
use crexlab::cli::Cli;
use crexlab::csv_io::{read_rows, read_sample, Sample};

const SUBCOMMANDS: [&str; 5] = ["measure", "estimate", "simulate", "discriminate", "calibrate"];

fn crexlab(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_crexlab"))
        .args(args)
        .env_remove("CREXLAB_THREADS")
        .output()
        .expect("binary runs")
}

fn stdout(args: &[&str]) -> String {
    let out = crexlab(args);
    assert!(
        out.status.success(),
        "{args:?} exited {:?}: {}",
        out.status.code(),
        String::from_utf8_lossy(&out.stderr)
    );
    String::from_utf8(out.stdout).unwrap()
}

fn exit_code(args: &[&str]) -> i32 {
    crexlab(args).status.code().expect("exit code")
}

fn golden(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/golden").join(name)
}

fn value_column(table: &str) -> Vec<String> {
    let mut lines = table.lines();
    let header: Vec<&str> = lines.next().unwrap().split_whitespace().collect();
    let col = header.iter().position(|h| *h == "value").unwrap();
    lines
        .map(|l| l.split_whitespace().nth(col).unwrap().to_string())
        .collect()
}

#[test]
fn measure_examples() {
    let out = stdout(&["measure", "--dist", "unif:a=0,b=1", "--design", "minrssu", "--m", "2"]);
    assert_eq!(value_column(&out), ["-0.0333333"]);
    let out = stdout(&["measure", "--dist", "exp:rate=1", "--design", "srs", "--m", "1"]);
    assert_eq!(value_column(&out), ["-0.25"]);
    let out = stdout(&[
        "measure", "--dist", "unif:a=0,b=1", "--design", "minrssu", "--m", "2", "--precision", "3",
    ]);
    assert_eq!(value_column(&out), ["-0.0333"]);
}

#[test]
fn measure_json_and_raw() {
    let out = stdout(&[
        "measure", "--dist", "unif", "--design", "minrssu", "--m", "2", "--format", "json",
    ]);
    let v: serde_json::Value = serde_json::from_str(&out).unwrap();
    assert_eq!(v[0]["value"].as_f64().unwrap(), -1.0 / 30.0);
    let out = stdout(&["measure", "--dist", "unif", "--design", "minrssu", "--m", "2", "--raw"]);
    assert_eq!(value_column(&out)[0].parse::<f64>().unwrap(), -1.0 / 30.0);
}

#[test]
fn discriminate_examples() {
    let out = stdout(&[
        "discriminate", "--dist", "unif:a=0,b=1", "--mode", "designs", "--m", "2",
    ]);
    assert_eq!(value_column(&out), ["0.00833333"]);
    let out = stdout(&[
        "discriminate", "--dist", "exp:rate=1", "--mode", "min-vs-parent", "--i", "2",
    ]);
    assert_eq!(value_column(&out), ["0.0416667"]);
    let out = stdout(&["discriminate", "--dist", "exp:rate=1", "--i", "1"]);
    assert_eq!(value_column(&out), ["0"]);
    let out = stdout(&[
        "discriminate", "--dist", "exp:rate=1", "--i", "2", "--quadrature", "--format", "json",
    ]);
    let v: serde_json::Value = serde_json::from_str(&out).unwrap();
    assert!((v["value"].as_f64().unwrap() - 1.0 / 24.0).abs() < 1e-8);
}

#[test]
fn exit_codes() {
    assert_eq!(exit_code(&["measure", "--dist", "exp:rate=-1"]), 2);
    assert_eq!(exit_code(&["measure", "--dist", "gamma:k=2"]), 2);
    assert_eq!(exit_code(&["measure", "--dist", "exp", "--colour"]), 2);
    assert_eq!(exit_code(&["estimate", "--estimator", "rmn"]), 2);
    assert_eq!(exit_code(&["measure", "--dist", "exp", "--design", "cumulative"]), 3);
    assert_eq!(exit_code(&["simulate", "--preset", "exp-lstat", "--reps", "2"]), 4);
    assert_eq!(exit_code(&["simulate", "--preset", "nope"]), 2);
    assert_eq!(exit_code(&["simulate", "--preset", "exp", "--reps", "0"]), 2);
}

#[test]
fn partial_grid_still_writes_good_rows() {
    let out = crexlab(&["simulate", "--preset", "exp-lstat", "--reps", "2"]);
    assert_eq!(out.status.code(), Some(4));
    let rows = read_rows(out.stdout.as_slice()).unwrap();
    assert_eq!(rows.len(), 32);
    let stderr = String::from_utf8(out.stderr).unwrap();
    assert_eq!(stderr.lines().filter(|l| l.contains("m=2")).count(), 8, "{stderr}");
}

#[test]
fn exponential_grid_has_forty_rows_and_is_stable() {
    let args = ["simulate", "--preset", "exp-spacing", "--reps", "20", "--seed", "42"];
    let a = stdout(&args);
    assert_eq!(read_rows(a.as_bytes()).unwrap().len(), 40);
    assert_eq!(a, stdout(&args));
}

#[test]
fn one_replication_smoke_run_is_fast() {
    let start = Instant::now();
    stdout(&["simulate", "--preset", "exp-spacing", "--reps", "1"]);
    assert!(start.elapsed().as_secs_f64() < 1.0, "{:?}", start.elapsed());
}

#[test]
fn default_seed_is_announced() {
    let out = stdout(&[
        "simulate", "--dist", "exp", "--m", "2", "--l", "2", "--estimator", "rn", "--reps", "3",
    ]);
    let first = out.lines().next().unwrap();
    assert!(
        first.starts_with("# ") && first.contains("seed=42 (default)"),
        "{first}"
    );
    let out = stdout(&[
        "simulate", "--dist", "exp", "--m", "2", "--l", "2", "--estimator", "rn", "--reps", "3", "--seed", "7",
    ]);
    let first = out.lines().next().unwrap();
    assert!(first.contains("seed=7") && !first.contains("default"), "{first}");
    assert!(read_rows(out.as_bytes()).unwrap().iter().all(|r| r.seed == 7));
}

#[test]
fn thread_count_does_not_change_output() {
    let args = [
        "simulate", "--preset", "unif-spacing", "--m", "2,3", "--reps", "50", "--raw",
    ];
    let one = stdout(&[&args[..], &["--threads", "1"]].concat());
    let four = stdout(&[&args[..], &["--threads", "4"]].concat());
    assert_eq!(one, four);
    let capped = Command::new(env!("CARGO_BIN_EXE_crexlab"))
        .args(args)
        .env("CREXLAB_THREADS", "2")
        .output()
        .unwrap();
    assert_eq!(String::from_utf8(capped.stdout).unwrap(), one);
}

#[test]
fn simulate_csv_round_trips_through_input() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("rows.csv");
    let path_s = path.to_str().unwrap();
    stdout(&[
        "simulate", "--dist", "exp:rate=2", "--dist", "unif:a=0,b=1", "--m", "2,3", "--l", "2", "--estimator",
        "rmn:w=-1", "--estimator", "rn", "--estimator", "vn", "--reps", "25", "--raw", "--output", path_s,
    ]);
    let written = std::fs::read_to_string(&path).unwrap();
    let rows = read_rows(written.as_bytes()).unwrap();
    assert_eq!(rows.len(), 12);
    assert!(rows.iter().all(|r| r.rmse >= r.bias.abs()));
    assert!(rows.iter().filter(|r| r.estimator != "rmn").all(|r| r.w.is_none()));

    let again = stdout(&["simulate", "--input", path_s, "--raw"]);
    assert_eq!(read_rows(again.as_bytes()).unwrap(), rows);
    let json = stdout(&["simulate", "--input", path_s, "--format", "json"]);
    let parsed: Vec<serde_json::Value> = serde_json::from_str(&json).unwrap();
    assert_eq!(parsed.len(), 12);
}

#[test]
fn exported_samples_round_trip_through_estimate() {
    let dir = tempfile::tempdir().unwrap();
    for (design, file) in [("minrssu", "minrssu.csv"), ("srs", "srs.csv")] {
        let path = dir.path().join(file);
        let path_s = path.to_str().unwrap();
        let est = [
            "--estimator", "rn", "--estimator", "lstat", "--estimator", "rmn:w=0", "--raw",
        ];
        let drawn = stdout(
            &[
                &[
                    "estimate", "--dist", "exp:rate=1", "--design", design, "--m", "3", "--l", "4", "--seed", "9",
                ][..],
                &["--export-sample", path_s],
                &est,
            ]
            .concat(),
        );
        let sample = read_sample(std::fs::File::open(&path).unwrap()).unwrap();
        match (design, &sample) {
            ("minrssu", Sample::MinRssu(s)) => assert_eq!(s.values().len(), 12),
            ("srs", Sample::Srs(v)) => assert_eq!(v.len(), 12),
            _ => panic!("{design}: {sample:?}"),
        }
        let read = stdout(&[&["estimate", "--input", path_s, "--m", "3"][..], &est].concat());
        assert_eq!(value_column(&drawn), value_column(&read), "{design}");
    }
}

#[test]
fn config_file_drives_simulate() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("grid.toml");
    std::fs::write(
        &path,
        "distributions = [\"exp:rate=1\"]\nm = [2, 3]\nl = [2]\nreplications = 10\nseed = 5\n\
         [[estimators]]\nname = \"rmn\"\nw_by_m = { 2 = [-2, 0], 3 = [1] }\n[[estimators]]\nname = \"rn\"\n",
    )
    .unwrap();
    let out = stdout(&["simulate", "--config", path.to_str().unwrap()]);
    let rows = read_rows(out.as_bytes()).unwrap();
    assert_eq!(rows.len(), 5);
    assert!(rows.iter().all(|r| r.reps == 10 && r.seed == 5));
    assert_eq!(rows[0].bias, rows[2].bias, "w=-2 at m=2 reproduces rn");

    std::fs::write(&path, "distributions = [\"exp\"]\nbogus = 1\n").unwrap();
    assert_eq!(exit_code(&["simulate", "--config", path.to_str().unwrap()]), 2);
}

#[test]
fn calibrate_reports_the_best_point() {
    let out = stdout(&[
        "calibrate", "--dist", "exp:rate=1", "--grid", "0.5,1,2", "--m", "2", "--l", "2", "--estimator", "rn",
        "--target-bias", "-0.1", "--target-rmse", "0.2", "--reps", "50", "--format", "json",
    ]);
    let v: serde_json::Value = serde_json::from_str(&out).unwrap();
    assert_eq!(v["key"], "rate");
    assert_eq!(v["points"].as_array().unwrap().len(), 6);
    assert!(v["best"]["residual"].as_f64().unwrap().is_finite());
    assert_eq!(
        exit_code(&[
            "calibrate", "--dist", "exp", "--grid", "", "--m", "2", "--l", "2", "--estimator", "rn", "--target-bias",
            "0", "--target-rmse", "0"
        ]),
        2
    );
}

#[test]
fn help_matches_golden_files() {
    let top = stdout(&["--help"]);
    assert_eq!(top, std::fs::read_to_string(golden("help.txt")).unwrap());
    for sub in SUBCOMMANDS {
        let text = stdout(&[sub, "--help"]);
        assert_eq!(
            text,
            std::fs::read_to_string(golden(&format!("{sub}.txt"))).unwrap(),
            "{sub}"
        );
    }
}

#[test]
fn help_lists_every_flag() {
    let cmd = Cli::command();
    for sub in cmd.get_subcommands() {
        let text = std::fs::read_to_string(golden(&format!("{}.txt", sub.get_name()))).unwrap();
        for arg in sub.get_arguments() {
            if let Some(long) = arg.get_long() {
                assert!(text.contains(&format!("--{long}")), "{} --{long}", sub.get_name());
            }
        }
    }
}
