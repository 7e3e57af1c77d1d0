use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use datadepth::bench::{generate, Scenario, ScenarioTag};
use datadepth::detect::{fit_scored, FitConfig, ThresholdPolicy};
use datadepth::optimize::{SearchBudget, Strategy};
use datadepth::DepthNotion;
use tempfile::TempDir;

fn run(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_datadepth")).current_dir(dir).args(args).output().expect("binary runs")
}

fn ok(dir: &Path, args: &[&str]) -> String {
    let out = run(dir, args);
    assert!(out.status.success(), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
    String::from_utf8(out.stdout).unwrap()
}

fn exit_code(dir: &Path, args: &[&str]) -> (i32, String) {
    let out = run(dir, args);
    (out.status.code().unwrap(), String::from_utf8_lossy(&out.stderr).into_owned())
}

fn write(dir: &Path, name: &str, text: &str) -> PathBuf {
    let p = dir.join(name);
    fs::write(&p, text).unwrap();
    p
}

/// Rows of a CSV with a header, as field vectors.
fn records(path: &Path) -> (Vec<String>, Vec<Vec<String>>) {
    let text = fs::read_to_string(path).unwrap();
    let mut lines = text.lines();
    let header = lines.next().unwrap().split(',').map(str::to_string).collect();
    (header, lines.map(|l| l.split(',').map(str::to_string).collect()).collect())
}

fn column(path: &Path, name: &str) -> Vec<String> {
    let (header, rows) = records(path);
    let k = header.iter().position(|h| h == name).unwrap_or_else(|| panic!("no column {name}"));
    rows.into_iter().map(|r| r[k].clone()).collect()
}

const SQUARE: &str = "0,0\n1,0\n0,1\n1,1\n";

#[test]
fn halfspace_center_of_square() {
    let dir = TempDir::new().unwrap();
    write(dir.path(), "square.csv", SQUARE);
    write(dir.path(), "q.csv", "x1,x2\n0.5,0.5\n10,10\n");
    let out = ok(dir.path(), &["--seed", "1", "depth", "--reference", "square.csv", "--input", "q.csv", "--notion", "halfspace"]);
    let rows: Vec<&str> = out.lines().collect();
    assert_eq!(rows[0], "index,depth,exactness,u1,u2");
    assert!(rows[1].starts_with("0,0.5,exact"), "{}", rows[1]);
    assert!(rows[2].starts_with("1,0,exact"), "{}", rows[2]);
}

#[test]
fn mahalanobis_at_the_mean_is_one() {
    let dir = TempDir::new().unwrap();
    write(dir.path(), "data.csv", "1,2\n3,0\n2,7\n6,3\n");
    write(dir.path(), "mean.csv", "3,3\n");
    let out = ok(dir.path(), &["depth", "--reference", "data.csv", "--input", "mean.csv", "--notion", "mahalanobis"]);
    assert!(out.lines().nth(1).unwrap().starts_with("0,1,exact"), "{out}");
}

#[test]
fn malformed_cell_exits_2_with_line() {
    let dir = TempDir::new().unwrap();
    write(dir.path(), "bad.csv", "x1,x2\n1,2\n3,abc\n");
    write(dir.path(), "q.csv", "0,0\n");
    let (code, err) = exit_code(dir.path(), &["depth", "--reference", "bad.csv", "--input", "q.csv"]);
    assert_eq!(code, 2);
    assert!(err.contains("bad.csv:3"), "{err}");
    assert!(err.contains("abc"), "{err}");
}

#[test]
fn dimension_mismatch_exits_3() {
    let dir = TempDir::new().unwrap();
    write(dir.path(), "square.csv", SQUARE);
    write(dir.path(), "q.csv", "1,2,3\n");
    let (code, _) = exit_code(dir.path(), &["depth", "--reference", "square.csv", "--input", "q.csv", "--notion", "halfspace"]);
    assert_eq!(code, 3);
}

fn simulate(dir: &Path, seed: &str, scenario: &str, name: &str) {
    ok(dir, &["--seed", seed, "simulate", "--scenario", scenario, "--output", name]);
}

#[test]
fn model_version_mismatch_exits_4() {
    let dir = TempDir::new().unwrap();
    simulate(dir.path(), "3", "clustered_s4", "train.csv");
    ok(dir.path(), &["--seed", "4", "fit", "--input", "train.csv", "--output", "model.json", "--notion", "mahalanobis"]);
    let text = fs::read_to_string(dir.path().join("model.json")).unwrap();
    assert!(text.contains("\"format_version\": 1"));
    write(dir.path(), "model.json", &text.replace("\"format_version\": 1", "\"format_version\": 99"));
    let (code, err) = exit_code(dir.path(), &["score", "--model", "model.json", "--input", "train.csv"]);
    assert_eq!(code, 4, "{err}");
    write(dir.path(), "junk.json", "{ not json");
    assert_eq!(exit_code(dir.path(), &["score", "--model", "junk.json", "--input", "train.csv"]).0, 4);
}

#[test]
fn explain_without_directions_exits_5() {
    let dir = TempDir::new().unwrap();
    simulate(dir.path(), "3", "clustered_s4", "train.csv");
    ok(dir.path(), &["--seed", "4", "fit", "--input", "train.csv", "--output", "model.json", "--notion", "mahalanobis"]);
    let (code, _) = exit_code(dir.path(), &["explain", "--model", "model.json", "--input", "train.csv", "--output-dir", "ex"]);
    assert_eq!(code, 5);
}

#[test]
fn bad_scenarios_exit_6() {
    let dir = TempDir::new().unwrap();
    assert_eq!(exit_code(dir.path(), &["--seed", "1", "bench", "--scenario", "clustered_s4", "--reps", "0"]).0, 6);
    assert_eq!(exit_code(dir.path(), &["--seed", "1", "simulate", "--scenario", "robust_s51", "--epsilon", "0.7"]).0, 6);
    let (code, _) = exit_code(
        dir.path(),
        &["--seed", "1", "bench", "--scenario", "toeplitz_s6", "--n", "100", "--fraction", "0.05", "--reps", "1"],
    );
    assert_eq!(code, 6);
}

#[test]
fn empty_query_file_gives_empty_report() {
    let dir = TempDir::new().unwrap();
    write(dir.path(), "square.csv", SQUARE);
    write(dir.path(), "empty.csv", "");
    let out = ok(dir.path(), &["depth", "--reference", "square.csv", "--input", "empty.csv", "--notion", "halfspace"]);
    assert_eq!(out, "index,depth,exactness,u1,u2\n");
    simulate(dir.path(), "3", "clustered_s4", "train.csv");
    ok(dir.path(), &["--seed", "4", "fit", "--input", "train.csv", "--output", "model.json", "--directions", "50"]);
    ok(dir.path(), &["score", "--model", "model.json", "--input", "empty.csv", "--output", "r.csv"]);
    assert_eq!(records(&dir.path().join("r.csv")).1.len(), 0);
}

#[test]
fn simulate_clustered_counts() {
    let dir = TempDir::new().unwrap();
    simulate(dir.path(), "21", "clustered_s4", "c.csv");
    let labels = column(&dir.path().join("c.csv"), "label");
    assert_eq!(labels.len(), 100);
    assert_eq!(labels.iter().filter(|l| *l == "1").count(), 10);
}

#[test]
fn simulate_output_round_trips_losslessly() {
    let dir = TempDir::new().unwrap();
    simulate(dir.path(), "5", "robust_s51", "r.csv");
    let expected = generate(&Scenario::new(ScenarioTag::RobustS51, 5)).unwrap();
    let (header, rows) = records(&dir.path().join("r.csv"));
    assert_eq!(header.len(), 11);
    assert_eq!(rows.len(), expected.data.nrows());
    for (i, row) in rows.iter().enumerate() {
        let values: Vec<f64> = row[..10].iter().map(|v| v.parse().unwrap()).collect();
        assert_eq!(values, expected.data.row(i));
        assert_eq!(row[10] == "1", expected.labels[i]);
    }
}

#[test]
fn fit_and_score_match_in_process_fit() {
    let dir = TempDir::new().unwrap();
    simulate(dir.path(), "8", "clustered_s4", "train.csv");
    ok(dir.path(), &["--seed", "77", "fit", "--input", "train.csv", "--output", "model.json", "--directions", "300", "--alpha", "0.1"]);
    ok(dir.path(), &["score", "--model", "model.json", "--input", "train.csv", "--output", "report.csv"]);
    let report = dir.path().join("report.csv");
    let flags: Vec<bool> = column(&report, "is_anomaly").iter().map(|v| v == "1").collect();
    let depths: Vec<f64> = column(&report, "depth").iter().map(|v| v.parse().unwrap()).collect();

    let sample = generate(&Scenario::new(ScenarioTag::ClusteredS4, 8)).unwrap();
    let mut cfg = FitConfig::new(
        DepthNotion::Projection,
        SearchBudget::new(Strategy::NelderMead, 300, 77),
    );
    cfg.policy = ThresholdPolicy::Quantile { alpha: 0.1 };
    let (_, reports) = fit_scored(&sample.data, &cfg, None).unwrap();
    assert_eq!(flags, reports.iter().map(|r| r.is_anomaly).collect::<Vec<_>>());
    assert_eq!(depths, reports.iter().map(|r| r.depth.value).collect::<Vec<_>>());
    assert!(flags.iter().any(|f| *f));
}

#[test]
fn score_summary_line() {
    let dir = TempDir::new().unwrap();
    simulate(dir.path(), "8", "clustered_s4", "train.csv");
    ok(dir.path(), &["--seed", "7", "fit", "--input", "train.csv", "--output", "model.json", "--directions", "100"]);
    let out = ok(dir.path(), &["score", "--model", "model.json", "--input", "train.csv", "--output", "r.csv"]);
    assert!(out.starts_with("scored 100 points, "), "{out}");
}

/// New anomalies beyond the training range are flagged as well as the kind
/// seen in training: most of each cluster in nearly every draw.
#[test]
fn extrapolation_test_set_flags_both_clusters() {
    let dir = TempDir::new().unwrap();
    let (mut both, mut normals_flagged) = (0, 0);
    for seed in 100..110u64 {
        let (train_seed, test_seed) = (seed.to_string(), (seed + 1000).to_string());
        ok(dir.path(), &["--seed", &train_seed, "simulate", "--scenario", "extrap_s52", "--output", "train.csv"]);
        ok(
            dir.path(),
            &["--seed", &test_seed, "simulate", "--scenario", "extrap_s52", "--split", "test", "--output", "test.csv"],
        );
        ok(
            dir.path(),
            &[
                "--seed", "3", "fit", "--input", "train.csv", "--output", "m.json", "--directions", "500",
                "--threshold-policy", "detect-all",
            ],
        );
        ok(dir.path(), &["score", "--model", "m.json", "--input", "test.csv", "--output", "r.csv"]);
        let data = records(&dir.path().join("test.csv")).1;
        let flags = column(&dir.path().join("r.csv"), "is_anomaly");
        let (mut old, mut new) = ((0, 0), (0, 0));
        for (row, flag) in data.iter().zip(&flags) {
            let hit = usize::from(flag == "1");
            if row[2] != "1" {
                normals_flagged += hit;
            } else if row[0].parse::<f64>().unwrap() < 0.5 {
                old = (old.0 + hit, old.1 + 1);
            } else {
                new = (new.0 + hit, new.1 + 1);
            }
        }
        assert_eq!((old.1, new.1), (25, 25));
        both += usize::from(old.0 > 12 && new.0 > 12);
    }
    assert!(both >= 9, "both clusters mostly flagged in only {both}/10 draws");
    assert!(normals_flagged < 125, "{normals_flagged} of 2500 normal test points flagged");
}

#[test]
fn explain_bundle() {
    let dir = TempDir::new().unwrap();
    simulate(dir.path(), "12", "clustered_s4", "train.csv");
    ok(dir.path(), &["--seed", "5", "fit", "--input", "train.csv", "--output", "model.json", "--directions", "300"]);
    ok(dir.path(), &["explain", "--model", "model.json", "--input", "train.csv", "--output-dir", "ex", "--points", "0,1"]);
    let ex = dir.path().join("ex");
    let (header, rows) = records(&ex.join("similarity.csv"));
    assert_eq!(header.len(), 100);
    assert_eq!(rows.len(), 100);
    let m: Vec<Vec<f64>> = rows.iter().map(|r| r.iter().map(|v| v.parse().unwrap()).collect()).collect();
    for i in 0..100 {
        assert!((m[i][i] - 1.0).abs() < 1e-12);
        for j in 0..100 {
            assert_eq!(m[i][j], m[j][i]);
        }
    }
    assert_eq!(column(&ex.join("directions.csv"), "index").len(), 100);
    let seq_points: Vec<String> = column(&ex.join("sequences.csv"), "index");
    assert_eq!(seq_points.len(), 200);
    assert_eq!(column(&ex.join("sequences.csv"), "is_own").iter().filter(|v| *v == "1").count(), 2);
    assert!(ex.join("groups.csv").exists());
}

#[test]
fn grid_output() {
    let dir = TempDir::new().unwrap();
    write(dir.path(), "square.csv", SQUARE);
    let out = ok(dir.path(), &["depth", "--reference", "square.csv", "--grid", "-1,2,4", "--notion", "halfspace"]);
    let lines: Vec<&str> = out.lines().collect();
    assert_eq!(lines[0], "x1,x2,depth");
    assert_eq!(lines.len(), 17);
    assert_eq!(lines[1], "-1,-1,0");
}

#[test]
fn bench_tables() {
    let dir = TempDir::new().unwrap();
    let out = ok(
        dir.path(),
        &[
            "--seed", "2", "bench", "--scenario", "clustered_s4", "--reps", "2", "--strategy", "rs,nm", "--directions",
            "40", "--ordered", "ordered.csv", "--timings", "t.tsv",
        ],
    );
    let (rows, summary) = out.split_once("# summary").unwrap();
    assert_eq!(rows.lines().filter(|l| l.starts_with("clustered_s4\t")).count(), 4);
    assert_eq!(summary.lines().filter(|l| l.starts_with("clustered_s4\t")).count(), 2);
    assert_eq!(records(&dir.path().join("ordered.csv")).1.len(), 200);
    assert_eq!(fs::read_to_string(dir.path().join("t.tsv")).unwrap().lines().count(), 5);
}

#[test]
fn output_is_independent_of_workers_and_logs_seed() {
    let dir = TempDir::new().unwrap();
    simulate(dir.path(), "6", "clustered_s4", "train.csv");
    let base = ["depth", "--reference", "train.csv", "--input", "train.csv", "--directions", "100"];
    let one = ok(dir.path(), &[&["--seed", "1", "--workers", "1"][..], &base].concat());
    let three = ok(dir.path(), &[&["--seed", "1", "--workers", "3"][..], &base].concat());
    assert_eq!(one, three);
    let out = run(dir.path(), &base);
    assert!(String::from_utf8_lossy(&out.stderr).starts_with("seed: "));
}

#[test]
fn reading_a_labeled_file_as_data_drops_the_label() {
    let dir = TempDir::new().unwrap();
    simulate(dir.path(), "6", "clustered_s4", "train.csv");
    let data = generate(&Scenario::new(ScenarioTag::ClusteredS4, 6)).unwrap().data;
    let mean = data.column_means();
    write(dir.path(), "q.csv", &format!("{},{}\n", mean[0], mean[1]));
    let out = ok(dir.path(), &["depth", "--reference", "train.csv", "--input", "q.csv", "--notion", "mahalanobis"]);
    let depth: f64 = out.lines().nth(1).unwrap().split(',').nth(1).unwrap().parse().unwrap();
    assert!((depth - 1.0).abs() < 1e-12);
}
