use std::path::{Path, PathBuf};

use bart::cli::{manifest_path, run, Cli, Command, RunManifest};
use clap::Parser;
use tempfile::TempDir;

fn p(dir: &TempDir, name: &str) -> PathBuf {
    dir.path().join(name)
}

fn s(path: &Path) -> &str {
    path.to_str().unwrap()
}

fn bart(args: &[&str]) -> i32 {
    run(std::iter::once("bart").chain(args.iter().copied()))
}

fn table(path: &Path) -> Vec<Vec<String>> {
    std::fs::read_to_string(path)
        .unwrap()
        .lines()
        .map(|l| l.split('\t').map(str::to_string).collect())
        .collect()
}

fn simulate(dir: &TempDir, kind: &str, n: usize) -> PathBuf {
    let out = p(dir, &format!("{kind}.csv"));
    assert_eq!(bart(&["simulate", "--kind", kind, "--n", &n.to_string(), "--p", "5", "--seed", "3", "--out", s(&out)]), 0);
    out
}

const SMALL: &[&str] = &["--m", "20", "--burn-in", "20", "--keep", "30"];

fn train(data: &Path, out: &Path, extra: &[&str]) -> i32 {
    let mut args = vec!["train", "--data", s(data), "--out", s(out)];
    args.extend_from_slice(SMALL);
    args.extend_from_slice(extra);
    bart(&args)
}

#[test]
fn training_twice_gives_identical_models() {
    let dir = TempDir::new().unwrap();
    let data = simulate(&dir, "friedman", 60);
    let (a, b) = (p(&dir, "a.bart"), p(&dir, "b.bart"));
    assert_eq!(train(&data, &a, &["--seed", "9"]), 0);
    assert_eq!(train(&data, &b, &["--seed", "9"]), 0);
    assert_eq!(std::fs::read(&a).unwrap(), std::fs::read(&b).unwrap());
    let c = p(&dir, "c.bart");
    assert_eq!(train(&data, &c, &["--seed", "10"]), 0);
    assert_ne!(std::fs::read(&a).unwrap(), std::fs::read(&c).unwrap());
}

#[test]
fn prior_flags_are_recorded_in_the_manifest() {
    let dir = TempDir::new().unwrap();
    let data = simulate(&dir, "friedman", 50);
    let model = p(&dir, "m.bart");
    assert_eq!(train(&data, &model, &["--nu", "3", "--q", "0.99"]), 0);
    let manifest = RunManifest::load(&manifest_path(&model)).unwrap();
    let recorded = manifest.train.unwrap();
    assert_eq!(recorded.prior.nu, 3.0);
    assert_eq!(recorded.prior.q, 0.99);
    let prior = manifest.calibrated_prior.unwrap();
    assert_eq!((prior.nu, prior.q, prior.m), (3.0, 0.99, 20));
    assert_eq!(manifest.trainings, 1);
}

#[test]
fn replay_reproduces_the_model() {
    let dir = TempDir::new().unwrap();
    let data = simulate(&dir, "friedman", 50);
    let model = p(&dir, "orig.bart");
    assert_eq!(train(&data, &model, &["--seed", "4", "--k", "3"]), 0);
    let again = p(&dir, "again.bart");
    let manifest = manifest_path(&model);
    assert_eq!(bart(&["train", "--replay", s(&manifest), "--out", s(&again)]), 0);
    assert_eq!(std::fs::read(&model).unwrap(), std::fs::read(&again).unwrap());
}

#[test]
fn probit_rejects_continuous_response() {
    let dir = TempDir::new().unwrap();
    let data = simulate(&dir, "friedman", 30);
    let model = p(&dir, "bad.bart");
    let args = ["bart", "train", "--probit", "--data", s(&data), "--out", s(&model)];
    let Command::Train(targs) = Cli::try_parse_from(args).unwrap().command else {
        panic!("expected a train command");
    };
    let err = bart::cli::cmd_train(targs).unwrap_err();
    assert_eq!(err.code(), "E006");
    assert_ne!(run(args), 0);
    assert!(!model.exists());
}

#[test]
fn probit_training_and_prediction() {
    let dir = TempDir::new().unwrap();
    let data = simulate(&dir, "probit", 80);
    let model = p(&dir, "probit.bart");
    assert_eq!(train(&data, &model, &["--probit", "--base-rate"]), 0);
    let out = p(&dir, "probs.tsv");
    assert_eq!(bart(&["predict", "--model", s(&model), "--data", s(&data), "--out", s(&out)]), 0);
    let rows = table(&out);
    assert_eq!(rows[0], ["row", "estimate"]);
    assert_eq!(rows.len(), 81);
    for r in &rows[1..] {
        let v: f64 = r[1].parse().unwrap();
        assert!((0.0..=1.0).contains(&v));
    }
}

#[test]
fn prediction_intervals_are_ordered() {
    let dir = TempDir::new().unwrap();
    let data = simulate(&dir, "friedman", 60);
    let model = p(&dir, "m.bart");
    assert_eq!(train(&data, &model, &[]), 0);
    let out = p(&dir, "pred.tsv");
    assert_eq!(
        bart(&["predict", "--model", s(&model), "--data", s(&data), "--interval", "0.1", "--out", s(&out)]),
        0
    );
    let rows = table(&out);
    assert_eq!(rows[0], ["row", "estimate", "lower", "median", "upper"]);
    assert_eq!(rows.len(), 61);
    for r in &rows[1..] {
        let v: Vec<f64> = r[1..].iter().map(|x| x.parse().unwrap()).collect();
        assert!(v[1] <= v[2] && v[2] <= v[3], "{r:?}");
        assert!(v[1] <= v[0] && v[0] <= v[3], "{r:?}");
    }
}

#[test]
fn partial_dependence_and_inclusion() {
    let dir = TempDir::new().unwrap();
    let data = simulate(&dir, "friedman", 60);
    let model = p(&dir, "m.bart");
    assert_eq!(train(&data, &model, &[]), 0);

    let pd = p(&dir, "pd.tsv");
    assert_eq!(bart(&["pd", "--model", s(&model), "--data", s(&data), "--vars", "x1", "--grid", "1", "--out", s(&pd)]), 0);
    let rows = table(&pd);
    assert_eq!(rows[0], ["variables", "value", "mean", "lower", "upper"]);
    assert_eq!(rows.len(), 2);

    let pd2 = p(&dir, "pd2.tsv");
    assert_eq!(
        bart(&["pd", "--model", s(&model), "--data", s(&data), "--vars", "x1,x2", "--grid", "3", "--out", s(&pd2)]),
        0
    );
    assert_eq!(table(&pd2).len(), 10);

    let vi = p(&dir, "vi.tsv");
    assert_eq!(bart(&["varimp", "--model", s(&model), "--out", s(&vi)]), 0);
    let rows = table(&vi);
    assert_eq!(rows.len(), 6);
    let total: f64 = rows[1..].iter().map(|r| r[1].parse::<f64>().unwrap()).sum();
    assert!((total - 1.0).abs() < 1e-9);
}

#[test]
fn prediction_rejects_a_different_schema() {
    let dir = TempDir::new().unwrap();
    let data = simulate(&dir, "friedman", 40);
    let model = p(&dir, "m.bart");
    assert_eq!(train(&data, &model, &[]), 0);
    let other = p(&dir, "other.csv");
    assert_eq!(bart(&["simulate", "--kind", "probit", "--n", "10", "--p", "3", "--out", s(&other)]), 0);
    let out = p(&dir, "pred.tsv");
    assert_ne!(bart(&["predict", "--model", s(&model), "--data", s(&other), "--out", s(&out)]), 0);
}

#[test]
fn cross_validation_counts_trainings() {
    let dir = TempDir::new().unwrap();
    let data = simulate(&dir, "friedman", 40);
    let manifest = p(&dir, "cv.json");
    let table_path = p(&dir, "cv.tsv");
    let model = p(&dir, "cv.bart");
    let code = bart(&[
        "cv", "--data", s(&data), "--burn-in", "2", "--keep", "2",
        "--manifest", s(&manifest), "--table", s(&table_path), "--out", s(&model),
    ]);
    assert_eq!(code, 0);
    let m = RunManifest::load(&manifest).unwrap();
    assert_eq!(m.trainings, 24 * 5 + 1);
    assert!(m.selected.is_some());
    let rows = table(&table_path);
    assert_eq!(rows.len(), 25);
    assert_eq!(rows[1..].iter().filter(|r| r[6] == "1").count(), 1);
    assert!(model.exists());
}

#[test]
fn cross_validation_with_one_setting() {
    let dir = TempDir::new().unwrap();
    let data = simulate(&dir, "friedman", 30);
    let manifest = p(&dir, "cv.json");
    let table_path = p(&dir, "cv.tsv");
    let code = bart(&[
        "cv", "--data", s(&data), "--grid", "10,0.75,3,20", "--folds", "3", "--burn-in", "5", "--keep", "5",
        "--manifest", s(&manifest), "--table", s(&table_path),
    ]);
    assert_eq!(code, 0);
    let m = RunManifest::load(&manifest).unwrap();
    assert_eq!(m.trainings, 4);
    let sel = m.selected.unwrap();
    assert_eq!((sel.nu, sel.q, sel.k, sel.m), (10.0, 0.75, 3.0, 20));
}

#[test]
fn bench_writes_a_table() {
    let dir = TempDir::new().unwrap();
    let out = p(&dir, "bench.tsv");
    assert_eq!(bart(&["bench", "--sizes", "50,100,200", "--m", "5", "--sweeps", "3", "--out", s(&out)]), 0);
    let rows = table(&out);
    assert_eq!(rows[0], ["n", "seconds", "fitted"]);
    assert_eq!(rows.len(), 4);
}

#[test]
fn unknown_simulation_kind_fails() {
    let dir = TempDir::new().unwrap();
    assert_ne!(bart(&["simulate", "--kind", "nope", "--out", s(&p(&dir, "x.csv"))]), 0);
}
