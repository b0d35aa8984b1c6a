//! Drive the command-line interface: simulate a dataset, pick prior settings
//! by cross-validation, then predict with the refitted model.
//!
//! cargo run --release --example cross_validation

use bart::cli::run;

fn main() {
    let dir = std::env::temp_dir().join("bart_cv_example");
    std::fs::create_dir_all(&dir).expect("create temp dir");
    let path = |name: &str| dir.join(name).to_string_lossy().into_owned();
    let (data, model, table, preds) = (path("train.csv"), path("cv.bart"), path("cv.tsv"), path("pred.tsv"));

    let steps: Vec<Vec<&str>> = vec![
        vec!["simulate", "--n", "100", "--seed", "3", "--out", &data],
        vec![
            "cv", "--data", &data, "--folds", "5", "--grid", "3,0.9,2,50;3,0.99,2,50;10,0.75,3,50;3,0.9,1,200",
            "--burn-in", "100", "--keep", "200", "--table", &table, "--out", &model,
        ],
        vec!["predict", "--model", &model, "--data", &data, "--interval", "0.1", "--out", &preds],
    ];
    for step in steps {
        println!("$ bart {}", step.join(" "));
        let code = run(std::iter::once("bart").chain(step.iter().copied()));
        if code != 0 {
            std::process::exit(code);
        }
    }
    print!("{}", std::fs::read_to_string(&table).expect("cv table"));
    let preds = std::fs::read_to_string(&preds).expect("predictions");
    for line in preds.lines().take(4) {
        println!("{line}");
    }
}
