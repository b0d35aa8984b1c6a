//! Acceptance suite: one PASS/FAIL line per criterion. Exits nonzero if any
//! hard criterion fails. Criterion 9 (timing shape) is reported only.

mod common;

use std::time::Instant;

use bart::bench::{scaling_benchmark, BenchOptions};
use bart::data::{friedman_function, generate_friedman, uniform_rows, Dataset, Schema};
use bart::mcmc::{chain_rng, draw_tree, leaf_log_marginal, run_chain, ChainConfig, LeafStats, MoveProbabilities};
use bart::model::{load_model, model_to_string, save_model};
use bart::posterior::{PosteriorDraws, PosteriorMeta};
use bart::priors::{sample_tree_from_prior, PriorSettings, PriorSpec, SigmaHatMode};
use bart::probit::{auc, predict_prob, run_probit_chain, simulate_probit};
use bart::tree::{Ensemble, Token};
use bart::Mode;
use common::{correlation, mean, quadrature_leaf_log_marginal};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: String) -> Outcome {
    Outcome { pass, detail }
}

fn friedman_defaults(seed: u64, n: usize) -> (bart::data::FriedmanSample, PriorSpec) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let sample = generate_friedman(&mut rng, n, 10, 1.0).unwrap();
    let spec = PriorSpec::calibrate(&sample.data, &PriorSettings::default()).unwrap();
    (sample, spec)
}

fn c1_prior_tree_sizes() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(101);
    let xs: Vec<f64> = (0..500).map(|_| rng.random()).collect();
    let data = Dataset::from_columns(vec![xs.clone()], xs, Mode::Regression, Schema::numeric(1, "y"), 100).unwrap();
    let spec = PriorSpec::from_sigma_hat(&PriorSettings::default(), Mode::Regression, 0.1, SigmaHatMode::Naive).unwrap();
    let draws = 1_000_000;
    let mut counts = [0usize; 5];
    for _ in 0..draws {
        let leaves = sample_tree_from_prior(&mut rng, &data, &spec).leaf_count();
        counts[leaves.min(5) - 1] += 1;
    }
    let freq: Vec<f64> = counts.iter().map(|&c| c as f64 / draws as f64).collect();
    let target = [0.05, 0.55, 0.28, 0.09, 0.03];
    let pass = freq.iter().zip(target).all(|(f, t)| (f - t).abs() <= 0.01);
    outcome(
        pass,
        format!(
            "P(1..4, >=5 leaves) = [{}] vs [0.05, 0.55, 0.28, 0.09, 0.03] +- 0.01",
            freq.iter().map(|f| format!("{f:.4}")).collect::<Vec<_>>().join(", ")
        ),
    )
}

fn c2_marginal_oracle() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(202);
    let mut worst: f64 = 0.0;
    for _ in 0..1000 {
        let n = rng.random_range(0..=20);
        let sigma = rng.random_range(0.05..3.0);
        let sigma_mu = rng.random_range(0.01..2.0);
        let shift = rng.random_range(-1.0..1.0);
        let r: Vec<f64> = (0..n).map(|_| shift + rng.random_range(-1.0..1.0)).collect();
        let exact = leaf_log_marginal(&LeafStats::from_values(r.iter().copied()), sigma, sigma_mu);
        let oracle = if n == 0 { 0.0 } else { quadrature_leaf_log_marginal(&r, sigma, sigma_mu) };
        let rel = if oracle == 0.0 { exact.abs() } else { ((exact - oracle) / oracle).abs() };
        worst = worst.max(rel);
    }
    outcome(worst <= 1e-8, format!("max relative error over 1000 cases = {worst:.2e} (limit 1e-8)"))
}

fn c3_sampler_exactness() -> Outcome {
    // one predictor with cutpoints 0.3 and 0.6: bins of 3, 3 and 4 rows
    let xs: Vec<f64> = (0..10).map(|i| i as f64 / 9.0).collect();
    let ys = vec![0.1, 0.3, 0.0, 0.9, 1.2, 0.8, 1.1, 0.2, 0.5, 0.4];
    let data = Dataset::with_grids(vec![xs], ys, Mode::Regression, Schema::numeric(1, "y"), vec![vec![0.3, 0.6]]).unwrap();
    let settings = PriorSettings { m: 1, ..PriorSettings::default() };
    let spec = PriorSpec::from_sigma_hat(&settings, Mode::Regression, 0.3, SigmaHatMode::Naive).unwrap();
    let sigma = 0.3;
    let r = data.y().to_vec();
    let group = |lo: usize, hi: usize| -> Vec<f64> {
        (0..10).filter(|&i| {
            let b = if i <= 2 { 0 } else if i <= 5 { 1 } else { 2 };
            b >= lo && b <= hi
        })
        .map(|i| r[i])
        .collect()
    };
    let lm = |g: Vec<f64>| quadrature_leaf_log_marginal(&g, sigma, spec.sigma_mu);
    let p = |d: usize| 0.95 / ((1 + d) as f64).powi(2);
    // enumerated support: stump, root c0, root c1, c0 then c1 on the right, c1 then c0 on the left
    let log_post = [
        (1.0 - p(0)).ln() + lm(group(0, 2)),
        (p(0) / 2.0 * (1.0 - p(1))).ln() + lm(group(0, 0)) + lm(group(1, 2)),
        (p(0) / 2.0 * (1.0 - p(1))).ln() + lm(group(0, 1)) + lm(group(2, 2)),
        (p(0) / 2.0 * p(1)).ln() + lm(group(0, 0)) + lm(group(1, 1)) + lm(group(2, 2)),
        (p(0) / 2.0 * p(1)).ln() + lm(group(0, 0)) + lm(group(1, 1)) + lm(group(2, 2)),
    ];
    let top = log_post.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let w: Vec<f64> = log_post.iter().map(|l| (l - top).exp()).collect();
    let z: f64 = w.iter().sum();
    let exact: Vec<f64> = w.iter().map(|x| x / z).collect();

    let moves = MoveProbabilities::grow_prune();
    let mut rng = chain_rng(303, 0);
    let mut tree = bart::DecisionTree::stump(0.0);
    let mut counts = [0usize; 5];
    let sweeps = 1_000_000;
    for _ in 0..sweeps {
        tree = draw_tree(&mut rng, &tree, &r, sigma, &spec, &data, &moves).unwrap().tree;
        let rules: Vec<usize> = tree
            .to_tokens()
            .into_iter()
            .filter_map(|t| match t {
                Token::Split(s) => Some(s.cutpoint),
                Token::Leaf(_) => None,
            })
            .collect();
        let k = match rules.as_slice() {
            [] => 0,
            [0] => 1,
            [1] => 2,
            [0, 1] => 3,
            [1, 0] => 4,
            other => panic!("tree outside the enumerated support: {other:?}"),
        };
        counts[k] += 1;
    }
    let emp: Vec<f64> = counts.iter().map(|&c| c as f64 / sweeps as f64).collect();
    let tv = 0.5 * emp.iter().zip(&exact).map(|(a, b)| (a - b).abs()).sum::<f64>();
    outcome(
        tv <= 0.05,
        format!(
            "TV = {tv:.4} (limit 0.05); exact [{}], chain [{}]",
            exact.iter().map(|x| format!("{x:.4}")).collect::<Vec<_>>().join(", "),
            emp.iter().map(|x| format!("{x:.4}")).collect::<Vec<_>>().join(", ")
        ),
    )
}

fn c4_sigma_recovery() -> Outcome {
    let (sample, spec) = friedman_defaults(404, 100);
    let config = ChainConfig { seed: 4, ..ChainConfig::default() };
    let many = mean(&run_chain(&sample.data, &spec, &config).unwrap().sigma_draws());
    let single_settings = PriorSettings { m: 1, ..PriorSettings::default() };
    let single_spec = PriorSpec::calibrate(&sample.data, &single_settings).unwrap();
    let single = mean(&run_chain(&sample.data, &single_spec, &config).unwrap().sigma_draws());
    outcome(
        (0.7..=1.3).contains(&many) && single > many,
        format!("mean sigma m=200: {many:.3} (in [0.7, 1.3]); m=1: {single:.3} (> m=200)"),
    )
}

fn coverage(draws: &PosteriorDraws, rows: &[Vec<f64>], truth: &[f64]) -> f64 {
    let iv = draws.interval(rows, 0.10).unwrap();
    iv.iter().zip(truth).filter(|&(&(lo, hi), &t)| lo <= t && t <= hi).count() as f64 / truth.len() as f64
}

fn c5_coverage() -> Outcome {
    let reps = 20;
    let mut ins = Vec::new();
    let mut outs = Vec::new();
    for r in 0..reps {
        let (sample, spec) = friedman_defaults(500 + r, 100);
        let config = ChainConfig { seed: 50 + r, ..ChainConfig::default() };
        let draws = run_chain(&sample.data, &spec, &config).unwrap();
        ins.push(coverage(&draws, &sample.data.rows(), &sample.f));
        let mut rng = ChaCha8Rng::seed_from_u64(5000 + r);
        let test = uniform_rows(&mut rng, 500, 10);
        let truth: Vec<f64> = test.iter().map(|x| friedman_function(x)).collect();
        outs.push(coverage(&draws, &test, &truth));
    }
    let (i, o) = (mean(&ins), mean(&outs));
    let ok = |c: f64| (0.80..=0.97).contains(&c);
    outcome(
        ok(i) && ok(o),
        format!("average 90% coverage over {reps} replicates: in-sample {i:.3}, out-of-sample {o:.3} (band [0.80, 0.97])"),
    )
}

fn c6_variable_selection() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(606);
    let sample = generate_friedman(&mut rng, 500, 10, 1.0).unwrap();
    let settings = PriorSettings { m: 10, ..PriorSettings::default() };
    let spec = PriorSpec::calibrate(&sample.data, &settings).unwrap();
    let config = ChainConfig { seed: 6, ..ChainConfig::default() };
    let v = run_chain(&sample.data, &spec, &config).unwrap().variable_inclusion();
    let relevant: f64 = v[..5].iter().sum();
    let min_rel = v[..5].iter().cloned().fold(f64::INFINITY, f64::min);
    let max_irr = v[5..].iter().cloned().fold(0.0, f64::max);
    outcome(
        relevant >= 0.8 && min_rel > max_irr,
        format!(
            "sum v1..v5 = {relevant:.3} (>= 0.8); min relevant {min_rel:.3} vs max irrelevant {max_irr:.3}; v = [{}]",
            v.iter().map(|x| format!("{x:.3}")).collect::<Vec<_>>().join(", ")
        ),
    )
}

fn c7_robustness() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(707);
    let sample = generate_friedman(&mut rng, 100, 10, 1.0).unwrap();
    let test = uniform_rows(&mut rng, 1000, 10);
    let fit = |nu: f64, q: f64, k: f64, m: usize, seed: u64| {
        let settings = PriorSettings { nu, q, k, m, ..PriorSettings::default() };
        let spec = PriorSpec::calibrate(&sample.data, &settings).unwrap();
        let config = ChainConfig { seed, ..ChainConfig::default() };
        run_chain(&sample.data, &spec, &config).unwrap().point_estimate(&test)
    };
    let settings_corr = correlation(&fit(3.0, 0.90, 2.0, 100, 7), &fit(10.0, 0.75, 3.0, 100, 7));
    let seed_corr = correlation(&fit(3.0, 0.90, 2.0, 200, 1), &fit(3.0, 0.90, 2.0, 200, 2));
    outcome(
        settings_corr > 0.98 && seed_corr > 0.995,
        format!("corr across settings {settings_corr:.4} (> 0.98); across seeds {seed_corr:.4} (> 0.995)"),
    )
}

fn c8_probit() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(808);
    let train = simulate_probit(&mut rng, 500, 5).unwrap();
    let test = simulate_probit(&mut rng, 2000, 5).unwrap();
    let spec = PriorSpec::calibrate(&train.data, &PriorSettings::default()).unwrap();
    let config = ChainConfig { seed: 8, ..ChainConfig::default() };
    let draws = run_probit_chain(&train.data, &spec, &config, 0.5).unwrap();
    let probs: Vec<f64> = predict_prob(&draws, &test.data.rows(), 0.1).unwrap().iter().map(|s| s.mean).collect();
    let held_out = auc(&probs, test.data.y());
    let bayes = auc(&test.g, test.data.y());

    // zero forest: exactly 0.5
    let meta = PosteriorMeta {
        mode: Mode::Probit,
        offset: 0.0,
        prior: spec.clone(),
        config: config.clone(),
        scaling: None,
        schema: train.data.schema().clone(),
        grids: train.data.grids().to_vec(),
    };
    let zero = PosteriorDraws::new(vec![Ensemble::stumps(spec.m, 1.0).unwrap()], vec![0], meta.clone()).unwrap();
    let x0 = vec![vec![0.0; 5]];
    let at_zero = predict_prob(&zero, &x0, 0.1).unwrap()[0].mean;

    // forests drawn from the prior have G + c = 0 in expectation; batched to bound memory
    let points = &test.data.rows()[..10];
    let (batches, per_batch) = (12, 2000);
    let mut expected = vec![0.0; points.len()];
    for _ in 0..batches {
        let prior_draws: Vec<Ensemble> = (0..per_batch)
            .map(|_| {
                let trees = (0..spec.m).map(|_| sample_tree_from_prior(&mut rng, &train.data, &spec)).collect();
                Ensemble::new(trees, 1.0).unwrap()
            })
            .collect();
        let prior_post = PosteriorDraws::new(prior_draws, vec![0; per_batch], meta.clone()).unwrap();
        for (e, s) in expected.iter_mut().zip(predict_prob(&prior_post, points, 0.1).unwrap()) {
            *e += s.mean / batches as f64;
        }
    }
    let worst = expected.iter().map(|e| (e - 0.5).abs()).fold(0.0, f64::max);

    outcome(
        held_out > 0.75 && at_zero == 0.5 && worst <= 0.01,
        format!(
            "held-out AUC {held_out:.3} (> 0.75, Bayes-optimal {bayes:.3}); p at G+c=0: {at_zero}; \
             prior-expected p max deviation from 0.5: {worst:.4} (<= 0.01)"
        ),
    )
}

fn c9_scaling() -> Outcome {
    let report = scaling_benchmark(&BenchOptions::default()).unwrap();
    let timings = report
        .rows
        .iter()
        .map(|r| format!("n={}: {:.3}s", r.n, r.seconds))
        .collect::<Vec<_>>()
        .join(", ");
    outcome(report.r_squared > 0.95, format!("linear-fit R^2 = {:.4} (> 0.95); {timings}", report.r_squared))
}

fn c10_determinism() -> Outcome {
    let (sample, _) = friedman_defaults(1010, 80);
    let settings = PriorSettings { m: 50, ..PriorSettings::default() };
    let spec = PriorSpec::calibrate(&sample.data, &settings).unwrap();
    let config = ChainConfig { burn_in: 50, keep: 100, seed: 10, ..ChainConfig::default() };
    let dir = tempfile::tempdir().unwrap();
    let (pa, pb) = (dir.path().join("a.bart"), dir.path().join("b.bart"));
    let a = run_chain(&sample.data, &spec, &config).unwrap();
    let b = run_chain(&sample.data, &spec, &config).unwrap();
    save_model(&a, &pa).unwrap();
    save_model(&b, &pb).unwrap();
    let identical = std::fs::read(&pa).unwrap() == std::fs::read(&pb).unwrap() && model_to_string(&a) == model_to_string(&b);
    let loaded = load_model(&pa).unwrap();
    let rows = sample.data.rows();
    let before = a.point_estimate(&rows);
    let after = loaded.point_estimate(&rows);
    let diff = before.iter().zip(&after).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max);
    outcome(
        identical && diff <= 1e-12,
        format!("model files byte-identical: {identical}; max replay difference {diff:.1e} (<= 1e-12)"),
    )
}

fn main() {
    let criteria: Vec<(u32, &str, bool, fn() -> Outcome)> = vec![
        (1, "prior tree-size distribution", true, c1_prior_tree_sizes),
        (2, "leaf marginal vs quadrature", true, c2_marginal_oracle),
        (3, "sampler exactness on an enumerable space", true, c3_sampler_exactness),
        (4, "Friedman sigma recovery", true, c4_sigma_recovery),
        (5, "Friedman interval coverage", true, c5_coverage),
        (6, "variable selection", true, c6_variable_selection),
        (7, "robustness to settings and seeds", true, c7_robustness),
        (8, "probit sanity", true, c8_probit),
        (9, "linear scaling in n", false, c9_scaling),
        (10, "determinism and replay", true, c10_determinism),
    ];
    let mut failed = Vec::new();
    for (id, name, hard, run) in criteria {
        let start = Instant::now();
        let o = run();
        let status = match (o.pass, hard) {
            (true, _) => "PASS",
            (false, true) => "FAIL",
            (false, false) => "FAIL (reported only)",
        };
        println!("[{status}] criterion {id}: {name}: {} [{:.1}s]", o.detail, start.elapsed().as_secs_f64());
        if !o.pass && hard {
            failed.push(id);
        }
    }
    if failed.is_empty() {
        println!("acceptance: all hard criteria passed");
    } else {
        println!("acceptance: failed criteria {failed:?}");
        std::process::exit(1);
    }
}
