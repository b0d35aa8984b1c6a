//! Fit the default model to a simulated Friedman dataset and compare the
//! posterior mean with the true function.
//!
//! cargo run --release --example friedman_regression

use bart::data::{friedman_function, generate_friedman, uniform_rows};
use bart::mcmc::{run_chain, ChainConfig};
use bart::priors::{PriorSettings, PriorSpec};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn correlation(a: &[f64], b: &[f64]) -> f64 {
    let n = a.len() as f64;
    let (ma, mb) = (a.iter().sum::<f64>() / n, b.iter().sum::<f64>() / n);
    let cov: f64 = a.iter().zip(b).map(|(x, y)| (x - ma) * (y - mb)).sum();
    let va: f64 = a.iter().map(|x| (x - ma).powi(2)).sum();
    let vb: f64 = b.iter().map(|y| (y - mb).powi(2)).sum();
    cov / (va * vb).sqrt()
}

fn main() -> bart::Result<()> {
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let sample = generate_friedman(&mut rng, 100, 10, 1.0)?;
    let spec = PriorSpec::calibrate(&sample.data, &PriorSettings::default())?;
    println!("sigma_hat = {:.4} (scaled), lambda = {:.5}", spec.sigma_hat, spec.lambda);

    let start = std::time::Instant::now();
    let draws = run_chain(&sample.data, &spec, &ChainConfig::default())?;
    println!("{} draws in {:.2?}", draws.len(), start.elapsed());

    let sigmas = draws.sigma_draws();
    println!("posterior mean sigma = {:.3} (true 1)", sigmas.iter().sum::<f64>() / sigmas.len() as f64);

    let fitted = draws.point_estimate(&sample.data.rows());
    println!("in-sample corr(fhat, f) = {:.4}", correlation(&fitted, &sample.f));

    let test = uniform_rows(&mut rng, 1000, 10);
    let truth: Vec<f64> = test.iter().map(|x| friedman_function(x)).collect();
    let pred = draws.point_estimate(&test);
    let rmse = (pred.iter().zip(&truth).map(|(p, t)| (p - t).powi(2)).sum::<f64>() / truth.len() as f64).sqrt();
    println!("out-of-sample RMSE vs f = {rmse:.3}");

    let intervals = draws.interval(&test, 0.10)?;
    let covered = intervals.iter().zip(&truth).filter(|&(&(lo, hi), &t)| lo <= t && t <= hi).count();
    println!("90% interval coverage of f = {:.3}", covered as f64 / truth.len() as f64);
    Ok(())
}
