//! Binary classification with the probit model on simulated data.
//!
//! cargo run --release --example probit_classification

use bart::mcmc::ChainConfig;
use bart::priors::{PriorSettings, PriorSpec};
use bart::probit::{auc, predict_prob, run_probit_chain, simulate_probit};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn main() -> bart::Result<()> {
    let mut rng = ChaCha8Rng::seed_from_u64(23);
    let train = simulate_probit(&mut rng, 500, 5)?;
    let test = simulate_probit(&mut rng, 2000, 5)?;
    let base_rate = train.data.y().iter().sum::<f64>() / train.data.n() as f64;
    println!("training base rate = {base_rate:.3}");

    let spec = PriorSpec::calibrate(&train.data, &PriorSettings::default())?;
    let draws = run_probit_chain(&train.data, &spec, &ChainConfig::default(), base_rate)?;
    let summaries = predict_prob(&draws, &test.data.rows(), 0.1)?;
    let probs: Vec<f64> = summaries.iter().map(|s| s.mean).collect();

    println!("held-out AUC = {:.3} (true latent function {:.3})", auc(&probs, test.data.y()), auc(&test.g, test.data.y()));
    let correct = probs.iter().zip(test.data.y()).filter(|&(&p, &y)| (p > 0.5) == (y == 1.0)).count();
    println!("accuracy at 0.5 = {:.3}", correct as f64 / probs.len() as f64);
    for s in summaries.iter().take(5) {
        println!("p = {:.3}  90% interval [{:.3}, {:.3}]", s.mean, s.lower, s.upper);
    }
    Ok(())
}
