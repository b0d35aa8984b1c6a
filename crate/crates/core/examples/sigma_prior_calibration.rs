//! Calibrate the scaled inverse chi-square prior on sigma from a rough
//! estimate and check the implied quantile.
//!
//! cargo run --release --example sigma_prior_calibration

use bart::data::generate_friedman;
use bart::priors::{calibrate_lambda, estimate_sigma_hat, sigma_prior_cdf, PriorSettings, PriorSpec, SigmaHatMode};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn main() -> bart::Result<()> {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let sample = generate_friedman(&mut rng, 200, 10, 1.0)?;
    let range = sample.data.scaling().map_or(1.0, |s| s.range());

    for mode in [SigmaHatMode::Naive, SigmaHatMode::Linear] {
        let s = estimate_sigma_hat(&sample.data, mode)?;
        println!("{:>6} sigma_hat = {:.4} scaled, {:.3} in response units", mode.as_str(), s, s * range);
    }

    let sigma_hat = estimate_sigma_hat(&sample.data, SigmaHatMode::Linear)?;
    println!("\n nu     q     lambda     P(sigma < sigma_hat)");
    for (nu, q) in [(3.0, 0.90), (3.0, 0.99), (10.0, 0.75)] {
        let lambda = calibrate_lambda(nu, q, sigma_hat)?;
        println!("{nu:>3} {q:>5}  {lambda:.6}  {:.4}", sigma_prior_cdf(sigma_hat, nu, lambda));
    }

    let spec = PriorSpec::calibrate(&sample.data, &PriorSettings::default())?;
    println!("\ndefault prior: sigma_mu = {:.5}, lambda = {:.6}", spec.sigma_mu, spec.lambda);
    Ok(())
}
