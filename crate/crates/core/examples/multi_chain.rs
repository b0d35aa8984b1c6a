//! Run several independent chains and compare their sigma traces and fits.
//!
//! cargo run --release --example multi_chain

use bart::data::{generate_friedman, uniform_rows};
use bart::mcmc::{run_chains, ChainConfig};
use bart::priors::{PriorSettings, PriorSpec};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn main() -> bart::Result<()> {
    let mut rng = ChaCha8Rng::seed_from_u64(41);
    let sample = generate_friedman(&mut rng, 100, 10, 1.0)?;
    let spec = PriorSpec::calibrate(&sample.data, &PriorSettings::default())?;
    let config = ChainConfig { keep: 500, ..ChainConfig::default() };
    let chains = 3;
    let draws = run_chains(&sample.data, &spec, &config, chains)?;
    println!("{} draws from {} chains", draws.len(), draws.num_chains());

    let sigmas = draws.sigma_draws();
    let test = uniform_rows(&mut rng, 5, 10);
    let per_draw = draws.response_draws(&test)?;
    for c in 0..chains {
        let idx: Vec<usize> = (0..draws.len()).filter(|&i| draws.chains()[i] == c).collect();
        let mean_sigma = idx.iter().map(|&i| sigmas[i]).sum::<f64>() / idx.len() as f64;
        let fits: Vec<String> = per_draw
            .iter()
            .map(|row| format!("{:6.2}", idx.iter().map(|&i| row[i]).sum::<f64>() / idx.len() as f64))
            .collect();
        println!("chain {c}: mean sigma {mean_sigma:.3}, fits at 5 test points {}", fits.join(" "));
    }
    Ok(())
}
