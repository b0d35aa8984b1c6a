//! Rank predictors by how often the sampled forests split on them. With few
//! trees the irrelevant predictors x6..x10 are rarely used.
//!
//! cargo run --release --example variable_selection

use bart::data::generate_friedman;
use bart::mcmc::{run_chain, ChainConfig};
use bart::priors::{PriorSettings, PriorSpec};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn main() -> bart::Result<()> {
    let mut rng = ChaCha8Rng::seed_from_u64(17);
    let sample = generate_friedman(&mut rng, 500, 10, 1.0)?;
    let names = sample.data.schema().feature_names();
    for m in [10, 50, 200] {
        let settings = PriorSettings { m, ..PriorSettings::default() };
        let spec = PriorSpec::calibrate(&sample.data, &settings)?;
        let draws = run_chain(&sample.data, &spec, &ChainConfig::default())?;
        let v = draws.variable_inclusion();
        let mut order: Vec<usize> = (0..v.len()).collect();
        order.sort_by(|&a, &b| v[b].total_cmp(&v[a]));
        let ranked: Vec<String> = order.iter().map(|&i| format!("{}={:.3}", names[i], v[i])).collect();
        println!("m = {m:>3}: {}", ranked.join(" "));
    }
    Ok(())
}
