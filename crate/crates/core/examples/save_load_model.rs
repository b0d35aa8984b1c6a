//! Save posterior draws to the text model format, load them back and check
//! the predictions agree.
//!
//! cargo run --release --example save_load_model

use bart::data::generate_friedman;
use bart::mcmc::{run_chain, ChainConfig};
use bart::model::{load_model, save_model};
use bart::priors::{PriorSettings, PriorSpec};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let mut rng = ChaCha8Rng::seed_from_u64(31);
    let sample = generate_friedman(&mut rng, 100, 10, 1.0)?;
    let settings = PriorSettings { m: 50, ..PriorSettings::default() };
    let spec = PriorSpec::calibrate(&sample.data, &settings)?;
    let config = ChainConfig { keep: 200, ..ChainConfig::default() };
    let draws = run_chain(&sample.data, &spec, &config)?;

    let path = std::env::temp_dir().join("bart_example.bart");
    save_model(&draws, &path)?;
    let bytes = std::fs::metadata(&path)?.len();
    println!("wrote {} draws ({bytes} bytes) to {}", draws.len(), path.display());

    let text = std::fs::read_to_string(&path)?;
    for line in text.lines().take(6) {
        println!("  {line}");
    }

    let loaded = load_model(&path)?;
    let rows = sample.data.rows();
    let (a, b) = (draws.point_estimate(&rows), loaded.point_estimate(&rows));
    let diff = a.iter().zip(&b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max);
    println!("max prediction difference after reload = {diff:e}");
    std::fs::remove_file(&path)?;
    Ok(())
}
