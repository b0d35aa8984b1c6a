//! Partial dependence of a Friedman fit on x4 (linear term) and jointly on
//! x1 and x2 (interaction term).
//!
//! cargo run --release --example partial_dependence

use bart::data::generate_friedman;
use bart::mcmc::{run_chain, ChainConfig};
use bart::posterior::default_grid;
use bart::priors::{PriorSettings, PriorSpec};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn main() -> bart::Result<()> {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let sample = generate_friedman(&mut rng, 200, 10, 1.0)?;
    let spec = PriorSpec::calibrate(&sample.data, &PriorSettings::default())?;
    let draws = run_chain(&sample.data, &spec, &ChainConfig::default())?;
    let rows = sample.data.rows();

    // the x4 term is 10 x4, so the curve should rise by about 10 over [0, 1]
    let grid: Vec<Vec<f64>> = default_grid(&rows, 3, 10).into_iter().map(|v| vec![v]).collect();
    println!("   x4    mean   lower   upper");
    for pt in draws.partial_dependence(&rows, &[3], &grid, 0.1)? {
        println!("{:.3}  {:6.2}  {:6.2}  {:6.2}", pt.x[0], pt.mean, pt.lower, pt.upper);
    }

    let axis = [0.1, 0.5, 0.9];
    let joint: Vec<Vec<f64>> = axis.iter().flat_map(|&a| axis.iter().map(move |&b| vec![a, b])).collect();
    println!("\n  x1   x2    mean");
    for pt in draws.partial_dependence(&rows, &[0, 1], &joint, 0.1)? {
        println!("{:.1}  {:.1}  {:6.2}", pt.x[0], pt.x[1], pt.mean);
    }
    Ok(())
}
