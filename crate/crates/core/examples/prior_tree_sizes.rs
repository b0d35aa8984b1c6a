//! Draw trees from the tree prior and tabulate their sizes for a few
//! (alpha, beta) settings.
//!
//! cargo run --release --example prior_tree_sizes

use bart::data::{Dataset, Schema};
use bart::priors::{sample_tree_from_prior, PriorSettings, PriorSpec, SigmaHatMode};
use bart::Mode;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn main() -> bart::Result<()> {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let x: Vec<f64> = (0..500).map(|_| rng.random()).collect();
    let data = Dataset::from_columns(vec![x.clone()], x, Mode::Regression, Schema::numeric(1, "y"), 100)?;

    let draws = 100_000;
    println!("alpha  beta   P(1)   P(2)   P(3)   P(4)  P(>=5)  mean leaves");
    for (alpha, beta) in [(0.95, 2.0), (0.95, 1.0), (0.5, 2.0), (0.95, 0.5)] {
        let settings = PriorSettings { alpha, beta, ..PriorSettings::default() };
        let spec = PriorSpec::from_sigma_hat(&settings, Mode::Regression, 0.1, SigmaHatMode::Naive)?;
        let mut counts = [0usize; 5];
        let mut total = 0usize;
        for _ in 0..draws {
            let leaves = sample_tree_from_prior(&mut rng, &data, &spec).leaf_count();
            counts[leaves.min(5) - 1] += 1;
            total += leaves;
        }
        let freq: Vec<String> = counts.iter().map(|&c| format!("{:.3}", c as f64 / draws as f64)).collect();
        println!("{alpha:<6} {beta:<5}  {}  {:.2}", freq.join("  "), total as f64 / draws as f64);
    }
    Ok(())
}
