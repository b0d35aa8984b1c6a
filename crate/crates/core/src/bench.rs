//! Timing of short chains as the sample size grows.

use std::time::Instant;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::data::generate_friedman;
use crate::error::{Error, Result};
use crate::mcmc::{run_chain, ChainConfig};
use crate::priors::{PriorSettings, PriorSpec};

/// Sample sizes timed by default.
pub const DEFAULT_SIZES: [usize; 5] = [100, 500, 1000, 2500, 5000];

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct BenchOptions {
    pub sizes: Vec<usize>,
    pub p: usize,
    pub m: usize,
    pub sweeps: usize,
    pub seed: u64,
}

impl Default for BenchOptions {
    fn default() -> Self {
        BenchOptions { sizes: DEFAULT_SIZES.to_vec(), p: 10, m: 50, sweeps: 20, seed: 1 }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct BenchRow {
    pub n: usize,
    pub seconds: f64,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct BenchReport {
    pub rows: Vec<BenchRow>,
    pub slope: f64,
    pub intercept: f64,
    pub r_squared: f64,
}

/// Least-squares line through `(x, y)`: `(slope, intercept, R^2)`.
pub fn linear_fit(x: &[f64], y: &[f64]) -> (f64, f64, f64) {
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let sxx: f64 = x.iter().map(|a| (a - mx).powi(2)).sum();
    let syy: f64 = y.iter().map(|b| (b - my).powi(2)).sum();
    let slope = sxy / sxx;
    let r2 = if syy == 0.0 { 1.0 } else { sxy * sxy / (sxx * syy) };
    (slope, my - slope * mx, r2)
}

/// Time a `sweeps`-sweep chain on a fresh Friedman sample at every size.
pub fn scaling_benchmark(opts: &BenchOptions) -> Result<BenchReport> {
    if opts.sizes.len() < 2 {
        return Err(Error::InvalidParameter("the benchmark needs at least two sizes".into()));
    }
    if opts.sweeps == 0 {
        return Err(Error::InvalidParameter("the benchmark needs at least one sweep".into()));
    }
    let settings = PriorSettings { m: opts.m, ..PriorSettings::default() };
    let config = ChainConfig { burn_in: 0, keep: opts.sweeps, seed: opts.seed, ..ChainConfig::default() };
    let mut rows = Vec::with_capacity(opts.sizes.len());
    for &n in &opts.sizes {
        let mut rng = ChaCha8Rng::seed_from_u64(opts.seed ^ n as u64);
        let sample = generate_friedman(&mut rng, n, opts.p, 1.0)?;
        let spec = PriorSpec::calibrate(&sample.data, &settings)?;
        let start = Instant::now();
        run_chain(&sample.data, &spec, &config)?;
        rows.push(BenchRow { n, seconds: start.elapsed().as_secs_f64() });
    }
    let x: Vec<f64> = rows.iter().map(|r| r.n as f64).collect();
    let y: Vec<f64> = rows.iter().map(|r| r.seconds).collect();
    let (slope, intercept, r_squared) = linear_fit(&x, &y);
    Ok(BenchReport { rows, slope, intercept, r_squared })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exact_line() {
        let (s, i, r2) = linear_fit(&[1.0, 2.0, 3.0], &[5.0, 7.0, 9.0]);
        assert!((s - 2.0).abs() < 1e-12 && (i - 3.0).abs() < 1e-12 && (r2 - 1.0).abs() < 1e-12);
    }

    #[test]
    fn noisy_line() {
        let (_, _, r2) = linear_fit(&[1.0, 2.0, 3.0, 4.0], &[1.0, 3.0, 2.0, 4.0]);
        assert!((r2 - 0.64).abs() < 1e-12);
    }
}
