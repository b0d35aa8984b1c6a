//! Binary classification through a probit link.
//!
//! `P(Y = 1 | x) = Phi(G(x) + c)` where `G` is the sum of trees and `c` a fixed
//! offset. Sampling augments the data with latent utilities
//! `Z_i ~ N(G(x_i) + c, 1)` constrained to agree in sign with the labels; given
//! `Z`, the trees are updated by the regression sweep on `Z - c` with sigma = 1.

use rand::Rng;
use rand_distr::{Distribution, Uniform};
use statrs::function::erf::{erfc, erfc_inv};

use crate::data::{Dataset, Schema};
use crate::error::{Error, Result};
use crate::mcmc::{chain_rng, check_spec, Backfit, ChainConfig, SweepRecord};
use crate::posterior::{PosteriorDraws, Summary};
use crate::priors::PriorSpec;
use crate::Mode;

const SQRT_2: f64 = std::f64::consts::SQRT_2;
const LN_SQRT_2PI: f64 = 0.918_938_533_204_672_8;

/// Standard normal CDF.
pub fn normal_cdf(x: f64) -> f64 {
    0.5 * erfc(-x / SQRT_2)
}

/// Inverse of [`normal_cdf`] on (0, 1).
pub fn normal_quantile(p: f64) -> f64 {
    if p <= 0.0 {
        return f64::NEG_INFINITY;
    }
    if p >= 1.0 {
        return f64::INFINITY;
    }
    -SQRT_2 * erfc_inv(2.0 * p)
}

/// `ln Phi(x)`, accurate far into the lower tail.
pub fn log_normal_cdf(x: f64) -> f64 {
    if x > -35.0 {
        normal_cdf(x).ln()
    } else {
        log_normal_cdf_series(x)
    }
}

/// Mills-ratio series: `Phi(x) ~ phi(x)/(-x) * (1 - 1/x^2 + 3/x^4 - 15/x^6 + 105/x^8)`.
fn log_normal_cdf_series(x: f64) -> f64 {
    let x2 = x * x;
    let series = 1.0 - 1.0 / x2 + 3.0 / (x2 * x2) - 15.0 / (x2 * x2 * x2) + 105.0 / (x2 * x2 * x2 * x2);
    -0.5 * x2 - LN_SQRT_2PI - (-x).ln() + series.ln()
}

fn log_normal_pdf(x: f64) -> f64 {
    -0.5 * x * x - LN_SQRT_2PI
}

/// Solve `ln Phi(w) = log_p` for `w` by Newton iteration from `start`.
fn log_space_quantile(log_p: f64, start: f64) -> f64 {
    let mut w = start;
    for _ in 0..100 {
        let f = log_normal_cdf(w) - log_p;
        let slope = (log_normal_pdf(w) - log_normal_cdf(w)).exp();
        let step = f / slope;
        w -= step;
        if step.abs() <= 1e-13 * w.abs().max(1.0) {
            break;
        }
    }
    w
}

/// Draw of `X ~ N(0, 1)` conditioned on `X > a`, by inversion of the CDF on the
/// truncated region. Above `a = 5` the inversion is carried out on `ln Phi`.
pub fn truncated_normal_above<R: Rng + ?Sized>(rng: &mut R, a: f64) -> f64 {
    // open interval so the logarithm and quantile stay finite
    let u: f64 = Uniform::new(f64::EPSILON, 1.0).expect("valid range").sample(rng);
    let x = if a <= 5.0 {
        -normal_quantile(u * normal_cdf(-a))
    } else {
        let log_p = u.ln() + log_normal_cdf(-a);
        // exponential approximation of the tail as the starting point
        -log_space_quantile(log_p, -a + u.ln() / a)
    };
    if x > a {
        x
    } else {
        a.next_up()
    }
}

/// Latent utilities, one per row.
#[derive(Clone, Debug, PartialEq)]
pub struct LatentState {
    pub z: Vec<f64>,
}

impl LatentState {
    /// True iff `z_i > 0` exactly for the rows labelled 1.
    pub fn consistent_with(&self, labels: &[f64]) -> bool {
        self.z.len() == labels.len()
            && self.z.iter().zip(labels).all(|(&z, &y)| (y == 1.0) == (z > 0.0))
    }
}

/// Draw `z_i ~ N(g_i + c, 1)` truncated to `(0, inf)` if `y_i = 1`, else to `(-inf, 0]`.
pub fn draw_latents<R: Rng + ?Sized>(rng: &mut R, labels: &[f64], g: &[f64], offset: f64) -> LatentState {
    let mut z = vec![0.0; labels.len()];
    draw_latents_into(rng, labels, g, offset, &mut z);
    LatentState { z }
}

fn draw_latents_into<R: Rng + ?Sized>(rng: &mut R, labels: &[f64], g: &[f64], offset: f64, z: &mut [f64]) {
    for ((zi, &y), &gi) in z.iter_mut().zip(labels).zip(g) {
        let mean = gi + offset;
        *zi = if y == 1.0 {
            mean + truncated_normal_above(rng, -mean)
        } else {
            (mean - truncated_normal_above(rng, mean)).min(0.0)
        };
        if y == 1.0 && *zi <= 0.0 {
            *zi = f64::MIN_POSITIVE;
        }
    }
}

/// Offset `c = Phi^-1(p0)` for a shrinkage target `p0` in (0, 1).
pub fn offset_for(p0: f64) -> Result<f64> {
    if !(p0 > 0.0 && p0 < 1.0) {
        return Err(Error::InvalidParameter(format!("p0 must lie in (0, 1), got {p0}")));
    }
    Ok(normal_quantile(p0))
}

/// Run one probit chain with shrinkage target `p0` (0.5 gives `c = 0`).
pub fn run_probit_chain(data: &Dataset, spec: &PriorSpec, config: &ChainConfig, p0: f64) -> Result<PosteriorDraws> {
    let offset = offset_for(p0)?;
    run_probit_chain_observed(data, spec, config, offset, 0, &mut |_| {})
}

pub fn run_probit_chain_observed(
    data: &Dataset,
    spec: &PriorSpec,
    config: &ChainConfig,
    offset: f64,
    chain: usize,
    observer: &mut dyn FnMut(&SweepRecord),
) -> Result<PosteriorDraws> {
    if data.mode() != Mode::Probit {
        return Err(Error::InvalidParameter("probit sampler needs a probit-mode dataset".into()));
    }
    check_spec(data, spec, config)?;
    if !offset.is_finite() {
        return Err(Error::InvalidParameter(format!("offset must be finite, got {offset}")));
    }
    let labels = data.y();
    let ones = labels.iter().filter(|&&y| y == 1.0).count();
    if ones == 0 || ones == labels.len() {
        return Err(Error::DegenerateLabels(format!(
            "all {} labels are {}",
            labels.len(),
            if ones == 0 { 0 } else { 1 }
        )));
    }
    let mut rng = chain_rng(config.seed, chain);
    let mut state = Backfit::new(data, spec, config.moves, 1.0)?;
    let mut z = vec![0.0; labels.len()];
    let mut target = vec![0.0; labels.len()];
    let mut draws = Vec::with_capacity(config.keep);
    for s in 0..config.total_sweeps() {
        draw_latents_into(&mut rng, labels, state.total_fit(), offset, &mut z);
        for (t, zi) in target.iter_mut().zip(&z) {
            *t = zi - offset;
        }
        let rec = state.sweep(&mut rng, &target, true, chain)?;
        observer(&rec);
        if s >= config.burn_in && (s - config.burn_in + 1) % config.thin == 0 {
            draws.push(state.ensemble());
        }
    }
    PosteriorDraws::from_chain(draws, chain, data, spec, config, offset)
}

/// Posterior mean and interval of `P(Y = 1 | x)` per row.
pub fn predict_prob(draws: &PosteriorDraws, rows: &[Vec<f64>], alpha: f64) -> Result<Vec<Summary>> {
    if draws.mode() != Mode::Probit {
        return Err(Error::InvalidParameter("predict_prob needs a probit model".into()));
    }
    draws.summarize(rows, alpha)
}

/// A sample from the probit model with `G(x) = 2 x_1 - 1` and predictors
/// uniform on (-1, 1).
pub struct ProbitSample {
    pub data: Dataset,
    pub g: Vec<f64>,
}

pub fn simulate_probit<R: Rng + ?Sized>(rng: &mut R, n: usize, p: usize) -> Result<ProbitSample> {
    if p == 0 || n == 0 {
        return Err(Error::InvalidParameter("need n >= 1 and p >= 1".into()));
    }
    let rows: Vec<Vec<f64>> = (0..n)
        .map(|_| (0..p).map(|_| rng.random_range(-1.0..1.0)).collect())
        .collect();
    let g: Vec<f64> = rows.iter().map(|r| 2.0 * r[0] - 1.0).collect();
    let y: Vec<f64> = g
        .iter()
        .map(|&gi| {
            let e: f64 = rand_distr::StandardNormal.sample(rng);
            if gi + e > 0.0 { 1.0 } else { 0.0 }
        })
        .collect();
    let columns = (0..p).map(|v| rows.iter().map(|r| r[v]).collect()).collect();
    let data = Dataset::from_columns(columns, y, Mode::Probit, Schema::numeric(p, "y"), crate::data::DEFAULT_MAX_CUTPOINTS)?;
    Ok(ProbitSample { data, g })
}

/// Area under the ROC curve of `scores` against 0/1 `labels`, ties counted half.
pub fn auc(scores: &[f64], labels: &[f64]) -> f64 {
    let mut idx: Vec<usize> = (0..scores.len()).collect();
    idx.sort_by(|&a, &b| scores[a].total_cmp(&scores[b]));
    // midranks
    let mut ranks = vec![0.0; scores.len()];
    let mut i = 0;
    while i < idx.len() {
        let mut j = i;
        while j + 1 < idx.len() && scores[idx[j + 1]] == scores[idx[i]] {
            j += 1;
        }
        let r = 0.5 * (i + j) as f64 + 1.0;
        for &k in &idx[i..=j] {
            ranks[k] = r;
        }
        i = j + 1;
    }
    let n1 = labels.iter().filter(|&&y| y == 1.0).count() as f64;
    let n0 = labels.len() as f64 - n1;
    let rank_sum: f64 = ranks.iter().zip(labels).filter(|(_, &y)| y == 1.0).map(|(r, _)| r).sum();
    (rank_sum - n1 * (n1 + 1.0) / 2.0) / (n1 * n0)
}
