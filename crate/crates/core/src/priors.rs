//! The regularization prior.
//!
//! * Tree structure: a node at depth `d` is split with probability
//!   `alpha * (1 + d)^-beta`; the split variable is uniform over the available
//!   variables and the cutpoint uniform over that variable's available cutpoints.
//! * Leaf values: `mu ~ N(0, sigma_mu^2)` with `sigma_mu = 0.5 / (k sqrt(m))`
//!   (regression, response scaled to [-0.5, 0.5]) or `3 / (k sqrt(m))` (probit).
//! * Noise: `sigma^2 ~ nu * lambda / chi2(nu)` with `lambda` chosen so that
//!   `P(sigma < sigma_hat) = q`.
//!
//! A cutpoint is *available* at a node when it leaves at least `n_min` of the
//! node's rows on each side. A node with no available cutpoint on any variable
//! is necessarily terminal, so it contributes a factor of 1 to the tree prior;
//! this keeps the prior normalized over the reachable trees.

use std::ops::Range;

use log::warn;
use nalgebra::{DMatrix, DVector};
use rand::Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};
use statrs::function::gamma::gamma_lr;

use crate::data::Dataset;
use crate::error::{Error, Result};
use crate::tree::{DecisionTree, Node, NodeId, Partition, SplitRule};
use crate::Mode;

/// How the rough overestimate of sigma is obtained.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SigmaHatMode {
    /// Sample standard deviation of the response.
    Naive,
    /// Residual standard deviation of a least-squares fit on all predictors.
    #[default]
    Linear,
}

impl SigmaHatMode {
    pub fn as_str(self) -> &'static str {
        match self {
            SigmaHatMode::Naive => "naive",
            SigmaHatMode::Linear => "linear",
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "naive" => Ok(SigmaHatMode::Naive),
            "linear" => Ok(SigmaHatMode::Linear),
            other => Err(Error::InvalidParameter(format!("unknown sigma-hat mode {other:?}"))),
        }
    }
}

/// User-facing hyperparameters before calibration against data.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PriorSettings {
    pub alpha: f64,
    pub beta: f64,
    pub k: f64,
    pub m: usize,
    pub nu: f64,
    pub q: f64,
    pub sigma_hat_mode: SigmaHatMode,
    pub n_min: usize,
}

impl Default for PriorSettings {
    fn default() -> Self {
        PriorSettings {
            alpha: 0.95,
            beta: 2.0,
            k: 2.0,
            m: 200,
            nu: 3.0,
            q: 0.90,
            sigma_hat_mode: SigmaHatMode::Linear,
            n_min: 1,
        }
    }
}

impl PriorSettings {
    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidParameter(msg));
        if !(self.alpha > 0.0 && self.alpha < 1.0) && self.alpha != 0.0 {
            return bad(format!("alpha must lie in [0, 1), got {}", self.alpha));
        }
        if !(self.beta >= 0.0) {
            return bad(format!("beta must be >= 0, got {}", self.beta));
        }
        if !(self.k > 0.0 && self.k.is_finite()) {
            return bad(format!("k must be > 0, got {}", self.k));
        }
        if self.m == 0 {
            return bad("m must be at least 1".into());
        }
        if !(self.nu > 0.0 && self.nu.is_finite()) {
            return bad(format!("nu must be > 0, got {}", self.nu));
        }
        if !(self.q > 0.0 && self.q < 1.0) {
            return bad(format!("q must lie in (0, 1), got {}", self.q));
        }
        if self.n_min == 0 {
            return bad("n_min must be at least 1".into());
        }
        Ok(())
    }
}

/// Fully calibrated prior.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PriorSpec {
    pub alpha: f64,
    pub beta: f64,
    pub k: f64,
    pub m: usize,
    pub nu: f64,
    pub q: f64,
    pub sigma_mu: f64,
    pub lambda: f64,
    pub sigma_hat: f64,
    pub sigma_hat_mode: SigmaHatMode,
    pub n_min: usize,
    pub mode: Mode,
}

impl PriorSpec {
    /// Calibrate `sigma_mu`, `sigma_hat` and `lambda` against a dataset.
    /// Probit mode fixes sigma at 1, so `sigma_hat` is recorded as 1.
    pub fn calibrate(data: &Dataset, settings: &PriorSettings) -> Result<PriorSpec> {
        settings.validate()?;
        let (sigma_hat, used) = match data.mode() {
            Mode::Regression => sigma_hat_with_fallback(data, settings.sigma_hat_mode)?,
            Mode::Probit => (1.0, settings.sigma_hat_mode),
        };
        PriorSpec::from_sigma_hat(settings, data.mode(), sigma_hat, used)
    }

    pub fn from_sigma_hat(
        settings: &PriorSettings,
        mode: Mode,
        sigma_hat: f64,
        sigma_hat_mode: SigmaHatMode,
    ) -> Result<PriorSpec> {
        settings.validate()?;
        if !(sigma_hat > 0.0 && sigma_hat.is_finite()) {
            return Err(Error::InvalidParameter(format!("sigma_hat must be > 0, got {sigma_hat}")));
        }
        Ok(PriorSpec {
            alpha: settings.alpha,
            beta: settings.beta,
            k: settings.k,
            m: settings.m,
            nu: settings.nu,
            q: settings.q,
            sigma_mu: leaf_prior_sd(settings.k, settings.m, mode),
            lambda: calibrate_lambda(settings.nu, settings.q, sigma_hat)?,
            sigma_hat,
            sigma_hat_mode,
            n_min: settings.n_min,
            mode,
        })
    }

    pub fn settings(&self) -> PriorSettings {
        PriorSettings {
            alpha: self.alpha,
            beta: self.beta,
            k: self.k,
            m: self.m,
            nu: self.nu,
            q: self.q,
            sigma_hat_mode: self.sigma_hat_mode,
            n_min: self.n_min,
        }
    }

    pub fn split_prob(&self, depth: usize) -> f64 {
        split_prob(depth, self.alpha, self.beta)
    }
}

/// Prior probability that a node at `depth` is interior.
pub fn split_prob(depth: usize, alpha: f64, beta: f64) -> f64 {
    alpha * (1.0 + depth as f64).powf(-beta)
}

/// Prior standard deviation of a leaf value.
pub fn leaf_prior_sd(k: f64, m: usize, mode: Mode) -> f64 {
    let half_range = match mode {
        Mode::Regression => 0.5,
        Mode::Probit => 3.0,
    };
    half_range / (k * (m as f64).sqrt())
}

/// Cutpoint indices of `variable` that leave at least `n_min` of `rows` on each side.
pub fn available_cutpoints(data: &Dataset, rows: &[u32], variable: usize, n_min: usize) -> Range<usize> {
    if rows.len() < 2 * n_min {
        return 0..0;
    }
    let bins = data.bins(variable);
    let (lo, hi) = if n_min == 1 {
        rows.iter().fold((u32::MAX, 0), |(lo, hi), &i| {
            let b = bins[i as usize];
            (lo.min(b), hi.max(b))
        })
    } else {
        let mut sorted: Vec<u32> = rows.iter().map(|&i| bins[i as usize]).collect();
        sorted.sort_unstable();
        (sorted[n_min - 1], sorted[sorted.len() - n_min])
    };
    if hi > lo {
        lo as usize..hi as usize
    } else {
        0..0
    }
}

fn variable_splittable(data: &Dataset, rows: &[u32], variable: usize, n_min: usize) -> bool {
    if n_min == 1 {
        let bins = data.bins(variable);
        match rows.split_first() {
            Some((&first, rest)) => {
                let b0 = bins[first as usize];
                rest.iter().any(|&i| bins[i as usize] != b0)
            }
            None => false,
        }
    } else {
        !available_cutpoints(data, rows, variable, n_min).is_empty()
    }
}

/// Variables with at least one available cutpoint for these rows.
pub fn available_variables(data: &Dataset, rows: &[u32], n_min: usize) -> Vec<usize> {
    if rows.len() < 2 * n_min {
        return Vec::new();
    }
    (0..data.p())
        .filter(|&v| variable_splittable(data, rows, v, n_min))
        .collect()
}

pub fn has_available_split(data: &Dataset, rows: &[u32], n_min: usize) -> bool {
    rows.len() >= 2 * n_min && (0..data.p()).any(|v| variable_splittable(data, rows, v, n_min))
}

/// Log prior probability of a tree's structure and rules (leaf values excluded).
pub fn tree_log_prior(tree: &DecisionTree, data: &Dataset, spec: &PriorSpec) -> Result<f64> {
    tree_log_prior_with(tree, &tree.partition(data), data, spec)
}

pub(crate) fn tree_log_prior_with(
    tree: &DecisionTree,
    part: &Partition,
    data: &Dataset,
    spec: &PriorSpec,
) -> Result<f64> {
    let mut total = 0.0;
    for id in tree.preorder_ids() {
        let rows = part.rows(id);
        let p_split = spec.split_prob(tree.depth(id));
        match tree.node(id) {
            Node::Leaf { .. } => {
                if has_available_split(data, rows, spec.n_min) {
                    total += (1.0 - p_split).ln();
                }
            }
            Node::Interior { rule, .. } => {
                let cuts = available_cutpoints(data, rows, rule.variable, spec.n_min);
                if !cuts.contains(&rule.cutpoint) {
                    return Err(Error::InvalidTree(format!(
                        "rule {rule:?} at {id:?} is not available for the {} rows routed there",
                        rows.len()
                    )));
                }
                let vars = available_variables(data, rows, spec.n_min).len();
                total += p_split.ln() - (vars as f64).ln() - (cuts.len() as f64).ln();
            }
        }
    }
    Ok(total)
}

/// Draw a tree from the prior, with leaf values from `N(0, sigma_mu^2)`.
pub fn sample_tree_from_prior<R: Rng + ?Sized>(rng: &mut R, data: &Dataset, spec: &PriorSpec) -> DecisionTree {
    let leaf_prior = Normal::new(0.0, spec.sigma_mu).expect("sigma_mu is positive");
    let mut tree = DecisionTree::stump(0.0);
    let mut stack: Vec<(NodeId, Vec<u32>)> = vec![(NodeId::ROOT, (0..data.n() as u32).collect())];
    while let Some((id, rows)) = stack.pop() {
        let depth = tree.depth(id);
        let vars = available_variables(data, &rows, spec.n_min);
        if vars.is_empty() || !rng.random_bool(spec.split_prob(depth).clamp(0.0, 1.0)) {
            tree.set_mu(id, leaf_prior.sample(rng));
            continue;
        }
        let variable = vars[rng.random_range(0..vars.len())];
        let cuts = available_cutpoints(data, &rows, variable, spec.n_min);
        let cutpoint = rng.random_range(cuts);
        tree = tree
            .edit_grow(id, SplitRule::new(variable, cutpoint))
            .expect("growing a leaf");
        let (left, right) = tree.children(id).unwrap();
        let bins = data.bins(variable);
        let (l, r): (Vec<u32>, Vec<u32>) = rows.iter().partition(|&&i| bins[i as usize] as usize <= cutpoint);
        stack.push((right, r));
        stack.push((left, l));
    }
    tree
}

/// Rough overestimate of sigma on the transformed response scale.
pub fn estimate_sigma_hat(data: &Dataset, mode: SigmaHatMode) -> Result<f64> {
    sigma_hat_with_fallback(data, mode).map(|(s, _)| s)
}

/// Like [`estimate_sigma_hat`], also reporting which estimate was used (the
/// linear estimate falls back to the naive one when `n <= p + 1`).
pub fn sigma_hat_with_fallback(data: &Dataset, mode: SigmaHatMode) -> Result<(f64, SigmaHatMode)> {
    let y = data.y();
    let n = y.len();
    if n < 2 {
        return Err(Error::DegenerateResponse("need at least two rows to estimate sigma".into()));
    }
    let p = data.p();
    let mode = if mode == SigmaHatMode::Linear && n <= p + 1 {
        warn!("linear sigma estimate needs n > p + 1 (n = {n}, p = {p}); using the naive estimate");
        SigmaHatMode::Naive
    } else {
        mode
    };
    let sd = match mode {
        SigmaHatMode::Naive => {
            let mean = y.iter().sum::<f64>() / n as f64;
            let ss: f64 = y.iter().map(|v| (v - mean).powi(2)).sum();
            (ss / (n - 1) as f64).sqrt()
        }
        SigmaHatMode::Linear => {
            let x = DMatrix::from_fn(n, p + 1, |i, j| if j == 0 { 1.0 } else { data.x(i, j - 1) });
            let yv = DVector::from_column_slice(y);
            let svd = x.clone().svd(true, true);
            let coef = svd
                .solve(&yv, 1e-12)
                .map_err(|e| Error::Numerical(format!("least squares failed: {e}")))?;
            let resid = yv - x * coef;
            (resid.norm_squared() / (n - p - 1) as f64).sqrt()
        }
    };
    if !(sd > 1e-10) {
        return Err(Error::DegenerateResponse(format!(
            "{} sigma estimate is {sd:e}; the response is fit exactly",
            mode.as_str()
        )));
    }
    Ok((sd, mode))
}

/// `P(chi2(nu) <= x)`.
pub fn chi_square_cdf(x: f64, nu: f64) -> f64 {
    if x <= 0.0 {
        0.0
    } else {
        gamma_lr(nu / 2.0, x / 2.0)
    }
}

/// Inverse of [`chi_square_cdf`] by bracketing bisection.
pub fn chi_square_quantile(p: f64, nu: f64) -> Result<f64> {
    if !(p > 0.0 && p < 1.0) || !(nu > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "chi-square quantile needs p in (0,1) and nu > 0 (got p = {p}, nu = {nu})"
        )));
    }
    let mut lo = 0.0;
    let mut hi = nu.max(1.0);
    while chi_square_cdf(hi, nu) < p {
        lo = hi;
        hi *= 2.0;
        if !hi.is_finite() {
            return Err(Error::Numerical("chi-square quantile bracket diverged".into()));
        }
    }
    for _ in 0..2000 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if chi_square_cdf(mid, nu) < p {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// Scale `lambda` of the `nu * lambda / chi2(nu)` prior on sigma^2 such that
/// `P(sigma < sigma_hat) = q`.
pub fn calibrate_lambda(nu: f64, q: f64, sigma_hat: f64) -> Result<f64> {
    if !(nu > 0.0) || !(q > 0.0 && q < 1.0) || !(sigma_hat > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "calibration needs nu > 0, q in (0,1), sigma_hat > 0 (got {nu}, {q}, {sigma_hat})"
        )));
    }
    let quantile = chi_square_quantile(1.0 - q, nu)?;
    let lambda = sigma_hat * sigma_hat * quantile / nu;
    let achieved = sigma_prior_cdf(sigma_hat, nu, lambda);
    if ((achieved - q) / q).abs() > 1e-6 {
        return Err(Error::Numerical(format!(
            "calibrated prior gives P(sigma < sigma_hat) = {achieved}, wanted {q}"
        )));
    }
    Ok(lambda)
}

/// `P(sigma < s)` under `sigma^2 ~ nu * lambda / chi2(nu)`.
pub fn sigma_prior_cdf(s: f64, nu: f64, lambda: f64) -> f64 {
    if s <= 0.0 {
        return 0.0;
    }
    1.0 - chi_square_cdf(nu * lambda / (s * s), nu)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::data::Schema;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn spec_default(mode: Mode) -> PriorSpec {
        PriorSpec::from_sigma_hat(&PriorSettings::default(), mode, 1.0, SigmaHatMode::Naive).unwrap()
    }

    fn line_data(xs: &[f64], y: &[f64]) -> Dataset {
        Dataset::from_columns(vec![xs.to_vec()], y.to_vec(), Mode::Regression, Schema::numeric(1, "y"), 100).unwrap()
    }

    #[test]
    fn split_prob_values() {
        assert!((split_prob(0, 0.95, 2.0) - 0.95).abs() < 1e-15);
        assert!((split_prob(1, 0.95, 2.0) - 0.2375).abs() < 1e-15);
        assert!((split_prob(3, 0.95, 2.0) - 0.059375).abs() < 1e-15);
        for d in 0..10 {
            assert!(split_prob(d + 1, 0.95, 2.0) < split_prob(d, 0.95, 2.0));
        }
    }

    #[test]
    fn leaf_sd_values() {
        assert!((leaf_prior_sd(2.0, 200, Mode::Regression) - 0.0176776695).abs() < 1e-9);
        assert_eq!(leaf_prior_sd(2.0, 1, Mode::Regression), 0.25);
        assert!((leaf_prior_sd(2.0, 50, Mode::Probit) - 0.2121320344).abs() < 1e-9);
        let r = leaf_prior_sd(2.0, 10, Mode::Regression) / leaf_prior_sd(2.0, 40, Mode::Regression);
        assert!((r - 2.0).abs() < 1e-12);
    }

    #[test]
    fn stump_prior() {
        let data = line_data(&[0.0, 1.0, 2.0], &[0.0, 1.0, 0.5]);
        let spec = spec_default(Mode::Regression);
        let lp = tree_log_prior(&DecisionTree::stump(0.0), &data, &spec).unwrap();
        assert!((lp - 0.05f64.ln()).abs() < 1e-12);
    }

    #[test]
    fn single_split_on_single_cutpoint() {
        // 1 variable with 1 cutpoint: both children are unsplittable and terminal w.p. 1
        let data = line_data(&[0.0, 0.0, 1.0, 1.0], &[0.0, 0.1, 0.9, 1.0]);
        assert_eq!(data.grid(0).len(), 1);
        let spec = spec_default(Mode::Regression);
        let t = DecisionTree::stump(0.0).edit_grow(NodeId::ROOT, SplitRule::new(0, 0)).unwrap();
        let lp = tree_log_prior(&t, &data, &spec).unwrap();
        assert!((lp - 0.95f64.ln()).abs() < 1e-12);
    }

    #[test]
    fn depth_two_prior_hand_expansion() {
        // x = 0..5 gives 5 cutpoints; y irrelevant to the prior
        let xs: Vec<f64> = (0..6).map(f64::from).collect();
        let data = line_data(&xs, &[0.0, 1.0, 2.0, 3.0, 4.0, 5.0]);
        let spec = spec_default(Mode::Regression);
        // root at cut 3 (x <= 3.5): left rows {0,1,2,3}, right {4,5}
        let t = DecisionTree::stump(0.0).edit_grow(NodeId::ROOT, SplitRule::new(0, 3)).unwrap();
        let (l, _) = t.children(NodeId::ROOT).unwrap();
        // left at cut 0 (x <= 0.5): {0} | {1,2,3}
        let t = t.edit_grow(l, SplitRule::new(0, 0)).unwrap();
        let p = |d: usize| split_prob(d, 0.95, 2.0);
        // root: 5 cuts available; left node {0..3}: cuts 0..3 -> 3 available
        // leaves: {0} unsplittable, {1,2,3} splittable at depth 2, {4,5} splittable at depth 1
        let expected = (p(0) / 5.0).ln() + (p(1) / 3.0).ln() + (1.0 - p(2)).ln() + (1.0 - p(1)).ln();
        let got = tree_log_prior(&t, &data, &spec).unwrap();
        assert!((got - expected).abs() < 1e-12, "{got} vs {expected}");
    }

    #[test]
    fn unavailable_rule_is_invalid() {
        let data = line_data(&[0.0, 0.0, 1.0, 1.0], &[0.0, 0.1, 0.9, 1.0]);
        let spec = spec_default(Mode::Regression);
        let t = DecisionTree::stump(0.0).edit_grow(NodeId::ROOT, SplitRule::new(0, 0)).unwrap();
        let (l, _) = t.children(NodeId::ROOT).unwrap();
        let t = t.edit_grow(l, SplitRule::new(0, 0)).unwrap();
        assert!(matches!(tree_log_prior(&t, &data, &spec), Err(Error::InvalidTree(_))));
    }

    #[test]
    fn alpha_zero_yields_stumps() {
        let xs: Vec<f64> = (0..20).map(f64::from).collect();
        let data = line_data(&xs, &xs);
        let settings = PriorSettings { alpha: 0.0, ..PriorSettings::default() };
        let spec = PriorSpec::from_sigma_hat(&settings, Mode::Regression, 1.0, SigmaHatMode::Naive).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..100 {
            assert_eq!(sample_tree_from_prior(&mut rng, &data, &spec).leaf_count(), 1);
        }
    }

    #[test]
    fn huge_beta_allows_only_a_root_split() {
        let xs: Vec<f64> = (0..50).map(f64::from).collect();
        let data = line_data(&xs, &xs);
        let settings = PriorSettings { beta: 1e6, ..PriorSettings::default() };
        let spec = PriorSpec::from_sigma_hat(&settings, Mode::Regression, 1.0, SigmaHatMode::Naive).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let draws = 20_000;
        let mut split = 0;
        for _ in 0..draws {
            let t = sample_tree_from_prior(&mut rng, &data, &spec);
            assert!(t.leaf_count() <= 2);
            split += (t.leaf_count() == 2) as usize;
        }
        let freq = split as f64 / draws as f64;
        assert!((freq - 0.95).abs() < 0.01, "{freq}");
    }

    #[test]
    fn naive_sigma_of_two_points() {
        let data = line_data(&[0.0, 1.0], &[3.0, 7.0]);
        let s = estimate_sigma_hat(&data, SigmaHatMode::Naive).unwrap();
        assert!((s - 0.5f64.sqrt()).abs() < 1e-12);
    }

    #[test]
    fn exact_linear_fit_is_degenerate() {
        let xs: Vec<f64> = (0..10).map(f64::from).collect();
        let ys: Vec<f64> = xs.iter().map(|x| 2.0 * x).collect();
        let data = line_data(&xs, &ys);
        assert!(matches!(
            estimate_sigma_hat(&data, SigmaHatMode::Linear),
            Err(Error::DegenerateResponse(_))
        ));
    }

    #[test]
    fn linear_falls_back_when_p_is_large() {
        let data = line_data(&[0.0, 1.0], &[3.0, 7.0]);
        let (s, mode) = sigma_hat_with_fallback(&data, SigmaHatMode::Linear).unwrap();
        assert_eq!(mode, SigmaHatMode::Naive);
        assert!((s - 0.5f64.sqrt()).abs() < 1e-12);
    }

    #[test]
    fn friedman_naive_exceeds_linear() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let s = crate::data::generate_friedman(&mut rng, 100, 10, 1.0).unwrap();
        let naive = estimate_sigma_hat(&s.data, SigmaHatMode::Naive).unwrap();
        let linear = estimate_sigma_hat(&s.data, SigmaHatMode::Linear).unwrap();
        assert!(naive > linear, "{naive} <= {linear}");
    }

    #[test]
    fn lambda_matches_chi_square_quantiles() {
        // reference quantiles of chi2(3): 0.1 -> 0.5843744, 0.01 -> 0.1148318
        let l90 = calibrate_lambda(3.0, 0.90, 2.0).unwrap();
        assert!((l90 - 4.0 * 0.5843744 / 3.0).abs() < 1e-6, "{l90}");
        let l99 = calibrate_lambda(3.0, 0.99, 2.0).unwrap();
        assert!((l99 - 4.0 * 0.1148318 / 3.0).abs() < 1e-6, "{l99}");
        assert!(l99 < l90);
        assert!((l90 - 0.779).abs() < 5e-4 && (l99 - 0.153).abs() < 5e-4);
    }

    #[test]
    fn calibrated_prior_monte_carlo() {
        use rand_distr::ChiSquared;
        let lambda = calibrate_lambda(3.0, 0.90, 2.0).unwrap();
        let chi = ChiSquared::new(3.0).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        let draws = 1_000_000;
        let below = (0..draws)
            .filter(|_| (3.0 * lambda / chi.sample(&mut rng)).sqrt() < 2.0)
            .count();
        let freq = below as f64 / draws as f64;
        assert!((freq - 0.90).abs() < 0.003, "{freq}");
    }

    #[test]
    fn lambda_decreases_in_q() {
        let mut prev = f64::INFINITY;
        for q in [0.5, 0.75, 0.9, 0.95, 0.99] {
            let l = calibrate_lambda(3.0, q, 1.0).unwrap();
            assert!(l < prev);
            prev = l;
        }
    }
}
