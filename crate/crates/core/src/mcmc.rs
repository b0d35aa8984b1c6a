//! Backfitting MCMC.
//!
//! Each sweep visits the trees in order. Tree `j` is updated by one
//! Metropolis-Hastings step on its structure, with its leaf values integrated
//! out against the partial residual `R_j = y - sum_{k != j} g_k`, followed by
//! conjugate Gaussian draws of its leaf values. After all trees, sigma is drawn
//! from its inverse-gamma full conditional.
//!
//! Random streams: chain `c` of a run seeded with `s` uses
//! `ChaCha8Rng::seed_from_u64(s)` with `set_stream(c)`.

use std::f64::consts::PI;

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Gamma, StandardNormal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::data::Dataset;
use crate::error::{Error, Result};
use crate::posterior::PosteriorDraws;
use crate::priors::{
    available_cutpoints, available_variables, has_available_split, tree_log_prior_with, PriorSpec,
};
use crate::tree::{DecisionTree, Ensemble, NodeId, Partition, SplitRule};
use crate::Mode;

/// Sweeps between exact recomputations of the total fit.
const RECOMPUTE_EVERY: usize = 100;

/// Per-leaf sufficient statistics of the residuals routed to it.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct LeafStats {
    pub count: usize,
    pub sum: f64,
    pub sum_sq: f64,
}

impl LeafStats {
    pub fn from_values(values: impl IntoIterator<Item = f64>) -> Self {
        values.into_iter().fold(LeafStats::default(), |s, r| LeafStats {
            count: s.count + 1,
            sum: s.sum + r,
            sum_sq: s.sum_sq + r * r,
        })
    }

    fn of_rows(rows: &[u32], residuals: &[f64]) -> Self {
        Self::from_values(rows.iter().map(|&i| residuals[i as usize]))
    }
}

/// Statistics for every leaf of a tree, in pre-order.
#[derive(Clone, Debug, PartialEq)]
pub struct SuffStats {
    pub leaves: Vec<(NodeId, LeafStats)>,
}

impl SuffStats {
    pub fn new(part: &Partition, residuals: &[f64]) -> Self {
        SuffStats {
            leaves: part
                .cells()
                .map(|(id, rows)| (id, LeafStats::of_rows(rows, residuals)))
                .collect(),
        }
    }

    pub fn total_count(&self) -> usize {
        self.leaves.iter().map(|(_, s)| s.count).sum()
    }
}

/// Probabilities of the four structural moves.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct MoveProbabilities {
    pub grow: f64,
    pub prune: f64,
    pub change: f64,
    pub swap: f64,
}

impl Default for MoveProbabilities {
    fn default() -> Self {
        MoveProbabilities { grow: 0.25, prune: 0.25, change: 0.40, swap: 0.10 }
    }
}

impl MoveProbabilities {
    /// Grow and prune only, each with probability one half.
    pub fn grow_prune() -> Self {
        MoveProbabilities { grow: 0.5, prune: 0.5, change: 0.0, swap: 0.0 }
    }

    pub fn validate(&self) -> Result<()> {
        let ps = [self.grow, self.prune, self.change, self.swap];
        if ps.iter().any(|p| !(p.is_finite() && *p >= 0.0)) {
            return Err(Error::InvalidParameter(format!("move probabilities must be >= 0: {ps:?}")));
        }
        let total: f64 = ps.iter().sum();
        if (total - 1.0).abs() > 1e-9 {
            return Err(Error::InvalidParameter(format!("move probabilities sum to {total}, not 1")));
        }
        Ok(())
    }

    fn prob(&self, kind: MoveKind) -> f64 {
        match kind {
            MoveKind::Grow => self.grow,
            MoveKind::Prune => self.prune,
            MoveKind::Change => self.change,
            MoveKind::Swap => self.swap,
        }
    }

    fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> MoveKind {
        let u: f64 = rng.random();
        let mut acc = 0.0;
        for kind in MoveKind::ALL {
            acc += self.prob(kind);
            if u < acc {
                return kind;
            }
        }
        // u landed in rounding slack above the cumulative sum
        *MoveKind::ALL.iter().rev().find(|&&k| self.prob(k) > 0.0).unwrap_or(&MoveKind::Grow)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum MoveKind {
    Grow,
    Prune,
    Change,
    Swap,
}

impl MoveKind {
    pub const ALL: [MoveKind; 4] = [MoveKind::Grow, MoveKind::Prune, MoveKind::Change, MoveKind::Swap];

    pub fn index(self) -> usize {
        self as usize
    }
}

/// Burn-in, retention and thinning of one chain.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ChainConfig {
    pub burn_in: usize,
    pub keep: usize,
    pub thin: usize,
    pub seed: u64,
    #[serde(default)]
    pub moves: MoveProbabilities,
}

impl Default for ChainConfig {
    fn default() -> Self {
        ChainConfig { burn_in: 200, keep: 1000, thin: 1, seed: 1, moves: MoveProbabilities::default() }
    }
}

impl ChainConfig {
    pub fn validate(&self) -> Result<()> {
        if self.keep == 0 {
            return Err(Error::InvalidParameter("keep must be at least 1".into()));
        }
        if self.thin == 0 {
            return Err(Error::InvalidParameter("thin must be at least 1".into()));
        }
        self.moves.validate()
    }

    pub fn total_sweeps(&self) -> usize {
        self.burn_in + self.keep * self.thin
    }
}

/// A proposed structural move.
#[derive(Clone, Debug)]
pub struct Proposal {
    pub kind: MoveKind,
    /// `None` when the move is infeasible; the step then auto-rejects.
    pub tree: Option<DecisionTree>,
    /// `log q(old | new) - log q(new | old)`.
    pub log_proposal_ratio: f64,
    /// `log p(new) - log p(old)`.
    pub log_prior_ratio: f64,
}

/// Outcome of one Metropolis-Hastings step.
#[derive(Clone, Debug)]
pub struct TreeStep {
    pub tree: DecisionTree,
    pub kind: MoveKind,
    pub accepted: bool,
}

/// Summary of one sweep, emitted to observers of a chain.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepRecord {
    pub chain: usize,
    pub sweep: usize,
    pub sigma: f64,
    pub mean_depth: f64,
    pub mean_leaves: f64,
    /// Indexed by [`MoveKind::index`].
    pub proposed: [usize; 4],
    pub accepted: [usize; 4],
}

impl SweepRecord {
    pub fn acceptance_rate(&self, kind: MoveKind) -> f64 {
        let p = self.proposed[kind.index()];
        if p == 0 {
            0.0
        } else {
            self.accepted[kind.index()] as f64 / p as f64
        }
    }
}

/// `y - sum_{k != j} g(x; T_k, M_k)` by direct evaluation.
pub fn partial_residuals(y: &[f64], ens: &Ensemble, j: usize, data: &Dataset) -> Result<Vec<f64>> {
    if j >= ens.m() {
        return Err(Error::InvalidParameter(format!("tree index {j} out of range for m = {}", ens.m())));
    }
    if y.len() != data.n() {
        return Err(Error::InvalidParameter("response length does not match the dataset".into()));
    }
    let mut r = y.to_vec();
    for (k, tree) in ens.trees().iter().enumerate() {
        if k == j {
            continue;
        }
        for (leaf, rows) in tree.partition(data).cells() {
            let mu = tree.mu(leaf);
            for &i in rows {
                r[i as usize] -= mu;
            }
        }
    }
    Ok(r)
}

/// Log of the Gaussian likelihood of a leaf's residuals with its mean
/// integrated against `N(0, sigma_mu^2)`.
pub fn leaf_log_marginal(stats: &LeafStats, sigma: f64, sigma_mu: f64) -> f64 {
    let n = stats.count as f64;
    let s2 = sigma * sigma;
    let t2 = sigma_mu * sigma_mu;
    let denom = s2 + n * t2;
    -0.5 * n * (2.0 * PI * s2).ln() + 0.5 * (s2 / denom).ln() - stats.sum_sq / (2.0 * s2)
        + t2 * stats.sum * stats.sum / (2.0 * s2 * denom)
}

pub fn tree_log_marginal(
    tree: &DecisionTree,
    residuals: &[f64],
    sigma: f64,
    spec: &PriorSpec,
    data: &Dataset,
) -> f64 {
    log_marginal_of(&tree.partition(data), residuals, sigma, spec.sigma_mu)
}

fn log_marginal_of(part: &Partition, residuals: &[f64], sigma: f64, sigma_mu: f64) -> f64 {
    part.cells()
        .map(|(_, rows)| leaf_log_marginal(&LeafStats::of_rows(rows, residuals), sigma, sigma_mu))
        .sum()
}

fn grow_log_q(p_grow: f64, growable: usize, nvar: usize, ncut: usize) -> f64 {
    p_grow.ln() - (growable as f64).ln() - (nvar as f64).ln() - (ncut as f64).ln()
}

fn prune_log_q(p_prune: f64, nog: usize) -> f64 {
    p_prune.ln() - (nog as f64).ln()
}

fn growable_leaves(part: &Partition, data: &Dataset, n_min: usize) -> Vec<NodeId> {
    part.cells()
        .filter(|(_, rows)| has_available_split(data, rows, n_min))
        .map(|(id, _)| id)
        .collect()
}

fn pick<T: Copy, R: Rng + ?Sized>(rng: &mut R, items: &[T]) -> T {
    items[rng.random_range(0..items.len())]
}

/// A proposal together with the quantities the acceptance step reuses.
struct Scored {
    proposal: Proposal,
    partition: Option<Partition>,
}

fn infeasible(kind: MoveKind) -> Scored {
    Scored {
        proposal: Proposal {
            kind,
            tree: None,
            log_proposal_ratio: f64::NEG_INFINITY,
            log_prior_ratio: f64::NEG_INFINITY,
        },
        partition: None,
    }
}

fn propose_scored<R: Rng + ?Sized>(
    rng: &mut R,
    tree: &DecisionTree,
    part: &Partition,
    old_log_prior: f64,
    data: &Dataset,
    spec: &PriorSpec,
    moves: &MoveProbabilities,
) -> Scored {
    let kind = moves.sample(rng);
    let n_min = spec.n_min;
    let (new_tree, log_q) = match kind {
        MoveKind::Grow => {
            let growable = growable_leaves(part, data, n_min);
            if growable.is_empty() {
                return infeasible(kind);
            }
            let leaf = pick(rng, &growable);
            let rows = part.rows(leaf);
            let vars = available_variables(data, rows, n_min);
            let variable = pick(rng, &vars);
            let cuts = available_cutpoints(data, rows, variable, n_min);
            let ncut = cuts.len();
            let cutpoint = rng.random_range(cuts);
            let new = match tree.edit_grow(leaf, SplitRule::new(variable, cutpoint)) {
                Ok(t) => t,
                Err(_) => return infeasible(kind),
            };
            let fwd = grow_log_q(moves.grow, growable.len(), vars.len(), ncut);
            let rev = prune_log_q(moves.prune, new.nog_nodes().len());
            (new, rev - fwd)
        }
        MoveKind::Prune => {
            let nog = tree.nog_nodes();
            if nog.is_empty() {
                return infeasible(kind);
            }
            let node = pick(rng, &nog);
            let rule = tree.rule(node).expect("nog nodes are interior");
            let new = match tree.edit_prune(node) {
                Ok(t) => t,
                Err(_) => return infeasible(kind),
            };
            let new_part = new.partition(data);
            let rows = new_part.rows(node);
            let growable = growable_leaves(&new_part, data, n_min).len();
            let nvar = available_variables(data, rows, n_min).len();
            let ncut = available_cutpoints(data, rows, rule.variable, n_min).len();
            let fwd = prune_log_q(moves.prune, nog.len());
            let rev = grow_log_q(moves.grow, growable, nvar, ncut);
            return score(kind, new, new_part, rev - fwd, old_log_prior, data, spec);
        }
        MoveKind::Change => {
            let interiors = tree.interiors();
            if interiors.is_empty() {
                return infeasible(kind);
            }
            let node = pick(rng, &interiors);
            let old_rule = tree.rule(node).expect("interior");
            let rows = part.rows(node);
            let vars = available_variables(data, rows, n_min);
            let variable = pick(rng, &vars);
            let cuts = available_cutpoints(data, rows, variable, n_min);
            let ncut_new = cuts.len();
            let cutpoint = rng.random_range(cuts);
            let ncut_old = available_cutpoints(data, rows, old_rule.variable, n_min).len();
            let new = match tree.edit_change(node, SplitRule::new(variable, cutpoint)) {
                Ok(t) => t,
                Err(_) => return infeasible(kind),
            };
            (new, (ncut_new as f64).ln() - (ncut_old as f64).ln())
        }
        MoveKind::Swap => {
            let pairs = tree.swap_pairs();
            if pairs.is_empty() {
                return infeasible(kind);
            }
            let (parent, child) = pick(rng, &pairs);
            match tree.edit_swap(parent, child) {
                Ok(t) => (t, 0.0),
                Err(_) => return infeasible(kind),
            }
        }
    };
    let new_part = new_tree.partition(data);
    score(kind, new_tree, new_part, log_q, old_log_prior, data, spec)
}

fn score(
    kind: MoveKind,
    tree: DecisionTree,
    part: Partition,
    log_q: f64,
    old_log_prior: f64,
    data: &Dataset,
    spec: &PriorSpec,
) -> Scored {
    match tree_log_prior_with(&tree, &part, data, spec) {
        Ok(lp) => Scored {
            proposal: Proposal {
                kind,
                tree: Some(tree),
                log_proposal_ratio: log_q,
                log_prior_ratio: lp - old_log_prior,
            },
            partition: Some(part),
        },
        Err(_) => infeasible(kind),
    }
}

/// Draw a structural proposal for `tree`.
pub fn propose_move<R: Rng + ?Sized>(
    rng: &mut R,
    tree: &DecisionTree,
    data: &Dataset,
    spec: &PriorSpec,
    moves: &MoveProbabilities,
) -> Result<Proposal> {
    let part = tree.partition(data);
    let old = tree_log_prior_with(tree, &part, data, spec)?;
    Ok(propose_scored(rng, tree, &part, old, data, spec, moves).proposal)
}

fn mh_step<R: Rng + ?Sized>(
    rng: &mut R,
    tree: &DecisionTree,
    part: Partition,
    residuals: &[f64],
    sigma: f64,
    data: &Dataset,
    spec: &PriorSpec,
    moves: &MoveProbabilities,
) -> Result<(DecisionTree, Partition, MoveKind, bool)> {
    let old_prior = tree_log_prior_with(tree, &part, data, spec)?;
    let scored = propose_scored(rng, tree, &part, old_prior, data, spec, moves);
    let kind = scored.proposal.kind;
    let (Some(new_tree), Some(new_part)) = (scored.proposal.tree, scored.partition) else {
        return Ok((tree.clone(), part, kind, false));
    };
    let delta_marginal = log_marginal_of(&new_part, residuals, sigma, spec.sigma_mu)
        - log_marginal_of(&part, residuals, sigma, spec.sigma_mu);
    let log_alpha = delta_marginal + scored.proposal.log_prior_ratio + scored.proposal.log_proposal_ratio;
    let u: f64 = rng.random();
    if log_alpha.is_nan() {
        return Err(Error::Numerical(format!("NaN acceptance ratio for a {kind:?} move")));
    }
    if u.ln() < log_alpha {
        Ok((new_tree, new_part, kind, true))
    } else {
        Ok((tree.clone(), part, kind, false))
    }
}

/// One Metropolis-Hastings update of a tree's structure given its partial residuals.
pub fn draw_tree<R: Rng + ?Sized>(
    rng: &mut R,
    tree: &DecisionTree,
    residuals: &[f64],
    sigma: f64,
    spec: &PriorSpec,
    data: &Dataset,
    moves: &MoveProbabilities,
) -> Result<TreeStep> {
    let (tree, _, kind, accepted) = mh_step(rng, tree, tree.partition(data), residuals, sigma, data, spec, moves)?;
    Ok(TreeStep { tree, kind, accepted })
}

fn draw_leaf<R: Rng + ?Sized>(rng: &mut R, stats: &LeafStats, sigma: f64, sigma_mu: f64) -> f64 {
    let s2 = sigma * sigma;
    let t2 = sigma_mu * sigma_mu;
    let denom = s2 + stats.count as f64 * t2;
    let mean = t2 * stats.sum / denom;
    let sd = (s2 * t2 / denom).sqrt();
    let z: f64 = StandardNormal.sample(rng);
    mean + sd * z
}

/// Conjugate draws of every leaf value of `tree`.
pub fn draw_leaf_values<R: Rng + ?Sized>(
    rng: &mut R,
    tree: &DecisionTree,
    residuals: &[f64],
    sigma: f64,
    spec: &PriorSpec,
    data: &Dataset,
) -> DecisionTree {
    let mut out = tree.clone();
    for (leaf, rows) in tree.partition(data).cells() {
        let mu = draw_leaf(rng, &LeafStats::of_rows(rows, residuals), sigma, spec.sigma_mu);
        out.set_mu(leaf, mu);
    }
    out
}

/// Draw sigma from its full conditional given the full residuals.
pub fn draw_sigma<R: Rng + ?Sized>(rng: &mut R, residuals: &[f64], spec: &PriorSpec) -> Result<f64> {
    let sse: f64 = residuals.iter().map(|e| e * e).sum();
    if !sse.is_finite() {
        return Err(Error::Numerical("non-finite residuals in sigma draw".into()));
    }
    let shape = 0.5 * (spec.nu + residuals.len() as f64);
    let scale = 0.5 * (spec.nu * spec.lambda + sse);
    let g = Gamma::new(shape, 1.0).map_err(|e| Error::Numerical(format!("gamma draw: {e}")))?;
    let x: f64 = g.sample(rng);
    Ok((scale / x).sqrt())
}

/// Random stream of chain `chain` under `seed`.
pub fn chain_rng(seed: u64, chain: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(chain as u64);
    rng
}

/// Sum-of-trees state with per-tree fitted values, updated tree by tree.
pub struct Backfit<'a> {
    data: &'a Dataset,
    spec: &'a PriorSpec,
    moves: MoveProbabilities,
    trees: Vec<DecisionTree>,
    fits: Vec<Vec<f64>>,
    total: Vec<f64>,
    sigma: f64,
    sweeps: usize,
    residual: Vec<f64>,
}

impl<'a> Backfit<'a> {
    /// `m` single-leaf trees at 0 with the given initial sigma.
    pub fn new(data: &'a Dataset, spec: &'a PriorSpec, moves: MoveProbabilities, sigma: f64) -> Result<Self> {
        moves.validate()?;
        if !(sigma > 0.0 && sigma.is_finite()) {
            return Err(Error::InvalidParameter(format!("initial sigma must be positive, got {sigma}")));
        }
        let n = data.n();
        Ok(Backfit {
            data,
            spec,
            moves,
            trees: vec![DecisionTree::stump(0.0); spec.m],
            fits: vec![vec![0.0; n]; spec.m],
            total: vec![0.0; n],
            sigma,
            sweeps: 0,
            residual: vec![0.0; n],
        })
    }

    pub fn sigma(&self) -> f64 {
        self.sigma
    }

    pub fn trees(&self) -> &[DecisionTree] {
        &self.trees
    }

    /// Current fit of the whole ensemble at every training row.
    pub fn total_fit(&self) -> &[f64] {
        &self.total
    }

    pub fn ensemble(&self) -> Ensemble {
        Ensemble::new(self.trees.clone(), self.sigma).expect("state is valid")
    }

    /// Update every tree against `target`, then sigma unless `fixed_sigma`.
    pub fn sweep<R: Rng + ?Sized>(
        &mut self,
        rng: &mut R,
        target: &[f64],
        fixed_sigma: bool,
        chain: usize,
    ) -> Result<SweepRecord> {
        let (data, spec) = (self.data, self.spec);
        let mut proposed = [0usize; 4];
        let mut accepted = [0usize; 4];
        for j in 0..self.trees.len() {
            for i in 0..self.residual.len() {
                self.residual[i] = target[i] - self.total[i] + self.fits[j][i];
            }
            let part = self.trees[j].partition(data);
            let (mut tree, part, kind, acc) =
                mh_step(rng, &self.trees[j], part, &self.residual, self.sigma, data, spec, &self.moves)?;
            proposed[kind.index()] += 1;
            accepted[kind.index()] += acc as usize;
            let fit = &mut self.fits[j];
            for (leaf, rows) in part.cells() {
                let mu = draw_leaf(rng, &LeafStats::of_rows(rows, &self.residual), self.sigma, spec.sigma_mu);
                tree.set_mu(leaf, mu);
                for &i in rows {
                    let i = i as usize;
                    self.total[i] += mu - fit[i];
                    fit[i] = mu;
                }
            }
            self.trees[j] = tree;
        }
        self.sweeps += 1;
        if self.sweeps % RECOMPUTE_EVERY == 0 {
            self.recompute_total();
        }
        if !fixed_sigma {
            for i in 0..self.residual.len() {
                self.residual[i] = target[i] - self.total[i];
            }
            self.sigma = draw_sigma(rng, &self.residual, spec)?;
        }
        let m = self.trees.len() as f64;
        Ok(SweepRecord {
            chain,
            sweep: self.sweeps,
            sigma: self.sigma,
            mean_depth: self.trees.iter().map(|t| t.max_depth() as f64).sum::<f64>() / m,
            mean_leaves: self.trees.iter().map(|t| t.leaf_count() as f64).sum::<f64>() / m,
            proposed,
            accepted,
        })
    }

    /// Rebuild the total fit from the per-tree fits.
    pub fn recompute_total(&mut self) {
        self.total.iter_mut().for_each(|v| *v = 0.0);
        for fit in &self.fits {
            for (t, f) in self.total.iter_mut().zip(fit) {
                *t += f;
            }
        }
    }

    /// Largest deviation between the maintained total fit and direct evaluation.
    pub fn residual_drift(&self) -> f64 {
        let ens = self.ensemble();
        let mut direct = vec![0.0; self.data.n()];
        for tree in ens.trees() {
            for (leaf, rows) in tree.partition(self.data).cells() {
                for &i in rows {
                    direct[i as usize] += tree.mu(leaf);
                }
            }
        }
        direct
            .iter()
            .zip(&self.total)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }
}

/// Run one regression chain (chain index 0). Probit data is dispatched to the
/// probit sampler with the default offset.
pub fn run_chain(data: &Dataset, spec: &PriorSpec, config: &ChainConfig) -> Result<PosteriorDraws> {
    run_chain_observed(data, spec, config, 0, &mut |_| {})
}

/// Run chain `chain`, reporting every sweep to `observer`.
pub fn run_chain_observed(
    data: &Dataset,
    spec: &PriorSpec,
    config: &ChainConfig,
    chain: usize,
    observer: &mut dyn FnMut(&SweepRecord),
) -> Result<PosteriorDraws> {
    if data.mode() == Mode::Probit {
        return crate::probit::run_probit_chain_observed(data, spec, config, 0.0, chain, observer);
    }
    check_spec(data, spec, config)?;
    let mut rng = chain_rng(config.seed, chain);
    let mut state = Backfit::new(data, spec, config.moves, spec.sigma_hat)?;
    let mut draws = Vec::with_capacity(config.keep);
    for s in 0..config.total_sweeps() {
        let rec = state.sweep(&mut rng, data.y(), false, chain)?;
        observer(&rec);
        if s >= config.burn_in && (s - config.burn_in + 1) % config.thin == 0 {
            draws.push(state.ensemble());
        }
    }
    PosteriorDraws::from_chain(draws, chain, data, spec, config, 0.0)
}

pub(crate) fn check_spec(data: &Dataset, spec: &PriorSpec, config: &ChainConfig) -> Result<()> {
    config.validate()?;
    if spec.mode != data.mode() {
        return Err(Error::InvalidParameter(format!(
            "prior calibrated for {} mode but data is {}",
            spec.mode.as_str(),
            data.mode().as_str()
        )));
    }
    Ok(())
}

/// Run `chains` independent chains in parallel and merge them in chain order.
pub fn run_chains(data: &Dataset, spec: &PriorSpec, config: &ChainConfig, chains: usize) -> Result<PosteriorDraws> {
    if chains == 0 {
        return Err(Error::InvalidParameter("need at least one chain".into()));
    }
    let runs: Vec<Result<PosteriorDraws>> = (0..chains)
        .into_par_iter()
        .map(|c| run_chain_observed(data, spec, config, c, &mut |_| {}))
        .collect();
    let runs = runs.into_iter().collect::<Result<Vec<_>>>()?;
    PosteriorDraws::merge(runs)
}
