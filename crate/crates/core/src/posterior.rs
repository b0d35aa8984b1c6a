//! Posterior draws and the summaries computed from them.

use log::warn;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::data::{bin_of, Dataset, Scaling, Schema};
use crate::error::{Error, Result};
use crate::mcmc::ChainConfig;
use crate::priors::PriorSpec;
use crate::probit::normal_cdf;
use crate::tree::{bin_row, DecisionTree, Ensemble, Node, NodeId};
use crate::Mode;

/// Everything about a fit except the draws themselves.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PosteriorMeta {
    pub mode: Mode,
    /// Probit offset `c`; 0 in regression mode.
    pub offset: f64,
    pub prior: PriorSpec,
    pub config: ChainConfig,
    /// Absent in probit mode.
    pub scaling: Option<Scaling>,
    pub schema: Schema,
    pub grids: Vec<Vec<f64>>,
}

/// The retained ensembles `f*_1, ..., f*_K`, labelled by chain.
#[derive(Clone, Debug, PartialEq)]
pub struct PosteriorDraws {
    draws: Vec<Ensemble>,
    chains: Vec<usize>,
    meta: PosteriorMeta,
}

/// Mean, median and equal-tailed interval of a set of draws.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Summary {
    pub mean: f64,
    pub median: f64,
    pub lower: f64,
    pub upper: f64,
}

/// One point of a partial-dependence curve.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PdPoint {
    pub x: Vec<f64>,
    pub mean: f64,
    pub lower: f64,
    pub upper: f64,
}

/// Number of points in the default partial-dependence grid.
pub const DEFAULT_PD_POINTS: usize = 20;

impl PosteriorDraws {
    pub fn new(draws: Vec<Ensemble>, chains: Vec<usize>, meta: PosteriorMeta) -> Result<Self> {
        if draws.is_empty() {
            return Err(Error::InvalidParameter("posterior needs at least one draw".into()));
        }
        if chains.len() != draws.len() {
            return Err(Error::InvalidParameter("one chain label is required per draw".into()));
        }
        let m = draws[0].m();
        if m != meta.prior.m {
            return Err(Error::InvalidParameter(format!(
                "draws have {m} trees but the prior says m = {}",
                meta.prior.m
            )));
        }
        if meta.grids.len() != meta.schema.num_features() {
            return Err(Error::Schema("grid count does not match the schema".into()));
        }
        for (k, d) in draws.iter().enumerate() {
            if d.m() != m {
                return Err(Error::InvalidParameter(format!("draw {k} has {} trees, expected {m}", d.m())));
            }
            for t in d.trees() {
                t.validate(&meta.grids)?;
            }
        }
        match (meta.mode, &meta.scaling) {
            (Mode::Regression, None) => {
                return Err(Error::InvalidParameter("regression posterior needs a scaling record".into()))
            }
            (Mode::Regression, Some(s)) if !(s.y_max > s.y_min) => {
                return Err(Error::InvalidParameter("scaling record is not invertible".into()))
            }
            _ => {}
        }
        Ok(PosteriorDraws { draws, chains, meta })
    }

    pub(crate) fn from_chain(
        draws: Vec<Ensemble>,
        chain: usize,
        data: &Dataset,
        spec: &PriorSpec,
        config: &ChainConfig,
        offset: f64,
    ) -> Result<Self> {
        let chains = vec![chain; draws.len()];
        let meta = PosteriorMeta {
            mode: data.mode(),
            offset,
            prior: spec.clone(),
            config: config.clone(),
            scaling: data.scaling().cloned(),
            schema: data.schema().clone(),
            grids: data.grids().to_vec(),
        };
        Self::new(draws, chains, meta)
    }

    /// Concatenate runs that share everything but their draws.
    pub fn merge(runs: Vec<PosteriorDraws>) -> Result<Self> {
        let mut iter = runs.into_iter();
        let mut out = iter
            .next()
            .ok_or_else(|| Error::InvalidParameter("nothing to merge".into()))?;
        for run in iter {
            if run.meta != out.meta {
                return Err(Error::InvalidParameter("cannot merge runs with different settings".into()));
            }
            out.draws.extend(run.draws);
            out.chains.extend(run.chains);
        }
        Ok(out)
    }

    pub fn len(&self) -> usize {
        self.draws.len()
    }

    pub fn is_empty(&self) -> bool {
        self.draws.is_empty()
    }

    pub fn draws(&self) -> &[Ensemble] {
        &self.draws
    }

    pub fn chains(&self) -> &[usize] {
        &self.chains
    }

    pub fn num_chains(&self) -> usize {
        let mut c = self.chains.clone();
        c.sort_unstable();
        c.dedup();
        c.len()
    }

    pub fn meta(&self) -> &PosteriorMeta {
        &self.meta
    }

    pub fn mode(&self) -> Mode {
        self.meta.mode
    }

    pub fn grids(&self) -> &[Vec<f64>] {
        &self.meta.grids
    }

    pub fn schema(&self) -> &Schema {
        &self.meta.schema
    }

    pub fn num_features(&self) -> usize {
        self.meta.grids.len()
    }

    /// Map a forest value to response units: inverse scaling, or `Phi(G + c)`.
    pub fn to_response(&self, value: f64) -> f64 {
        match (self.meta.mode, &self.meta.scaling) {
            (Mode::Probit, _) => normal_cdf(value + self.meta.offset),
            (Mode::Regression, Some(s)) => s.inverse(value),
            (Mode::Regression, None) => value,
        }
    }

    fn check_rows(&self, rows: &[Vec<f64>]) -> Result<()> {
        let p = self.num_features();
        match rows.iter().position(|r| r.len() != p) {
            Some(i) => Err(Error::Schema(format!("row {i} has {} values, model expects {p}", rows[i].len()))),
            None => Ok(()),
        }
    }

    /// Forest values `[row][draw]` on the internal scale (scaled response or latent G).
    pub fn forest_values(&self, rows: &[Vec<f64>]) -> Result<Vec<Vec<f64>>> {
        self.check_rows(rows)?;
        let grids = &self.meta.grids;
        Ok(rows
            .par_iter()
            .map(|x| {
                let bins = bin_row(x, grids);
                self.draws.iter().map(|d| d.evaluate_binned(&bins)).collect()
            })
            .collect())
    }

    /// Per-draw values `[row][draw]` in response units (probabilities in probit mode).
    pub fn response_draws(&self, rows: &[Vec<f64>]) -> Result<Vec<Vec<f64>>> {
        let mut v = self.forest_values(rows)?;
        for row in &mut v {
            for f in row.iter_mut() {
                *f = self.to_response(*f);
            }
        }
        Ok(v)
    }

    /// Posterior mean of f(x) (or of P(Y = 1 | x)) for every row.
    pub fn point_estimate(&self, rows: &[Vec<f64>]) -> Vec<f64> {
        self.response_draws(rows)
            .expect("rows match the model")
            .iter()
            .map(|d| mean(d))
            .collect()
    }

    /// Equal-tailed `1 - alpha` interval for every row.
    pub fn interval(&self, rows: &[Vec<f64>], alpha: f64) -> Result<Vec<(f64, f64)>> {
        Ok(self.summarize(rows, alpha)?.into_iter().map(|s| (s.lower, s.upper)).collect())
    }

    pub fn summarize(&self, rows: &[Vec<f64>], alpha: f64) -> Result<Vec<Summary>> {
        check_alpha(alpha)?;
        if self.len() < 2 {
            warn!("only one posterior draw; intervals are degenerate");
        }
        Ok(self
            .response_draws(rows)?
            .into_iter()
            .map(|d| summarize_values(d, alpha))
            .collect())
    }

    /// Sigma draws in original response units.
    pub fn sigma_draws(&self) -> Vec<f64> {
        let range = self.meta.scaling.as_ref().map_or(1.0, Scaling::range);
        self.draws.iter().map(|d| d.sigma() * range).collect()
    }

    /// Partial dependence of the fit on the predictors `vars`: at every grid
    /// point `x_s`, each draw's fit is averaged over the training rows with
    /// their `vars` entries replaced by `x_s`. Probit curves are `Phi` of the
    /// averaged latent function plus the offset.
    pub fn partial_dependence(
        &self,
        training_rows: &[Vec<f64>],
        vars: &[usize],
        grid: &[Vec<f64>],
        alpha: f64,
    ) -> Result<Vec<PdPoint>> {
        check_alpha(alpha)?;
        self.check_rows(training_rows)?;
        if vars.is_empty() || grid.is_empty() || training_rows.is_empty() {
            return Err(Error::InvalidParameter("partial dependence needs variables, grid points and rows".into()));
        }
        let p = self.num_features();
        if let Some(&v) = vars.iter().find(|&&v| v >= p) {
            return Err(Error::InvalidParameter(format!("variable index {v} out of range (p = {p})")));
        }
        if let Some(g) = grid.iter().find(|g| g.len() != vars.len()) {
            return Err(Error::InvalidParameter(format!(
                "grid point {g:?} has {} values for {} variables",
                g.len(),
                vars.len()
            )));
        }
        let grids = &self.meta.grids;
        let row_bins: Vec<Vec<u32>> = training_rows.iter().map(|x| bin_row(x, grids)).collect();
        let mut in_s = vec![None; p];
        for (k, &v) in vars.iter().enumerate() {
            in_s[v] = Some(k);
        }
        let grid_bins: Vec<Vec<u32>> = grid
            .iter()
            .map(|g| g.iter().zip(vars).map(|(&x, &v)| bin_of(&grids[v], x)).collect())
            .collect();
        let n = training_rows.len() as f64;
        let ctx = PdContext { row_bins: &row_bins, grid_bins: &grid_bins, in_s: &in_s };
        // per_draw[k][g]
        let per_draw: Vec<Vec<f64>> = self
            .draws
            .par_iter()
            .map(|d| {
                let mut acc = vec![0.0; grid.len()];
                let all_rows: Vec<u32> = (0..row_bins.len() as u32).collect();
                let all_grid: Vec<u32> = (0..grid.len() as u32).collect();
                for t in d.trees() {
                    ctx.visit(t, NodeId::ROOT, &all_rows, &all_grid, &mut acc);
                }
                acc.iter().map(|a| self.to_response(a / n)).collect()
            })
            .collect();
        Ok(grid
            .iter()
            .enumerate()
            .map(|(g, x)| {
                let values: Vec<f64> = per_draw.iter().map(|d| d[g]).collect();
                let s = summarize_values(values, alpha);
                PdPoint { x: x.clone(), mean: s.mean, lower: s.lower, upper: s.upper }
            })
            .collect())
    }

    /// Average share of splitting rules using each variable. Draws without any
    /// split are left out; if no draw has a split, all shares are 0.
    pub fn variable_inclusion(&self) -> Vec<f64> {
        let p = self.num_features();
        let mut total = vec![0.0; p];
        let mut used = 0usize;
        for d in &self.draws {
            let mut counts = vec![0usize; p];
            for t in d.trees() {
                for v in t.split_variables() {
                    counts[v] += 1;
                }
            }
            let splits: usize = counts.iter().sum();
            if splits == 0 {
                continue;
            }
            used += 1;
            for (t, c) in total.iter_mut().zip(&counts) {
                *t += *c as f64 / splits as f64;
            }
        }
        if used == 0 {
            warn!("no retained draw contains a split; variable inclusion is zero everywhere");
            return total;
        }
        total.iter().map(|t| t / used as f64).collect()
    }
}

struct PdContext<'a> {
    row_bins: &'a [Vec<u32>],
    grid_bins: &'a [Vec<u32>],
    in_s: &'a [Option<usize>],
}

impl PdContext<'_> {
    fn visit(&self, tree: &DecisionTree, id: NodeId, rows: &[u32], grid: &[u32], acc: &mut [f64]) {
        if rows.is_empty() || grid.is_empty() {
            return;
        }
        match tree.node(id) {
            Node::Leaf { mu } => {
                let w = mu * rows.len() as f64;
                for &g in grid {
                    acc[g as usize] += w;
                }
            }
            Node::Interior { rule, left, right } => match self.in_s[rule.variable] {
                Some(k) => {
                    let (l, r): (Vec<u32>, Vec<u32>) = grid
                        .iter()
                        .partition(|&&g| self.grid_bins[g as usize][k] as usize <= rule.cutpoint);
                    self.visit(tree, *left, rows, &l, acc);
                    self.visit(tree, *right, rows, &r, acc);
                }
                None => {
                    let (l, r): (Vec<u32>, Vec<u32>) = rows
                        .iter()
                        .partition(|&&i| self.row_bins[i as usize][rule.variable] as usize <= rule.cutpoint);
                    self.visit(tree, *left, &l, grid, acc);
                    self.visit(tree, *right, &r, grid, acc);
                }
            },
        }
    }
}

/// `points` equally spaced values from the minimum to the maximum of column `var`.
pub fn default_grid(rows: &[Vec<f64>], var: usize, points: usize) -> Vec<f64> {
    let (lo, hi) = rows
        .iter()
        .map(|r| r[var])
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), x| (lo.min(x), hi.max(x)));
    if points <= 1 || lo == hi {
        return vec![lo];
    }
    (0..points)
        .map(|i| lo + (hi - lo) * i as f64 / (points - 1) as f64)
        .collect()
}

fn check_alpha(alpha: f64) -> Result<()> {
    if alpha > 0.0 && alpha < 1.0 {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!("interval level alpha must lie in (0, 1), got {alpha}")))
    }
}

pub fn mean(values: &[f64]) -> f64 {
    values.iter().sum::<f64>() / values.len() as f64
}

/// Quantile with linear interpolation between order statistics of `sorted`.
pub fn quantile_sorted(sorted: &[f64], prob: f64) -> f64 {
    let h = (sorted.len() - 1) as f64 * prob;
    let lo = h.floor() as usize;
    let hi = (lo + 1).min(sorted.len() - 1);
    sorted[lo] + (h - lo as f64) * (sorted[hi] - sorted[lo])
}

pub fn quantile(values: &[f64], prob: f64) -> f64 {
    let mut sorted = values.to_vec();
    sorted.sort_by(f64::total_cmp);
    quantile_sorted(&sorted, prob)
}

pub fn summarize_values(mut values: Vec<f64>, alpha: f64) -> Summary {
    let m = mean(&values);
    values.sort_by(f64::total_cmp);
    Summary {
        mean: m,
        median: quantile_sorted(&values, 0.5),
        lower: quantile_sorted(&values, alpha / 2.0),
        upper: quantile_sorted(&values, 1.0 - alpha / 2.0),
    }
}
