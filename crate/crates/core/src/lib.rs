//! Bayesian additive regression trees.
//!
//! A response is modelled as a sum of `m` small regression trees plus Gaussian
//! noise, `y = g(x; T_1, M_1) + ... + g(x; T_m, M_m) + e`, with a prior that
//! keeps each tree a weak learner. Posterior draws come from a backfitting
//! Metropolis-within-Gibbs sampler. Binary responses are handled through a
//! probit link with latent Gaussian utilities.
//!
//! ```no_run
//! use bart::{data, mcmc, priors, Mode};
//! use rand::SeedableRng;
//!
//! let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(1);
//! let sample = data::generate_friedman(&mut rng, 100, 10, 1.0).unwrap();
//! let spec = priors::PriorSpec::calibrate(&sample.data, &priors::PriorSettings::default()).unwrap();
//! let draws = mcmc::run_chain(&sample.data, &spec, &mcmc::ChainConfig::default()).unwrap();
//! let fitted = draws.point_estimate(&sample.data.rows());
//! assert_eq!(fitted.len(), 100);
//! # let _ = Mode::Regression;
//! ```

pub mod bench;
pub mod cli;
pub mod data;
pub mod error;
pub mod mcmc;
pub mod model;
pub mod posterior;
pub mod priors;
pub mod probit;
pub mod tree;

use serde::{Deserialize, Serialize};

pub use data::{Dataset, Schema, Scaling};
pub use error::{Error, Result};
pub use mcmc::{ChainConfig, MoveProbabilities};
pub use posterior::PosteriorDraws;
pub use priors::{PriorSettings, PriorSpec, SigmaHatMode};
pub use tree::{DecisionTree, Ensemble, NodeId, SplitRule};

/// Continuous response with Gaussian noise, or binary response with a probit link.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    #[default]
    Regression,
    Probit,
}

impl Mode {
    pub fn as_str(self) -> &'static str {
        match self {
            Mode::Regression => "regression",
            Mode::Probit => "probit",
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "regression" => Ok(Mode::Regression),
            "probit" => Ok(Mode::Probit),
            other => Err(Error::InvalidParameter(format!("unknown mode {other:?}"))),
        }
    }
}
