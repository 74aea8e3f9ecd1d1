//! Bayesian inversion over box priors with deliberately multimodal posteriors.
//!
//! The library couples three pieces:
//!
//! * analytic forward models for three inverse problems (a Stekloff
//!   eigenvalue problem on the unit disk, a wave-speed problem on a square
//!   membrane, and a Helmholtz point-source location problem),
//! * an independence Metropolis-Hastings sampler proposing from the box
//!   prior, and
//! * histogram-based estimators that report *local* modes: the usual MAP and
//!   conditional mean, plus per-mode local MAPs (LMAP) and local conditional
//!   means (LCM) over a partition of the parameter box.
//!
//! Everything is deterministic given the seeds: the same configuration
//! produces byte-identical chain and report files.
//!
//! ```
//! use bayes_modes::sampler::{mh_run, BoxPrior, LikelihoodSpec, ResidualExponent};
//! use bayes_modes::models::{Observation, ForwardModel, ModelError};
//!
//! // A trivial scalar model: F(x) = x, observed y = 0.5 with sigma = 0.1.
//! struct Identity;
//! impl ForwardModel for Identity {
//!     fn parameter_dim(&self) -> usize { 1 }
//!     fn observable_len(&self) -> usize { 1 }
//!     fn evaluate(&self, x: &[f64]) -> Result<Vec<f64>, ModelError> {
//!         Ok(vec![x[0]])
//!     }
//!     fn name(&self) -> &'static str { "identity" }
//! }
//!
//! let prior = BoxPrior::new(vec![0.0], vec![1.0]);
//! let like = LikelihoodSpec::new(0.1, ResidualExponent::Squared);
//! let data = Observation::new(vec![0.5], 0.1).unwrap();
//! let chain = mh_run(&Identity, &prior, &like, &data, 2000, 200, 7, None);
//! assert_eq!(chain.len(), 2000);
//! assert!(chain.post_burn_in().all(|s| (0.0..1.0).contains(&s[0])));
//! ```

pub mod config;
pub mod estimators;
pub mod experiment;
pub mod models;
pub mod sampler;
pub mod specfun;
