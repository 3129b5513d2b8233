//! Specification tests for nonparametric cointegrating regression `y_k = f(x_k) + u_k`
//! where the regressor `x_k` is a partial sum of long-memory (LM) or semi-long-memory
//! (SLM, exponentially tempered) input shocks, possibly correlated with the equation
//! errors (endogeneity).
//!
//! The toolkit provides:
//!
//! - [`processes`]: LM/SLM shock generation, endogenous AR(1)/MA(1) error processes,
//!   partial-sum regressor paths, and the normalization scalings `d_N`.
//! - [`kernel`]: Gaussian kernel primitives, Nadaraya-Watson regression, and
//!   leave-one-out cross-validated bandwidth selection.
//! - [`models`]: hypothesized regression families (linear, quadratic, integrable
//!   exponential), least-squares fitting, and residual construction.
//! - [`stat_tests`]: the self-normalized U (SNU), kernel-weighted L2 (MHM), and
//!   portmanteau (P) test statistics.
//! - [`subsampling`]: regressor-reset blocks, subsample reference distributions,
//!   p-values, the de-biased MHM procedure, and minimal-volatility block selection.
//! - [`montecarlo`]: size/power experiments over a catalog of generating models.
//! - [`io`]: CSV datasets, run manifests, and experiment configuration files.

pub mod cli;
pub mod error;
pub mod io;
pub mod kernel;
pub mod models;
pub mod montecarlo;
pub mod processes;
pub mod special;
pub mod stat_tests;
pub mod subsampling;

pub use error::{Error, Result};
