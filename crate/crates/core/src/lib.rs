//! Analytics for completed hyperparameter grid searches plus the signal
//! preprocessing used to manufacture dataset variants for them.
//!
//! The crate has two halves. The first half works on *results tables*: a
//! finite hyperparameter space, the enumeration of every configuration in
//! it, and an accuracy score per (configuration, dataset) pair. On top of
//! that sit descriptive statistics ([`stats`]), pairwise influence between
//! hyperparameters ([`influence`]), and the greedy search for a short
//! sequence of default configurations that covers many datasets at once
//! ([`defaults`]). The [`synth`] module generates seeded tables with known
//! structure so the algorithms can be checked against brute-force oracles.
//!
//! The second half ([`signal`]) manufactures dataset variants from raw
//! vibration recordings: fixed-length windowing, integer-factor resampling
//! with anti-aliasing, zero-phase low-pass filtering, and seed-deterministic
//! stratified train/test splitting.
//!
//! All analysis functions are pure and deterministic: summation orders are
//! fixed, ties break toward the lowest index, and parallel scans merge with
//! order-independent reductions, so results do not depend on thread count.

pub mod defaults;
pub mod error;
pub mod influence;
pub mod results;
pub mod rng;
pub mod signal;
pub mod space;
pub mod stats;
pub mod synth;

pub use error::{Error, Result};
pub use results::{BenchmarkSet, CompletenessReport, ResultsTable};
pub use space::{Config, Hyperparam, HyperparamSpace};
