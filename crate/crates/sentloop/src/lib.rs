//! Tools for studying the feedback loop between expressed sentiment and
//! engagement on political social media.
//!
//! The crate is organised as a pipeline plus a dynamical-systems layer:
//!
//! * [`ingest`] — parse tweet corpora from CSV and select persistently
//!   active authors.
//! * [`series`] — aggregate records into daily (or weekly) sentiment and
//!   engagement series.
//! * [`regression`] — fit the linear feedback model
//!   `S_{t+1} = alpha*S_t + beta*r_pos_t + gamma*r_neg_t` and report
//!   diagnostics (RMSE vs. a persistence baseline, Pearson correlations,
//!   variance inflation factors).
//! * [`cohort`] — fit the same model per author and compare populations
//!   through z-scores of the engagement asymmetry `delta = beta - gamma`.
//! * [`dynamics`] — close the loop with an engagement response
//!   `r_pos <- a*(1+S)/2`, `r_neg <- b*(1-S)/2` and analyse the resulting
//!   second-order map: stability classes, equilibria, saturation, cycles.
//! * [`synth`] — generate synthetic corpora with known ground truth, used
//!   throughout the test suite and the examples.
//!
//! The `examples/` directory is the best starting point; each example is a
//! runnable end-to-end walkthrough of one capability (`cargo run --example
//! fit_synthetic`, `--example stability_map`, ...). A thin `sentloop`
//! binary exposes the same flows as subcommands for scripted use.

pub mod cli;
pub mod cohort;
pub mod dynamics;
pub mod error;
pub mod ingest;
pub mod regression;
pub mod report;
pub mod series;
pub mod svg;
pub mod synth;
pub mod util;

pub use error::Error;

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, Error>;
