//! Exact algebra and seeded simulation of extended (two-stage) Bernoulli trials.
//!
//! A first stage picks outcome `x_k` with probability `p_k`; a second stage then
//! succeeds with probability `s_k`. Marginally this looks like a Bernoulli(p)
//! trial with `p = Σ p_k s_k`, yet a prediction rule driven by an independent
//! continuous "pointer" can be right more often than `p`.
//!
//! * [`trial`] holds the closed-form prediction-success probability (PSP), the
//!   edge criterion, optimal strategies and the theorem predicates.
//! * [`pointer`] provides full-support pointer distributions and half-line regions.
//! * [`scenarios`] describes the envelope, railroad, Willoughby and coin-bag setups.
//! * [`montecarlo`] is the partitioned, reproducible simulation engine together with
//!   the brute-force oracle, binomial tests, Wilson intervals and KS distance.
//!
//! The crate is `no_std` and only needs `alloc`. Threading and IO live in the
//! `ebt` companion crate.
#![no_std]

extern crate alloc;

pub mod error;
pub mod fuzz;
pub mod montecarlo;
pub mod pointer;
pub mod scenarios;
pub mod stream;
pub mod trial;

pub use error::{Error, Result};
pub use montecarlo::{SimResult, Tally, TestVerdict, TrialOutcome, TrialRunner};
pub use pointer::{Direction, HalfLineRegion, PointerDistribution};
pub use stream::RandomStream;
pub use trial::{AnalysisReport, Strategy, TrialSpec};

/// Tolerance used for normalization and for the non-strict side of theorem checks.
pub const TOLERANCE: f64 = 1e-12;
