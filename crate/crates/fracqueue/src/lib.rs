//! fracqueue: a simulation laboratory for the stationary storage process fed
//! by fractional Brownian motion.
//!
//! The crate provides
//! - exact fBm / fGn sampling (circulant embedding with a Cholesky oracle),
//! - simulation of the stationary storage process Q on a window, with
//!   common-random-number estimation of the inf/value/sup tail triple,
//! - Monte Carlo estimation of Pickands-type constants
//!   E exp(Phi(sqrt2 eta - sigma^2_eta)) for a registry of functionals,
//! - closed-form asymptotic evaluators and the exact Brownian-case laws,
//! - orchestrated experiments persisting provenance-rich records.
//!
//! Start with the runnable examples (`cargo run --example ...`) or the
//! `fracqueue` CLI; `cargo test --test acceptance` runs the full
//! verification suite.

pub mod analytics;
pub mod cli;
pub mod error;
pub mod experiments;
pub mod gaussgen;
pub mod pickands;
pub mod rng;
pub mod special;
pub mod stats;
pub mod storage;

pub use error::{Error, Result};
