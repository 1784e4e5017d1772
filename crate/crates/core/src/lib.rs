//! Bernoulli multi-armed bandits: Thompson Sampling and index policies, a
//! deterministic trial-parallel regret simulator, and numeric checks of the
//! constants and inequalities behind Thompson Sampling's finite-time regret
//! bound.

pub mod analysis;
pub mod checks;
pub mod cli;
pub mod distributions;
pub mod error;
pub mod policies;
pub mod rng;
pub mod simulator;

pub use error::{Error, Result};
