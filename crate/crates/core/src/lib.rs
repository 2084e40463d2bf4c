//! Exact and Monte Carlo dynamics of a random brickwork circuit whose
//! two-site gates fix `|00>` and act as Haar unitaries elsewhere.
//!
//! - [`replica_core`]: gates, Haar sampling, channel estimation, brute-force oracle
//! - [`one_replica`]: interface walks, walker-pair transfer chain, order parameter
//! - [`two_replica`]: 7-symbol replica basis, Renyi-2 entropy, OTOC, closed forms
//! - [`validation`]: replica predictions against the brute-force oracle

pub mod error;
pub mod one_replica;
pub mod replica_core;
pub mod rng;
pub mod stats;
pub mod two_replica;
pub mod validation;

pub use error::{Error, Result};
pub use rng::StreamSeed;
