//! Gate construction, Haar sampling, Monte Carlo channel estimation and the
//! brute-force state-vector oracle.

pub mod channel;
pub mod haar;
pub mod oracle;

pub use channel::{
    estimate_channel, estimate_one_replica_rules, ChannelEstimate, ChannelTensor, Estimate,
    RuleEstimate,
};
pub use haar::{build_scar_gate, build_scar_unitary, sample_haar_unitary, UnitaryMatrix, C64};
pub use oracle::{evolve_exact_oracle, InitialState, Observable, OracleConfig, OracleResult};
