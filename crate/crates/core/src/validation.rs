//! Replica predictions against brute-force realization averages on small chains.

use crate::error::Result;
use crate::one_replica::walker::{finite_chain_order_parameter, PerturbationParams};
use crate::replica_core::channel::estimate_one_replica_rules;
use crate::replica_core::oracle::{evolve_exact_oracle, InitialState, Observable, OracleConfig};
use crate::rng::StreamSeed;
use crate::stats::z_score;
use crate::two_replica::chain::{open_chain_otoc, purity_series};
use crate::two_replica::gram::GramData;

/// Largest `|z|` accepted by [`suite_passes`].
pub const Z_THRESHOLD: f64 = 5.0;

#[derive(Clone, Debug, PartialEq)]
pub struct OracleSuiteConfig {
    pub q: usize,
    pub l: usize,
    pub t_max: usize,
    pub lambdas: Vec<f64>,
    pub samples: u64,
    pub channel_samples: u64,
    pub seed: StreamSeed,
}

impl Default for OracleSuiteConfig {
    fn default() -> Self {
        OracleSuiteConfig {
            q: 2,
            l: 8,
            t_max: 6,
            lambdas: vec![0.0, 0.5],
            samples: 2000,
            channel_samples: 10_000,
            seed: StreamSeed(1),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ComparisonRow {
    pub quantity: String,
    /// `None` for quantities that do not depend on the initial state.
    pub lambda: Option<f64>,
    pub t: Option<usize>,
    pub replica_value: f64,
    pub oracle_mean: f64,
    pub oracle_stderr: f64,
    pub z_score: f64,
}

fn compare(
    rows: &mut Vec<ComparisonRow>,
    cfg: &OracleSuiteConfig,
    lambda: Option<f64>,
    observable: Observable,
    predicted: &[f64],
    stream: u64,
) -> Result<()> {
    let oracle = evolve_exact_oracle(&OracleConfig {
        l: cfg.l,
        q: cfg.q,
        layers: cfg.t_max,
        initial: InitialState::Product { lambda: lambda.unwrap_or(0.0) },
        observable: observable.clone(),
        samples: cfg.samples,
        seed: cfg.seed.child(stream),
    })?;
    for (point, &value) in oracle.time_series.iter().zip(predicted) {
        rows.push(ComparisonRow {
            quantity: observable.name(),
            lambda,
            t: Some(point.layer),
            replica_value: value,
            oracle_mean: point.mean,
            oracle_stderr: point.std_error,
            z_score: z_score(value, point.mean, point.std_error),
        });
    }
    Ok(())
}

/// Order parameter at the central site, half-chain purity and two OTOCs
/// for every `t <= t_max`, plus the sampled 1-replica update weights.
pub fn run_oracle_suite(cfg: &OracleSuiteConfig) -> Result<Vec<ComparisonRow>> {
    let gram = GramData::new(cfg.q)?;
    let centre = cfg.l / 2 - 1;
    let mut rows = Vec::new();
    for (i, &lambda) in cfg.lambdas.iter().enumerate() {
        let params = PerturbationParams::new(cfg.q, lambda)?;
        let order = finite_chain_order_parameter(&params, cfg.l, centre, cfg.t_max)?;
        let stream = 4 * i as u64;
        compare(&mut rows, cfg, Some(lambda), Observable::OrderParameter { site: centre }, &order, stream)?;
        let purity = purity_series(cfg.l, &gram, lambda, 0, cfg.l / 2, cfg.t_max)?;
        let region = Observable::Purity { start: 0, end: cfg.l / 2 };
        compare(&mut rows, cfg, Some(lambda), region, &purity, stream + 1)?;
    }
    let base = 4 * cfg.lambdas.len() as u64;
    for (k, (x, y)) in [(centre, centre), (centre, centre + 1)].into_iter().enumerate() {
        let otoc = open_chain_otoc(&gram, cfg.l, x, y, cfg.t_max)?;
        compare(&mut rows, cfg, None, Observable::Otoc { x, y }, &otoc, base + k as u64)?;
    }

    let rules = estimate_one_replica_rules(cfg.q, cfg.channel_samples, cfg.seed.child(base + 2))?;
    let qf = cfg.q as f64;
    for (name, est, exact) in [
        ("rule_weight[to_scar]", rules.to_scar, 1.0 / (qf + 1.0)),
        ("rule_weight[to_infinite]", rules.to_infinite, qf / (qf + 1.0)),
    ] {
        rows.push(ComparisonRow {
            quantity: name.into(),
            lambda: None,
            t: None,
            replica_value: exact,
            oracle_mean: est.mean,
            oracle_stderr: est.std_error,
            z_score: z_score(exact, est.mean, est.std_error),
        });
    }
    Ok(rows)
}

pub fn suite_passes(rows: &[ComparisonRow]) -> bool {
    rows.iter().all(|r| r.z_score.abs() <= Z_THRESHOLD)
}
