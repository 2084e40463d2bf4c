//! Folded (replica) representation of the averaged two-site gate and its
//! Monte Carlo estimation.
//!
//! An operator `X` on `r` replicas of a site pair is flattened with index
//! `(i_1, j_1, ..., i_r, j_r)`, where `i_s` / `j_s` are the ket / bra indices
//! of replica `s` on the pair (`site_a * q + site_b`). The folded gate sends
//! `X_{k l}` to `u_{i k} conj(u_{j l})` in every replica.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::replica_core::haar::{build_scar_gate, C64};
use crate::rng::StreamSeed;
use crate::stats::Accumulator;

/// Default cap on the number of entries of a dense folded gate.
pub const DEFAULT_CHANNEL_GUARD: usize = 1 << 24;

const CHUNK: u64 = 256;

/// Real matrix of an averaged folded two-site gate.
#[derive(Clone, Debug, PartialEq)]
pub struct ChannelTensor {
    replica_count: usize,
    q: usize,
    entries: Vec<f64>,
}

impl ChannelTensor {
    pub fn new(q: usize, replica_count: usize, entries: Vec<f64>) -> Result<Self> {
        let dim = folded_pair_dim(q, replica_count)?;
        if entries.len() != dim * dim {
            return Err(Error::InvalidDimension(format!(
                "expected {} entries for a folded pair gate, got {}",
                dim * dim,
                entries.len()
            )));
        }
        Ok(ChannelTensor { replica_count, q, entries })
    }

    pub fn q(&self) -> usize {
        self.q
    }

    pub fn replica_count(&self) -> usize {
        self.replica_count
    }

    /// Folded two-site dimension `q^(4 r)`.
    pub fn dim(&self) -> usize {
        (self.entries.len() as f64).sqrt().round() as usize
    }

    #[inline]
    pub fn get(&self, row: usize, col: usize) -> f64 {
        self.entries[row * self.dim() + col]
    }

    pub fn entries(&self) -> &[f64] {
        &self.entries
    }

    pub fn apply(&self, input: &[f64]) -> Vec<f64> {
        let dim = self.dim();
        assert_eq!(input.len(), dim);
        self.entries.chunks(dim).map(|row| crate::two_replica::gram::dot(row, input)).collect()
    }

    /// Max-entry deviation of `Phi^2` from `Phi`.
    pub fn idempotency_defect(&self) -> f64 {
        let dim = self.dim();
        let mut worst = 0.0f64;
        for i in 0..dim {
            let row = &self.entries[i * dim..(i + 1) * dim];
            let mut acc = vec![0.0; dim];
            for (k, &x) in row.iter().enumerate() {
                if x == 0.0 {
                    continue;
                }
                let other = &self.entries[k * dim..(k + 1) * dim];
                acc.iter_mut().zip(other).for_each(|(a, &y)| *a += x * y);
            }
            for (a, &y) in acc.iter().zip(row) {
                worst = worst.max((a - y).abs());
            }
        }
        worst
    }
}

/// Monte Carlo estimate of the averaged folded gate.
#[derive(Clone, Debug)]
pub struct ChannelEstimate {
    pub mean: ChannelTensor,
    pub std_error: Vec<f64>,
    pub samples: u64,
}

impl ChannelEstimate {
    /// Largest `|estimate - reference| / stderr` over all entries; entries
    /// that agree to `1e-12` are skipped (deterministic entries).
    pub fn max_z(&self, reference: &ChannelTensor) -> f64 {
        self.mean
            .entries
            .iter()
            .zip(&reference.entries)
            .zip(&self.std_error)
            .map(|((m, r), se)| crate::stats::z_score(*r, *m, *se).abs())
            .fold(0.0, f64::max)
    }
}

fn folded_pair_dim(q: usize, replica_count: usize) -> Result<usize> {
    if q < 2 {
        return Err(Error::InvalidDimension(format!("local dimension must be >= 2, got {q}")));
    }
    if replica_count != 1 && replica_count != 2 {
        return Err(Error::InvalidArgument(format!(
            "replica count must be 1 or 2, got {replica_count}"
        )));
    }
    Ok(q.pow(4 * replica_count as u32))
}

/// Folded two-site vector of the product `X_a (x) X_b`, each given as a
/// single-site tensor in [`crate::two_replica::gram::site_tensor`] layout.
pub fn two_site_folded(q: usize, replicas: usize, site_a: &[f64], site_b: &[f64]) -> Vec<f64> {
    let pair = q * q;
    match replicas {
        1 => {
            let mut out = vec![0.0; pair * pair];
            for (ia, &xa) in site_a.iter().enumerate() {
                let (ka, ba) = (ia / q, ia % q);
                for (ib, &xb) in site_b.iter().enumerate() {
                    let (kb, bb) = (ib / q, ib % q);
                    out[(ka * q + kb) * pair + ba * q + bb] = xa * xb;
                }
            }
            out
        }
        2 => {
            let mut out = vec![0.0; pair.pow(4)];
            let split = |i: usize| (i / (q * q * q), (i / (q * q)) % q, (i / q) % q, i % q);
            for (ia, &xa) in site_a.iter().enumerate() {
                if xa == 0.0 {
                    continue;
                }
                let (k1a, b1a, k2a, b2a) = split(ia);
                for (ib, &xb) in site_b.iter().enumerate() {
                    if xb == 0.0 {
                        continue;
                    }
                    let (k1b, b1b, k2b, b2b) = split(ib);
                    let idx = ((((k1a * q + k1b) * pair + b1a * q + b1b) * pair
                        + k2a * q
                        + k2b)
                        * pair)
                        + b2a * q
                        + b2b;
                    out[idx] = xa * xb;
                }
            }
            out
        }
        _ => panic!("unsupported replica count {replicas}"),
    }
}

/// Single-sample folded gate `u (x) conj(u)` for one replica.
fn folded_one(u: &[C64], pair: usize) -> Vec<C64> {
    let dim = pair * pair;
    let mut out = vec![C64::new(0.0, 0.0); dim * dim];
    for i in 0..pair {
        for j in 0..pair {
            let row = (i * pair + j) * dim;
            for k in 0..pair {
                let uik = u[i * pair + k];
                for l in 0..pair {
                    out[row + k * pair + l] = uik * u[j * pair + l].conj();
                }
            }
        }
    }
    out
}

/// Entrywise Monte Carlo average of the folded scar gate.
pub fn estimate_channel(
    q: usize,
    replica_count: usize,
    samples: u64,
    seed: StreamSeed,
) -> Result<ChannelEstimate> {
    estimate_channel_guarded(q, replica_count, samples, seed, DEFAULT_CHANNEL_GUARD)
}

pub fn estimate_channel_guarded(
    q: usize,
    replica_count: usize,
    samples: u64,
    seed: StreamSeed,
    guard: usize,
) -> Result<ChannelEstimate> {
    let dim = folded_pair_dim(q, replica_count)?;
    if samples == 0 {
        return Err(Error::InvalidArgument("samples must be >= 1".into()));
    }
    let entries = (dim as u128) * (dim as u128);
    if entries > guard as u128 {
        return Err(Error::size(
            format!("folded {replica_count}-replica gate at q = {q} (dimension {dim})"),
            entries,
            guard as u128,
        ));
    }
    let pair = q * q;
    let one_dim = pair * pair;
    let n_entries = dim * dim;
    let chunks: Vec<(u64, u64)> =
        (0..samples).step_by(CHUNK as usize).map(|s| (s, (s + CHUNK).min(samples))).collect();
    let partials: Vec<Result<Vec<Accumulator>>> = chunks
        .par_iter()
        .map(|&(start, end)| {
            let mut acc = vec![Accumulator::new(); n_entries];
            let mut values = vec![0.0; n_entries];
            for s in start..end {
                let mut rng = seed.stream(s, 0);
                let u = build_scar_gate(q, &mut rng)?.to_row_major();
                let a = folded_one(&u, pair);
                if replica_count == 1 {
                    values.iter_mut().zip(&a).for_each(|(v, x)| *v = x.re);
                } else {
                    // (A (x) A)[(I1, I2), (K1, K2)] = A[I1, K1] A[I2, K2]
                    for i1 in 0..one_dim {
                        for i2 in 0..one_dim {
                            let row = (i1 * one_dim + i2) * dim;
                            for k1 in 0..one_dim {
                                let x = a[i1 * one_dim + k1];
                                let base = row + k1 * one_dim;
                                let arow = &a[i2 * one_dim..(i2 + 1) * one_dim];
                                for (k2, y) in arow.iter().enumerate() {
                                    values[base + k2] = (x * y).re;
                                }
                            }
                        }
                    }
                }
                acc.iter_mut().zip(&values).for_each(|(a, &v)| a.push(v));
            }
            Ok(acc)
        })
        .collect();
    let mut total = vec![Accumulator::new(); n_entries];
    for part in partials {
        let part = part?;
        total.iter_mut().zip(&part).for_each(|(t, p)| t.merge(p));
    }
    let mean = ChannelTensor::new(q, replica_count, total.iter().map(|a| a.mean()).collect())?;
    let std_error = total.iter().map(|a| a.std_error()).collect();
    Ok(ChannelEstimate { mean, std_error, samples })
}

/// Mean with its Monte Carlo standard error.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Estimate {
    pub mean: f64,
    pub std_error: f64,
}

impl From<&Accumulator> for Estimate {
    fn from(a: &Accumulator) -> Self {
        Estimate { mean: a.mean(), std_error: a.std_error() }
    }
}

/// Estimated weights of the image of the mixed pair `|bullet circ>>` under
/// the 1-replica gate: `to_scar` multiplies `|circ circ>>`, `to_infinite`
/// multiplies `|bullet bullet>>`.
#[derive(Clone, Copy, Debug)]
pub struct RuleEstimate {
    pub to_scar: Estimate,
    pub to_infinite: Estimate,
    pub samples: u64,
}

/// Monte Carlo estimate of the state-picture update rule for a mixed pair.
///
/// Each sample evolves `X = (1/q) 1 (x) |0><0|` with one gate and reads the
/// weights off the folded entries `Y[00,00]` and `Y[01,01]`:
/// `to_infinite = q^2 Y[01,01]`, `to_scar = Y[00,00] - Y[01,01]`.
pub fn estimate_one_replica_rules(q: usize, samples: u64, seed: StreamSeed) -> Result<RuleEstimate> {
    if q < 2 {
        return Err(Error::InvalidDimension(format!("local dimension must be >= 2, got {q}")));
    }
    if samples == 0 {
        return Err(Error::InvalidArgument("samples must be >= 1".into()));
    }
    let pair = q * q;
    let qf = q as f64;
    // X is diagonal with entries 1/q on pair indices (a, 0).
    let support: Vec<usize> = (0..q).map(|a| a * q).collect();
    let mut scar = Accumulator::new();
    let mut inf = Accumulator::new();
    for s in 0..samples {
        let u = build_scar_gate(q, &mut seed.stream(s, 0))?.to_row_major();
        let diag = |i: usize| -> f64 { support.iter().map(|&k| u[i * pair + k].norm_sqr()).sum::<f64>() / qf };
        let y00 = diag(0);
        let y11 = diag(1);
        inf.push(qf * qf * y11);
        scar.push(y00 - y11);
    }
    Ok(RuleEstimate { to_scar: (&scar).into(), to_infinite: (&inf).into(), samples })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::two_replica::gram::GramData;

    #[test]
    fn mixed_pair_rule_matches_hop_weights() {
        let est = estimate_one_replica_rules(2, 10_000, StreamSeed(21)).unwrap();
        let z_inf = (est.to_infinite.mean - 2.0 / 3.0) / est.to_infinite.std_error;
        let z_scar = (est.to_scar.mean - 1.0 / 3.0) / est.to_scar.std_error;
        assert!(z_inf.abs() < 5.0 && z_scar.abs() < 5.0, "{est:?}");
        assert!(est.to_infinite.std_error > 0.0);
    }

    #[test]
    fn scar_pair_maps_to_itself_in_every_sample() {
        // Folded |oo>> sits at index 0 and row/column 0 of every folded gate is e_0.
        let est = estimate_channel(2, 1, 500, StreamSeed(3)).unwrap();
        let dim = est.mean.dim();
        assert_eq!(est.mean.get(0, 0), 1.0);
        assert_eq!(est.std_error[0], 0.0);
        for k in 1..dim {
            assert_eq!(est.mean.get(k, 0), 0.0);
        }
    }

    #[test]
    fn two_replica_estimate_matches_gate_matrix() {
        let est = estimate_channel(2, 2, 4_000, StreamSeed(8)).unwrap();
        let g = GramData::new(2).unwrap();
        let analytic = ChannelTensor::new(2, 2, g.folded_gate_matrix()).unwrap();
        let z = est.max_z(&analytic);
        assert!(z < 6.0, "max z {z}");
    }

    #[test]
    fn standard_error_scales_with_sample_count() {
        let row = 4 + 1;
        let a = estimate_channel(2, 1, 2_000, StreamSeed(5)).unwrap();
        let b = estimate_channel(2, 1, 8_000, StreamSeed(6)).unwrap();
        // entry (01,01) <- (01,01)
        let idx = row * 16 + row;
        let ratio = a.std_error[idx] / b.std_error[idx];
        assert!((ratio - 2.0).abs() < 0.3, "ratio {ratio}");
    }

    #[test]
    fn size_guard_names_dimension() {
        let err = estimate_channel(3, 2, 1, StreamSeed(0)).unwrap_err();
        assert!(err.is_size());
        assert!(err.to_string().contains("6561"), "{err}");
        assert!(estimate_channel(2, 3, 1, StreamSeed(0)).is_err());
        assert!(estimate_channel(2, 1, 0, StreamSeed(0)).is_err());
    }
}
