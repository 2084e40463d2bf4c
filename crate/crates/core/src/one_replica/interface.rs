//! Single-interface motion between a scar domain and an infinite-temperature
//! domain, and the Gaussian front it produces.

use rand::Rng;
use rayon::prelude::*;
use statrs::function::erf::erfc;

use crate::error::{Error, Result};
use crate::replica_core::channel::ChannelTensor;
use crate::rng::StreamSeed;
use crate::stats::{linear_fit, Accumulator};
use crate::two_replica::gram::GramData;

fn check_q(q: usize) -> Result<()> {
    if q < 2 {
        return Err(Error::InvalidDimension(format!("local dimension must be >= 2, got {q}")));
    }
    Ok(())
}

/// Drift and diffusion constant of the interface, in sites per layer.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct VelocityDiffusion {
    pub v: f64,
    pub d: f64,
}

/// `v = (q - 1)/(q + 1)`, `D = 4q/(q + 1)^2`.
pub fn velocity_diffusion(q: usize) -> Result<VelocityDiffusion> {
    check_q(q)?;
    let qf = q as f64;
    Ok(VelocityDiffusion { v: (qf - 1.0) / (qf + 1.0), d: 4.0 * qf / (qf + 1.0).powi(2) })
}

/// Per-layer cumulant generating function `log E[e^{k dx}]` of one hop.
pub fn hop_cumulant_generating_function(q: usize, k: f64) -> f64 {
    let qf = q as f64;
    ((qf * k.exp() + (-k).exp()) / (qf + 1.0)).ln()
}

/// Exact averaged two-site gate on one replica, `|0><0|` and `1` in the folded basis.
pub fn analytic_channel(q: usize) -> Result<ChannelTensor> {
    let entries = GramData::one_replica(q)?.folded_gate_matrix();
    ChannelTensor::new(q, 1, entries)
}

/// Interface position after each layer, starting from 0.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct InterfaceTrajectory {
    pub q: usize,
    pub seed: u64,
    pub index: u64,
    pub positions: Vec<i64>,
}

fn walk<R: Rng>(q: usize, t_max: usize, rng: &mut R, mut visit: impl FnMut(usize, i64)) {
    let p_right = q as f64 / (q as f64 + 1.0);
    let mut x = 0i64;
    visit(0, x);
    for t in 1..=t_max {
        x += if rng.gen_bool(p_right) { 1 } else { -1 };
        visit(t, x);
    }
}

/// Explicit trajectories `first .. first + count`; walk `i` uses stream `i` of `seed`.
pub fn simulate_trajectories(
    q: usize,
    t_max: usize,
    first: u64,
    count: u64,
    seed: StreamSeed,
) -> Result<Vec<InterfaceTrajectory>> {
    check_q(q)?;
    Ok((first..first + count)
        .map(|index| {
            let mut positions = Vec::with_capacity(t_max + 1);
            walk(q, t_max, &mut seed.stream(index, 0), |_, x| positions.push(x));
            InterfaceTrajectory { q, seed: seed.0, index, positions }
        })
        .collect())
}

/// Growth-rate estimate with its standard error from independent batches.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SlopeEstimate {
    pub value: f64,
    pub std_error: f64,
}

/// Ensemble statistics of `samples` independent walks.
#[derive(Clone, Debug)]
pub struct InterfaceEnsemble {
    pub q: usize,
    pub samples: u64,
    pub seed: u64,
    pub mean: Vec<f64>,
    pub variance: Vec<f64>,
    pub velocity: SlopeEstimate,
    pub diffusion: SlopeEstimate,
}

pub const INTERFACE_BATCHES: u64 = 50;

#[derive(Clone)]
struct Moments {
    n: f64,
    sum: Vec<f64>,
    sum_sq: Vec<f64>,
}

impl Moments {
    fn new(len: usize) -> Self {
        Moments { n: 0.0, sum: vec![0.0; len], sum_sq: vec![0.0; len] }
    }

    fn add(&mut self, other: &Moments) {
        self.n += other.n;
        self.sum.iter_mut().zip(&other.sum).for_each(|(a, b)| *a += b);
        self.sum_sq.iter_mut().zip(&other.sum_sq).for_each(|(a, b)| *a += b);
    }

    fn mean_var(&self) -> (Vec<f64>, Vec<f64>) {
        let mean: Vec<f64> = self.sum.iter().map(|s| s / self.n).collect();
        let var = self
            .sum_sq
            .iter()
            .zip(&mean)
            .map(|(s, m)| if self.n > 1.0 { (s - self.n * m * m) / (self.n - 1.0) } else { 0.0 })
            .collect();
        (mean, var)
    }
}

/// Monte Carlo of `samples` walks up to `t_max` layers; the drift and
/// diffusion constant are slopes of linear fits of the mean and variance
/// in `t`, with errors from the spread over 50 batches.
pub fn simulate_interface(q: usize, t_max: usize, samples: u64, seed: StreamSeed) -> Result<InterfaceEnsemble> {
    check_q(q)?;
    if t_max < 1 || samples < 1 {
        return Err(Error::InvalidArgument(format!("need t_max >= 1 and samples >= 1, got {t_max}, {samples}")));
    }
    let batches = INTERFACE_BATCHES.min(samples);
    let len = t_max + 1;
    let per_batch: Vec<Moments> = (0..batches)
        .into_par_iter()
        .map(|b| {
            let mut m = Moments::new(len);
            for index in b * samples / batches..(b + 1) * samples / batches {
                walk(q, t_max, &mut seed.stream(index, 0), |t, x| {
                    let x = x as f64;
                    m.sum[t] += x;
                    m.sum_sq[t] += x * x;
                });
                m.n += 1.0;
            }
            m
        })
        .collect();
    let mut total = Moments::new(len);
    per_batch.iter().for_each(|m| total.add(m));
    let (mean, variance) = total.mean_var();
    let ts: Vec<f64> = (0..len).map(|t| t as f64).collect();
    let slope = |ys: &[f64]| linear_fit(&ts, ys).map(|f| f.slope).unwrap_or(f64::NAN);

    let mut v_acc = Accumulator::default();
    let mut d_acc = Accumulator::default();
    for m in &per_batch {
        let (bm, bv) = m.mean_var();
        v_acc.push(slope(&bm));
        d_acc.push(slope(&bv));
    }
    let se = |acc: &Accumulator| if batches >= 2 { acc.std_error() } else { f64::NAN };
    Ok(InterfaceEnsemble {
        q,
        samples,
        seed: seed.0,
        velocity: SlopeEstimate { value: slope(&mean), std_error: se(&v_acc) },
        diffusion: SlopeEstimate { value: slope(&variance), std_error: se(&d_acc) },
        mean,
        variance,
    })
}

/// Front profile `F(z) value_scar + (1 - F(z)) value_inf` at `z = (x - vt)/sqrt(Dt)`,
/// with `F` the standard normal distribution function.
pub fn analytic_profile(x: f64, t: f64, q: usize, value_scar: f64, value_inf: f64) -> Result<f64> {
    if !(t > 0.0) {
        return Err(Error::Domain(format!("profile needs t > 0, got {t}")));
    }
    let vd = velocity_diffusion(q)?;
    let z = (x - vd.v * t) / (vd.d * t).sqrt();
    let f = 0.5 * erfc(-z / std::f64::consts::SQRT_2);
    Ok(f * value_scar + (1.0 - f) * value_inf)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn closed_forms() {
        let vd = velocity_diffusion(2).unwrap();
        assert!((vd.v - 1.0 / 3.0).abs() < 1e-15);
        assert!((vd.d - 8.0 / 9.0).abs() < 1e-15);
        let big = velocity_diffusion(100_000).unwrap();
        assert!(big.v > 0.9999 && big.v < 1.0);
        assert!(velocity_diffusion(1).is_err());
    }

    #[test]
    fn cumulants_of_the_generating_function() {
        let h = 1e-4;
        for q in [2usize, 3, 10] {
            let vd = velocity_diffusion(q).unwrap();
            let f = |k| hop_cumulant_generating_function(q, k);
            let first = (f(h) - f(-h)) / (2.0 * h);
            let second = (f(h) - 2.0 * f(0.0) + f(-h)) / (h * h);
            assert!(f(0.0).abs() < 1e-15);
            assert!((first - vd.v).abs() < 1e-7);
            assert!((second - vd.d).abs() < 1e-6);
        }
    }

    #[test]
    fn analytic_channel_is_a_projector() {
        for q in [2usize, 3] {
            assert!(analytic_channel(q).unwrap().idempotency_defect() < 1e-12);
        }
    }

    #[test]
    fn trajectories_take_unit_steps() {
        let tr = simulate_trajectories(3, 50, 10, 20, StreamSeed(4)).unwrap();
        for t in &tr {
            assert_eq!(t.positions.len(), 51);
            assert_eq!(t.positions[0], 0);
            assert!(t.positions.windows(2).all(|w| (w[1] - w[0]).abs() == 1));
        }
        let again = simulate_trajectories(3, 50, 15, 1, StreamSeed(4)).unwrap();
        assert_eq!(again[0], tr[5]);
    }

    #[test]
    fn ensemble_slopes() {
        let e = simulate_interface(2, 100, 20_000, StreamSeed(1)).unwrap();
        assert!(((e.velocity.value - 1.0 / 3.0) / e.velocity.std_error).abs() < 4.0);
        assert!(((e.diffusion.value - 8.0 / 9.0) / e.diffusion.std_error).abs() < 4.0);
        assert_eq!(e.mean[0], 0.0);
        assert!(simulate_interface(2, 10, 0, StreamSeed(1)).is_err());
    }

    #[test]
    fn ensemble_is_deterministic() {
        let a = simulate_interface(2, 30, 500, StreamSeed(9)).unwrap();
        let b = simulate_interface(2, 30, 500, StreamSeed(9)).unwrap();
        assert_eq!(a.mean, b.mean);
        assert_eq!(a.variance, b.variance);
    }

    #[test]
    fn profile_limits() {
        let vd = velocity_diffusion(2).unwrap();
        let t = 40.0;
        assert!((analytic_profile(vd.v * t, t, 2, 1.0, 0.5).unwrap() - 0.75).abs() < 1e-15);
        assert!((analytic_profile(-1e4, t, 2, 1.0, 0.5).unwrap() - 0.5).abs() < 1e-15);
        assert!((analytic_profile(1e4, t, 2, 1.0, 0.5).unwrap() - 1.0).abs() < 1e-15);
        assert!(analytic_profile(0.0, 0.0, 2, 1.0, 0.5).is_err());
    }
}
