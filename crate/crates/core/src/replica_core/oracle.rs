//! Brute-force realization average over sampled circuits.
//!
//! Every realization draws fresh scar gates for every layer and evolves a
//! pure state (or, for the OTOC, the Heisenberg operator) exactly. Layer
//! `t = 0, 2, ...` acts on pairs `(1,2), (3,4), ...`; odd layers act on
//! `(2,3), (4,5), ...` with the end sites idle.

use rand::Rng;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::replica_core::haar::{build_scar_gate, C64};
use crate::rng::StreamSeed;
use crate::stats::Accumulator;

/// Largest state vector the oracle will allocate.
pub const MAX_STATE_ENTRIES: usize = 1 << 14;
/// Largest dense operator (entries) for the OTOC oracle.
pub const MAX_OPERATOR_ENTRIES: usize = 1 << 18;

const INIT_LAYER: u64 = u64::MAX;

/// Initial condition of an oracle run.
#[derive(Clone, Debug, PartialEq)]
pub enum InitialState {
    /// `(sqrt(1 - lambda^2)|0> + lambda|1>)` on every site.
    Product { lambda: f64 },
    /// Infinite temperature where `hot[x]` is true, the scar `|0>` elsewhere;
    /// the mixed region is realized by uniformly sampled basis states.
    Pattern { hot: Vec<bool> },
}

impl InitialState {
    /// `hot_sites` infinite-temperature sites on the left, scar on the right.
    pub fn bipartition(l: usize, hot_sites: usize) -> Self {
        InitialState::Pattern { hot: (0..l).map(|x| x < hot_sites).collect() }
    }
}

/// Observable tracked by an oracle run. Sites are 0-based.
#[derive(Clone, Debug, PartialEq)]
pub enum Observable {
    /// `<|0><0|_site>`.
    OrderParameter { site: usize },
    /// `Tr rho_A^2` for `A = [start, end)`.
    Purity { start: usize, end: usize },
    /// Infinite-temperature `<O_x O_y(t) O_x O_y(t)>` with `O = |0><0|`;
    /// independent of the initial state.
    Otoc { x: usize, y: usize },
}

impl Observable {
    /// Report label; sites are printed 1-based.
    pub fn name(&self) -> String {
        match self {
            Observable::OrderParameter { site } => format!("order_parameter[site={}]", site + 1),
            Observable::Purity { start, end } => format!("purity[sites={}-{}]", start + 1, end),
            Observable::Otoc { x, y } => format!("otoc[x={},y={}]", x + 1, y + 1),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct OracleConfig {
    pub l: usize,
    pub q: usize,
    pub layers: usize,
    pub initial: InitialState,
    pub observable: Observable,
    pub samples: u64,
    pub seed: StreamSeed,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SeriesPoint {
    pub layer: usize,
    pub mean: f64,
    pub std_error: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct OracleResult {
    pub observable_name: String,
    pub time_series: Vec<SeriesPoint>,
    pub samples: u64,
    pub seed: u64,
}

/// Pairs `(x, x + 1)` (0-based) acted on by layer `t`.
pub fn layer_pairs(l: usize, t: usize) -> impl Iterator<Item = usize> {
    let first = t % 2;
    (first..l.saturating_sub(1)).step_by(2)
}

fn validate(cfg: &OracleConfig) -> Result<usize> {
    if cfg.q < 2 {
        return Err(Error::InvalidDimension(format!("local dimension must be >= 2, got {}", cfg.q)));
    }
    if cfg.l < 2 || cfg.l % 2 == 1 {
        return Err(Error::InvalidGeometry(format!("chain length must be even and >= 2, got {}", cfg.l)));
    }
    if cfg.samples == 0 {
        return Err(Error::InvalidArgument("samples must be >= 1".into()));
    }
    let dim = (cfg.q as u128).checked_pow(cfg.l as u32).unwrap_or(u128::MAX);
    if dim > MAX_STATE_ENTRIES as u128 {
        return Err(Error::size("oracle state vector", dim, MAX_STATE_ENTRIES as u128));
    }
    let dim = dim as usize;
    match &cfg.observable {
        Observable::OrderParameter { site } if *site >= cfg.l => {
            return Err(Error::InvalidArgument(format!("site {site} outside chain")))
        }
        Observable::Purity { start, end } if start > end || *end > cfg.l => {
            return Err(Error::InvalidArgument(format!("region [{start}, {end}) outside chain")))
        }
        Observable::Otoc { x, y } => {
            if *x >= cfg.l || *y >= cfg.l {
                return Err(Error::InvalidArgument("OTOC site outside chain".into()));
            }
            let entries = (dim as u128) * (dim as u128);
            if entries > MAX_OPERATOR_ENTRIES as u128 {
                return Err(Error::size("oracle OTOC operator", entries, MAX_OPERATOR_ENTRIES as u128));
            }
        }
        _ => {}
    }
    match &cfg.initial {
        InitialState::Product { lambda } if !(0.0..=1.0).contains(lambda) => {
            return Err(Error::Domain(format!("lambda must lie in [0, 1], got {lambda}")))
        }
        InitialState::Pattern { hot } if hot.len() != cfg.l => {
            return Err(Error::InvalidGeometry(format!(
                "pattern has {} sites for a chain of {}",
                hot.len(),
                cfg.l
            )))
        }
        _ => {}
    }
    Ok(dim)
}

/// Applies a two-site gate on sites `(x, x + 1)` of a vector embedded at
/// `data[offset + stride * idx]`, with site 0 the most significant digit.
fn apply_pair(data: &mut [C64], l: usize, q: usize, x: usize, gate: &[C64], offset: usize, stride: usize) {
    let pair = q * q;
    let s_right = q.pow((l - 2 - x) as u32);
    let s_left = s_right * q;
    let outer = q.pow(x as u32);
    let block = s_left * q;
    let mut buf = vec![C64::new(0.0, 0.0); pair];
    let mut out = vec![C64::new(0.0, 0.0); pair];
    for o in 0..outer {
        for i in 0..s_right {
            let base = o * block + i;
            for a in 0..q {
                for b in 0..q {
                    buf[a * q + b] = data[offset + stride * (base + a * s_left + b * s_right)];
                }
            }
            for (r, slot) in out.iter_mut().enumerate() {
                let row = &gate[r * pair..(r + 1) * pair];
                *slot = row.iter().zip(&buf).map(|(g, v)| g * v).sum();
            }
            for a in 0..q {
                for b in 0..q {
                    data[offset + stride * (base + a * s_left + b * s_right)] = out[a * q + b];
                }
            }
        }
    }
}

fn layer_gates(cfg: &OracleConfig, sample: u64, t: usize) -> Result<Vec<(usize, Vec<C64>)>> {
    let mut rng = cfg.seed.stream(sample, t as u64);
    layer_pairs(cfg.l, t)
        .map(|x| Ok((x, build_scar_gate(cfg.q, &mut rng)?.to_row_major())))
        .collect()
}

fn initial_vector(cfg: &OracleConfig, dim: usize, sample: u64) -> Vec<C64> {
    match &cfg.initial {
        InitialState::Product { lambda } => {
            let site = [C64::new((1.0 - lambda * lambda).sqrt(), 0.0), C64::new(*lambda, 0.0)];
            (0..dim)
                .map(|mut idx| {
                    let mut amp = C64::new(1.0, 0.0);
                    for _ in 0..cfg.l {
                        let s = idx % cfg.q;
                        idx /= cfg.q;
                        amp *= if s < 2 { site[s] } else { C64::new(0.0, 0.0) };
                    }
                    amp
                })
                .collect()
        }
        InitialState::Pattern { hot } => {
            let mut rng = cfg.seed.stream(sample, INIT_LAYER);
            let mut idx = 0usize;
            for &h in hot {
                let s = if h { rng.gen_range(0..cfg.q) } else { 0 };
                idx = idx * cfg.q + s;
            }
            let mut v = vec![C64::new(0.0, 0.0); dim];
            v[idx] = C64::new(1.0, 0.0);
            v
        }
    }
}

fn measure_state(cfg: &OracleConfig, psi: &[C64]) -> f64 {
    let (l, q) = (cfg.l, cfg.q);
    match cfg.observable {
        Observable::OrderParameter { site } => {
            let stride = q.pow((l - 1 - site) as u32);
            psi.iter()
                .enumerate()
                .filter(|(idx, _)| (idx / stride) % q == 0)
                .map(|(_, a)| a.norm_sqr())
                .sum()
        }
        Observable::Purity { start, end } => purity(psi, l, q, start, end),
        Observable::Otoc { .. } => unreachable!("OTOC is evaluated on operators"),
    }
}

/// `Tr rho_A^2` of a pure state for the contiguous region `[start, end)`.
pub fn purity(psi: &[C64], l: usize, q: usize, start: usize, end: usize) -> f64 {
    let d_left = q.pow(start as u32);
    let d_a = q.pow((end - start) as u32);
    let d_right = q.pow((l - end) as u32);
    let mut rho = vec![C64::new(0.0, 0.0); d_a * d_a];
    for lft in 0..d_left {
        for r in 0..d_right {
            let at = |a: usize| psi[(lft * d_a + a) * d_right + r];
            for a in 0..d_a {
                let pa = at(a);
                if pa.norm_sqr() == 0.0 {
                    continue;
                }
                for b in 0..d_a {
                    rho[a * d_a + b] += pa * at(b).conj();
                }
            }
        }
    }
    rho.iter().map(|z| z.norm_sqr()).sum()
}

fn run_state(cfg: &OracleConfig, dim: usize, sample: u64) -> Result<Vec<f64>> {
    let mut psi = initial_vector(cfg, dim, sample);
    let mut series = Vec::with_capacity(cfg.layers + 1);
    series.push(measure_state(cfg, &psi));
    for t in 0..cfg.layers {
        for (x, gate) in layer_gates(cfg, sample, t)? {
            apply_pair(&mut psi, cfg.l, cfg.q, x, &gate, 0, 1);
        }
        let norm: f64 = psi.iter().map(|a| a.norm_sqr()).sum();
        if (norm - 1.0).abs() > 1e-10 {
            return Err(Error::NumericalFailure(format!("state norm drifted to {norm} at layer {}", t + 1)));
        }
        series.push(measure_state(cfg, &psi));
    }
    Ok(series)
}

/// With `B = U O_x` (columns evolved as states) `A = U O_x U^dagger = B B^dagger`,
/// so `OTOC = Tr(A O_y A O_y) / q^L = ||B^dagger O_y B||_F^2 / q^L`.
fn run_otoc(cfg: &OracleConfig, dim: usize, sample: u64, x: usize, y: usize) -> Result<Vec<f64>> {
    let (l, q) = (cfg.l, cfg.q);
    let in_support = |idx: usize, site: usize| (idx / q.pow((l - 1 - site) as u32)) % q == 0;
    let cols: Vec<usize> = (0..dim).filter(|&i| in_support(i, x)).collect();
    let ys: Vec<usize> = (0..dim).filter(|&i| in_support(i, y)).collect();
    let mut b = vec![C64::new(0.0, 0.0); cols.len() * dim];
    for (c, &i) in cols.iter().enumerate() {
        b[c * dim + i] = C64::new(1.0, 0.0);
    }
    let measure = |b: &[C64]| -> f64 {
        let n = cols.len();
        let rows: Vec<Vec<C64>> = (0..n).map(|c| ys.iter().map(|&i| b[c * dim + i]).collect()).collect();
        let mut s = 0.0;
        for c in 0..n {
            for d in c..n {
                let m: C64 = rows[c].iter().zip(&rows[d]).map(|(u, v)| u.conj() * v).sum();
                s += if c == d { m.norm_sqr() } else { 2.0 * m.norm_sqr() };
            }
        }
        s / dim as f64
    };
    let mut series = Vec::with_capacity(cfg.layers + 1);
    series.push(measure(&b));
    for t in 0..cfg.layers {
        for (site, gate) in layer_gates(cfg, sample, t)? {
            for c in 0..cols.len() {
                apply_pair(&mut b, l, q, site, &gate, c * dim, 1);
            }
        }
        series.push(measure(&b));
    }
    Ok(series)
}

/// Realization average of the configured observable for `t = 0..=layers`.
pub fn evolve_exact_oracle(cfg: &OracleConfig) -> Result<OracleResult> {
    let dim = validate(cfg)?;
    let runs: Vec<Result<Vec<f64>>> = (0..cfg.samples)
        .into_par_iter()
        .map(|s| match cfg.observable {
            Observable::Otoc { x, y } => run_otoc(cfg, dim, s, x, y),
            _ => run_state(cfg, dim, s),
        })
        .collect();
    let mut acc = vec![Accumulator::new(); cfg.layers + 1];
    for run in runs {
        for (a, v) in acc.iter_mut().zip(run?) {
            a.push(v);
        }
    }
    Ok(OracleResult {
        observable_name: cfg.observable.name(),
        time_series: acc
            .iter()
            .enumerate()
            .map(|(layer, a)| SeriesPoint { layer, mean: a.mean(), std_error: a.std_error() })
            .collect(),
        samples: cfg.samples,
        seed: cfg.seed.0,
    })
}
