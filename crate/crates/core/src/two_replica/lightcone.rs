//! Out-of-time-order correlator on the infinite chain.
//!
//! `E(x, y, t) = q^-L <<O_y (x) O_y| Phi^t (SWAP (O_x (x) O_x))>>` with
//! `O = |0><0|`. Away from the inserted operator the forward state is the
//! SWAP vacuum and the backward state the identity vacuum, both fixed by the
//! averaged gate, so only a window of pair blocks around the insertion is
//! stored. Layer `tau` acts on sites `(2j + tau % 2, 2j + 1 + tau % 2)`.

use crate::error::{Error, Result};
use crate::two_replica::dense::{Amplitudes, DEFAULT_MAX_AMPLITUDES};
use crate::two_replica::gram::{GramData, Kernel, Symbol, IDENTITY, SCAR, SWAP};

/// Window of pair blocks over a uniform vacuum.
#[derive(Clone, Debug)]
pub struct LightconeState {
    vacuum: Symbol,
    layers: usize,
    point: Option<(i64, Symbol)>,
    left_site: i64,
    amps: Amplitudes,
}

impl LightconeState {
    /// `symbol` at `site`, `vacuum` everywhere else, no layers applied.
    pub fn point(gram: &GramData, site: i64, symbol: Symbol, vacuum: Symbol) -> Self {
        let point = if symbol == vacuum { None } else { Some((site, symbol)) };
        LightconeState { vacuum, layers: 0, point, left_site: site, amps: Amplitudes::scalar(gram.symbols(), 1.0) }
    }

    pub fn vacuum(&self) -> Symbol {
        self.vacuum
    }

    pub fn layers(&self) -> usize {
        self.layers
    }

    /// Number of stored blocks (zero for an unevolved point or the bare vacuum).
    pub fn blocks(&self) -> usize {
        self.amps.legs()
    }

    /// First site of the window.
    pub fn left_site(&self) -> i64 {
        self.left_site
    }

    pub fn amplitudes(&self) -> &Amplitudes {
        &self.amps
    }

    fn step(&self, kernel: &Kernel, parity: usize, scale: f64, guard: usize) -> Result<Self> {
        let vac = self.vacuum;
        if let Some((site, sym)) = self.point {
            let left = if site.rem_euclid(2) as usize == parity { site } else { site - 1 };
            let f: Vec<f64> = (0..kernel.n())
                .map(|k| scale * if left == site { kernel.get(k, sym, vac) } else { kernel.get(k, vac, sym) })
                .collect();
            let amps = Amplitudes::product(kernel.n(), &[f], guard)?;
            return Ok(LightconeState { point: None, left_site: left, amps, layers: self.layers + 1, vacuum: vac });
        }
        let m = self.amps.legs();
        if m == 0 {
            return Ok(LightconeState { layers: self.layers + 1, ..self.clone() });
        }
        debug_assert_ne!(self.left_site.rem_euclid(2) as usize, parity);
        let mut t = self.amps.prepend(kernel, vac, guard)?;
        for i in 1..m {
            t = t.fuse_left(i, kernel);
        }
        let amps = t.rewrite_last(kernel, vac).scaled(scale.powi(m as i32 + 1));
        Ok(LightconeState { left_site: self.left_site - 1, amps, layers: self.layers + 1, ..self.clone() })
    }

    /// Applies the next averaged layer of the given parity.
    pub fn advance(&self, gram: &GramData, parity: usize, guard: usize) -> Result<Self> {
        self.step(gram.kernel(), parity, 1.0, guard)
    }

    fn block_parity(&self) -> Option<usize> {
        if self.point.is_some() || self.amps.legs() == 0 {
            None
        } else {
            Some(self.left_site.rem_euclid(2) as usize)
        }
    }
}

/// Applies `layers` averaged layers, the first of parity `first_parity`.
pub fn evolve_lightcone(
    gram: &GramData,
    start: &LightconeState,
    first_parity: usize,
    layers: usize,
    guard: usize,
) -> Result<LightconeState> {
    let mut s = start.clone();
    for k in 0..layers {
        s = s.advance(gram, (first_parity + k) % 2, guard)?;
    }
    Ok(s)
}

fn forward_start(gram: &GramData, x: i64) -> LightconeState {
    LightconeState::point(gram, x, SCAR, SWAP)
}

fn backward_start(gram: &GramData, y: i64) -> LightconeState {
    LightconeState::point(gram, y, SCAR, IDENTITY)
}

fn otoc_at_zero(gram: &GramData, x: i64, y: i64) -> f64 {
    let q = gram.q() as f64;
    if x == y {
        gram.gram(SCAR, SCAR) / q
    } else {
        gram.gram(IDENTITY, SCAR) * gram.gram(SCAR, SWAP) / (q * q)
    }
}

/// Contracts a forward state with the unevolved backward point at `y`.
fn measure_forward(gram: &GramData, f: &LightconeState, y: i64) -> f64 {
    let q = gram.q() as f64;
    let n = gram.symbols();
    let site_vec = |site: i64| -> Vec<f64> {
        let m = if site == y { SCAR } else { IDENTITY };
        (0..n).map(|s| gram.gram(m, s) / q).collect()
    };
    let legs = f.amps.legs();
    let vectors: Vec<Vec<f64>> = (0..legs)
        .map(|i| {
            let a = site_vec(f.left_site + 2 * i as i64);
            let b = site_vec(f.left_site + 2 * i as i64 + 1);
            a.iter().zip(&b).map(|(u, v)| u * v).collect()
        })
        .collect();
    let inside = (f.left_site..f.left_site + 2 * legs as i64).contains(&y);
    let outside = if inside { 1.0 } else { gram.gram(SCAR, f.vacuum) / q };
    f.amps.contract_all(&vectors) * outside
}

/// Overlap of a converted state `c` (outside value `G[k][vac_c]^2 / q^2`
/// per block) with a state `o` on the same block parity (outside `e_vac_o`).
fn join_aligned(gram: &GramData, c: &LightconeState, o: &LightconeState) -> f64 {
    let q2 = (gram.q() * gram.q()) as f64;
    let n = gram.symbols();
    let c_out: Vec<f64> = (0..n).map(|k| gram.gram(k, c.vacuum).powi(2) / q2).collect();
    let mut o_out = vec![0.0; n];
    o_out[o.vacuum] = 1.0;
    let span = |s: &LightconeState| (s.left_site, s.left_site + 2 * s.amps.legs() as i64);
    let (cl, cr) = span(c);
    let (ol, or) = span(o);
    let (lo, hi) = (cl.max(ol), cr.min(or));
    let trim = |s: &LightconeState, out: &[f64]| -> Amplitudes {
        let (l, r) = span(s);
        let mut t = s.amps.clone();
        let (lead, trail) = if lo >= hi {
            (t.legs(), 0)
        } else {
            (((lo - l) / 2) as usize, ((r - hi) / 2) as usize)
        };
        for _ in 0..lead {
            t = t.contract_leg(0, out);
        }
        for _ in 0..trail {
            t = t.contract_leg(t.legs() - 1, out);
        }
        t
    };
    trim(c, &o_out).dot(&trim(o, &c_out))
}

/// Overlap `q^-L <<B|F>>` of a forward and a backward state whose last
/// layers had opposite parity.
fn join(gram: &GramData, f: &LightconeState, b: &LightconeState, guard: usize) -> Result<f64> {
    let q2 = (gram.q() * gram.q()) as f64;
    let (small, other) = if b.blocks() <= f.blocks() { (b, f) } else { (f, b) };
    let parity = 1 - small.block_parity().expect("evolved state");
    let converted = small.step(gram.overlap_kernel(), parity, 1.0 / q2, guard)?;
    Ok(join_aligned(gram, &converted, other))
}

fn otoc_size_hint(e: Error, hint: &str) -> Error {
    match e {
        Error::Size { requested, limit, .. } => {
            Error::size_with_hint("OTOC light-cone table", requested, limit, hint)
        }
        other => other,
    }
}

/// Forward evolution of the full `t` layers, contracted with `O_y` directly.
pub fn otoc_direct(gram: &GramData, x: i64, y: i64, t: usize, guard: usize) -> Result<f64> {
    if t == 0 {
        return Ok(otoc_at_zero(gram, x, y));
    }
    let f = evolve_lightcone(gram, &forward_start(gram, x), 0, t, guard)
        .map_err(|e| otoc_size_hint(e, "the split contraction reaches about twice the depth"))?;
    Ok(measure_forward(gram, &f, y))
}

fn split_value(gram: &GramData, f: &LightconeState, b: &LightconeState, y: i64, guard: usize) -> Result<f64> {
    if b.layers() == 0 {
        Ok(measure_forward(gram, f, y))
    } else {
        join(gram, f, b, guard)
    }
}

/// Forward evolution over `ceil(t/2)` layers and backward over `floor(t/2)`,
/// joined in the middle.
pub fn otoc_split(gram: &GramData, x: i64, y: i64, t: usize, guard: usize) -> Result<f64> {
    if t == 0 {
        return Ok(otoc_at_zero(gram, x, y));
    }
    let hint = "reduce t";
    let f = evolve_lightcone(gram, &forward_start(gram, x), 0, t.div_ceil(2), guard)
        .map_err(|e| otoc_size_hint(e, hint))?;
    let b = evolve_lightcone(gram, &backward_start(gram, y), (t - 1) % 2, t / 2, guard)
        .map_err(|e| otoc_size_hint(e, hint))?;
    split_value(gram, &f, &b, y, guard).map_err(|e| otoc_size_hint(e, hint))
}

/// Largest `t` reachable by [`otoc_split`] under a table guard.
pub fn max_split_depth(gram: &GramData, guard: usize) -> usize {
    let n = gram.symbols() as u128;
    let mut blocks = 0u32;
    while n.pow(blocks + 1) <= guard as u128 {
        blocks += 1;
    }
    // forward ceil(t/2) blocks; the backward state plus one converted block
    if blocks == 0 {
        return 1;
    }
    2 * blocks as usize - 1
}

/// `E(x, y, t)` for `t = 0..=t_max`, reusing the forward and both backward
/// evolutions between time steps.
pub fn otoc_series(gram: &GramData, x: i64, y: i64, t_max: usize) -> Result<Vec<f64>> {
    otoc_series_guarded(gram, x, y, t_max, DEFAULT_MAX_AMPLITUDES)
}

pub fn otoc_series_guarded(gram: &GramData, x: i64, y: i64, t_max: usize, guard: usize) -> Result<Vec<f64>> {
    let limit = max_split_depth(gram, guard);
    if t_max > limit {
        let n = gram.symbols() as u128;
        let needed = n.saturating_pow((t_max / 2 + 1) as u32);
        return Err(Error::size_with_hint(
            format!("OTOC light-cone table at t = {t_max}"),
            needed,
            guard as u128,
            format!("largest reachable t is {limit}"),
        ));
    }
    let mut out = vec![otoc_at_zero(gram, x, y)];
    let mut f = forward_start(gram, x);
    let mut back = [backward_start(gram, y), backward_start(gram, y)];
    for t in 1..=t_max {
        while f.layers() < t.div_ceil(2) {
            f = f.advance(gram, f.layers() % 2, guard)?;
        }
        let p = (t - 1) % 2;
        while back[p].layers() < t / 2 {
            let layer_parity = (p + back[p].layers()) % 2;
            back[p] = back[p].advance(gram, layer_parity, guard)?;
        }
        out.push(split_value(gram, &f, &back[p], y, guard)?);
    }
    Ok(out)
}
