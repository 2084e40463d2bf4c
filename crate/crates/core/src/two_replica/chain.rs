//! Finite open chain in the pair-configuration representation.
//!
//! After a layer on pairs `(1,2), (3,4), ...` (parity A) the replica state is
//! a combination of products of `|kk>>` on those pairs, one symbol per pair.
//! After a layer on `(2,3), ...` (parity B) the idle end sites keep their own
//! symbol, so the table has `L/2 + 1` legs: left end, `L/2 - 1` interior
//! pairs, right end.

use crate::error::{Error, Result};
use crate::two_replica::dense::{Amplitudes, DEFAULT_MAX_AMPLITUDES};
use crate::two_replica::gram::{dot, site_tensor, GramData, Symbol, IDENTITY, SCAR, SWAP};

#[derive(Copy, Clone, Debug, PartialEq, Eq)]
pub enum Parity {
    /// Last layer acted on `(1,2), (3,4), ...`.
    A,
    /// Last layer acted on `(2,3), (4,5), ...`.
    B,
}

/// Overlaps `v_j = <<j| rho (x) rho>>` of the one-site perturbed scar
/// `sqrt(1 - lambda^2)|0> + lambda|1>`.
#[derive(Clone, Debug, PartialEq)]
pub struct SiteOverlapVector {
    pub q: usize,
    pub lambda: f64,
    pub v: [f64; 7],
}

/// Closed-form overlap vector: `s = 1 - lambda^2`, `v = (s^2, 1, s, s, 1, s, s)`.
pub fn overlap_vector(q: usize, lambda: f64) -> Result<SiteOverlapVector> {
    check_lambda(lambda)?;
    let s = 1.0 - lambda * lambda;
    Ok(SiteOverlapVector { q, lambda, v: [s * s, 1.0, s, s, 1.0, s, s] })
}

/// Overlaps of every basis tensor with `rho (x) rho` by explicit contraction
/// of the four-leg tensors; `rho` is a real `q x q` row-major matrix.
pub fn overlaps_by_contraction(q: usize, replicas: usize, rho: &[f64]) -> Vec<f64> {
    let n = if replicas == 1 { 2 } else { 7 };
    let target: Vec<f64> = if replicas == 1 {
        rho.to_vec()
    } else {
        let mut t = vec![0.0; q * q * q * q];
        for a in 0..q {
            for b in 0..q {
                for c in 0..q {
                    for d in 0..q {
                        t[((a * q + b) * q + c) * q + d] = rho[a * q + b] * rho[c * q + d];
                    }
                }
            }
        }
        t
    };
    (0..n).map(|j| dot(&site_tensor(q, replicas, j), &target)).collect()
}

pub(crate) fn check_lambda(lambda: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&lambda) {
        return Err(Error::Domain(format!("lambda must lie in [0, 1], got {lambda}")));
    }
    Ok(())
}

pub(crate) fn check_chain(l: usize) -> Result<()> {
    if l < 4 || l % 2 == 1 {
        return Err(Error::InvalidGeometry(format!("chain length must be even and >= 4, got {l}")));
    }
    Ok(())
}

/// Replica state of an open chain of `L` sites between brickwork layers.
#[derive(Clone, Debug)]
pub struct PairConfigState {
    l: usize,
    parity: Parity,
    layers: usize,
    amps: Amplitudes,
}

impl PairConfigState {
    /// First layer applied to a product state with per-site overlaps
    /// `overlaps[x][k] = <<k|X_x>>`.
    pub fn from_site_overlaps(gram: &GramData, overlaps: &[Vec<f64>]) -> Result<Self> {
        Self::from_site_overlaps_guarded(gram, overlaps, DEFAULT_MAX_AMPLITUDES)
    }

    pub fn from_site_overlaps_guarded(gram: &GramData, overlaps: &[Vec<f64>], guard: usize) -> Result<Self> {
        let l = overlaps.len();
        check_chain(l)?;
        let blocks: Vec<Vec<f64>> =
            overlaps.chunks(2).map(|p| gram.project_pair(&p[0], &p[1])).collect();
        let amps = Amplitudes::product(gram.symbols(), &blocks, guard)?;
        Ok(PairConfigState { l, parity: Parity::A, layers: 1, amps })
    }

    pub fn len(&self) -> usize {
        self.l
    }

    pub fn is_empty(&self) -> bool {
        self.l == 0
    }

    pub fn parity(&self) -> Parity {
        self.parity
    }

    /// Number of brickwork layers applied so far.
    pub fn layers(&self) -> usize {
        self.layers
    }

    pub fn amplitudes(&self) -> &Amplitudes {
        &self.amps
    }

    /// Symbol-leg index carrying site `x` (0-based).
    pub fn leg_of_site(&self, x: usize) -> usize {
        match self.parity {
            Parity::A => x / 2,
            Parity::B => (x + 1) / 2,
        }
    }

    /// Contraction with one measurement vector per site, `sites[x][s]` being
    /// the overlap of the measured operator at `x` with basis symbol `s`.
    pub fn measure(&self, sites: &[Vec<f64>]) -> f64 {
        assert_eq!(sites.len(), self.l);
        let prod = |a: &[f64], b: &[f64]| -> Vec<f64> { a.iter().zip(b).map(|(x, y)| x * y).collect() };
        let vectors: Vec<Vec<f64>> = match self.parity {
            Parity::A => sites.chunks(2).map(|p| prod(&p[0], &p[1])).collect(),
            Parity::B => {
                let mut v = vec![sites[0].clone()];
                v.extend(sites[1..self.l - 1].chunks(2).map(|p| prod(&p[0], &p[1])));
                v.push(sites[self.l - 1].clone());
                v
            }
        };
        self.amps.contract_all(&vectors)
    }

    /// `<<1 ... 1| state>>`; equals `(Tr rho)^2` for a 2-replica state.
    pub fn trace(&self, gram: &GramData) -> f64 {
        let row = gram.gram_row(IDENTITY);
        self.measure(&vec![row; self.l])
    }
}

/// First-layer state of the globally perturbed scar on `L` sites.
pub fn initial_state(l: usize, gram: &GramData, lambda: f64) -> Result<PairConfigState> {
    check_lambda(lambda)?;
    let s = 1.0 - lambda * lambda;
    let site: Vec<f64> = if gram.replicas() == 1 {
        vec![s, 1.0]
    } else {
        overlap_vector(gram.q(), lambda)?.v.to_vec()
    };
    PairConfigState::from_site_overlaps(gram, &vec![site; l])
}

/// One brickwork layer; the pairing alternates with the state's parity.
pub fn apply_layer(state: &PairConfigState, gram: &GramData) -> Result<PairConfigState> {
    apply_layer_guarded(state, gram, DEFAULT_MAX_AMPLITUDES)
}

pub fn apply_layer_guarded(state: &PairConfigState, gram: &GramData, guard: usize) -> Result<PairConfigState> {
    let w = gram.kernel();
    let half = state.l / 2;
    let (amps, parity) = match state.parity {
        Parity::A => {
            // (c_1, ..., c_n) -> (s_1, k_1, ..., k_{n-1}, s_L)
            let mut t = state.amps.insert_between(0, w, guard).map_err(|e| size_hint(e, state.l))?;
            for leg in 2..half {
                t = t.fuse_left(leg, w);
            }
            (t, Parity::B)
        }
        Parity::B => {
            // (s_1, k_1, ..., k_{n-1}, s_L) -> (c_1, ..., c_n)
            let mut t = state.amps.clone();
            for leg in 0..half - 1 {
                t = t.fuse_left(leg, w);
            }
            (t.merge(half - 1, w), Parity::A)
        }
    };
    Ok(PairConfigState { l: state.l, parity, layers: state.layers + 1, amps })
}

fn size_hint(e: Error, l: usize) -> Error {
    match e {
        Error::Size { requested, limit, .. } => Error::size_with_hint(
            format!("pair-configuration table for L = {l}"),
            requested,
            limit,
            "reduce L",
        ),
        other => other,
    }
}

/// Re-applies the pairing of the last layer (it must act as the identity).
pub fn reapply_last_pairing(state: &PairConfigState, gram: &GramData) -> PairConfigState {
    let n = gram.symbols();
    let w = gram.kernel();
    let mut diag = vec![0.0; n * n];
    for k in 0..n {
        for c in 0..n {
            diag[k * n + c] = w.get(k, c, c);
        }
    }
    let legs = state.amps.legs();
    let interior: Vec<usize> = match state.parity {
        Parity::A => (0..legs).collect(),
        Parity::B => (1..legs - 1).collect(),
    };
    let mut t = state.amps.clone();
    for leg in interior {
        t = t.map_leg(leg, &diag);
    }
    PairConfigState { amps: t, ..state.clone() }
}

/// Measurement vectors for `Tr(SWAP_A rho (x) rho)` with `A = [start, end)`.
pub fn purity_vectors(gram: &GramData, l: usize, start: usize, end: usize) -> Vec<Vec<f64>> {
    let id = gram.gram_row(IDENTITY);
    let sw = gram.gram_row(SWAP);
    (0..l).map(|x| if (start..end).contains(&x) { sw.clone() } else { id.clone() }).collect()
}

/// Annealed Renyi-2 entropy `-log E[Tr rho_A^2]` of the contiguous region `[start, end)`.
pub fn measure_renyi2(state: &PairConfigState, gram: &GramData, start: usize, end: usize) -> Result<f64> {
    if start > end || end > state.l {
        return Err(Error::InvalidArgument(format!("region [{start}, {end}) outside chain of {}", state.l)));
    }
    purity_to_entropy(state.measure(&purity_vectors(gram, state.l, start, end)))
}

pub(crate) fn purity_to_entropy(purity: f64) -> Result<f64> {
    if !(purity > 0.0) {
        return Err(Error::NumericalFailure(format!("non-positive purity {purity}")));
    }
    let s = -purity.ln();
    if s >= 0.0 {
        Ok(s)
    } else if s >= -1e-9 {
        Ok(0.0)
    } else {
        Err(Error::NumericalFailure(format!("purity {purity} exceeds 1")))
    }
}

/// `E[Tr rho_A^2](t)` for `t = 0..=t_max` from the perturbed scar, `A = [start, end)`.
pub fn purity_series(
    l: usize,
    gram: &GramData,
    lambda: f64,
    start: usize,
    end: usize,
    t_max: usize,
) -> Result<Vec<f64>> {
    if start > end || end > l {
        return Err(Error::InvalidArgument(format!("region [{start}, {end}) outside chain of {l}")));
    }
    let site = overlap_vector(gram.q(), lambda)?.v.to_vec();
    let symbols: Vec<Symbol> = (0..l).map(|x| if (start..end).contains(&x) { SWAP } else { IDENTITY }).collect();
    open_chain_series(gram, &vec![site; l], &symbols, 1.0, t_max)
}

/// `S_2(t)` for `t = 0..=t_max` from the perturbed scar.
pub fn renyi2_series(
    l: usize,
    gram: &GramData,
    lambda: f64,
    start: usize,
    end: usize,
    t_max: usize,
) -> Result<Vec<f64>> {
    purity_series(l, gram, lambda, start, end, t_max)?.into_iter().map(purity_to_entropy).collect()
}

/// `prod_x scale <<m_x| X_x(t)>>` for `t = 0..=t_max` on an open chain,
/// starting from the product with per-site overlaps `overlaps[x][k] = <<k|X_x>>`.
pub fn open_chain_series(
    gram: &GramData,
    overlaps: &[Vec<f64>],
    symbols: &[Symbol],
    scale: f64,
    t_max: usize,
) -> Result<Vec<f64>> {
    check_chain(overlaps.len())?;
    if symbols.len() != overlaps.len() {
        return Err(Error::InvalidGeometry(format!(
            "{} measurement symbols for a chain of {}",
            symbols.len(),
            overlaps.len()
        )));
    }
    let mut out = vec![overlaps.iter().zip(symbols).map(|(o, &m)| scale * o[m]).product()];
    if t_max == 0 {
        return Ok(out);
    }
    let vectors = pattern_vectors(gram, symbols, scale);
    let mut state = PairConfigState::from_site_overlaps(gram, overlaps)?;
    out.push(state.measure(&vectors));
    for _ in 1..t_max {
        state = apply_layer(&state, gram)?;
        out.push(state.measure(&vectors));
    }
    Ok(out)
}

/// OTOC `q^-L <<O_y O_y| Phi^t (SWAP O_x O_x)>>` on an open chain, `t = 0..=t_max`.
pub fn open_chain_otoc(gram: &GramData, l: usize, x: usize, y: usize, t_max: usize) -> Result<Vec<f64>> {
    if x >= l || y >= l {
        return Err(Error::InvalidArgument(format!("OTOC sites ({x}, {y}) outside chain of {l}")));
    }
    let overlaps: Vec<Vec<f64>> = (0..l).map(|s| gram.gram_row(if s == x { SCAR } else { SWAP })).collect();
    let mut symbols = vec![IDENTITY; l];
    symbols[y] = SCAR;
    open_chain_series(gram, &overlaps, &symbols, 1.0 / gram.q() as f64, t_max)
}

/// Per-site measurement vectors `scale * G[m_x][.]`.
pub fn pattern_vectors(gram: &GramData, symbols: &[Symbol], scale: f64) -> Vec<Vec<f64>> {
    symbols.iter().map(|&m| gram.gram_row(m).iter().map(|g| g * scale).collect()).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::replica_core::channel::two_site_folded;
    use crate::two_replica::gram::PIN_FIRST;

    #[test]
    fn overlap_vector_limits() {
        assert_eq!(overlap_vector(2, 0.0).unwrap().v, [1.0; 7]);
        assert_eq!(overlap_vector(2, 1.0).unwrap().v, [0.0, 1.0, 0.0, 0.0, 1.0, 0.0, 0.0]);
        assert!(overlap_vector(2, 1.5).is_err());
    }

    #[test]
    fn overlap_vector_matches_tensor_contraction() {
        for q in [2usize, 3] {
            for lambda in [0.0, 0.3, 0.8, 1.0] {
                let (a, b) = ((1.0f64 - lambda * lambda).sqrt(), lambda);
                let mut rho = vec![0.0; q * q];
                rho[0] = a * a;
                rho[1] = a * b;
                rho[q] = a * b;
                rho[q + 1] = b * b;
                let direct = overlaps_by_contraction(q, 2, &rho);
                let closed = overlap_vector(q, lambda).unwrap().v;
                for j in 0..7 {
                    assert!((direct[j] - closed[j]).abs() < 1e-12, "q={q} lambda={lambda} j={j}");
                }
            }
        }
    }

    #[test]
    fn scar_initial_state_is_pure_scar() {
        let g = GramData::new(2).unwrap();
        let s = initial_state(6, &g, 0.0).unwrap();
        let data = s.amplitudes().data();
        assert!((data[0] - 1.0).abs() < 1e-12);
        assert!(data[1..].iter().all(|x| x.abs() < 1e-12));
        assert!((s.trace(&g) - 1.0).abs() < 1e-12);
        assert!(measure_renyi2(&s, &g, 0, 3).unwrap() < 1e-12);
    }

    #[test]
    fn trace_is_preserved() {
        for q in [2usize, 3] {
            let g = GramData::new(q).unwrap();
            for lambda in [0.2, 0.6, 1.0] {
                let mut s = initial_state(8, &g, lambda).unwrap();
                for _ in 0..6 {
                    assert!((s.trace(&g) - 1.0).abs() < 1e-10);
                    s = apply_layer(&s, &g).unwrap();
                }
            }
        }
    }

    #[test]
    fn uniform_symbol_is_stationary() {
        let g = GramData::new(2).unwrap();
        for m in 0..7 {
            let overlaps = vec![g.gram_row(m); 6];
            // |m m ... m>> has overlaps G[.][m]; its projection is itself.
            let s = PairConfigState::from_site_overlaps(&g, &overlaps).unwrap();
            let s2 = apply_layer(&apply_layer(&s, &g).unwrap(), &g).unwrap();
            let idx = (0..3).fold(0, |acc, _| acc * 7 + m);
            for (i, &x) in s2.amplitudes().data().iter().enumerate() {
                let target = if i == idx { 1.0 } else { 0.0 };
                assert!((x - target).abs() < 1e-10, "m={m}");
            }
        }
    }

    #[test]
    fn reapplying_a_pairing_is_idempotent() {
        let g = GramData::new(2).unwrap();
        let a = initial_state(8, &g, 0.45).unwrap();
        let b = apply_layer(&a, &g).unwrap();
        for s in [a, b] {
            let again = reapply_last_pairing(&s, &g);
            let dev = again
                .amplitudes()
                .data()
                .iter()
                .zip(s.amplitudes().data())
                .map(|(x, y)| (x - y).abs())
                .fold(0.0, f64::max);
            assert!(dev < 1e-10);
        }
    }

    #[test]
    fn two_replica_contains_one_replica() {
        // <O_x> measured with the pinned-first-replica symbol equals the
        // 1-replica chain result.
        let g2 = GramData::new(2).unwrap();
        let g1 = GramData::one_replica(2).unwrap();
        let l = 8;
        let lambda = 0.6;
        let mut s2 = initial_state(l, &g2, lambda).unwrap();
        let mut s1 = initial_state(l, &g1, lambda).unwrap();
        for _ in 0..5 {
            let mut syms2 = vec![IDENTITY; l];
            syms2[3] = PIN_FIRST;
            let mut syms1 = vec![IDENTITY; l];
            syms1[3] = SCAR;
            let a = s2.measure(&pattern_vectors(&g2, &syms2, 1.0));
            let b = s1.measure(&pattern_vectors(&g1, &syms1, 1.0));
            assert!((a - b).abs() < 1e-12, "{a} vs {b}");
            s2 = apply_layer(&s2, &g2).unwrap();
            s1 = apply_layer(&s1, &g1).unwrap();
        }
    }

    /// Dense folded simulation of `rho (x) rho` on four sites, applying the
    /// folded gate matrix pair by pair.
    fn dense_folded_purity(lambda: f64, layers: usize) -> Vec<f64> {
        let q = 2;
        let g = GramData::new(q).unwrap();
        let phi = g.folded_gate_matrix();
        let site_dim: usize = 16;
        let l: usize = 4;
        let total = site_dim.pow(l as u32);
        // rho (x) rho per site in site_tensor layout.
        let (a, b) = ((1.0f64 - lambda * lambda).sqrt(), lambda);
        let rho = [a * a, a * b, a * b, b * b];
        let mut site = vec![0.0; 16];
        for i in 0..16 {
            site[i] = rho[(i / 8) * 2 + (i / 4) % 2] * rho[((i / 2) % 2) * 2 + i % 2];
        }
        let mut state: Vec<f64> = (0..total)
            .map(|idx| (0..l).map(|x| site[(idx / site_dim.pow((l - 1 - x) as u32)) % site_dim]).product())
            .collect();
        // Map (site_a tensor index, site_b tensor index) <-> folded pair index.
        let mut to_pair = vec![0usize; 256];
        for ia in 0..16 {
            for ib in 0..16 {
                let mut ea = vec![0.0; 16];
                let mut eb = vec![0.0; 16];
                ea[ia] = 1.0;
                eb[ib] = 1.0;
                let f = two_site_folded(q, 2, &ea, &eb);
                to_pair[ia * 16 + ib] = f.iter().position(|&x| x == 1.0).unwrap();
            }
        }
        let apply = |state: &mut Vec<f64>, x: usize| {
            let sa = site_dim.pow((l - 1 - x) as u32);
            let sb = sa / site_dim;
            let mut next = vec![0.0; total];
            for idx in 0..total {
                let ia = (idx / sa) % site_dim;
                let ib = (idx / sb) % site_dim;
                let base = idx - ia * sa - ib * sb;
                let col = to_pair[ia * 16 + ib];
                let v = state[idx];
                if v == 0.0 {
                    continue;
                }
                for ja in 0..16 {
                    for jb in 0..16 {
                        let w = phi[to_pair[ja * 16 + jb] * 256 + col];
                        if w != 0.0 {
                            next[base + ja * sa + jb * sb] += w * v;
                        }
                    }
                }
            }
            *state = next;
        };
        let swap = site_tensor(q, 2, SWAP);
        let id = site_tensor(q, 2, IDENTITY);
        let purity = |state: &Vec<f64>| -> f64 {
            (0..total)
                .map(|idx| {
                    let w: f64 = (0..l)
                        .map(|x| {
                            let i = (idx / site_dim.pow((l - 1 - x) as u32)) % site_dim;
                            if x < 2 { swap[i] } else { id[i] }
                        })
                        .product();
                    w * state[idx]
                })
                .sum()
        };
        let mut out = Vec::new();
        for t in 0..layers {
            if t % 2 == 0 {
                apply(&mut state, 0);
                apply(&mut state, 2);
            } else {
                apply(&mut state, 1);
            }
            out.push(purity(&state));
        }
        out
    }

    #[test]
    fn pair_configuration_matches_dense_folded_evolution() {
        let g = GramData::new(2).unwrap();
        let lambda = 0.55;
        let dense = dense_folded_purity(lambda, 4);
        let mut s = initial_state(4, &g, lambda).unwrap();
        for (t, expect) in dense.iter().enumerate() {
            if t > 0 {
                s = apply_layer(&s, &g).unwrap();
            }
            let p = s.measure(&purity_vectors(&g, 4, 0, 2));
            assert!((p - expect).abs() < 1e-12, "t={} {p} vs {expect}", t + 1);
        }
    }

    #[test]
    fn series_starts_from_the_product_state() {
        let g = GramData::new(3).unwrap();
        let s = renyi2_series(6, &g, 0.8, 0, 3, 4).unwrap();
        assert_eq!(s[0], 0.0);
        let mut st = initial_state(6, &g, 0.8).unwrap();
        for t in 1..=4 {
            assert!((s[t] - measure_renyi2(&st, &g, 0, 3).unwrap()).abs() < 1e-12);
            st = apply_layer(&st, &g).unwrap();
        }
    }

    #[test]
    fn guard_and_geometry_errors() {
        let g = GramData::new(2).unwrap();
        assert!(matches!(initial_state(7, &g, 0.1), Err(Error::InvalidGeometry(_))));
        let s = PairConfigState::from_site_overlaps_guarded(&g, &vec![g.gram_row(1); 8], 7usize.pow(4)).unwrap();
        assert!(apply_layer_guarded(&s, &g, 7usize.pow(4)).unwrap_err().is_size());
    }

    #[test]
    fn empty_region_has_zero_entropy() {
        let g = GramData::new(2).unwrap();
        let s = apply_layer(&initial_state(8, &g, 0.7).unwrap(), &g).unwrap();
        assert_eq!(measure_renyi2(&s, &g, 3, 3).unwrap(), 0.0);
        assert!(measure_renyi2(&s, &g, 0, 4).unwrap() > 0.0);
    }
}
