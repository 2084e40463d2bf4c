//! Dense amplitude tables over strings of basis symbols.
//!
//! Legs are stored most-significant first: the amplitude of the string
//! `(s_0, ..., s_{m-1})` sits at `sum_i s_i n^(m-1-i)`. Every gate of a
//! brickwork layer is one local rewrite of two adjacent legs.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::two_replica::gram::Kernel;

/// Dense-table guard: `7^9` amplitudes.
pub const DEFAULT_MAX_AMPLITUDES: usize = 40_353_607;

const PAR_THRESHOLD: usize = 1 << 16;

#[derive(Clone, Debug, PartialEq)]
pub struct Amplitudes {
    n: usize,
    legs: usize,
    data: Vec<f64>,
}

fn size_of(n: usize, legs: usize) -> u128 {
    (n as u128).checked_pow(legs as u32).unwrap_or(u128::MAX)
}

impl Amplitudes {
    /// Zero-leg table holding a single scalar.
    pub fn scalar(n: usize, value: f64) -> Self {
        Amplitudes { n, legs: 0, data: vec![value] }
    }

    /// Product table `prod_i factors[i][s_i]`.
    pub fn product(n: usize, factors: &[Vec<f64>], guard: usize) -> Result<Self> {
        check(n, factors.len(), guard, "product amplitude table")?;
        let mut data = vec![1.0];
        for f in factors {
            debug_assert_eq!(f.len(), n);
            let mut next = Vec::with_capacity(data.len() * n);
            for &x in &data {
                next.extend(f.iter().map(|y| x * y));
            }
            data = next;
        }
        Ok(Amplitudes { n, legs: factors.len(), data })
    }

    pub fn from_vec(n: usize, legs: usize, data: Vec<f64>) -> Self {
        assert_eq!(data.len() as u128, size_of(n, legs));
        Amplitudes { n, legs, data }
    }

    pub fn base(&self) -> usize {
        self.n
    }

    pub fn legs(&self) -> usize {
        self.legs
    }

    pub fn data(&self) -> &[f64] {
        &self.data
    }

    pub fn len(&self) -> usize {
        self.data.len()
    }

    pub fn is_empty(&self) -> bool {
        self.data.is_empty()
    }

    fn inner(&self, after_leg: usize) -> usize {
        self.n.pow((self.legs - 1 - after_leg) as u32)
    }

    /// `out[.., a, k, b, ..] = K[k][a][b] in[.., a, b, ..]`: new leg between `i` and `i + 1`.
    pub fn insert_between(&self, i: usize, kernel: &Kernel, guard: usize) -> Result<Self> {
        assert!(i + 1 < self.legs);
        check(self.n, self.legs + 1, guard, "amplitude table")?;
        let n = self.n;
        let inner = self.inner(i + 1);
        let src_block = n * n * inner;
        let dst_block = n * n * n * inner;
        let mut out = vec![0.0; self.data.len() * n];
        let body = |(src, dst): (&[f64], &mut [f64])| {
            for a in 0..n {
                for b in 0..n {
                    let s = &src[(a * n + b) * inner..(a * n + b + 1) * inner];
                    for k in 0..n {
                        let w = kernel.get(k, a, b);
                        if w == 0.0 {
                            continue;
                        }
                        let off = ((a * n + k) * n + b) * inner;
                        dst[off..off + inner].iter_mut().zip(s).for_each(|(d, x)| *d = w * x);
                    }
                }
            }
        };
        zip_blocks(&self.data, &mut out, src_block, dst_block, body);
        Ok(Amplitudes { n, legs: self.legs + 1, data: out })
    }

    /// `out[k, b, ..] = K[k][fixed][b] in[b, ..]`: new leading leg.
    pub fn prepend(&self, kernel: &Kernel, fixed: usize, guard: usize) -> Result<Self> {
        assert!(self.legs >= 1);
        check(self.n, self.legs + 1, guard, "amplitude table")?;
        let n = self.n;
        let inner = self.inner(0);
        let mut out = vec![0.0; self.data.len() * n];
        for k in 0..n {
            for b in 0..n {
                let w = kernel.get(k, fixed, b);
                if w == 0.0 {
                    continue;
                }
                let dst = &mut out[(k * n + b) * inner..(k * n + b + 1) * inner];
                let src = &self.data[b * inner..(b + 1) * inner];
                dst.iter_mut().zip(src).for_each(|(d, x)| *d = w * x);
            }
        }
        Ok(Amplitudes { n, legs: self.legs + 1, data: out })
    }

    /// `out[.., k, b, ..] = sum_a K[k][a][b] in[.., a, b, ..]`: rewrites leg `i`
    /// using leg `i + 1` as a spectator.
    pub fn fuse_left(&self, i: usize, kernel: &Kernel) -> Self {
        assert!(i + 1 < self.legs);
        let n = self.n;
        let inner = self.inner(i + 1);
        let block = n * n * inner;
        let mut out = vec![0.0; self.data.len()];
        let body = |(src, dst): (&[f64], &mut [f64])| {
            for a in 0..n {
                for b in 0..n {
                    let s = &src[(a * n + b) * inner..(a * n + b + 1) * inner];
                    for k in 0..n {
                        let w = kernel.get(k, a, b);
                        if w == 0.0 {
                            continue;
                        }
                        let off = (k * n + b) * inner;
                        dst[off..off + inner].iter_mut().zip(s).for_each(|(d, x)| *d += w * x);
                    }
                }
            }
        };
        zip_blocks(&self.data, &mut out, block, block, body);
        Amplitudes { n, legs: self.legs, data: out }
    }

    /// `out[.., k, ..] = sum_{a,b} K[k][a][b] in[.., a, b, ..]`: legs `i`, `i + 1` merge.
    pub fn merge(&self, i: usize, kernel: &Kernel) -> Self {
        assert!(i + 1 < self.legs);
        let n = self.n;
        let inner = self.inner(i + 1);
        let src_block = n * n * inner;
        let dst_block = n * inner;
        let mut out = vec![0.0; self.data.len() / n];
        let body = |(src, dst): (&[f64], &mut [f64])| {
            for a in 0..n {
                for b in 0..n {
                    let s = &src[(a * n + b) * inner..(a * n + b + 1) * inner];
                    for k in 0..n {
                        let w = kernel.get(k, a, b);
                        if w == 0.0 {
                            continue;
                        }
                        dst[k * inner..(k + 1) * inner].iter_mut().zip(s).for_each(|(d, x)| *d += w * x);
                    }
                }
            }
        };
        zip_blocks(&self.data, &mut out, src_block, dst_block, body);
        Amplitudes { n, legs: self.legs - 1, data: out }
    }

    /// `out[.., k] = sum_a K[k][a][fixed] in[.., a]`: rewrites the last leg.
    pub fn rewrite_last(&self, kernel: &Kernel, fixed: usize) -> Self {
        assert!(self.legs >= 1);
        let n = self.n;
        let mut mat = vec![0.0; n * n];
        for k in 0..n {
            for a in 0..n {
                mat[k * n + a] = kernel.get(k, a, fixed);
            }
        }
        self.map_leg(self.legs - 1, &mat)
    }

    /// Applies the `n x n` matrix `mat[k * n + a]` to leg `i`.
    pub fn map_leg(&self, i: usize, mat: &[f64]) -> Self {
        let n = self.n;
        let inner = self.inner(i);
        let block = n * inner;
        let mut out = vec![0.0; self.data.len()];
        let body = |(src, dst): (&[f64], &mut [f64])| {
            for a in 0..n {
                let s = &src[a * inner..(a + 1) * inner];
                for k in 0..n {
                    let w = mat[k * n + a];
                    if w == 0.0 {
                        continue;
                    }
                    dst[k * inner..(k + 1) * inner].iter_mut().zip(s).for_each(|(d, x)| *d += w * x);
                }
            }
        };
        zip_blocks(&self.data, &mut out, block, block, body);
        Amplitudes { n, legs: self.legs, data: out }
    }

    /// Contracts leg `i` with `vector`, removing it.
    pub fn contract_leg(&self, i: usize, vector: &[f64]) -> Self {
        assert!(i < self.legs);
        let n = self.n;
        let inner = self.inner(i);
        let block = n * inner;
        let mut out = vec![0.0; self.data.len() / n];
        let body = |(src, dst): (&[f64], &mut [f64])| {
            for (a, &w) in vector.iter().enumerate() {
                if w == 0.0 {
                    continue;
                }
                let s = &src[a * inner..(a + 1) * inner];
                dst.iter_mut().zip(s).for_each(|(d, x)| *d += w * x);
            }
        };
        zip_blocks(&self.data, &mut out, block, inner, body);
        Amplitudes { n, legs: self.legs - 1, data: out }
    }

    /// Full contraction with one vector per leg.
    pub fn contract_all(&self, vectors: &[Vec<f64>]) -> f64 {
        assert_eq!(vectors.len(), self.legs);
        let mut t = self.clone();
        for v in vectors.iter().rev() {
            t = t.contract_leg(t.legs - 1, v);
        }
        t.data[0]
    }

    pub fn scaled(mut self, factor: f64) -> Self {
        self.data.iter_mut().for_each(|x| *x *= factor);
        self
    }

    pub fn dot(&self, other: &Amplitudes) -> f64 {
        assert_eq!(self.data.len(), other.data.len());
        if self.data.len() >= PAR_THRESHOLD {
            // fixed chunking keeps the summation order independent of scheduling
            let partial: Vec<f64> = self
                .data
                .par_chunks(PAR_THRESHOLD)
                .zip(other.data.par_chunks(PAR_THRESHOLD))
                .map(|(a, b)| a.iter().zip(b).map(|(x, y)| x * y).sum())
                .collect();
            partial.iter().sum()
        } else {
            self.data.iter().zip(&other.data).map(|(a, b)| a * b).sum()
        }
    }
}

fn check(n: usize, legs: usize, guard: usize, what: &str) -> Result<()> {
    let size = size_of(n, legs);
    if size > guard as u128 {
        return Err(Error::size(format!("{what} with {legs} legs over {n} symbols"), size, guard as u128));
    }
    Ok(())
}

fn zip_blocks<F>(src: &[f64], dst: &mut [f64], src_block: usize, dst_block: usize, body: F)
where
    F: Fn((&[f64], &mut [f64])) + Sync + Send,
{
    if src.len() >= PAR_THRESHOLD && src.len() / src_block > 1 {
        src.par_chunks(src_block).zip(dst.par_chunks_mut(dst_block)).for_each(body);
    } else {
        src.chunks(src_block).zip(dst.chunks_mut(dst_block)).for_each(body);
    }
}
