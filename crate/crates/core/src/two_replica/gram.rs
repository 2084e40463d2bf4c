//! Fixed-point basis of the averaged gate, its Gram matrix, and the layer kernel.
//!
//! The 2-replica basis lives on one site of the doubled folded space, i.e. on
//! operators acting on `H (x) H` for a single `q`-level site. Symbol order:
//!
//! | symbol | operator                    |
//! |--------|-----------------------------|
//! | 0      | `|00><00|` (all legs pinned) |
//! | 1      | `1 (x) 1`                    |
//! | 2      | `|0><0| (x) 1`               |
//! | 3      | `1 (x) |0><0|`               |
//! | 4      | `SWAP`                       |
//! | 5      | `SWAP (|0><0| (x) 1)`        |
//! | 6      | `(|0><0| (x) 1) SWAP`        |
//!
//! The 1-replica basis uses symbol 0 for `|0><0|` and 1 for the identity.

use nalgebra::DMatrix;

use crate::error::{Error, Result};

pub type Symbol = usize;

pub const SCAR: Symbol = 0;
pub const IDENTITY: Symbol = 1;
pub const PIN_FIRST: Symbol = 2;
pub const PIN_SECOND: Symbol = 3;
pub const SWAP: Symbol = 4;
pub const SWAP_PIN_FIRST: Symbol = 5;
pub const SWAP_PIN_SECOND: Symbol = 6;

/// Number of symbols in the 2-replica basis.
pub const TWO_REPLICA_SYMBOLS: usize = 7;

/// Three-index table `K[k][a][b]` over an alphabet of `n` symbols.
#[derive(Clone, Debug, PartialEq)]
pub struct Kernel {
    n: usize,
    data: Vec<f64>,
}

impl Kernel {
    pub fn from_fn(n: usize, f: impl Fn(usize, usize, usize) -> f64) -> Self {
        let mut data = Vec::with_capacity(n * n * n);
        for k in 0..n {
            for a in 0..n {
                for b in 0..n {
                    data.push(f(k, a, b));
                }
            }
        }
        Kernel { n, data }
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn get(&self, k: usize, a: usize, b: usize) -> f64 {
        self.data[(k * self.n + a) * self.n + b]
    }
}

/// Explicit single-site tensor of a basis symbol.
///
/// Legs are ordered `(ket_1, bra_1, ket_2, bra_2)` for 2 replicas and
/// `(ket, bra)` for 1 replica, most significant first.
pub fn site_tensor(q: usize, replicas: usize, symbol: Symbol) -> Vec<f64> {
    let d = |x: usize, y: usize| if x == y { 1.0 } else { 0.0 };
    let z = |x: usize| if x == 0 { 1.0 } else { 0.0 };
    match replicas {
        1 => {
            let mut t = vec![0.0; q * q];
            for a in 0..q {
                for b in 0..q {
                    t[a * q + b] = match symbol {
                        SCAR => z(a) * z(b),
                        IDENTITY => d(a, b),
                        _ => panic!("1-replica symbol out of range: {symbol}"),
                    };
                }
            }
            t
        }
        2 => {
            let mut t = vec![0.0; q * q * q * q];
            for a in 0..q {
                for b in 0..q {
                    for c in 0..q {
                        for e in 0..q {
                            // Operator entry X[(a, c), (b, e)].
                            t[((a * q + b) * q + c) * q + e] = match symbol {
                                SCAR => z(a) * z(b) * z(c) * z(e),
                                IDENTITY => d(a, b) * d(c, e),
                                PIN_FIRST => z(a) * z(b) * d(c, e),
                                PIN_SECOND => d(a, b) * z(c) * z(e),
                                SWAP => d(a, e) * d(c, b),
                                SWAP_PIN_FIRST => z(c) * z(b) * d(a, e),
                                SWAP_PIN_SECOND => z(a) * z(e) * d(c, b),
                                _ => panic!("2-replica symbol out of range: {symbol}"),
                            };
                        }
                    }
                }
            }
            t
        }
        _ => panic!("unsupported replica count {replicas}"),
    }
}

pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Gram matrix, gate matrix and layer kernel of a replica basis.
#[derive(Clone, Debug)]
pub struct GramData {
    q: usize,
    replicas: usize,
    n: usize,
    gram: Vec<f64>,
    gate: Vec<f64>,
    kernel: Kernel,
    overlap_kernel: Kernel,
}

impl GramData {
    /// 7-symbol basis of the 2-replica gate.
    pub fn new(q: usize) -> Result<Self> {
        Self::build(q, 2)
    }

    /// 2-symbol basis `{|0><0|, 1}` of the 1-replica gate.
    pub fn one_replica(q: usize) -> Result<Self> {
        Self::build(q, 1)
    }

    fn build(q: usize, replicas: usize) -> Result<Self> {
        if q < 2 {
            return Err(Error::InvalidDimension(format!("local dimension must be >= 2, got {q}")));
        }
        let n = if replicas == 1 { 2 } else { TWO_REPLICA_SYMBOLS };
        let tensors: Vec<Vec<f64>> = (0..n).map(|j| site_tensor(q, replicas, j)).collect();
        let mut gram = vec![0.0; n * n];
        for i in 0..n {
            for j in 0..n {
                gram[i * n + j] = dot(&tensors[i], &tensors[j]);
            }
        }
        let squared = DMatrix::<f64>::from_fn(n, n, |i, j| gram[i * n + j] * gram[i * n + j]);
        let inverse = squared.clone().try_inverse().ok_or_else(|| {
            Error::DegenerateBasis(format!("G (.) G is singular at q = {q}"))
        })?;
        let residual = (&squared * &inverse - DMatrix::<f64>::identity(n, n)).amax();
        if !residual.is_finite() || residual > 1e-9 {
            return Err(Error::DegenerateBasis(format!(
                "G (.) G is ill-conditioned at q = {q} (residual {residual:e})"
            )));
        }
        let gate: Vec<f64> = (0..n * n).map(|idx| inverse[(idx / n, idx % n)]).collect();
        let kernel = Kernel::from_fn(n, |k, a, b| {
            (0..n).map(|kp| gate[k * n + kp] * gram[kp * n + a] * gram[kp * n + b]).sum()
        });
        let overlap_kernel = Kernel::from_fn(n, |k, a, b| gram[k * n + a] * gram[k * n + b]);
        Ok(GramData { q, replicas, n, gram, gate, kernel, overlap_kernel })
    }

    pub fn q(&self) -> usize {
        self.q
    }

    pub fn replicas(&self) -> usize {
        self.replicas
    }

    /// Alphabet size.
    pub fn symbols(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn gram(&self, i: Symbol, j: Symbol) -> f64 {
        self.gram[i * self.n + j]
    }

    /// Entry of `M = (G (.) G)^{-1}`.
    #[inline]
    pub fn gate(&self, i: Symbol, j: Symbol) -> f64 {
        self.gate[i * self.n + j]
    }

    /// Row `G[m][.]`: overlaps of the measurement symbol `m` with every basis vector.
    pub fn gram_row(&self, m: Symbol) -> Vec<f64> {
        self.gram[m * self.n..(m + 1) * self.n].to_vec()
    }

    /// `W[k][a][b]`: weight of `|kk>>` in the gate image of `|ab>>`.
    pub fn kernel(&self) -> &Kernel {
        &self.kernel
    }

    /// `K[k][a][b] = G[k][a] G[k][b]`: overlap of `<<kk|` with `|ab>>`.
    pub fn overlap_kernel(&self) -> &Kernel {
        &self.overlap_kernel
    }

    /// Gate image of a two-site product with per-site overlap vectors
    /// `left[k] = <<k|X_left>>`, `right[k] = <<k|X_right>>`: returns the
    /// amplitude of every `|kk>>`.
    pub fn project_pair(&self, left: &[f64], right: &[f64]) -> Vec<f64> {
        let n = self.n;
        (0..n)
            .map(|k| (0..n).map(|kp| self.gate(k, kp) * left[kp] * right[kp]).sum())
            .collect()
    }

    /// Dense matrix of the averaged two-site gate `sum M_{jj'} |jj>><<j'j'|`
    /// in the folded two-site index used by [`crate::replica_core::ChannelTensor`].
    pub fn folded_gate_matrix(&self) -> Vec<f64> {
        let pairs: Vec<Vec<f64>> = (0..self.n)
            .map(|j| {
                let t = site_tensor(self.q, self.replicas, j);
                crate::replica_core::channel::two_site_folded(self.q, self.replicas, &t, &t)
            })
            .collect();
        let dim = pairs[0].len();
        let mut out = vec![0.0; dim * dim];
        for j in 0..self.n {
            for jp in 0..self.n {
                let m = self.gate(j, jp);
                if m == 0.0 {
                    continue;
                }
                for (r, &x) in pairs[j].iter().enumerate() {
                    if x == 0.0 {
                        continue;
                    }
                    let row = &mut out[r * dim..(r + 1) * dim];
                    for (c, &y) in pairs[jp].iter().enumerate() {
                        row[c] += m * x * y;
                    }
                }
            }
        }
        out
    }
}

/// Closed-form 2-replica Gram matrix at (possibly non-integer) dimension `d`.
pub fn closed_form_gram(d: f64) -> [[f64; 7]; 7] {
    let d2 = d * d;
    [
        [1.0, 1.0, 1.0, 1.0, 1.0, 1.0, 1.0],
        [1.0, d2, d, d, d, 1.0, 1.0],
        [1.0, d, d, 1.0, 1.0, 1.0, 1.0],
        [1.0, d, 1.0, d, 1.0, 1.0, 1.0],
        [1.0, d, 1.0, 1.0, d2, d, d],
        [1.0, 1.0, 1.0, 1.0, d, d, 1.0],
        [1.0, 1.0, 1.0, 1.0, d, 1.0, d],
    ]
}
