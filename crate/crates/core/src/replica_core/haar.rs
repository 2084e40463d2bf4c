//! Haar-random unitaries and the scar-preserving two-site gate.

use nalgebra::{Complex, DMatrix};
use rand::Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};

pub type C64 = Complex<f64>;

/// Square complex matrix that is unitary up to floating-point rounding.
#[derive(Clone, Debug, PartialEq)]
pub struct UnitaryMatrix {
    entries: DMatrix<C64>,
}

impl UnitaryMatrix {
    /// Wraps a matrix after checking `U^dagger U = 1` entrywise within `tol`.
    pub fn from_matrix(entries: DMatrix<C64>, tol: f64) -> Result<Self> {
        if !entries.is_square() || entries.nrows() == 0 {
            return Err(Error::InvalidDimension(format!(
                "expected a nonempty square matrix, got {}x{}",
                entries.nrows(),
                entries.ncols()
            )));
        }
        let u = UnitaryMatrix { entries };
        let dev = u.unitarity_defect();
        if dev > tol {
            return Err(Error::NumericalFailure(format!("matrix is not unitary (defect {dev:e})")));
        }
        Ok(u)
    }

    pub fn dim(&self) -> usize {
        self.entries.nrows()
    }

    pub fn matrix(&self) -> &DMatrix<C64> {
        &self.entries
    }

    #[inline]
    pub fn get(&self, row: usize, col: usize) -> C64 {
        self.entries[(row, col)]
    }

    /// Max-entry norm of `U^dagger U - 1`.
    pub fn unitarity_defect(&self) -> f64 {
        let n = self.dim();
        let prod = self.entries.adjoint() * &self.entries;
        let mut worst = 0.0f64;
        for i in 0..n {
            for j in 0..n {
                let target = if i == j { 1.0 } else { 0.0 };
                worst = worst.max((prod[(i, j)] - C64::new(target, 0.0)).norm());
            }
        }
        worst
    }

    /// Row-major copy of the entries, convenient for hot loops.
    pub fn to_row_major(&self) -> Vec<C64> {
        let n = self.dim();
        let mut out = Vec::with_capacity(n * n);
        for i in 0..n {
            for j in 0..n {
                out.push(self.entries[(i, j)]);
            }
        }
        out
    }
}

/// Draws a Haar-distributed unitary of size `dim`.
///
/// QR decomposition of a complex Ginibre matrix, with the phases of the
/// diagonal of `R` pushed into `Q` so that the result is exactly Haar.
pub fn sample_haar_unitary<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> Result<UnitaryMatrix> {
    if dim == 0 {
        return Err(Error::InvalidDimension("Haar sample of dimension 0".into()));
    }
    let scale = std::f64::consts::FRAC_1_SQRT_2;
    let ginibre = DMatrix::<C64>::from_fn(dim, dim, |_, _| {
        let re: f64 = rng.sample(StandardNormal);
        let im: f64 = rng.sample(StandardNormal);
        C64::new(re * scale, im * scale)
    });
    let qr = ginibre.qr();
    let mut q = qr.q();
    let r = qr.r();
    for j in 0..dim {
        let d = r[(j, j)];
        let norm = d.norm();
        let phase = if norm > 0.0 { d / norm } else { C64::new(1.0, 0.0) };
        for i in 0..dim {
            q[(i, j)] *= phase;
        }
    }
    Ok(UnitaryMatrix { entries: q })
}

/// Two-site gate acting as the identity on `|00>` and as an independent Haar
/// unitary on the `q^2 - 1` dimensional orthogonal complement.
pub fn build_scar_gate<R: Rng + ?Sized>(q: usize, rng: &mut R) -> Result<UnitaryMatrix> {
    build_scar_unitary(q.checked_mul(q).filter(|_| q >= 2).ok_or_else(|| {
        Error::InvalidDimension(format!("local dimension must be >= 2, got {q}"))
    })?, rng)
}

/// Block unitary `1 (+) Haar(dim - 1)` on a space of total dimension `dim`.
///
/// Row and column 0 are the unit vector by construction, not up to rounding.
pub fn build_scar_unitary<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> Result<UnitaryMatrix> {
    if dim < 2 {
        return Err(Error::InvalidDimension(format!("block unitary needs dim >= 2, got {dim}")));
    }
    let block = sample_haar_unitary(dim - 1, rng)?;
    let mut m = DMatrix::<C64>::zeros(dim, dim);
    m[(0, 0)] = C64::new(1.0, 0.0);
    for i in 1..dim {
        for j in 1..dim {
            m[(i, j)] = block.entries[(i - 1, j - 1)];
        }
    }
    Ok(UnitaryMatrix { entries: m })
}
