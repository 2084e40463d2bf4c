//! Closed-form predictions: Page curve, critical perturbation strength,
//! block-Haar purity saturation and the late-time OTOC plateau.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::two_replica::chain::check_lambda;
use crate::two_replica::gram::{IDENTITY, SWAP};

fn check_q(q: usize) -> Result<()> {
    if q < 2 {
        return Err(Error::InvalidDimension(format!("local dimension must be >= 2, got {q}")));
    }
    Ok(())
}

/// Saturation value of `S_2 / L` for a region of fraction `ell_over_l`:
/// `min{-2 log(1 - lambda^2), f log q, (1 - f) log q}`.
pub fn page_curve(q: usize, lambda: f64, ell_over_l: f64) -> Result<f64> {
    check_q(q)?;
    check_lambda(lambda)?;
    if !(0.0..=1.0).contains(&ell_over_l) {
        return Err(Error::Domain(format!("region fraction must lie in [0, 1], got {ell_over_l}")));
    }
    let scar = -2.0 * (1.0 - lambda * lambda).ln();
    let lq = (q as f64).ln();
    Ok(scar.min(ell_over_l * lq).min((1.0 - ell_over_l) * lq))
}

/// Perturbation strength where the half-chain branches cross: `sqrt(1 - q^(-1/4))`.
pub fn critical_lambda(q: usize) -> Result<f64> {
    check_q(q)?;
    Ok((1.0 - (q as f64).powf(-0.25)).sqrt())
}

fn gram_rational(d: &BigRational) -> [[BigRational; 7]; 7] {
    let one = BigRational::one();
    let d2 = d * d;
    // entry codes: 0 -> 1, 1 -> d, 2 -> d^2
    const PATTERN: [[u8; 7]; 7] = [
        [0, 0, 0, 0, 0, 0, 0],
        [0, 2, 1, 1, 1, 0, 0],
        [0, 1, 1, 0, 0, 0, 0],
        [0, 1, 0, 1, 0, 0, 0],
        [0, 1, 0, 0, 2, 1, 1],
        [0, 0, 0, 0, 1, 1, 0],
        [0, 0, 0, 0, 1, 0, 1],
    ];
    std::array::from_fn(|i| {
        std::array::from_fn(|j| match PATTERN[i][j] {
            0 => one.clone(),
            1 => d.clone(),
            _ => d2.clone(),
        })
    })
}

fn overlaps_rational(s: &BigRational) -> [BigRational; 7] {
    let one = BigRational::one();
    let s2 = s * s;
    [s2, one.clone(), s.clone(), s.clone(), one, s.clone(), s.clone()]
}

fn solve_exact(mut a: Vec<Vec<BigRational>>, mut b: Vec<BigRational>) -> Result<Vec<BigRational>> {
    let n = b.len();
    for col in 0..n {
        let pivot = (col..n)
            .filter(|&r| !a[r][col].is_zero())
            .max_by(|&r, &s| a[r][col].abs().cmp(&a[s][col].abs()))
            .ok_or_else(|| Error::DegenerateBasis("singular 7 x 7 replica system".into()))?;
        a.swap(col, pivot);
        b.swap(col, pivot);
        for r in col + 1..n {
            if a[r][col].is_zero() {
                continue;
            }
            let f = &a[r][col] / &a[col][col];
            for c in col..n {
                let delta = &f * &a[col][c];
                a[r][c] -= delta;
            }
            let delta = &f * &b[col];
            b[r] -= delta;
        }
    }
    let mut x = vec![BigRational::zero(); n];
    for r in (0..n).rev() {
        let mut acc = b[r].clone();
        for c in r + 1..n {
            acc -= &a[r][c] * &x[c];
        }
        x[r] = acc / &a[r][r];
    }
    Ok(x)
}

/// `E[Tr rho_A^2]` after one Haar-with-scar unitary on the full chain, with
/// `A` the first `ell` of `L` sites; evaluated in exact rational arithmetic.
pub fn purity_saturation(q: usize, l: usize, ell: usize, lambda: f64) -> Result<f64> {
    check_q(q)?;
    check_lambda(lambda)?;
    if ell == 0 || ell >= l {
        return Err(Error::InvalidArgument(format!("need 1 <= ell <= L - 1, got ell = {ell}, L = {l}")));
    }
    let qi = BigInt::from(q);
    let d = BigRational::from_integer(num_traits::pow(qi.clone(), ell));
    let dp = BigRational::from_integer(num_traits::pow(qi, l - ell));
    let lam = BigRational::from_float(lambda).ok_or_else(|| Error::Domain("non-finite lambda".into()))?;
    let site = BigRational::one() - &lam * &lam;
    let s_a = num_traits::pow(site.clone(), ell);
    let s_b = num_traits::pow(site, l - ell);

    let (ga, gb) = (gram_rational(&d), gram_rational(&dp));
    let (va, vb) = (overlaps_rational(&s_a), overlaps_rational(&s_b));
    let system: Vec<Vec<BigRational>> =
        (0..7).map(|i| (0..7).map(|j| &ga[i][j] * &gb[i][j]).collect()).collect();
    let rhs: Vec<BigRational> = (0..7).map(|j| &va[j] * &vb[j]).collect();
    let x = solve_exact(system, rhs)?;
    let purity: BigRational = (0..7).map(|j| &ga[SWAP][j] * &gb[IDENTITY][j] * &x[j]).sum();
    purity
        .to_f64()
        .ok_or_else(|| Error::NumericalFailure("purity outside f64 range".into()))
}

/// Leading large-dimension form `(1 - lambda^2)^(2L) + 1/d + 1/d'`.
pub fn purity_saturation_asymptotic(q: usize, l: usize, ell: usize, lambda: f64) -> Result<f64> {
    check_q(q)?;
    check_lambda(lambda)?;
    if ell == 0 || ell >= l {
        return Err(Error::InvalidArgument(format!("need 1 <= ell <= L - 1, got ell = {ell}, L = {l}")));
    }
    let qf = q as f64;
    let scar = (1.0 - lambda * lambda).powi(2 * l as i32);
    Ok(scar + qf.powi(-(ell as i32)) + qf.powi(-((l - ell) as i32)))
}

/// Late-time OTOC value for the projector `O = |0><0|` and its ingredients.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct OtocPlateau {
    pub q: usize,
    /// `(2q - 1) / q^4`.
    pub value: f64,
    /// `-2 <(O - <O>)^2>^2`, the late-time commutator-squared value.
    pub commutator_limit: f64,
    /// `-<(O - <O>)^2>^2 + <O^2>^2`.
    pub free_product: f64,
}

pub fn otoc_plateau(q: usize) -> Result<OtocPlateau> {
    check_q(q)?;
    let qf = q as f64;
    let mean = 1.0 / qf;
    let variance = mean - mean * mean;
    Ok(OtocPlateau {
        q,
        value: (2.0 * qf - 1.0) / qf.powi(4),
        commutator_limit: -2.0 * variance * variance,
        free_product: -variance * variance + mean * mean,
    })
}
