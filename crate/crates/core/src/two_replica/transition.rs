//! Finite-size analysis of the half-chain entropy plateau.

use crate::error::{Error, Result};
use crate::stats::linear_fit;
use crate::two_replica::chain::renyi2_series;
use crate::two_replica::gram::GramData;

/// `S_2(t) / L` of the left half of an `L`-site chain at layer `t`.
pub fn plateau_density(l: usize, gram: &GramData, lambda: f64, t: usize) -> Result<f64> {
    let s = renyi2_series(l, gram, lambda, 0, l / 2, t)?;
    Ok(s[t] / l as f64)
}

/// Straight line `S_2 = slope t + intercept` fitted to `t = t_first..=t_last`.
pub fn growth_fit(series: &[f64], t_first: usize, t_last: usize) -> Result<(f64, f64)> {
    if t_last >= series.len() || t_last < t_first + 1 {
        return Err(Error::DegenerateFit(format!(
            "growth window [{t_first}, {t_last}] needs a series of at least {} points",
            t_last + 1
        )));
    }
    let ts: Vec<f64> = (t_first..=t_last).map(|t| t as f64).collect();
    let fit = linear_fit(&ts, &series[t_first..=t_last])
        .ok_or_else(|| Error::DegenerateFit("collinear growth window".into()))?;
    Ok((fit.slope, fit.intercept))
}

/// Two-branch description of a plateau curve: `a (-2 log(1 - lambda^2))` at
/// weak perturbation and a constant `b` at strong perturbation; they cross
/// at `lambda_cross = sqrt(1 - exp(-b / 2a))`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BranchCrossing {
    pub scar_slope: f64,
    pub saturated_level: f64,
    pub lambda_cross: f64,
}

/// Weak-perturbation points are those with `lambda <= scar_max`, strong ones
/// those with `lambda >= saturated_min`.
pub fn branch_crossing(lambdas: &[f64], densities: &[f64], scar_max: f64, saturated_min: f64) -> Result<BranchCrossing> {
    if lambdas.len() != densities.len() {
        return Err(Error::InvalidArgument("lambda grid and plateau values differ in length".into()));
    }
    let (mut sxy, mut sxx) = (0.0, 0.0);
    let mut high = Vec::new();
    for (&l, &y) in lambdas.iter().zip(densities) {
        if l > 0.0 && l <= scar_max {
            let x = -2.0 * (1.0 - l * l).ln();
            sxy += x * y;
            sxx += x * x;
        }
        if l >= saturated_min {
            high.push(y);
        }
    }
    if sxx == 0.0 || high.is_empty() {
        return Err(Error::DegenerateFit(format!(
            "need nonzero lambda <= {scar_max} and lambda >= {saturated_min} on the grid"
        )));
    }
    let scar_slope = sxy / sxx;
    let saturated_level = high.iter().sum::<f64>() / high.len() as f64;
    let lambda_cross = (1.0 - (-saturated_level / (2.0 * scar_slope)).exp()).sqrt();
    Ok(BranchCrossing { scar_slope, saturated_level, lambda_cross })
}
