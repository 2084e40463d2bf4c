//! Two interfaces bounding a scar domain inside an infinite-temperature
//! background, tracked through their separation.

use crate::error::{Error, Result};
use crate::stats::linear_fit;
use crate::two_replica::chain::open_chain_series;
use crate::two_replica::gram::{GramData, IDENTITY, SCAR};

/// Local dimension and perturbation strength of the initial product state
/// `(sqrt(1 - lambda^2)|0> + lambda|1>)^(x)L`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PerturbationParams {
    pub q: usize,
    pub lambda: f64,
}

impl PerturbationParams {
    pub fn new(q: usize, lambda: f64) -> Result<Self> {
        if q < 2 {
            return Err(Error::InvalidDimension(format!("local dimension must be >= 2, got {q}")));
        }
        if !(0.0..=1.0).contains(&lambda) {
            return Err(Error::Domain(format!("lambda must lie in [0, 1], got {lambda}")));
        }
        Ok(PerturbationParams { q, lambda })
    }

    /// Weight `1 - lambda^2` of one scar site.
    pub fn site_weight(&self) -> f64 {
        1.0 - self.lambda * self.lambda
    }
}

/// Distribution of the interface separation `x`; `x = 0` is absorbing.
#[derive(Clone, Debug, PartialEq)]
pub struct WalkerDistribution {
    q: usize,
    weights: Vec<f64>,
    time: usize,
}

impl WalkerDistribution {
    pub fn delta(q: usize, x: usize) -> Self {
        let mut weights = vec![0.0; x + 1];
        weights[x] = 1.0;
        WalkerDistribution { q, weights, time: 0 }
    }

    pub fn q(&self) -> usize {
        self.q
    }

    pub fn time(&self) -> usize {
        self.time
    }

    /// `weights()[x]` is the probability of separation `x`.
    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn weight(&self, x: usize) -> f64 {
        self.weights.get(x).copied().unwrap_or(0.0)
    }

    pub fn total(&self) -> f64 {
        self.weights.iter().sum()
    }
}

/// One layer: `|1) -> q/(q+1)|2) + 1/(q+1)|0)` and, for `x >= 2`,
/// `|x) -> p+|x+2) + p0|x) + p-|x-2)` with `p+ = q^2/(q+1)^2`,
/// `p0 = 2q/(q+1)^2`, `p- = 1/(q+1)^2`.
pub fn walker_pair_step(dist: &WalkerDistribution) -> WalkerDistribution {
    let qf = dist.q as f64;
    let s = (qf + 1.0) * (qf + 1.0);
    let (pp, p0, pm) = (qf * qf / s, 2.0 * qf / s, 1.0 / s);
    let src = &dist.weights;
    let mut out = vec![0.0; src.len() + 2];
    for (x, &w) in src.iter().enumerate() {
        if w == 0.0 {
            continue;
        }
        match x {
            0 => out[0] += w,
            1 => {
                out[2] += w * qf / (qf + 1.0);
                out[0] += w / (qf + 1.0);
            }
            _ => {
                out[x + 2] += w * pp;
                out[x] += w * p0;
                out[x - 2] += w * pm;
            }
        }
    }
    WalkerDistribution { q: dist.q, weights: out, time: dist.time + 1 }
}

/// Probability that a unit scar domain is eventually annihilated, iterating
/// until the absorbed mass changes by less than `tol` in one layer.
pub fn absorbing_probability(q: usize, t_max: usize, tol: f64) -> Result<f64> {
    PerturbationParams::new(q, 0.0)?;
    let mut dist = WalkerDistribution::delta(q, 1);
    let mut last = 0.0;
    for t in 1..=t_max {
        dist = walker_pair_step(&dist);
        let absorbed = dist.weight(0);
        if t > 1 && (absorbed - last).abs() < tol {
            return Ok(absorbed);
        }
        last = absorbed;
    }
    Err(Error::Convergence { iterations: t_max, last })
}

fn check_params(p: &PerturbationParams) -> Result<()> {
    PerturbationParams::new(p.q, p.lambda).map(|_| ())
}

/// `<O(t)>` for `O = |0><0|` on one site of an infinite chain:
/// `sum_x P_t(x) (1 - lambda^2)^x` with `P_0 = delta_1`.
pub fn order_parameter(params: &PerturbationParams, t: usize) -> Result<f64> {
    Ok(*order_parameter_series(params, t)?.last().expect("t + 1 values"))
}

/// `<O(t)>` for `t = 0..=t_max`.
pub fn order_parameter_series(params: &PerturbationParams, t_max: usize) -> Result<Vec<f64>> {
    check_params(params)?;
    let s = params.site_weight();
    Ok(walk_series(params.q, t_max, 0.0, |x| s.powi(x as i32)))
}

/// `<O(t)> - 1/q` evaluated as `sum_x P_t(x) (s^x - q^-x)`, which avoids the
/// cancellation against the conserved `sum_x P_t(x) q^-x = 1/q`.
fn deviation_series(params: &PerturbationParams, t_max: usize, stop_below: f64) -> Vec<f64> {
    let s = params.site_weight();
    let qf = params.q as f64;
    walk_series(params.q, t_max, stop_below, |x| s.powi(x as i32) - qf.powi(-(x as i32)))
}

/// Stops early once `|value| < stop_below` (pass 0 to always run to `t_max`).
fn walk_series(q: usize, t_max: usize, stop_below: f64, weight: impl Fn(usize) -> f64) -> Vec<f64> {
    let w: Vec<f64> = (0..2 * t_max + 2).map(&weight).collect();
    let mut dist = WalkerDistribution::delta(q, 1);
    let mut out = Vec::with_capacity(t_max + 1);
    for t in 0..=t_max {
        if t > 0 {
            dist = walker_pair_step(&dist);
        }
        let v: f64 = dist.weights.iter().zip(&w).map(|(p, f)| p * f).sum();
        out.push(v);
        if v.abs() < stop_below {
            break;
        }
    }
    out
}

/// Leading small-`lambda` relaxation rate `2 v lambda^2`.
pub fn golden_rule_rate(params: &PerturbationParams) -> f64 {
    let qf = params.q as f64;
    2.0 * (qf - 1.0) / (qf + 1.0) * params.lambda * params.lambda
}

/// Exponential fit `<O(t)> = 1/q + C e^{-gamma t}`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RelaxationFit {
    pub gamma: f64,
    /// Fitted `C`, signed like `<O> - 1/q`.
    pub amplitude: f64,
    pub t_start: usize,
    pub t_end: usize,
}

/// The fit window closes once `|<O> - 1/q|` has decayed by this factor.
const FIT_DECADES: f64 = 1e-12;

/// Least-squares fit of `log|<O(t)> - 1/q|` against `t`. The window opens at
/// the first layer where the deviation has dropped below half its initial
/// value and closes at `t_max` or once the deviation has fallen twelve decades
/// below its initial value, whichever comes first.
pub fn relaxation_fit(params: &PerturbationParams, t_max: usize) -> Result<RelaxationFit> {
    check_params(params)?;
    let s = params.site_weight();
    let d0 = (s - 1.0 / params.q as f64).abs();
    if !(d0 > 0.0) {
        return Err(Error::DegenerateFit("initial state already at 1/q".into()));
    }
    let dev = deviation_series(params, t_max, FIT_DECADES * d0);
    let t_start = dev
        .iter()
        .position(|d| d.abs() < 0.5 * d0)
        .ok_or_else(|| Error::DegenerateFit(format!("deviation never halves within {t_max} layers")))?;
    let t_end = dev.len() - 1;
    if t_end < t_start + 2 {
        return Err(Error::DegenerateFit(format!(
            "fit window [{t_start}, {t_end}] too short; increase t_max"
        )));
    }
    let ts: Vec<f64> = (t_start..=t_end).map(|t| t as f64).collect();
    let ys: Vec<f64> = (t_start..=t_end).map(|t| dev[t].abs().ln()).collect();
    let fit = linear_fit(&ts, &ys).ok_or_else(|| Error::DegenerateFit("collinear fit window".into()))?;
    Ok(RelaxationFit {
        gamma: -fit.slope,
        amplitude: fit.intercept.exp().copysign(dev[t_start]),
        t_start,
        t_end,
    })
}

pub fn relaxation_rate(params: &PerturbationParams, t_max: usize) -> Result<f64> {
    relaxation_fit(params, t_max).map(|f| f.gamma)
}

/// `<O_x(t)>` on an open chain of `L` sites for `t = 0..=t_max`.
pub fn finite_chain_order_parameter(
    params: &PerturbationParams,
    l: usize,
    site: usize,
    t_max: usize,
) -> Result<Vec<f64>> {
    check_params(params)?;
    if site >= l {
        return Err(Error::InvalidArgument(format!("site {site} outside chain of {l}")));
    }
    let gram = GramData::one_replica(params.q)?;
    let mut symbols = vec![IDENTITY; l];
    symbols[site] = SCAR;
    let overlaps = vec![vec![params.site_weight(), 1.0]; l];
    open_chain_series(&gram, &overlaps, &symbols, 1.0, t_max)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn params(q: usize, lambda: f64) -> PerturbationParams {
        PerturbationParams::new(q, lambda).unwrap()
    }

    #[test]
    fn step_rules() {
        let d0 = walker_pair_step(&WalkerDistribution::delta(2, 0));
        assert_eq!(d0.weight(0), 1.0);
        let d1 = walker_pair_step(&WalkerDistribution::delta(2, 1));
        assert!((d1.weight(0) - 1.0 / 3.0).abs() < 1e-15);
        assert!((d1.weight(2) - 2.0 / 3.0).abs() < 1e-15);
        let d4 = walker_pair_step(&WalkerDistribution::delta(2, 4));
        assert!((d4.weight(6) - 4.0 / 9.0).abs() < 1e-15);
        assert!((d4.weight(4) - 4.0 / 9.0).abs() < 1e-15);
        assert!((d4.weight(2) - 1.0 / 9.0).abs() < 1e-15);
    }

    #[test]
    fn mass_and_parity() {
        for q in [2usize, 3, 42] {
            let mut d = WalkerDistribution::delta(q, 1);
            for t in 1..=300 {
                d = walker_pair_step(&d);
                assert!((d.total() - 1.0).abs() < 1e-12);
                assert!(d.weights().iter().all(|&w| w >= 0.0));
                assert!(d.weights().iter().enumerate().all(|(x, &w)| x % 2 == 0 || w == 0.0));
                assert!(d.weights().len() <= 2 * t + 2);
            }
        }
    }

    #[test]
    fn absorption_limit() {
        for q in [2usize, 3, 5] {
            let p = absorbing_probability(q, 100_000, 1e-14).unwrap();
            assert!((p - 1.0 / q as f64).abs() < 1e-6, "q={q}: {p}");
        }
        let first = walker_pair_step(&WalkerDistribution::delta(3, 1)).weight(0);
        assert!((first - 0.25).abs() < 1e-15);
        assert!(matches!(absorbing_probability(2, 3, 1e-14), Err(Error::Convergence { iterations: 3, .. })));
    }

    #[test]
    fn order_parameter_examples() {
        assert!((order_parameter(&params(2, 0.3), 0).unwrap() - 0.91).abs() < 1e-15);
        for t in [0usize, 1, 10, 100] {
            assert!((order_parameter(&params(3, 0.0), t).unwrap() - 1.0).abs() < 1e-12);
        }
        let v = order_parameter(&params(2, 0.5f64.sqrt()), 1).unwrap();
        assert!((v - 0.5).abs() < 1e-15);
    }

    #[test]
    fn order_parameter_reaches_infinite_temperature() {
        for q in [2usize, 3, 42] {
            for lambda in [0.25, 0.5, 0.75, 1.0] {
                let s = order_parameter_series(&params(q, lambda), 2000).unwrap();
                assert!((s[2000] - 1.0 / q as f64).abs() < 1e-4, "q={q} lambda={lambda}");
            }
        }
    }

    #[test]
    fn deviation_is_accurate() {
        let p = params(2, 0.4);
        let plain = order_parameter_series(&p, 50).unwrap();
        let dev = deviation_series(&p, 50, 0.0);
        for (a, d) in plain.iter().zip(&dev) {
            assert!((a - 0.5 - d).abs() < 1e-14);
        }
    }

    /// Rate of the bulk mode `s^x`: `-log(p+ s^2 + p0 + p- s^-2)`.
    fn bulk_rate(q: usize, lambda: f64) -> f64 {
        let qf = q as f64;
        let n = (qf + 1.0) * (qf + 1.0);
        let s2 = (1.0 - lambda * lambda).powi(2);
        -(qf * qf / n * s2 + 2.0 * qf / n + 1.0 / n / s2).ln()
    }

    #[test]
    fn fitted_rate_matches_bulk_mode() {
        for lambda in [0.1, 0.2, 0.4] {
            let fit = relaxation_fit(&params(2, lambda), 3000).unwrap();
            let expect = bulk_rate(2, lambda);
            assert!(((fit.gamma - expect) / expect).abs() < 1e-2, "lambda={lambda}: {} vs {expect}", fit.gamma);
            assert!(fit.amplitude > 0.0);
        }
    }

    #[test]
    fn small_lambda_rate_is_golden_rule() {
        for lambda in [0.05, 0.1, 0.2] {
            let p = params(2, lambda);
            let g = relaxation_rate(&p, 8000).unwrap();
            assert!(((g - golden_rule_rate(&p)) / golden_rule_rate(&p)).abs() < 0.1);
        }
    }

    #[test]
    fn degenerate_fits() {
        assert!(matches!(relaxation_fit(&params(2, 0.0), 100), Err(Error::DegenerateFit(_))));
        assert!(matches!(relaxation_fit(&params(2, 0.05), 100), Err(Error::DegenerateFit(_))));
    }

    #[test]
    fn large_q_light_cone() {
        // At large q both interfaces move outward every layer: x = 2t.
        let p = params(100, 0.3);
        let s = p.site_weight();
        let series = order_parameter_series(&p, 6).unwrap();
        assert!((series[0] - s).abs() < 1e-15);
        for t in 1..=6 {
            let rel = (series[t] - s.powi(2 * t as i32)) / s.powi(2 * t as i32);
            assert!(rel.abs() < 0.1, "t={t} rel={rel}");
        }
    }

    #[test]
    fn finite_chain_matches_infinite_chain_in_the_bulk() {
        let p = params(2, 0.6);
        let t_max = 5;
        let l = 2 * t_max + 8;
        let chain = finite_chain_order_parameter(&p, l, l / 2, t_max).unwrap();
        let walker = order_parameter_series(&p, t_max).unwrap();
        for t in 0..=t_max {
            assert!((chain[t] - walker[t]).abs() < 1e-12, "t={t}");
        }
    }
}
