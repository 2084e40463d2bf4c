use scar_core::one_replica::{
    analytic_profile, golden_rule_rate, order_parameter_series, relaxation_fit, simulate_interface,
    velocity_diffusion, PerturbationParams,
};
use scar_core::stats::z_score;
use scar_core::two_replica::{
    branch_crossing, critical_lambda, growth_fit, otoc_plateau, otoc_series, page_curve, purity_saturation,
    renyi2_series, GramData,
};
use scar_core::validation::{run_oracle_suite, suite_passes, OracleSuiteConfig, Z_THRESHOLD};
use scar_core::{Error, StreamSeed};

use crate::args::{InterfaceArgs, OracleArgs, OrderParamArgs, OtocArgs, RenyiArgs};
use crate::output::{format_sig, Cell, Panel};

#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Size(String),
    OracleFailure(String),
    Io(std::io::Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) | CliError::Io(_) => 1,
            CliError::Size(_) => 2,
            CliError::OracleFailure(_) => 3,
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Usage(m) | CliError::Size(m) | CliError::OracleFailure(m) => f.write_str(m),
            CliError::Io(e) => write!(f, "i/o error: {e}"),
        }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        if e.is_size() {
            CliError::Size(e.to_string())
        } else {
            CliError::Usage(e.to_string())
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Io(e)
    }
}

type Out = Result<Vec<Panel>, CliError>;

fn list<T: ToString>(xs: &[T]) -> String {
    xs.iter().map(T::to_string).collect::<Vec<_>>().join(",")
}

fn nums(xs: &[f64]) -> String {
    xs.iter().map(|&x| format_sig(x)).collect::<Vec<_>>().join(",")
}

fn param(k: &str, v: impl ToString) -> (String, String) {
    (k.to_string(), v.to_string())
}

fn grid(single: Option<f64>, grid: &[f64]) -> Vec<f64> {
    single.map_or_else(|| grid.to_vec(), |l| vec![l])
}

pub fn interface(a: &InterfaceArgs) -> Out {
    let params = vec![
        param("q", list(&a.q)),
        param("t_max", a.t_max),
        param("samples", a.samples),
        param("seed", a.common.seed),
    ];
    let mut growth =
        Panel::new("interface", "growth", &params, &["q", "t", "mean", "var", "v_fit", "D_fit", "v_exact", "D_exact"]);
    let mut fit = Panel::new(
        "interface",
        "fit",
        &params,
        &["q", "v_fit", "v_stderr", "v_exact", "v_z", "D_fit", "D_stderr", "D_exact", "D_z"],
    );
    let mut profile = Panel::new("interface", "profile", &params, &["q", "t", "x", "profile", "value_scar", "value_inf"]);
    let t_max = a.t_max as usize;
    for &q in &a.q {
        let ens = simulate_interface(q, t_max, a.samples, StreamSeed(a.common.seed).child(q as u64))?;
        let exact = velocity_diffusion(q)?;
        for t in 0..=t_max {
            growth.push(vec![
                q.into(),
                t.into(),
                ens.mean[t].into(),
                ens.variance[t].into(),
                ens.velocity.value.into(),
                ens.diffusion.value.into(),
                exact.v.into(),
                exact.d.into(),
            ]);
        }
        fit.push(vec![
            q.into(),
            ens.velocity.value.into(),
            ens.velocity.std_error.into(),
            exact.v.into(),
            z_score(exact.v, ens.velocity.value, ens.velocity.std_error).into(),
            ens.diffusion.value.into(),
            ens.diffusion.std_error.into(),
            exact.d.into(),
            z_score(exact.d, ens.diffusion.value, ens.diffusion.std_error).into(),
        ]);
        let inf = 1.0 / q as f64;
        let mut times = vec![(t_max / 4).max(1), (t_max / 2).max(1), t_max];
        times.dedup();
        for t in times {
            let tf = t as f64;
            let width = (exact.d * tf).sqrt();
            let lo = (exact.v * tf - 5.0 * width).floor() as i64;
            let hi = (exact.v * tf + 5.0 * width).ceil() as i64;
            for x in lo..=hi {
                let value = analytic_profile(x as f64, tf, q, 1.0, inf)?;
                profile.push(vec![q.into(), t.into(), x.into(), value.into(), 1.0.into(), inf.into()]);
            }
        }
    }
    Ok(vec![growth, fit, profile])
}

pub fn order_param(a: &OrderParamArgs) -> Out {
    let lambdas = grid(a.lambda, &a.lambda_grid);
    let params = vec![
        param("q", list(&a.q)),
        param("lambda_grid", nums(&lambdas)),
        param("rate_grid", nums(&a.rate_grid)),
        param("t_max", a.t_max),
        param("fit_t_max", a.fit_t_max),
        param("fit_window", "first t with |<O>-1/q| < |<O(0)>-1/q|/2 .. fit_t_max or 12 decades of decay"),
        param("seed", a.common.seed),
    ];
    let mut series = Panel::new("order-param", "series", &params, &["q", "lambda", "t", "order_parameter", "plateau"]);
    let mut rates = Panel::new(
        "order-param",
        "rates",
        &params,
        &["q", "lambda", "gamma_fit", "amplitude", "t_start", "t_end", "gamma_golden_rule", "status"],
    );
    for &q in &a.q {
        for &lambda in &lambdas {
            let p = PerturbationParams::new(q, lambda)?;
            for (t, v) in order_parameter_series(&p, a.t_max as usize)?.into_iter().enumerate() {
                series.push(vec![q.into(), lambda.into(), t.into(), v.into(), (1.0 / q as f64).into()]);
            }
        }
        for &lambda in &a.rate_grid {
            let p = PerturbationParams::new(q, lambda)?;
            let golden = golden_rule_rate(&p);
            let row = match relaxation_fit(&p, a.fit_t_max as usize) {
                Ok(f) => vec![
                    q.into(),
                    lambda.into(),
                    f.gamma.into(),
                    f.amplitude.into(),
                    f.t_start.into(),
                    f.t_end.into(),
                    golden.into(),
                    "ok".into(),
                ],
                Err(Error::DegenerateFit(_)) => vec![
                    q.into(),
                    lambda.into(),
                    Cell::Empty,
                    Cell::Empty,
                    Cell::Empty,
                    Cell::Empty,
                    golden.into(),
                    "degenerate".into(),
                ],
                Err(e) => return Err(e.into()),
            };
            rates.push(row);
        }
    }
    Ok(vec![series, rates])
}

pub fn renyi(a: &RenyiArgs) -> Out {
    let q = a.q;
    let lambdas = grid(a.lambda, &a.lambda_grid);
    let t_max = a.t_max as usize;
    let region_desc = a.region.map_or("left half".to_string(), |r| format!("{}:{}", r.start, r.end));
    let params = vec![
        param("q", q),
        param("lambda_grid", nums(&lambdas)),
        param("L", list(&a.l)),
        param("t_max", a.t_max),
        param("region", region_desc),
        param("growth_window", format!("0..{}", a.growth_t_max)),
        param("page_L", a.page_l),
        param("seed", a.common.seed),
    ];
    let gram = GramData::new(q)?;
    let mut series = Panel::new("renyi", "series", &params, &["q", "L", "lambda", "t", "S2", "S2_per_L"]);
    let mut plateau = Panel::new("renyi", "plateau", &params, &["q", "L", "lambda", "t", "S2_per_L", "page"]);
    let mut growth =
        Panel::new("renyi", "growth", &params, &["q", "L", "lambda", "slope", "intercept", "slope_rescaled"]);
    let mut page = Panel::new("renyi", "page", &params, &["q", "lambda", "ell_over_L", "page", "saturation_density"]);
    let mut transition = Panel::new(
        "renyi",
        "transition",
        &params,
        &["q", "L", "scar_slope", "saturated_level", "lambda_cross", "lambda_star", "status"],
    );
    let l_growth = a.l.iter().copied().max().ok_or_else(|| CliError::Usage("--L needs at least one length".into()))?;
    let mut growth_rows = Vec::new();
    for &l in &a.l {
        let (start, end) = match a.region {
            Some(r) if r.end > l => {
                return Err(CliError::Usage(format!("region {}:{} outside chain of {l}", r.start, r.end)))
            }
            Some(r) => (r.start, r.end),
            None => (0, l / 2),
        };
        let fraction = (end - start) as f64 / l as f64;
        let mut densities = Vec::new();
        for &lambda in &lambdas {
            let s = renyi2_series(l, &gram, lambda, start, end, t_max)?;
            for (t, v) in s.iter().enumerate() {
                series.push(vec![q.into(), l.into(), lambda.into(), t.into(), (*v).into(), (v / l as f64).into()]);
            }
            let density = s[t_max] / l as f64;
            densities.push(density);
            plateau.push(vec![
                q.into(),
                l.into(),
                lambda.into(),
                t_max.into(),
                density.into(),
                page_curve(q, lambda, fraction)?.into(),
            ]);
            if l == l_growth {
                let (slope, intercept) = growth_fit(&s, 0, a.growth_t_max as usize)?;
                growth_rows.push((lambda, slope, intercept));
            }
        }
        let star = critical_lambda(q)?;
        match branch_crossing(&lambdas, &densities, 0.2, 0.6) {
            Ok(c) => transition.push(vec![
                q.into(),
                l.into(),
                c.scar_slope.into(),
                c.saturated_level.into(),
                c.lambda_cross.into(),
                star.into(),
                "ok".into(),
            ]),
            Err(_) => transition.push(vec![
                q.into(),
                l.into(),
                Cell::Empty,
                Cell::Empty,
                Cell::Empty,
                star.into(),
                "grid lacks lambda <= 0.2 or lambda >= 0.6".into(),
            ]),
        }
    }
    let top = growth_rows.iter().map(|r| r.1).fold(0.0f64, f64::max);
    for (lambda, slope, intercept) in growth_rows {
        let rescaled = if top > 0.0 { Some(slope / top) } else { None };
        growth.push(vec![q.into(), l_growth.into(), lambda.into(), slope.into(), intercept.into(), rescaled.into()]);
    }
    let lp = a.page_l;
    if lp < 2 {
        return Err(CliError::Usage("--page-l must be at least 2".into()));
    }
    for &lambda in &lambdas {
        for ell in 0..=lp {
            let f = ell as f64 / lp as f64;
            let sat = if ell == 0 || ell == lp {
                None
            } else {
                Some(-purity_saturation(q, lp, ell, lambda)?.ln() / lp as f64)
            };
            page.push(vec![q.into(), lambda.into(), f.into(), page_curve(q, lambda, f)?.into(), sat.into()]);
        }
    }
    Ok(vec![series, plateau, growth, page, transition])
}

pub fn otoc(a: &OtocArgs) -> Out {
    let params = vec![
        param("q", list(&a.q)),
        param("separation", a.separation),
        param("t_max", a.t_max),
        param("seed", a.common.seed),
    ];
    let mut panel = Panel::new("otoc", "series", &params, &["q", "separation", "t", "otoc", "plateau"]);
    for &q in &a.q {
        let gram = GramData::new(q)?;
        let plateau = otoc_plateau(q)?.value;
        for (t, v) in otoc_series(&gram, 0, a.separation, a.t_max as usize)?.into_iter().enumerate() {
            panel.push(vec![q.into(), a.separation.into(), t.into(), v.into(), plateau.into()]);
        }
    }
    Ok(vec![panel])
}

/// Returns the report and whether every row passed.
pub fn oracle_check(a: &OracleArgs) -> Result<(Vec<Panel>, bool), CliError> {
    let cfg = OracleSuiteConfig {
        q: a.q,
        l: a.l,
        t_max: a.t_max as usize,
        lambdas: grid(a.lambda, &a.lambda_grid),
        samples: a.samples,
        channel_samples: a.channel_samples,
        seed: StreamSeed(a.common.seed),
    };
    let params = vec![
        param("q", cfg.q),
        param("L", cfg.l),
        param("t_max", cfg.t_max),
        param("lambda_grid", nums(&cfg.lambdas)),
        param("samples", cfg.samples),
        param("channel_samples", cfg.channel_samples),
        param("z_threshold", Z_THRESHOLD),
        param("seed", a.common.seed),
    ];
    let rows = run_oracle_suite(&cfg)?;
    let mut panel = Panel::new(
        "oracle-check",
        "report",
        &params,
        &["quantity", "lambda", "t", "replica_value", "oracle_mean", "oracle_stderr", "z_score"],
    );
    for r in &rows {
        panel.push(vec![
            r.quantity.as_str().into(),
            r.lambda.into(),
            r.t.map_or(Cell::Empty, Cell::from),
            r.replica_value.into(),
            r.oracle_mean.into(),
            r.oracle_stderr.into(),
            r.z_score.into(),
        ]);
    }
    Ok((vec![panel], suite_passes(&rows)))
}
