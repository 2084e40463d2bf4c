use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Debug, Parser)]
#[command(name = "scarsim", version, about = "Random brickwork circuits with a single scar state")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Monte Carlo interface walks: mean and variance growth, front profile.
    Interface(InterfaceArgs),
    /// Exact order-parameter relaxation after a global perturbation and fitted rates.
    ///
    /// The rate fit uses log|<O(t)> - 1/q| from the first layer where the
    /// deviation has dropped below half its initial value up to --fit-t-max.
    OrderParam(OrderParamArgs),
    /// Annealed Renyi-2 entropy: time series, plateaus, growth rates, Page curve.
    Renyi(RenyiArgs),
    /// Infinite-chain OTOC of the projector on |0>.
    Otoc(OtocArgs),
    /// Replica predictions against brute-force circuit averages.
    OracleCheck(OracleArgs),
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Args)]
pub struct Common {
    /// Output file; commands with several panels insert `_<panel>` before the extension.
    /// Without it every panel is written to stdout.
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    pub format: Format,
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
}

fn positive(s: &str) -> Result<u64, String> {
    match s.parse::<u64>() {
        Ok(0) => Err("must be at least 1".into()),
        Ok(v) => Ok(v),
        Err(e) => Err(e.to_string()),
    }
}

fn lambda(s: &str) -> Result<f64, String> {
    let v: f64 = s.parse().map_err(|e: std::num::ParseFloatError| e.to_string())?;
    if (0.0..=1.0).contains(&v) {
        Ok(v)
    } else {
        Err(format!("{v} is outside [0, 1]"))
    }
}

fn local_dim(s: &str) -> Result<usize, String> {
    match s.parse::<usize>() {
        Ok(v) if v >= 2 => Ok(v),
        Ok(v) => Err(format!("local dimension {v} is below 2")),
        Err(e) => Err(e.to_string()),
    }
}

/// `START:END`, 0-based and half-open.
#[derive(Copy, Clone, Debug, PartialEq, Eq)]
pub struct Region {
    pub start: usize,
    pub end: usize,
}

fn region(s: &str) -> Result<Region, String> {
    let (a, b) = s.split_once(':').ok_or("expected START:END")?;
    let start = a.trim().parse().map_err(|e: std::num::ParseIntError| e.to_string())?;
    let end = b.trim().parse().map_err(|e: std::num::ParseIntError| e.to_string())?;
    if start > end {
        return Err(format!("reversed region {start}:{end}"));
    }
    Ok(Region { start, end })
}

#[derive(Debug, Args)]
pub struct InterfaceArgs {
    #[arg(long, value_delimiter = ',', default_value = "2", value_parser = local_dim)]
    pub q: Vec<usize>,
    #[arg(long, default_value_t = 200, value_parser = positive)]
    pub t_max: u64,
    #[arg(long, default_value_t = 100_000, value_parser = positive)]
    pub samples: u64,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Debug, Args)]
pub struct OrderParamArgs {
    #[arg(long, value_delimiter = ',', default_value = "2,3,42", value_parser = local_dim)]
    pub q: Vec<usize>,
    /// Single perturbation strength; overrides --lambda-grid.
    #[arg(long, value_parser = lambda)]
    pub lambda: Option<f64>,
    #[arg(long, value_delimiter = ',', default_value = "0,0.25,0.5,0.75,1", value_parser = lambda)]
    pub lambda_grid: Vec<f64>,
    /// Strengths for the rate table.
    #[arg(long, value_delimiter = ',', default_value = "0.05,0.1,0.15,0.2,0.3,0.4,0.5,0.6,0.7,0.8,0.9,1", value_parser = lambda)]
    pub rate_grid: Vec<f64>,
    #[arg(long, default_value_t = 100)]
    pub t_max: u64,
    /// Last layer used by the rate fit.
    #[arg(long, default_value_t = 20_000, value_parser = positive)]
    pub fit_t_max: u64,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Debug, Args)]
pub struct RenyiArgs {
    #[arg(long, default_value_t = 2, value_parser = local_dim)]
    pub q: usize,
    #[arg(long, value_parser = lambda)]
    pub lambda: Option<f64>,
    #[arg(
        long,
        value_delimiter = ',',
        default_value = "0,0.1,0.2,0.3,0.35,0.4,0.45,0.5,0.6,0.7,0.8,0.9,1",
        value_parser = lambda
    )]
    pub lambda_grid: Vec<f64>,
    /// Chain lengths (even, >= 4).
    #[arg(long = "L", value_delimiter = ',', default_value = "6,8,10,12")]
    pub l: Vec<usize>,
    /// Series length; the plateau is read at the last layer.
    #[arg(long, default_value_t = 50)]
    pub t_max: u64,
    /// Region for the entropy; defaults to the left half of every chain.
    #[arg(long, value_parser = region)]
    pub region: Option<Region>,
    /// Last layer of the linear growth fit (taken on the largest chain).
    #[arg(long, default_value_t = 20)]
    pub growth_t_max: u64,
    /// Chain length for the exact saturation column of the Page panel.
    #[arg(long, default_value_t = 40)]
    pub page_l: usize,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Debug, Args)]
pub struct OtocArgs {
    #[arg(long, value_delimiter = ',', default_value = "2,3", value_parser = local_dim)]
    pub q: Vec<usize>,
    /// Distance between the two operator insertions.
    #[arg(long, default_value_t = 0)]
    pub separation: i64,
    #[arg(long, default_value_t = 17)]
    pub t_max: u64,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Debug, Args)]
pub struct OracleArgs {
    #[arg(long, default_value_t = 2, value_parser = local_dim)]
    pub q: usize,
    #[arg(long = "L", default_value_t = 8)]
    pub l: usize,
    #[arg(long, default_value_t = 6)]
    pub t_max: u64,
    #[arg(long, value_parser = lambda)]
    pub lambda: Option<f64>,
    #[arg(long, value_delimiter = ',', default_value = "0,0.5", value_parser = lambda)]
    pub lambda_grid: Vec<f64>,
    #[arg(long, default_value_t = 2000, value_parser = positive)]
    pub samples: u64,
    /// Samples for the sampled update-rule rows.
    #[arg(long, default_value_t = 10_000, value_parser = positive)]
    pub channel_samples: u64,
    #[command(flatten)]
    pub common: Common,
}
