use bvis_core::visibility::parse_point_list;
use bvis_core::{BExponent, LatticePoint, WalkerConfig};
use clap::{Args, Parser, Subcommand, ValueEnum};

pub const DEFAULT_MAX_WORK: u64 = 10_000_000_000;

#[derive(Debug, Parser)]
#[command(
    name = "bvis",
    version,
    about = "Visibility of alpha-random walks along curves: densities, simulations, checks",
    propagate_version = true
)]
pub struct Cli {
    /// Output format for stdout.
    #[arg(long, global = true, value_enum, default_value_t = Format::Csv)]
    pub format: Format,

    /// Worker threads for trials (default: available parallelism).
    #[arg(long, global = true)]
    pub threads: Option<usize>,

    /// Largest number of walker-steps (walkers x steps x trials) one
    /// simulation may perform. Accepts forms like 1e10.
    #[arg(long, global = true, value_parser = parse_count, default_value = "1e10")]
    pub max_work: u64,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Limiting density of visible steps.
    #[command(subcommand)]
    Density(DensityCmd),
    /// Seeded Monte Carlo runs.
    #[command(subcommand)]
    Simulate(SimulateCmd),
    /// Exact expected proportion of visible steps for small step counts.
    #[command(subcommand)]
    Exact(ExactCmd),
    /// Property checks; exits with status 5 if any fails.
    #[command(subcommand)]
    Verify(VerifyCmd),
    /// Single walker against the watchpoints {(0,0),(1,2),(2,1)}.
    Table1(Table1Args),
    /// Several walkers seen from the origin.
    Table2(Table2Args),
}

#[derive(Debug, Subcommand)]
pub enum DensityCmd {
    Watchpoints {
        #[arg(long, value_parser = parse_b)]
        b: BExponent,
        /// Number of watchpoints.
        #[arg(long = "J")]
        j: u64,
        #[arg(long, default_value_t = bvis_core::theory::DEFAULT_TOL)]
        tol: f64,
    },
    Walkers {
        #[arg(long, value_parser = parse_b)]
        b: BExponent,
        /// Number of walkers.
        #[arg(long)]
        r: u64,
        #[arg(long, default_value_t = bvis_core::theory::DEFAULT_TOL)]
        tol: f64,
    },
}

#[derive(Debug, Args)]
pub struct RunArgs {
    #[arg(long)]
    pub steps: usize,
    #[arg(long, default_value_t = 10)]
    pub trials: usize,
    /// Master seed, decimal or 0x-prefixed hex.
    #[arg(long, value_parser = parse_seed, default_value = "1")]
    pub seed: u64,
}

#[derive(Debug, Subcommand)]
pub enum SimulateCmd {
    Watchpoints {
        #[arg(long, value_parser = parse_b)]
        b: BExponent,
        /// Points as "x1,y1;x2,y2;...".
        #[arg(long, value_parser = parse_points, allow_hyphen_values = true)]
        watchpoints: PointList,
        #[arg(long, value_parser = parse_alpha)]
        alpha: WalkerConfig,
        #[command(flatten)]
        run: RunArgs,
    },
    Walkers {
        #[arg(long, value_parser = parse_b)]
        b: BExponent,
        /// One step probability per walker.
        #[arg(long, value_parser = parse_alpha, value_delimiter = ',', required = true)]
        alphas: Vec<WalkerConfig>,
        #[command(flatten)]
        run: RunArgs,
    },
}

#[derive(Debug, Subcommand)]
pub enum ExactCmd {
    Watchpoints {
        #[arg(long, value_parser = parse_b)]
        b: BExponent,
        #[arg(long, value_parser = parse_points, allow_hyphen_values = true)]
        watchpoints: PointList,
        #[arg(long, value_parser = parse_alpha)]
        alpha: WalkerConfig,
        #[arg(long)]
        steps: usize,
    },
    Walkers {
        #[arg(long, value_parser = parse_b)]
        b: BExponent,
        #[arg(long, value_parser = parse_alpha, value_delimiter = ',', required = true)]
        alphas: Vec<WalkerConfig>,
        #[arg(long)]
        steps: usize,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum MeanValueKindArg {
    /// Σ f_b(n)^r.
    WalkerMoment,
    /// Σ f_{b,s}(n).
    WatchpointsShifted,
}

#[derive(Debug, Subcommand)]
pub enum VerifyCmd {
    /// gcd_b against brute force, its divisor and shear properties,
    /// bi-multiplicativity, symmetry, walk structure and the cardinality bound.
    GcdProperties {
        #[arg(long, default_value_t = 10_000)]
        cases: usize,
        #[arg(long, value_parser = parse_seed, default_value = "1")]
        seed: u64,
    },
    /// The gcd_b criterion against a direct search of the curve.
    VisibilityOracle {
        #[arg(long, value_parser = parse_b)]
        b: BExponent,
        /// Displacements (dx, dy) range over 1..=box in each coordinate.
        #[arg(long = "box", default_value_t = 40)]
        size: i64,
    },
    /// Binomial mass on each residue class mod d against 1/d.
    CongruenceSum {
        #[arg(long, value_parser = parse_alpha)]
        alpha: WalkerConfig,
        #[arg(long)]
        n: u64,
        #[arg(long)]
        d: u64,
        #[arg(long, default_value_t = 0.01)]
        threshold: f64,
    },
    /// Partial sums of f_b^r or f_{b,s} against their main terms.
    MeanValue {
        #[arg(long, value_enum)]
        kind: MeanValueKindArg,
        #[arg(long, value_parser = parse_b)]
        b: BExponent,
        #[arg(long)]
        r: Option<u64>,
        #[arg(long = "J")]
        j: Option<u64>,
        /// Shifts s_1,...,s_J.
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
        shifts: Vec<i64>,
        #[arg(long)]
        x: u64,
        /// Largest accepted |S(x)/x - C|.
        #[arg(long, default_value_t = 0.01)]
        threshold: f64,
    },
}

#[derive(Debug, Args)]
pub struct Table1Args {
    #[arg(long, default_value_t = 100_000)]
    pub steps: usize,
    #[arg(long, default_value_t = 10)]
    pub trials: usize,
    #[arg(long, value_parser = parse_seed, default_value = "1")]
    pub seed: u64,
    #[arg(long, value_parser = parse_alpha, value_delimiter = ',', default_value = "0.5,0.3")]
    pub alphas: Vec<WalkerConfig>,
}

#[derive(Debug, Args)]
pub struct Table2Args {
    /// One exponent pair; both (2,3) and (3,5) when absent.
    #[arg(long, value_parser = parse_b)]
    pub b: Option<BExponent>,
    #[arg(
        long,
        value_delimiter = ',',
        default_value = "2,3,4,5,6,10,20,30,40,50,60,100,200,500,1000"
    )]
    pub rows: Vec<u64>,
    #[arg(long, value_parser = parse_alpha, default_value = "0.5")]
    pub alpha: WalkerConfig,
    #[arg(long, default_value_t = 100_000)]
    pub steps: usize,
    #[arg(long, default_value_t = 10)]
    pub trials: usize,
    #[arg(long, value_parser = parse_seed, default_value = "1")]
    pub seed: u64,
}

pub fn parse_b(s: &str) -> Result<BExponent, String> {
    s.parse().map_err(|e: bvis_core::Error| e.to_string())
}

pub fn parse_alpha(s: &str) -> Result<WalkerConfig, String> {
    let a: f64 = s.trim().parse().map_err(|_| format!("not a number: {s:?}"))?;
    WalkerConfig::new(a).map_err(|e| e.to_string())
}

/// Watchpoints given as one flag value.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PointList(pub Vec<LatticePoint>);

fn parse_points(s: &str) -> Result<PointList, String> {
    parse_point_list(s).map(PointList).map_err(|e| e.to_string())
}

pub fn parse_seed(s: &str) -> Result<u64, String> {
    let s = s.trim();
    let parsed = match s.strip_prefix("0x").or_else(|| s.strip_prefix("0X")) {
        Some(hex) => u64::from_str_radix(hex, 16),
        None => s.parse(),
    };
    parsed.map_err(|_| format!("seed must be a decimal or 0x-hex u64, got {s:?}"))
}

/// Non-negative integer, also in forms like `2e9`.
pub fn parse_count(s: &str) -> Result<u64, String> {
    if let Ok(v) = s.trim().parse::<u64>() {
        return Ok(v);
    }
    let v: f64 = s.trim().parse().map_err(|_| format!("not a count: {s:?}"))?;
    if v >= 0.0 && v.fract() == 0.0 && v < u64::MAX as f64 {
        Ok(v as u64)
    } else {
        Err(format!("not a count: {s:?}"))
    }
}
