use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

mod commands;
mod report;

use report::Format;

/// Default seed for `search` when neither `--seed` nor OPM_FIXPOINT_SEED is set.
const DEFAULT_SEED: u64 = 20_100_415;

#[derive(Parser, Debug)]
#[command(
    name = "opm-fixpoint",
    version,
    about = "Coupled fixed points of mixed monotone maps on ordered metric spaces"
)]
struct Cli {
    /// Output format.
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    format: Format,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Check the metric and order axioms and the totality of the map.
    Validate { file: PathBuf },
    /// Check the contractive conditions and mixed monotonicity.
    Check(CheckArgs),
    /// Run the coupled iteration from a start pair.
    Solve(SolveArgs),
    /// List every coupled fixed point of a finite instance.
    Enumerate { file: PathBuf },
    /// Stress the theorem's conclusions on random finite instances.
    Search(SearchArgs),
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum ConditionArg {
    New,
    Classical,
    MixedMonotone,
    Remark,
    All,
}

#[derive(Args, Debug)]
pub struct CheckArgs {
    file: PathBuf,
    #[arg(long, value_enum, default_value_t = ConditionArg::All)]
    condition: ConditionArg,
    /// Grid points per axis when sampling a real vector space.
    #[arg(long, default_value_t = opm_fixpoint::conditions::DEFAULT_GRID_POINTS)]
    grid_points: usize,
    /// Sampling bounds `LO:HI`, once for every axis or once per axis.
    /// Defaults to the space's domain box.
    #[arg(long = "bounds", value_name = "LO:HI", allow_hyphen_values = true)]
    bounds: Vec<String>,
}

#[derive(Args, Debug)]
pub struct SolveArgs {
    file: PathBuf,
    /// Start point: a label, or comma-separated coordinates.
    #[arg(long, allow_hyphen_values = true)]
    x0: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    y0: Option<String>,
    #[arg(long)]
    tol: Option<f64>,
    #[arg(long)]
    max_iter: Option<usize>,
    /// Iterate even if x0 <= F(x0,y0) or y0 >= F(y0,x0) fails.
    #[arg(long)]
    allow_unmet_start: bool,
    /// Write the full trace as JSON.
    #[arg(long)]
    trace_out: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct SearchArgs {
    /// Largest element count.
    #[arg(long, default_value_t = 4)]
    n: usize,
    /// Smallest element count; defaults to min(2, n).
    #[arg(long)]
    min_n: Option<usize>,
    #[arg(long, default_value_t = 100)]
    count: usize,
    #[arg(long, env = "OPM_FIXPOINT_SEED", default_value_t = DEFAULT_SEED)]
    seed: u64,
    /// Append conclusion failures to this JSON-lines file.
    #[arg(long)]
    archive: Option<PathBuf>,
    /// Edge probability of the random order.
    #[arg(long, default_value_t = 0.5)]
    order_density: f64,
    /// Distances are drawn from the multiples of this step up to `--distance-max`.
    #[arg(long, default_value_t = 0.25)]
    distance_step: f64,
    #[arg(long, default_value_t = 4.0)]
    distance_max: f64,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let format = cli.format;
    let result = match cli.command {
        Command::Validate { file } => commands::validate(&file),
        Command::Check(args) => commands::check(&args),
        Command::Solve(args) => commands::solve(&args),
        Command::Enumerate { file } => commands::enumerate(&file),
        Command::Search(args) => commands::search(&args),
    };
    match result {
        Ok(out) => {
            out.print(format);
            ExitCode::from(out.code)
        }
        Err(e) => {
            e.print(format);
            ExitCode::from(e.code)
        }
    }
}
