mod commands;
mod report;
mod verify;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use ph3_core::Rational;

#[derive(Parser, Debug)]
#[command(
    name = "ph3-bench",
    version,
    about = "k-copy PH3 bin packing experiments"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Pack one instance with one or more algorithms.
    Pack(PackArgs),
    /// Build and verify the cover for a target ratio.
    Plan(PlanArgs),
    /// Smallest guaranteed ratio for each given number of copies.
    BestRatio(BestRatioArgs),
    /// PH3 against RedBlue for 4..16 bits of advice.
    Table1(Table1Args),
    /// best_ratio(k) for k = 1..k_max.
    Curve(CurveArgs),
    /// Write a tightness instance and its JSON-lines sidecar.
    Adversary(AdversaryArgs),
    /// Run the generator, replay and formula cross-checks over a grid.
    Verify(VerifyArgs),
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum AlgorithmArg {
    Ph3,
    Nf,
    Ff,
    Bf,
    Ffd,
    Kcopy,
}

#[derive(clap::Args, Debug)]
pub struct PackArgs {
    /// Instance file; one size per line, `#` comments.
    pub instance: Option<PathBuf>,
    /// Pack a seeded random instance of this many items instead of a file.
    #[arg(long, conflicts_with = "instance")]
    pub random: Option<usize>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Algorithms to run (repeatable). Defaults to ph3, nf, ff, bf and ffd.
    #[arg(short, long = "algorithm", value_enum)]
    pub algorithms: Vec<AlgorithmArg>,
    /// PH3 routing fraction.
    #[arg(long, default_value = "1/19", value_parser = parse_rational)]
    pub r_l: Rational,
    /// Target ratio of the plan used by `kcopy`.
    #[arg(long, default_value = "1.5815", value_parser = parse_rational)]
    pub ratio: Rational,
    /// Write a per-item routing log (first algorithm only).
    #[arg(long)]
    pub trace: Option<PathBuf>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(clap::Args, Debug)]
pub struct PlanArgs {
    #[arg(long, value_parser = parse_rational)]
    pub ratio: Rational,
    /// Also check cover soundness on this many grid points of [0, 1].
    #[arg(long, default_value_t = 10_000)]
    pub grid: usize,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(clap::Args, Debug)]
pub struct BestRatioArgs {
    /// Number of copies (repeatable).
    #[arg(short, long = "k", required = true)]
    pub k: Vec<usize>,
    #[arg(long, default_value = "1/1000000000", value_parser = parse_rational)]
    pub tol: Rational,
    /// Write the plan for the last k.
    #[arg(long)]
    pub plan_out: Option<PathBuf>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(clap::Args, Debug)]
pub struct Table1Args {
    #[arg(long, default_value = "1/10000000", value_parser = parse_rational)]
    pub tol: Rational,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(clap::Args, Debug)]
pub struct CurveArgs {
    #[arg(long, default_value_t = 64)]
    pub k_max: usize,
    #[arg(long, default_value = "1/1000000000", value_parser = parse_rational)]
    pub tol: Rational,
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Also draw the curve as SVG.
    #[arg(long)]
    pub svg: Option<PathBuf>,
}

#[derive(clap::Args, Debug)]
pub struct AdversaryArgs {
    #[arg(long)]
    pub n: u64,
    #[arg(long, value_parser = parse_rational)]
    pub r_l: Rational,
    #[arg(long, value_parser = parse_rational)]
    pub r_l_star: Rational,
    /// Interval the realized r_L* is expected in; warns when it falls outside.
    #[arg(long, value_parser = parse_rational, requires = "r_max")]
    pub r_min: Option<Rational>,
    #[arg(long, value_parser = parse_rational, requires = "r_min")]
    pub r_max: Option<Rational>,
    /// Instance path; the sidecar goes to `<out>.meta.jsonl`.
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(clap::Args, Debug)]
pub struct VerifyArgs {
    /// JSON config; the default grid is used without one.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Seed for the optional fuzz stage.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Summary CSV.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

fn parse_rational(text: &str) -> Result<Rational, String> {
    Rational::parse(text).map_err(|e| e.to_string())
}

/// Failure classes mapped to exit codes.
#[derive(Debug)]
pub enum Failure {
    Usage(anyhow::Error),
    Verification(String),
}

impl From<anyhow::Error> for Failure {
    fn from(e: anyhow::Error) -> Self {
        match e.downcast_ref::<ph3_core::Error>() {
            Some(ph3_core::Error::Verification(msg)) => Failure::Verification(msg.clone()),
            _ => Failure::Usage(e),
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(1)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    let result = match cli.command {
        Command::Pack(args) => commands::pack(args),
        Command::Plan(args) => commands::plan(args),
        Command::BestRatio(args) => commands::best_ratio(args),
        Command::Table1(args) => commands::table1(args),
        Command::Curve(args) => commands::curve(args),
        Command::Adversary(args) => commands::adversary(args),
        Command::Verify(args) => verify::run(args),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Usage(e)) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
        Err(Failure::Verification(msg)) => {
            eprintln!("verification failed: {msg}");
            ExitCode::from(2)
        }
    }
}
