//! Command line for the inventory routing toolkit.
//!
//! Subcommands: `generate` (write a random instance file), `solve` (one
//! search run), `compare` (cross-product experiment with metrics) and `hv`
//! (hypervolume of a front CSV).
//!
//! Exit codes: 0 success, 1 usage error, 2 data error.

mod experiment;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::{Args, Parser, Subcommand, ValueEnum};

use irp::archive::{DuplicatePolicy, ObjectiveVector};
use irp::encoding::Representation;
use irp::instance::{generate_instance, read_instance, write_instance, GeneratorParams};
use irp::metrics::hypervolume_2d;
use irp::search::{run, trace_to_csv, SearchConfig};
use irp::selection::SelectionStrategy;

use experiment::CompareArgs;
use output::{write_atomic, UserError};

#[derive(Parser)]
#[command(name = "irp", version, about = "Biobjective inventory routing experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a random instance file.
    Generate(GenerateArgs),
    /// Run one search and dump the front, trace and stats.
    Solve(SolveArgs),
    /// Run a cross product of representations, strategies and seeds.
    Compare(CompareArgs),
    /// Hypervolume of a front CSV.
    Hv(HvArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ReprArg {
    /// Visit period per customer; first visit on the stockout date.
    Freq,
    /// Visit period plus adjustable start date per customer.
    Dated,
}

impl From<ReprArg> for Representation {
    fn from(value: ReprArg) -> Self {
        match value {
            ReprArg::Freq => Representation::FrequencyOnly,
            ReprArg::Dated => Representation::FrequencyAndStart,
        }
    }
}

impl ReprArg {
    pub fn label(self) -> &'static str {
        match self {
            ReprArg::Freq => "freq",
            ReprArg::Dated => "dated",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum StrategyArg {
    Refpoints,
    Crowding,
}

impl StrategyArg {
    pub fn to_strategy(self, count: usize) -> SelectionStrategy {
        match self {
            StrategyArg::Refpoints => SelectionStrategy::reference_points(count),
            StrategyArg::Crowding => SelectionStrategy::crowding_random(count),
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            StrategyArg::Refpoints => "refpoints",
            StrategyArg::Crowding => "crowding",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum DupArg {
    Objective,
    Decision,
}

impl From<DupArg> for DuplicatePolicy {
    fn from(value: DupArg) -> Self {
        match value {
            DupArg::Objective => DuplicatePolicy::ObjectiveSpace,
            DupArg::Decision => DuplicatePolicy::DecisionSpace,
        }
    }
}

impl DupArg {
    pub fn label(self) -> &'static str {
        match self {
            DupArg::Objective => "objective",
            DupArg::Decision => "decision",
        }
    }
}

#[derive(Args)]
struct GenerateArgs {
    /// Output instance file.
    #[arg(long)]
    out: PathBuf,
    #[arg(long)]
    seed: u64,
    /// Number of customers.
    #[arg(long)]
    n: usize,
    /// Planning horizon in days.
    #[arg(long)]
    horizon: u32,
    /// Side of the coordinate square.
    #[arg(long, default_value_t = 100.0)]
    area: f64,
    #[arg(long, default_value_t = 4.0)]
    consumption_min: f64,
    #[arg(long, default_value_t = 10.0)]
    consumption_max: f64,
    /// Initial inventory is uniform in [0, factor * consumption * horizon].
    #[arg(long, default_value_t = 0.25)]
    inventory_factor: f64,
    /// Vehicle capacity as a multiple of the maximum consumption.
    #[arg(long, default_value_t = 3.0)]
    capacity_factor: f64,
    /// Override the generated instance name.
    #[arg(long)]
    name: Option<String>,
}

#[derive(Args)]
struct SolveArgs {
    #[arg(long)]
    instance: PathBuf,
    #[arg(long, value_enum)]
    repr: ReprArg,
    #[arg(long, value_enum, default_value = "refpoints")]
    strategy: StrategyArg,
    /// Working solutions selected per iteration.
    #[arg(long, default_value_t = 5)]
    r: usize,
    /// Evaluation budget.
    #[arg(long)]
    budget: u64,
    #[arg(long)]
    seed: u64,
    /// Random genotypes evaluated during initialization.
    #[arg(long, default_value_t = 20)]
    initial_random: usize,
    /// Duplicate elimination space.
    #[arg(long, value_enum, default_value = "objective")]
    dup: DupArg,
    /// Record the front every this many budget units.
    #[arg(long)]
    trace_every: Option<u64>,
    /// Directory for front.csv, trace.csv and stats.txt.
    #[arg(long)]
    out_dir: PathBuf,
}

#[derive(Args)]
struct HvArgs {
    /// Front CSV (header, then z1,z2[,...] rows).
    #[arg(long)]
    front: PathBuf,
    /// Reference point; defaults to 1.05 x the front maxima.
    #[arg(long, requires = "ref_z2")]
    ref_z1: Option<f64>,
    #[arg(long, requires = "ref_z1")]
    ref_z2: Option<f64>,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(err) => {
            let code = match err.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => 1,
            };
            let _ = err.print();
            return ExitCode::from(code);
        }
    };
    let result = match cli.command {
        Command::Generate(args) => cmd_generate(args),
        Command::Solve(args) => cmd_solve(args),
        Command::Compare(args) => experiment::cmd_compare(args),
        Command::Hv(args) => cmd_hv(args),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(UserError::Usage(message)) => {
            eprintln!("error: {message}");
            ExitCode::from(1)
        }
        Err(UserError::Data(message)) => {
            eprintln!("error: {message}");
            ExitCode::from(2)
        }
    }
}

fn cmd_generate(args: GenerateArgs) -> Result<(), UserError> {
    let params = GeneratorParams {
        area: args.area,
        consumption_min: args.consumption_min,
        consumption_max: args.consumption_max,
        inventory_factor: args.inventory_factor,
        capacity_factor: args.capacity_factor,
    };
    let mut inst = generate_instance(args.seed, args.n, args.horizon, &params)
        .map_err(UserError::data)?;
    if let Some(name) = args.name {
        inst.name = name;
    }
    write_instance(&inst, &args.out).map_err(UserError::data)?;
    println!("{}", args.out.display());
    Ok(())
}

fn cmd_solve(args: SolveArgs) -> Result<(), UserError> {
    let inst = read_instance(&args.instance).map_err(|e| {
        UserError::Data(format!("{}: {e}", args.instance.display()))
    })?;
    if args.r < 1 {
        return Err(UserError::Usage("--r must be >= 1".into()));
    }
    let mut config = SearchConfig::new(
        args.repr.into(),
        args.strategy.to_strategy(args.r),
        args.budget,
        args.seed,
    );
    config.initial_random = args.initial_random;
    config.duplicate_policy = args.dup.into();
    config.trace_every = args.trace_every;

    let outcome = run(&inst, &config).map_err(UserError::data)?;

    std::fs::create_dir_all(&args.out_dir).map_err(UserError::data)?;
    write_atomic(&args.out_dir.join("front.csv"), &outcome.archive.to_csv_string())?;
    write_atomic(&args.out_dir.join("trace.csv"), &trace_to_csv(&outcome.trace))?;
    write_atomic(&args.out_dir.join("stats.txt"), &output::stats_text(&outcome.stats, &outcome.archive))?;
    println!(
        "{}: front size {}, ev {}, evaluations {}, iterations {}",
        inst.name,
        outcome.archive.len(),
        outcome.stats.ev,
        outcome.stats.evaluations,
        outcome.stats.iterations
    );
    Ok(())
}

fn cmd_hv(args: HvArgs) -> Result<(), UserError> {
    let text = std::fs::read_to_string(&args.front)
        .map_err(|e| UserError::Data(format!("{}: {e}", args.front.display())))?;
    let front = parse_front_csv(&text)
        .map_err(|e| UserError::Data(format!("{}: {e}", args.front.display())))?;
    let reference = match (args.ref_z1, args.ref_z2) {
        (Some(h), Some(r)) => ObjectiveVector::new(h, r),
        _ => {
            let r = irp::metrics::reference_point(&[&front]);
            println!("reference {} {}", r.holding, r.routing);
            r
        }
    };
    let hv = hypervolume_2d(&front, reference).map_err(UserError::data)?;
    println!("{hv}");
    Ok(())
}

/// Reads `z1,z2[,...]` rows, skipping one header line.
fn parse_front_csv(text: &str) -> Result<Vec<ObjectiveVector>, String> {
    let mut front = Vec::new();
    for (lineno, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        if line.chars().next().is_some_and(|c| c.is_alphabetic()) {
            continue; // header
        }
        let mut fields = line.split(',');
        let parse = |field: Option<&str>| -> Result<f64, String> {
            field
                .ok_or_else(|| format!("line {}: missing objective value", lineno + 1))?
                .trim()
                .parse()
                .map_err(|_| format!("line {}: cannot parse objective value", lineno + 1))
        };
        let holding = parse(fields.next())?;
        let routing = parse(fields.next())?;
        front.push(ObjectiveVector::new(holding, routing));
    }
    Ok(front)
}
