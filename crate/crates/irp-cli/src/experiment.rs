//! The `compare` subcommand: runs the cross product of instances,
//! representations, selection strategies, duplicate policies and seeds
//! under a shared budget rule, then scores every run against per-instance
//! reference data.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::PathBuf;

use clap::Args;
use rayon::prelude::*;

use irp::archive::ObjectiveVector;
use irp::instance::{generate_instance, read_instance, GeneratorParams, Instance};
use irp::metrics::{epsilon_additive, hypervolume_2d, non_dominated_union, reference_point};
use irp::search::{run, SearchConfig, SearchOutcome};

use crate::output::{write_atomic, UserError};
use crate::{DupArg, ReprArg, StrategyArg};

#[derive(Args)]
pub struct CompareArgs {
    /// Experiment config file (key-value lines; flags take precedence).
    #[arg(long)]
    config: Option<PathBuf>,
    /// Instance file; repeatable.
    #[arg(long = "instance")]
    instances: Vec<PathBuf>,
    /// Generate instances with this many customers; repeatable.
    #[arg(long = "gen-n")]
    gen_n: Vec<usize>,
    /// Generated instances per --gen-n value.
    #[arg(long)]
    gen_count: Option<u64>,
    #[arg(long)]
    gen_horizon: Option<u32>,
    /// Base seed for generated instances (instance i uses base + i).
    #[arg(long)]
    gen_seed: Option<u64>,
    /// Representations to compare.
    #[arg(long = "repr", value_enum)]
    reprs: Vec<ReprArg>,
    /// Selection strategies to compare.
    #[arg(long = "strategy", value_enum)]
    strategies: Vec<StrategyArg>,
    /// Duplicate-elimination policies to compare.
    #[arg(long = "dup", value_enum)]
    dups: Vec<DupArg>,
    /// Working solutions per iteration.
    #[arg(long)]
    r: Option<usize>,
    /// Absolute evaluation budget.
    #[arg(long, conflicts_with = "k")]
    budget: Option<u64>,
    /// Budget rule ev = 4 n^2 R k.
    #[arg(long)]
    k: Option<u64>,
    /// Run seeds; repeatable or comma separated.
    #[arg(long = "seeds", value_delimiter = ',')]
    seeds: Vec<u64>,
    #[arg(long)]
    initial_random: Option<usize>,
    /// Metric checkpoint spacing in budget units (default: budget / 10).
    #[arg(long)]
    trace_every: Option<u64>,
    #[arg(long)]
    out_dir: PathBuf,
}

#[derive(Debug, Clone, Copy)]
struct GenSpec {
    n: usize,
    horizon: u32,
    count: u64,
    seed_base: u64,
}

/// Budget rule: either a fixed number of units or `4 n^2 R k`.
#[derive(Debug, Clone, Copy)]
enum BudgetRule {
    Absolute(u64),
    ConstantK(u64),
}

impl BudgetRule {
    fn budget(&self, n: usize, r: usize) -> u64 {
        match *self {
            BudgetRule::Absolute(ev) => ev,
            BudgetRule::ConstantK(k) => 4 * (n as u64) * (n as u64) * (r as u64) * k,
        }
    }
}

struct Experiment {
    instances: Vec<Instance>,
    reprs: Vec<ReprArg>,
    strategies: Vec<StrategyArg>,
    dups: Vec<DupArg>,
    r: usize,
    budget_rule: BudgetRule,
    seeds: Vec<u64>,
    initial_random: usize,
    trace_every: Option<u64>,
    out_dir: PathBuf,
}

/// Values read from an experiment config file; every field optional so
/// flags can fill the gaps.
#[derive(Debug, Default)]
struct FileConfig {
    instances: Vec<PathBuf>,
    gens: Vec<GenSpec>,
    reprs: Vec<ReprArg>,
    strategies: Vec<StrategyArg>,
    dups: Vec<DupArg>,
    r: Option<usize>,
    budget: Option<u64>,
    k: Option<u64>,
    seeds: Vec<u64>,
    initial_random: Option<usize>,
    trace_every: Option<u64>,
}

fn parse_config_file(text: &str) -> Result<FileConfig, String> {
    let mut config = FileConfig::default();
    for (idx, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let lineno = idx + 1;
        let mut parts = line.split_whitespace();
        let key = parts.next().unwrap_or("");
        let values: Vec<&str> = parts.collect();
        let one = |what: &str| -> Result<&str, String> {
            if values.len() == 1 {
                Ok(values[0])
            } else {
                Err(format!("line {lineno}: {what} needs exactly one value"))
            }
        };
        match key {
            "INSTANCE" => config.instances.push(PathBuf::from(one("INSTANCE")?)),
            "GEN" => {
                if values.len() != 4 {
                    return Err(format!("line {lineno}: GEN needs <n> <horizon> <count> <seed>"));
                }
                config.gens.push(GenSpec {
                    n: values[0].parse().map_err(|_| format!("line {lineno}: bad n"))?,
                    horizon: values[1].parse().map_err(|_| format!("line {lineno}: bad horizon"))?,
                    count: values[2].parse().map_err(|_| format!("line {lineno}: bad count"))?,
                    seed_base: values[3].parse().map_err(|_| format!("line {lineno}: bad seed"))?,
                });
            }
            "REPR" => {
                for v in &values {
                    config.reprs.push(match *v {
                        "freq" => ReprArg::Freq,
                        "dated" => ReprArg::Dated,
                        other => return Err(format!("line {lineno}: unknown repr `{other}`")),
                    });
                }
            }
            "STRATEGY" => {
                for v in &values {
                    config.strategies.push(match *v {
                        "refpoints" => StrategyArg::Refpoints,
                        "crowding" => StrategyArg::Crowding,
                        other => return Err(format!("line {lineno}: unknown strategy `{other}`")),
                    });
                }
            }
            "DUP" => {
                for v in &values {
                    config.dups.push(match *v {
                        "objective" => DupArg::Objective,
                        "decision" => DupArg::Decision,
                        other => return Err(format!("line {lineno}: unknown dup policy `{other}`")),
                    });
                }
            }
            "R" => config.r = Some(one("R")?.parse().map_err(|_| format!("line {lineno}: bad R"))?),
            "BUDGET" => {
                config.budget =
                    Some(one("BUDGET")?.parse().map_err(|_| format!("line {lineno}: bad BUDGET"))?)
            }
            "K" => config.k = Some(one("K")?.parse().map_err(|_| format!("line {lineno}: bad K"))?),
            "SEEDS" => {
                for v in &values {
                    config
                        .seeds
                        .push(v.parse().map_err(|_| format!("line {lineno}: bad seed `{v}`"))?);
                }
            }
            "INITIAL_RANDOM" => {
                config.initial_random = Some(
                    one("INITIAL_RANDOM")?
                        .parse()
                        .map_err(|_| format!("line {lineno}: bad INITIAL_RANDOM"))?,
                )
            }
            "TRACE_EVERY" => {
                config.trace_every = Some(
                    one("TRACE_EVERY")?
                        .parse()
                        .map_err(|_| format!("line {lineno}: bad TRACE_EVERY"))?,
                )
            }
            other => return Err(format!("line {lineno}: unknown key `{other}`")),
        }
    }
    Ok(config)
}

fn resolve(args: CompareArgs) -> Result<Experiment, UserError> {
    let file = match &args.config {
        Some(path) => {
            let text = std::fs::read_to_string(path)
                .map_err(|e| UserError::Data(format!("{}: {e}", path.display())))?;
            parse_config_file(&text)
                .map_err(|e| UserError::Data(format!("{}: {e}", path.display())))?
        }
        None => FileConfig::default(),
    };

    let instance_paths =
        if args.instances.is_empty() { file.instances.clone() } else { args.instances.clone() };
    let gens: Vec<GenSpec> = if args.gen_n.is_empty() {
        file.gens.clone()
    } else {
        args.gen_n
            .iter()
            .map(|&n| GenSpec {
                n,
                horizon: args.gen_horizon.unwrap_or(30),
                count: args.gen_count.unwrap_or(1),
                seed_base: args.gen_seed.unwrap_or(1),
            })
            .collect()
    };

    let mut instances = Vec::new();
    for path in &instance_paths {
        instances.push(
            read_instance(path).map_err(|e| UserError::Data(format!("{}: {e}", path.display())))?,
        );
    }
    for gen in &gens {
        for offset in 0..gen.count {
            instances.push(
                generate_instance(
                    gen.seed_base + offset,
                    gen.n,
                    gen.horizon,
                    &GeneratorParams::default(),
                )
                .map_err(UserError::data)?,
            );
        }
    }
    if instances.is_empty() {
        return Err(UserError::Usage("need at least one instance (--instance or --gen-n)".into()));
    }

    let reprs = if args.reprs.is_empty() { file.reprs } else { args.reprs };
    if reprs.is_empty() {
        return Err(UserError::Usage("need at least one --repr".into()));
    }
    let mut strategies = if args.strategies.is_empty() { file.strategies } else { args.strategies };
    if strategies.is_empty() {
        strategies = vec![StrategyArg::Refpoints];
    }
    let mut dups = if args.dups.is_empty() { file.dups } else { args.dups };
    if dups.is_empty() {
        dups = vec![DupArg::Objective];
    }
    let seeds = if args.seeds.is_empty() { file.seeds } else { args.seeds };
    if seeds.is_empty() {
        return Err(UserError::Usage("need at least one seed (--seeds)".into()));
    }

    let r = args.r.or(file.r).unwrap_or(5);
    if r < 1 {
        return Err(UserError::Usage("--r must be >= 1".into()));
    }
    let budget_rule = match (args.budget.or(file.budget), args.k.or(file.k)) {
        (Some(_), Some(_)) => {
            return Err(UserError::Usage("--budget and --k are mutually exclusive".into()))
        }
        (Some(ev), None) => BudgetRule::Absolute(ev),
        (None, Some(k)) => BudgetRule::ConstantK(k),
        (None, None) => return Err(UserError::Usage("need a budget: --budget or --k".into())),
    };

    Ok(Experiment {
        instances,
        reprs,
        strategies,
        dups,
        r,
        budget_rule,
        seeds,
        initial_random: args.initial_random.or(file.initial_random).unwrap_or(20),
        trace_every: args.trace_every.or(file.trace_every),
        out_dir: args.out_dir,
    })
}

#[derive(Clone, Copy)]
struct RunSpec {
    instance_idx: usize,
    repr: ReprArg,
    strategy: StrategyArg,
    dup: DupArg,
    seed: u64,
    budget: u64,
}

impl RunSpec {
    fn run_id(&self, instances: &[Instance]) -> String {
        let name = sanitize(&instances[self.instance_idx].name);
        format!(
            "{name}_{}_{}_{}_s{}",
            self.repr.label(),
            self.strategy.label(),
            self.dup.label(),
            self.seed
        )
    }
}

fn sanitize(name: &str) -> String {
    name.chars()
        .map(|c| if c.is_ascii_alphanumeric() || c == '-' || c == '.' { c } else { '-' })
        .collect()
}

pub fn cmd_compare(args: CompareArgs) -> Result<(), UserError> {
    let experiment = resolve(args)?;
    let instances = &experiment.instances;

    let mut specs = Vec::new();
    for (instance_idx, inst) in instances.iter().enumerate() {
        let budget = experiment.budget_rule.budget(inst.customer_count(), experiment.r);
        for &repr in &experiment.reprs {
            for &strategy in &experiment.strategies {
                for &dup in &experiment.dups {
                    for &seed in &experiment.seeds {
                        specs.push(RunSpec { instance_idx, repr, strategy, dup, seed, budget });
                    }
                }
            }
        }
    }

    let fronts_dir = experiment.out_dir.join("fronts");
    std::fs::create_dir_all(&fronts_dir).map_err(UserError::data)?;

    // Independent runs in parallel; each front file is written atomically.
    let outcomes: Vec<SearchOutcome> = specs
        .par_iter()
        .map(|spec| -> Result<SearchOutcome, UserError> {
            let inst = &instances[spec.instance_idx];
            let mut config = SearchConfig::new(
                spec.repr.into(),
                spec.strategy.to_strategy(experiment.r),
                spec.budget,
                spec.seed,
            );
            config.initial_random = experiment.initial_random;
            config.duplicate_policy = spec.dup.into();
            config.trace_every =
                Some(experiment.trace_every.unwrap_or_else(|| (spec.budget / 10).max(1)));
            let outcome = run(inst, &config).map_err(UserError::data)?;
            let path = fronts_dir.join(format!("{}.csv", spec.run_id(instances)));
            write_atomic(&path, &outcome.archive.to_csv_string())?;
            Ok(outcome)
        })
        .collect::<Result<Vec<_>, _>>()?;

    // Per-instance reference point and epsilon baseline over the union of
    // final fronts; duplicate-containing archives are reduced to their
    // non-dominated set before scoring.
    let final_fronts: Vec<Vec<ObjectiveVector>> = outcomes
        .iter()
        .map(|o| non_dominated_union(&[&o.archive.objectives()[..]]))
        .collect();
    let mut per_instance: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
    for (run_idx, spec) in specs.iter().enumerate() {
        per_instance.entry(spec.instance_idx).or_default().push(run_idx);
    }
    let mut references = vec![ObjectiveVector::new(0.0, 0.0); instances.len()];
    let mut baselines: Vec<Vec<ObjectiveVector>> = vec![Vec::new(); instances.len()];
    for (&instance_idx, run_idxs) in &per_instance {
        let fronts: Vec<&[ObjectiveVector]> =
            run_idxs.iter().map(|&i| &final_fronts[i][..]).collect();
        references[instance_idx] = reference_point(&fronts);
        baselines[instance_idx] = non_dominated_union(&fronts);
    }

    let mut reference_csv = String::from("instance,ref_z1,ref_z2\n");
    for (instance_idx, inst) in instances.iter().enumerate() {
        let r = references[instance_idx];
        let _ = writeln!(reference_csv, "{},{},{}", inst.name, r.holding, r.routing);
    }
    write_atomic(&experiment.out_dir.join("reference_points.csv"), &reference_csv)?;

    // Metrics per run per checkpoint.
    let mut metrics_csv =
        String::from("run_id,representation,strategy,seed,ev_checkpoint,hypervolume,epsilon,front_size\n");
    let mut final_hv = vec![0.0f64; specs.len()];
    for (run_idx, (spec, outcome)) in specs.iter().zip(&outcomes).enumerate() {
        let run_id = spec.run_id(instances);
        let reference = references[spec.instance_idx];
        let baseline = &baselines[spec.instance_idx];
        for point in &outcome.trace {
            let front = non_dominated_union(&[&point.front[..]]);
            let hv = hypervolume_2d(&front, reference).map_err(UserError::data)?;
            let eps = epsilon_additive(&front, baseline);
            let _ = writeln!(
                metrics_csv,
                "{run_id},{},{},{},{},{},{},{}",
                spec.repr.label(),
                spec.strategy.label(),
                spec.seed,
                point.ev,
                hv,
                eps,
                front.len()
            );
        }
        final_hv[run_idx] =
            hypervolume_2d(&final_fronts[run_idx], reference).map_err(UserError::data)?;
    }
    write_atomic(&experiment.out_dir.join("metrics.csv"), &metrics_csv)?;

    let summary = build_summaries(&experiment, &specs, &final_hv, instances);
    write_atomic(&experiment.out_dir.join("summary.txt"), &summary)?;
    print!("{summary}");
    println!(
        "{} runs, {} front files, metrics at {}",
        specs.len(),
        specs.len(),
        experiment.out_dir.join("metrics.csv").display()
    );
    Ok(())
}

/// Paired win-rate lines for every two-arm comparison present in the
/// experiment, holding everything else fixed.
fn build_summaries(
    experiment: &Experiment,
    specs: &[RunSpec],
    final_hv: &[f64],
    instances: &[Instance],
) -> String {
    let mut out = String::new();
    let lookup = |instance_idx: usize,
                  repr: ReprArg,
                  strategy: StrategyArg,
                  dup: DupArg,
                  seed: u64|
     -> Option<f64> {
        specs.iter().position(|s| {
            s.instance_idx == instance_idx
                && s.repr == repr
                && s.strategy == strategy
                && s.dup == dup
                && s.seed == seed
        })
        .map(|i| final_hv[i])
    };

    if experiment.reprs.contains(&ReprArg::Dated) && experiment.reprs.contains(&ReprArg::Freq) {
        for &strategy in &experiment.strategies {
            for &dup in &experiment.dups {
                let mut wins = 0usize;
                let mut total = 0usize;
                for instance_idx in 0..instances.len() {
                    for &seed in &experiment.seeds {
                        let dated = lookup(instance_idx, ReprArg::Dated, strategy, dup, seed);
                        let freq = lookup(instance_idx, ReprArg::Freq, strategy, dup, seed);
                        if let (Some(d), Some(f)) = (dated, freq) {
                            total += 1;
                            if d >= f {
                                wins += 1;
                            }
                        }
                    }
                }
                if total > 0 {
                    let _ = writeln!(
                        out,
                        "repr dated>=freq hypervolume: {wins}/{total} ({:.1}%) [strategy={} dup={}]",
                        100.0 * wins as f64 / total as f64,
                        strategy.label(),
                        dup.label()
                    );
                }
            }
        }
    }

    if experiment.strategies.contains(&StrategyArg::Refpoints)
        && experiment.strategies.contains(&StrategyArg::Crowding)
    {
        for &repr in &experiment.reprs {
            for &dup in &experiment.dups {
                let mut wins = 0usize;
                let mut total = 0usize;
                for instance_idx in 0..instances.len() {
                    for &seed in &experiment.seeds {
                        let a = lookup(instance_idx, repr, StrategyArg::Refpoints, dup, seed);
                        let b = lookup(instance_idx, repr, StrategyArg::Crowding, dup, seed);
                        if let (Some(a), Some(b)) = (a, b) {
                            total += 1;
                            if a >= b {
                                wins += 1;
                            }
                        }
                    }
                }
                if total > 0 {
                    let _ = writeln!(
                        out,
                        "strategy refpoints>=crowding hypervolume: {wins}/{total} ({:.1}%) [repr={} dup={}]",
                        100.0 * wins as f64 / total as f64,
                        repr.label(),
                        dup.label()
                    );
                }
            }
        }
    }

    if experiment.dups.contains(&DupArg::Objective) && experiment.dups.contains(&DupArg::Decision) {
        for &repr in &experiment.reprs {
            for &strategy in &experiment.strategies {
                let mut wins = 0usize;
                let mut total = 0usize;
                for instance_idx in 0..instances.len() {
                    for &seed in &experiment.seeds {
                        let a = lookup(instance_idx, repr, strategy, DupArg::Objective, seed);
                        let b = lookup(instance_idx, repr, strategy, DupArg::Decision, seed);
                        if let (Some(a), Some(b)) = (a, b) {
                            total += 1;
                            if a >= b {
                                wins += 1;
                            }
                        }
                    }
                }
                if total > 0 {
                    let _ = writeln!(
                        out,
                        "dup objective>=decision hypervolume: {wins}/{total} ({:.1}%) [repr={} strategy={}]",
                        100.0 * wins as f64 / total as f64,
                        repr.label(),
                        strategy.label()
                    );
                }
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn config_file_roundtrip() {
        let text = "\
# experiment
GEN 10 30 2 100
REPR freq dated
STRATEGY refpoints
DUP objective decision
R 4
K 10
SEEDS 1 2 3
INITIAL_RANDOM 15
TRACE_EVERY 500
";
        let config = parse_config_file(text).unwrap();
        assert_eq!(config.gens.len(), 1);
        assert_eq!(config.gens[0].n, 10);
        assert_eq!(config.gens[0].count, 2);
        assert_eq!(config.reprs.len(), 2);
        assert_eq!(config.dups.len(), 2);
        assert_eq!(config.r, Some(4));
        assert_eq!(config.k, Some(10));
        assert_eq!(config.seeds, vec![1, 2, 3]);
        assert_eq!(config.initial_random, Some(15));
        assert_eq!(config.trace_every, Some(500));
    }

    #[test]
    fn config_file_rejects_unknown_key() {
        let err = parse_config_file("NOPE 1\n").unwrap_err();
        assert!(err.contains("unknown key"));
    }

    #[test]
    fn budget_rule_constant_k() {
        let rule = BudgetRule::ConstantK(10);
        assert_eq!(rule.budget(20, 5), 4 * 400 * 5 * 10);
    }
}
