//! The multiobjective local-search driver.
//!
//! One run: seed the archive with extreme and random genotypes, then loop —
//! select a few working solutions, enumerate their one-step neighborhoods,
//! evaluate every changed neighbor (in parallel, with a canonical insertion
//! order, so results are reproducible regardless of thread count) and insert
//! the results — until the evaluation budget is spent.
//!
//! Budget accounting charges one unit per candidate move of every selected
//! solution (4 per customer with adjustable starts, 2 without), whether or
//! not the move survives range clamping; only surviving moves are actually
//! decoded and evaluated. A full iteration therefore costs exactly
//! `4nR` / `2nR` units whenever selection returns `R` solutions, which is
//! what makes iteration counts comparable across representations.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha12Rng;
use rayon::prelude::*;
use thiserror::Error;

use crate::archive::{DuplicatePolicy, EvaluatedSolution, ObjectiveVector, ParetoArchive};
use crate::encoding::{
    decode, max_feasible_period, max_feasible_start, stockout_date, Genotype, GenotypeError,
    Representation,
};
use crate::instance::{build_distance_matrix, DistanceMatrix, Instance};
use crate::inventory::{evaluate_holding, StockoutError};
use crate::routing::{evaluate_routing, RoutingError};
use crate::selection::{SelectionError, SelectionStrategy};

#[derive(Debug, Error)]
pub enum SearchError {
    #[error(transparent)]
    Genotype(#[from] GenotypeError),
    #[error(transparent)]
    Stockout(#[from] StockoutError),
    #[error(transparent)]
    Routing(#[from] RoutingError),
    #[error(transparent)]
    Selection(#[from] SelectionError),
    #[error("invalid search config: {0}")]
    InvalidConfig(String),
}

/// Everything one search run needs besides the instance.
#[derive(Debug, Clone)]
pub struct SearchConfig {
    pub representation: Representation,
    pub strategy: SelectionStrategy,
    /// Stop once this many budget units are consumed (tested before each
    /// iteration, so the last iteration may overshoot).
    pub budget: u64,
    pub seed: u64,
    /// Random genotypes evaluated during initialization, in addition to the
    /// all-min-period and all-max-period extremes.
    pub initial_random: usize,
    pub duplicate_policy: DuplicatePolicy,
    /// Record the front whenever consumption crosses a multiple of this
    /// many budget units (the final front is always recorded).
    pub trace_every: Option<u64>,
}

impl SearchConfig {
    pub fn new(representation: Representation, strategy: SelectionStrategy, budget: u64, seed: u64) -> Self {
        SearchConfig {
            representation,
            strategy,
            budget,
            seed,
            initial_random: 20,
            duplicate_policy: DuplicatePolicy::ObjectiveSpace,
            trace_every: None,
        }
    }

    fn validate(&self) -> Result<(), SearchError> {
        if self.budget < 1 {
            return Err(SearchError::InvalidConfig("budget must be >= 1".into()));
        }
        if self.strategy.count < 1 {
            return Err(SearchError::InvalidConfig("selection count must be >= 1".into()));
        }
        Ok(())
    }
}

/// Counters from one run.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SearchStats {
    /// Budget units consumed (candidate moves charged, plus one per
    /// initialization evaluation).
    pub ev: u64,
    /// Genotypes actually decoded and evaluated.
    pub evaluations: u64,
    /// Budget units consumed by initialization.
    pub ev_init: u64,
    /// Completed select-explore-insert iterations.
    pub iterations: u64,
    /// Candidate moves charged per selected solution (4n or 2n).
    pub charge_per_solution: u64,
    /// Smallest archive size observed at selection time, if any iteration ran.
    pub min_archive_at_selection: Option<usize>,
}

/// Archive snapshot at a budget checkpoint: objective vectors sorted by
/// holding cost.
#[derive(Debug, Clone, PartialEq)]
pub struct TracePoint {
    pub ev: u64,
    pub front: Vec<ObjectiveVector>,
}

pub type FrontTrace = Vec<TracePoint>;

/// Renders a trace as `ev,z1,z2` CSV rows.
pub fn trace_to_csv(trace: &FrontTrace) -> String {
    let mut out = String::from("ev,z1,z2\n");
    for point in trace {
        for o in &point.front {
            out.push_str(&format!("{},{},{}\n", point.ev, o.holding, o.routing));
        }
    }
    out
}

#[derive(Debug)]
pub struct SearchOutcome {
    pub archive: ParetoArchive,
    pub stats: SearchStats,
    pub trace: FrontTrace,
}

/// Decodes a genotype and scores both objectives.
pub fn evaluate(
    genotype: Genotype,
    inst: &Instance,
    dmat: &DistanceMatrix,
) -> Result<EvaluatedSolution, SearchError> {
    let schedule = decode(&genotype, inst)?;
    let holding = evaluate_holding(&schedule, inst)?;
    let routing = evaluate_routing(&schedule, inst, dmat)?;
    Ok(EvaluatedSolution { genotype, objectives: ObjectiveVector::new(holding, routing) })
}

/// All one-step moves of a genotype: per customer, period +1/-1 and (with
/// the dated representation) start +1/-1, each kept only when it lands in
/// range and changes the genotype. Order is fixed: customer by customer,
/// moves in the order p+1, p-1, s+1, s-1.
pub fn neighborhood(genotype: &Genotype, inst: &Instance) -> Vec<Genotype> {
    let n = genotype.len();
    let dated = genotype.representation() == Representation::FrequencyAndStart;
    let mut neighbors = Vec::with_capacity(if dated { 4 * n } else { 2 * n });
    for idx in 0..n {
        let max_p = match max_feasible_period(inst, idx) {
            Ok(m) => m,
            Err(_) => continue,
        };
        let p = genotype.period(idx);
        if p < max_p {
            let mut g = genotype.clone();
            g.set_period(idx, p + 1);
            neighbors.push(g);
        }
        if p > 1 {
            let mut g = genotype.clone();
            g.set_period(idx, p - 1);
            neighbors.push(g);
        }
        if dated {
            let max_s = match max_feasible_start(inst, idx) {
                Ok(m) => m,
                Err(_) => continue,
            };
            let s = genotype.start(idx).expect("dated genotype has starts");
            if s < max_s {
                let mut g = genotype.clone();
                g.set_start(idx, s + 1);
                neighbors.push(g);
            }
            if s > 1 {
                let mut g = genotype.clone();
                g.set_start(idx, s - 1);
                neighbors.push(g);
            }
        }
    }
    neighbors
}

/// Number of candidate moves charged per selected solution.
pub fn moves_per_solution(representation: Representation, n: usize) -> u64 {
    match representation {
        Representation::FrequencyAndStart => 4 * n as u64,
        Representation::FrequencyOnly => 2 * n as u64,
    }
}

fn clamp_start(inst: &Instance, idx: usize) -> Result<u32, SearchError> {
    let t_star = stockout_date(inst, idx);
    Ok(t_star.min(inst.horizon).min(max_feasible_start(inst, idx)?).max(1))
}

/// The genotypes evaluated during initialization: the all-min-period
/// extreme, the all-max-period extreme (both with starts on the stockout
/// date, clamped into range) and `initial_random` random genotypes.
fn initial_genotypes<R: Rng>(
    inst: &Instance,
    config: &SearchConfig,
    rng: &mut R,
) -> Result<Vec<Genotype>, SearchError> {
    let n = inst.customer_count();
    let dated = config.representation == Representation::FrequencyAndStart;

    let mut max_periods = Vec::with_capacity(n);
    let mut max_starts = Vec::with_capacity(n);
    let mut default_starts = Vec::with_capacity(n);
    for idx in 0..n {
        max_periods.push(max_feasible_period(inst, idx)?);
        max_starts.push(max_feasible_start(inst, idx)?);
        default_starts.push(clamp_start(inst, idx)?);
    }

    let build = |periods: Vec<u32>, starts: Vec<u32>| -> Genotype {
        if dated {
            Genotype::frequency_and_start(periods, starts)
        } else {
            Genotype::frequency_only(periods)
        }
    };

    let mut genotypes = Vec::with_capacity(2 + config.initial_random);
    genotypes.push(build(vec![1; n], default_starts.clone()));
    genotypes.push(build(max_periods.clone(), default_starts));
    for _ in 0..config.initial_random {
        let periods: Vec<u32> = max_periods.iter().map(|&mp| rng.random_range(1..=mp)).collect();
        let starts: Vec<u32> = max_starts.iter().map(|&ms| rng.random_range(1..=ms)).collect();
        genotypes.push(build(periods, starts));
    }
    Ok(genotypes)
}

/// Evaluates and inserts the initial genotypes; every evaluation consumes
/// one budget unit. Returns the archive and the units consumed.
pub fn initialize<R: Rng>(
    inst: &Instance,
    config: &SearchConfig,
    rng: &mut R,
) -> Result<(ParetoArchive, u64), SearchError> {
    let dmat = build_distance_matrix(inst);
    let mut archive = ParetoArchive::with_policy(config.duplicate_policy);
    let genotypes = initial_genotypes(inst, config, rng)?;
    let count = genotypes.len() as u64;
    let evaluated = evaluate_batch(genotypes, inst, &dmat)?;
    for solution in evaluated {
        archive.insert(solution);
    }
    Ok((archive, count))
}

/// Parallel evaluation preserving input order.
fn evaluate_batch(
    genotypes: Vec<Genotype>,
    inst: &Instance,
    dmat: &DistanceMatrix,
) -> Result<Vec<EvaluatedSolution>, SearchError> {
    genotypes
        .into_par_iter()
        .map(|g| evaluate(g, inst, dmat))
        .collect()
}

/// Runs the full search. Deterministic for a fixed config, including under
/// parallel neighbor evaluation.
pub fn run(inst: &Instance, config: &SearchConfig) -> Result<SearchOutcome, SearchError> {
    config.validate()?;
    let dmat = build_distance_matrix(inst);
    let mut rng = ChaCha12Rng::seed_from_u64(config.seed);

    let mut archive = ParetoArchive::with_policy(config.duplicate_policy);
    let init_genotypes = initial_genotypes(inst, config, &mut rng)?;
    let mut evaluations = init_genotypes.len() as u64;
    let mut ev = evaluations;
    for solution in evaluate_batch(init_genotypes, inst, &dmat)? {
        archive.insert(solution);
    }
    let ev_init = ev;

    let mut trace: FrontTrace = Vec::new();
    let record = |ev: u64, archive: &ParetoArchive, trace: &mut FrontTrace| {
        if trace.last().map(|p| p.ev) == Some(ev) {
            return;
        }
        let mut front = archive.objectives();
        front.sort_by(|a, b| a.holding.total_cmp(&b.holding).then_with(|| a.routing.total_cmp(&b.routing)));
        trace.push(TracePoint { ev, front });
    };
    record(ev, &archive, &mut trace);
    let mut next_checkpoint = config.trace_every.map(|step| (ev / step + 1) * step);

    let charge = moves_per_solution(config.representation, inst.customer_count());
    let mut iterations = 0u64;
    let mut min_archive_at_selection: Option<usize> = None;

    while ev < config.budget {
        min_archive_at_selection = Some(
            min_archive_at_selection.map_or(archive.len(), |m| m.min(archive.len())),
        );
        let selected = config.strategy.select(&archive, &mut rng)?;
        ev += charge * selected.len() as u64;

        let mut batch = Vec::new();
        for solution in &selected {
            batch.extend(neighborhood(&solution.genotype, inst));
        }
        evaluations += batch.len() as u64;
        // Parallel evaluation, canonical (selected order, then move order)
        // insertion.
        for solution in evaluate_batch(batch, inst, &dmat)? {
            archive.insert(solution);
        }
        iterations += 1;

        if let (Some(step), Some(cp)) = (config.trace_every, next_checkpoint) {
            if ev >= cp {
                record(ev, &archive, &mut trace);
                next_checkpoint = Some((ev / step + 1) * step);
            }
        }
    }
    record(ev, &archive, &mut trace);

    Ok(SearchOutcome {
        archive,
        stats: SearchStats {
            ev,
            evaluations,
            ev_init,
            iterations,
            charge_per_solution: charge,
            min_archive_at_selection,
        },
        trace,
    })
}
