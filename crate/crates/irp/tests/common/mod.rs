//! Independent reference implementations ("oracles") used by the
//! integration and acceptance suites. They deliberately re-derive results
//! from first principles instead of calling the code paths they check.

use irp::archive::ObjectiveVector;
use irp::encoding::{max_feasible_period, max_feasible_start, DeliverySchedule, Genotype};
use irp::instance::{DistanceMatrix, Instance};
use rand::Rng;

/// Day-by-day inventory simulation, written against the schedule alone.
///
/// Accumulates per customer over dates 1..=H, then across customers in id
/// order. Returns the holding cost, or the first (customer id, date) whose
/// level drops below -1e-9.
pub fn oracle_holding(
    inst: &Instance,
    schedule: &DeliverySchedule,
) -> Result<f64, (usize, u32)> {
    let mut total = 0.0;
    for (idx, customer) in inst.customers.iter().enumerate() {
        let mut level = customer.initial_inventory;
        let mut per_customer = 0.0;
        for date in 1..=inst.horizon {
            level += schedule.quantity(idx, date);
            level -= customer.consumption;
            if level < -1e-9 {
                return Err((idx + 1, date));
            }
            per_customer += level;
        }
        total += per_customer;
    }
    Ok(total)
}

/// End-of-horizon level of one customer under plain simulation.
pub fn oracle_final_level(inst: &Instance, schedule: &DeliverySchedule, idx: usize) -> f64 {
    let customer = &inst.customers[idx];
    let mut level = customer.initial_inventory;
    for date in 1..=inst.horizon {
        level += schedule.quantity(idx, date);
        level -= customer.consumption;
    }
    level
}

/// Exact optimal CVRP cost by dynamic programming: Held-Karp tours over
/// every customer subset, then an optimal partition into capacity-feasible
/// routes. Only for small days (<= ~12 customers).
pub fn oracle_cvrp_cost(demands: &[(usize, f64)], dmat: &DistanceMatrix, capacity: f64) -> f64 {
    let m = demands.len();
    assert!(m <= 12, "oracle is exponential; keep days small");
    if m == 0 {
        return 0.0;
    }
    let full = 1usize << m;

    // dp[mask][last]: cheapest depot-started path visiting mask, ending at last.
    let mut dp = vec![vec![f64::INFINITY; m]; full];
    for a in 0..m {
        dp[1 << a][a] = dmat.dist(0, demands[a].0);
    }
    for mask in 1..full {
        for last in 0..m {
            let cur = dp[mask][last];
            if !cur.is_finite() || mask & (1 << last) == 0 {
                continue;
            }
            for next in 0..m {
                if mask & (1 << next) != 0 {
                    continue;
                }
                let cost = cur + dmat.dist(demands[last].0, demands[next].0);
                let entry = &mut dp[mask | (1 << next)][next];
                if cost < *entry {
                    *entry = cost;
                }
            }
        }
    }

    // tour[mask]: optimal closed tour over mask, infinity if load exceeds
    // capacity.
    let mut load = vec![0.0; full];
    let mut tour = vec![f64::INFINITY; full];
    tour[0] = 0.0;
    for mask in 1..full {
        let lowest = mask.trailing_zeros() as usize;
        load[mask] = load[mask & (mask - 1)] + demands[lowest].1;
        if load[mask] > capacity + 1e-9 {
            continue;
        }
        let mut best = f64::INFINITY;
        for last in 0..m {
            if mask & (1 << last) != 0 {
                best = best.min(dp[mask][last] + dmat.dist(demands[last].0, 0));
            }
        }
        tour[mask] = best;
    }

    // part[mask]: optimal cost of covering mask with feasible tours. The
    // submask containing the lowest bit is canonical, so each partition is
    // counted once.
    let mut part = vec![f64::INFINITY; full];
    part[0] = 0.0;
    for mask in 1..full {
        let low = mask & mask.wrapping_neg();
        let mut sub = mask;
        let mut best = f64::INFINITY;
        while sub > 0 {
            if sub & low != 0 && tour[sub].is_finite() && part[mask ^ sub].is_finite() {
                let candidate = tour[sub] + part[mask ^ sub];
                best = best.min(candidate);
            }
            sub = (sub - 1) & mask;
        }
        part[mask] = best;
    }
    part[full - 1]
}

/// O(m^2) non-dominated filter with first-seen deduplication at the
/// archive's tolerance; the reference for archive equivalence.
pub fn oracle_front(stream: &[ObjectiveVector]) -> Vec<ObjectiveVector> {
    let mut kept: Vec<ObjectiveVector> = Vec::new();
    for (i, candidate) in stream.iter().enumerate() {
        let dominated = stream
            .iter()
            .enumerate()
            .any(|(j, other)| j != i && other.dominates(candidate));
        if dominated {
            continue;
        }
        if kept.iter().any(|k| k.approx_eq(candidate)) {
            continue;
        }
        kept.push(*candidate);
    }
    kept
}

/// Monte Carlo estimate of the area dominated by `front` inside the box
/// spanned by the front minima and the reference point. Returns the
/// estimate and its standard error.
pub fn monte_carlo_hypervolume<R: Rng>(
    front: &[ObjectiveVector],
    reference: ObjectiveVector,
    samples: u32,
    rng: &mut R,
) -> (f64, f64) {
    let low_h = front.iter().map(|p| p.holding).fold(f64::INFINITY, f64::min);
    let low_r = front.iter().map(|p| p.routing).fold(f64::INFINITY, f64::min);
    let width = reference.holding - low_h;
    let height = reference.routing - low_r;
    if width <= 0.0 || height <= 0.0 {
        return (0.0, 0.0);
    }
    let area = width * height;
    let mut hits = 0u32;
    for _ in 0..samples {
        let qh = rng.random_range(low_h..reference.holding);
        let qr = rng.random_range(low_r..reference.routing);
        if front.iter().any(|p| p.holding <= qh && p.routing <= qr) {
            hits += 1;
        }
    }
    let fraction = hits as f64 / samples as f64;
    let se = area * (fraction * (1.0 - fraction) / samples as f64).sqrt();
    (area * fraction, se)
}

/// Uniformly random genotype satisfying every invariant of the instance.
pub fn random_genotype<R: Rng>(inst: &Instance, dated: bool, rng: &mut R) -> Genotype {
    let n = inst.customer_count();
    let periods: Vec<u32> = (0..n)
        .map(|idx| rng.random_range(1..=max_feasible_period(inst, idx).unwrap()))
        .collect();
    if dated {
        let starts: Vec<u32> = (0..n)
            .map(|idx| rng.random_range(1..=max_feasible_start(inst, idx).unwrap()))
            .collect();
        Genotype::frequency_and_start(periods, starts)
    } else {
        Genotype::frequency_only(periods)
    }
}
