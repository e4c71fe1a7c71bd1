//! Routing-cost evaluation. Each date's positive deliveries form a
//! capacitated vehicle routing problem, solved heuristically: parallel
//! Clarke & Wright savings builds the routes, then 2-Opt improves every
//! tour on its own. The routing objective sums the resulting costs over
//! the horizon.

use thiserror::Error;

use crate::encoding::DeliverySchedule;
use crate::instance::{DistanceMatrix, Instance};

/// Slack on route-load capacity checks.
pub const CAPACITY_EPS: f64 = 1e-9;

/// Minimum cost decrease for a 2-Opt move to count as improving; keeps the
/// loop from cycling on floating-point noise.
pub const TWO_OPT_EPS: f64 = 1e-12;

#[derive(Debug, Error, PartialEq)]
pub enum RoutingError {
    #[error("customer {customer}: delivery of {quantity} exceeds vehicle capacity {capacity}")]
    DemandExceedsCapacity { customer: usize, quantity: f64, capacity: f64 },
}

/// One vehicle tour. Stops are node ids (1..=n); the depot at both ends is
/// implicit.
#[derive(Debug, Clone, PartialEq)]
pub struct Route {
    stops: Vec<usize>,
    load: f64,
}

impl Route {
    pub fn new(stops: Vec<usize>, load: f64) -> Self {
        debug_assert!(!stops.is_empty());
        Route { stops, load }
    }

    pub fn stops(&self) -> &[usize] {
        &self.stops
    }

    pub fn load(&self) -> f64 {
        self.load
    }

    /// Depot -> stops -> depot tour length.
    pub fn cost(&self, dmat: &DistanceMatrix) -> f64 {
        let mut total = dmat.dist(0, self.stops[0]);
        for pair in self.stops.windows(2) {
            total += dmat.dist(pair[0], pair[1]);
        }
        total + dmat.dist(*self.stops.last().unwrap(), 0)
    }
}

/// The routes serving one date, with their summed cost.
#[derive(Debug, Clone, PartialEq)]
pub struct DayPlan {
    pub date: u32,
    pub routes: Vec<Route>,
    pub cost: f64,
}

/// Parallel Clarke & Wright savings construction.
///
/// Every customer starts on its own out-and-back route. Pair savings
/// `d(0,i) + d(0,j) - d(i,j)` are processed in decreasing order (ties by
/// ascending pair), and two routes merge at their endpoints whenever `i`
/// and `j` are both endpoints of distinct routes and the combined load fits
/// the vehicle. Deterministic for identical inputs.
pub fn clarke_wright(
    demands: &[(usize, f64)],
    dmat: &DistanceMatrix,
    capacity: f64,
) -> Result<Vec<Route>, RoutingError> {
    for &(customer, quantity) in demands {
        if quantity > capacity {
            return Err(RoutingError::DemandExceedsCapacity { customer, quantity, capacity });
        }
    }
    let m = demands.len();
    if m == 0 {
        return Ok(Vec::new());
    }

    // Pair savings, largest first; ties by ascending (min, max) node id.
    struct Saving {
        value: f64,
        key: (usize, usize),
        a: usize,
        b: usize,
    }
    let mut savings = Vec::with_capacity(m * (m - 1) / 2);
    for a in 0..m {
        for b in (a + 1)..m {
            let (i, _) = demands[a];
            let (j, _) = demands[b];
            let value = dmat.dist(0, i) + dmat.dist(0, j) - dmat.dist(i, j);
            savings.push(Saving { value, key: (i.min(j), i.max(j)), a, b });
        }
    }
    savings.sort_by(|x, y| y.value.total_cmp(&x.value).then_with(|| x.key.cmp(&y.key)));

    // One route slot per customer; merged-away slots become empty.
    let mut route_of: Vec<usize> = (0..m).collect();
    let mut members: Vec<Vec<usize>> = (0..m).map(|a| vec![a]).collect();
    let mut loads: Vec<f64> = demands.iter().map(|&(_, q)| q).collect();

    for &Saving { a, b, .. } in &savings {
        let ra = route_of[a];
        let rb = route_of[b];
        if ra == rb {
            continue;
        }
        if loads[ra] + loads[rb] > capacity + CAPACITY_EPS {
            continue;
        }
        let a_first = members[ra].first() == Some(&a);
        let a_last = members[ra].last() == Some(&a);
        let b_first = members[rb].first() == Some(&b);
        let b_last = members[rb].last() == Some(&b);

        // Join so that a and b become adjacent interior stops.
        let merged: Option<Vec<usize>> = if a_last && b_first {
            let mut v = std::mem::take(&mut members[ra]);
            v.append(&mut members[rb]);
            Some(v)
        } else if b_last && a_first {
            let mut v = std::mem::take(&mut members[rb]);
            v.append(&mut members[ra]);
            Some(v)
        } else if a_last && b_last {
            let mut v = std::mem::take(&mut members[ra]);
            let mut tail = std::mem::take(&mut members[rb]);
            tail.reverse();
            v.append(&mut tail);
            Some(v)
        } else if a_first && b_first {
            let mut v = std::mem::take(&mut members[ra]);
            v.reverse();
            v.append(&mut members[rb]);
            Some(v)
        } else {
            None
        };

        if let Some(v) = merged {
            loads[ra] += loads[rb];
            loads[rb] = 0.0;
            for &idx in &v {
                route_of[idx] = ra;
            }
            members[ra] = v;
            members[rb] = Vec::new();
        }
    }

    let mut routes = Vec::new();
    for (slot, stops) in members.into_iter().enumerate() {
        if stops.is_empty() {
            continue;
        }
        let node_stops: Vec<usize> = stops.into_iter().map(|a| demands[a].0).collect();
        routes.push(Route { stops: node_stops, load: loads[slot] });
    }
    Ok(routes)
}

/// Best-improvement 2-Opt on a single tour: repeatedly reverses the
/// contiguous stop segment whose reversal shortens the tour the most, until
/// no move improves by more than [`TWO_OPT_EPS`]. Ties go to the first
/// `(i, j)` pair in lexicographic order.
pub fn two_opt(route: &Route, dmat: &DistanceMatrix) -> Route {
    let mut stops = route.stops.clone();
    let k = stops.len();
    if k < 2 {
        return route.clone();
    }
    loop {
        let mut best_delta = -TWO_OPT_EPS;
        let mut best: Option<(usize, usize)> = None;
        for i in 0..(k - 1) {
            let before = if i == 0 { 0 } else { stops[i - 1] };
            for j in (i + 1)..k {
                let after = if j == k - 1 { 0 } else { stops[j + 1] };
                let delta = dmat.dist(before, stops[j]) + dmat.dist(stops[i], after)
                    - dmat.dist(before, stops[i])
                    - dmat.dist(stops[j], after);
                if delta < best_delta {
                    best_delta = delta;
                    best = Some((i, j));
                }
            }
        }
        match best {
            Some((i, j)) => stops[i..=j].reverse(),
            None => break,
        }
    }
    Route { stops, load: route.load }
}

/// Routes one date's deliveries: Clarke & Wright, then 2-Opt per tour.
pub fn plan_day(
    date: u32,
    demands: &[(usize, f64)],
    dmat: &DistanceMatrix,
    capacity: f64,
) -> Result<DayPlan, RoutingError> {
    let routes: Vec<Route> = clarke_wright(demands, dmat, capacity)?
        .iter()
        .map(|r| two_opt(r, dmat))
        .collect();
    let cost = routes.iter().map(|r| r.cost(dmat)).sum();
    Ok(DayPlan { date, routes, cost })
}

/// Routing cost of a whole schedule: day costs summed in date order, so the
/// result does not depend on evaluation parallelism. Dates without
/// deliveries contribute nothing.
pub fn evaluate_routing(
    schedule: &DeliverySchedule,
    inst: &Instance,
    dmat: &DistanceMatrix,
) -> Result<f64, RoutingError> {
    let by_date = schedule.demands_by_date();
    let mut total = 0.0;
    for (date, demands) in by_date.iter().enumerate().skip(1) {
        if demands.is_empty() {
            continue;
        }
        total += plan_day(date as u32, demands, dmat, inst.capacity)?.cost;
    }
    Ok(total)
}
