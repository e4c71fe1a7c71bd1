//! Picks the working solutions for one search iteration from the archive.
//!
//! Two strategies: deterministic matching of archive members to evenly
//! spread reference points in normalized objective space, and random
//! sampling weighted by crowding distance. Both return the whole archive
//! when it has no more members than requested.

use rand::Rng;
use thiserror::Error;

use crate::archive::{EvaluatedSolution, ObjectiveVector, ParetoArchive};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum SelectionError {
    #[error("cannot select from an empty archive")]
    EmptyArchive,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SelectionKind {
    ReferencePoints,
    CrowdingRandom,
}

/// Which strategy, and how many working solutions per iteration.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SelectionStrategy {
    pub kind: SelectionKind,
    pub count: usize,
}

impl SelectionStrategy {
    pub fn reference_points(count: usize) -> Self {
        SelectionStrategy { kind: SelectionKind::ReferencePoints, count }
    }

    pub fn crowding_random(count: usize) -> Self {
        SelectionStrategy { kind: SelectionKind::CrowdingRandom, count }
    }

    pub fn select<R: Rng>(
        &self,
        archive: &ParetoArchive,
        rng: &mut R,
    ) -> Result<Vec<EvaluatedSolution>, SelectionError> {
        match self.kind {
            SelectionKind::ReferencePoints => select_reference_points(archive, self.count),
            SelectionKind::CrowdingRandom => select_crowding_random(archive, self.count, rng),
        }
    }
}

fn normalized(objectives: &[ObjectiveVector]) -> Vec<(f64, f64)> {
    let mut h_min = f64::INFINITY;
    let mut h_max = f64::NEG_INFINITY;
    let mut r_min = f64::INFINITY;
    let mut r_max = f64::NEG_INFINITY;
    for o in objectives {
        h_min = h_min.min(o.holding);
        h_max = h_max.max(o.holding);
        r_min = r_min.min(o.routing);
        r_max = r_max.max(o.routing);
    }
    let scale = |v: f64, min: f64, max: f64| if max > min { (v - min) / (max - min) } else { 0.0 };
    objectives
        .iter()
        .map(|o| (scale(o.holding, h_min, h_max), scale(o.routing, r_min, r_max)))
        .collect()
}

/// Deterministic selection: archive objectives are normalized to the unit
/// square, and for each of `count` reference points evenly spaced on the
/// segment from (0,1) to (1,0) the nearest member is taken (ties by smaller
/// holding, then routing cost, then archive order). A member matched by
/// several reference points appears once, so fewer than `count` solutions
/// may come back. Archives with at most `count` members are returned whole.
pub fn select_reference_points(
    archive: &ParetoArchive,
    count: usize,
) -> Result<Vec<EvaluatedSolution>, SelectionError> {
    if archive.is_empty() {
        return Err(SelectionError::EmptyArchive);
    }
    let members = archive.members();
    if members.len() <= count {
        return Ok(members.to_vec());
    }

    let points = normalized(&archive.objectives());
    let mut chosen_idx: Vec<usize> = Vec::with_capacity(count);
    for k in 1..=count {
        let frac = k as f64 / (count + 1) as f64;
        let ref_point = (frac, 1.0 - frac);
        let mut best = 0usize;
        let mut best_dist = f64::INFINITY;
        for (idx, &(h, r)) in points.iter().enumerate() {
            let dist = (h - ref_point.0).powi(2) + (r - ref_point.1).powi(2);
            let better = dist < best_dist
                || (dist == best_dist && {
                    let b = &members[best].objectives;
                    let c = &members[idx].objectives;
                    c.holding < b.holding || (c.holding == b.holding && c.routing < b.routing)
                });
            if better {
                best = idx;
                best_dist = dist;
            }
        }
        if !chosen_idx.contains(&best) {
            chosen_idx.push(best);
        }
    }
    Ok(chosen_idx.into_iter().map(|i| members[i].clone()).collect())
}

/// NSGA-II crowding distances for one non-dominated front, in input order.
///
/// Members are ranked by holding cost; the two extremes get infinite
/// distance, and each interior member sums, per objective, the gap between
/// its two neighbors divided by that objective's range (zero-range
/// objectives contribute nothing). Permuting the input permutes the output.
pub fn crowding_distances(objectives: &[ObjectiveVector]) -> Vec<f64> {
    let n = objectives.len();
    if n <= 2 {
        return vec![f64::INFINITY; n];
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| {
        objectives[a]
            .holding
            .total_cmp(&objectives[b].holding)
            .then_with(|| objectives[a].routing.total_cmp(&objectives[b].routing))
    });
    let h_range = objectives[order[n - 1]].holding - objectives[order[0]].holding;
    let r_min = objectives.iter().map(|o| o.routing).fold(f64::INFINITY, f64::min);
    let r_max = objectives.iter().map(|o| o.routing).fold(f64::NEG_INFINITY, f64::max);
    let r_range = r_max - r_min;

    let mut distances = vec![0.0; n];
    distances[order[0]] = f64::INFINITY;
    distances[order[n - 1]] = f64::INFINITY;
    for w in 1..(n - 1) {
        let prev = &objectives[order[w - 1]];
        let next = &objectives[order[w + 1]];
        let mut d = 0.0;
        if h_range > 0.0 {
            d += (next.holding - prev.holding) / h_range;
        }
        if r_range > 0.0 {
            // Routing decreases along the holding-sorted front.
            d += (prev.routing - next.routing) / r_range;
        }
        distances[order[w]] = d;
    }
    distances
}

/// Random selection weighted by crowding distance: the boundary members
/// (infinite distance) always make the cut first; remaining slots are
/// filled by sampling without replacement with probability proportional to
/// the finite distances (uniformly, when they are all zero). Archives with
/// at most `count` members are returned whole.
pub fn select_crowding_random<R: Rng>(
    archive: &ParetoArchive,
    count: usize,
    rng: &mut R,
) -> Result<Vec<EvaluatedSolution>, SelectionError> {
    if archive.is_empty() {
        return Err(SelectionError::EmptyArchive);
    }
    let members = archive.members();
    if members.len() <= count {
        return Ok(members.to_vec());
    }

    let distances = crowding_distances(&archive.objectives());
    let mut order: Vec<usize> = (0..members.len()).collect();
    order.sort_by(|&a, &b| {
        members[a]
            .objectives
            .holding
            .total_cmp(&members[b].objectives.holding)
            .then_with(|| members[a].objectives.routing.total_cmp(&members[b].objectives.routing))
    });

    let mut chosen: Vec<usize> = Vec::with_capacity(count);
    for &idx in &order {
        if chosen.len() == count {
            break;
        }
        if distances[idx].is_infinite() {
            chosen.push(idx);
        }
    }

    let mut pool: Vec<usize> = order
        .iter()
        .copied()
        .filter(|&idx| distances[idx].is_finite() && !chosen.contains(&idx))
        .collect();
    while chosen.len() < count && !pool.is_empty() {
        let total: f64 = pool.iter().map(|&idx| distances[idx]).sum();
        let pick_pos = if total > 0.0 {
            let mut threshold = rng.random_range(0.0..total);
            let mut pos = pool.len() - 1;
            for (p, &idx) in pool.iter().enumerate() {
                threshold -= distances[idx];
                if threshold < 0.0 {
                    pos = p;
                    break;
                }
            }
            pos
        } else {
            rng.random_range(0..pool.len())
        };
        chosen.push(pool.remove(pick_pos));
    }

    Ok(chosen.into_iter().map(|i| members[i].clone()).collect())
}
