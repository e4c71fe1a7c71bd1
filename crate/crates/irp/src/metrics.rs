//! Scalar front-quality indicators for comparing runs: exact 2-D
//! hypervolume and the additive epsilon indicator.

use thiserror::Error;

use crate::archive::ObjectiveVector;

#[derive(Debug, Error, PartialEq)]
pub enum MetricsError {
    #[error("front is not mutually non-dominated: point {a:?} dominates {b:?}")]
    NotAFront { a: (f64, f64), b: (f64, f64) },
    #[error("objective values must be finite")]
    NonFinite,
}

/// Front quality relative to a reference point and a baseline front.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FrontMetrics {
    pub hypervolume: f64,
    pub epsilon: f64,
    pub size: usize,
}

fn check_front(front: &[ObjectiveVector]) -> Result<Vec<ObjectiveVector>, MetricsError> {
    if front.iter().any(|p| !p.holding.is_finite() || !p.routing.is_finite()) {
        return Err(MetricsError::NonFinite);
    }
    let mut sorted = front.to_vec();
    sorted.sort_by(|a, b| a.holding.total_cmp(&b.holding).then_with(|| a.routing.total_cmp(&b.routing)));
    for pair in sorted.windows(2) {
        if pair[0].dominates(&pair[1]) || pair[1].dominates(&pair[0]) {
            return Err(MetricsError::NotAFront {
                a: (pair[0].holding, pair[0].routing),
                b: (pair[1].holding, pair[1].routing),
            });
        }
    }
    Ok(sorted)
}

/// Area dominated by `front` and bounded by `reference`, by the standard
/// sweep over the front sorted on the first objective. Exact for two
/// objectives; points that do not strictly dominate the reference point
/// contribute nothing.
pub fn hypervolume_2d(
    front: &[ObjectiveVector],
    reference: ObjectiveVector,
) -> Result<f64, MetricsError> {
    let sorted = check_front(front)?;
    let dominating: Vec<&ObjectiveVector> = sorted
        .iter()
        .filter(|p| p.holding < reference.holding && p.routing < reference.routing)
        .collect();
    let mut area = 0.0;
    for (k, p) in dominating.iter().enumerate() {
        let next_h = if k + 1 < dominating.len() {
            dominating[k + 1].holding
        } else {
            reference.holding
        };
        area += (next_h - p.holding) * (reference.routing - p.routing);
    }
    Ok(area)
}

/// Smallest non-negative shift `e` such that every point of `baseline` is
/// weakly dominated by some point of `front` moved by `+e` in both
/// objectives. Zero iff `front` already weakly dominates `baseline`
/// pointwise; an empty `front` against a non-empty `baseline` gives
/// infinity.
pub fn epsilon_additive(front: &[ObjectiveVector], baseline: &[ObjectiveVector]) -> f64 {
    if baseline.is_empty() {
        return 0.0;
    }
    if front.is_empty() {
        return f64::INFINITY;
    }
    let mut worst = f64::NEG_INFINITY;
    for b in baseline {
        let mut best = f64::INFINITY;
        for a in front {
            let needed = (a.holding - b.holding).max(a.routing - b.routing);
            best = best.min(needed);
        }
        worst = worst.max(best);
    }
    worst.max(0.0)
}

/// Reference point for hypervolume comparisons: 1.05 times the
/// componentwise maximum over every front in the union.
pub fn reference_point(fronts: &[&[ObjectiveVector]]) -> ObjectiveVector {
    let mut h = f64::NEG_INFINITY;
    let mut r = f64::NEG_INFINITY;
    for front in fronts {
        for p in *front {
            h = h.max(p.holding);
            r = r.max(p.routing);
        }
    }
    ObjectiveVector::new(1.05 * h, 1.05 * r)
}

/// Non-dominated, exactly-deduplicated union of several fronts; used as the
/// epsilon baseline in experiments.
pub fn non_dominated_union(fronts: &[&[ObjectiveVector]]) -> Vec<ObjectiveVector> {
    let all: Vec<ObjectiveVector> = fronts.iter().flat_map(|f| f.iter().copied()).collect();
    let mut kept: Vec<ObjectiveVector> = Vec::new();
    for (i, p) in all.iter().enumerate() {
        if all.iter().enumerate().any(|(j, q)| j != i && q.dominates(p)) {
            continue;
        }
        if kept.iter().any(|q| q.holding == p.holding && q.routing == p.routing) {
            continue;
        }
        kept.push(*p);
    }
    kept.sort_by(|a, b| a.holding.total_cmp(&b.holding));
    kept
}

#[cfg(test)]
mod tests {
    use super::*;

    fn v(h: f64, r: f64) -> ObjectiveVector {
        ObjectiveVector::new(h, r)
    }

    #[test]
    fn unit_square_single_point() {
        let hv = hypervolume_2d(&[v(0.0, 0.0)], v(1.0, 1.0)).unwrap();
        assert_eq!(hv, 1.0);
    }

    #[test]
    fn two_overlapping_rectangles() {
        let hv = hypervolume_2d(&[v(0.0, 0.5), v(0.5, 0.0)], v(1.0, 1.0)).unwrap();
        assert_eq!(hv, 0.75);
    }

    #[test]
    fn points_outside_reference_contribute_nothing() {
        let hv = hypervolume_2d(&[v(0.5, 0.5), v(2.0, 0.1)], v(1.0, 1.0)).unwrap();
        assert_eq!(hv, 0.25);
    }

    #[test]
    fn empty_front_zero() {
        assert_eq!(hypervolume_2d(&[], v(1.0, 1.0)).unwrap(), 0.0);
    }

    #[test]
    fn dominated_input_is_an_error() {
        let err = hypervolume_2d(&[v(0.0, 0.0), v(0.5, 0.5)], v(1.0, 1.0)).unwrap_err();
        assert!(matches!(err, MetricsError::NotAFront { .. }));
    }

    #[test]
    fn adding_a_non_dominated_point_grows_hypervolume() {
        let reference = v(10.0, 10.0);
        let base = vec![v(1.0, 5.0), v(5.0, 1.0)];
        let hv_base = hypervolume_2d(&base, reference).unwrap();
        let mut extended = base.clone();
        extended.push(v(2.0, 2.0));
        let hv_ext = hypervolume_2d(&extended, reference).unwrap();
        assert!(hv_ext > hv_base);
    }

    #[test]
    fn hypervolume_is_permutation_invariant() {
        let reference = v(10.0, 10.0);
        let front = vec![v(1.0, 5.0), v(3.0, 3.0), v(5.0, 1.0)];
        let mut shuffled = front.clone();
        shuffled.reverse();
        assert_eq!(
            hypervolume_2d(&front, reference).unwrap(),
            hypervolume_2d(&shuffled, reference).unwrap()
        );
    }

    #[test]
    fn epsilon_identical_fronts() {
        let front = vec![v(1.0, 5.0), v(5.0, 1.0)];
        assert_eq!(epsilon_additive(&front, &front), 0.0);
    }

    #[test]
    fn epsilon_dominating_front_is_zero() {
        assert_eq!(epsilon_additive(&[v(0.0, 0.0)], &[v(1.0, 1.0)]), 0.0);
    }

    #[test]
    fn epsilon_dominated_front_needs_shift() {
        assert_eq!(epsilon_additive(&[v(1.0, 1.0)], &[v(0.0, 0.0)]), 1.0);
    }

    #[test]
    fn epsilon_zero_iff_weakly_dominating() {
        let a = vec![v(1.0, 5.0), v(5.0, 1.0)];
        let b = vec![v(2.0, 5.0), v(5.0, 2.0)];
        assert_eq!(epsilon_additive(&a, &b), 0.0);
        assert!(epsilon_additive(&b, &a) > 0.0);
    }

    #[test]
    fn reference_point_scales_union_max() {
        let f1 = vec![v(1.0, 8.0)];
        let f2 = vec![v(4.0, 2.0)];
        let r = reference_point(&[&f1, &f2]);
        assert_eq!(r, v(1.05 * 4.0, 1.05 * 8.0));
    }

    #[test]
    fn union_filters_dominated_and_duplicates() {
        let f1 = vec![v(1.0, 5.0), v(5.0, 1.0)];
        let f2 = vec![v(1.0, 5.0), v(2.0, 2.0), v(6.0, 6.0)];
        let union = non_dominated_union(&[&f1, &f2]);
        assert_eq!(union, vec![v(1.0, 5.0), v(2.0, 2.0), v(5.0, 1.0)]);
    }
}
