//! The Pareto archive: every mutually non-dominated solution found so far,
//! with duplicate elimination. Duplicates are normally detected on
//! objective values; matching on decision variables instead is kept as a
//! comparison baseline.

use std::io::{self, Write};

use crate::encoding::Genotype;

/// Absolute per-objective tolerance for treating two objective vectors as
/// identical.
pub const DUPLICATE_EPS: f64 = 1e-9;

/// A point in objective space; both objectives are minimized.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ObjectiveVector {
    /// Total holding cost.
    pub holding: f64,
    /// Total routing cost.
    pub routing: f64,
}

impl ObjectiveVector {
    pub fn new(holding: f64, routing: f64) -> Self {
        ObjectiveVector { holding, routing }
    }

    /// Strict Pareto dominance: no worse in both objectives, strictly
    /// better in at least one. Exact comparison, no tolerance.
    pub fn dominates(&self, other: &ObjectiveVector) -> bool {
        self.holding <= other.holding
            && self.routing <= other.routing
            && (self.holding < other.holding || self.routing < other.routing)
    }

    /// Identity within [`DUPLICATE_EPS`] per component.
    pub fn approx_eq(&self, other: &ObjectiveVector) -> bool {
        (self.holding - other.holding).abs() <= DUPLICATE_EPS
            && (self.routing - other.routing).abs() <= DUPLICATE_EPS
    }
}

/// A genotype together with its evaluated objectives.
#[derive(Debug, Clone, PartialEq)]
pub struct EvaluatedSolution {
    pub genotype: Genotype,
    pub objectives: ObjectiveVector,
}

/// True iff the two genotypes have identical decision variables. This is a
/// variable-level test: distinct genotypes decoding to the same schedule
/// still count as different.
pub fn decision_space_duplicate(a: &Genotype, b: &Genotype) -> bool {
    a == b
}

/// Where duplicate elimination looks for identity.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum DuplicatePolicy {
    #[default]
    ObjectiveSpace,
    DecisionSpace,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum InsertOutcome {
    /// Candidate joined the archive; `removed` members it dominated left.
    Added { removed: usize },
    RejectedDominated,
    RejectedDuplicate,
}

impl InsertOutcome {
    pub fn accepted(&self) -> bool {
        matches!(self, InsertOutcome::Added { .. })
    }
}

/// Unbounded archive of mutually non-dominated, deduplicated solutions.
#[derive(Debug, Clone, Default)]
pub struct ParetoArchive {
    members: Vec<EvaluatedSolution>,
    policy: DuplicatePolicy,
}

impl ParetoArchive {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn with_policy(policy: DuplicatePolicy) -> Self {
        ParetoArchive { members: Vec::new(), policy }
    }

    pub fn policy(&self) -> DuplicatePolicy {
        self.policy
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn members(&self) -> &[EvaluatedSolution] {
        &self.members
    }

    pub fn iter(&self) -> std::slice::Iter<'_, EvaluatedSolution> {
        self.members.iter()
    }

    pub fn objectives(&self) -> Vec<ObjectiveVector> {
        self.members.iter().map(|m| m.objectives).collect()
    }

    /// Members sorted by holding cost, then routing cost.
    pub fn sorted_members(&self) -> Vec<&EvaluatedSolution> {
        let mut sorted: Vec<&EvaluatedSolution> = self.members.iter().collect();
        sorted.sort_by(|a, b| {
            a.objectives
                .holding
                .total_cmp(&b.objectives.holding)
                .then_with(|| a.objectives.routing.total_cmp(&b.objectives.routing))
        });
        sorted
    }

    fn is_duplicate(&self, candidate: &EvaluatedSolution, member: &EvaluatedSolution) -> bool {
        match self.policy {
            DuplicatePolicy::ObjectiveSpace => candidate.objectives.approx_eq(&member.objectives),
            DuplicatePolicy::DecisionSpace => {
                decision_space_duplicate(&candidate.genotype, &member.genotype)
            }
        }
    }

    /// Inserts a candidate: rejected if some member dominates it or counts
    /// as its duplicate; otherwise it joins and every member it dominates
    /// is dropped.
    pub fn insert(&mut self, candidate: EvaluatedSolution) -> InsertOutcome {
        for member in &self.members {
            if self.is_duplicate(&candidate, member) {
                return InsertOutcome::RejectedDuplicate;
            }
            if member.objectives.dominates(&candidate.objectives) {
                return InsertOutcome::RejectedDominated;
            }
        }
        let before = self.members.len();
        self.members.retain(|m| !candidate.objectives.dominates(&m.objectives));
        let removed = before - self.members.len();
        self.members.push(candidate);
        InsertOutcome::Added { removed }
    }

    /// CSV dump: header `z1,z2,genotype`, members sorted by holding cost.
    pub fn write_csv<W: Write>(&self, mut w: W) -> io::Result<()> {
        writeln!(w, "z1,z2,genotype")?;
        for m in self.sorted_members() {
            writeln!(
                w,
                "{},{},{}",
                m.objectives.holding,
                m.objectives.routing,
                m.genotype.to_compact_string()
            )?;
        }
        Ok(())
    }

    pub fn to_csv_string(&self) -> String {
        let mut buf = Vec::new();
        self.write_csv(&mut buf).expect("writing to a Vec cannot fail");
        String::from_utf8(buf).expect("csv output is utf-8")
    }
}

impl<'a> IntoIterator for &'a ParetoArchive {
    type Item = &'a EvaluatedSolution;
    type IntoIter = std::slice::Iter<'a, EvaluatedSolution>;

    fn into_iter(self) -> Self::IntoIter {
        self.members.iter()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sol(holding: f64, routing: f64) -> EvaluatedSolution {
        EvaluatedSolution {
            genotype: Genotype::frequency_only(vec![1]),
            objectives: ObjectiveVector::new(holding, routing),
        }
    }

    fn sol_g(holding: f64, routing: f64, periods: Vec<u32>) -> EvaluatedSolution {
        EvaluatedSolution {
            genotype: Genotype::frequency_only(periods),
            objectives: ObjectiveVector::new(holding, routing),
        }
    }

    #[test]
    fn dominance_basics() {
        let a = ObjectiveVector::new(1.0, 1.0);
        assert!(a.dominates(&ObjectiveVector::new(2.0, 2.0)));
        let b = ObjectiveVector::new(1.0, 2.0);
        let c = ObjectiveVector::new(2.0, 1.0);
        assert!(!b.dominates(&c));
        assert!(!c.dominates(&b));
        assert!(!a.dominates(&a));
    }

    #[test]
    fn equal_in_one_better_in_other_dominates() {
        let a = ObjectiveVector::new(1.0, 1.0);
        let b = ObjectiveVector::new(1.0, 2.0);
        assert!(a.dominates(&b));
    }

    #[test]
    fn insert_into_empty_archive() {
        let mut archive = ParetoArchive::new();
        assert_eq!(archive.insert(sol(3.0, 4.0)), InsertOutcome::Added { removed: 0 });
        assert_eq!(archive.len(), 1);
    }

    #[test]
    fn duplicate_objectives_rejected() {
        let mut archive = ParetoArchive::new();
        archive.insert(sol(1.0, 5.0));
        archive.insert(sol(5.0, 1.0));
        assert_eq!(archive.insert(sol(1.0, 5.0)), InsertOutcome::RejectedDuplicate);
        assert_eq!(archive.len(), 2);
    }

    #[test]
    fn dominating_candidate_sweeps_archive() {
        let mut archive = ParetoArchive::new();
        archive.insert(sol(1.0, 5.0));
        archive.insert(sol(5.0, 1.0));
        assert_eq!(archive.insert(sol(0.0, 0.0)), InsertOutcome::Added { removed: 2 });
        assert_eq!(archive.len(), 1);
    }

    #[test]
    fn dominated_candidate_rejected() {
        let mut archive = ParetoArchive::new();
        archive.insert(sol(1.0, 1.0));
        assert_eq!(archive.insert(sol(2.0, 2.0)), InsertOutcome::RejectedDominated);
    }

    #[test]
    fn near_duplicate_within_tolerance_rejected() {
        let mut archive = ParetoArchive::new();
        archive.insert(sol(1.0, 1.0));
        assert_eq!(
            archive.insert(sol(1.0 + 5e-10, 1.0 - 5e-10)),
            InsertOutcome::RejectedDuplicate
        );
    }

    #[test]
    fn idempotent_reinsertion() {
        let mut archive = ParetoArchive::new();
        archive.insert(sol(1.0, 5.0));
        archive.insert(sol(5.0, 1.0));
        let before = archive.objectives();
        assert_eq!(archive.insert(sol(5.0, 1.0)), InsertOutcome::RejectedDuplicate);
        assert_eq!(archive.objectives(), before);
    }

    #[test]
    fn decision_space_policy_keeps_objective_twins() {
        let mut archive = ParetoArchive::with_policy(DuplicatePolicy::DecisionSpace);
        archive.insert(sol_g(1.0, 5.0, vec![1, 2]));
        // Same objectives, different variables: kept under this policy.
        assert!(archive.insert(sol_g(1.0, 5.0, vec![2, 1])).accepted());
        // Identical variables: rejected.
        assert_eq!(
            archive.insert(sol_g(0.5, 6.0, vec![1, 2])),
            InsertOutcome::RejectedDuplicate
        );
        assert_eq!(archive.len(), 2);
    }

    #[test]
    fn decision_space_duplicate_is_variable_level() {
        let a = Genotype::frequency_only(vec![2, 3]);
        let b = Genotype::frequency_only(vec![2, 3]);
        let c = Genotype::frequency_only(vec![2, 4]);
        assert!(decision_space_duplicate(&a, &b));
        assert!(!decision_space_duplicate(&a, &c));
    }

    #[test]
    fn genotypes_with_identical_schedules_are_not_decision_duplicates() {
        use crate::encoding::decode;
        use crate::instance::{Customer, Instance};
        // Stock outlasts the horizon, so any start decodes to an empty
        // schedule; the test is still on the variables themselves.
        let inst = Instance::new(
            "t".into(),
            5,
            (0.0, 0.0),
            10.0,
            vec![Customer { id: 1, x: 1.0, y: 0.0, consumption: 1.0, initial_inventory: 50.0 }],
        )
        .unwrap();
        let a = Genotype::frequency_and_start(vec![2], vec![1]);
        let b = Genotype::frequency_and_start(vec![2], vec![2]);
        assert_eq!(decode(&a, &inst).unwrap(), decode(&b, &inst).unwrap());
        assert!(!decision_space_duplicate(&a, &b));
    }

    #[test]
    fn sorted_members_strictly_tradeoff() {
        let mut archive = ParetoArchive::new();
        for (h, r) in [(5.0, 1.0), (1.0, 5.0), (3.0, 3.0), (2.0, 4.0), (4.0, 2.0)] {
            archive.insert(sol(h, r));
        }
        let sorted = archive.sorted_members();
        for pair in sorted.windows(2) {
            assert!(pair[0].objectives.holding < pair[1].objectives.holding);
            assert!(pair[0].objectives.routing > pair[1].objectives.routing);
        }
    }
}

#[cfg(test)]
mod property_tests {
    use super::*;
    use proptest::prelude::*;

    fn sol(holding: f64, routing: f64) -> EvaluatedSolution {
        EvaluatedSolution {
            genotype: Genotype::frequency_only(vec![1]),
            objectives: ObjectiveVector::new(holding, routing),
        }
    }

    /// Reference filter: non-dominated candidates, deduplicated by
    /// tolerance in first-seen order.
    fn brute_force_front(stream: &[(f64, f64)]) -> Vec<(f64, f64)> {
        let vecs: Vec<ObjectiveVector> =
            stream.iter().map(|&(h, r)| ObjectiveVector::new(h, r)).collect();
        let mut kept: Vec<ObjectiveVector> = Vec::new();
        for (i, v) in vecs.iter().enumerate() {
            let dominated = vecs.iter().enumerate().any(|(j, w)| j != i && w.dominates(v));
            if dominated {
                continue;
            }
            if kept.iter().any(|w| w.approx_eq(v)) {
                continue;
            }
            kept.push(*v);
        }
        kept.iter().map(|v| (v.holding, v.routing)).collect()
    }

    fn sorted(mut v: Vec<(f64, f64)>) -> Vec<(f64, f64)> {
        v.sort_by(|a, b| a.0.total_cmp(&b.0).then_with(|| a.1.total_cmp(&b.1)));
        v
    }

    proptest! {
        #[test]
        fn archive_stays_mutually_non_dominated(
            stream in proptest::collection::vec((0u32..50, 0u32..50), 1..60)
        ) {
            let mut archive = ParetoArchive::new();
            for &(h, r) in &stream {
                archive.insert(sol(h as f64, r as f64));
            }
            let members = archive.objectives();
            for (i, a) in members.iter().enumerate() {
                for (j, b) in members.iter().enumerate() {
                    if i != j {
                        prop_assert!(!a.dominates(b));
                        prop_assert!(!a.approx_eq(b));
                    }
                }
            }
        }

        #[test]
        fn archive_equals_brute_force_filter(
            stream in proptest::collection::vec((0u32..50, 0u32..50), 1..60)
        ) {
            let stream: Vec<(f64, f64)> =
                stream.into_iter().map(|(h, r)| (h as f64, r as f64)).collect();
            let mut archive = ParetoArchive::new();
            for &(h, r) in &stream {
                archive.insert(sol(h, r));
            }
            let got: Vec<(f64, f64)> =
                archive.objectives().iter().map(|v| (v.holding, v.routing)).collect();
            prop_assert_eq!(sorted(got), sorted(brute_force_front(&stream)));
        }

        #[test]
        fn insertion_order_does_not_matter(
            stream in proptest::collection::vec((0u32..30, 0u32..30), 1..40),
            rotation in 0usize..40,
        ) {
            // Integer-grid values: no duplicate-tolerance borderline cases.
            let stream: Vec<(f64, f64)> =
                stream.into_iter().map(|(h, r)| (h as f64, r as f64)).collect();
            let mut rotated = stream.clone();
            rotated.rotate_left(rotation % stream.len().max(1));
            let mut a = ParetoArchive::new();
            let mut b = ParetoArchive::new();
            for &(h, r) in &stream {
                a.insert(sol(h, r));
            }
            for &(h, r) in &rotated {
                b.insert(sol(h, r));
            }
            let fa: Vec<(f64, f64)> = a.objectives().iter().map(|v| (v.holding, v.routing)).collect();
            let fb: Vec<(f64, f64)> = b.objectives().iter().map(|v| (v.holding, v.routing)).collect();
            prop_assert_eq!(sorted(fa), sorted(fb));
        }
    }
}
