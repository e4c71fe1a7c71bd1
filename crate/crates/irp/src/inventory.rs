//! Holding-cost evaluation: forward day-by-day inventory simulation.
//!
//! The holding objective is the sum of end-of-day inventory levels over all
//! customers and all dates 1..=H (the starting stock at date 0 does not
//! count). Evaluation is linear in `horizon * customers`.

use thiserror::Error;

use crate::encoding::DeliverySchedule;
use crate::instance::Instance;

/// Absolute tolerance on inventory non-negativity; guards against
/// floating-point drift in long accumulations.
pub const FEASIBILITY_EPS: f64 = 1e-9;

#[derive(Debug, Error, PartialEq)]
#[error("customer {customer} stocks out at date {date} (level {level})")]
pub struct StockoutError {
    /// 1-based customer id.
    pub customer: usize,
    pub date: u32,
    pub level: f64,
}

/// End-of-day inventory levels per customer, dates 0..=H (index 0 is the
/// initial stock).
#[derive(Debug, Clone, PartialEq)]
pub struct InventoryTrace {
    levels: Vec<Vec<f64>>,
}

impl InventoryTrace {
    /// Level of customer `idx` (0-based) at the end of `date` (0..=H).
    pub fn level(&self, idx: usize, date: u32) -> f64 {
        self.levels[idx][date as usize]
    }

    pub fn customer_levels(&self, idx: usize) -> &[f64] {
        &self.levels[idx]
    }

    pub fn min_level(&self) -> f64 {
        self.levels
            .iter()
            .flat_map(|l| l.iter().copied())
            .fold(f64::INFINITY, f64::min)
    }

    /// Sum of levels over dates 1..=H, accumulated per customer and then
    /// across customers in id order (the same order `evaluate_holding` uses).
    pub fn holding_sum(&self) -> f64 {
        let mut total = 0.0;
        for levels in &self.levels {
            let mut per_customer = 0.0;
            for &level in &levels[1..] {
                per_customer += level;
            }
            total += per_customer;
        }
        total
    }
}

/// Runs the recurrence `L[t] = L[t-1] + q[t] - u` (delivery before
/// consumption) and returns the full trace. Negative levels are reported in
/// the trace, never rejected.
pub fn simulate_trace(schedule: &DeliverySchedule, inst: &Instance) -> InventoryTrace {
    let h = inst.horizon;
    let mut levels = Vec::with_capacity(inst.customer_count());
    for (idx, customer) in inst.customers.iter().enumerate() {
        let mut trace = Vec::with_capacity(h as usize + 1);
        let mut level = customer.initial_inventory;
        trace.push(level);
        let mut deliveries = schedule.deliveries(idx).iter().peekable();
        for date in 1..=h {
            if let Some(d) = deliveries.peek() {
                if d.date == date {
                    level += d.quantity;
                    deliveries.next();
                }
            }
            level -= customer.consumption;
            trace.push(level);
        }
        levels.push(trace);
    }
    InventoryTrace { levels }
}

/// Holding cost of a schedule: the sum of end-of-day levels over dates
/// 1..=H and all customers. Fails on the first level below the feasibility
/// tolerance, naming the customer and date.
pub fn evaluate_holding(schedule: &DeliverySchedule, inst: &Instance) -> Result<f64, StockoutError> {
    let h = inst.horizon;
    let mut total = 0.0;
    for (idx, customer) in inst.customers.iter().enumerate() {
        let mut level = customer.initial_inventory;
        let mut per_customer = 0.0;
        let mut deliveries = schedule.deliveries(idx).iter().peekable();
        for date in 1..=h {
            if let Some(d) = deliveries.peek() {
                if d.date == date {
                    level += d.quantity;
                    deliveries.next();
                }
            }
            level -= customer.consumption;
            if level < -FEASIBILITY_EPS {
                return Err(StockoutError { customer: idx + 1, date, level });
            }
            per_customer += level;
        }
        total += per_customer;
    }
    Ok(total)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::encoding::{decode, Genotype};
    use crate::instance::{Customer, Instance};

    fn single_customer_instance(h: u32, q: f64, u: f64, i0: f64) -> Instance {
        Instance::new(
            "t".into(),
            h,
            (0.0, 0.0),
            q,
            vec![Customer { id: 1, x: 1.0, y: 0.0, consumption: u, initial_inventory: i0 }],
        )
        .unwrap()
    }

    #[test]
    fn just_in_time_daily_delivery_costs_nothing() {
        let inst = single_customer_instance(3, 10.0, 1.0, 0.0);
        let schedule = decode(&Genotype::frequency_only(vec![1]), &inst).unwrap();
        assert_eq!(evaluate_holding(&schedule, &inst).unwrap(), 0.0);
    }

    #[test]
    fn single_big_delivery_arithmetic_series() {
        // One delivery of 3 at date 1 leaves levels (2, 1, 0): cost 3.
        let inst = single_customer_instance(3, 10.0, 1.0, 0.0);
        let schedule = decode(&Genotype::frequency_only(vec![3]), &inst).unwrap();
        assert_eq!(evaluate_holding(&schedule, &inst).unwrap(), 3.0);
        let trace = simulate_trace(&schedule, &inst);
        assert_eq!(trace.customer_levels(0), &[0.0, 2.0, 1.0, 0.0]);
    }

    #[test]
    fn holding_matches_trace_sum_exactly() {
        let inst = single_customer_instance(6, 10.0, 2.0, 5.0);
        let schedule = decode(&Genotype::frequency_only(vec![2]), &inst).unwrap();
        let z1 = evaluate_holding(&schedule, &inst).unwrap();
        let trace = simulate_trace(&schedule, &inst);
        assert_eq!(z1, trace.holding_sum());
    }

    #[test]
    fn stockout_error_names_customer_and_date() {
        // No deliveries, no stock: negative on day 1.
        let inst = Instance::new(
            "t".into(),
            3,
            (0.0, 0.0),
            10.0,
            vec![
                Customer { id: 1, x: 0.0, y: 1.0, consumption: 1.0, initial_inventory: 5.0 },
                Customer { id: 2, x: 1.0, y: 0.0, consumption: 1.0, initial_inventory: 1.0 },
            ],
        )
        .unwrap();
        let schedule = decode(&Genotype::frequency_only(vec![3, 3]), &inst).unwrap();
        // Re-evaluating against a hungrier customer 2 forces the stockout.
        let mut inst2 = inst.clone();
        inst2.customers[1].consumption = 2.0;
        match evaluate_holding(&schedule, &inst2) {
            Err(StockoutError { customer, date, .. }) => {
                assert_eq!(customer, 2);
                assert_eq!(date, 1);
            }
            Ok(v) => panic!("expected stockout, got z1={v}"),
        }
    }

    #[test]
    fn trace_linear_decline_without_deliveries() {
        let inst = single_customer_instance(4, 10.0, 1.0, 4.0);
        // Initial stock covers the horizon, so the decoded schedule is empty.
        let schedule = decode(&Genotype::frequency_only(vec![2]), &inst).unwrap();
        assert!(schedule.is_empty());
        let trace = simulate_trace(&schedule, &inst);
        assert_eq!(trace.customer_levels(0), &[4.0, 3.0, 2.0, 1.0, 0.0]);
    }

    #[test]
    fn all_min_period_cost_is_pre_visit_inventory() {
        // u=2, initial=5: levels before the first visit are (3, 1), then 0.
        let inst = single_customer_instance(6, 10.0, 2.0, 5.0);
        let schedule = decode(&Genotype::frequency_only(vec![1]), &inst).unwrap();
        assert_eq!(evaluate_holding(&schedule, &inst).unwrap(), 4.0);
    }
}
