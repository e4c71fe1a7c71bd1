//! Compact solution encodings and their decoding into delivery schedules.
//!
//! A genotype fixes, per customer, the period between visits and (in the
//! dated representation) the date the periodic sequence starts. Quantities
//! are not searched: each visit delivers exactly enough to last until the
//! next one (order-up-to), and a customer is first served no later than the
//! date its initial stock runs out.

use thiserror::Error;

use crate::instance::Instance;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum GenotypeError {
    #[error("customer {customer}: period {period} outside 1..={max}")]
    InvalidPeriod { customer: usize, period: u32, max: u32 },
    #[error("customer {customer}: start {start} outside 1..={max}")]
    InvalidStart { customer: usize, start: u32, max: u32 },
    #[error("customer {customer}: daily consumption exceeds vehicle capacity")]
    Unserviceable { customer: usize },
    #[error("genotype has {got} customers, instance has {expected}")]
    WrongLength { got: usize, expected: usize },
    #[error("genotype representation does not match: expected {expected:?}")]
    WrongRepresentation { expected: Representation },
}

/// Which variables the search manipulates.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Representation {
    /// One period per customer; the first visit lands on the stockout date.
    FrequencyOnly,
    /// Period plus an adjustable starting date per customer.
    FrequencyAndStart,
}

/// A searched solution: per-customer visit period, plus per-customer start
/// date in the dated representation.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Genotype {
    periods: Vec<u32>,
    starts: Option<Vec<u32>>,
}

impl Genotype {
    pub fn frequency_only(periods: Vec<u32>) -> Self {
        Genotype { periods, starts: None }
    }

    pub fn frequency_and_start(periods: Vec<u32>, starts: Vec<u32>) -> Self {
        assert_eq!(periods.len(), starts.len(), "periods and starts must align");
        Genotype { periods, starts: Some(starts) }
    }

    pub fn representation(&self) -> Representation {
        if self.starts.is_some() {
            Representation::FrequencyAndStart
        } else {
            Representation::FrequencyOnly
        }
    }

    pub fn len(&self) -> usize {
        self.periods.len()
    }

    pub fn is_empty(&self) -> bool {
        self.periods.is_empty()
    }

    pub fn periods(&self) -> &[u32] {
        &self.periods
    }

    pub fn starts(&self) -> Option<&[u32]> {
        self.starts.as_deref()
    }

    pub fn period(&self, customer: usize) -> u32 {
        self.periods[customer]
    }

    pub fn start(&self, customer: usize) -> Option<u32> {
        self.starts.as_ref().map(|s| s[customer])
    }

    pub fn set_period(&mut self, customer: usize, period: u32) {
        self.periods[customer] = period;
    }

    pub fn set_start(&mut self, customer: usize, start: u32) {
        self.starts
            .as_mut()
            .expect("genotype has no start dates")[customer] = start;
    }

    /// Checks every invariant against the instance: period in
    /// `1..=max_feasible_period`, start in `1..=max_feasible_start`.
    pub fn validate(&self, inst: &Instance) -> Result<(), GenotypeError> {
        if self.periods.len() != inst.customer_count() {
            return Err(GenotypeError::WrongLength {
                got: self.periods.len(),
                expected: inst.customer_count(),
            });
        }
        for (idx, &p) in self.periods.iter().enumerate() {
            let max = max_feasible_period(inst, idx)?;
            if p < 1 || p > max {
                return Err(GenotypeError::InvalidPeriod { customer: idx + 1, period: p, max });
            }
        }
        if let Some(starts) = &self.starts {
            for (idx, &s) in starts.iter().enumerate() {
                let max = max_feasible_start(inst, idx)?;
                if s < 1 || s > max {
                    return Err(GenotypeError::InvalidStart { customer: idx + 1, start: s, max });
                }
            }
        }
        Ok(())
    }

    /// Compact text form: `p1;...;pn` or `p1;...;pn|s1;...;sn`.
    pub fn to_compact_string(&self) -> String {
        let periods: Vec<String> = self.periods.iter().map(u32::to_string).collect();
        match &self.starts {
            None => periods.join(";"),
            Some(starts) => {
                let starts: Vec<String> = starts.iter().map(u32::to_string).collect();
                format!("{}|{}", periods.join(";"), starts.join(";"))
            }
        }
    }

    pub fn from_compact_string(s: &str) -> Option<Self> {
        fn parse_list(s: &str) -> Option<Vec<u32>> {
            s.split(';').map(|f| f.parse().ok()).collect()
        }
        match s.split_once('|') {
            None => Some(Genotype::frequency_only(parse_list(s)?)),
            Some((p, st)) => {
                let periods = parse_list(p)?;
                let starts = parse_list(st)?;
                (periods.len() == starts.len())
                    .then(|| Genotype::frequency_and_start(periods, starts))
            }
        }
    }
}

/// One delivery: `quantity` units handed over at the start of `date`,
/// before that day's consumption.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Delivery {
    pub date: u32,
    pub quantity: f64,
}

/// Decoded deliveries per customer, sorted by date; only positive quantities
/// are kept.
#[derive(Debug, Clone, PartialEq)]
pub struct DeliverySchedule {
    horizon: u32,
    per_customer: Vec<Vec<Delivery>>,
}

impl DeliverySchedule {
    pub fn horizon(&self) -> u32 {
        self.horizon
    }

    pub fn customer_count(&self) -> usize {
        self.per_customer.len()
    }

    /// Deliveries of customer `idx` (0-based), ordered by date.
    pub fn deliveries(&self, idx: usize) -> &[Delivery] {
        &self.per_customer[idx]
    }

    pub fn visit_dates(&self, idx: usize) -> impl Iterator<Item = u32> + '_ {
        self.per_customer[idx].iter().map(|d| d.date)
    }

    pub fn quantity(&self, idx: usize, date: u32) -> f64 {
        self.per_customer[idx]
            .iter()
            .find(|d| d.date == date)
            .map_or(0.0, |d| d.quantity)
    }

    pub fn is_empty(&self) -> bool {
        self.per_customer.iter().all(Vec::is_empty)
    }

    /// Groups deliveries by date: entry `t` lists `(node id, quantity)` for
    /// all customers served at date `t` (entry 0 is unused).
    pub fn demands_by_date(&self) -> Vec<Vec<(usize, f64)>> {
        let mut by_date = vec![Vec::new(); self.horizon as usize + 1];
        for (idx, deliveries) in self.per_customer.iter().enumerate() {
            for d in deliveries {
                by_date[d.date as usize].push((idx + 1, d.quantity));
            }
        }
        by_date
    }
}

/// First date whose consumption the initial stock cannot cover:
/// `floor(initial / consumption) + 1`.
pub fn stockout_date(inst: &Instance, idx: usize) -> u32 {
    let c = &inst.customers[idx];
    let covered = (c.initial_inventory / c.consumption).floor();
    // Cap well above any horizon; avoids overflow on huge inventories.
    let capped = covered.min(u32::MAX as f64 - 1.0) as u32;
    capped + 1
}

/// Largest period whose order-up-to delivery fits one vehicle:
/// `min(horizon, floor(capacity / consumption))`.
pub fn max_feasible_period(inst: &Instance, idx: usize) -> Result<u32, GenotypeError> {
    let c = &inst.customers[idx];
    if c.consumption > inst.capacity {
        return Err(GenotypeError::Unserviceable { customer: idx + 1 });
    }
    let by_capacity = (inst.capacity / c.consumption).floor().min(inst.horizon as f64);
    Ok(by_capacity as u32)
}

/// Largest start date whose pre-start delivery fits one vehicle:
/// `min(horizon, floor((capacity + initial) / consumption) + 1)`.
///
/// Starting later than this would require a single catch-up delivery larger
/// than the vehicle capacity.
pub fn max_feasible_start(inst: &Instance, idx: usize) -> Result<u32, GenotypeError> {
    let c = &inst.customers[idx];
    if c.consumption > inst.capacity {
        return Err(GenotypeError::Unserviceable { customer: idx + 1 });
    }
    let bound = ((inst.capacity + c.initial_inventory) / c.consumption)
        .floor()
        .min(inst.horizon as f64) as u32;
    Ok((bound + 1).min(inst.horizon))
}

/// Decodes a genotype into a stockout-free delivery schedule.
///
/// Visits run `s, s+p, s+2p, ... <= horizon`. In the frequency-only
/// representation `s` is the stockout date (no visit at all if the initial
/// stock outlasts the horizon). In the dated representation an extra
/// delivery is inserted at the stockout date when it falls before `s`,
/// sized so inventory reaches exactly zero the evening before `s`. Every
/// visit delivers up to the amount consumed until the next visit (or the
/// end of the horizon); zero-quantity visits are dropped.
pub fn decode(genotype: &Genotype, inst: &Instance) -> Result<DeliverySchedule, GenotypeError> {
    genotype.validate(inst)?;
    let horizon = inst.horizon;
    let mut per_customer = Vec::with_capacity(inst.customer_count());

    for (idx, customer) in inst.customers.iter().enumerate() {
        let u = customer.consumption;
        let period = genotype.period(idx);
        let t_star = stockout_date(inst, idx);
        let mut deliveries = Vec::new();

        let start = match genotype.start(idx) {
            Some(s) => s,
            // Frequency-only: first visit right before the stockout.
            None => {
                if t_star > horizon {
                    per_customer.push(deliveries);
                    continue;
                }
                t_star
            }
        };

        // On-hand at the start of the first visit date, before delivery.
        let mut on_hand = customer.initial_inventory - (start - 1) as f64 * u;
        if t_star < start {
            // One catch-up delivery that lands exactly at zero before `start`.
            let quantity = (start - 1) as f64 * u - customer.initial_inventory;
            deliveries.push(Delivery { date: t_star, quantity });
            on_hand = 0.0;
        }

        let mut visit = start;
        while visit <= horizon {
            let next = visit.saturating_add(period);
            let until = next.min(horizon.saturating_add(1));
            let quantity = ((until - visit) as f64 * u - on_hand).max(0.0);
            if quantity > 0.0 {
                deliveries.push(Delivery { date: visit, quantity });
                on_hand = 0.0;
            } else {
                on_hand -= (until - visit) as f64 * u;
            }
            visit = next;
        }
        per_customer.push(deliveries);
    }

    Ok(DeliverySchedule { horizon, per_customer })
}
