//! Biobjective inventory routing toolkit.
//!
//! Customers consume stock at a constant daily rate over a finite horizon;
//! deliveries from a central depot refill them. Solutions are encoded
//! compactly — a visit period per customer, optionally with an adjustable
//! starting date — and a fixed order-up-to replenishment rule turns a
//! genotype into a full delivery schedule. Two objectives are minimized
//! together: total holding cost (sum of end-of-day inventory levels) and
//! total routing cost (per-date vehicle tours built by Clarke & Wright
//! savings and improved with 2-Opt).
//!
//! The search keeps an archive of mutually non-dominated solutions, picks a
//! few working solutions per iteration (by reference points or by
//! crowding-distance-weighted sampling), enumerates their one-step
//! neighborhoods and feeds every evaluation back into the archive, until an
//! evaluation budget is spent. [`metrics`] scores the resulting fronts so
//! runs can be compared.

pub mod archive;
pub mod encoding;
pub mod instance;
pub mod inventory;
pub mod metrics;
pub mod routing;
pub mod search;
pub mod selection;

pub use archive::{EvaluatedSolution, InsertOutcome, ObjectiveVector, ParetoArchive};
pub use encoding::{decode, DeliverySchedule, Genotype, Representation};
pub use instance::{build_distance_matrix, DistanceMatrix, Instance};
pub use search::{run, SearchConfig, SearchOutcome};
