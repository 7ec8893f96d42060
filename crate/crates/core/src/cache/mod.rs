//! The cache appearance of the birthday problem: random address-to-set
//! mapping in a k-way set-associative cache.
//!
//! [`model`] holds the analytic results (expected stored count, exact
//! no-conflict probability); [`sim`] is the Monte Carlo random-fill oracle;
//! [`trace`] is the trace-driven LRU simulator for the structured access
//! scenarios.

pub mod model;
pub mod sim;
pub mod trace;

pub use model::{CacheGeometry, OccupancyVector, WorkingSetQuery};
pub use sim::{SimConfig, SimReport};
pub use trace::{AddressStream, PageMapping, Scenario, TraceReport, TraceStats};
