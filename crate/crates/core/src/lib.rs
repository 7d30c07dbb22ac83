//! Argumentation-based requirements negotiation.
//!
//! Negotiation logs become Dung attack graphs; accepted requirement sets are
//! computed under grounded or preferred semantics, integrated into a KAOS
//! goal model and verified.

pub mod af;
pub mod attack;
pub mod driver;
pub mod fixtures;
pub mod graph;
pub mod kaos;
pub mod log;
pub mod metrics;
pub mod pipeline;
pub mod providers;
pub mod quality;
pub mod resolve;
pub mod verify;
