//! Reference interpreters: satisfaction defined directly over intervals.

pub mod batch;
pub mod qddc;
pub mod secenl;
pub mod table;
pub mod td;
pub mod word;

pub use qddc::{sat_interval, sat_prefixes, sat_word};
pub use table::Table;
pub use word::{TraceError, Word};
pub use secenl::{sat_secenl, sat_secenl_prefixes};
pub use td::{sat_timing_diagram, Split, Valuation};
