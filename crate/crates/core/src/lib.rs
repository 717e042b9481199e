//! Contact-trace analysis for disruption-tolerant networks.
//!
//! The crate turns pairwise contact traces into a time-varying graph and
//! answers questions about what a node could achieve if it knew its
//! `T`-hop neighborhood instead of only its direct contacts:
//!
//! * [`trace_io`] reads and writes canonical contact traces.
//! * [`mobility`] generates synthetic traces from pluggable mobility models.
//! * [`temporal_graph`] indexes a trace by epoch and answers snapshot,
//!   distance and neighborhood queries.
//! * [`vicinity`] builds per-pair hop-distance timelines and classifies pairs.
//! * [`protocols`] simulates WAIT and its neighborhood-aware variant.
//! * [`overhead`] accounts for data and discovery overhead under pluggable
//!   probing strategies.
//! * [`experiment`] runs seeded batch experiments and writes report CSVs.

pub mod error;
pub mod experiment;
pub mod hop;
pub mod mobility;
pub mod overhead;
pub mod protocols;
pub mod temporal_graph;
pub mod trace_io;
pub mod vicinity;

pub use error::{Error, Result};
pub use hop::HopDistance;
pub use temporal_graph::TemporalGraph;
pub use trace_io::{ContactInterval, ContactTrace, NodeId};
