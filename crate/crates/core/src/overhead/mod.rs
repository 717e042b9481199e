//! Overhead accounting for neighborhood-aware forwarding.
//!
//! Two costs are tracked, both in messages:
//!
//! * data overhead: the extra transmissions of a multi-hop delivery, `n - 1`;
//! * discovery overhead: the messages of one `T`-bounded discovery wave.
//!
//! A discovery wave starts with one broadcast by the prober. Every node at
//! depth `1..T-1` rebroadcasts once and sends one aggregated reply back;
//! every node at depth exactly `T` only replies. One wave therefore costs
//! `2 * below + at + 1`, where `below` and `at` come from
//! [`TemporalGraph::component_histogram`].
//!
//! When and how often a node probes is decided by a [`ProbingStrategy`];
//! the built-in ones are registered in [`StrategyRegistry::with_defaults`].

mod strategy;

use std::io::{self, Write};

pub use strategy::{
    run_cs, run_ts, ContinuousProbing, ProbeJob, ProbeRun, ProbingStrategy, StrategyConfig, StrategyRegistry,
    TriggeredProbing, DEFAULT_INTERVAL,
};

use crate::error::{Error, Result};
use crate::hop::HopDistance;
use crate::temporal_graph::{HopHistogram, TemporalGraph};
use crate::trace_io::NodeId;

/// Extra transmissions needed to push a message over an `n`-hop path.
pub fn data_overhead(n: HopDistance) -> Result<u32> {
    match n {
        HopDistance::Finite(0) => Err(Error::config("hop count must be at least 1")),
        HopDistance::Finite(n) => Ok(n - 1),
        HopDistance::Infinite => Err(Error::NoPath),
    }
}

pub fn wave_cost(hist: HopHistogram) -> u64 {
    2 * hist.below as u64 + hist.at as u64 + 1
}

/// Messages sent by one discovery wave of depth `t_hops` from `center` at `t`.
pub fn probe_cost(g: &TemporalGraph, t: f64, center: NodeId, t_hops: u32) -> Result<u64> {
    g.component_histogram(t, center, t_hops).map(wave_cost)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProbeEvent {
    pub node: NodeId,
    pub time: f64,
    pub threshold: u32,
    pub cost: u64,
}

/// Time-ordered discovery probes of one node under one strategy.
#[derive(Debug, Clone, PartialEq)]
pub struct OverheadLedger {
    pub node: NodeId,
    pub strategy: &'static str,
    pub threshold: u32,
    pub interval: f64,
    pub events: Vec<ProbeEvent>,
}

impl OverheadLedger {
    pub fn new(node: NodeId, strategy: &'static str, threshold: u32, interval: f64) -> Self {
        OverheadLedger {
            node,
            strategy,
            threshold,
            interval,
            events: Vec::new(),
        }
    }

    pub fn push(&mut self, time: f64, cost: u64) {
        debug_assert!(self.events.last().is_none_or(|e| e.time < time));
        self.events.push(ProbeEvent {
            node: self.node,
            time,
            threshold: self.threshold,
            cost,
        });
    }

    /// Running totals, one per event.
    pub fn cumulative(&self) -> Vec<u64> {
        self.events
            .iter()
            .scan(0u64, |acc, e| {
                *acc += e.cost;
                Some(*acc)
            })
            .collect()
    }

    pub fn total(&self) -> u64 {
        self.events.iter().map(|e| e.cost).sum()
    }
}

/// Writes `node,strategy,T,time,probe_cost,cumulative`, one row per probe.
pub fn write_ledgers_csv<'a>(
    ledgers: impl IntoIterator<Item = &'a OverheadLedger>,
    mut out: impl Write,
) -> io::Result<()> {
    writeln!(out, "node,strategy,T,time,probe_cost,cumulative")?;
    for ledger in ledgers {
        for (e, cum) in ledger.events.iter().zip(ledger.cumulative()) {
            writeln!(
                out,
                "{},{},{},{},{},{}",
                e.node, ledger.strategy, e.threshold, e.time, e.cost, cum
            )?;
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::trace_io::{parse_trace_str, ContactInterval, ContactTrace, TraceFormat};

    fn n(id: u32) -> NodeId {
        NodeId(id)
    }

    fn static_graph(edges: &[(u32, u32)], horizon: f64) -> TemporalGraph {
        let text: String = edges.iter().map(|(a, b)| format!("{a} {b} 0 {horizon}\n")).collect();
        TemporalGraph::build(&parse_trace_str(&text, TraceFormat::Intervals).unwrap())
    }

    #[test]
    fn data_overhead_values() {
        assert_eq!(data_overhead(1.into()).unwrap(), 0);
        assert_eq!(data_overhead(3.into()).unwrap(), 2);
        assert_eq!(data_overhead(5.into()).unwrap(), 4);
        assert!(matches!(data_overhead(HopDistance::Infinite), Err(Error::NoPath)));
        assert!(data_overhead(0.into()).is_err());
    }

    #[test]
    fn four_node_wave_costs_six() {
        // A=1 reaches B=2 and C=3; D=4 sits behind both.
        let g = static_graph(&[(1, 2), (1, 3), (2, 4), (3, 4)], 100.0);
        assert_eq!(probe_cost(&g, 0.0, n(1), 2).unwrap(), 6);
    }

    #[test]
    fn chain_wave() {
        let g = static_graph(&[(1, 2), (2, 3), (3, 4), (4, 5)], 100.0);
        assert_eq!(probe_cost(&g, 0.0, n(1), 3).unwrap(), 6);
        assert_eq!(probe_cost(&g, 0.0, n(1), 1).unwrap(), 2);
    }

    #[test]
    fn lone_node_pays_its_broadcast() {
        let trace = ContactTrace::new([ContactInterval::new(n(1), n(2), 0.0, 5.0)], [n(3)], Some(10.0)).unwrap();
        let g = TemporalGraph::build(&trace);
        for t in 1..6 {
            assert_eq!(probe_cost(&g, 2.0, n(3), t).unwrap(), 1);
        }
        assert!(matches!(probe_cost(&g, 2.0, n(8), 1), Err(Error::UnknownNode(_))));
    }

    #[test]
    fn ledger_csv() {
        let mut ledger = OverheadLedger::new(n(4), "cs", 2, 30.0);
        ledger.push(0.0, 3);
        ledger.push(30.0, 1);
        assert_eq!(ledger.cumulative(), vec![3, 4]);
        let mut out = Vec::new();
        write_ledgers_csv([&ledger], &mut out).unwrap();
        assert_eq!(
            String::from_utf8(out).unwrap(),
            "node,strategy,T,time,probe_cost,cumulative\n4,cs,2,0,3,3\n4,cs,2,30,1,4\n"
        );
    }
}
