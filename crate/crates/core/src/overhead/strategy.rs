use std::sync::Arc;

use super::{probe_cost, OverheadLedger};
use crate::error::{Error, Result};
use crate::hop::HopDistance;
use crate::protocols::{MessageRecord, MessageSpec, Ttl};
use crate::temporal_graph::{Bfs, TemporalGraph};
use crate::trace_io::NodeId;

/// Probing period used when none is configured.
pub const DEFAULT_INTERVAL: f64 = 30.0;

#[derive(Debug, Clone, PartialEq)]
pub struct StrategyConfig {
    /// Registry name, `cs` or `ts` for the built-ins.
    pub strategy: String,
    pub interval: f64,
    pub threshold: u32,
}

impl StrategyConfig {
    pub fn new(strategy: impl Into<String>, threshold: u32) -> Self {
        StrategyConfig {
            strategy: strategy.into(),
            interval: DEFAULT_INTERVAL,
            threshold,
        }
    }

    pub fn with_interval(self, interval: f64) -> Self {
        StrategyConfig { interval, ..self }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.interval > 0.0 && self.interval.is_finite()) {
            return Err(Error::config(format!(
                "probe interval must be positive, got {}",
                self.interval
            )));
        }
        if self.threshold == 0 {
            return Err(Error::config("T must be at least 1"));
        }
        Ok(())
    }
}

/// What a node probes for and over which span.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProbeJob {
    pub node: NodeId,
    /// Destination of the pending message, if any.
    pub destination: Option<NodeId>,
    pub start: f64,
    /// End of the probing window; the horizon when `None`.
    pub end: Option<f64>,
    pub ttl: Ttl,
}

impl ProbeJob {
    pub fn window(node: NodeId, start: f64, end: f64) -> Self {
        ProbeJob {
            node,
            destination: None,
            start,
            end: Some(end),
            ttl: Ttl::Unbounded,
        }
    }

    pub fn message(spec: &MessageSpec) -> Self {
        ProbeJob {
            node: spec.src,
            destination: Some(spec.dst),
            start: spec.created_at,
            end: None,
            ttl: spec.ttl,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ProbeRun {
    pub ledger: OverheadLedger,
    /// Probed delivery outcome for message-driven strategies.
    pub record: Option<MessageRecord>,
}

/// A policy deciding when a node floods discovery waves.
pub trait ProbingStrategy: Send + Sync {
    fn name(&self) -> &'static str;

    /// True when the strategy probes on behalf of a pending message rather
    /// than over a fixed window.
    fn per_message(&self) -> bool {
        false
    }

    fn run(&self, g: &TemporalGraph, job: &ProbeJob, interval: f64, threshold: u32) -> Result<ProbeRun>;
}

/// Probe times `start, start + interval, ...` up to `end` inclusive.
/// Exactly `floor((end - start) / interval) + 1` instants.
fn probe_times(start: f64, end: f64, interval: f64) -> impl Iterator<Item = f64> {
    let count = ((end - start) / interval).floor() as u64 + 1;
    (0..count).map(move |k| (start + k as f64 * interval).min(end))
}

/// Probes at a fixed period over a window, independent of traffic.
#[derive(Debug, Default, Clone, Copy)]
pub struct ContinuousProbing;

impl ProbingStrategy for ContinuousProbing {
    fn name(&self) -> &'static str {
        "cs"
    }

    fn run(&self, g: &TemporalGraph, job: &ProbeJob, interval: f64, threshold: u32) -> Result<ProbeRun> {
        let end = job.end.unwrap_or(g.horizon());
        if !(0.0 <= job.start && job.start <= end && end <= g.horizon()) {
            return Err(Error::config(format!(
                "probe window [{}, {end}] is not inside [0, {}]",
                job.start,
                g.horizon()
            )));
        }
        g.node_index(job.node)?;
        let mut ledger = OverheadLedger::new(job.node, self.name(), threshold, interval);
        for t in probe_times(job.start, end, interval) {
            ledger.push(t, probe_cost(g, t, job.node, threshold)?);
        }
        Ok(ProbeRun { ledger, record: None })
    }
}

/// Probes only while a message is pending: from its creation until the
/// destination shows up within `T` hops, the TTL expires, or the trace ends.
#[derive(Debug, Default, Clone, Copy)]
pub struct TriggeredProbing;

impl ProbingStrategy for TriggeredProbing {
    fn name(&self) -> &'static str {
        "ts"
    }

    fn per_message(&self) -> bool {
        true
    }

    fn run(&self, g: &TemporalGraph, job: &ProbeJob, interval: f64, threshold: u32) -> Result<ProbeRun> {
        let Some(dst) = job.destination else {
            return Err(Error::config("triggered probing needs a message destination"));
        };
        let spec = MessageSpec {
            src: job.node,
            dst,
            created_at: job.start,
            ttl: job.ttl,
            threshold,
        };
        let (s, d) = spec.validate(g)?;
        let limit = job
            .ttl
            .deadline(job.start)
            .min(job.end.unwrap_or(f64::INFINITY))
            .min(g.horizon());

        let mut ledger = OverheadLedger::new(job.node, self.name(), threshold, interval);
        let mut bfs = Bfs::new(g.node_count());
        let mut record = MessageRecord::dropped(spec);
        for t in probe_times(job.start, limit, interval) {
            ledger.push(t, probe_cost(g, t, job.node, threshold)?);
            let Some(epoch) = g.epoch_at(t) else { continue };
            if let HopDistance::Finite(hops) = g.epoch_distance(epoch, s, d, threshold.into(), &mut bfs) {
                record = MessageRecord::delivered(spec, t, hops);
                break;
            }
        }
        Ok(ProbeRun {
            ledger,
            record: Some(record),
        })
    }
}

/// Name-indexed set of probing strategies.
#[derive(Clone)]
pub struct StrategyRegistry {
    strategies: Vec<Arc<dyn ProbingStrategy>>,
}

impl StrategyRegistry {
    pub fn new() -> Self {
        StrategyRegistry { strategies: Vec::new() }
    }

    /// `cs` and `ts`.
    pub fn with_defaults() -> Self {
        let mut registry = Self::new();
        registry.register(Arc::new(ContinuousProbing));
        registry.register(Arc::new(TriggeredProbing));
        registry
    }

    /// Adds a strategy, replacing any previous one with the same name.
    pub fn register(&mut self, strategy: Arc<dyn ProbingStrategy>) {
        self.strategies.retain(|s| s.name() != strategy.name());
        self.strategies.push(strategy);
    }

    pub fn names(&self) -> Vec<&'static str> {
        self.strategies.iter().map(|s| s.name()).collect()
    }

    pub fn get(&self, name: &str) -> Result<Arc<dyn ProbingStrategy>> {
        self.strategies
            .iter()
            .find(|s| s.name() == name)
            .cloned()
            .ok_or_else(|| Error::UnknownName {
                kind: "probing strategy",
                name: name.to_string(),
                available: self.names().join(", "),
            })
    }

    pub fn run(&self, g: &TemporalGraph, cfg: &StrategyConfig, job: &ProbeJob) -> Result<ProbeRun> {
        cfg.validate()?;
        self.get(&cfg.strategy)?.run(g, job, cfg.interval, cfg.threshold)
    }
}

impl Default for StrategyRegistry {
    fn default() -> Self {
        Self::with_defaults()
    }
}

/// Periodic probing of `node` over `[begin, end]`.
pub fn run_cs(g: &TemporalGraph, node: NodeId, cfg: &StrategyConfig, window: (f64, f64)) -> Result<OverheadLedger> {
    cfg.validate()?;
    ContinuousProbing
        .run(
            g,
            &ProbeJob::window(node, window.0, window.1),
            cfg.interval,
            cfg.threshold,
        )
        .map(|run| run.ledger)
}

/// Message-triggered probing; returns the probed delivery record and ledger.
pub fn run_ts(g: &TemporalGraph, spec: &MessageSpec, cfg: &StrategyConfig) -> Result<(MessageRecord, OverheadLedger)> {
    cfg.validate()?;
    if cfg.threshold != spec.threshold {
        return Err(Error::config(format!(
            "strategy T = {} differs from message T = {}",
            cfg.threshold, spec.threshold
        )));
    }
    let run = TriggeredProbing.run(g, &ProbeJob::message(spec), cfg.interval, cfg.threshold)?;
    Ok((run.record.expect("triggered probing yields a record"), run.ledger))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::protocols::{simulate_message, Outcome};
    use crate::trace_io::{parse_trace_str, ContactInterval, ContactTrace, TraceFormat};

    fn n(id: u32) -> NodeId {
        NodeId(id)
    }

    fn graph(text: &str) -> TemporalGraph {
        TemporalGraph::build(&parse_trace_str(text, TraceFormat::Intervals).unwrap())
    }

    fn trace_x() -> TemporalGraph {
        graph("1 2 0 100\n2 3 50 150\n3 4 120 200\n")
    }

    #[test]
    fn cs_on_empty_neighborhood() {
        let trace = ContactTrace::new([ContactInterval::new(n(1), n(2), 0.0, 5.0)], [n(3)], Some(200.0)).unwrap();
        let g = TemporalGraph::build(&trace);
        let ledger = run_cs(&g, n(3), &StrategyConfig::new("cs", 3), (0.0, 90.0)).unwrap();
        let times: Vec<f64> = ledger.events.iter().map(|e| e.time).collect();
        assert_eq!(times, vec![0.0, 30.0, 60.0, 90.0]);
        assert_eq!(ledger.total(), 4);
    }

    #[test]
    fn cs_on_static_square() {
        let g = graph("1 2 0 100\n1 3 0 100\n2 4 0 100\n3 4 0 100\n");
        let ledger = run_cs(&g, n(1), &StrategyConfig::new("cs", 2), (0.0, 60.0)).unwrap();
        assert_eq!(ledger.cumulative(), vec![6, 12, 18]);
    }

    #[test]
    fn cs_rejects_bad_windows() {
        let g = trace_x();
        let cfg = StrategyConfig::new("cs", 1);
        assert!(run_cs(&g, n(1), &cfg, (10.0, 5.0)).is_err());
        assert!(run_cs(&g, n(1), &cfg, (0.0, 500.0)).is_err());
        assert!(run_cs(&g, n(1), &cfg.clone().with_interval(0.0), (0.0, 50.0)).is_err());
    }

    #[test]
    fn ts_delivers_on_first_probe_when_in_contact() {
        let g = trace_x();
        let spec = MessageSpec::new(n(1), n(2), 10.0, 1);
        let (rec, ledger) = run_ts(&g, &spec, &StrategyConfig::new("ts", 1)).unwrap();
        assert_eq!((rec.outcome, rec.waiting_time), (Outcome::Delivered, 0.0));
        assert_eq!(ledger.events.len(), 1);
    }

    #[test]
    fn ts_quantizes_delivery_to_probes() {
        let g = trace_x();
        let spec = MessageSpec::new(n(1), n(3), 0.0, 2);
        let (rec, ledger) = run_ts(&g, &spec, &StrategyConfig::new("ts", 2)).unwrap();
        assert_eq!(rec.waiting_time, 60.0);
        assert_eq!(rec.delivery_hops, Some(2));
        let times: Vec<f64> = ledger.events.iter().map(|e| e.time).collect();
        assert_eq!(times, vec![0.0, 30.0, 60.0]);
        // t=0 and t=30: node 2 below T -> 2*1+0+1; t=60: 2 below, 3 at T -> 2+1+1
        assert_eq!(ledger.cumulative(), vec![3, 6, 10]);
        let oracle = simulate_message(&g, &spec).unwrap();
        assert!(rec.waiting_time >= oracle.waiting_time);
    }

    #[test]
    fn ts_stops_at_ttl() {
        let g = trace_x();
        let spec = MessageSpec::new(n(1), n(4), 0.0, 3).with_ttl(Ttl::Seconds(70.0));
        let (rec, ledger) = run_ts(&g, &spec, &StrategyConfig::new("ts", 3)).unwrap();
        assert_eq!(rec.outcome, Outcome::Dropped);
        assert_eq!(ledger.events.len(), 3);
        // unbounded: stops at the horizon
        let spec = MessageSpec::new(n(1), n(4), 0.0, 3);
        let (_, ledger) = run_ts(&g, &spec, &StrategyConfig::new("ts", 3)).unwrap();
        assert_eq!(ledger.events.last().unwrap().time, 180.0);
    }

    #[test]
    fn ts_threshold_must_match() {
        let g = trace_x();
        let spec = MessageSpec::new(n(1), n(3), 0.0, 2);
        assert!(run_ts(&g, &spec, &StrategyConfig::new("ts", 3)).is_err());
    }

    #[test]
    fn registry_lookup() {
        let registry = StrategyRegistry::with_defaults();
        assert_eq!(registry.names(), vec!["cs", "ts"]);
        assert!(matches!(registry.get("lsr"), Err(Error::UnknownName { .. })));
        let g = trace_x();
        let run = registry
            .run(
                &g,
                &StrategyConfig::new("ts", 2),
                &ProbeJob::message(&MessageSpec::new(n(1), n(3), 0.0, 2)),
            )
            .unwrap();
        assert_eq!(run.record.unwrap().waiting_time, 60.0);
        assert!(registry
            .run(&g, &StrategyConfig::new("ts", 2), &ProbeJob::window(n(1), 0.0, 10.0))
            .is_err());
    }

    #[test]
    fn probe_time_count() {
        assert_eq!(probe_times(0.0, 90.0, 30.0).count(), 4);
        assert_eq!(probe_times(5.0, 5.0, 30.0).count(), 1);
        assert_eq!(probe_times(0.0, 100.0, 7.0).last().unwrap(), 98.0);
    }
}
