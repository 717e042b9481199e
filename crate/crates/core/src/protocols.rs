//! WAIT and its `T`-neighborhood-aware variant.
//!
//! The source keeps the message until the destination is within `T` hops
//! over a contemporaneous path, then delivers it instantly along that path.
//! With `T = 1` this is plain WAIT. Waiting times are exact: the topology is
//! constant inside an epoch, so the first eligible instant is either the
//! creation time or an epoch start.

use std::collections::BTreeMap;
use std::fmt;
use std::io::{self, Write};
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::hop::HopDistance;
use crate::temporal_graph::{Bfs, TemporalGraph};
use crate::trace_io::NodeId;

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub enum Ttl {
    #[default]
    Unbounded,
    Seconds(f64),
}

impl Ttl {
    /// Latest delivery instant for a message created at `created_at`.
    pub fn deadline(self, created_at: f64) -> f64 {
        match self {
            Ttl::Unbounded => f64::INFINITY,
            Ttl::Seconds(s) => created_at + s,
        }
    }

    pub fn allows(self, waiting: f64) -> bool {
        match self {
            Ttl::Unbounded => true,
            Ttl::Seconds(s) => waiting <= s,
        }
    }
}

impl fmt::Display for Ttl {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Ttl::Unbounded => f.write_str("inf"),
            Ttl::Seconds(s) => write!(f, "{s}"),
        }
    }
}

impl FromStr for Ttl {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "inf" | "unbounded" => Ok(Ttl::Unbounded),
            other => match other.parse::<f64>() {
                Ok(v) if v >= 0.0 && v.is_finite() => Ok(Ttl::Seconds(v)),
                _ => Err(Error::config(format!("invalid ttl `{other}`"))),
            },
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MessageSpec {
    pub src: NodeId,
    pub dst: NodeId,
    pub created_at: f64,
    pub ttl: Ttl,
    pub threshold: u32,
}

impl MessageSpec {
    pub fn new(src: NodeId, dst: NodeId, created_at: f64, threshold: u32) -> Self {
        MessageSpec {
            src,
            dst,
            created_at,
            ttl: Ttl::Unbounded,
            threshold,
        }
    }

    pub fn with_ttl(self, ttl: Ttl) -> Self {
        MessageSpec { ttl, ..self }
    }

    pub(crate) fn validate(&self, g: &TemporalGraph) -> Result<(usize, usize)> {
        let s = g.node_index(self.src)?;
        let d = g.node_index(self.dst)?;
        if s == d {
            return Err(Error::config(format!(
                "message source and destination are both {}",
                self.src
            )));
        }
        if self.threshold == 0 {
            return Err(Error::config("T must be at least 1"));
        }
        if !(0.0..=g.horizon()).contains(&self.created_at) {
            return Err(Error::TimeOutOfRange {
                time: self.created_at,
                horizon: g.horizon(),
            });
        }
        Ok((s, d))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Outcome {
    Delivered,
    Dropped,
}

impl fmt::Display for Outcome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Outcome::Delivered => "delivered",
            Outcome::Dropped => "dropped",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MessageRecord {
    pub spec: MessageSpec,
    pub outcome: Outcome,
    /// `f64::INFINITY` when dropped.
    pub waiting_time: f64,
    /// Path length at the delivery instant.
    pub delivery_hops: Option<u32>,
}

impl MessageRecord {
    pub(crate) fn delivered(spec: MessageSpec, at: f64, hops: u32) -> Self {
        MessageRecord {
            spec,
            outcome: Outcome::Delivered,
            waiting_time: at - spec.created_at,
            delivery_hops: Some(hops),
        }
    }

    pub(crate) fn dropped(spec: MessageSpec) -> Self {
        MessageRecord {
            spec,
            outcome: Outcome::Dropped,
            waiting_time: f64::INFINITY,
            delivery_hops: None,
        }
    }

    pub fn is_delivered(&self) -> bool {
        self.outcome == Outcome::Delivered
    }
}

pub fn simulate_message(g: &TemporalGraph, spec: &MessageSpec) -> Result<MessageRecord> {
    let mut records = simulate_sweep(g, spec, &[spec.threshold])?;
    Ok(records.pop().expect("one record per threshold"))
}

/// Simulates one message for several thresholds with a single scan over the
/// epochs. `spec.threshold` is ignored; one record is returned per entry of
/// `thresholds`, in order.
pub fn simulate_sweep(g: &TemporalGraph, spec: &MessageSpec, thresholds: &[u32]) -> Result<Vec<MessageRecord>> {
    if thresholds.is_empty() {
        return Err(Error::config("at least one T value is required"));
    }
    let max_t = *thresholds.iter().max().expect("non-empty");
    let (s, d) = MessageSpec {
        threshold: max_t,
        ..*spec
    }
    .validate(g)?;
    if thresholds.contains(&0) {
        return Err(Error::config("T must be at least 1"));
    }

    let mut pending: Vec<usize> = (0..thresholds.len()).collect();
    let mut hits: Vec<Option<(f64, u32)>> = vec![None; thresholds.len()];
    let deadline = spec.ttl.deadline(spec.created_at);
    let mut bfs = Bfs::new(g.node_count());
    if let Some(first) = g.epoch_at(spec.created_at) {
        for epoch in first..g.epoch_count() {
            let at = g.epoch_span(epoch).0.max(spec.created_at);
            if at > deadline || pending.is_empty() {
                break;
            }
            let HopDistance::Finite(hops) = g.epoch_distance(epoch, s, d, max_t.into(), &mut bfs) else {
                continue;
            };
            pending.retain(|&i| {
                if hops <= thresholds[i] {
                    hits[i] = Some((at, hops));
                    false
                } else {
                    true
                }
            });
        }
    }

    Ok(thresholds
        .iter()
        .zip(hits)
        .map(|(&t, hit)| {
            let spec = MessageSpec { threshold: t, ..*spec };
            match hit {
                Some((at, hops)) => MessageRecord::delivered(spec, at, hops),
                None => MessageRecord::dropped(spec),
            }
        })
        .collect())
}

/// Waiting time of a message from `src` to `dst` created at `t0`, for every
/// threshold in `thresholds`. TTL is unbounded.
pub fn waiting_time_profile(
    g: &TemporalGraph,
    src: NodeId,
    dst: NodeId,
    t0: f64,
    thresholds: &[u32],
) -> Result<BTreeMap<u32, f64>> {
    let base = MessageSpec::new(src, dst, t0, 1);
    Ok(simulate_sweep(g, &base, thresholds)?
        .into_iter()
        .map(|r| (r.spec.threshold, r.waiting_time))
        .collect())
}

/// Writes `src,dst,t0,T,outcome,waiting_time,hops`.
pub fn write_records_csv<'a>(
    records: impl IntoIterator<Item = &'a MessageRecord>,
    mut out: impl Write,
) -> io::Result<()> {
    writeln!(out, "src,dst,t0,T,outcome,waiting_time,hops")?;
    for r in records {
        let hops = r.delivery_hops.map_or(HopDistance::Infinite, HopDistance::Finite);
        writeln!(
            out,
            "{},{},{},{},{},{},{}",
            r.spec.src, r.spec.dst, r.spec.created_at, r.spec.threshold, r.outcome, r.waiting_time, hops
        )?;
    }
    Ok(())
}
