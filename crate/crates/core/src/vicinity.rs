//! Per-pair hop-distance timelines and pair classification.

use std::fmt;
use std::io::{self, Write};

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::hop::HopDistance;
use crate::temporal_graph::{Bfs, TemporalGraph};
use crate::trace_io::NodeId;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Segment {
    pub start: f64,
    pub end: f64,
    pub hops: HopDistance,
}

/// Piecewise-constant hop distance of one pair over `[0, horizon]`.
///
/// Segments are maximal: neighbours always differ in `hops`.
#[derive(Debug, Clone, PartialEq)]
pub struct PairTimeline {
    pub pair: (NodeId, NodeId),
    pub segments: Vec<Segment>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum PairKind {
    /// The pair is in direct contact at some point.
    ContactReachable,
    /// Never in contact, but sometimes joined by a multi-hop path.
    VicinityOnly,
    NeverConnected,
}

impl PairKind {
    pub const ALL: [PairKind; 3] = [
        PairKind::ContactReachable,
        PairKind::VicinityOnly,
        PairKind::NeverConnected,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            PairKind::ContactReachable => "contact_reachable",
            PairKind::VicinityOnly => "vicinity_only",
            PairKind::NeverConnected => "never_connected",
        }
    }

    fn from_min(min_n: HopDistance) -> Self {
        match min_n {
            HopDistance::Finite(1) => PairKind::ContactReachable,
            HopDistance::Finite(_) => PairKind::VicinityOnly,
            HopDistance::Infinite => PairKind::NeverConnected,
        }
    }
}

impl fmt::Display for PairKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PairClass {
    pub kind: PairKind,
    /// Smallest hop distance the pair ever reaches.
    pub min_n: HopDistance,
}

pub fn pair_timeline(g: &TemporalGraph, a: NodeId, b: NodeId, cap: HopDistance) -> Result<PairTimeline> {
    let ia = g.node_index(a)?;
    let ib = g.node_index(b)?;
    if ia == ib {
        return Err(Error::config(format!("pair ({a}, {b}) needs two distinct nodes")));
    }
    if cap == HopDistance::Finite(0) {
        return Err(Error::config("distance cap must be at least 1"));
    }
    let mut bfs = Bfs::new(g.node_count());
    let mut segments: Vec<Segment> = Vec::new();
    for epoch in 0..g.epoch_count() {
        let (start, end) = g.epoch_span(epoch);
        let hops = g.epoch_distance(epoch, ia, ib, cap, &mut bfs);
        match segments.last_mut() {
            Some(last) if last.hops == hops => last.end = end,
            _ => segments.push(Segment { start, end, hops }),
        }
    }
    if segments.is_empty() {
        segments.push(Segment {
            start: 0.0,
            end: g.horizon(),
            hops: HopDistance::Infinite,
        });
    }
    let pair = if a < b { (a, b) } else { (b, a) };
    Ok(PairTimeline { pair, segments })
}

pub fn classify_pair(timeline: &PairTimeline) -> PairClass {
    let min_n = timeline
        .segments
        .iter()
        .map(|s| s.hops)
        .min()
        .unwrap_or(HopDistance::Infinite);
    PairClass {
        kind: PairKind::from_min(min_n),
        min_n,
    }
}

/// Classification of every unordered pair of a graph.
#[derive(Debug, Clone, PartialEq)]
pub struct Classification {
    /// Sorted by pair.
    pub pairs: Vec<((NodeId, NodeId), PairClass)>,
}

impl Classification {
    pub fn count(&self, kind: PairKind) -> usize {
        self.pairs.iter().filter(|(_, c)| c.kind == kind).count()
    }

    pub fn fraction(&self, kind: PairKind) -> f64 {
        if self.pairs.is_empty() {
            0.0
        } else {
            self.count(kind) as f64 / self.pairs.len() as f64
        }
    }

    pub fn get(&self, a: NodeId, b: NodeId) -> Option<PairClass> {
        let key = if a < b { (a, b) } else { (b, a) };
        self.pairs
            .binary_search_by(|(p, _)| p.cmp(&key))
            .ok()
            .map(|i| self.pairs[i].1)
    }

    /// Writes `a,b,kind,min_n`.
    pub fn write_csv(&self, mut out: impl Write) -> io::Result<()> {
        writeln!(out, "a,b,kind,min_n")?;
        for ((a, b), class) in &self.pairs {
            writeln!(out, "{a},{b},{},{}", class.kind, class.min_n)?;
        }
        Ok(())
    }
}

/// Classifies all pairs at once from one capped BFS per node and epoch.
pub fn classify_all(g: &TemporalGraph, cap: HopDistance) -> Classification {
    let n = g.node_count();
    let fresh = || (vec![u32::MAX; n * n], Bfs::new(n));
    let (min_hops, _) = (0..g.epoch_count())
        .into_par_iter()
        .fold(fresh, |(mut best, mut bfs), epoch| {
            if g.epoch_edges(epoch).is_empty() {
                return (best, bfs);
            }
            for src in 0..n {
                g.epoch_bfs(epoch, src, cap, &mut bfs);
                for &v in bfs.reached() {
                    let v = v as usize;
                    if v > src {
                        let d = bfs.depth(v).expect("reached node has a depth");
                        let slot = &mut best[src * n + v];
                        *slot = (*slot).min(d);
                    }
                }
            }
            (best, bfs)
        })
        .reduce(fresh, |(mut a, bfs), (b, _)| {
            for (x, y) in a.iter_mut().zip(b) {
                *x = (*x).min(y);
            }
            (a, bfs)
        });

    let nodes = g.nodes();
    let mut pairs = Vec::with_capacity(n * n.saturating_sub(1) / 2);
    for i in 0..n {
        for j in i + 1..n {
            let min_n = match min_hops[i * n + j] {
                u32::MAX => HopDistance::Infinite,
                d => HopDistance::Finite(d),
            };
            pairs.push((
                (nodes[i], nodes[j]),
                PairClass {
                    kind: PairKind::from_min(min_n),
                    min_n,
                },
            ));
        }
    }
    Classification { pairs }
}
