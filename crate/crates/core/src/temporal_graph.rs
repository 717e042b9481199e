//! Epoch-indexed view of a contact trace.
//!
//! Breakpoints are the distinct interval endpoints plus `0` and the horizon.
//! Epoch `i` is the right-open span `[breakpoints[i], breakpoints[i + 1])`;
//! the topology is constant inside it. A contact `[s, e)` is present at `s`
//! and absent at `e`, so at the horizon itself the graph is empty.

use std::collections::{BTreeMap, HashMap, VecDeque};
use std::sync::OnceLock;

use crate::error::{Error, Result};
use crate::hop::HopDistance;
use crate::trace_io::{ContactTrace, NodeId};

/// Compressed adjacency of one epoch.
#[derive(Debug)]
struct Adjacency {
    offsets: Vec<u32>,
    targets: Vec<u32>,
}

impl Adjacency {
    fn from_edges(node_count: usize, edges: &[(u32, u32)]) -> Self {
        let mut degree = vec![0u32; node_count + 1];
        for &(a, b) in edges {
            degree[a as usize + 1] += 1;
            degree[b as usize + 1] += 1;
        }
        for i in 1..degree.len() {
            degree[i] += degree[i - 1];
        }
        let offsets = degree;
        let mut fill = offsets.clone();
        let mut targets = vec![0u32; edges.len() * 2];
        for &(a, b) in edges {
            targets[fill[a as usize] as usize] = b;
            fill[a as usize] += 1;
            targets[fill[b as usize] as usize] = a;
            fill[b as usize] += 1;
        }
        Adjacency { offsets, targets }
    }

    fn neighbors(&self, v: u32) -> &[u32] {
        let lo = self.offsets[v as usize] as usize;
        let hi = self.offsets[v as usize + 1] as usize;
        &self.targets[lo..hi]
    }
}

/// Reusable breadth-first search state over dense node indices.
#[derive(Debug, Clone)]
pub struct Bfs {
    depth: Vec<u32>,
    reached: Vec<u32>,
    queue: VecDeque<u32>,
}

const UNSEEN: u32 = u32::MAX;

impl Bfs {
    pub fn new(node_count: usize) -> Self {
        Bfs {
            depth: vec![UNSEEN; node_count],
            reached: Vec::new(),
            queue: VecDeque::new(),
        }
    }

    fn reset(&mut self) {
        for &v in &self.reached {
            self.depth[v as usize] = UNSEEN;
        }
        self.reached.clear();
        self.queue.clear();
    }

    /// Nodes reached by the last run, in BFS order, excluding the source.
    pub fn reached(&self) -> &[u32] {
        &self.reached[1.min(self.reached.len())..]
    }

    /// Depth of `v` in the last run, `None` if not reached.
    pub fn depth(&self, v: usize) -> Option<u32> {
        match self.depth[v] {
            UNSEEN => None,
            d => Some(d),
        }
    }
}

/// Time-varying graph over a [`ContactTrace`].
#[derive(Debug)]
pub struct TemporalGraph {
    nodes: Vec<NodeId>,
    index: HashMap<NodeId, usize>,
    breakpoints: Vec<f64>,
    epoch_edges: Vec<Vec<(u32, u32)>>,
    adjacency: Vec<OnceLock<Adjacency>>,
    horizon: f64,
}

/// Neighborhood counts around a prober: members strictly closer than `T`
/// and members exactly at depth `T`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct HopHistogram {
    pub below: usize,
    pub at: usize,
}

impl TemporalGraph {
    pub fn build(trace: &ContactTrace) -> Self {
        let nodes = trace.nodes().to_vec();
        let index: HashMap<NodeId, usize> = nodes.iter().enumerate().map(|(i, &n)| (n, i)).collect();
        let horizon = trace.horizon();

        let mut breakpoints: Vec<f64> = Vec::with_capacity(trace.intervals().len() * 2 + 2);
        if horizon > 0.0 {
            breakpoints.push(0.0);
            breakpoints.push(horizon);
        }
        for iv in trace.intervals() {
            breakpoints.push(iv.start);
            breakpoints.push(iv.end);
        }
        breakpoints.sort_by(f64::total_cmp);
        breakpoints.dedup();

        let epochs = breakpoints.len().saturating_sub(1);
        let intervals = trace.intervals();
        let mut next = 0;
        let mut active: BTreeMap<(u32, u32), f64> = BTreeMap::new();
        let mut epoch_edges = Vec::with_capacity(epochs);
        for &at in &breakpoints[..epochs] {
            active.retain(|_, end| *end > at);
            while next < intervals.len() && intervals[next].start <= at {
                let iv = &intervals[next];
                if iv.end > at {
                    active.insert((index[&iv.a] as u32, index[&iv.b] as u32), iv.end);
                }
                next += 1;
            }
            epoch_edges.push(active.keys().copied().collect());
        }

        TemporalGraph {
            nodes,
            index,
            breakpoints,
            adjacency: (0..epochs).map(|_| OnceLock::new()).collect(),
            epoch_edges,
            horizon,
        }
    }

    pub fn horizon(&self) -> f64 {
        self.horizon
    }

    pub fn nodes(&self) -> &[NodeId] {
        &self.nodes
    }

    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    pub fn breakpoints(&self) -> &[f64] {
        &self.breakpoints
    }

    pub fn epoch_count(&self) -> usize {
        self.epoch_edges.len()
    }

    /// `[start, end)` of an epoch.
    pub fn epoch_span(&self, epoch: usize) -> (f64, f64) {
        (self.breakpoints[epoch], self.breakpoints[epoch + 1])
    }

    /// Epoch containing `t`, `None` at or past the horizon.
    pub fn epoch_at(&self, t: f64) -> Option<usize> {
        let pos = self.breakpoints.partition_point(|&b| b <= t);
        if pos == 0 || pos > self.epoch_count() {
            None
        } else {
            Some(pos - 1)
        }
    }

    pub fn node_index(&self, node: NodeId) -> Result<usize> {
        self.index.get(&node).copied().ok_or(Error::UnknownNode(node))
    }

    /// Dense-index edges of an epoch, each with `a < b`.
    pub fn epoch_edges(&self, epoch: usize) -> &[(u32, u32)] {
        &self.epoch_edges[epoch]
    }

    fn adjacency(&self, epoch: usize) -> &Adjacency {
        self.adjacency[epoch].get_or_init(|| Adjacency::from_edges(self.nodes.len(), &self.epoch_edges[epoch]))
    }

    fn check_time(&self, t: f64) -> Result<Option<usize>> {
        if !(0.0..=self.horizon).contains(&t) {
            return Err(Error::TimeOutOfRange {
                time: t,
                horizon: self.horizon,
            });
        }
        Ok(self.epoch_at(t))
    }

    /// Edges present at `t`, sorted.
    pub fn snapshot(&self, t: f64) -> Result<Vec<(NodeId, NodeId)>> {
        let Some(epoch) = self.check_time(t)? else {
            return Ok(Vec::new());
        };
        Ok(self.epoch_edges[epoch]
            .iter()
            .map(|&(a, b)| (self.nodes[a as usize], self.nodes[b as usize]))
            .collect())
    }

    /// BFS from `src` in `epoch`, not expanding past depth `cap`.
    pub fn epoch_bfs(&self, epoch: usize, src: usize, cap: HopDistance, bfs: &mut Bfs) {
        self.epoch_bfs_until(epoch, src, cap, None, bfs);
    }

    fn epoch_bfs_until(&self, epoch: usize, src: usize, cap: HopDistance, stop_at: Option<usize>, bfs: &mut Bfs) {
        bfs.reset();
        let adj = self.adjacency(epoch);
        bfs.depth[src] = 0;
        bfs.reached.push(src as u32);
        bfs.queue.push_back(src as u32);
        while let Some(v) = bfs.queue.pop_front() {
            let d = bfs.depth[v as usize];
            if !HopDistance::Finite(d + 1).le(&cap) {
                break;
            }
            for &w in adj.neighbors(v) {
                if bfs.depth[w as usize] == UNSEEN {
                    bfs.depth[w as usize] = d + 1;
                    bfs.reached.push(w);
                    if Some(w as usize) == stop_at {
                        return;
                    }
                    bfs.queue.push_back(w);
                }
            }
        }
    }

    /// Capped hop distance between dense indices inside one epoch.
    pub fn epoch_distance(&self, epoch: usize, src: usize, dst: usize, cap: HopDistance, bfs: &mut Bfs) -> HopDistance {
        if src == dst {
            return HopDistance::Finite(0);
        }
        self.epoch_bfs_until(epoch, src, cap, Some(dst), bfs);
        match bfs.depth(dst) {
            Some(d) => HopDistance::Finite(d),
            None => HopDistance::Infinite,
        }
    }

    /// Shortest contemporaneous path length at `t`, `Infinite` when there is
    /// none of length `<= cap`.
    pub fn distance(&self, t: f64, src: NodeId, dst: NodeId, cap: HopDistance) -> Result<HopDistance> {
        let s = self.node_index(src)?;
        let d = self.node_index(dst)?;
        if cap == HopDistance::Finite(0) {
            return Err(Error::config("distance cap must be at least 1"));
        }
        let Some(epoch) = self.check_time(t)? else {
            return Ok(if s == d {
                HopDistance::Finite(0)
            } else {
                HopDistance::Infinite
            });
        };
        let mut bfs = Bfs::new(self.node_count());
        Ok(self.epoch_distance(epoch, s, d, cap, &mut bfs))
    }

    /// Nodes within `t_hops` of `center` at `t`, with their hop distance.
    pub fn t_neighborhood(&self, t: f64, center: NodeId, t_hops: u32) -> Result<BTreeMap<NodeId, u32>> {
        let c = self.node_index(center)?;
        if t_hops == 0 {
            return Err(Error::config("T must be at least 1"));
        }
        let Some(epoch) = self.check_time(t)? else {
            return Ok(BTreeMap::new());
        };
        let mut bfs = Bfs::new(self.node_count());
        self.epoch_bfs(epoch, c, HopDistance::Finite(t_hops), &mut bfs);
        Ok(bfs
            .reached()
            .iter()
            .map(|&v| (self.nodes[v as usize], bfs.depth[v as usize]))
            .collect())
    }

    pub fn epoch_histogram(&self, epoch: usize, center: usize, t_hops: u32, bfs: &mut Bfs) -> HopHistogram {
        self.epoch_bfs(epoch, center, HopDistance::Finite(t_hops), bfs);
        let mut hist = HopHistogram::default();
        for &v in bfs.reached() {
            if bfs.depth[v as usize] < t_hops {
                hist.below += 1;
            } else {
                hist.at += 1;
            }
        }
        hist
    }

    /// Counts of neighborhood members at depth `1..T-1` and exactly `T`.
    pub fn component_histogram(&self, t: f64, center: NodeId, t_hops: u32) -> Result<HopHistogram> {
        let c = self.node_index(center)?;
        if t_hops == 0 {
            return Err(Error::config("T must be at least 1"));
        }
        let Some(epoch) = self.check_time(t)? else {
            return Ok(HopHistogram::default());
        };
        let mut bfs = Bfs::new(self.node_count());
        Ok(self.epoch_histogram(epoch, c, t_hops, &mut bfs))
    }
}
