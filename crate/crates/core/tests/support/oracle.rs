//! Brute-force oracles. Nothing here calls into the BFS or sweep code
//! under test.
#![allow(dead_code)]

use std::collections::{BTreeSet, VecDeque};

use nhood_core::{ContactInterval, ContactTrace, NodeId};
use rand::Rng;

pub fn n(id: u32) -> NodeId {
    NodeId(id)
}

/// Random trace on an integer clock, horizon 260.
pub fn random_trace(rng: &mut impl Rng, max_nodes: u32, max_intervals: usize) -> ContactTrace {
    let nodes = rng.gen_range(2..=max_nodes);
    let count = rng.gen_range(1..=max_intervals);
    let ivs: Vec<_> = (0..count)
        .filter_map(|_| {
            let (a, b) = (rng.gen_range(0..nodes), rng.gen_range(0..nodes));
            let s = rng.gen_range(0..200u32);
            let l = rng.gen_range(1..60u32);
            (a != b).then(|| ContactInterval::new(n(a), n(b), s as f64, (s + l) as f64))
        })
        .collect();
    ContactTrace::new(ivs, (0..nodes).map(n), Some(260.0)).unwrap()
}

/// Connected graph on `nodes` vertices: random spanning tree plus extras.
pub fn random_connected(rng: &mut impl Rng, nodes: usize) -> Vec<(usize, usize)> {
    let mut edges = BTreeSet::new();
    for v in 1..nodes {
        let u = rng.gen_range(0..v);
        edges.insert((u, v));
    }
    for _ in 0..rng.gen_range(0..=nodes) {
        let (a, b) = (rng.gen_range(0..nodes), rng.gen_range(0..nodes));
        if a != b {
            edges.insert((a.min(b), a.max(b)));
        }
    }
    edges.into_iter().collect()
}

/// Trace where each edge is up for the whole `[0, horizon]`.
pub fn static_trace(nodes: usize, edges: &[(usize, usize)], horizon: f64) -> ContactTrace {
    let ivs = edges
        .iter()
        .map(|&(a, b)| ContactInterval::new(n(a as u32), n(b as u32), 0.0, horizon));
    ContactTrace::new(ivs, (0..nodes as u32).map(n), Some(horizon)).unwrap()
}

/// Positions of every node in the trace's sorted node list.
pub fn index_of(trace: &ContactTrace, id: NodeId) -> usize {
    trace.nodes().binary_search(&id).unwrap()
}

/// Edges up at `t`, as indices into `trace.nodes()`.
pub fn edges_at(trace: &ContactTrace, t: f64) -> Vec<(usize, usize)> {
    trace
        .intervals()
        .iter()
        .filter(|iv| iv.start <= t && t < iv.end)
        .map(|iv| (index_of(trace, iv.a), index_of(trace, iv.b)))
        .collect()
}

/// All-pairs shortest hop counts.
pub fn floyd_warshall(nodes: usize, edges: &[(usize, usize)]) -> Vec<Vec<Option<u32>>> {
    let mut d = vec![vec![None; nodes]; nodes];
    for (v, row) in d.iter_mut().enumerate() {
        row[v] = Some(0);
    }
    for &(a, b) in edges {
        d[a][b] = Some(1);
        d[b][a] = Some(1);
    }
    for k in 0..nodes {
        for i in 0..nodes {
            for j in 0..nodes {
                if let (Some(x), Some(y)) = (d[i][k], d[k][j]) {
                    if d[i][j].is_none_or(|c| x + y < c) {
                        d[i][j] = Some(x + y);
                    }
                }
            }
        }
    }
    d
}

pub fn oracle_distance(trace: &ContactTrace, t: f64, a: NodeId, b: NodeId) -> Option<u32> {
    let d = floyd_warshall(trace.node_count(), &edges_at(trace, t));
    d[index_of(trace, a)][index_of(trace, b)]
}

/// Every instant where some link changes, plus `t0`, in `[t0, horizon)`.
fn candidate_instants(trace: &ContactTrace, t0: f64) -> Vec<f64> {
    let mut ts: Vec<f64> = trace
        .intervals()
        .iter()
        .flat_map(|iv| [iv.start, iv.end])
        .chain([t0])
        .filter(|&t| t >= t0 && t < trace.horizon())
        .collect();
    ts.sort_by(f64::total_cmp);
    ts.dedup();
    ts
}

/// First instant `>= t0` where `dst` lies within `threshold` hops of `src`.
pub fn wait_oracle(
    trace: &ContactTrace,
    src: NodeId,
    dst: NodeId,
    t0: f64,
    threshold: u32,
    deadline: f64,
) -> Option<f64> {
    candidate_instants(trace, t0)
        .into_iter()
        .take_while(|&t| t <= deadline)
        .find(|&t| oracle_distance(trace, t, src, dst).is_some_and(|h| h <= threshold))
}

/// Plain WAIT: carry the message until `dst` itself is met.
pub fn contact_scan_wait(trace: &ContactTrace, src: NodeId, dst: NodeId, t0: f64, deadline: f64) -> Option<f64> {
    let (a, b) = (src.min(dst), src.max(dst));
    trace
        .intervals()
        .iter()
        .filter(|iv| iv.a == a && iv.b == b && iv.end > t0)
        .map(|iv| iv.start.max(t0))
        .filter(|&t| t <= deadline && t < trace.horizon())
        .min_by(f64::total_cmp)
}

/// Message-level replay of a discovery wave from `center`.
///
/// The center broadcasts once. A node first reached at depth `d < T`
/// rebroadcasts once and later sends one aggregated reply; a node first
/// reached at depth `T` only replies. Returns the number of messages sent.
pub fn wave_messages(nodes: usize, edges: &[(usize, usize)], center: usize, threshold: u32) -> u64 {
    let mut adj = vec![Vec::new(); nodes];
    for &(a, b) in edges {
        adj[a].push(b);
        adj[b].push(a);
    }
    let mut heard = vec![false; nodes];
    heard[center] = true;
    let mut sent = 1u64;
    // (sender, depth of the sender's broadcast)
    let mut broadcasts = VecDeque::from([(center, 0u32)]);
    while let Some((from, depth)) = broadcasts.pop_front() {
        for &v in &adj[from] {
            if heard[v] {
                continue;
            }
            heard[v] = true;
            let d = depth + 1;
            if d < threshold {
                sent += 2;
                broadcasts.push_back((v, d));
            } else {
                sent += 1;
            }
        }
    }
    sent
}
