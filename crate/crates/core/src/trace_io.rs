//! Canonical contact traces and their two text encodings.
//!
//! Intervals format:
//!
//! ```text
//! # comment
//! %horizon 200
//! 1 2 0 100
//! 2 3 50 150
//! ```
//!
//! Events format, one connection change per line:
//!
//! ```text
//! 50 CONN 1 2 up
//! 150 CONN 1 2 down
//! ```
//!
//! Both accept `%horizon <seconds>` and `%nodes <id>...`. The latter declares
//! nodes that never appear in a contact so that generated traces keep their
//! full population across a write/parse cycle.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;
use std::io::{self, BufRead, Write};
use std::str::FromStr;

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct NodeId(pub u32);

impl fmt::Display for NodeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.fmt(f)
    }
}

impl FromStr for NodeId {
    type Err = std::num::ParseIntError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        s.parse().map(NodeId)
    }
}

/// An undirected contact `[start, end)` between `a < b`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ContactInterval {
    pub a: NodeId,
    pub b: NodeId,
    pub start: f64,
    pub end: f64,
}

impl ContactInterval {
    /// Builds an interval with the endpoints put in canonical order.
    pub fn new(x: NodeId, y: NodeId, start: f64, end: f64) -> Self {
        let (a, b) = if x <= y { (x, y) } else { (y, x) };
        ContactInterval { a, b, start, end }
    }

    pub fn pair(&self) -> (NodeId, NodeId) {
        (self.a, self.b)
    }

    pub fn duration(&self) -> f64 {
        self.end - self.start
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TraceFormat {
    Intervals,
    Events,
}

impl FromStr for TraceFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "intervals" => Ok(TraceFormat::Intervals),
            "events" => Ok(TraceFormat::Events),
            other => Err(Error::UnknownName {
                kind: "trace format",
                name: other.to_string(),
                available: "intervals, events".to_string(),
            }),
        }
    }
}

/// A set of merged, sorted contact intervals over `[0, horizon]`.
#[derive(Debug, Clone, PartialEq)]
pub struct ContactTrace {
    intervals: Vec<ContactInterval>,
    nodes: Vec<NodeId>,
    horizon: f64,
}

impl ContactTrace {
    pub fn empty() -> Self {
        ContactTrace {
            intervals: Vec::new(),
            nodes: Vec::new(),
            horizon: 0.0,
        }
    }

    /// Canonicalizes raw intervals: endpoints ordered, overlapping or
    /// abutting intervals of the same pair merged, result sorted by
    /// `(start, a, b)`.
    ///
    /// `extra_nodes` adds nodes that may have no contact at all. When
    /// `horizon` is `None` it becomes the largest interval end.
    pub fn new(
        raw: impl IntoIterator<Item = ContactInterval>,
        extra_nodes: impl IntoIterator<Item = NodeId>,
        horizon: Option<f64>,
    ) -> Result<Self> {
        let mut by_pair: BTreeMap<(NodeId, NodeId), Vec<(f64, f64)>> = BTreeMap::new();
        let mut nodes: BTreeSet<NodeId> = extra_nodes.into_iter().collect();
        let mut last_end = 0.0f64;
        for iv in raw {
            let iv = ContactInterval::new(iv.a, iv.b, iv.start, iv.end);
            if iv.a == iv.b {
                return Err(Error::SelfContact { line: 0, node: iv.a });
            }
            if !(iv.start.is_finite() && iv.end.is_finite()) || iv.start < 0.0 || iv.start >= iv.end {
                return Err(Error::EmptyInterval {
                    line: 0,
                    start: iv.start,
                    end: iv.end,
                });
            }
            nodes.insert(iv.a);
            nodes.insert(iv.b);
            last_end = last_end.max(iv.end);
            by_pair.entry(iv.pair()).or_default().push((iv.start, iv.end));
        }
        let horizon = match horizon {
            Some(h) if h < last_end || !h.is_finite() => return Err(Error::HorizonTooShort { horizon: h, last_end }),
            Some(h) => h,
            None => last_end,
        };

        let mut intervals = Vec::new();
        for ((a, b), mut spans) in by_pair {
            spans.sort_by(|x, y| x.0.total_cmp(&y.0));
            let mut current = spans[0];
            for &(s, e) in &spans[1..] {
                if s <= current.1 {
                    current.1 = current.1.max(e);
                } else {
                    intervals.push(ContactInterval {
                        a,
                        b,
                        start: current.0,
                        end: current.1,
                    });
                    current = (s, e);
                }
            }
            intervals.push(ContactInterval {
                a,
                b,
                start: current.0,
                end: current.1,
            });
        }
        intervals.sort_by(|x, y| x.start.total_cmp(&y.start).then(x.a.cmp(&y.a)).then(x.b.cmp(&y.b)));

        Ok(ContactTrace {
            intervals,
            nodes: nodes.into_iter().collect(),
            horizon,
        })
    }

    pub fn intervals(&self) -> &[ContactInterval] {
        &self.intervals
    }

    /// Sorted node ids.
    pub fn nodes(&self) -> &[NodeId] {
        &self.nodes
    }

    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    pub fn horizon(&self) -> f64 {
        self.horizon
    }

    /// Merged intervals of one unordered pair, in time order.
    pub fn pair_intervals(&self, x: NodeId, y: NodeId) -> impl Iterator<Item = &ContactInterval> {
        let (a, b) = if x <= y { (x, y) } else { (y, x) };
        self.intervals.iter().filter(move |iv| iv.a == a && iv.b == b)
    }

    fn has_isolated_nodes(&self) -> bool {
        let mut seen = BTreeSet::new();
        for iv in &self.intervals {
            seen.insert(iv.a);
            seen.insert(iv.b);
        }
        seen.len() != self.nodes.len()
    }
}

pub fn parse_trace(input: impl BufRead, format: TraceFormat) -> Result<ContactTrace> {
    match format {
        TraceFormat::Intervals => parse_intervals(input),
        TraceFormat::Events => parse_events(input),
    }
}

pub fn parse_trace_str(input: &str, format: TraceFormat) -> Result<ContactTrace> {
    parse_trace(input.as_bytes(), format)
}

/// Header directives shared by both formats. Returns `Ok(true)` when the
/// line was consumed as a header.
fn parse_header(line_no: usize, line: &str, horizon: &mut Option<f64>, declared: &mut Vec<NodeId>) -> Result<bool> {
    let Some(rest) = line.strip_prefix('%') else {
        return Ok(false);
    };
    let mut tokens = rest.split_whitespace();
    match tokens.next() {
        Some("horizon") => {
            let value = tokens
                .next()
                .ok_or_else(|| parse_err(line_no, "missing horizon value"))?;
            let h = parse_time(line_no, value)?;
            if tokens.next().is_some() {
                return Err(parse_err(line_no, "trailing tokens after horizon"));
            }
            *horizon = Some(h);
        }
        Some("nodes") => {
            for tok in tokens {
                declared.push(parse_node(line_no, tok)?);
            }
        }
        Some(other) => return Err(parse_err(line_no, format!("unknown header `%{other}`"))),
        None => return Err(parse_err(line_no, "empty header")),
    }
    Ok(true)
}

fn parse_err(line: usize, message: impl Into<String>) -> Error {
    Error::Parse {
        line,
        message: message.into(),
    }
}

fn parse_node(line: usize, tok: &str) -> Result<NodeId> {
    tok.parse()
        .map_err(|_| parse_err(line, format!("invalid node id `{tok}`")))
}

fn parse_time(line: usize, tok: &str) -> Result<f64> {
    match tok.parse::<f64>() {
        Ok(t) if t.is_finite() && t >= 0.0 => Ok(t),
        _ => Err(parse_err(line, format!("invalid time `{tok}`"))),
    }
}

fn parse_intervals(input: impl BufRead) -> Result<ContactTrace> {
    let mut horizon = None;
    let mut declared = Vec::new();
    let mut raw = Vec::new();
    for (idx, line) in input.lines().enumerate() {
        let line_no = idx + 1;
        let line = line?;
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        if parse_header(line_no, line, &mut horizon, &mut declared)? {
            continue;
        }
        let tokens: Vec<&str> = line.split_whitespace().collect();
        if tokens.len() != 4 {
            return Err(parse_err(
                line_no,
                format!("expected `<a> <b> <start> <end>`, found {} fields", tokens.len()),
            ));
        }
        let a = parse_node(line_no, tokens[0])?;
        let b = parse_node(line_no, tokens[1])?;
        let start = parse_time(line_no, tokens[2])?;
        let end = parse_time(line_no, tokens[3])?;
        if a == b {
            return Err(Error::SelfContact { line: line_no, node: a });
        }
        if start >= end {
            return Err(Error::EmptyInterval {
                line: line_no,
                start,
                end,
            });
        }
        raw.push(ContactInterval::new(a, b, start, end));
    }
    ContactTrace::new(raw, declared, horizon)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum LinkChange {
    Up,
    Down,
}

fn parse_events(input: impl BufRead) -> Result<ContactTrace> {
    let mut horizon = None;
    let mut declared = Vec::new();
    let mut events = Vec::new();
    for (idx, line) in input.lines().enumerate() {
        let line_no = idx + 1;
        let line = line?;
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        if parse_header(line_no, line, &mut horizon, &mut declared)? {
            continue;
        }
        let tokens: Vec<&str> = line.split_whitespace().collect();
        if tokens.len() != 5 || tokens[1] != "CONN" {
            return Err(parse_err(line_no, "expected `<time> CONN <a> <b> up|down`"));
        }
        let time = parse_time(line_no, tokens[0])?;
        let a = parse_node(line_no, tokens[2])?;
        let b = parse_node(line_no, tokens[3])?;
        let change = match tokens[4] {
            "up" => LinkChange::Up,
            "down" => LinkChange::Down,
            other => return Err(parse_err(line_no, format!("expected up|down, found `{other}`"))),
        };
        if a == b {
            return Err(Error::SelfContact { line: line_no, node: a });
        }
        events.push((time, line_no, a, b, change));
    }
    // Stable: same-instant events keep file order.
    events.sort_by(|x, y| x.0.total_cmp(&y.0));

    let end_of_trace = horizon.unwrap_or_else(|| events.last().map_or(0.0, |e| e.0));
    let mut open: HashMap<(NodeId, NodeId), (f64, usize)> = HashMap::new();
    let mut raw = Vec::new();
    for (time, line_no, x, y, change) in events {
        let key = if x <= y { (x, y) } else { (y, x) };
        match change {
            LinkChange::Up => {
                if open.insert(key, (time, line_no)).is_some() {
                    return Err(Error::UnbalancedEvent {
                        line: line_no,
                        a: key.0,
                        b: key.1,
                        message: "`up` while the link is already up",
                    });
                }
            }
            LinkChange::Down => {
                let Some((start, _)) = open.remove(&key) else {
                    return Err(Error::UnbalancedEvent {
                        line: line_no,
                        a: key.0,
                        b: key.1,
                        message: "`down` without a matching `up`",
                    });
                };
                if start >= time {
                    return Err(Error::EmptyInterval {
                        line: line_no,
                        start,
                        end: time,
                    });
                }
                raw.push(ContactInterval::new(key.0, key.1, start, time));
            }
        }
    }
    let mut dangling: Vec<_> = open.into_iter().collect();
    dangling.sort_by_key(|(pair, _)| *pair);
    for ((a, b), (start, _)) in dangling {
        declared.push(a);
        declared.push(b);
        // An `up` exactly at the end of the trace carries no contact time.
        if start < end_of_trace {
            raw.push(ContactInterval::new(a, b, start, end_of_trace));
        }
    }
    ContactTrace::new(raw, declared, horizon.or(Some(end_of_trace)))
}

/// Writes `trace` in intervals format. Only the intervals format is
/// writable; events files are an input adapter.
pub fn write_trace(trace: &ContactTrace, mut out: impl Write) -> io::Result<()> {
    writeln!(out, "%horizon {}", trace.horizon)?;
    if trace.has_isolated_nodes() {
        write!(out, "%nodes")?;
        for n in &trace.nodes {
            write!(out, " {n}")?;
        }
        writeln!(out)?;
    }
    for iv in &trace.intervals {
        writeln!(out, "{} {} {} {}", iv.a, iv.b, iv.start, iv.end)?;
    }
    Ok(())
}

pub fn write_trace_string(trace: &ContactTrace) -> String {
    let mut buf = Vec::new();
    write_trace(trace, &mut buf).expect("writing to a Vec cannot fail");
    String::from_utf8(buf).expect("trace output is ASCII")
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TraceStats {
    pub node_count: usize,
    pub interval_count: usize,
    pub horizon: f64,
    pub mean_duration: f64,
}

impl fmt::Display for TraceStats {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{} nodes, {} intervals, horizon {}, mean contact duration {:.3}",
            self.node_count, self.interval_count, self.horizon, self.mean_duration
        )
    }
}

pub fn trace_stats(trace: &ContactTrace) -> TraceStats {
    let total: f64 = trace.intervals.iter().map(ContactInterval::duration).sum();
    let count = trace.intervals.len();
    TraceStats {
        node_count: trace.node_count(),
        interval_count: count,
        horizon: trace.horizon,
        mean_duration: if count == 0 { 0.0 } else { total / count as f64 },
    }
}
