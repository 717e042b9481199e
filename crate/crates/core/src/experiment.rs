//! Seeded batch experiments over a contact trace.
//!
//! For every unordered pair a fixed number of messages is created at times
//! drawn uniformly over `[0, horizon)`, each message is simulated for every
//! threshold, and the results are folded into per-threshold aggregates.
//! Everything is keyed by a deterministic message index, so parallel
//! simulation never changes the output.

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::Path;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::hop::HopDistance;
use crate::overhead::{ProbeJob, StrategyConfig, StrategyRegistry};
use crate::protocols::{simulate_sweep, MessageRecord, MessageSpec, Ttl};
use crate::temporal_graph::{Bfs, TemporalGraph};
use crate::vicinity::{classify_all, Classification};

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub t_values: Vec<u32>,
    pub messages_per_pair: usize,
    pub seed: u64,
    pub ttl: Ttl,
    /// Probing strategy for overhead totals; its threshold is replaced by
    /// each swept `T`. `None` runs the exact oracle only.
    pub strategy: Option<StrategyConfig>,
    /// Creates every message at this instant instead of drawing a time.
    pub fixed_creation_time: Option<f64>,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        ExperimentConfig {
            t_values: vec![1, 2, 3, 4, 5],
            messages_per_pair: 10,
            seed: 1,
            ttl: Ttl::Unbounded,
            strategy: None,
            fixed_creation_time: None,
        }
    }
}

impl ExperimentConfig {
    pub fn validate(&self) -> Result<()> {
        if self.messages_per_pair == 0 {
            return Err(Error::config("messages_per_pair must be at least 1"));
        }
        if self.t_values.is_empty() || self.t_values.contains(&0) {
            return Err(Error::config("T values must be a non-empty list of integers >= 1"));
        }
        if let Some(s) = &self.strategy {
            s.validate()?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct WaitingRow {
    pub threshold: u32,
    pub delivered: usize,
    pub dropped: usize,
    /// Over delivered messages only; infinite when none was delivered.
    pub mean_wait: f64,
    pub median_wait: f64,
}

impl WaitingRow {
    pub fn delivery_fraction(&self) -> f64 {
        let total = self.delivered + self.dropped;
        if total == 0 {
            0.0
        } else {
            self.delivered as f64 / total as f64
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OverheadRow {
    pub threshold: u32,
    pub total_no: u64,
    pub total_do: u64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct AggregateReport {
    pub waiting: Vec<WaitingRow>,
    pub neighborhood_sizes: Vec<(u32, f64)>,
    pub classes: Classification,
    pub overhead: Vec<OverheadRow>,
}

impl AggregateReport {
    pub fn write_waiting_csv(&self, mut out: impl Write) -> io::Result<()> {
        writeln!(
            out,
            "# mean_wait and median_wait: per-message, over messages delivered at that T"
        )?;
        writeln!(out, "T,delivered_count,dropped_count,mean_wait,median_wait")?;
        for r in &self.waiting {
            writeln!(
                out,
                "{},{},{},{},{}",
                r.threshold, r.delivered, r.dropped, r.mean_wait, r.median_wait
            )?;
        }
        Ok(())
    }

    pub fn write_overhead_csv(&self, mut out: impl Write) -> io::Result<()> {
        writeln!(out, "T,total_No,total_Do")?;
        for r in &self.overhead {
            writeln!(out, "{},{},{}", r.threshold, r.total_no, r.total_do)?;
        }
        Ok(())
    }

    /// Writes `waiting_by_T.csv`, `neigh_size_by_T.csv`, `pair_classes.csv`
    /// and `overhead_by_T.csv` into `dir`.
    pub fn write_dir(&self, dir: &Path) -> Result<()> {
        std::fs::create_dir_all(dir)?;
        let create = |name: &str| -> Result<BufWriter<File>> { Ok(BufWriter::new(File::create(dir.join(name))?)) };
        let mut w = create("waiting_by_T.csv")?;
        self.write_waiting_csv(&mut w)?;
        w.flush()?;
        let mut w = create("neigh_size_by_T.csv")?;
        write_neighborhood_csv(&self.neighborhood_sizes, &mut w)?;
        w.flush()?;
        let mut w = create("pair_classes.csv")?;
        self.classes.write_csv(&mut w)?;
        w.flush()?;
        let mut w = create("overhead_by_T.csv")?;
        self.write_overhead_csv(&mut w)?;
        w.flush()?;
        Ok(())
    }
}

/// Writes `T,mean_size`.
pub fn write_neighborhood_csv(table: &[(u32, f64)], mut out: impl Write) -> io::Result<()> {
    writeln!(out, "T,mean_size")?;
    for (t, size) in table {
        writeln!(out, "{t},{size}")?;
    }
    Ok(())
}

#[derive(Debug, Clone)]
pub struct ExperimentOutput {
    pub report: AggregateReport,
    /// Exact-mode records: for message `i`, entries
    /// `i * t_values.len() .. (i + 1) * t_values.len()` in `t_values` order.
    pub records: Vec<MessageRecord>,
    /// Probe-quantized records when a per-message strategy was configured,
    /// laid out like `records`.
    pub probed: Vec<MessageRecord>,
    pub t_values: Vec<u32>,
}

impl ExperimentOutput {
    /// Records of one message across all thresholds.
    pub fn messages(&self) -> impl Iterator<Item = &[MessageRecord]> {
        self.records.chunks(self.t_values.len())
    }

    pub fn message_count(&self) -> usize {
        self.records.len() / self.t_values.len()
    }

    /// Mean waiting time at `ta` and `tb` over the messages delivered under
    /// both thresholds, with the number of such messages.
    pub fn paired_means(&self, ta: u32, tb: u32) -> Option<(f64, f64, usize)> {
        let ia = self.t_values.iter().position(|&t| t == ta)?;
        let ib = self.t_values.iter().position(|&t| t == tb)?;
        let (mut sa, mut sb, mut count) = (0.0, 0.0, 0usize);
        for msg in self.messages() {
            if msg[ia].is_delivered() && msg[ib].is_delivered() {
                sa += msg[ia].waiting_time;
                sb += msg[ib].waiting_time;
                count += 1;
            }
        }
        (count > 0).then(|| (sa / count as f64, sb / count as f64, count))
    }
}

/// Creation specs for every message, in deterministic order.
pub fn generate_messages(g: &TemporalGraph, cfg: &ExperimentConfig) -> Result<Vec<MessageSpec>> {
    let nodes = g.nodes();
    if nodes.len() < 2 {
        return Err(Error::TooFewNodes);
    }
    if cfg.fixed_creation_time.is_none() && g.horizon() <= 0.0 {
        return Err(Error::config("cannot draw creation times over an empty horizon"));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut specs = Vec::with_capacity(nodes.len() * (nodes.len() - 1) / 2 * cfg.messages_per_pair);
    for (i, &a) in nodes.iter().enumerate() {
        for &b in &nodes[i + 1..] {
            for _ in 0..cfg.messages_per_pair {
                let t0 = match cfg.fixed_creation_time {
                    Some(t) => t,
                    None => rng.gen_range(0.0..g.horizon()),
                };
                let (src, dst) = if rng.gen_bool(0.5) { (a, b) } else { (b, a) };
                specs.push(MessageSpec::new(src, dst, t0, 1).with_ttl(cfg.ttl));
            }
        }
    }
    Ok(specs)
}

pub fn run_experiment(g: &TemporalGraph, cfg: &ExperimentConfig) -> Result<ExperimentOutput> {
    run_experiment_with(g, cfg, &StrategyRegistry::with_defaults())
}

pub fn run_experiment_with(
    g: &TemporalGraph,
    cfg: &ExperimentConfig,
    registry: &StrategyRegistry,
) -> Result<ExperimentOutput> {
    cfg.validate()?;
    let specs = generate_messages(g, cfg)?;
    let t_values = cfg.t_values.clone();

    let per_message: Vec<Vec<MessageRecord>> = specs
        .par_iter()
        .map(|spec| simulate_sweep(g, spec, &t_values))
        .collect::<Result<_>>()?;
    let records: Vec<MessageRecord> = per_message.into_iter().flatten().collect();

    let mut probed = Vec::new();
    let mut total_no = vec![0u64; t_values.len()];
    if let Some(strategy_cfg) = &cfg.strategy {
        let strategy = registry.get(&strategy_cfg.strategy)?;
        if strategy.per_message() {
            let runs: Vec<Vec<(MessageRecord, u64)>> = specs
                .par_iter()
                .map(|spec| {
                    t_values
                        .iter()
                        .map(|&t| {
                            let spec = MessageSpec { threshold: t, ..*spec };
                            let run = strategy.run(g, &ProbeJob::message(&spec), strategy_cfg.interval, t)?;
                            let record = run.record.unwrap_or_else(|| MessageRecord::dropped(spec));
                            Ok((record, run.ledger.total()))
                        })
                        .collect::<Result<Vec<_>>>()
                })
                .collect::<Result<_>>()?;
            for run in runs {
                for (k, (record, cost)) in run.into_iter().enumerate() {
                    total_no[k] += cost;
                    probed.push(record);
                }
            }
        } else {
            for (k, &t) in t_values.iter().enumerate() {
                let costs: Vec<u64> = g
                    .nodes()
                    .par_iter()
                    .map(|&node| {
                        strategy
                            .run(g, &ProbeJob::window(node, 0.0, g.horizon()), strategy_cfg.interval, t)
                            .map(|run| run.ledger.total())
                    })
                    .collect::<Result<_>>()?;
                total_no[k] = costs.iter().sum();
            }
        }
    }

    let data_source = if probed.is_empty() { &records } else { &probed };
    let mut total_do = vec![0u64; t_values.len()];
    for chunk in data_source.chunks(t_values.len()) {
        for (k, r) in chunk.iter().enumerate() {
            if let Some(h) = r.delivery_hops {
                total_do[k] += u64::from(h - 1);
            }
        }
    }

    let waiting = t_values
        .iter()
        .enumerate()
        .map(|(k, &t)| {
            let mut waits: Vec<f64> = records
                .chunks(t_values.len())
                .map(|chunk| chunk[k])
                .filter(MessageRecord::is_delivered)
                .map(|r| r.waiting_time)
                .collect();
            waits.sort_by(f64::total_cmp);
            let delivered = waits.len();
            let dropped = records.len() / t_values.len() - delivered;
            WaitingRow {
                threshold: t,
                delivered,
                dropped,
                mean_wait: mean(&waits),
                median_wait: median(&waits),
            }
        })
        .collect();

    let overhead = t_values
        .iter()
        .enumerate()
        .map(|(k, &t)| OverheadRow {
            threshold: t,
            total_no: total_no[k],
            total_do: total_do[k],
        })
        .collect();

    Ok(ExperimentOutput {
        report: AggregateReport {
            waiting,
            neighborhood_sizes: neighborhood_size_table(g, &t_values),
            classes: classify_all(g, HopDistance::Infinite),
            overhead,
        },
        records,
        probed,
        t_values,
    })
}

fn mean(sorted: &[f64]) -> f64 {
    if sorted.is_empty() {
        f64::INFINITY
    } else {
        sorted.iter().sum::<f64>() / sorted.len() as f64
    }
}

fn median(sorted: &[f64]) -> f64 {
    match sorted.len() {
        0 => f64::INFINITY,
        n if n % 2 == 1 => sorted[n / 2],
        n => (sorted[n / 2 - 1] + sorted[n / 2]) / 2.0,
    }
}

/// Mean `T`-neighborhood size over all nodes and the whole horizon,
/// weighting each epoch by its length.
pub fn neighborhood_size_table(g: &TemporalGraph, t_values: &[u32]) -> Vec<(u32, f64)> {
    let n = g.node_count();
    let max_t = t_values.iter().copied().max().unwrap_or(0);
    if n == 0 || g.horizon() <= 0.0 || max_t == 0 {
        return t_values.iter().map(|&t| (t, 0.0)).collect();
    }
    // Per epoch: time-weighted count of (node, member) pairs at each depth.
    let per_epoch: Vec<Vec<f64>> = (0..g.epoch_count())
        .into_par_iter()
        .map_init(
            || Bfs::new(n),
            |bfs, epoch| {
                let mut by_depth = vec![0.0; max_t as usize + 1];
                let edges = g.epoch_edges(epoch);
                if edges.is_empty() {
                    return by_depth;
                }
                let (start, end) = g.epoch_span(epoch);
                let weight = end - start;
                for src in 0..n {
                    g.epoch_bfs(epoch, src, max_t.into(), bfs);
                    for &v in bfs.reached() {
                        let d = bfs.depth(v as usize).expect("reached");
                        by_depth[d as usize] += weight;
                    }
                }
                by_depth
            },
        )
        .collect();

    let mut by_depth = vec![0.0; max_t as usize + 1];
    for epoch in per_epoch {
        for (acc, x) in by_depth.iter_mut().zip(epoch) {
            *acc += x;
        }
    }
    let norm = g.horizon() * n as f64;
    t_values
        .iter()
        .map(|&t| {
            let within: f64 = by_depth[1..=t as usize].iter().sum();
            (t, within / norm)
        })
        .collect()
}

/// Smallest `T` after which the mean neighborhood grows by less than
/// `epsilon` (relative). `means[i]` is the mean for `T = i + 1`; returns the
/// largest `T` when growth never drops below `epsilon`.
pub fn saturation_threshold(means: &[f64], epsilon: f64) -> Result<u32> {
    if means.len() < 2 {
        return Err(Error::config("need at least two T values to find a saturation point"));
    }
    if epsilon.is_nan() || epsilon <= 0.0 {
        return Err(Error::config("epsilon must be positive"));
    }
    const TINY: f64 = 1e-12;
    for (i, w) in means.windows(2).enumerate() {
        if (w[1] - w[0]) / w[0].max(TINY) < epsilon {
            return Ok(i as u32 + 1);
        }
    }
    Ok(means.len() as u32)
}
