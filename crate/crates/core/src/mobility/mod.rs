//! Synthetic contact traces from pluggable mobility models.
//!
//! Every model plugs into the same engine: nodes walk from waypoint to
//! waypoint at a per-leg speed drawn from `[v_min, v_max]` with no pause,
//! positions are sampled every `tick`, and a pair is in contact while its
//! Euclidean distance is at most `comm_range`. A model only decides where
//! nodes start and where they head next.

mod community;
mod waypoint;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub use community::{CommunityConfig, CommunityModel};
pub use waypoint::RandomWaypoint;

use crate::error::{Error, Result};
use crate::trace_io::{ContactInterval, ContactTrace, NodeId};

pub type SimRng = ChaCha8Rng;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Point {
    pub x: f64,
    pub y: f64,
}

impl Point {
    pub fn distance(self, other: Point) -> f64 {
        (self.x - other.x).hypot(self.y - other.y)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct MobilityConfig {
    pub node_count: usize,
    pub width: f64,
    pub height: f64,
    pub v_min: f64,
    pub v_max: f64,
    pub comm_range: f64,
    pub duration: f64,
    pub tick: f64,
    pub seed: u64,
}

impl Default for MobilityConfig {
    /// 20 nodes for 9 hours on 50 x 60 m at 0-7 m/s.
    fn default() -> Self {
        MobilityConfig {
            node_count: 20,
            width: 50.0,
            height: 60.0,
            v_min: 0.0,
            v_max: 7.0,
            comm_range: 10.0,
            duration: 9.0 * 3600.0,
            tick: 1.0,
            seed: 1,
        }
    }
}

impl MobilityConfig {
    pub fn validate(&self) -> Result<()> {
        let fail = |msg: &str| Err(Error::config(msg));
        if self.node_count < 1 {
            return fail("node_count must be at least 1");
        }
        if !(self.width > 0.0 && self.height > 0.0) {
            return fail("width and height must be positive");
        }
        if !(0.0 <= self.v_min && self.v_min <= self.v_max && self.v_max.is_finite()) {
            return fail("speeds must satisfy 0 <= v_min <= v_max");
        }
        if self.comm_range.is_nan() || self.comm_range <= 0.0 {
            return fail("comm_range must be positive");
        }
        if self.tick.is_nan() || self.tick <= 0.0 {
            return fail("tick must be positive");
        }
        if !(self.duration >= self.tick && self.duration.is_finite()) {
            return fail("duration must be at least one tick");
        }
        Ok(())
    }

    pub fn uniform_point(&self, rng: &mut SimRng) -> Point {
        Point {
            x: rng.gen_range(0.0..=self.width),
            y: rng.gen_range(0.0..=self.height),
        }
    }

    fn draw_speed(&self, rng: &mut SimRng) -> f64 {
        rng.gen_range(self.v_min..=self.v_max)
    }
}

/// Where nodes spawn and where they go next.
pub trait MobilityModel: Send {
    fn name(&self) -> &'static str;

    /// Called once per generation run, before any position is drawn.
    fn reset(&mut self, _cfg: &MobilityConfig, _rng: &mut SimRng) {}

    fn initial_position(&mut self, node: usize, cfg: &MobilityConfig, rng: &mut SimRng) -> Point {
        self.next_waypoint(node, cfg, rng)
    }

    fn next_waypoint(&mut self, node: usize, cfg: &MobilityConfig, rng: &mut SimRng) -> Point;
}

/// Knobs a model factory may read; models ignore what they don't use.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModelParams {
    pub cell_rows: usize,
    pub cell_cols: usize,
    pub home_bias: f64,
}

impl Default for ModelParams {
    fn default() -> Self {
        let c = CommunityConfig::default();
        ModelParams {
            cell_rows: c.cell_rows,
            cell_cols: c.cell_cols,
            home_bias: c.home_bias,
        }
    }
}

pub type ModelFactory = fn(&ModelParams) -> Result<Box<dyn MobilityModel>>;

/// Mobility models by name.
pub struct MobilityRegistry {
    factories: Vec<(&'static str, ModelFactory)>,
}

impl MobilityRegistry {
    pub fn new() -> Self {
        MobilityRegistry { factories: Vec::new() }
    }

    /// `rwp` and `community`.
    pub fn with_defaults() -> Self {
        let mut registry = Self::new();
        registry.register("rwp", |_| Ok(Box::new(RandomWaypoint)));
        registry.register("community", |p| {
            Ok(Box::new(CommunityModel::new(p.cell_rows, p.cell_cols, p.home_bias)?))
        });
        registry
    }

    pub fn register(&mut self, name: &'static str, factory: ModelFactory) {
        self.factories.retain(|(n, _)| *n != name);
        self.factories.push((name, factory));
    }

    pub fn names(&self) -> Vec<&'static str> {
        self.factories.iter().map(|(n, _)| *n).collect()
    }

    pub fn create(&self, name: &str, params: &ModelParams) -> Result<Box<dyn MobilityModel>> {
        let (_, factory) = self
            .factories
            .iter()
            .find(|(n, _)| *n == name)
            .ok_or_else(|| Error::UnknownName {
                kind: "mobility model",
                name: name.to_string(),
                available: self.names().join(", "),
            })?;
        factory(params)
    }
}

impl Default for MobilityRegistry {
    fn default() -> Self {
        Self::with_defaults()
    }
}

struct Walker {
    pos: Point,
    target: Point,
    speed: f64,
}

/// Runs `model` under `cfg` and extracts the contact trace.
pub fn generate(model: &mut dyn MobilityModel, cfg: &MobilityConfig) -> Result<ContactTrace> {
    cfg.validate()?;
    let mut rng = SimRng::seed_from_u64(cfg.seed);
    model.reset(cfg, &mut rng);
    let n = cfg.node_count;
    let mut walkers: Vec<Walker> = (0..n)
        .map(|i| {
            let pos = model.initial_position(i, cfg, &mut rng);
            let target = model.next_waypoint(i, cfg, &mut rng);
            let speed = cfg.draw_speed(&mut rng);
            Walker { pos, target, speed }
        })
        .collect();

    let ticks = (cfg.duration / cfg.tick).floor() as u64;
    let mut open: Vec<Option<f64>> = vec![None; n * n];
    let mut raw = Vec::new();
    for k in 0..=ticks {
        let now = (k as f64 * cfg.tick).min(cfg.duration);
        for i in 0..n {
            for j in i + 1..n {
                let close = walkers[i].pos.distance(walkers[j].pos) <= cfg.comm_range;
                let slot = &mut open[i * n + j];
                match (close, *slot) {
                    (true, None) => *slot = Some(now),
                    (false, Some(start)) => {
                        raw.push(ContactInterval::new(NodeId(i as u32), NodeId(j as u32), start, now));
                        *slot = None;
                    }
                    _ => {}
                }
            }
        }
        if k == ticks {
            break;
        }
        for (i, w) in walkers.iter_mut().enumerate() {
            let mut left = cfg.tick;
            while left > 0.0 && w.speed > 0.0 {
                let need = w.pos.distance(w.target) / w.speed;
                if need <= left {
                    w.pos = w.target;
                    left -= need;
                    w.target = model.next_waypoint(i, cfg, &mut rng);
                    w.speed = cfg.draw_speed(&mut rng);
                } else {
                    let frac = left / need;
                    w.pos.x += (w.target.x - w.pos.x) * frac;
                    w.pos.y += (w.target.y - w.pos.y) * frac;
                    left = 0.0;
                }
            }
        }
    }
    for i in 0..n {
        for j in i + 1..n {
            if let Some(start) = open[i * n + j] {
                if start < cfg.duration {
                    raw.push(ContactInterval::new(
                        NodeId(i as u32),
                        NodeId(j as u32),
                        start,
                        cfg.duration,
                    ));
                }
            }
        }
    }
    ContactTrace::new(raw, (0..n as u32).map(NodeId), Some(cfg.duration))
}

pub fn generate_waypoint(cfg: &MobilityConfig) -> Result<ContactTrace> {
    generate(&mut RandomWaypoint, cfg)
}

pub fn generate_community(cfg: &CommunityConfig) -> Result<ContactTrace> {
    let mut model = CommunityModel::new(cfg.cell_rows, cfg.cell_cols, cfg.home_bias)?;
    generate(&mut model, &cfg.mobility)
}
