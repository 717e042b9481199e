use rand::Rng;

use super::{MobilityConfig, MobilityModel, Point, SimRng};
use crate::error::{Error, Result};

/// Random waypoint biased toward a per-node home cell.
///
/// The area is split into `cell_rows x cell_cols` cells and every node gets
/// a home cell drawn uniformly at reset. Nodes spawn in their home cell;
/// each next waypoint lies in the home cell with probability `home_bias`
/// and anywhere in the area otherwise.
#[derive(Debug, Clone)]
pub struct CommunityModel {
    cell_rows: usize,
    cell_cols: usize,
    home_bias: f64,
    fixed_homes: Option<Vec<usize>>,
    homes: Vec<usize>,
}

impl CommunityModel {
    pub fn new(cell_rows: usize, cell_cols: usize, home_bias: f64) -> Result<Self> {
        if cell_rows == 0 || cell_cols == 0 {
            return Err(Error::config("community grid needs at least one cell"));
        }
        if !(0.0..=1.0).contains(&home_bias) {
            return Err(Error::config(format!("home_bias must be in [0, 1], got {home_bias}")));
        }
        Ok(CommunityModel {
            cell_rows,
            cell_cols,
            home_bias,
            fixed_homes: None,
            homes: Vec::new(),
        })
    }

    /// Pins node `i` to cell `homes[i]` (row-major) instead of drawing it.
    pub fn with_homes(mut self, homes: Vec<usize>) -> Result<Self> {
        let cells = self.cell_rows * self.cell_cols;
        if let Some(bad) = homes.iter().find(|&&h| h >= cells) {
            return Err(Error::config(format!("home cell {bad} outside a {cells}-cell grid")));
        }
        self.fixed_homes = Some(homes);
        Ok(self)
    }

    pub fn homes(&self) -> &[usize] {
        &self.homes
    }

    fn point_in_cell(&self, cell: usize, cfg: &MobilityConfig, rng: &mut SimRng) -> Point {
        let w = cfg.width / self.cell_cols as f64;
        let h = cfg.height / self.cell_rows as f64;
        let (row, col) = (cell / self.cell_cols, cell % self.cell_cols);
        Point {
            x: col as f64 * w + rng.gen_range(0.0..=w),
            y: row as f64 * h + rng.gen_range(0.0..=h),
        }
    }
}

impl MobilityModel for CommunityModel {
    fn name(&self) -> &'static str {
        "community"
    }

    fn reset(&mut self, cfg: &MobilityConfig, rng: &mut SimRng) {
        let cells = self.cell_rows * self.cell_cols;
        self.homes = match &self.fixed_homes {
            Some(fixed) if fixed.len() >= cfg.node_count => fixed.clone(),
            _ => (0..cfg.node_count).map(|_| rng.gen_range(0..cells)).collect(),
        };
    }

    fn initial_position(&mut self, node: usize, cfg: &MobilityConfig, rng: &mut SimRng) -> Point {
        self.point_in_cell(self.homes[node], cfg, rng)
    }

    fn next_waypoint(&mut self, node: usize, cfg: &MobilityConfig, rng: &mut SimRng) -> Point {
        if rng.gen_bool(self.home_bias) {
            self.point_in_cell(self.homes[node], cfg, rng)
        } else {
            cfg.uniform_point(rng)
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CommunityConfig {
    pub mobility: MobilityConfig,
    pub cell_rows: usize,
    pub cell_cols: usize,
    pub home_bias: f64,
}

impl Default for CommunityConfig {
    fn default() -> Self {
        CommunityConfig {
            mobility: MobilityConfig {
                node_count: 50,
                width: 1500.0,
                height: 2500.0,
                v_min: 0.5,
                v_max: 1.5,
                comm_range: 150.0,
                ..MobilityConfig::default()
            },
            cell_rows: 5,
            cell_cols: 3,
            home_bias: 0.9,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mobility::{generate, generate_community};
    use crate::trace_io::NodeId;

    #[test]
    fn rejects_bad_parameters() {
        assert!(CommunityModel::new(0, 3, 0.5).is_err());
        assert!(CommunityModel::new(2, 2, 1.5).is_err());
        assert!(CommunityModel::new(2, 2, 0.5).unwrap().with_homes(vec![4]).is_err());
    }

    #[test]
    fn housemates_meet_more_than_strangers() {
        // 10 x 10 cells of 10 m: a cell's diagonal (14.1 m) is inside range.
        let cfg = MobilityConfig {
            node_count: 4,
            width: 100.0,
            height: 100.0,
            v_min: 0.5,
            v_max: 2.0,
            comm_range: 15.0,
            duration: 2000.0,
            tick: 1.0,
            seed: 11,
        };
        let mut model = CommunityModel::new(10, 10, 1.0)
            .unwrap()
            .with_homes(vec![0, 0, 55, 99])
            .unwrap();
        let trace = generate(&mut model, &cfg).unwrap();
        let total =
            |a: u32, b: u32| -> f64 { trace.pair_intervals(NodeId(a), NodeId(b)).map(|iv| iv.duration()).sum() };
        assert_eq!(total(0, 1), 2000.0);
        for (a, b) in [(0, 2), (0, 3), (1, 2), (1, 3), (2, 3)] {
            assert!(total(0, 1) > total(a, b));
        }
    }

    #[test]
    fn deterministic_per_seed() {
        let mut cfg = CommunityConfig::default();
        cfg.mobility.duration = 300.0;
        cfg.mobility.node_count = 12;
        assert_eq!(generate_community(&cfg).unwrap(), generate_community(&cfg).unwrap());
    }
}
