use super::{MobilityConfig, MobilityModel, Point, SimRng};

/// Waypoints drawn uniformly over the whole area.
#[derive(Debug, Default, Clone, Copy)]
pub struct RandomWaypoint;

impl MobilityModel for RandomWaypoint {
    fn name(&self) -> &'static str {
        "rwp"
    }

    fn next_waypoint(&mut self, _node: usize, cfg: &MobilityConfig, rng: &mut SimRng) -> Point {
        cfg.uniform_point(rng)
    }
}
