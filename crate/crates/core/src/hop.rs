use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

/// Length of the shortest contemporaneous path between two nodes.
///
/// `Infinite` means no end-to-end path exists (or none within the search
/// cap). It orders after every finite value, so the same type doubles as a
/// BFS depth cap where `Infinite` means "unbounded".
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum HopDistance {
    Finite(u32),
    Infinite,
}

impl HopDistance {
    pub fn is_finite(self) -> bool {
        matches!(self, HopDistance::Finite(_))
    }

    pub fn finite(self) -> Option<u32> {
        match self {
            HopDistance::Finite(n) => Some(n),
            HopDistance::Infinite => None,
        }
    }

    /// True when a path of at most `t` hops exists.
    pub fn within(self, t: u32) -> bool {
        matches!(self, HopDistance::Finite(n) if n <= t)
    }
}

impl From<u32> for HopDistance {
    fn from(n: u32) -> Self {
        HopDistance::Finite(n)
    }
}

impl Ord for HopDistance {
    fn cmp(&self, other: &Self) -> Ordering {
        match (self, other) {
            (HopDistance::Finite(a), HopDistance::Finite(b)) => a.cmp(b),
            (HopDistance::Finite(_), HopDistance::Infinite) => Ordering::Less,
            (HopDistance::Infinite, HopDistance::Finite(_)) => Ordering::Greater,
            (HopDistance::Infinite, HopDistance::Infinite) => Ordering::Equal,
        }
    }
}

impl PartialOrd for HopDistance {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for HopDistance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            HopDistance::Finite(n) => write!(f, "{n}"),
            HopDistance::Infinite => f.write_str("inf"),
        }
    }
}

impl FromStr for HopDistance {
    type Err = std::num::ParseIntError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim() {
            "inf" | "INF" | "infinite" => Ok(HopDistance::Infinite),
            other => other.parse().map(HopDistance::Finite),
        }
    }
}
