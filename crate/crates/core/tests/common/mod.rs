#![allow(dead_code)]

#[path = "../support/oracle.rs"]
mod oracle;

pub use oracle::*;

use nhood_core::{ContactInterval, ContactTrace};
use proptest::prelude::*;

/// Raw `(a, b, start, len)` tuples on an integer clock.
pub fn arb_trace(max_nodes: u32, max_intervals: usize) -> impl Strategy<Value = ContactTrace> {
    (2..=max_nodes).prop_flat_map(move |nodes| {
        prop::collection::vec((0..nodes, 0..nodes, 0u32..200, 1u32..60), 0..=max_intervals).prop_map(move |raw| {
            let ivs = raw
                .into_iter()
                .filter(|(a, b, _, _)| a != b)
                .map(|(a, b, s, l)| ContactInterval::new(n(a), n(b), s as f64, (s + l) as f64));
            ContactTrace::new(ivs, (0..nodes).map(n), Some(260.0)).unwrap()
        })
    })
}
