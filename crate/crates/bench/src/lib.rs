//! Fixtures shared by the benchmarks.

use dualthresh_core::cluster::catalog::builtin_entry;
use dualthresh_core::{ChannelKind, ChannelSpec, ClusterSpec, EdgeDisorder};

/// Registered cluster with its channel.
pub fn fixture(name: &str) -> (ClusterSpec, ChannelKind) {
    let e = builtin_entry(name).expect("registered cluster");
    (e.spec.clone(), e.channel)
}

/// A mixed, deterministic bond assignment for `cluster`.
pub fn mixed_assignment(cluster: &ClusterSpec) -> Vec<EdgeDisorder> {
    (0..cluster.slot_count())
        .map(|s| match (cluster.layers(), s % 3) {
            (1, 0) => EdgeDisorder::Single(1),
            (1, 1) => EdgeDisorder::Single(-1),
            (1, _) => EdgeDisorder::Single(0),
            (_, 0) => EdgeDisorder::Pair(1, 1),
            (_, 1) => EdgeDisorder::Pair(-1, 1),
            _ => EdgeDisorder::Pair(0, 0),
        })
        .collect()
}

pub fn channel_near_threshold(kind: ChannelKind) -> ChannelSpec {
    let p = match kind {
        ChannelKind::Uncorrelated => 0.09,
        ChannelKind::Depolarizing => 0.16,
    };
    ChannelSpec::new(kind, p, 0.1).expect("valid channel")
}
