//! Optimal error thresholds of surface codes with qubit loss, located by the
//! cluster duality condition on the Nishimori line of the matching diluted
//! spin glass (±J Ising for the uncorrelated channel, random eight-vertex for
//! the depolarizing channel).
//!
//! ```
//! use dualthresh_core::{builtin_cluster, solve_threshold, ChannelKind, SolveOptions};
//!
//! let single = builtin_cluster("SINGLE").unwrap();
//! let r = solve_threshold(ChannelKind::Uncorrelated, &single, 0.0, &SolveOptions::default()).unwrap();
//! assert!((r.p_c - 0.11003).abs() < 1e-4);
//! ```

pub mod cluster;
pub mod duality;
pub mod error;
mod evaluate;
pub mod model;
pub mod numeric;
pub mod parallel;
pub mod replica;
pub mod solver;
pub mod tables;

pub use cluster::{
    builtin_cluster, cluster_partition, gauge_orbit_check, CalibrationStatus, ClusterFactor, ClusterFile, ClusterSpec,
};
pub use duality::{
    dual_cluster_partition, dual_edge_factor_single, dual_edge_factor_twolayer, pure_self_dual_point,
    EdgeFactorComponents,
};
pub use error::{Error, Result};
pub use model::{
    disorder_distribution, nishimori_coupling, superedge_error_rate, ChannelKind, ChannelSpec, DisorderDistribution,
    EdgeDisorder, NishimoriCoupling,
};
pub use replica::{gap, gap_closed_form_single, gap_monte_carlo, GapEvaluation, GapMethod, GapPolicy};
pub use solver::{reference_thresholds, solve_threshold, sweep, ReferenceThresholds, SolveOptions, ThresholdResult};
