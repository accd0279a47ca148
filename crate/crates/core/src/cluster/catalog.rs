//! Registry of the bundled cluster geometries.

use std::sync::OnceLock;

use serde::Serialize;

use super::{ClusterFile, ClusterSpec};
use crate::error::{Error, Result};
use crate::model::ChannelKind;
use crate::tables;

const BUILTIN_JSON: &str = include_str!("../../catalog/builtin.json");

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum CalibrationStatus {
    Verified,
    Unverified,
}

impl std::fmt::Display for CalibrationStatus {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            CalibrationStatus::Verified => "verified",
            CalibrationStatus::Unverified => "unverified",
        })
    }
}

/// A registered cluster with the channel it belongs to and its tabulated
/// threshold column.
#[derive(Debug, Clone)]
pub struct ClusterEntry {
    pub spec: ClusterSpec,
    pub channel: ChannelKind,
    /// Thresholds at [`tables::LOSS_RATES`].
    pub reference: &'static [f64; 6],
    /// Tolerance used when calibrating against `reference`.
    pub tolerance: f64,
    /// Recorded outcome of the calibration run (re-checked by the test suite).
    pub status: CalibrationStatus,
}

// Calibration outcomes, checked by `verify --suite full` and the acceptance tests.
const REGISTRY: [(&str, ChannelKind, &[f64; 6], f64, CalibrationStatus); 6] = [
    ("SINGLE", ChannelKind::Uncorrelated, &tables::SINGLE_COLUMN, 1e-4, CalibrationStatus::Verified),
    ("A", ChannelKind::Uncorrelated, &tables::A_COLUMN, 2e-4, CalibrationStatus::Verified),
    ("B", ChannelKind::Uncorrelated, &tables::B_COLUMN, 5e-4, CalibrationStatus::Verified),
    ("C", ChannelKind::Depolarizing, &tables::C_COLUMN, 1e-4, CalibrationStatus::Verified),
    ("D", ChannelKind::Depolarizing, &tables::D_COLUMN, 5e-4, CalibrationStatus::Verified),
    ("E", ChannelKind::Depolarizing, &tables::E_COLUMN, 5e-4, CalibrationStatus::Verified),
];

fn registry() -> &'static [ClusterEntry] {
    static CELL: OnceLock<Vec<ClusterEntry>> = OnceLock::new();
    CELL.get_or_init(|| {
        let files: Vec<ClusterFile> =
            serde_json::from_str(BUILTIN_JSON).expect("bundled catalog parses");
        REGISTRY
            .iter()
            .map(|&(name, channel, reference, tolerance, status)| {
                let file = files
                    .iter()
                    .find(|f| f.name == name)
                    .unwrap_or_else(|| panic!("bundled catalog lacks `{name}`"))
                    .clone();
                let spec = ClusterSpec::from_file(file).expect("bundled cluster is valid");
                ClusterEntry { spec, channel, reference, tolerance, status }
            })
            .collect()
    })
}

pub fn builtin_names() -> impl Iterator<Item = &'static str> {
    REGISTRY.iter().map(|r| r.0)
}

pub fn builtin_entries() -> &'static [ClusterEntry] {
    registry()
}

/// Case-insensitive lookup of a registered cluster entry.
pub fn builtin_entry(name: &str) -> Result<&'static ClusterEntry> {
    registry()
        .iter()
        .find(|e| e.spec.name().eq_ignore_ascii_case(name))
        .ok_or_else(|| Error::UnknownCluster(name.to_string()))
}

pub fn builtin_cluster(name: &str) -> Result<ClusterSpec> {
    builtin_entry(name).map(|e| e.spec.clone())
}

/// Parses a catalog file: either one cluster object or an array of them.
pub fn parse_catalog(text: &str) -> Result<Vec<ClusterSpec>> {
    let value: serde_json::Value =
        serde_json::from_str(text).map_err(|e| Error::InvalidCluster(e.to_string()))?;
    let files: Vec<ClusterFile> = match value {
        serde_json::Value::Array(_) => serde_json::from_value(value),
        _ => serde_json::from_value(value).map(|f| vec![f]),
    }
    .map_err(|e| Error::InvalidCluster(e.to_string()))?;
    if files.is_empty() {
        return Err(Error::InvalidCluster("catalog is empty".into()));
    }
    files.into_iter().map(ClusterSpec::from_file).collect()
}
