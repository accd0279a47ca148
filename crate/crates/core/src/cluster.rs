//! Finite clusters with fixed boundary spins and their Boltzmann factors.
//!
//! A cluster is a small graph whose boundary spins are pinned to `+1` on every
//! layer while the internal spins are summed exactly. Each disorder slot binds
//! one primal bond and, for two-layer clusters, the dual-lattice bond crossing
//! it together with their four-body term.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::evaluate::{evaluate, FactorTable};
use crate::model::{EdgeDisorder, NishimoriCoupling};

pub mod catalog;

pub use catalog::{builtin_cluster, builtin_names, CalibrationStatus, ClusterEntry};

/// Upper limit on summed spins; `2^24` configurations per factor.
pub const MAX_INTERNAL_SPINS: usize = 24;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum VertexRole {
    Internal,
    Boundary,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Sublattice {
    Primal,
    Dual,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Vertex {
    pub id: String,
    pub role: VertexRole,
    pub layer: Sublattice,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Slot {
    pub primal_edge: [String; 2],
    pub dual_edge: Option<[String; 2]>,
}

/// On-disk form of a cluster; see `docs/cluster-format.md`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ClusterFile {
    pub name: String,
    pub layers: u8,
    pub vertices: Vec<Vertex>,
    pub slots: Vec<Slot>,
}

/// A validated cluster together with its precomputed parity table.
#[derive(Debug, Clone, PartialEq)]
pub struct ClusterSpec {
    file: ClusterFile,
    internal: usize,
    /// `parities[c * slots + s]`: component index of slot `s` in internal
    /// configuration `c` (primal parity, or `2 * primal + dual`).
    parities: Vec<u8>,
    /// `flips[s][k]`: internal spins whose parity is toggled when slot `s`
    /// takes component `k`, as a bit mask.
    flips: Vec<[u32; 4]>,
}

/// Internal-spin limit for the parity-state recursion over slots.
pub(crate) const MAX_PARITY_STATES_BITS: usize = 16;

impl ClusterSpec {
    pub fn from_file(file: ClusterFile) -> Result<Self> {
        let bad = |msg: String| Err(Error::InvalidCluster(format!("{}: {msg}", file.name)));
        if file.name.is_empty() {
            return Err(Error::InvalidCluster("cluster name is empty".into()));
        }
        if !(1..=2).contains(&file.layers) {
            return bad(format!("layers must be 1 or 2, got {}", file.layers));
        }
        if file.slots.is_empty() {
            return bad("no slots".into());
        }
        for (i, v) in file.vertices.iter().enumerate() {
            if file.vertices[..i].iter().any(|o| o.id == v.id) {
                return bad(format!("duplicate vertex id `{}`", v.id));
            }
            if file.layers == 1 && v.layer == Sublattice::Dual {
                return bad(format!("single-layer cluster has dual vertex `{}`", v.id));
            }
        }
        let internal_ids: Vec<&str> = file
            .vertices
            .iter()
            .filter(|v| v.role == VertexRole::Internal)
            .map(|v| v.id.as_str())
            .collect();
        if internal_ids.len() > MAX_INTERNAL_SPINS {
            return bad(format!(
                "{} internal spins exceeds the limit of {MAX_INTERNAL_SPINS}",
                internal_ids.len()
            ));
        }

        let lookup = |id: &str, layer: Sublattice| -> std::result::Result<Option<usize>, String> {
            let v = file
                .vertices
                .iter()
                .find(|v| v.id == id)
                .ok_or_else(|| format!("edge references unknown vertex `{id}`"))?;
            if v.layer != layer {
                return Err(format!("vertex `{id}` is on the wrong sublattice"));
            }
            Ok(internal_ids.iter().position(|&i| i == id))
        };
        // per slot: internal-spin positions of the primal and dual endpoints
        let mut ends: Vec<[Option<usize>; 4]> = Vec::with_capacity(file.slots.len());
        for slot in &file.slots {
            let [a, b] = &slot.primal_edge;
            if a == b {
                return bad(format!("self-loop on `{a}`"));
            }
            let mut e = [None; 4];
            e[0] = lookup(a, Sublattice::Primal).or_else(bad_str(&file.name))?;
            e[1] = lookup(b, Sublattice::Primal).or_else(bad_str(&file.name))?;
            match (&slot.dual_edge, file.layers) {
                (None, 1) => {}
                (Some([c, d]), 2) => {
                    if c == d {
                        return bad(format!("self-loop on `{c}`"));
                    }
                    e[2] = lookup(c, Sublattice::Dual).or_else(bad_str(&file.name))?;
                    e[3] = lookup(d, Sublattice::Dual).or_else(bad_str(&file.name))?;
                }
                (None, _) => return bad("two-layer slot without a dual edge".into()),
                (Some(_), _) => return bad("single-layer slot with a dual edge".into()),
            }
            ends.push(e);
        }

        let internal = internal_ids.len();
        let slots = file.slots.len();
        let configs = 1usize << internal;
        let mut parities = Vec::with_capacity(configs * slots);
        // bit i of the configuration counter set <=> internal spin i is -1
        let flip = |c: usize, end: Option<usize>| end.map_or(0u8, |i| ((c >> i) & 1) as u8);
        for c in 0..configs {
            for e in &ends {
                let primal = flip(c, e[0]) ^ flip(c, e[1]);
                let code = if file.layers == 1 {
                    primal
                } else {
                    2 * primal + (flip(c, e[2]) ^ flip(c, e[3]))
                };
                parities.push(code);
            }
        }
        let bit = |end: Option<usize>| end.map_or(0u32, |i| 1 << i);
        let flips = ends
            .iter()
            .map(|e| {
                let primal = bit(e[0]) ^ bit(e[1]);
                let dual = bit(e[2]) ^ bit(e[3]);
                if file.layers == 1 {
                    [0, primal, 0, 0]
                } else {
                    [0, dual, primal, primal ^ dual]
                }
            })
            .collect();
        Ok(ClusterSpec { file, internal, parities, flips })
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let file: ClusterFile =
            serde_json::from_str(text).map_err(|e| Error::InvalidCluster(e.to_string()))?;
        ClusterSpec::from_file(file)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&self.file).expect("cluster file serialises")
    }

    pub fn file(&self) -> &ClusterFile {
        &self.file
    }

    pub fn name(&self) -> &str {
        &self.file.name
    }

    pub fn layers(&self) -> u8 {
        self.file.layers
    }

    pub fn slot_count(&self) -> usize {
        self.file.slots.len()
    }

    /// Total number of summed spins over all layers.
    pub fn internal_count(&self) -> usize {
        self.internal
    }

    pub fn config_count(&self) -> usize {
        1 << self.internal
    }

    /// Component indices of every slot for internal configuration `config`.
    pub fn parity_row(&self, config: usize) -> &[u8] {
        let s = self.slot_count();
        &self.parities[config * s..(config + 1) * s]
    }

    pub(crate) fn flips(&self) -> &[[u32; 4]] {
        &self.flips
    }

    /// Slot indices whose primal bond touches the given vertex.
    pub fn incident_slots(&self, vertex_id: &str) -> Vec<usize> {
        self.file
            .slots
            .iter()
            .enumerate()
            .filter(|(_, s)| s.primal_edge.iter().any(|v| v == vertex_id))
            .map(|(i, _)| i)
            .collect()
    }

    pub fn internal_primal_ids(&self) -> impl Iterator<Item = &str> {
        self.file
            .vertices
            .iter()
            .filter(|v| v.role == VertexRole::Internal && v.layer == Sublattice::Primal)
            .map(|v| v.id.as_str())
    }

    /// Copy of the cluster with slots reordered by `order`.
    pub fn permuted(&self, order: &[usize]) -> Result<Self> {
        let mut file = self.file.clone();
        file.slots = order.iter().map(|&i| self.file.slots[i].clone()).collect();
        if file.slots.len() != self.slot_count() {
            return Err(Error::InvalidCluster("permutation has wrong length".into()));
        }
        ClusterSpec::from_file(file)
    }

    pub(crate) fn check_disorder(&self, disorder: &DisorderAssignment) -> Result<()> {
        if disorder.len() != self.slot_count() {
            return Err(Error::ShapeMismatch { expected: self.slot_count(), got: disorder.len() });
        }
        if disorder.iter().any(|d| d.layers() != self.layers()) {
            return Err(Error::Domain(format!(
                "disorder layer count does not match {}-layer cluster `{}`",
                self.layers(),
                self.name()
            )));
        }
        Ok(())
    }
}

fn bad_str(name: &str) -> impl Fn(String) -> Result<Option<usize>> + '_ {
    move |msg| Err(Error::InvalidCluster(format!("{name}: {msg}")))
}

/// One bond state per slot.
pub type DisorderAssignment = [EdgeDisorder];

/// Natural log of a cluster factor together with its sign.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ClusterFactor {
    pub log_value: f64,
    pub sign: f64,
}

/// `ln x_0^cl`: exact sum over internal spins with boundary spins fixed `+1`.
pub fn cluster_partition(
    cluster: &ClusterSpec,
    disorder: &DisorderAssignment,
    coupling: NishimoriCoupling,
) -> Result<ClusterFactor> {
    cluster.check_disorder(disorder)?;
    let table = FactorTable::new(disorder, coupling);
    let states: Vec<usize> = (0..disorder.len()).collect();
    let v = evaluate(cluster, &table, &states).log_primal;
    if !v.is_finite() {
        return Err(Error::NonFinite { coupling: coupling.value() });
    }
    Ok(ClusterFactor { log_value: v, sign: 1.0 })
}

/// Checks that flipping every bond around any one internal primal spin leaves
/// the primal factor unchanged within `1e-12`. Vacuously true for clusters
/// without internal spins or with two layers.
pub fn gauge_orbit_check(
    cluster: &ClusterSpec,
    disorder: &DisorderAssignment,
    coupling: NishimoriCoupling,
) -> Result<bool> {
    if cluster.layers() != 1 {
        return Ok(true);
    }
    let base = cluster_partition(cluster, disorder, coupling)?.log_value;
    for id in cluster.internal_primal_ids() {
        let mut flipped = disorder.to_vec();
        for s in cluster.incident_slots(id) {
            flipped[s] = flipped[s].flipped();
        }
        let v = cluster_partition(cluster, &flipped, coupling)?.log_value;
        if (v - base).abs() > 1e-12 {
            return Ok(false);
        }
    }
    Ok(true)
}
