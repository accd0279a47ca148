//! Noise channels, Nishimori-line couplings and diluted disorder distributions.
//!
//! The uncorrelated channel flips X and Z independently with rate `p`; its
//! spin-glass image is two independent ±J Ising layers, so a single layer
//! carries all the information. The depolarizing channel applies X, Y, Z each
//! with rate `p/3`; its image is a two-layer model with a four-body cross
//! term. A lost qubit (rate `q`) dilutes the corresponding bond on every layer.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Lower clamp on `p`; the coupling diverges logarithmically at `p = 0`.
pub const MIN_ERROR_RATE: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ChannelKind {
    Uncorrelated,
    Depolarizing,
}

impl ChannelKind {
    /// Number of coupled Ising layers in the spin-glass image.
    pub fn layers(self) -> u8 {
        match self {
            ChannelKind::Uncorrelated => 1,
            ChannelKind::Depolarizing => 2,
        }
    }

    /// Largest `p` for which the Nishimori coupling is non-negative.
    pub fn max_error_rate(self) -> f64 {
        match self {
            ChannelKind::Uncorrelated => 0.5,
            ChannelKind::Depolarizing => 0.75,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            ChannelKind::Uncorrelated => "uncorrelated",
            ChannelKind::Depolarizing => "depolarizing",
        }
    }
}

impl std::fmt::Display for ChannelKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

impl std::str::FromStr for ChannelKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "uncorrelated" | "ind" | "independent" => Ok(ChannelKind::Uncorrelated),
            "depolarizing" | "dep" => Ok(ChannelKind::Depolarizing),
            other => Err(Error::Domain(format!("unknown channel `{other}`"))),
        }
    }
}

/// Noise channel with physical error rate `p` and loss rate `q`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ChannelSpec {
    kind: ChannelKind,
    p: f64,
    q: f64,
}

impl ChannelSpec {
    pub fn new(kind: ChannelKind, p: f64, q: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&p) {
            return Err(Error::Domain(format!("error rate p = {p} outside [0, 1]")));
        }
        if !(0.0..=1.0).contains(&q) {
            return Err(Error::Domain(format!("loss rate q = {q} outside [0, 1]")));
        }
        Ok(ChannelSpec { kind, p, q })
    }

    pub fn kind(&self) -> ChannelKind {
        self.kind
    }

    pub fn p(&self) -> f64 {
        self.p
    }

    pub fn q(&self) -> f64 {
        self.q
    }

    /// Same channel and loss rate at a different error rate.
    pub fn with_p(&self, p: f64) -> Result<Self> {
        ChannelSpec::new(self.kind, p, self.q)
    }
}

/// Dimensionless coupling `K` on the Nishimori line.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize, Deserialize)]
pub struct NishimoriCoupling(f64);

impl NishimoriCoupling {
    /// Wraps an arbitrary finite, non-negative coupling. Used for evaluating
    /// cluster factors away from the Nishimori line.
    pub fn from_value(k: f64) -> Result<Self> {
        if k.is_finite() && k >= 0.0 {
            Ok(NishimoriCoupling(k))
        } else {
            Err(Error::Domain(format!("coupling K = {k} must be finite and >= 0")))
        }
    }

    pub fn value(self) -> f64 {
        self.0
    }
}

/// `K = ½ ln((1-p)/p)` (uncorrelated) or `K = ¼ ln(3(1-p)/p)` (depolarizing).
pub fn nishimori_coupling(channel: &ChannelSpec) -> Result<NishimoriCoupling> {
    let p = channel.p();
    let p_max = channel.kind().max_error_rate();
    if !(MIN_ERROR_RATE..=p_max).contains(&p) {
        return Err(Error::Domain(format!(
            "p = {p} outside [{MIN_ERROR_RATE}, {p_max}] for the {} channel",
            channel.kind()
        )));
    }
    let k = match channel.kind() {
        ChannelKind::Uncorrelated => 0.5 * ((1.0 - p) / p).ln(),
        ChannelKind::Depolarizing => 0.25 * (3.0 * (1.0 - p) / p).ln(),
    };
    // rounding at the upper endpoint can leave a -0 or -1e-17
    Ok(NishimoriCoupling(k.max(0.0)))
}

/// Quenched state of one bond: single layer `τ ∈ {+1,-1,0}` or a pair
/// `(τ, τ*)` whose only diluted state is `(0, 0)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum EdgeDisorder {
    Single(i8),
    Pair(i8, i8),
}

impl EdgeDisorder {
    pub fn single(tau: i8) -> Result<Self> {
        match tau {
            -1..=1 => Ok(EdgeDisorder::Single(tau)),
            _ => Err(Error::Domain(format!("bond sign {tau} not in {{-1, 0, 1}}"))),
        }
    }

    pub fn pair(tau: i8, tau_dual: i8) -> Result<Self> {
        match (tau, tau_dual) {
            (0, 0) => Ok(EdgeDisorder::Pair(0, 0)),
            (-1 | 1, -1 | 1) => Ok(EdgeDisorder::Pair(tau, tau_dual)),
            _ => Err(Error::Domain(format!(
                "bond pair ({tau}, {tau_dual}) must be (±1, ±1) or (0, 0)"
            ))),
        }
    }

    pub fn diluted(layers: u8) -> Self {
        if layers == 1 {
            EdgeDisorder::Single(0)
        } else {
            EdgeDisorder::Pair(0, 0)
        }
    }

    pub fn is_diluted(&self) -> bool {
        matches!(self, EdgeDisorder::Single(0) | EdgeDisorder::Pair(0, 0))
    }

    pub fn layers(&self) -> u8 {
        match self {
            EdgeDisorder::Single(_) => 1,
            EdgeDisorder::Pair(..) => 2,
        }
    }

    /// Flip the primal-layer sign (gauge transformation of one endpoint).
    pub fn flipped(&self) -> Self {
        match *self {
            EdgeDisorder::Single(t) => EdgeDisorder::Single(-t),
            EdgeDisorder::Pair(t, d) => EdgeDisorder::Pair(-t, d),
        }
    }
}

/// Discrete distribution over bond states, identical and independent per slot.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DisorderDistribution {
    entries: Vec<(EdgeDisorder, f64)>,
}

impl DisorderDistribution {
    pub fn new(entries: Vec<(EdgeDisorder, f64)>) -> Result<Self> {
        if entries.is_empty() {
            return Err(Error::Domain("empty disorder distribution".into()));
        }
        let layers = entries[0].0.layers();
        for (i, (d, w)) in entries.iter().enumerate() {
            if !(w.is_finite() && *w >= 0.0) {
                return Err(Error::Domain(format!("negative or non-finite probability {w}")));
            }
            if d.layers() != layers {
                return Err(Error::Domain("mixed layer counts in distribution".into()));
            }
            if entries[..i].iter().any(|(o, _)| o == d) {
                return Err(Error::Domain(format!("duplicate support entry {d:?}")));
            }
        }
        let total: f64 = entries.iter().map(|(_, w)| w).sum();
        if (total - 1.0).abs() > 1e-15 {
            return Err(Error::Domain(format!("probabilities sum to {total}, not 1")));
        }
        Ok(DisorderDistribution { entries })
    }

    pub fn entries(&self) -> &[(EdgeDisorder, f64)] {
        &self.entries
    }

    pub fn layers(&self) -> u8 {
        self.entries[0].0.layers()
    }

    pub fn probability(&self, d: &EdgeDisorder) -> f64 {
        self.entries.iter().find(|(e, _)| e == d).map_or(0.0, |(_, w)| *w)
    }

    /// Entries with strictly positive probability, in support order.
    pub fn positive_entries(&self) -> impl Iterator<Item = &(EdgeDisorder, f64)> {
        self.entries.iter().filter(|(_, w)| *w > 0.0)
    }
}

/// Diluted disorder distribution of a channel. Support order is fixed:
/// unflipped state first, flipped states next, diluted state last.
pub fn disorder_distribution(channel: &ChannelSpec) -> DisorderDistribution {
    let (p, q) = (channel.p(), channel.q());
    let kept = 1.0 - q;
    let entries = match channel.kind() {
        ChannelKind::Uncorrelated => vec![
            (EdgeDisorder::Single(1), kept * (1.0 - p)),
            (EdgeDisorder::Single(-1), kept * p),
            (EdgeDisorder::Single(0), q),
        ],
        ChannelKind::Depolarizing => {
            let flip = kept * p / 3.0;
            vec![
                (EdgeDisorder::Pair(1, 1), kept * (1.0 - p)),
                (EdgeDisorder::Pair(1, -1), flip),
                (EdgeDisorder::Pair(-1, 1), flip),
                (EdgeDisorder::Pair(-1, -1), flip),
                (EdgeDisorder::Pair(0, 0), q),
            ]
        }
    };
    // sums to 1 within a few ulps
    DisorderDistribution { entries }
}

/// Effective flip rate of a bond fused from `n` bonds of rate `p`:
/// `1 - 2 p_n = (1 - 2p)^n`, the probability of an odd number of flips.
pub fn superedge_error_rate(p: f64, n: u32) -> Result<f64> {
    if n == 0 {
        return Err(Error::Domain("superedge must fuse at least one bond".into()));
    }
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::Domain(format!("error rate p = {p} outside [0, 1]")));
    }
    if n == 1 {
        return Ok(p);
    }
    Ok(0.5 * (1.0 - (1.0 - 2.0 * p).powi(n as i32)))
}
