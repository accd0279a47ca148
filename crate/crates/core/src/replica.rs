//! Quenched duality gap `Δ(p, q) = E[ln x_0^cl] - E[ln x_0^cl*]`.
//!
//! The replicated duality condition is reduced at `n → 0`, which turns the
//! equality of replicated cluster factors into equality of quenched averages
//! of their logarithms. The average runs over independent per-slot disorder,
//! either exactly or by Monte Carlo with common random numbers.

use rand_chacha::rand_core::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::cluster::ClusterSpec;
use crate::error::{Error, Result};
use crate::evaluate::{combine, evaluate, FactorTable, PartialProducts, Sums};
use crate::model::{disorder_distribution, nishimori_coupling, ChannelKind, ChannelSpec, EdgeDisorder, NishimoriCoupling};
use crate::numeric::CompensatedSum;

pub const DEFAULT_TERM_BUDGET: u64 = 100_000_000;
pub const MIN_MC_SAMPLES: usize = 1_000;

/// Size cap of the precomputed low-slot product table. The work partition
/// depends only on the cluster, never on the worker count.
const LOW_TABLE_ENTRIES: usize = 1 << 16;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum GapMethod {
    Exact,
    MonteCarlo,
}

impl std::fmt::Display for GapMethod {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            GapMethod::Exact => "exact",
            GapMethod::MonteCarlo => "monte_carlo",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GapEvaluation {
    pub delta: f64,
    pub method: GapMethod,
    /// Zero for exact evaluations.
    pub std_error: f64,
    /// Assignments enumerated or samples drawn.
    pub terms: u64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum GapPolicy {
    Exact { budget: u64 },
    MonteCarlo { samples: usize, seed: u64 },
    /// Exact when within budget, Monte Carlo otherwise.
    Auto { budget: u64, samples: usize, seed: u64 },
}

impl Default for GapPolicy {
    fn default() -> Self {
        GapPolicy::Exact { budget: DEFAULT_TERM_BUDGET }
    }
}

/// Gap on the Nishimori line of `channel`.
pub fn gap(channel: &ChannelSpec, cluster: &ClusterSpec, policy: GapPolicy) -> Result<GapEvaluation> {
    let k = nishimori_coupling(channel)?;
    gap_at_coupling(channel, cluster, policy, k)
}

/// Gap with disorder drawn from `channel` but evaluated at coupling `K`.
pub fn gap_at_coupling(
    channel: &ChannelSpec,
    cluster: &ClusterSpec,
    policy: GapPolicy,
    coupling: NishimoriCoupling,
) -> Result<GapEvaluation> {
    if channel.kind().layers() != cluster.layers() {
        return Err(Error::Domain(format!(
            "{} channel needs a {}-layer cluster, `{}` has {}",
            channel.kind(),
            channel.kind().layers(),
            cluster.name(),
            cluster.layers()
        )));
    }
    match policy {
        GapPolicy::Exact { budget } => exact(channel, cluster, coupling, budget),
        GapPolicy::MonteCarlo { samples, seed } => monte_carlo(channel, cluster, coupling, samples, seed),
        GapPolicy::Auto { budget, samples, seed } => match exact(channel, cluster, coupling, budget) {
            Err(Error::TooManyTerms { .. }) => monte_carlo(channel, cluster, coupling, samples, seed),
            other => other,
        },
    }
}

/// Size of the full enumeration for a cluster, counting every support state.
pub fn enumeration_size(kind: ChannelKind, cluster: &ClusterSpec) -> u128 {
    let m: u128 = if kind.layers() == 1 { 3 } else { 5 };
    m.checked_pow(cluster.slot_count() as u32).unwrap_or(u128::MAX)
}

fn exact(channel: &ChannelSpec, cluster: &ClusterSpec, coupling: NishimoriCoupling, budget: u64) -> Result<GapEvaluation> {
    let full = enumeration_size(channel.kind(), cluster);
    if full > budget as u128 {
        return Err(Error::TooManyTerms { terms: full, budget });
    }
    let dist = disorder_distribution(channel);
    let (states, probs): (Vec<EdgeDisorder>, Vec<f64>) = dist.positive_entries().copied().unzip();
    let table = FactorTable::new(&states, coupling);
    let m = states.len();
    let slots = cluster.slot_count();
    let configs = cluster.config_count();
    let total = (m as u64).pow(slots as u32);

    // slots 0..split are tabulated once for every low assignment; each work
    // unit is one assignment of the remaining slots
    let mut split = 0;
    while split < slots && m.pow(split as u32 + 1) * configs <= LOW_TABLE_ENTRIES {
        split += 1;
    }
    let low_count = m.pow(split as u32);
    let high_count = (m as u64).pow((slots - split) as u32);

    let decode = |mut index: u64, out: &mut [usize]| {
        for d in out.iter_mut() {
            *d = (index % m as u64) as usize;
            index /= m as u64;
        }
    };
    let mut low_primal = Vec::with_capacity(low_count * configs);
    let mut low_dual = Vec::with_capacity(low_count * configs);
    let mut low_scale = Vec::with_capacity(low_count);
    let mut low_prob = Vec::with_capacity(low_count);
    let mut low_digits = vec![0usize; split];
    let mut part = PartialProducts::default();
    for l in 0..low_count {
        decode(l as u64, &mut low_digits);
        part.fill(cluster, &table, 0, &low_digits);
        low_primal.extend_from_slice(&part.primal);
        low_dual.extend_from_slice(&part.dual);
        low_scale.push((part.primal_log_scale, part.dual_log_scale));
        low_prob.push(low_digits.iter().map(|&d| probs[d]).product::<f64>());
    }

    let partials: Vec<Result<f64>> = (0..high_count)
        .into_par_iter()
        .map_init(PartialProducts::default, |high, h| {
            let mut high_digits = vec![0usize; slots - split];
            decode(h, &mut high_digits);
            high.fill(cluster, &table, split, &high_digits);
            let high_prob: f64 = high_digits.iter().map(|&d| probs[d]).product();
            let mut acc = CompensatedSum::new();
            for l in 0..low_count {
                let range = l * configs..(l + 1) * configs;
                let low = (&low_primal[range.clone()], &low_dual[range], low_scale[l].0, low_scale[l].1);
                let sums = combine(cluster, &table, low, high, || {
                    let mut all = vec![0usize; split];
                    decode(l as u64, &mut all);
                    all.extend_from_slice(&high_digits);
                    all
                });
                acc.add(low_prob[l] * high_prob * log_gap_from(cluster, sums)?);
            }
            Ok(acc.value())
        })
        .collect();

    let mut acc = CompensatedSum::new();
    for part in partials {
        acc.add(part?);
    }
    Ok(GapEvaluation { delta: acc.value(), method: GapMethod::Exact, std_error: 0.0, terms: total })
}

/// `ln x_0^cl - ln x_0^cl*` for one assignment given as table indices.
fn log_gap(cluster: &ClusterSpec, table: &FactorTable, states: &[usize]) -> Result<f64> {
    log_gap_from(cluster, evaluate(cluster, table, states))
}

fn log_gap_from(cluster: &ClusterSpec, s: Sums) -> Result<f64> {
    if s.dual_scaled.is_nan() || s.dual_scaled <= 0.0 {
        return Err(Error::NonPositiveDual { cluster: cluster.name().to_string(), value: s.dual_scaled });
    }
    Ok(s.log_primal - s.dual_log_scale - s.dual_scaled.ln())
}

/// Monte Carlo estimate of the gap on the Nishimori line.
///
/// Sample `i`, slot `s` uses the `s`-th output of ChaCha8 stream `i` under
/// `seed`, mapped through the inverse CDF of the disorder distribution. The
/// uniforms do not depend on `p`, so repeated calls during root finding share
/// random numbers.
pub fn gap_monte_carlo(channel: &ChannelSpec, cluster: &ClusterSpec, samples: usize, seed: u64) -> Result<GapEvaluation> {
    let k = nishimori_coupling(channel)?;
    gap_at_coupling(channel, cluster, GapPolicy::MonteCarlo { samples, seed }, k)
}

fn monte_carlo(
    channel: &ChannelSpec,
    cluster: &ClusterSpec,
    coupling: NishimoriCoupling,
    samples: usize,
    seed: u64,
) -> Result<GapEvaluation> {
    if samples < MIN_MC_SAMPLES {
        return Err(Error::Domain(format!("need at least {MIN_MC_SAMPLES} samples, got {samples}")));
    }
    let dist = disorder_distribution(channel);
    let (states, probs): (Vec<EdgeDisorder>, Vec<f64>) = dist.entries().iter().copied().unzip();
    let table = FactorTable::new(&states, coupling);
    let mut cdf: Vec<f64> = probs
        .iter()
        .scan(0.0, |c, &w| {
            *c += w;
            Some(*c)
        })
        .collect();
    // absorb rounding in the total into the last state that can occur
    let last = probs.iter().rposition(|&w| w > 0.0).expect("distribution has mass");
    cdf[last] = f64::INFINITY;
    let slots = cluster.slot_count();
    let base = ChaCha8Rng::seed_from_u64(seed);

    let values: Vec<Result<f64>> = (0..samples as u64)
        .into_par_iter()
        .map_init(
            || (base.clone(), vec![0usize; slots]),
            |(rng, picks), i| {
                rng.set_stream(i);
                rng.set_word_pos(0);
                for pick in picks.iter_mut() {
                    let u = (rng.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64);
                    *pick = cdf.iter().position(|&c| u < c).unwrap();
                }
                log_gap(cluster, &table, picks)
            },
        )
        .collect();
    let values: Vec<f64> = values.into_iter().collect::<Result<_>>()?;

    let n = values.len() as f64;
    let mean = values.iter().copied().collect::<CompensatedSum>().value() / n;
    let ss = values.iter().map(|v| (v - mean) * (v - mean)).collect::<CompensatedSum>().value();
    let std_error = (ss / (n - 1.0) / n).sqrt();
    Ok(GapEvaluation { delta: mean, method: GapMethod::MonteCarlo, std_error, terms: samples as u64 })
}

/// Analytic gap of the one-slot clusters (single bond, single crossing slot).
pub fn gap_closed_form_single(kind: ChannelKind, p: f64, q: f64) -> Result<f64> {
    let k = nishimori_coupling(&ChannelSpec::new(kind, p, q)?)?.value();
    let ln2 = std::f64::consts::LN_2;
    Ok(match kind {
        ChannelKind::Uncorrelated => {
            let ln_cosh = k + (-2.0 * k).exp().ln_1p() - ln2;
            (1.0 - q) * (1.0 - 2.0 * p) * k - 0.5 * ln2 - (1.0 - q) * ln_cosh
        }
        ChannelKind::Depolarizing => {
            let ln_dual = 3.0 * k + (3.0 * (-4.0 * k).exp()).ln_1p() - ln2;
            (1.0 - q) * (3.0 - 4.0 * p) * k - q * ln2 - (1.0 - q) * ln_dual
        }
    })
}
