//! Inner loops shared by the primal and dual cluster evaluators.
//!
//! Slot weights are looked up through a table of per-state components so the
//! replica enumerator can reuse one table for every disorder assignment. Both
//! sums run in the linear domain on components scaled by a per-state constant
//! (largest primal component, dual principal component), so every factor lies
//! in `[-1, 1]` and no exponentials are needed per configuration.

use crate::cluster::{ClusterSpec, MAX_PARITY_STATES_BITS};
use crate::duality::EdgeFactorComponents;
use crate::model::{EdgeDisorder, NishimoriCoupling};
use crate::numeric::log_sum_exp;

/// Scaled sums below this are recomputed in log space.
const UNDERFLOW_GUARD: f64 = 1e-280;

/// Scaled dual sums below this have lost too many digits to cancellation and
/// are recomputed from the even-subgraph expansion.
const CANCELLATION_GUARD: f64 = 1e-6;

#[derive(Debug, Clone)]
pub(crate) struct FactorTable {
    log_primal: Vec<[f64; 4]>,
    primal_log_scale: Vec<f64>,
    primal_ratio: Vec<[f64; 4]>,
    dual_log_principal: Vec<f64>,
    /// `x*_k / x*_0`; always in `[-1, 1]` because primal components are positive.
    dual_ratio: Vec<[f64; 4]>,
}

impl FactorTable {
    pub(crate) fn new(states: &[EdgeDisorder], coupling: NishimoriCoupling) -> Self {
        let n = states.len();
        let mut t = FactorTable {
            log_primal: Vec::with_capacity(n),
            primal_log_scale: Vec::with_capacity(n),
            primal_ratio: Vec::with_capacity(n),
            dual_log_principal: Vec::with_capacity(n),
            dual_ratio: Vec::with_capacity(n),
        };
        for d in states {
            let x = EdgeFactorComponents::boltzmann(d, coupling);
            let logs = x.log_components();
            let scale = logs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
            t.log_primal.push(logs);
            t.primal_log_scale.push(scale);
            t.primal_ratio.push(logs.map(|l| (l - scale).exp()));

            let c = x.dual().components();
            t.dual_log_principal.push(c[0].ln());
            t.dual_ratio.push(c.map(|ci| ci / c[0]));
        }
        t
    }
}

/// Primal and dual cluster sums for one assignment of table states.
#[derive(Debug, Clone, Copy)]
pub(crate) struct Sums {
    pub log_primal: f64,
    pub dual_log_scale: f64,
    /// Scaled dual sum; may be non-positive, which callers must reject.
    pub dual_scaled: f64,
}

pub(crate) fn evaluate(cluster: &ClusterSpec, table: &FactorTable, states: &[usize]) -> Sums {
    let mut primal = 0.0;
    let mut dual = 0.0;
    for c in 0..cluster.config_count() {
        let row = cluster.parity_row(c);
        let mut wp = 1.0;
        let mut wd = 1.0;
        for (&k, &st) in row.iter().zip(states) {
            wp *= table.primal_ratio[st][k as usize];
            wd *= table.dual_ratio[st][k as usize];
        }
        primal += wp;
        dual += wd;
    }
    let primal_scale: f64 = states.iter().map(|&st| table.primal_log_scale[st]).sum();
    let log_primal = if primal > UNDERFLOW_GUARD {
        primal_scale + primal.ln()
    } else {
        log_primal_slow(cluster, table, states)
    };
    let dual_log_scale = states.iter().map(|&st| table.dual_log_principal[st]).sum();
    guard_dual(cluster, table, Sums { log_primal, dual_log_scale, dual_scaled: dual }, || states.to_vec())
}

fn guard_dual(cluster: &ClusterSpec, table: &FactorTable, sums: Sums, states: impl FnOnce() -> Vec<usize>) -> Sums {
    if sums.dual_scaled >= CANCELLATION_GUARD {
        return sums;
    }
    match log_dual_even_expansion(cluster, table, &states()) {
        Some(v) => Sums { dual_log_scale: v, dual_scaled: 1.0, ..sums },
        None => sums,
    }
}

/// Dual sum rewritten as a sum over even subgraphs of primal weights.
///
/// Summing internal spins of `Π_s x*_{k_s}` leaves `2^n · norm^S · Σ_η Π_s x_{η_s}`
/// over component choices `η` with even degree at every internal vertex, where
/// `norm` is `1/√2` per single-layer slot and `1/2` per two-layer slot. The
/// constrained sum runs slot by slot over the parity vector of the internal
/// spins; every term is positive.
pub(crate) fn log_dual_even_expansion(cluster: &ClusterSpec, table: &FactorTable, states: &[usize]) -> Option<f64> {
    let n = cluster.internal_count();
    if n > MAX_PARITY_STATES_BITS {
        return None;
    }
    let components = if cluster.layers() == 1 { 2 } else { 4 };
    let mut weight = vec![0.0; 1 << n];
    let mut next = vec![0.0; 1 << n];
    weight[0] = 1.0;
    let mut log_scale = 0.0;
    for (flips, &st) in cluster.flips().iter().zip(states) {
        next.iter_mut().for_each(|w| *w = 0.0);
        let ratio = &table.primal_ratio[st];
        for (mask, &w) in weight.iter().enumerate() {
            if w == 0.0 {
                continue;
            }
            for k in 0..components {
                next[mask ^ flips[k] as usize] += w * ratio[k];
            }
        }
        let top = next.iter().cloned().fold(0.0, f64::max);
        next.iter_mut().for_each(|w| *w /= top);
        log_scale += table.primal_log_scale[st] + top.ln();
        std::mem::swap(&mut weight, &mut next);
    }
    if weight[0].is_nan() || weight[0] <= 0.0 {
        return None;
    }
    let norm = if cluster.layers() == 1 { std::f64::consts::FRAC_1_SQRT_2 } else { 0.5 };
    Some(log_scale + weight[0].ln() + n as f64 * std::f64::consts::LN_2 + states.len() as f64 * norm.ln())
}

/// Scaled per-configuration products over a contiguous slot range.
#[derive(Debug, Clone, Default)]
pub(crate) struct PartialProducts {
    pub primal: Vec<f64>,
    pub dual: Vec<f64>,
    pub primal_log_scale: f64,
    pub dual_log_scale: f64,
}

impl PartialProducts {
    /// Products over slots `first..first + states.len()`.
    pub(crate) fn fill(&mut self, cluster: &ClusterSpec, table: &FactorTable, first: usize, states: &[usize]) {
        let configs = cluster.config_count();
        self.primal.clear();
        self.dual.clear();
        for c in 0..configs {
            let row = &cluster.parity_row(c)[first..first + states.len()];
            let mut wp = 1.0;
            let mut wd = 1.0;
            for (&k, &st) in row.iter().zip(states) {
                wp *= table.primal_ratio[st][k as usize];
                wd *= table.dual_ratio[st][k as usize];
            }
            self.primal.push(wp);
            self.dual.push(wd);
        }
        self.primal_log_scale = states.iter().map(|&st| table.primal_log_scale[st]).sum();
        self.dual_log_scale = states.iter().map(|&st| table.dual_log_principal[st]).sum();
    }
}

/// Combines the products of two disjoint slot ranges. `states` covers the
/// whole cluster and is only read on the underflow path.
pub(crate) fn combine(
    cluster: &ClusterSpec,
    table: &FactorTable,
    low: (&[f64], &[f64], f64, f64),
    high: &PartialProducts,
    states: impl FnOnce() -> Vec<usize>,
) -> Sums {
    let (lp, ld, lsp, lsd) = low;
    let mut primal = 0.0;
    let mut dual = 0.0;
    for c in 0..lp.len() {
        primal += lp[c] * high.primal[c];
        dual += ld[c] * high.dual[c];
    }
    if primal > UNDERFLOW_GUARD && dual >= CANCELLATION_GUARD {
        return Sums {
            log_primal: lsp + high.primal_log_scale + primal.ln(),
            dual_log_scale: lsd + high.dual_log_scale,
            dual_scaled: dual,
        };
    }
    let all = states();
    let log_primal = if primal > UNDERFLOW_GUARD {
        lsp + high.primal_log_scale + primal.ln()
    } else {
        log_primal_slow(cluster, table, &all)
    };
    let sums = Sums { log_primal, dual_log_scale: lsd + high.dual_log_scale, dual_scaled: dual };
    guard_dual(cluster, table, sums, || all)
}

fn log_primal_slow(cluster: &ClusterSpec, table: &FactorTable, states: &[usize]) -> f64 {
    let exps: Vec<f64> = (0..cluster.config_count())
        .map(|c| {
            let row = cluster.parity_row(c);
            row.iter().zip(states).map(|(&k, &st)| table.log_primal[st][k as usize]).sum()
        })
        .collect();
    log_sum_exp(&exps)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cluster::builtin_cluster;

    #[test]
    fn fast_and_slow_primal_agree() {
        let b = builtin_cluster("B").unwrap();
        let states = [EdgeDisorder::Single(1), EdgeDisorder::Single(-1), EdgeDisorder::Single(0)];
        let table = FactorTable::new(&states, NishimoriCoupling::from_value(2.3).unwrap());
        for seed in 0..50usize {
            let idx: Vec<usize> = (0..b.slot_count()).map(|s| (seed * 5 + s * s) % 3).collect();
            let fast = evaluate(&b, &table, &idx).log_primal;
            let slow = log_primal_slow(&b, &table, &idx);
            assert!((fast - slow).abs() < 1e-12);
        }
    }

    fn scaled_dual(cluster: &ClusterSpec, table: &FactorTable, idx: &[usize]) -> f64 {
        let configs = cluster.config_count();
        let mut sum = 0.0;
        for c in 0..configs {
            let row = cluster.parity_row(c);
            sum += row.iter().zip(idx).map(|(&k, &st)| table.dual_ratio[st][k as usize]).product::<f64>();
        }
        idx.iter().map(|&st| table.dual_log_principal[st]).sum::<f64>() + sum.ln()
    }

    #[test]
    fn even_expansion_matches_spin_sum() {
        let k = NishimoriCoupling::from_value(0.8).unwrap();
        let single = [EdgeDisorder::Single(1), EdgeDisorder::Single(-1), EdgeDisorder::Single(0)];
        let pairs = [
            EdgeDisorder::Pair(1, 1),
            EdgeDisorder::Pair(1, -1),
            EdgeDisorder::Pair(-1, 1),
            EdgeDisorder::Pair(-1, -1),
            EdgeDisorder::Pair(0, 0),
        ];
        for name in crate::cluster::builtin_names() {
            let c = builtin_cluster(name).unwrap();
            let states: &[EdgeDisorder] = if c.layers() == 1 { &single } else { &pairs };
            let table = FactorTable::new(states, k);
            for seed in 0..30usize {
                let idx: Vec<usize> = (0..c.slot_count()).map(|s| (seed * 7 + s * (s + 3)) % states.len()).collect();
                let via_spins = scaled_dual(&c, &table, &idx);
                let via_subgraphs = log_dual_even_expansion(&c, &table, &idx).unwrap();
                assert!((via_spins - via_subgraphs).abs() < 1e-12, "{name} {idx:?}");
            }
        }
    }

    #[test]
    fn cancellation_regime_uses_expansion() {
        let b = builtin_cluster("B").unwrap();
        let states = [EdgeDisorder::Single(1), EdgeDisorder::Single(-1)];
        let table = FactorTable::new(&states, NishimoriCoupling::from_value(12.0).unwrap());
        let mut idx = vec![0usize; 12];
        idx[0] = 1;
        idx[1] = 1;
        let s = evaluate(&b, &table, &idx);
        assert!(s.dual_scaled > 0.0 && (s.dual_log_scale + s.dual_scaled.ln()).is_finite());
    }

    #[test]
    fn underflow_falls_back_to_log_space() {
        // a huge coupling on a frustrated assignment drives every scaled product to zero
        let a = builtin_cluster("A").unwrap();
        let states = [EdgeDisorder::Single(1), EdgeDisorder::Single(-1)];
        let table = FactorTable::new(&states, NishimoriCoupling::from_value(400.0).unwrap());
        let idx = [0, 0, 1, 1];
        let v = evaluate(&a, &table, &idx).log_primal;
        assert!((v - log_primal_slow(&a, &table, &idx)).abs() < 1e-9);
        assert!(v.is_finite());
    }
}
