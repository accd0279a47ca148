//! Root finding for `p_c(q)` and sweeps over the loss rate.

use rayon::prelude::*;
use serde::Serialize;

use crate::cluster::ClusterSpec;
use crate::error::{Error, Result};
use crate::model::{nishimori_coupling, ChannelKind, ChannelSpec, NishimoriCoupling};
use crate::replica::{gap_at_coupling, GapEvaluation, GapMethod, GapPolicy};
use crate::tables;

/// Distance of the search bracket from `p = 0` and from the channel's `p_max`.
pub const BRACKET_MARGIN: f64 = 1e-6;
pub const MIN_TOLERANCE: f64 = 1e-10;
const MAX_ITERATIONS: usize = 500;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolveOptions {
    /// Target bracket width in `p`.
    pub tol: f64,
    pub policy: GapPolicy,
}

impl Default for SolveOptions {
    fn default() -> Self {
        SolveOptions { tol: 1e-7, policy: GapPolicy::default() }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ThresholdResult {
    pub channel: ChannelKind,
    pub cluster: String,
    pub q: f64,
    pub p_c: f64,
    /// `|Δ(p_c)|`.
    pub residual: f64,
    pub bracket: (f64, f64),
    pub iterations: usize,
    pub method: GapMethod,
    /// Standard error of `Δ(p_c)`; zero in exact mode.
    pub std_error: f64,
    /// Bracket width at which Monte Carlo refinement stopped because both
    /// ends were within two standard errors of zero.
    pub statistical_limit: Option<f64>,
}

/// Coupling as a function of the channel; the Nishimori line by default.
pub type CouplingFn = dyn Fn(&ChannelSpec) -> Result<NishimoriCoupling> + Sync;

pub fn solve_threshold(kind: ChannelKind, cluster: &ClusterSpec, q: f64, opts: &SolveOptions) -> Result<ThresholdResult> {
    solve_threshold_with(kind, cluster, q, opts, &nishimori_coupling)
}

/// As [`solve_threshold`] with a caller-supplied coupling.
pub fn solve_threshold_with(
    kind: ChannelKind,
    cluster: &ClusterSpec,
    q: f64,
    opts: &SolveOptions,
    coupling: &CouplingFn,
) -> Result<ThresholdResult> {
    if opts.tol.is_nan() || opts.tol < MIN_TOLERANCE {
        return Err(Error::Domain(format!("tolerance {} below {MIN_TOLERANCE}", opts.tol)));
    }
    if kind.layers() != cluster.layers() {
        return Err(Error::Domain(format!(
            "{kind} channel needs a {}-layer cluster, `{}` has {}",
            kind.layers(),
            cluster.name(),
            cluster.layers()
        )));
    }
    let base = ChannelSpec::new(kind, 0.0, q)?;
    // one-slot clusters reduce to an entropy condition with no root for q >= 1/2
    if cluster.slot_count() == 1 && q >= 0.5 {
        return Err(Error::NoThreshold { q });
    }
    let eval = |p: f64| -> Result<GapEvaluation> {
        let channel = base.with_p(p)?;
        gap_at_coupling(&channel, cluster, opts.policy, coupling(&channel)?)
    };

    let (mut lo, mut hi) = (BRACKET_MARGIN, kind.max_error_rate() - BRACKET_MARGIN);
    let mut g_lo = eval(lo)?;
    let mut g_hi = eval(hi)?;
    if !(g_lo.delta > 0.0 && g_hi.delta < 0.0) {
        return Err(Error::NoSignChange { lo, hi, f_lo: g_lo.delta, f_hi: g_hi.delta });
    }
    let method = g_lo.method;
    let secant = method == GapMethod::Exact;
    let (mut f_lo, mut f_hi) = (g_lo.delta, g_hi.delta);
    let mut iterations = 0;
    let mut statistical_limit = None;
    let mut widths = [hi - lo; 2];
    let mut force_bisect = false;
    // 1 when lo moved last, -1 when hi moved last
    let mut last_side = 0i8;

    while hi - lo > opts.tol && iterations < MAX_ITERATIONS {
        let width = hi - lo;
        if method == GapMethod::MonteCarlo
            && g_lo.delta.abs() < 2.0 * g_lo.std_error
            && g_hi.delta.abs() < 2.0 * g_hi.std_error
        {
            statistical_limit = Some(width);
            break;
        }
        let mut x = if secant && !force_bisect {
            (lo * f_hi - hi * f_lo) / (f_hi - f_lo)
        } else {
            0.5 * (lo + hi)
        };
        let guard = 0.5 * opts.tol.min(0.25 * width);
        if !x.is_finite() {
            x = 0.5 * (lo + hi);
        }
        x = x.clamp(lo + guard, hi - guard);

        let g = eval(x)?;
        iterations += 1;
        if g.delta >= 0.0 {
            lo = x;
            g_lo = g;
            f_lo = g.delta;
            if last_side == 1 {
                // Illinois step: halve the stale end
                f_hi *= 0.5;
            }
            last_side = 1;
        } else {
            hi = x;
            g_hi = g;
            f_hi = g.delta;
            if last_side == -1 {
                f_lo *= 0.5;
            }
            last_side = -1;
        }
        force_bisect = hi - lo > 0.5 * widths[0];
        widths = [widths[1], hi - lo];
    }

    let p_c = 0.5 * (lo + hi);
    let at_root = eval(p_c)?;
    Ok(ThresholdResult {
        channel: kind,
        cluster: cluster.name().to_string(),
        q,
        p_c,
        residual: at_root.delta.abs(),
        bracket: (lo, hi),
        iterations,
        method,
        std_error: at_root.std_error,
        statistical_limit,
    })
}

/// One solve per loss rate, in input order; failures stay in their row.
pub fn sweep(kind: ChannelKind, cluster: &ClusterSpec, qs: &[f64], opts: &SolveOptions) -> Vec<Result<ThresholdResult>> {
    qs.par_iter().map(|&q| solve_threshold(kind, cluster, q, opts)).collect()
}

/// Published comparison thresholds, not computed here.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ReferenceThresholds {
    pub loss_rates: [f64; 6],
    /// Minimum-weight matching decoder, uncorrelated channel.
    pub matching_p_c0: [f64; 6],
    /// Improved matching value at `q = 0`.
    pub matching_improved_q0: f64,
    /// Constructive decoder for the depolarizing channel at `q = 0`.
    pub depolarizing_decoder_q0: f64,
}

impl ReferenceThresholds {
    /// Comparison value for `(channel, q)` if one is tabulated.
    pub fn lookup(&self, kind: ChannelKind, q: f64) -> Option<f64> {
        let i = tables::loss_rate_index(q)?;
        match kind {
            ChannelKind::Uncorrelated => Some(self.matching_p_c0[i]),
            ChannelKind::Depolarizing => (i == 0).then_some(self.depolarizing_decoder_q0),
        }
    }
}

pub fn reference_thresholds() -> ReferenceThresholds {
    ReferenceThresholds {
        loss_rates: tables::LOSS_RATES,
        matching_p_c0: tables::MATCHING_P_C0,
        matching_improved_q0: tables::MATCHING_IMPROVED_Q0,
        depolarizing_decoder_q0: tables::DEPOLARIZING_DECODER_Q0,
    }
}
