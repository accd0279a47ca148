//! `verify` suites: pass/fail lines, exit 4 on any failure.

use std::fmt::Write as _;

use dualthresh_core::cluster::catalog::{builtin_entries, builtin_entry, ClusterEntry};
use dualthresh_core::parallel::with_workers;
use dualthresh_core::solver::{solve_threshold_with, CouplingFn};
use dualthresh_core::tables::LOSS_RATES;
use dualthresh_core::{
    dual_edge_factor_single, dual_edge_factor_twolayer, nishimori_coupling, pure_self_dual_point, sweep,
    CalibrationStatus, ChannelKind, ChannelSpec, NishimoriCoupling, Result, SolveOptions,
};

use crate::{exit, Outcome, Suite};

pub const SELF_DUAL_POINT: f64 = 0.440687;

struct Report {
    text: String,
    passed: usize,
    failed: usize,
}

impl Report {
    fn check(&mut self, ok: bool, name: &str, detail: String) {
        let _ = writeln!(self.text, "{} {name}: {detail}", if ok { "PASS" } else { "FAIL" });
        if ok {
            self.passed += 1;
        } else {
            self.failed += 1;
        }
    }

    fn skip(&mut self, name: &str, detail: &str) {
        let _ = writeln!(self.text, "SKIP {name}: {detail}");
    }
}

/// Binary entropy in bits.
pub fn binary_entropy(p: f64) -> f64 {
    -(p * p.log2() + (1.0 - p) * (1.0 - p).log2())
}

/// Root of `H2(p) = 1 - 1 / (2 (1 - q))` on `(0, 1/2)` by plain bisection.
pub fn entropy_oracle(q: f64) -> f64 {
    let target = 1.0 - 0.5 / (1.0 - q);
    let (mut lo, mut hi) = (1e-12, 0.5);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if binary_entropy(mid) < target {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

fn tampered(channel: &ChannelSpec) -> Result<NishimoriCoupling> {
    NishimoriCoupling::from_value(2.0 * nishimori_coupling(channel)?.value())
}

fn involutions() -> f64 {
    let mut worst: f64 = 0.0;
    for k in [0.1, 0.44, 1.0, 2.5] {
        let e = |t: f64| f64::exp(k * t);
        for x in [[e(1.0), e(-1.0)], [e(-1.0), e(1.0)], [1.0, 1.0]] {
            let back = dual_edge_factor_single(x).dual();
            let scale = x.iter().cloned().fold(0.0, f64::max);
            for (a, b) in back.components().iter().zip(x) {
                worst = worst.max((a - b).abs() / scale);
            }
        }
        for (t, u) in [(1.0, 1.0), (1.0, -1.0), (-1.0, -1.0)] {
            let x = [e(t + u + t * u), e(t - u - t * u), e(-t + u - t * u), e(-t - u + t * u)];
            let back = dual_edge_factor_twolayer(x).dual();
            let scale = x.iter().cloned().fold(0.0, f64::max);
            for (a, b) in back.components().iter().zip(x) {
                worst = worst.max((a - b).abs() / scale);
            }
        }
    }
    worst
}

fn column(report: &mut Report, entry: &ClusterEntry, coupling: &CouplingFn) {
    let name = format!("{} column ({})", entry.spec.name(), entry.channel);
    let opts = SolveOptions::default();
    let mut worst: f64 = 0.0;
    for (&q, &want) in LOSS_RATES.iter().zip(entry.reference) {
        match solve_threshold_with(entry.channel, &entry.spec, q, &opts, coupling) {
            Ok(r) => worst = worst.max((r.p_c - want).abs()),
            Err(e) => {
                report.check(false, &name, format!("q = {q}: {e}"));
                return;
            }
        }
    }
    report.check(worst <= entry.tolerance, &name, format!("max |dev| = {worst:.1e}, tolerance {:.0e}", entry.tolerance));
}

fn oracle(report: &mut Report, coupling: &CouplingFn) {
    let single = &builtin_entry("SINGLE").expect("registered").spec;
    let opts = SolveOptions { tol: 1e-10, ..SolveOptions::default() };
    let mut worst: f64 = 0.0;
    for i in 0..10 {
        let q = i as f64 * 0.05;
        match solve_threshold_with(ChannelKind::Uncorrelated, single, q, &opts, coupling) {
            Ok(r) => worst = worst.max((r.p_c - entropy_oracle(q)).abs()),
            Err(e) => {
                report.check(false, "SINGLE entropy oracle", format!("q = {q}: {e}"));
                return;
            }
        }
    }
    report.check(worst <= 1e-9, "SINGLE entropy oracle", format!("max |dev| = {worst:.1e} over q = 0..0.45"));
}

fn determinism(report: &mut Report) {
    let max = std::thread::available_parallelism().map_or(1, |n| n.get());
    for name in ["SINGLE", "C", "A"] {
        let entry = builtin_entry(name).expect("registered");
        let bits = |workers: usize| -> Vec<Option<u64>> {
            with_workers(Some(workers), || {
                sweep(entry.channel, &entry.spec, &LOSS_RATES, &SolveOptions::default())
                    .into_iter()
                    .map(|r| r.ok().map(|r| r.p_c.to_bits()))
                    .collect()
            })
        };
        let one = bits(1);
        let same = [2, max].iter().all(|&w| bits(w) == one);
        report.check(same, &format!("{name} sweep determinism"), format!("workers 1, 2, {max}"));
    }
}

pub fn run(suite: Suite, tamper: bool) -> Outcome {
    let coupling: &CouplingFn = if tamper { &tampered } else { &nishimori_coupling };
    let mut report = Report { text: String::new(), passed: 0, failed: 0 };

    let worst = involutions();
    report.check(worst <= 1e-14, "Hadamard involution", format!("max error {worst:.1e} relative to the largest component"));
    let k_c = pure_self_dual_point();
    report.check((k_c - SELF_DUAL_POINT).abs() <= 1e-6, "pure self-dual point", format!("K_c = {k_c:.9}"));
    oracle(&mut report, coupling);
    for name in ["SINGLE", "C"] {
        column(&mut report, builtin_entry(name).expect("registered"), coupling);
    }

    if suite == Suite::Full {
        for entry in builtin_entries().iter().filter(|e| !["SINGLE", "C"].contains(&e.spec.name())) {
            if entry.status == CalibrationStatus::Unverified {
                report.skip(&format!("{} column", entry.spec.name()), "geometry unverified");
                continue;
            }
            column(&mut report, entry, coupling);
        }
        determinism(&mut report);
    }

    let _ = writeln!(report.text, "{} passed, {} failed", report.passed, report.failed);
    let code = if report.failed == 0 { exit::OK } else { exit::VERIFY_FAILED };
    Outcome { code, stdout: report.text, stderr: String::new() }
}
