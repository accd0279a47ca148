//! Acceptance criteria 1 to 8, one PASS/FAIL line each.

use std::process::Command;
use std::time::{Duration, Instant};

use dualthresh_core::cluster::catalog::{builtin_entries, builtin_entry};
use dualthresh_core::parallel::with_workers;
use dualthresh_core::tables::LOSS_RATES;
use dualthresh_core::*;

type Criterion = (&'static str, fn() -> Verdict);

struct Verdict {
    ok: bool,
    detail: String,
}

fn verdict(ok: bool, detail: impl Into<String>) -> Verdict {
    Verdict { ok, detail: detail.into() }
}

fn column(name: &str) -> (Vec<f64>, f64) {
    let entry = builtin_entry(name).unwrap();
    let rows = sweep(entry.channel, &entry.spec, &LOSS_RATES, &SolveOptions::default());
    let ps: Vec<f64> = rows.into_iter().map(|r| r.map(|r| r.p_c).unwrap_or(f64::NAN)).collect();
    let worst = ps.iter().zip(entry.reference).map(|(p, r)| (p - r).abs()).fold(0.0, f64::max);
    let worst = if ps.iter().any(|p| p.is_nan()) { f64::INFINITY } else { worst };
    (ps, worst)
}

fn timed_column(name: &str, tol: f64, budget: Duration) -> Verdict {
    let start = Instant::now();
    let (ps, worst) = column(name);
    let took = start.elapsed();
    verdict(
        worst <= tol && took < budget,
        format!("{name} column {ps:.5?}, max |dev| {worst:.1e} <= {tol:.0e}, {took:.2?} < {budget:?}"),
    )
}

fn h2(p: f64) -> f64 {
    -(p * p.log2() + (1.0 - p) * (1.0 - p).log2())
}

fn entropy_root(q: f64) -> f64 {
    let target = 1.0 - 0.5 / (1.0 - q);
    let (mut lo, mut hi) = (1e-12f64, 0.5f64);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if h2(mid) < target {
            lo = mid
        } else {
            hi = mid
        }
    }
    0.5 * (lo + hi)
}

fn criterion_2() -> Verdict {
    let single = builtin_cluster("SINGLE").unwrap();
    let opts = SolveOptions { tol: 1e-10, ..SolveOptions::default() };
    let mut worst: f64 = 0.0;
    for i in 0..10 {
        let q = i as f64 * 0.05;
        match solve_threshold(ChannelKind::Uncorrelated, &single, q, &opts) {
            Ok(r) => worst = worst.max((r.p_c - entropy_root(q)).abs()),
            Err(e) => return verdict(false, format!("q = {q}: {e}")),
        }
    }
    let root = format!("{:.4}", entropy_root(0.0));
    verdict(worst <= 1e-9 && root == "0.1100", format!("max |p_c - oracle| {worst:.1e} <= 1e-9, oracle root at q = 0 is {root}"))
}

fn criterion_4() -> Verdict {
    let a = builtin_cluster("A").unwrap();
    let ch = ChannelSpec::new(ChannelKind::Uncorrelated, 0.1, 0.2).unwrap();
    let terms = gap(&ch, &a, GapPolicy::default()).unwrap().terms;
    let v = timed_column("A", 2e-4, Duration::from_secs(5));
    verdict(v.ok && terms == 81, format!("{}, {terms} disorder terms", v.detail))
}

fn listed_status(name: &str) -> Option<String> {
    let out = Command::new(env!("CARGO_BIN_EXE_dualthresh")).args(["clusters", "list"]).output().ok()?;
    let text = String::from_utf8(out.stdout).ok()?;
    text.lines()
        .find(|l| l.split_whitespace().next() == Some(name))
        .and_then(|l| l.split_whitespace().last().map(str::to_string))
}

fn criterion_5() -> Verdict {
    let mut ok = true;
    let mut parts = Vec::new();
    for name in ["B", "D", "E"] {
        let (_, worst) = column(name);
        let reproduces = worst <= 5e-4;
        let listed = listed_status(name).unwrap_or_default();
        let expected = if reproduces { "verified" } else { "unverified" };
        ok &= listed == expected;
        parts.push(format!("{name} max |dev| {worst:.1e} listed {listed}"));
    }
    verdict(ok, parts.join("; "))
}

fn criterion_6() -> Verdict {
    let mut fails = Vec::new();
    let mut check = |ok: bool, what: &str| {
        if !ok {
            fails.push(what.to_string())
        }
    };

    let mut worst: f64 = 0.0;
    for k in [0.05, 0.44, 1.3, 3.0] {
        for d in [EdgeDisorder::Single(1), EdgeDisorder::Single(-1), EdgeDisorder::Pair(1, -1), EdgeDisorder::Pair(-1, -1)] {
            let x = EdgeFactorComponents::boltzmann(&d, NishimoriCoupling::from_value(k).unwrap());
            let c = x.components();
            let scale = c.iter().cloned().fold(0.0, f64::max);
            for (a, b) in x.dual().dual().components().iter().zip(c) {
                worst = worst.max((a - b).abs() / scale);
            }
        }
    }
    check(worst <= 1e-14, "Hadamard involution");

    let mut gauge = true;
    for name in ["A", "B"] {
        let c = builtin_cluster(name).unwrap();
        let states = [EdgeDisorder::Single(1), EdgeDisorder::Single(-1), EdgeDisorder::Single(0)];
        for seed in 0..200usize {
            let d: Vec<EdgeDisorder> = (0..c.slot_count()).map(|s| states[(seed * 31 + s * s * 7 + s) % 3]).collect();
            let k = NishimoriCoupling::from_value(0.05 + (seed % 17) as f64 * 0.2).unwrap();
            gauge &= gauge_orbit_check(&c, &d, k).unwrap();
        }
    }
    check(gauge, "gauge invariance");

    let mut norm = true;
    for kind in [ChannelKind::Uncorrelated, ChannelKind::Depolarizing] {
        for i in 0..=50 {
            for j in 0..=20 {
                let p = kind.max_error_rate() * i as f64 / 50.0;
                let q = j as f64 / 20.0;
                let d = disorder_distribution(&ChannelSpec::new(kind, p, q).unwrap());
                norm &= (d.entries().iter().map(|e| e.1).sum::<f64>() - 1.0).abs() <= 1e-15;
            }
        }
    }
    check(norm, "normalization");

    check((pure_self_dual_point() - 0.440687).abs() <= 1e-6, "self-dual point");

    let mut decreasing = true;
    for entry in builtin_entries() {
        let top = entry.channel.max_error_rate();
        for q in [0.0, 0.2, 0.45] {
            let ds: Vec<f64> = (1..=12)
                .map(|i| {
                    let ch = ChannelSpec::new(entry.channel, top * i as f64 / 13.0, q).unwrap();
                    gap(&ch, &entry.spec, GapPolicy::default()).unwrap().delta
                })
                .collect();
            decreasing &= ds.windows(2).all(|w| w[1] < w[0]);
        }
    }
    check(decreasing, "gap decreasing in p");

    let solve = |name: &str, q: f64| {
        let e = builtin_entry(name).unwrap();
        solve_threshold(e.channel, &e.spec, q, &SolveOptions::default()).unwrap().p_c
    };
    let mut in_q = true;
    for name in ["SINGLE", "A", "C", "D"] {
        let ps: Vec<f64> = (0..10).map(|i| solve(name, i as f64 * 0.05)).collect();
        in_q &= ps.windows(2).all(|w| w[1] < w[0]);
    }
    check(in_q, "p_c decreasing in q");

    let refs = reference_thresholds();
    let mut dominance = true;
    let mut exceptions = Vec::new();
    for (i, &q) in LOSS_RATES.iter().enumerate() {
        let p0 = refs.matching_p_c0[i];
        let p = solve("SINGLE", q);
        let tabulated_max = [dualthresh_core::tables::SINGLE_COLUMN[i], dualthresh_core::tables::A_COLUMN[i], dualthresh_core::tables::B_COLUMN[i]]
            .into_iter()
            .fold(0.0, f64::max);
        if tabulated_max < p0 {
            exceptions.push(q);
            dominance &= p < p0;
        } else {
            dominance &= p > p0;
        }
    }
    check(dominance && exceptions == [0.4], "dominance over p_c^0");

    check(LOSS_RATES.iter().all(|&q| solve("C", q) > solve("SINGLE", q)), "depolarizing above uncorrelated");

    let detail = if fails.is_empty() {
        format!(
            "involution {worst:.1e}, gauge, normalization, K_c, gap and p_c monotone, depolarizing above uncorrelated; \
             dominance holds except at q = {exceptions:?} where the tabulated columns are below p_c^0"
        )
    } else {
        format!("failed: {}", fails.join(", "))
    };
    verdict(fails.is_empty(), detail)
}

fn criterion_7() -> Verdict {
    let a = builtin_cluster("A").unwrap();
    let ch = ChannelSpec::new(ChannelKind::Uncorrelated, 0.09, 0.1).unwrap();
    let exact = gap(&ch, &a, GapPolicy::default()).unwrap();
    let mc = gap_monte_carlo(&ch, &a, 100_000, 2024).unwrap();
    let again = gap_monte_carlo(&ch, &a, 100_000, 2024).unwrap();
    let z = (mc.delta - exact.delta).abs() / mc.std_error;
    verdict(
        z < 3.0 && exact.terms == 81 && mc.delta.to_bits() == again.delta.to_bits(),
        format!("exact {:.6} vs MC {:.6} +/- {:.1e} ({z:.2} se), same seed bit-identical", exact.delta, mc.delta, mc.std_error),
    )
}

fn cli_output(workers: usize, format: &str) -> Vec<u8> {
    Command::new(env!("CARGO_BIN_EXE_dualthresh"))
        .args(["sweep", "--channel", "uncorrelated", "--cluster", "A", "--format", format, "--with-reference"])
        .env("THRESHOLD_WORKERS", workers.to_string())
        .output()
        .expect("binary runs")
        .stdout
}

fn criterion_8() -> Verdict {
    let max = std::thread::available_parallelism().map_or(1, |n| n.get());
    let counts = [1, 2, max];
    let mut numeric = true;
    let reference: Vec<Vec<f64>> = ["SINGLE", "A", "C", "E"]
        .iter()
        .map(|name| {
            let e = builtin_entry(name).unwrap();
            with_workers(Some(1), || {
                sweep(e.channel, &e.spec, &LOSS_RATES, &SolveOptions::default()).into_iter().map(|r| r.unwrap().p_c).collect()
            })
        })
        .collect();
    for &w in &counts[1..] {
        for (name, want) in ["SINGLE", "A", "C", "E"].iter().zip(&reference) {
            let e = builtin_entry(name).unwrap();
            let got: Vec<f64> = with_workers(Some(w), || {
                sweep(e.channel, &e.spec, &LOSS_RATES, &SolveOptions::default()).into_iter().map(|r| r.unwrap().p_c).collect()
            });
            numeric &= got.iter().zip(want).all(|(a, b)| (a - b).abs() <= 1e-12);
        }
    }
    let mut bytes = true;
    for format in ["table", "csv", "json"] {
        let first = cli_output(1, format);
        bytes &= !first.is_empty() && counts.iter().all(|&w| cli_output(w, format) == first);
    }
    verdict(numeric && bytes, format!("workers {counts:?}: p_c within 1e-12, CLI table/csv/json byte-identical"))
}

fn main() {
    // libtest-style filtering: `cargo test` passes the filter string and flags
    let filter: Option<String> = std::env::args().skip(1).find(|a| !a.starts_with('-'));
    if filter.as_deref().is_some_and(|f| !"acceptance".contains(f)) {
        return;
    }
    let criteria: [Criterion; 8] = [
        ("1 single-edge column", || timed_column("SINGLE", 1e-4, Duration::from_secs(1))),
        ("2 entropy oracle", criterion_2),
        ("3 crossing-slot column", || timed_column("C", 1e-4, Duration::from_secs(1))),
        ("4 star cluster column", criterion_4),
        ("5 B/D/E calibration status", criterion_5),
        ("6 property suite", criterion_6),
        ("7 Monte Carlo consistency", criterion_7),
        ("8 determinism under parallelism", criterion_8),
    ];
    let mut failed = 0;
    for (name, run) in criteria {
        let v = run();
        println!("criterion {name}: {} ({})", if v.ok { "PASS" } else { "FAIL" }, v.detail);
        failed += usize::from(!v.ok);
    }
    println!("acceptance: {} of 8 criteria passed", 8 - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
