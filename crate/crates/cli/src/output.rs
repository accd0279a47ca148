//! Output records and their table, CSV and JSON renderings.

use std::fmt::Write as _;

use clap::ValueEnum;
use dualthresh_core::{reference_thresholds, ChannelKind, Error, ThresholdResult};
use serde::Serialize;

pub const CSV_HEADER: &str = "channel,cluster,q,p_c,residual,method,reference_p_c0";

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Table,
    Csv,
    Json,
}

/// One row per (channel, cluster, q). Failed solves carry `p_c = 0` and the
/// failure kind in `method`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OutputRecord {
    pub channel: String,
    pub cluster: String,
    pub q: f64,
    pub p_c: f64,
    pub residual: Option<f64>,
    pub method: String,
    pub reference_p_c0: Option<f64>,
}

impl OutputRecord {
    pub fn solved(r: &ThresholdResult, reference: Option<f64>) -> Self {
        OutputRecord {
            channel: r.channel.as_str().to_string(),
            cluster: r.cluster.clone(),
            q: r.q,
            p_c: r.p_c,
            residual: Some(r.residual),
            method: r.method.to_string(),
            reference_p_c0: reference,
        }
    }

    pub fn failed(channel: ChannelKind, cluster: &str, q: f64, e: &Error, reference: Option<f64>) -> Self {
        let flag = match e {
            Error::NoThreshold { .. } => "no_threshold",
            Error::NoSignChange { .. } => "no_sign_change",
            _ => "error",
        };
        OutputRecord {
            channel: channel.as_str().to_string(),
            cluster: cluster.to_string(),
            q,
            p_c: 0.0,
            residual: None,
            method: flag.to_string(),
            reference_p_c0: reference,
        }
    }
}

/// Shortest round-trip form, as in the JSON output.
fn num(x: f64) -> String {
    serde_json::to_string(&x).expect("finite")
}

fn opt(v: Option<f64>) -> String {
    v.map(num).unwrap_or_default()
}

pub fn render(records: &[OutputRecord], format: Format, with_reference: bool) -> String {
    match format {
        Format::Json => serde_json::to_string_pretty(records).expect("records serialise") + "\n",
        Format::Csv => {
            let mut s = String::from(CSV_HEADER);
            s.push('\n');
            for r in records {
                let _ = writeln!(
                    s,
                    "{},{},{},{},{},{},{}",
                    r.channel,
                    r.cluster,
                    num(r.q),
                    num(r.p_c),
                    opt(r.residual),
                    r.method,
                    opt(r.reference_p_c0)
                );
            }
            s
        }
        Format::Table => table(records, with_reference).lines().map(|l| l.trim_end().to_string() + "\n").collect(),
    }
}

/// `p_c` to 5 decimals, ties to even.
pub fn round5(x: f64) -> String {
    format!("{x:.5}")
}

fn table(records: &[OutputRecord], with_reference: bool) -> String {
    let mut s = String::new();
    let _ = write!(s, "{:<13} {:<7} {:>5} {:>8} {:>9}  {:<14}", "channel", "cluster", "q", "p_c", "residual", "method");
    if with_reference {
        s.push_str("  p_c0");
    }
    s.push('\n');
    for r in records {
        let residual = r.residual.map(|x| format!("{x:.1e}")).unwrap_or_else(|| "-".into());
        let _ = write!(
            s,
            "{:<13} {:<7} {:>5} {:>8} {:>9}  {:<14}",
            r.channel,
            r.cluster,
            r.q,
            round5(r.p_c),
            residual,
            r.method
        );
        if with_reference {
            let _ = write!(s, "  {}", r.reference_p_c0.map(round5).unwrap_or_else(|| "-".into()));
        }
        s.push('\n');
    }
    if with_reference {
        let refs = reference_thresholds();
        s.push_str("p_c0: tabulated minimum-weight matching (ground-state) decoder thresholds, uncorrelated channel\n");
        let _ = writeln!(s, "      improved matching at q = 0: {}", refs.matching_improved_q0);
        let _ = writeln!(s, "      depolarizing decoder at q = 0: {}", refs.depolarizing_decoder_q0);
    }
    s
}
