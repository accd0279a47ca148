//! Command-line front end: thresholds, sweeps, the cluster catalog and the
//! verification suite.

use std::fmt::Write as _;

use clap::{Args, Parser, Subcommand, ValueEnum};
use dualthresh_core::cluster::catalog::{builtin_entries, builtin_entry, parse_catalog};
use dualthresh_core::parallel::{configured_workers, with_workers};
use dualthresh_core::{
    reference_thresholds, solve_threshold, sweep, ChannelKind, ClusterSpec, Error, GapPolicy, SolveOptions,
};

pub mod output;
pub mod verify;

pub use output::{Format, OutputRecord};

pub mod exit {
    pub const OK: i32 = 0;
    pub const USAGE: i32 = 1;
    pub const NO_THRESHOLD: i32 = 2;
    pub const BAD_CLUSTER: i32 = 3;
    pub const VERIFY_FAILED: i32 = 4;
}

#[derive(Debug, Parser)]
#[command(name = "dualthresh", version, about = "Surface-code error thresholds under qubit loss")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Threshold p_c at one loss rate.
    Threshold(ThresholdArgs),
    /// Thresholds over a grid of loss rates, ordered by q.
    Sweep(SweepArgs),
    /// Run the self-check suite.
    Verify(VerifyArgs),
    /// Inspect the cluster catalog.
    Clusters {
        #[command(subcommand)]
        action: ClustersAction,
    },
}

#[derive(Debug, Args)]
pub struct SolveArgs {
    #[arg(long, value_parser = parse_channel)]
    pub channel: ChannelKind,
    /// single, A..E, or file:<path>[#name]
    #[arg(long)]
    pub cluster: String,
    #[arg(long, default_value_t = 1e-7)]
    pub tol: f64,
    /// Estimate the gap by Monte Carlo with this many samples.
    #[arg(long)]
    pub mc_samples: Option<usize>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, value_enum, default_value_t = Format::Table)]
    pub format: Format,
    /// Attach the tabulated matching-decoder threshold p_c^0.
    #[arg(long)]
    pub with_reference: bool,
}

#[derive(Debug, Args)]
pub struct ThresholdArgs {
    #[command(flatten)]
    pub solve: SolveArgs,
    /// Loss rate q.
    #[arg(long)]
    pub loss: f64,
}

#[derive(Debug, Args)]
pub struct SweepArgs {
    #[command(flatten)]
    pub solve: SolveArgs,
    #[arg(long, default_value_t = 0.0)]
    pub q_from: f64,
    #[arg(long, default_value_t = 0.45)]
    pub q_to: f64,
    #[arg(long, default_value_t = 0.05)]
    pub q_step: f64,
    /// Explicit comma-separated loss rates; overrides the grid.
    #[arg(long, value_delimiter = ',', num_args = 1..)]
    pub q_list: Option<Vec<f64>>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Suite {
    Basic,
    Full,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    #[arg(long, value_enum, default_value_t = Suite::Basic)]
    pub suite: Suite,
    /// Mutation fixture: solve with a wrong coupling formula.
    #[arg(long, hide = true)]
    pub tamper_nishimori: bool,
}

#[derive(Debug, Subcommand)]
pub enum ClustersAction {
    /// Registered clusters with size and calibration status.
    List,
    /// Full geometry in the catalog file format.
    Show { name: String },
}

fn parse_channel(s: &str) -> Result<ChannelKind, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

/// Captured result of one invocation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Outcome {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

impl Outcome {
    fn ok(stdout: String) -> Self {
        Outcome { code: exit::OK, stdout, stderr: String::new() }
    }

    fn fail(code: i32, stderr: String) -> Self {
        Outcome { code, stdout: String::new(), stderr }
    }
}

/// Parses `args` (program name first) and runs the command on a pool sized by
/// `THRESHOLD_WORKERS`.
pub fn run<I, T>(args: I) -> Outcome
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let text = e.render().to_string();
            return if e.use_stderr() { Outcome::fail(exit::USAGE, text) } else { Outcome::ok(text) };
        }
    };
    with_workers(configured_workers(), || execute(cli.command))
}

pub fn execute(command: Command) -> Outcome {
    match command {
        Command::Threshold(args) => cmd_threshold(&args),
        Command::Sweep(args) => cmd_sweep(&args),
        Command::Verify(args) => verify::run(args.suite, args.tamper_nishimori),
        Command::Clusters { action } => cmd_clusters(&action),
    }
}

/// Resolves `single`, `A`..`E` or `file:<path>[#name]`.
pub fn resolve_cluster(arg: &str) -> Result<ClusterSpec, Error> {
    let Some(rest) = arg.strip_prefix("file:") else {
        return builtin_entry(arg).map(|e| e.spec.clone());
    };
    let (path, wanted) = match rest.rsplit_once('#') {
        Some((p, n)) => (p, Some(n)),
        None => (rest, None),
    };
    let text = std::fs::read_to_string(path).map_err(|e| Error::InvalidCluster(format!("{path}: {e}")))?;
    let mut specs = parse_catalog(&text)?;
    match wanted {
        Some(name) => specs
            .into_iter()
            .find(|s| s.name() == name)
            .ok_or_else(|| Error::UnknownCluster(format!("{name} in {path}"))),
        None if specs.len() == 1 => Ok(specs.remove(0)),
        None => Err(Error::InvalidCluster(format!(
            "{path} holds {} clusters; pick one with file:{path}#<name>",
            specs.len()
        ))),
    }
}

fn error_code(e: &Error) -> i32 {
    match e {
        Error::NoSignChange { .. } | Error::NoThreshold { .. } => exit::NO_THRESHOLD,
        Error::UnknownCluster(_) | Error::InvalidCluster(_) => exit::BAD_CLUSTER,
        _ => exit::USAGE,
    }
}

fn options(args: &SolveArgs) -> SolveOptions {
    let policy = match args.mc_samples {
        Some(samples) => GapPolicy::MonteCarlo { samples, seed: args.seed },
        None => GapPolicy::default(),
    };
    SolveOptions { tol: args.tol, policy }
}

/// Turns solver rows into records; the exit code is that of the worst row.
fn records(
    args: &SolveArgs,
    cluster: &ClusterSpec,
    qs: &[f64],
    rows: Vec<dualthresh_core::Result<dualthresh_core::ThresholdResult>>,
) -> Outcome {
    let refs = reference_thresholds();
    let mut out = Vec::with_capacity(rows.len());
    let mut code = exit::OK;
    let mut stderr = String::new();
    for (&q, row) in qs.iter().zip(rows) {
        let reference = args.with_reference.then(|| refs.lookup(args.channel, q)).flatten();
        match row {
            Ok(r) => out.push(OutputRecord::solved(&r, reference)),
            Err(e) => {
                let c = error_code(&e);
                if c != exit::NO_THRESHOLD {
                    return Outcome::fail(c, format!("error: {e}\n"));
                }
                let _ = writeln!(stderr, "q = {q}: {e}");
                code = c;
                out.push(OutputRecord::failed(args.channel, cluster.name(), q, &e, reference));
            }
        }
    }
    let stdout = output::render(&out, args.format, args.with_reference);
    Outcome { code, stdout, stderr }
}

fn cmd_threshold(args: &ThresholdArgs) -> Outcome {
    let cluster = match resolve_cluster(&args.solve.cluster) {
        Ok(c) => c,
        Err(e) => return Outcome::fail(error_code(&e), format!("error: {e}\n")),
    };
    let row = solve_threshold(args.solve.channel, &cluster, args.loss, &options(&args.solve));
    records(&args.solve, &cluster, &[args.loss], vec![row])
}

/// Loss rates `from, from + step, ..` up to `to`, snapped to 12 decimals.
pub fn loss_grid(from: f64, to: f64, step: f64) -> Result<Vec<f64>, Error> {
    if !from.is_finite() || !to.is_finite() || step.is_nan() || step <= 0.0 || to < from {
        return Err(Error::Domain(format!("bad loss grid {from}..{to} step {step}")));
    }
    let count = ((to - from) / step + 1e-9).floor() as usize + 1;
    Ok((0..count).map(|i| ((from + i as f64 * step) * 1e12).round() / 1e12).collect())
}

fn cmd_sweep(args: &SweepArgs) -> Outcome {
    let qs = match &args.q_list {
        Some(list) => list.clone(),
        None => match loss_grid(args.q_from, args.q_to, args.q_step) {
            Ok(g) => g,
            Err(e) => return Outcome::fail(exit::USAGE, format!("error: {e}\n")),
        },
    };
    let cluster = match resolve_cluster(&args.solve.cluster) {
        Ok(c) => c,
        Err(e) => return Outcome::fail(error_code(&e), format!("error: {e}\n")),
    };
    let rows = sweep(args.solve.channel, &cluster, &qs, &options(&args.solve));
    records(&args.solve, &cluster, &qs, rows)
}

fn cmd_clusters(action: &ClustersAction) -> Outcome {
    match action {
        ClustersAction::List => {
            let mut s = String::new();
            let _ = writeln!(s, "{:<8} {:<13} {:>6} {:>5} {:>8}  status", "name", "channel", "layers", "edges", "internal");
            for e in builtin_entries() {
                let _ = writeln!(
                    s,
                    "{:<8} {:<13} {:>6} {:>5} {:>8}  {}",
                    e.spec.name(),
                    e.channel.as_str(),
                    e.spec.layers(),
                    e.spec.slot_count(),
                    e.spec.internal_count(),
                    e.status
                );
            }
            Outcome::ok(s)
        }
        ClustersAction::Show { name } => match resolve_cluster(name) {
            Ok(spec) => Outcome::ok(spec.to_json() + "\n"),
            Err(e) => Outcome::fail(exit::BAD_CLUSTER, format!("error: {e}\n")),
        },
    }
}
