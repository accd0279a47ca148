//! Worker-count control. Results never depend on the worker count.

/// Environment variable capping the number of worker threads.
pub const WORKERS_ENV: &str = "THRESHOLD_WORKERS";

/// Worker cap from `THRESHOLD_WORKERS`; `None` when unset or unparsable.
pub fn configured_workers() -> Option<usize> {
    std::env::var(WORKERS_ENV).ok()?.trim().parse().ok().filter(|&n: &usize| n > 0)
}

/// Runs `f` on a dedicated pool with `workers` threads (all cores for `None`).
pub fn with_workers<R, F>(workers: Option<usize>, f: F) -> R
where
    R: Send,
    F: FnOnce() -> R + Send,
{
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(n) = workers {
        builder = builder.num_threads(n);
    }
    match builder.build() {
        Ok(pool) => pool.install(f),
        Err(_) => f(),
    }
}
