//! Thread-count configuration.
//!
//! Internal data parallelism (row-partitioned matrix products, grid assembly)
//! is capped by the `KREIN_KIT_THREADS` environment variable. Results are
//! bitwise identical for any thread count because work is split by disjoint
//! output rows.

use std::sync::OnceLock;

static THREADS: OnceLock<usize> = OnceLock::new();

const DEFAULT_CAP: usize = 8;

/// Number of worker threads the crate may use. Resolved once per process:
/// `KREIN_KIT_THREADS` if set (values < 1 mean 1), otherwise the available
/// parallelism capped at 8.
pub fn effective_threads() -> usize {
    *THREADS.get_or_init(|| {
        if let Ok(v) = std::env::var("KREIN_KIT_THREADS") {
            if let Ok(n) = v.trim().parse::<usize>() {
                return n.max(1);
            }
        }
        std::thread::available_parallelism().map_or(1, |n| n.get().min(DEFAULT_CAP))
    })
}
