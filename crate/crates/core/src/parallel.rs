//! Worker pool for the parallel entry points, capped by `BUBRES_THREADS`.

use std::sync::OnceLock;

use crate::error::{Error, Result};

pub const THREADS_VAR: &str = "BUBRES_THREADS";

/// A fresh pool sized by `BUBRES_THREADS`, or rayon's default when unset.
pub fn thread_pool() -> Result<rayon::ThreadPool> {
    let mut b = rayon::ThreadPoolBuilder::new();
    if let Ok(v) = std::env::var(THREADS_VAR) {
        let n: usize = v
            .trim()
            .parse()
            .ok()
            .filter(|&n| n > 0)
            .ok_or_else(|| Error::InvalidParameter(format!("{THREADS_VAR} must be a positive integer, got {v:?}")))?;
        b = b.num_threads(n);
    }
    b.build().map_err(|e| Error::InvalidParameter(format!("thread pool: {e}")))
}

/// Runs `f` in the capped pool. Inside any rayon pool (for instance one the
/// caller installed) `f` runs in place. An unusable variable leaves rayon's
/// global pool in charge.
pub(crate) fn install<R: Send>(f: impl FnOnce() -> R + Send) -> R {
    static POOL: OnceLock<Option<rayon::ThreadPool>> = OnceLock::new();
    if rayon::current_thread_index().is_some() {
        return f();
    }
    match POOL.get_or_init(|| std::env::var_os(THREADS_VAR).and_then(|_| thread_pool().ok())) {
        Some(pool) => pool.install(f),
        None => f(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn nested_install_runs_in_callers_pool() {
        let pool = rayon::ThreadPoolBuilder::new().num_threads(2).build().unwrap();
        let n = pool.install(|| install(rayon::current_num_threads));
        assert_eq!(n, 2);
    }
}
