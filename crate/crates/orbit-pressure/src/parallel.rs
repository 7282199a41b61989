//! Order-preserving parallel map over independent work items.

use rayon::prelude::*;

use crate::error::{CliError, CliResult};

/// Environment variable capping the worker count.
pub const THREADS_ENV: &str = "ORBIT_PRESSURE_THREADS";

fn thread_cap() -> CliResult<Option<usize>> {
    match std::env::var(THREADS_ENV) {
        Err(_) => Ok(None),
        Ok(v) => match v.trim().parse::<usize>() {
            Ok(0) | Err(_) => Err(CliError::usage(format!("{THREADS_ENV} must be a positive integer, got {v:?}"))),
            Ok(n) => Ok(Some(n)),
        },
    }
}

/// `items.map(f)` with results in input order, whatever the execution order.
pub fn map_ordered<T, U, F>(items: &[T], f: F) -> CliResult<Vec<U>>
where
    T: Sync,
    U: Send,
    F: Fn(&T) -> U + Sync + Send,
{
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(n) = thread_cap()? {
        builder = builder.num_threads(n);
    }
    let pool = builder.build().map_err(|e| CliError::Runtime(format!("thread pool: {e}")))?;
    Ok(pool.install(|| items.par_iter().map(&f).collect()))
}
