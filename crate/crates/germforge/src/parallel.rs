//! Curve search spread over a rayon pool sized by `GERMFORGE_THREADS`.

use germforge_core::search::{exponent_tuples, search_tuple, sort_hits, SearchHit, SearchParams};
use germforge_core::HermitianForm;
use rayon::prelude::*;

pub const THREADS_VAR: &str = "GERMFORGE_THREADS";

/// Worker count from the environment, if set to a positive integer.
pub fn thread_cap() -> Option<usize> {
    std::env::var(THREADS_VAR)
        .ok()
        .and_then(|v| v.trim().parse::<usize>().ok())
        .filter(|&n| n > 0)
}

pub fn pool() -> rayon::ThreadPool {
    let mut b = rayon::ThreadPoolBuilder::new();
    if let Some(n) = thread_cap() {
        b = b.num_threads(n);
    }
    b.build().expect("thread pool")
}

/// Same result as the sequential search, tuples evaluated in parallel.
pub fn parallel_search(r: &HermitianForm, params: &SearchParams) -> germforge_core::Result<Vec<SearchHit>> {
    let tuples = exponent_tuples(r.nvars(), params.max_exponent);
    let results: Vec<_> = pool().install(|| {
        tuples
            .par_iter()
            .map(|t| search_tuple(r, t, params))
            .collect()
    });
    let mut hits = Vec::new();
    for h in results {
        if let Some(h) = h? {
            hits.push(h);
        }
    }
    sort_hits(&mut hits);
    Ok(hits)
}
