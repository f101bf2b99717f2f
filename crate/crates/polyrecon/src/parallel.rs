//! Data-parallel helpers with a sequential fallback.
//!
//! The enumeration- and verification-heavy entry points (oracle class
//! building, codebook generation, batch decoding) are embarrassingly
//! parallel over independent items. With the `parallel` feature (default)
//! they fan out over rayon; without it the same entry points run the
//! sequential implementations below. The sequential paths are always
//! compiled and exported so benchmarks and tests can compare both.

#[cfg(feature = "parallel")]
use rayon::prelude::*;

/// Map a range of indices and concatenate the per-index result vectors in
/// index order.
pub fn flat_map_range<T, F>(range: std::ops::Range<u64>, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(u64) -> Vec<T> + Sync + Send,
{
    #[cfg(feature = "parallel")]
    {
        range.into_par_iter().map(f).flatten().collect()
    }
    #[cfg(not(feature = "parallel"))]
    {
        flat_map_range_seq(range, f)
    }
}

/// Sequential reference version of [`flat_map_range`].
pub fn flat_map_range_seq<T, F>(range: std::ops::Range<u64>, f: F) -> Vec<T>
where
    F: Fn(u64) -> Vec<T>,
{
    range.flat_map(f).collect()
}

/// Map items of a slice, preserving order.
pub fn map_slice<I, T, F>(items: &[I], f: F) -> Vec<T>
where
    I: Sync,
    T: Send,
    F: Fn(&I) -> T + Sync + Send,
{
    #[cfg(feature = "parallel")]
    {
        items.par_iter().map(f).collect()
    }
    #[cfg(not(feature = "parallel"))]
    {
        map_slice_seq(items, f)
    }
}

/// Sequential reference version of [`map_slice`].
pub fn map_slice_seq<I, T, F>(items: &[I], f: F) -> Vec<T>
where
    F: Fn(&I) -> T,
{
    items.iter().map(f).collect()
}

/// Fold chunks of a range and merge the partial accumulators.
pub fn fold_range_chunks<A, F, M>(range: std::ops::Range<u64>, chunk: u64, init: A, f: F, merge: M) -> A
where
    A: Send + Sync + Clone,
    F: Fn(A, std::ops::Range<u64>) -> A + Sync + Send,
    M: Fn(A, A) -> A + Sync + Send,
{
    #[cfg(feature = "parallel")]
    {
        let chunks = split_range(range, chunk);
        let partials: Vec<A> = chunks
            .into_par_iter()
            .map(|r| f(init.clone(), r))
            .collect();
        partials.into_iter().fold(init, merge)
    }
    #[cfg(not(feature = "parallel"))]
    {
        fold_range_chunks_seq(range, chunk, init, f, merge)
    }
}

/// Sequential reference version of [`fold_range_chunks`].
pub fn fold_range_chunks_seq<A, F, M>(
    range: std::ops::Range<u64>,
    chunk: u64,
    init: A,
    f: F,
    merge: M,
) -> A
where
    A: Clone,
    F: Fn(A, std::ops::Range<u64>) -> A,
    M: Fn(A, A) -> A,
{
    let partials: Vec<A> = split_range(range, chunk)
        .into_iter()
        .map(|r| f(init.clone(), r))
        .collect();
    partials.into_iter().fold(init, merge)
}

fn split_range(range: std::ops::Range<u64>, chunk: u64) -> Vec<std::ops::Range<u64>> {
    assert!(chunk > 0);
    let mut out = Vec::new();
    let mut lo = range.start;
    while lo < range.end {
        let hi = (lo + chunk).min(range.end);
        out.push(lo..hi);
        lo = hi;
    }
    out
}
