//! Deterministic chunked maps, parallel when the `parallel` feature is on.

/// Apply `f(from, to)` to consecutive chunks of `0..n`, results in order.
#[cfg(feature = "parallel")]
pub(crate) fn map_chunks<T: Send>(n: u64, chunk: u64, f: impl Fn(u64, u64) -> T + Sync + Send) -> Vec<T> {
    use rayon::prelude::*;
    let nchunks = n.div_ceil(chunk);
    (0..nchunks).into_par_iter().map(|c| f(c * chunk, ((c + 1) * chunk).min(n))).collect()
}

#[cfg(not(feature = "parallel"))]
pub(crate) fn map_chunks<T: Send>(n: u64, chunk: u64, f: impl Fn(u64, u64) -> T + Sync + Send) -> Vec<T> {
    let nchunks = n.div_ceil(chunk);
    (0..nchunks).map(|c| f(c * chunk, ((c + 1) * chunk).min(n))).collect()
}

/// Apply `f` to every item, in parallel when enabled, results in order.
#[cfg(feature = "parallel")]
pub(crate) fn map_items<I: Sync, T: Send>(items: &[I], f: impl Fn(&I) -> T + Sync + Send) -> Vec<T> {
    use rayon::prelude::*;
    items.par_iter().map(f).collect()
}

#[cfg(not(feature = "parallel"))]
pub(crate) fn map_items<I: Sync, T: Send>(items: &[I], f: impl Fn(&I) -> T + Sync + Send) -> Vec<T> {
    items.iter().map(f).collect()
}

/// Digits of `i` in base `b`, most significant first, padded to `len`.
pub(crate) fn index_digits(mut i: u64, b: u64, len: usize) -> Vec<u64> {
    let mut d = vec![0; len];
    for slot in d.iter_mut().rev() {
        *slot = i % b;
        i /= b;
    }
    d
}

/// Step `d` to the next word in lexicographic order; false on wrap.
pub(crate) fn next_word(d: &mut [u64], b: u64) -> bool {
    for x in d.iter_mut().rev() {
        *x += 1;
        if *x < b {
            return true;
        }
        *x = 0;
    }
    false
}
