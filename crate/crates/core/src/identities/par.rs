//! Deterministic chunked evaluation and pairwise-tree summation.

use num_traits::Zero;

use crate::scalar::{Cx, Scalar};

fn chunk_len(n: usize, threads: usize) -> usize {
    n.div_ceil(threads.max(1)).max(1)
}

/// `items.iter().map(f)` spread over `threads` contiguous chunks.
pub fn par_map<I, O, F>(items: &[I], threads: usize, f: F) -> Vec<O>
where
    I: Sync,
    O: Send,
    F: Fn(&I) -> O + Sync,
{
    if threads <= 1 || items.len() < 2 {
        return items.iter().map(f).collect();
    }
    let f = &f;
    std::thread::scope(|scope| {
        let handles: Vec<_> = items
            .chunks(chunk_len(items.len(), threads))
            .map(|chunk| scope.spawn(move || chunk.iter().map(f).collect::<Vec<O>>()))
            .collect();
        handles
            .into_iter()
            .flat_map(|h| h.join().expect("worker panicked"))
            .collect()
    })
}

/// Sum of `values`. With one thread this is a left fold; otherwise each
/// contiguous chunk is folded on its own worker and the partial sums are
/// combined pairwise, so the result depends only on the thread count.
pub fn tree_sum<T: Scalar>(values: &[Cx<T>], threads: usize) -> Cx<T> {
    let fold = |xs: &[Cx<T>]| xs.iter().fold(Cx::<T>::zero(), |s, v| s + v);
    if threads <= 1 || values.len() < 2 {
        return fold(values);
    }
    let mut partial: Vec<Cx<T>> = std::thread::scope(|scope| {
        let handles: Vec<_> = values
            .chunks(chunk_len(values.len(), threads))
            .map(|chunk| scope.spawn(move || fold(chunk)))
            .collect();
        handles.into_iter().map(|h| h.join().expect("worker panicked")).collect()
    });
    while partial.len() > 1 {
        partial = partial
            .chunks(2)
            .map(|p| if p.len() == 2 { p[0] + p[1] } else { p[0] })
            .collect();
    }
    partial[0]
}
