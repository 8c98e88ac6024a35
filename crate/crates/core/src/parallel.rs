//! Static work splitting over scoped threads: the items are cut into `t`
//! contiguous chunks and each chunk runs on its own thread. With `t == 1`
//! everything runs inline on the caller's thread.

use std::thread;

fn chunk_len(len: usize, threads: usize) -> usize {
    len.div_ceil(threads.max(1)).max(1)
}

/// Applies `f` to every item, returning results in item order.
pub(crate) fn map_mut<T, R, F>(threads: usize, items: &mut [T], f: F) -> Vec<R>
where
    T: Send,
    R: Send,
    F: Fn(&mut T) -> R + Sync,
{
    if threads <= 1 || items.len() <= 1 {
        return items.iter_mut().map(f).collect();
    }
    let size = chunk_len(items.len(), threads);
    let f = &f;
    thread::scope(|s| {
        let handles: Vec<_> = items
            .chunks_mut(size)
            .map(|chunk| s.spawn(move || chunk.iter_mut().map(f).collect::<Vec<R>>()))
            .collect();
        handles
            .into_iter()
            .flat_map(|h| h.join().expect("worker thread panicked"))
            .collect()
    })
}

/// Runs `f` on each chunk of `items` and concatenates the outputs in chunk
/// order.
pub(crate) fn flat_map_chunks<T, R, F>(threads: usize, items: &[T], f: F) -> Vec<R>
where
    T: Sync,
    R: Send,
    F: Fn(&[T]) -> Vec<R> + Sync,
{
    if threads <= 1 || items.len() <= 1 {
        return f(items);
    }
    let size = chunk_len(items.len(), threads);
    let f = &f;
    thread::scope(|s| {
        let handles: Vec<_> = items.chunks(size).map(|chunk| s.spawn(move || f(chunk))).collect();
        handles
            .into_iter()
            .flat_map(|h| h.join().expect("worker thread panicked"))
            .collect()
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn results_keep_item_order() {
        for t in [1, 2, 3, 8, 100] {
            let mut items: Vec<u32> = (0..17).collect();
            let out = map_mut(t, &mut items, |x| {
                *x += 1;
                *x * 2
            });
            assert_eq!(out, (1..=17).map(|x| x * 2).collect::<Vec<_>>());
            let flat = flat_map_chunks(t, &items, |c| c.to_vec());
            assert_eq!(flat, items);
        }
        let mut empty: Vec<u32> = Vec::new();
        assert!(map_mut(4, &mut empty, |x| *x).is_empty());
    }
}
