//! Data-parallel helpers. With the `parallel` feature the batch and subset-DP
//! loops run on rayon; without it they fall back to plain iteration. Both
//! paths produce identical results.

#[cfg(feature = "parallel")]
use rayon::prelude::*;

/// Subset tables below this many ground points are always filled sequentially.
pub const PARALLEL_MIN_BITS: usize = 11;

pub fn map_seq<T, R, F>(items: &[T], f: F) -> Vec<R>
where
    F: Fn(&T) -> R,
{
    items.iter().map(f).collect()
}

#[cfg(feature = "parallel")]
pub fn map_par<T, R, F>(items: &[T], f: F) -> Vec<R>
where
    T: Sync,
    R: Send,
    F: Fn(&T) -> R + Sync + Send,
{
    items.par_iter().map(f).collect()
}

/// Maps `f` over a batch, in parallel when the feature is enabled. Output
/// order always follows input order.
pub fn map<T, R, F>(items: &[T], f: F) -> Vec<R>
where
    T: Sync,
    R: Send,
    F: Fn(&T) -> R + Sync + Send,
{
    #[cfg(feature = "parallel")]
    {
        map_par(items, f)
    }
    #[cfg(not(feature = "parallel"))]
    {
        map_seq(items, f)
    }
}

/// Fills a table indexed by subsets of an `n`-point ground set, where entry
/// `S` may read any entry for a proper subset of `S`.
pub fn fill_subset_table<V, F>(n: usize, empty: V, f: F) -> Vec<V>
where
    V: Clone + Send + Sync,
    F: Fn(usize, &[V]) -> V + Sync + Send,
{
    #[cfg(feature = "parallel")]
    {
        if n >= PARALLEL_MIN_BITS {
            return fill_subset_table_par(n, empty, f);
        }
    }
    fill_subset_table_seq(n, empty, f)
}

pub fn fill_subset_table_seq<V, F>(n: usize, empty: V, f: F) -> Vec<V>
where
    V: Clone,
    F: Fn(usize, &[V]) -> V,
{
    let size = 1usize << n;
    let mut table = vec![empty; size];
    // proper subsets are numerically smaller, so ascending order is a valid schedule
    for s in 1..size {
        let v = f(s, &table);
        table[s] = v;
    }
    table
}

#[cfg(feature = "parallel")]
pub fn fill_subset_table_par<V, F>(n: usize, empty: V, f: F) -> Vec<V>
where
    V: Clone + Send + Sync,
    F: Fn(usize, &[V]) -> V + Sync + Send,
{
    let size = 1usize << n;
    let mut layers: Vec<Vec<usize>> = vec![Vec::new(); n + 1];
    for s in 1..size {
        layers[s.count_ones() as usize].push(s);
    }
    let mut table = vec![empty; size];
    for layer in &layers[1..] {
        let values: Vec<V> = layer.par_iter().map(|&s| f(s, &table)).collect();
        for (&s, v) in layer.iter().zip(values) {
            table[s] = v;
        }
    }
    table
}

#[cfg(test)]
mod tests {
    use super::*;

    fn subset_sum_table(n: usize, parallel: bool) -> Vec<u64> {
        let f = |s: usize, t: &[u64]| {
            let low = s & s.wrapping_neg();
            t[s ^ low] + low.trailing_zeros() as u64 + 1
        };
        if parallel {
            #[cfg(feature = "parallel")]
            {
                return fill_subset_table_par(n, 0, f);
            }
        }
        fill_subset_table_seq(n, 0, f)
    }

    #[test]
    fn sequential_and_parallel_tables_agree() {
        let seq = subset_sum_table(12, false);
        let par = subset_sum_table(12, true);
        assert_eq!(seq, par);
        assert_eq!(seq[0b1011], 1 + 2 + 4);
    }

    #[test]
    fn batch_map_keeps_order() {
        let xs: Vec<u32> = (0..100).collect();
        assert_eq!(map(&xs, |x| x * 2), map_seq(&xs, |x| x * 2));
    }
}
