//! Data-parallel helpers. With the `parallel` feature (default) the maps run
//! on rayon; without it they fall back to sequential iteration. Order is
//! preserved either way, so output is deterministic across thread counts.

use crate::config::Options;

#[cfg(feature = "parallel")]
pub fn par_map<T, U, F>(items: Vec<T>, opts: &Options, f: F) -> Vec<U>
where
    T: Send,
    U: Send,
    F: Fn(T) -> U + Sync + Send,
{
    use rayon::prelude::*;
    match opts.threads {
        Some(1) => items.into_iter().map(f).collect(),
        Some(n) => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(n)
                .build()
                .expect("thread pool");
            pool.install(|| items.into_par_iter().map(f).collect())
        }
        None => items.into_par_iter().map(f).collect(),
    }
}

#[cfg(not(feature = "parallel"))]
pub fn par_map<T, U, F>(items: Vec<T>, _opts: &Options, f: F) -> Vec<U>
where
    T: Send,
    U: Send,
    F: Fn(T) -> U + Sync + Send,
{
    items.into_iter().map(f).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn preserves_order() {
        let opts = Options::default();
        let out = par_map((0..64).collect::<Vec<i64>>(), &opts, |v| v * v);
        assert_eq!(out, (0..64).map(|v| v * v).collect::<Vec<i64>>());
    }

    #[test]
    fn single_thread_option() {
        let mut opts = Options::default();
        opts.threads = Some(1);
        let out = par_map(vec![3, 1, 2], &opts, |v| v + 1);
        assert_eq!(out, vec![4, 2, 3]);
    }
}
