//! Seed derivation and order-preserving parallel trial execution.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

/// Environment variable capping the worker count.
pub const THREADS_ENV: &str = "ORDERSTAT_THREADS";

#[inline]
fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Counter-based seed for trial `trial` of cell `(b, n)`.
pub fn trial_seed(base_seed: u64, b: usize, n: usize, trial: usize) -> u64 {
    let mut h = splitmix64(base_seed);
    for x in [b as u64, n as u64, trial as u64] {
        h = splitmix64(h ^ x);
    }
    h
}

pub fn trial_rng(base_seed: u64, b: usize, n: usize, trial: usize) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(trial_seed(base_seed, b, n, trial))
}

/// Worker count from `ORDERSTAT_THREADS`, or `None` for the pool default.
pub fn workers_from_env() -> Option<usize> {
    std::env::var(THREADS_ENV)
        .ok()
        .and_then(|v| v.trim().parse::<usize>().ok())
        .filter(|&w| w >= 1)
}

/// Runs `f(0..count)` and returns the results in trial-index order.
///
/// `workers = Some(1)` runs inline on the caller's thread. Output is the
/// same for every worker count because each trial is a pure function of
/// its index and the merge order is fixed.
pub fn run_trials<T, F>(count: usize, workers: Option<usize>, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize) -> T + Sync + Send,
{
    match workers {
        Some(1) => (0..count).map(f).collect(),
        Some(w) => match rayon::ThreadPoolBuilder::new().num_threads(w).build() {
            Ok(pool) => pool.install(|| (0..count).into_par_iter().map(&f).collect()),
            Err(_) => (0..count).map(f).collect(),
        },
        None => (0..count).into_par_iter().map(f).collect(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::Rng;

    #[test]
    fn seeds_differ_across_cells() {
        let a = trial_seed(1, 1, 100, 0);
        assert_ne!(a, trial_seed(1, 1, 100, 1));
        assert_ne!(a, trial_seed(1, 2, 100, 0));
        assert_ne!(a, trial_seed(1, 1, 101, 0));
        assert_ne!(a, trial_seed(2, 1, 100, 0));
        assert_eq!(a, trial_seed(1, 1, 100, 0));
    }

    #[test]
    fn ordered_results_independent_of_workers() {
        let f = |i: usize| trial_rng(7, 0, 0, i).gen::<u64>();
        let one = run_trials(257, Some(1), f);
        let eight = run_trials(257, Some(8), f);
        let default = run_trials(257, None, f);
        assert_eq!(one, eight);
        assert_eq!(one, default);
    }
}
