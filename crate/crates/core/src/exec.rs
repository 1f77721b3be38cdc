//! Stratified execution of Monte Carlo workloads.
//!
//! A workload is split into a fixed number of strata; stratum `i` owns the
//! ChaCha stream `(seed, i)` and results are merged in stratum order. The
//! merge therefore does not depend on scheduling, and the sequential and
//! rayon paths produce identical bytes.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

#[cfg(feature = "parallel")]
use rayon::prelude::*;

/// Strata per run. Fixed so that output is independent of worker count.
pub const STRATA: u64 = 64;

/// Deterministic RNG for one stratum of a seeded run.
pub fn stratum_rng(seed: u64, stratum: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stratum);
    rng
}

/// Splits `total` items into `STRATA` near-equal chunks (first chunks get the
/// remainder), runs `job(stratum_index, chunk_len, rng)` on each, and returns
/// the per-stratum results in stratum order.
pub fn run_strata<T, F>(seed: u64, total: u64, job: F) -> Vec<T>
where
    T: Send,
    F: Fn(u64, u64, &mut ChaCha8Rng) -> T + Sync,
{
    let base = total / STRATA;
    let extra = total % STRATA;
    let chunk = |i: u64| base + u64::from(i < extra);

    #[cfg(feature = "parallel")]
    {
        (0..STRATA)
            .into_par_iter()
            .map(|i| {
                let mut rng = stratum_rng(seed, i);
                job(i, chunk(i), &mut rng)
            })
            .collect()
    }
    #[cfg(not(feature = "parallel"))]
    {
        (0..STRATA)
            .map(|i| {
                let mut rng = stratum_rng(seed, i);
                job(i, chunk(i), &mut rng)
            })
            .collect()
    }
}

/// Always-sequential variant, kept for benchmarking the parallel speedup.
pub fn run_strata_seq<T, F>(seed: u64, total: u64, job: F) -> Vec<T>
where
    F: Fn(u64, u64, &mut ChaCha8Rng) -> T,
{
    let base = total / STRATA;
    let extra = total % STRATA;
    (0..STRATA)
        .map(|i| {
            let mut rng = stratum_rng(seed, i);
            job(i, base + u64::from(i < extra), &mut rng)
        })
        .collect()
}

/// Kahan compensated accumulator. Strata sums are merged with this so the
/// reduction error stays at a few ulps regardless of summand count.
#[derive(Debug, Clone, Copy, Default)]
pub struct KahanSum {
    sum: f64,
    carry: f64,
}

impl KahanSum {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add(&mut self, x: f64) {
        let y = x - self.carry;
        let t = self.sum + y;
        self.carry = (t - self.sum) - y;
        self.sum = t;
    }

    pub fn value(&self) -> f64 {
        self.sum
    }
}

impl FromIterator<f64> for KahanSum {
    fn from_iter<I: IntoIterator<Item = f64>>(iter: I) -> Self {
        let mut acc = KahanSum::new();
        for x in iter {
            acc.add(x);
        }
        acc
    }
}
