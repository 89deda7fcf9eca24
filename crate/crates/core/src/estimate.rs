//! Monte Carlo estimates with standard errors, accumulated over independent
//! RNG batches and merged in batch order.

use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::rng::RngStream;

/// Samples per RNG batch unless configured otherwise.
pub const DEFAULT_BATCH_SIZE: u64 = 1 << 16;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Estimate {
    pub value: f64,
    /// Sample standard deviation (with `N − 1`) over `sqrt(N)`.
    pub stderr: f64,
    pub n_samples: u64,
}

impl Estimate {
    pub fn scaled(self, c: f64) -> Estimate {
        Estimate { value: c * self.value, stderr: c.abs() * self.stderr, ..self }
    }
}

/// Running sums of a sample.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct Tally {
    pub n: u64,
    pub sum: f64,
    pub sum_sq: f64,
}

impl Tally {
    pub fn push(&mut self, x: f64) {
        self.n += 1;
        self.sum += x;
        self.sum_sq += x * x;
    }

    pub fn merge(&mut self, other: &Tally) {
        self.n += other.n;
        self.sum += other.sum;
        self.sum_sq += other.sum_sq;
    }

    pub fn mean(&self) -> f64 {
        if self.n == 0 {
            0.0
        } else {
            self.sum / self.n as f64
        }
    }

    pub fn estimate(&self) -> Estimate {
        let n = self.n as f64;
        let mean = self.mean();
        let stderr = if self.n > 1 {
            let var = ((self.sum_sq - n * mean * mean) / (n - 1.0)).max(0.0);
            (var / n).sqrt()
        } else {
            0.0
        };
        Estimate { value: mean, stderr, n_samples: self.n }
    }
}

/// Splits `n` samples into batches of `batch_size`, runs `work(rng, count)`
/// on each batch's own stream in parallel, and returns the results in batch
/// order. The output depends only on `(stream, n, batch_size)`.
pub fn run_batches<T, F>(stream: RngStream, n: u64, batch_size: u64, work: F) -> Vec<T>
where
    T: Send,
    F: Fn(&mut ChaCha8Rng, u64) -> T + Sync,
{
    let batch_size = batch_size.max(1);
    let batches = n.div_ceil(batch_size);
    (0..batches)
        .into_par_iter()
        .map(|b| {
            let count = batch_size.min(n - b * batch_size);
            let mut rng = stream.batch(b as u32).rng();
            work(&mut rng, count)
        })
        .collect()
}

/// Batched tally of `sample(rng)` over `n` draws.
pub fn tally_batches<F>(stream: RngStream, n: u64, batch_size: u64, sample: F) -> Tally
where
    F: Fn(&mut ChaCha8Rng) -> f64 + Sync,
{
    let parts = run_batches(stream, n, batch_size, |rng, count| {
        let mut t = Tally::default();
        for _ in 0..count {
            t.push(sample(rng));
        }
        t
    });
    let mut total = Tally::default();
    for p in &parts {
        total.merge(p);
    }
    total
}
