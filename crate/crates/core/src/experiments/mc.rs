//! Crude Monte Carlo of `P(X̄_n ∈ A)` over batched RNG streams.

use std::path::Path;

use rand_chacha::ChaCha8Rng;

use crate::cadlag::{GridPath, StepPath, TargetSet};
use crate::error::{domain, Result};
use crate::estimate::{run_batches, Estimate, Tally, DEFAULT_BATCH_SIZE};
use crate::levy_model::LevyModel;
use crate::rng::RngStream;
use crate::simulate::{default_grid, sample_scaled_rw, subordinated_walk, IncrementModel, LevySampler};

/// Process whose scaled paths are sampled.
#[derive(Debug, Clone)]
pub enum Source {
    Levy(LevyModel),
    Walk(IncrementModel),
    Subordinated(IncrementModel),
}

/// Per-batch path generator; reuses buffers across draws.
enum PathGen<'a> {
    Levy(LevySampler),
    Walk(&'a IncrementModel, u64),
    Subordinated(&'a IncrementModel, u64, usize),
}

impl<'a> PathGen<'a> {
    fn new(source: &'a Source, n: u64, m: usize) -> Result<Self> {
        Ok(match source {
            Source::Levy(model) => PathGen::Levy(LevySampler::new(model, n, m)?),
            Source::Walk(inc) => PathGen::Walk(inc, n),
            Source::Subordinated(inc) => PathGen::Subordinated(inc, n, m),
        })
    }

    /// Next path and, for Lévy sources, its exact jump list.
    fn with_next<T>(&mut self, rng: &mut ChaCha8Rng, f: impl FnOnce(&GridPath, Option<&[crate::cadlag::Jump]>) -> T) -> T {
        match self {
            PathGen::Levy(s) => {
                s.sample(rng);
                let (g, jumps) = s.last();
                f(g, Some(jumps))
            }
            PathGen::Walk(inc, n) => {
                let g = sample_scaled_rw(inc, *n, rng).expect("n >= 1");
                f(&g, None)
            }
            PathGen::Subordinated(inc, n, m) => {
                let g = subordinated_walk(inc, *n, *m, rng).expect("n, m >= 1");
                f(&g, None)
            }
        }
    }
}

/// Hit-fraction estimates for several sets evaluated on the same sampled
/// paths, with grid resolution `m`.
pub fn mc_probabilities(
    source: &Source,
    n: u64,
    sets: &[TargetSet],
    samples: u64,
    stream: RngStream,
    batch_size: u64,
    m: usize,
) -> Result<Vec<Estimate>> {
    if samples == 0 {
        return Err(domain("need at least one sample"));
    }
    if n == 0 || m == 0 {
        return Err(domain("need n >= 1 and m >= 1"));
    }
    // validate once so the batch closures can assume a well-formed source
    PathGen::new(source, n, m)?;
    let terminal_fast = matches!(source, Source::Levy(_)) && sets.iter().all(TargetSet::terminal_only);
    let parts = run_batches(stream, samples, batch_size, |rng, count| {
        let mut hits = vec![0u64; sets.len()];
        if terminal_fast {
            let Source::Levy(model) = source else { unreachable!() };
            let mut s = LevySampler::new(model, n, 1).expect("validated");
            for _ in 0..count {
                let x = s.sample_terminal(rng);
                for (h, set) in hits.iter_mut().zip(sets) {
                    *h += set.contains_terminal(x) as u64;
                }
            }
        } else {
            let mut gen = PathGen::new(source, n, m).expect("validated");
            for _ in 0..count {
                gen.with_next(rng, |g, jumps| {
                    for (h, set) in hits.iter_mut().zip(sets) {
                        *h += set.contains_grid(g, jumps) as u64;
                    }
                });
            }
        }
        hits
    });
    let mut totals = vec![0u64; sets.len()];
    for p in &parts {
        for (t, h) in totals.iter_mut().zip(p) {
            *t += h;
        }
    }
    Ok(totals
        .iter()
        .map(|&h| Tally { n: samples, sum: h as f64, sum_sq: h as f64 }.estimate())
        .collect())
}

/// `P(X̄_n ∈ A)` with binomial standard error, default batching and grid.
pub fn mc_probability(source: &Source, n: u64, set: &TargetSet, samples: u64, stream: RngStream) -> Result<Estimate> {
    let v = mc_probabilities(source, n, std::slice::from_ref(set), samples, stream, DEFAULT_BATCH_SIZE, default_grid(n))?;
    Ok(v[0])
}

/// `(sup, terminal)` of each sampled path, in stream order.
pub fn sample_functionals(
    source: &Source,
    n: u64,
    samples: u64,
    stream: RngStream,
    batch_size: u64,
    m: usize,
) -> Result<Vec<(f64, f64)>> {
    PathGen::new(source, n, m)?;
    let parts = run_batches(stream, samples, batch_size, |rng, count| {
        let mut gen = PathGen::new(source, n, m).expect("validated");
        (0..count).map(|_| gen.with_next(rng, |g, _| (g.sup(), g.terminal()))).collect::<Vec<_>>()
    });
    Ok(parts.into_iter().flatten().collect())
}

/// Writes the first `count` paths of the stream's first batch as CSV files
/// `n{n}_path{i}.csv` (and `n{n}_jumps{i}.csv` for Lévy sources) in `dir`.
pub fn dump_paths(source: &Source, n: u64, m: usize, count: usize, stream: RngStream, dir: &Path) -> Result<()> {
    std::fs::create_dir_all(dir)?;
    let mut rng = stream.batch(0).rng();
    let mut gen = PathGen::new(source, n, m)?;
    for i in 0..count {
        let (grid, jumps) = gen.with_next(&mut rng, |g, j| (g.to_csv(), j.map(|j| j.to_vec())));
        std::fs::write(dir.join(format!("n{n}_path{i}.csv")), grid)?;
        if let Some(j) = jumps {
            let path = StepPath::from_unsorted(j)?;
            std::fs::write(dir.join(format!("n{n}_jumps{i}.csv")), path.to_csv())?;
        }
    }
    Ok(())
}
