//! Finite-h averages over tuples, the random-residue model and the composed
//! family average.
//!
//! Every tuple statistic used here is invariant under translating a tuple and
//! permuting its entries, so sweeps visit one representative per class:
//! sorted tuples starting at 1, weighted by `k! (h - span)`. The class
//! evaluation is bit-identical to evaluating each member, so the resulting
//! atoms are exactly those of the full sweep. [`SweepMode::Exhaustive`] walks
//! every ordered tuple instead and exists for cross-checking.

mod distribution;
mod montecarlo;
mod sweep;

pub use distribution::{ks_distance, Atom, EmpiricalDistribution, Histogram, Provenance};
pub use montecarlo::{sample_random_singular, MonteCarloConfig};
pub use sweep::{
    empirical_composed_average, empirical_distribution, empirical_moment, ComposedAverage,
    SweepMode, SweepOptions, TranslationClasses, DEFAULT_BUDGET,
};

use crate::error::{Error, Result};

/// Split `[0, total)` into `shards` contiguous ranges, run `f` on each in its
/// own thread and return the results in range order.
pub(crate) fn run_sharded<T, F>(shards: usize, total: u128, f: F) -> Result<Vec<T>>
where
    T: Send,
    F: Fn(u128, u128) -> Result<T> + Sync,
{
    let shards = shards.max(1) as u128;
    let bounds: Vec<(u128, u128)> = (0..shards)
        .map(|s| (total * s / shards, total * (s + 1) / shards))
        .collect();
    if bounds.len() == 1 {
        return Ok(vec![f(0, total)?]);
    }
    std::thread::scope(|scope| {
        let handles: Vec<_> = bounds
            .iter()
            .map(|&(a, b)| {
                let f = &f;
                scope.spawn(move || f(a, b))
            })
            .collect();
        handles
            .into_iter()
            .map(|h| {
                h.join()
                    .map_err(|_| Error::Arithmetic("worker thread panicked".into()))?
            })
            .collect()
    })
}
