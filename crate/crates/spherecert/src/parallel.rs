//! Multi-threaded versions of the Monte Carlo estimators.
//!
//! Work is split along the sample blocks of `spherecert_core::montecarlo`, so
//! results are bit-identical to the sequential estimators for any thread count.

use rayon::prelude::*;

use spherecert_core::montecarlo::{self, McEstimate, RobustnessEstimate, RobustnessQuery};
use spherecert_core::network::ReluNetwork;
use spherecert_core::{Error, Result};

pub fn estimate_local_robustness(
    net: &ReluNetwork,
    x: &[f64],
    r: f64,
    samples: u64,
    seed: u64,
    z: f64,
) -> Result<RobustnessEstimate> {
    if samples == 0 {
        return Err(Error::Domain {
            name: "samples",
            value: 0.0,
            expected: "samples >= 1",
        });
    }
    let query = RobustnessQuery::new(net, x, r)?;
    let blocks: Vec<_> = montecarlo::blocks(samples).collect();
    let agreements = blocks
        .par_iter()
        .map(|&(b, count)| query.block_agreements(seed, b, count))
        .sum();
    query.finish(agreements, samples, z, seed)
}

pub fn mc_cap_fractions(
    thresholds: &[f64],
    d: usize,
    samples: u64,
    seed: u64,
) -> Result<Vec<McEstimate>> {
    // Argument checks are shared with the sequential path on a single sample.
    montecarlo::mc_cap_fractions(thresholds, d, 1, seed)?;
    let blocks: Vec<_> = montecarlo::blocks(samples).collect();
    let totals = blocks
        .par_iter()
        .map(|&(b, count)| montecarlo::cap_block_counts(thresholds, d, seed, b, count))
        .reduce(
            || vec![0u64; thresholds.len()],
            |mut acc, c| {
                acc.iter_mut().zip(c).for_each(|(a, c)| *a += c);
                acc
            },
        );
    totals
        .into_iter()
        .map(|c| McEstimate::from_counts(c, samples, montecarlo::Z_99, seed))
        .collect()
}
