//! Monte Carlo estimates of local robustness and of spherical cap measures.
//!
//! Samples are drawn in fixed-size blocks. Block `i` of a run with seed `s` uses
//! its own ChaCha8 stream (`seed = s`, `stream = i`), so a run can be split across
//! any number of workers and still produce bit-identical counts.

use alloc::vec;
use alloc::vec::Vec;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::certify::RobustnessCertificate;
use crate::geometry::sample_unit_sphere_into;
use crate::network::ReluNetwork;
use crate::{Error, Result};

/// Samples per RNG stream.
pub const BLOCK_SAMPLES: u64 = 4096;

/// Two-sided 99% standard normal quantile.
pub const Z_99: f64 = 2.575_829_303_548_900_4;

#[derive(Debug, Clone, PartialEq)]
pub struct McEstimate {
    pub samples: u64,
    /// Number of samples with the counted property (label agreement, cap membership).
    pub successes: u64,
    pub point_estimate: f64,
    pub ci_low: f64,
    pub ci_high: f64,
    /// Normal quantile used for the Wilson interval.
    pub z: f64,
    pub seed: u64,
}

impl McEstimate {
    pub fn from_counts(successes: u64, samples: u64, z: f64, seed: u64) -> Result<Self> {
        let (ci_low, ci_high) = wilson_interval(successes, samples, z)?;
        Ok(Self {
            samples,
            successes,
            point_estimate: successes as f64 / samples as f64,
            ci_low,
            ci_high,
            z,
            seed,
        })
    }

    pub fn failures(&self) -> u64 {
        self.samples - self.successes
    }

    /// Half-width of the confidence interval.
    pub fn half_width(&self) -> f64 {
        (self.ci_high - self.ci_low) / 2.0
    }
}

/// Wilson score interval for a binomial proportion.
pub fn wilson_interval(successes: u64, samples: u64, z: f64) -> Result<(f64, f64)> {
    if samples == 0 {
        return Err(Error::domain("samples", 0.0, "samples >= 1"));
    }
    if successes > samples {
        return Err(Error::domain(
            "successes",
            successes as f64,
            "successes <= samples",
        ));
    }
    if !(z > 0.0 && z.is_finite()) {
        return Err(Error::domain("z", z, "finite and > 0"));
    }
    let n = samples as f64;
    let p = successes as f64 / n;
    let z2 = z * z;
    let denom = 1.0 + z2 / n;
    let center = (p + z2 / (2.0 * n)) / denom;
    let half = z * libm::sqrt(p * (1.0 - p) / n + z2 / (4.0 * n * n)) / denom;
    let low = if successes == 0 {
        0.0
    } else {
        (center - half).clamp(0.0, p)
    };
    let high = if successes == samples {
        1.0
    } else {
        (center + half).clamp(p, 1.0)
    };
    Ok((low, high))
}

/// RNG for block `block` of a run seeded with `seed`.
pub fn block_rng(seed: u64, block: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(block);
    rng
}

/// `(block index, samples in block)` for a run of `samples` draws.
pub fn blocks(samples: u64) -> impl Iterator<Item = (u64, u64)> + Clone {
    let full = samples / BLOCK_SAMPLES;
    let rest = samples % BLOCK_SAMPLES;
    (0..full)
        .map(|b| (b, BLOCK_SAMPLES))
        .chain((rest > 0).then_some((full, rest)))
}

/// Inputs of a robustness estimate, validated once.
#[derive(Debug, Clone, Copy)]
pub struct RobustnessQuery<'a> {
    pub net: &'a ReluNetwork,
    pub x: &'a [f64],
    pub r: f64,
    pub label: u8,
}

impl<'a> RobustnessQuery<'a> {
    pub fn new(net: &'a ReluNetwork, x: &'a [f64], r: f64) -> Result<Self> {
        if !(r > 0.0 && r.is_finite()) {
            return Err(Error::domain("r", r, "finite and > 0"));
        }
        let label = net.label(x)?;
        Ok(Self { net, x, r, label })
    }

    /// Number of draws in one block whose label matches the label at `x`.
    pub fn block_agreements(&self, seed: u64, block: u64, count: u64) -> u64 {
        let mut rng = block_rng(seed, block);
        let d = self.x.len();
        let mut direction = vec![0.0; d];
        let mut point = vec![0.0; d];
        let mut scratch = (Vec::with_capacity(d), Vec::with_capacity(d));
        let mut agreements = 0;
        for _ in 0..count {
            sample_unit_sphere_into(&mut direction, &mut rng);
            for ((p, c), u) in point.iter_mut().zip(self.x).zip(&direction) {
                *p = c + self.r * u;
            }
            if self.net.label_with(&point, &mut scratch) == self.label {
                agreements += 1;
            }
        }
        agreements
    }

    pub fn finish(
        &self,
        agreements: u64,
        samples: u64,
        z: f64,
        seed: u64,
    ) -> Result<RobustnessEstimate> {
        Ok(RobustnessEstimate {
            x: self.x.to_vec(),
            r: self.r,
            label: self.label,
            estimate: McEstimate::from_counts(agreements, samples, z, seed)?,
        })
    }
}

/// Estimated probability that `f(x + ξ) = f(x)` for `ξ` uniform on the sphere of radius `r`.
#[derive(Debug, Clone, PartialEq)]
pub struct RobustnessEstimate {
    pub x: Vec<f64>,
    pub r: f64,
    pub label: u8,
    pub estimate: McEstimate,
}

fn check_samples(samples: u64) -> Result<()> {
    if samples == 0 {
        Err(Error::domain("samples", 0.0, "samples >= 1"))
    } else {
        Ok(())
    }
}

/// Estimate local robustness from `samples` draws with a Wilson interval at quantile `z`.
pub fn estimate_local_robustness_with(
    net: &ReluNetwork,
    x: &[f64],
    r: f64,
    samples: u64,
    seed: u64,
    z: f64,
) -> Result<RobustnessEstimate> {
    check_samples(samples)?;
    let query = RobustnessQuery::new(net, x, r)?;
    let agreements = blocks(samples)
        .map(|(b, count)| query.block_agreements(seed, b, count))
        .sum();
    query.finish(agreements, samples, z, seed)
}

/// [`estimate_local_robustness_with`] at 99% confidence.
pub fn estimate_local_robustness(
    net: &ReluNetwork,
    x: &[f64],
    r: f64,
    samples: u64,
    seed: u64,
) -> Result<RobustnessEstimate> {
    estimate_local_robustness_with(net, x, r, samples, seed, Z_99)
}

#[derive(Debug, Clone, PartialEq)]
pub struct ValidationReport {
    pub pass: bool,
    /// `point_estimate - bound_exact_cap`
    pub slack: f64,
    /// `point_estimate - bound_paper`
    pub slack_paper: f64,
    pub ci_high: f64,
}

/// A certificate is refuted when its bound exceeds the upper end of the
/// confidence interval of the estimated robustness.
pub fn validate_certificate(
    cert: &RobustnessCertificate,
    est: &RobustnessEstimate,
) -> Result<ValidationReport> {
    if cert.x != est.x || cert.r != est.r {
        return Err(Error::MismatchedInputs);
    }
    let e = &est.estimate;
    Ok(ValidationReport {
        pass: e.ci_high >= cert.bound_exact_cap && e.ci_high >= cert.bound_paper,
        slack: e.point_estimate - cert.bound_exact_cap,
        slack_paper: e.point_estimate - cert.bound_paper,
        ci_high: e.ci_high,
    })
}

fn check_cap_args(thresholds: &[f64], d: usize) -> Result<()> {
    if d < 2 {
        return Err(Error::domain("d", d as f64, "d >= 2"));
    }
    for &t in thresholds {
        if !(0.0..=1.0).contains(&t) {
            return Err(Error::domain("cos_alpha", t, "0 <= cos_alpha <= 1"));
        }
    }
    Ok(())
}

/// Per-threshold counts of unit-sphere draws with first coordinate `>= t`, for one block.
pub fn cap_block_counts(
    thresholds: &[f64],
    d: usize,
    seed: u64,
    block: u64,
    count: u64,
) -> Vec<u64> {
    let mut rng = block_rng(seed, block);
    let mut z = vec![0.0; d];
    let mut counts = vec![0u64; thresholds.len()];
    for _ in 0..count {
        sample_unit_sphere_into(&mut z, &mut rng);
        for (c, &t) in counts.iter_mut().zip(thresholds) {
            if z[0] >= t {
                *c += 1;
            }
        }
    }
    counts
}

/// Estimate cap measures for several thresholds from one shared set of draws.
pub fn mc_cap_fractions(
    thresholds: &[f64],
    d: usize,
    samples: u64,
    seed: u64,
) -> Result<Vec<McEstimate>> {
    check_cap_args(thresholds, d)?;
    check_samples(samples)?;
    let mut totals = vec![0u64; thresholds.len()];
    for (b, count) in blocks(samples) {
        for (t, c) in totals
            .iter_mut()
            .zip(cap_block_counts(thresholds, d, seed, b, count))
        {
            *t += c;
        }
    }
    totals
        .into_iter()
        .map(|c| McEstimate::from_counts(c, samples, Z_99, seed))
        .collect()
}

/// Estimate the normalized measure of `{z ∈ S^{d-1} | z·y >= cos_alpha}`.
pub fn mc_cap_fraction(cos_alpha: f64, d: usize, samples: u64, seed: u64) -> Result<McEstimate> {
    mc_cap_fractions(&[cos_alpha], d, samples, seed).map(|mut v| v.remove(0))
}
