//! Dimension sweep for a single Heaviside perceptron at a fixed margin-to-radius ratio.

use std::fmt::Write as _;

use spherecert_core::certify::deep_certificate;
use spherecert_core::network::{NetworkSpec, ReluNetwork};

use crate::{parallel, CliError};

pub const CSV_HEADER: &str =
    "d,a,r,bound_paper,bound_exact_cap,mc_estimate,mc_ci_low,mc_ci_high,mc_misclassification";

#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow {
    pub d: usize,
    pub a: f64,
    pub r: f64,
    pub bound_paper: f64,
    pub bound_exact_cap: f64,
    pub mc_estimate: f64,
    pub mc_ci_low: f64,
    pub mc_ci_high: f64,
}

impl SweepRow {
    pub fn misclassification(&self) -> f64 {
        1.0 - self.mc_estimate
    }
}

#[derive(Debug, Clone)]
pub struct SweepSpec {
    pub dims: Vec<usize>,
    /// Margin over radius, `a / r`.
    pub ratio: f64,
    pub r: f64,
    pub samples: u64,
    pub seed: u64,
    pub z: f64,
}

/// The perceptron `x ↦ ϑ(x_0)` and the point at distance `a` on its negative side.
pub fn perceptron_fixture(d: usize, a: f64) -> (ReluNetwork, Vec<f64>) {
    let mut normal = vec![0.0; d];
    normal[0] = 1.0;
    let net = ReluNetwork::new(NetworkSpec {
        input_dim: d,
        hidden: vec![],
        output_weights: normal,
        output_bias: 0.0,
    })
    .expect("unit-normal perceptron is valid");
    let mut x = vec![0.0; d];
    x[0] = -a;
    (net, x)
}

pub fn run_sweep(spec: &SweepSpec) -> Result<Vec<SweepRow>, CliError> {
    if spec.dims.is_empty() {
        return Err(CliError::Usage("dimension list is empty".into()));
    }
    if spec.dims.contains(&0) {
        return Err(CliError::Usage("dimensions must be positive".into()));
    }
    if !(spec.ratio > 0.0 && spec.ratio.is_finite()) {
        return Err(CliError::Usage(format!(
            "ratio must be positive, got {}",
            spec.ratio
        )));
    }
    if !(spec.r > 0.0 && spec.r.is_finite()) {
        return Err(CliError::Usage(format!(
            "r must be positive, got {}",
            spec.r
        )));
    }
    let a = spec.ratio * spec.r;
    spec.dims
        .iter()
        .enumerate()
        .map(|(i, &d)| {
            let (net, x) = perceptron_fixture(d, a);
            let cert = deep_certificate(&net, &x, spec.r)?;
            let seed = spec.seed.wrapping_add(i as u64);
            let est =
                parallel::estimate_local_robustness(&net, &x, spec.r, spec.samples, seed, spec.z)?;
            Ok(SweepRow {
                d,
                a,
                r: spec.r,
                bound_paper: cert.bound_paper,
                bound_exact_cap: cert.bound_exact_cap,
                mc_estimate: est.estimate.point_estimate,
                mc_ci_low: est.estimate.ci_low,
                mc_ci_high: est.estimate.ci_high,
            })
        })
        .collect()
}

pub fn to_csv(rows: &[SweepRow]) -> String {
    let mut out = String::new();
    out.push_str(CSV_HEADER);
    out.push('\n');
    for row in rows {
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{},{},{}",
            row.d,
            row.a,
            row.r,
            row.bound_paper,
            row.bound_exact_cap,
            row.mc_estimate,
            row.mc_ci_low,
            row.mc_ci_high,
            row.misclassification()
        );
    }
    out
}
