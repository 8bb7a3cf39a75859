//! Lower bounds on the probability that a uniform perturbation on the sphere of
//! radius `r` around `x` leaves the class label unchanged.
//!
//! A perturbed point can only change label by leaving the cell of `x`, and it
//! leaves the cell only by crossing one of the cell's hyperplanes. Crossing a
//! hyperplane at distance `a ≤ r` means landing in a polar cap with
//! `cos α = a / r`, whose measure is at most `exp(-a² d / (2 r²))`. Three
//! union bounds are reported, from coarsest to tightest:
//!
//! - `bound_paper`: `1 - n·exp(-a² d / (2r²))` with `a` the margin and `n` the unit count,
//!   or exactly 1 when `a > r` and no face is reachable;
//! - `bound_sum_exp`: `1 - Σ_i exp(-a_i² d / (2r²))` over hyperplanes with `a_i ≤ r`;
//! - `bound_exact_cap`: the same sum with exact cap measures.
//!
//! All three are clamped to `[0, 1]`.

use alloc::vec::Vec;

use libm::{exp, log, sqrt};

use crate::geometry::cap::cap_fraction_unchecked;
use crate::geometry::Hyperplane;
use crate::network::ReluNetwork;
use crate::region::{HyperplaneId, LinearRegion};
use crate::{Error, Result};

/// Outcome of certifying a single Heaviside perceptron.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum PerceptronRobustness {
    /// `0 < a ≤ r`: robustness is at least `lower_bound`.
    Bounded { lower_bound: f64 },
    /// `a = 0`: robustness is exactly 1/2.
    OnHyperplane,
    /// `a > r`: robustness is exactly 1.
    OutOfReach,
}

impl PerceptronRobustness {
    /// The lower bound, or the exact value for the two exact cases.
    pub fn value(&self) -> f64 {
        match *self {
            PerceptronRobustness::Bounded { lower_bound } => lower_bound,
            PerceptronRobustness::OnHyperplane => 0.5,
            PerceptronRobustness::OutOfReach => 1.0,
        }
    }

    pub fn is_exact(&self) -> bool {
        !matches!(self, PerceptronRobustness::Bounded { .. })
    }
}

fn check_radius(r: f64) -> Result<()> {
    if r > 0.0 && r.is_finite() {
        Ok(())
    } else {
        Err(Error::domain("r", r, "finite and > 0"))
    }
}

/// `exp(-a² d / (2 r²))`.
pub fn crossing_exponential(a: f64, r: f64, d: usize) -> f64 {
    let t = a / r;
    exp(-t * t * d as f64 / 2.0)
}

/// Probability that a uniform point on `S_r^{d-1}(x)` lies on the far side of a
/// hyperplane at distance `a` from `x`, or on it. Zero when `a > r`.
pub fn crossing_probability(a: f64, r: f64, d: usize) -> f64 {
    if a > r {
        return 0.0;
    }
    if d == 1 {
        // S^0 = {-1, +1}: exactly one of the two points crosses.
        return 0.5;
    }
    cap_fraction_unchecked((a / r).min(1.0), d)
}

/// `max(0, 1 - n·exp(-a² d / (2 r²)))`.
pub fn union_bound(a: f64, r: f64, d: usize, n: usize) -> f64 {
    (1.0 - n as f64 * crossing_exponential(a, r, d)).clamp(0.0, 1.0)
}

/// [`union_bound`], except that a margin beyond the radius certifies exactly 1.
pub fn margin_bound(a: f64, r: f64, d: usize, n: usize) -> f64 {
    if a > r {
        1.0
    } else {
        union_bound(a, r, d, n)
    }
}

/// Robustness of `x ↦ ϑ(v·x + b)` at `x` for perturbations of size `r`.
pub fn perceptron_robustness(h: &Hyperplane, x: &[f64], r: f64) -> Result<PerceptronRobustness> {
    check_radius(r)?;
    let a = h.distance(x)?;
    Ok(if a == 0.0 {
        PerceptronRobustness::OnHyperplane
    } else if a > r {
        PerceptronRobustness::OutOfReach
    } else {
        PerceptronRobustness::Bounded {
            lower_bound: 1.0 - crossing_exponential(a, r, h.dim()),
        }
    })
}

/// Bound for a shallow network of `n = hyperplanes.len()` Heaviside perceptrons.
pub fn shallow_bound(hyperplanes: &[Hyperplane], x: &[f64], r: f64) -> Result<f64> {
    check_radius(r)?;
    let mut a = f64::INFINITY;
    for (index, h) in hyperplanes.iter().enumerate() {
        let ai = h.distance(x)?;
        if ai == 0.0 {
            return Err(Error::OnBoundary(HyperplaneId::Unit { layer: 0, index }));
        }
        a = a.min(ai);
    }
    Ok(union_bound(a, r, x.len(), hyperplanes.len()))
}

/// Smallest margin `a` for which `1 - n·exp(-a² d / (2 r²)) ≥ 1 - ε`.
pub fn required_margin(epsilon: f64, r: f64, d: usize, n: usize) -> Result<f64> {
    if !(epsilon > 0.0 && epsilon < 1.0) {
        return Err(Error::domain("epsilon", epsilon, "0 < epsilon < 1"));
    }
    check_radius(r)?;
    if d == 0 {
        return Err(Error::ZeroDimension);
    }
    if n == 0 {
        return Err(Error::domain("n", 0.0, "n >= 1"));
    }
    Ok(r * sqrt(2.0 * log(n as f64 / epsilon) / d as f64))
}

#[derive(Debug, Clone, PartialEq)]
pub struct RobustnessCertificate {
    pub x: Vec<f64>,
    pub r: f64,
    pub d: usize,
    /// Total unit count, output unit included.
    pub n: usize,
    /// Margin; `f64::INFINITY` for a constant classifier.
    pub a: f64,
    pub per_hyperplane: Vec<(HyperplaneId, f64)>,
    pub bound_paper: f64,
    pub bound_sum_exp: f64,
    pub bound_exact_cap: f64,
    pub label: u8,
}

impl RobustnessCertificate {
    /// Number of hyperplanes the certificate ranged over.
    pub fn hyperplane_count(&self) -> usize {
        self.per_hyperplane.len()
    }

    /// Hyperplanes reachable by a perturbation of size `r`.
    pub fn reachable(&self) -> usize {
        self.per_hyperplane.iter().filter(|p| p.1 <= self.r).count()
    }
}

/// Certificate for `x` inside an already-built region.
pub fn certify_in_region(
    region: &LinearRegion,
    x: &[f64],
    r: f64,
) -> Result<RobustnessCertificate> {
    check_radius(r)?;
    let margin = region.margin(x)?;
    if let Some(&(id, _)) = margin.per_hyperplane.iter().find(|p| p.1 == 0.0) {
        return Err(Error::OnBoundary(id));
    }
    let d = region.dim();
    let n = region.total_units();
    let sum_exp: f64 = margin
        .per_hyperplane
        .iter()
        .filter(|p| p.1 <= r)
        .map(|p| crossing_exponential(p.1, r, d))
        .sum();
    let sum_cap: f64 = margin
        .per_hyperplane
        .iter()
        .map(|p| crossing_probability(p.1, r, d))
        .sum();
    Ok(RobustnessCertificate {
        x: x.to_vec(),
        r,
        d,
        n,
        a: margin.a,
        bound_paper: margin_bound(margin.a, r, d, n),
        bound_sum_exp: (1.0 - sum_exp).clamp(0.0, 1.0),
        bound_exact_cap: (1.0 - sum_cap).clamp(0.0, 1.0),
        per_hyperplane: margin.per_hyperplane,
        label: region.label(),
    })
}

/// Build the cell of `x` and certify `x` against perturbations of size `r`.
pub fn deep_certificate(net: &ReluNetwork, x: &[f64], r: f64) -> Result<RobustnessCertificate> {
    check_radius(r)?;
    let region = LinearRegion::build(net, x)?;
    certify_in_region(&region, x, r)
}
