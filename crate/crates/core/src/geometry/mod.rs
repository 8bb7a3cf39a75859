//! Hyperplanes, spherical caps, and uniform sampling on spheres.

pub(crate) mod cap;
mod sampling;
pub(crate) mod special;

pub use cap::{cap_fraction_exact, cap_fraction_upper_bound};
pub use sampling::{sample_sphere, sample_unit_sphere_into};

use alloc::vec::Vec;

use crate::linalg::{all_finite, dot, norm, norm_sq};
use crate::{Error, Result};

/// Which side of a hyperplane a point lies on.
///
/// `v·x + b <= 0` is the closed negative side, `v·x + b > 0` the open positive side.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Side {
    Negative,
    Positive,
}

impl Side {
    pub fn of(value: f64) -> Self {
        if value > 0.0 {
            Side::Positive
        } else {
            Side::Negative
        }
    }
}

/// The hyperplane `{x | v·x + b = 0}`.
///
/// The normal is stored exactly as given and need not have unit length.
#[derive(Debug, Clone, PartialEq)]
pub struct Hyperplane {
    normal: Vec<f64>,
    bias: f64,
    norm: f64,
}

impl Hyperplane {
    pub fn new(normal: Vec<f64>, bias: f64) -> Result<Self> {
        if normal.is_empty() {
            return Err(Error::ZeroDimension);
        }
        if !all_finite(&normal) || !bias.is_finite() {
            return Err(Error::NonFinite("hyperplane"));
        }
        let norm = norm(&normal);
        if norm == 0.0 {
            return Err(Error::DegenerateHyperplane);
        }
        Ok(Self { normal, bias, norm })
    }

    pub fn normal(&self) -> &[f64] {
        &self.normal
    }

    pub fn bias(&self) -> f64 {
        self.bias
    }

    pub fn dim(&self) -> usize {
        self.normal.len()
    }

    /// Euclidean norm of the normal vector.
    pub fn normal_norm(&self) -> f64 {
        self.norm
    }

    /// The same hyperplane described by `(c·v, c·b)`.
    pub fn scaled(&self, c: f64) -> Result<Self> {
        Self::new(self.normal.iter().map(|v| v * c).collect(), self.bias * c)
    }

    fn check_dim(&self, x: &[f64]) -> Result<()> {
        if x.len() != self.normal.len() {
            return Err(Error::DimensionMismatch {
                expected: self.normal.len(),
                found: x.len(),
            });
        }
        Ok(())
    }

    /// `v·x + b`.
    pub fn signed_eval(&self, x: &[f64]) -> Result<f64> {
        self.check_dim(x)?;
        Ok(self.eval_unchecked(x))
    }

    pub(crate) fn eval_unchecked(&self, x: &[f64]) -> f64 {
        dot(&self.normal, x) + self.bias
    }

    pub fn side(&self, x: &[f64]) -> Result<Side> {
        self.signed_eval(x).map(Side::of)
    }

    /// `|v·x + b| / ‖v‖`.
    pub fn distance(&self, x: &[f64]) -> Result<f64> {
        Ok(libm::fabs(self.signed_eval(x)?) / self.norm)
    }

    /// Orthogonal projection of `x` onto the hyperplane.
    pub fn project(&self, x: &[f64]) -> Result<Vec<f64>> {
        let s = self.signed_eval(x)? / norm_sq(&self.normal);
        Ok(x.iter()
            .zip(&self.normal)
            .map(|(xi, vi)| xi - s * vi)
            .collect())
    }
}

/// A sphere of radius `radius` around `center`; the support of the perturbations.
#[derive(Debug, Clone, PartialEq)]
pub struct SphereSpec {
    center: Vec<f64>,
    radius: f64,
}

impl SphereSpec {
    pub fn new(center: Vec<f64>, radius: f64) -> Result<Self> {
        if center.is_empty() {
            return Err(Error::ZeroDimension);
        }
        if !all_finite(&center) {
            return Err(Error::NonFinite("sphere center"));
        }
        if !(radius > 0.0 && radius.is_finite()) {
            return Err(Error::domain("radius", radius, "finite and > 0"));
        }
        Ok(Self { center, radius })
    }

    pub fn center(&self) -> &[f64] {
        &self.center
    }

    pub fn radius(&self) -> f64 {
        self.radius
    }

    pub fn dim(&self) -> usize {
        self.center.len()
    }
}
