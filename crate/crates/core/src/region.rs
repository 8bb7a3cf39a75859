//! The convex cell of the input-space partition that contains an anchor point.
//!
//! Inside the cell every hidden unit keeps a fixed on/off state, so unit `(l, k)`
//! computes the affine map `w_{l,k}·x + c_{l,k}` (or zero), and the network output
//! is the Heaviside step of one more affine map. The cell is the intersection of
//! the half-spaces of those maps that contain the anchor.
//!
//! The maps are built layer by layer:
//!
//! ```text
//! w_{0,k} = v_{0,k}                                c_{0,k} = b_{0,k}
//! w_{l,k} = Σ_{j active in l-1} v_{l,k,j} w_{l-1,j}   c_{l,k} = Σ_{j active in l-1} v_{l,k,j} c_{l-1,j} + b_{l,k}
//! ```
//!
//! and the same step with the output weights gives the decision map.

use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use crate::geometry::{Hyperplane, Side};
use crate::linalg::{axpy, dot, norm};
use crate::network::{heaviside, ActivationPattern, ReluNetwork};
use crate::{Error, Result};

/// A propagated normal shorter than this fraction of the norm it would have
/// without cancellation is treated as zero.
pub const DEGENERACY_RTOL: f64 = 1e-12;

/// Identifies one stored hyperplane of a region.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum HyperplaneId {
    Unit { layer: usize, index: usize },
    Decision,
}

impl fmt::Display for HyperplaneId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            HyperplaneId::Unit { layer, index } => write!(f, "unit ({layer}, {index})"),
            HyperplaneId::Decision => write!(f, "decision"),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PropagatedUnit {
    pub layer: usize,
    pub index: usize,
    pub w: Vec<f64>,
    pub c: f64,
    pub active: bool,
    /// `None` when the propagated normal vanishes; the unit then has a constant
    /// state on the whole cell and contributes no face.
    pub hyperplane: Option<Hyperplane>,
}

impl PropagatedUnit {
    pub fn degenerate(&self) -> bool {
        self.hyperplane.is_none()
    }

    /// Side of the hyperplane that contains the cell.
    pub fn side(&self) -> Side {
        if self.active {
            Side::Positive
        } else {
            Side::Negative
        }
    }

    fn value(&self, x: &[f64]) -> f64 {
        dot(&self.w, x) + self.c
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Decision {
    pub w: Vec<f64>,
    pub c: f64,
    /// `None` when the decision normal vanishes: the label is constant on the cell.
    pub hyperplane: Option<Hyperplane>,
    pub side: Side,
}

/// Margin of a point inside a region.
#[derive(Debug, Clone, PartialEq)]
pub struct Margin {
    /// Distance to the nearest stored hyperplane; `f64::INFINITY` when there are none.
    pub a: f64,
    pub per_hyperplane: Vec<(HyperplaneId, f64)>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LinearRegion {
    anchor: Vec<f64>,
    pattern: ActivationPattern,
    /// Per hidden layer, the propagated units in index order.
    layers: Vec<Vec<PropagatedUnit>>,
    decision: Decision,
    label: u8,
    total_units: usize,
}

fn make_hyperplane(w: &[f64], c: f64, cancellation_scale: f64) -> Option<Hyperplane> {
    let len = norm(w);
    if len == 0.0 || len <= DEGENERACY_RTOL * cancellation_scale {
        return None;
    }
    Hyperplane::new(w.to_vec(), c).ok()
}

/// Collapse one more layer of weights through the active units of `prev`.
/// Returns `(w, c, Σ|v_j|·‖w_j‖)`.
fn propagate(
    prev: &[PropagatedUnit],
    weights: &[f64],
    bias: f64,
    d: usize,
) -> (Vec<f64>, f64, f64) {
    let mut w = vec![0.0; d];
    let mut c = bias;
    let mut scale = 0.0;
    for (unit, &v) in prev.iter().zip(weights) {
        if unit.active {
            axpy(&mut w, v, &unit.w);
            c += v * unit.c;
            scale += libm::fabs(v) * norm(&unit.w);
        }
    }
    (w, c, scale)
}

impl LinearRegion {
    /// Build the cell containing `anchor`.
    pub fn build(net: &ReluNetwork, anchor: &[f64]) -> Result<Self> {
        let d = net.input_dim();
        if anchor.len() != d {
            return Err(Error::DimensionMismatch {
                expected: d,
                found: anchor.len(),
            });
        }
        if !crate::linalg::all_finite(anchor) {
            return Err(Error::NonFinite("anchor"));
        }

        let mut layers: Vec<Vec<PropagatedUnit>> = Vec::with_capacity(net.hidden().len());
        for (l, layer) in net.hidden().iter().enumerate() {
            let units = (0..layer.width())
                .map(|k| {
                    let (w, c, scale) = match layers.last() {
                        None => {
                            let w = layer.row(k).to_vec();
                            let scale = norm(&w);
                            (w, layer.biases()[k], scale)
                        }
                        Some(prev) => propagate(prev, layer.row(k), layer.biases()[k], d),
                    };
                    let hyperplane = make_hyperplane(&w, c, scale);
                    let mut unit = PropagatedUnit {
                        layer: l,
                        index: k,
                        w,
                        c,
                        active: false,
                        hyperplane,
                    };
                    unit.active = unit.value(anchor) > 0.0;
                    unit
                })
                .collect();
            layers.push(units);
        }

        let (w, c, scale) = match layers.last() {
            None => {
                let w = net.output_weights().to_vec();
                let scale = norm(&w);
                (w, net.output_bias(), scale)
            }
            Some(prev) => propagate(prev, net.output_weights(), net.output_bias(), d),
        };
        let hyperplane = make_hyperplane(&w, c, scale);
        let value = dot(&w, anchor) + c;
        let decision = Decision {
            w,
            c,
            hyperplane,
            side: Side::of(value),
        };

        let pattern = ActivationPattern::new(
            layers
                .iter()
                .map(|units| units.iter().map(|u| u.active).collect())
                .collect(),
        );

        Ok(Self {
            anchor: anchor.to_vec(),
            pattern,
            layers,
            decision,
            label: heaviside(value),
            total_units: net.total_units(),
        })
    }

    pub fn anchor(&self) -> &[f64] {
        &self.anchor
    }

    pub fn pattern(&self) -> &ActivationPattern {
        &self.pattern
    }

    pub fn layers(&self) -> &[Vec<PropagatedUnit>] {
        &self.layers
    }

    pub fn units(&self) -> impl Iterator<Item = &PropagatedUnit> {
        self.layers.iter().flatten()
    }

    pub fn decision(&self) -> &Decision {
        &self.decision
    }

    pub fn label(&self) -> u8 {
        self.label
    }

    pub fn dim(&self) -> usize {
        self.anchor.len()
    }

    /// Total unit count of the network the region was built from.
    pub fn total_units(&self) -> usize {
        self.total_units
    }

    /// Every stored (non-degenerate) hyperplane with the side containing the cell.
    pub fn hyperplanes(&self) -> impl Iterator<Item = (HyperplaneId, &Hyperplane, Side)> {
        let units = self.units().filter_map(|u| {
            u.hyperplane.as_ref().map(|h| {
                let id = HyperplaneId::Unit {
                    layer: u.layer,
                    index: u.index,
                };
                (id, h, u.side())
            })
        });
        let decision = self
            .decision
            .hyperplane
            .as_ref()
            .map(|h| (HyperplaneId::Decision, h, self.decision.side));
        units.chain(decision)
    }

    pub fn hyperplane_count(&self) -> usize {
        self.hyperplanes().count()
    }

    /// True iff the label cannot change anywhere: no hidden or decision faces at all.
    pub fn is_constant(&self) -> bool {
        self.hyperplane_count() == 0
    }

    /// Whether `x` satisfies every stored half-space constraint. The positive sides
    /// are open, so a point on a `+` face is outside.
    pub fn contains(&self, x: &[f64]) -> bool {
        if x.len() != self.dim() {
            return false;
        }
        self.hyperplanes()
            .all(|(_, h, side)| Side::of(h.eval_unchecked(x)) == side)
    }

    fn require_inside(&self, x: &[f64]) -> Result<()> {
        if x.len() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                found: x.len(),
            });
        }
        if !self.contains(x) {
            return Err(Error::OutsideRegion);
        }
        Ok(())
    }

    /// Distances from `x` to every stored hyperplane and their minimum.
    pub fn margin(&self, x: &[f64]) -> Result<Margin> {
        self.require_inside(x)?;
        let per_hyperplane: Vec<(HyperplaneId, f64)> = self
            .hyperplanes()
            .map(|(id, h, _)| (id, libm::fabs(h.eval_unchecked(x)) / h.normal_norm()))
            .collect();
        let a = per_hyperplane
            .iter()
            .map(|&(_, a)| a)
            .fold(f64::INFINITY, f64::min);
        Ok(Margin { a, per_hyperplane })
    }

    /// Outputs of hidden layer `layer` predicted by the collapsed affine maps.
    pub fn collapsed_affine_eval(&self, layer: usize, x: &[f64]) -> Result<Vec<f64>> {
        let units = self.layers.get(layer).ok_or(Error::LayerOutOfRange {
            layer,
            layers: self.layers.len(),
        })?;
        self.require_inside(x)?;
        Ok(units
            .iter()
            .map(|u| if u.active { u.value(x) } else { 0.0 })
            .collect())
    }
}
