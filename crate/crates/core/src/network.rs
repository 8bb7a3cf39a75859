//! ReLU networks with a single Heaviside output unit.
//!
//! Hidden layer `l` computes `y_l = ρ(W_l y_{l-1} + b_l)` with `ρ(t) = max(t, 0)`,
//! and the output unit computes `ϑ(v·y_{L-1} + b)` where `ϑ(t) = 1` iff `t > 0`.
//! Hidden layers are indexed from 0.

use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use rand::Rng;
use rand_distr::StandardNormal;

use crate::linalg::{all_finite, dot};
use crate::{Error, Result};

/// A structural problem found by [`NetworkSpec::validate`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ShapeError {
    ZeroInputDim,
    EmptyLayer {
        layer: usize,
    },
    BiasCount {
        layer: usize,
        rows: usize,
        biases: usize,
    },
    RowLength {
        layer: usize,
        row: usize,
        expected: usize,
        found: usize,
    },
    OutputWeights {
        expected: usize,
        found: usize,
    },
    /// A NaN or infinite parameter; `layer` is `None` for the output unit.
    NonFinite {
        layer: Option<usize>,
    },
}

impl fmt::Display for ShapeError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ShapeError::ZeroInputDim => write!(f, "input_dim must be positive"),
            ShapeError::EmptyLayer { layer } => write!(f, "hidden layer {layer} has no units"),
            ShapeError::BiasCount {
                layer,
                rows,
                biases,
            } => write!(
                f,
                "hidden layer {layer}: {rows} weight rows but {biases} biases"
            ),
            ShapeError::RowLength {
                layer,
                row,
                expected,
                found,
            } => write!(
                f,
                "hidden layer {layer}, row {row}: expected {expected} weights, found {found}"
            ),
            ShapeError::OutputWeights { expected, found } => write!(
                f,
                "output layer: expected {expected} weights, found {found}"
            ),
            ShapeError::NonFinite { layer: Some(l) } => {
                write!(f, "hidden layer {l} has a non-finite parameter")
            }
            ShapeError::NonFinite { layer: None } => {
                write!(f, "output layer has a non-finite parameter")
            }
        }
    }
}

/// Unvalidated parameters of one hidden layer; `weights[j]` is the weight vector of unit `j`.
#[derive(Debug, Clone, PartialEq)]
pub struct LayerSpec {
    pub weights: Vec<Vec<f64>>,
    pub biases: Vec<f64>,
}

/// Unvalidated network parameters, as read from a file or built by hand.
#[derive(Debug, Clone, PartialEq)]
pub struct NetworkSpec {
    pub input_dim: usize,
    pub hidden: Vec<LayerSpec>,
    pub output_weights: Vec<f64>,
    pub output_bias: f64,
}

impl NetworkSpec {
    /// Check every shape and finiteness invariant, collecting all problems.
    pub fn validate(&self) -> core::result::Result<(), Vec<ShapeError>> {
        let mut errors = Vec::new();
        if self.input_dim == 0 {
            errors.push(ShapeError::ZeroInputDim);
        }
        let mut fan_in = self.input_dim;
        for (l, layer) in self.hidden.iter().enumerate() {
            let rows = layer.weights.len();
            if rows == 0 {
                errors.push(ShapeError::EmptyLayer { layer: l });
            }
            if rows != layer.biases.len() {
                errors.push(ShapeError::BiasCount {
                    layer: l,
                    rows,
                    biases: layer.biases.len(),
                });
            }
            for (row, w) in layer.weights.iter().enumerate() {
                if w.len() != fan_in {
                    errors.push(ShapeError::RowLength {
                        layer: l,
                        row,
                        expected: fan_in,
                        found: w.len(),
                    });
                }
            }
            if !layer.weights.iter().all(|w| all_finite(w)) || !all_finite(&layer.biases) {
                errors.push(ShapeError::NonFinite { layer: Some(l) });
            }
            fan_in = rows;
        }
        if self.output_weights.len() != fan_in {
            errors.push(ShapeError::OutputWeights {
                expected: fan_in,
                found: self.output_weights.len(),
            });
        }
        if !all_finite(&self.output_weights) || !self.output_bias.is_finite() {
            errors.push(ShapeError::NonFinite { layer: None });
        }
        if errors.is_empty() {
            Ok(())
        } else {
            Err(errors)
        }
    }
}

/// A validated hidden layer with row-major weights.
#[derive(Debug, Clone, PartialEq)]
pub struct DenseLayer {
    weights: Vec<f64>,
    biases: Vec<f64>,
    fan_in: usize,
}

impl DenseLayer {
    pub fn width(&self) -> usize {
        self.biases.len()
    }

    pub fn fan_in(&self) -> usize {
        self.fan_in
    }

    /// Weight vector of unit `j`.
    pub fn row(&self, j: usize) -> &[f64] {
        &self.weights[j * self.fan_in..(j + 1) * self.fan_in]
    }

    pub fn biases(&self) -> &[f64] {
        &self.biases
    }

    fn preactivate(&self, input: &[f64], out: &mut Vec<f64>) {
        out.clear();
        out.extend((0..self.width()).map(|j| dot(self.row(j), input) + self.biases[j]));
    }
}

/// Result of evaluating a network at one point.
#[derive(Debug, Clone, PartialEq)]
pub struct Forward {
    /// Class label, 0 or 1.
    pub label: u8,
    /// Post-ReLU outputs of every hidden layer.
    pub hidden: Vec<Vec<f64>>,
    /// `v·y_{L-1} + b` before the Heaviside step.
    pub output_preactivation: f64,
}

/// Per hidden layer, `true` for units whose pre-activation is strictly positive.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct ActivationPattern(Vec<Vec<bool>>);

impl ActivationPattern {
    pub fn new(layers: Vec<Vec<bool>>) -> Self {
        Self(layers)
    }

    pub fn layers(&self) -> &[Vec<bool>] {
        &self.0
    }

    pub fn is_active(&self, layer: usize, unit: usize) -> bool {
        self.0[layer][unit]
    }

    /// FNV-1a over the bit sequence; stable across runs and platforms.
    pub fn stable_hash(&self) -> u64 {
        let mut h: u64 = 0xcbf2_9ce4_8422_2325;
        for layer in &self.0 {
            for &bit in layer {
                h ^= bit as u64 + 1;
                h = h.wrapping_mul(0x0100_0000_01b3);
            }
            h ^= 0xff;
            h = h.wrapping_mul(0x0100_0000_01b3);
        }
        h
    }
}

/// Heaviside step with `ϑ(0) = 0`.
pub fn heaviside(t: f64) -> u8 {
    (t > 0.0) as u8
}

/// A validated ReLU network with one Heaviside output unit.
#[derive(Debug, Clone, PartialEq)]
pub struct ReluNetwork {
    input_dim: usize,
    hidden: Vec<DenseLayer>,
    output_weights: Vec<f64>,
    output_bias: f64,
}

impl ReluNetwork {
    pub fn new(spec: NetworkSpec) -> Result<Self> {
        spec.validate().map_err(Error::InvalidNetwork)?;
        let mut fan_in = spec.input_dim;
        let hidden = spec
            .hidden
            .into_iter()
            .map(|layer| {
                let dense = DenseLayer {
                    weights: layer.weights.concat(),
                    biases: layer.biases,
                    fan_in,
                };
                fan_in = dense.width();
                dense
            })
            .collect();
        Ok(Self {
            input_dim: spec.input_dim,
            hidden,
            output_weights: spec.output_weights,
            output_bias: spec.output_bias,
        })
    }

    /// Seeded random network: weights and biases i.i.d. `N(0, 1/fan_in)`.
    pub fn random<R: Rng + ?Sized>(
        input_dim: usize,
        widths: &[usize],
        rng: &mut R,
    ) -> Result<Self> {
        if input_dim == 0 {
            return Err(Error::ZeroDimension);
        }
        if let Some(layer) = widths.iter().position(|&w| w == 0) {
            return Err(Error::InvalidNetwork(vec![ShapeError::EmptyLayer {
                layer,
            }]));
        }
        let mut draw = |fan_in: usize, count: usize| -> Vec<f64> {
            let scale = 1.0 / libm::sqrt(fan_in as f64);
            (0..count)
                .map(|_| scale * rng.sample::<f64, _>(StandardNormal))
                .collect()
        };
        let mut fan_in = input_dim;
        let mut hidden = Vec::with_capacity(widths.len());
        for &width in widths {
            let weights = (0..width).map(|_| draw(fan_in, fan_in)).collect();
            let biases = draw(fan_in, width);
            hidden.push(LayerSpec { weights, biases });
            fan_in = width;
        }
        let output_weights = draw(fan_in, fan_in);
        let output_bias = draw(fan_in, 1)[0];
        Self::new(NetworkSpec {
            input_dim,
            hidden,
            output_weights,
            output_bias,
        })
    }

    pub fn to_spec(&self) -> NetworkSpec {
        NetworkSpec {
            input_dim: self.input_dim,
            hidden: self
                .hidden
                .iter()
                .map(|layer| LayerSpec {
                    weights: (0..layer.width()).map(|j| layer.row(j).to_vec()).collect(),
                    biases: layer.biases.clone(),
                })
                .collect(),
            output_weights: self.output_weights.clone(),
            output_bias: self.output_bias,
        }
    }

    pub fn input_dim(&self) -> usize {
        self.input_dim
    }

    pub fn hidden(&self) -> &[DenseLayer] {
        &self.hidden
    }

    pub fn output_weights(&self) -> &[f64] {
        &self.output_weights
    }

    pub fn output_bias(&self) -> f64 {
        self.output_bias
    }

    /// Total unit count: all hidden units plus the output unit.
    pub fn total_units(&self) -> usize {
        self.hidden.iter().map(DenseLayer::width).sum::<usize>() + 1
    }

    fn check_input(&self, x: &[f64]) -> Result<()> {
        if x.len() != self.input_dim {
            return Err(Error::DimensionMismatch {
                expected: self.input_dim,
                found: x.len(),
            });
        }
        if !all_finite(x) {
            return Err(Error::NonFinite("input"));
        }
        Ok(())
    }

    pub fn forward(&self, x: &[f64]) -> Result<Forward> {
        self.check_input(x)?;
        let mut hidden = Vec::with_capacity(self.hidden.len());
        let mut current = x.to_vec();
        for layer in &self.hidden {
            let mut next = Vec::with_capacity(layer.width());
            layer.preactivate(&current, &mut next);
            next.iter_mut().for_each(|v| *v = v.max(0.0));
            hidden.push(next.clone());
            current = next;
        }
        let output_preactivation = dot(&self.output_weights, &current) + self.output_bias;
        Ok(Forward {
            label: heaviside(output_preactivation),
            hidden,
            output_preactivation,
        })
    }

    /// Class label only; reuses the two scratch buffers across calls.
    pub fn label_with(&self, x: &[f64], scratch: &mut (Vec<f64>, Vec<f64>)) -> u8 {
        debug_assert_eq!(x.len(), self.input_dim);
        let (a, b) = scratch;
        a.clear();
        a.extend_from_slice(x);
        for layer in &self.hidden {
            layer.preactivate(a, b);
            b.iter_mut().for_each(|v| *v = v.max(0.0));
            core::mem::swap(a, b);
        }
        heaviside(dot(&self.output_weights, a) + self.output_bias)
    }

    pub fn label(&self, x: &[f64]) -> Result<u8> {
        self.check_input(x)?;
        Ok(self.label_with(x, &mut (Vec::new(), Vec::new())))
    }

    pub fn activation_pattern(&self, x: &[f64]) -> Result<ActivationPattern> {
        self.check_input(x)?;
        let mut layers = Vec::with_capacity(self.hidden.len());
        let mut current = x.to_vec();
        let mut pre = Vec::new();
        for layer in &self.hidden {
            layer.preactivate(&current, &mut pre);
            layers.push(pre.iter().map(|&t| t > 0.0).collect());
            current = pre.iter().map(|v| v.max(0.0)).collect();
        }
        Ok(ActivationPattern(layers))
    }
}
