//! JSON documents read and written by the command line.
//!
//! Non-finite numbers cannot be represented in JSON; an unbounded margin is
//! written as `null`.

use serde::{Deserialize, Serialize};

use spherecert_core::certify::RobustnessCertificate;
use spherecert_core::geometry::Side;
use spherecert_core::montecarlo::{RobustnessEstimate, ValidationReport};
use spherecert_core::network::{LayerSpec, NetworkSpec, ReluNetwork};
use spherecert_core::region::{HyperplaneId, LinearRegion};

use crate::CliError;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NetworkDoc {
    pub input_dim: usize,
    pub hidden: Vec<LayerDoc>,
    pub output: OutputDoc,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LayerDoc {
    pub weights: Vec<Vec<f64>>,
    pub biases: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputDoc {
    pub weights: Vec<f64>,
    pub bias: f64,
}

impl From<&ReluNetwork> for NetworkDoc {
    fn from(net: &ReluNetwork) -> Self {
        let spec = net.to_spec();
        NetworkDoc {
            input_dim: spec.input_dim,
            hidden: spec
                .hidden
                .into_iter()
                .map(|l| LayerDoc {
                    weights: l.weights,
                    biases: l.biases,
                })
                .collect(),
            output: OutputDoc {
                weights: spec.output_weights,
                bias: spec.output_bias,
            },
        }
    }
}

impl TryFrom<NetworkDoc> for ReluNetwork {
    type Error = spherecert_core::Error;

    fn try_from(doc: NetworkDoc) -> Result<Self, Self::Error> {
        ReluNetwork::new(NetworkSpec {
            input_dim: doc.input_dim,
            hidden: doc
                .hidden
                .into_iter()
                .map(|l| LayerSpec {
                    weights: l.weights,
                    biases: l.biases,
                })
                .collect(),
            output_weights: doc.output.weights,
            output_bias: doc.output.bias,
        })
    }
}

/// Parse and validate a network document.
pub fn load_network(bytes: &[u8]) -> Result<ReluNetwork, CliError> {
    let doc: NetworkDoc = serde_json::from_slice(bytes).map_err(|source| CliError::Parse {
        what: "network",
        source,
    })?;
    Ok(ReluNetwork::try_from(doc)?)
}

pub fn save_network(net: &ReluNetwork) -> Vec<u8> {
    let mut bytes =
        serde_json::to_vec_pretty(&NetworkDoc::from(net)).expect("finite network serializes");
    bytes.push(b'\n');
    bytes
}

/// Which hyperplane of a cell a record refers to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum HyperplaneRef {
    Unit { layer: usize, index: usize },
    Decision,
}

impl From<HyperplaneId> for HyperplaneRef {
    fn from(id: HyperplaneId) -> Self {
        match id {
            HyperplaneId::Unit { layer, index } => HyperplaneRef::Unit { layer, index },
            HyperplaneId::Decision => HyperplaneRef::Decision,
        }
    }
}

impl From<HyperplaneRef> for HyperplaneId {
    fn from(r: HyperplaneRef) -> Self {
        match r {
            HyperplaneRef::Unit { layer, index } => HyperplaneId::Unit { layer, index },
            HyperplaneRef::Decision => HyperplaneId::Decision,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HyperplaneDistance {
    #[serde(flatten)]
    pub id: HyperplaneRef,
    pub a: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CertificateDoc {
    pub network: Option<String>,
    pub x: Vec<f64>,
    pub r: f64,
    pub d: usize,
    pub n: usize,
    /// `null` when the cell has no faces.
    pub a: Option<f64>,
    pub label: u8,
    pub hyperplane_count: usize,
    pub reachable_hyperplanes: usize,
    pub per_hyperplane: Vec<HyperplaneDistance>,
    pub bound_paper: f64,
    pub bound_sum_exp: f64,
    pub bound_exact_cap: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub epsilon: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub required_margin: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub meets_epsilon: Option<bool>,
    pub method: String,
}

pub const CERTIFICATE_METHOD: &str = "union bound over the faces of the input's linear region: \
bound_paper = 1 - n exp(-a^2 d / 2r^2); bound_sum_exp sums exp(-a_i^2 d / 2r^2) over faces with a_i <= r; \
bound_exact_cap sums exact spherical cap measures over the same faces";

impl CertificateDoc {
    pub fn new(cert: &RobustnessCertificate, network: Option<String>) -> Self {
        CertificateDoc {
            network,
            x: cert.x.clone(),
            r: cert.r,
            d: cert.d,
            n: cert.n,
            a: cert.a.is_finite().then_some(cert.a),
            label: cert.label,
            hyperplane_count: cert.hyperplane_count(),
            reachable_hyperplanes: cert.reachable(),
            per_hyperplane: cert
                .per_hyperplane
                .iter()
                .map(|&(id, a)| HyperplaneDistance { id: id.into(), a })
                .collect(),
            bound_paper: cert.bound_paper,
            bound_sum_exp: cert.bound_sum_exp,
            bound_exact_cap: cert.bound_exact_cap,
            epsilon: None,
            required_margin: None,
            meets_epsilon: None,
            method: CERTIFICATE_METHOD.to_string(),
        }
    }

    pub fn to_certificate(&self) -> RobustnessCertificate {
        RobustnessCertificate {
            x: self.x.clone(),
            r: self.r,
            d: self.d,
            n: self.n,
            a: self.a.unwrap_or(f64::INFINITY),
            per_hyperplane: self
                .per_hyperplane
                .iter()
                .map(|h| (h.id.into(), h.a))
                .collect(),
            bound_paper: self.bound_paper,
            bound_sum_exp: self.bound_sum_exp,
            bound_exact_cap: self.bound_exact_cap,
            label: self.label,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ValidationDoc {
    pub pass: bool,
    pub slack: f64,
    pub slack_paper: f64,
    pub ci_high: f64,
    pub bound_exact_cap: f64,
    pub bound_paper: f64,
}

impl ValidationDoc {
    pub fn new(report: &ValidationReport, cert: &RobustnessCertificate) -> Self {
        ValidationDoc {
            pass: report.pass,
            slack: report.slack,
            slack_paper: report.slack_paper,
            ci_high: report.ci_high,
            bound_exact_cap: cert.bound_exact_cap,
            bound_paper: cert.bound_paper,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EstimateDoc {
    pub network: Option<String>,
    pub x: Vec<f64>,
    pub r: f64,
    pub label: u8,
    pub samples: u64,
    pub agreements: u64,
    pub point_estimate: f64,
    pub ci_low: f64,
    pub ci_high: f64,
    pub confidence: f64,
    pub z: f64,
    pub seed: u64,
    pub wall_clock_seconds: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub validation: Option<ValidationDoc>,
}

impl EstimateDoc {
    pub fn new(
        est: &RobustnessEstimate,
        confidence: f64,
        seconds: f64,
        network: Option<String>,
    ) -> Self {
        let e = &est.estimate;
        EstimateDoc {
            network,
            x: est.x.clone(),
            r: est.r,
            label: est.label,
            samples: e.samples,
            agreements: e.successes,
            point_estimate: e.point_estimate,
            ci_low: e.ci_low,
            ci_high: e.ci_high,
            confidence,
            z: e.z,
            seed: e.seed,
            wall_clock_seconds: seconds,
            validation: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct UnitDoc {
    pub layer: usize,
    pub index: usize,
    pub w: Vec<f64>,
    pub c: f64,
    pub active: bool,
    pub degenerate: bool,
    /// Distance from the anchor; `null` for degenerate units.
    pub a: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DecisionDoc {
    pub w: Vec<f64>,
    pub c: f64,
    pub degenerate: bool,
    pub side: String,
    pub a: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RegionDoc {
    pub network: Option<String>,
    pub anchor: Vec<f64>,
    pub pattern: Vec<Vec<bool>>,
    pub label: u8,
    pub total_units: usize,
    pub hyperplane_count: usize,
    /// Distance from the anchor to the nearest face; `null` when there is none.
    pub margin: Option<f64>,
    pub units: Vec<UnitDoc>,
    pub decision: DecisionDoc,
}

fn side_name(side: Side) -> &'static str {
    match side {
        Side::Positive => "+",
        Side::Negative => "-",
    }
}

impl RegionDoc {
    pub fn new(region: &LinearRegion, network: Option<String>) -> Self {
        let anchor = region.anchor();
        let distance = |h: &Option<spherecert_core::geometry::Hyperplane>| {
            h.as_ref()
                .map(|h| h.distance(anchor).expect("anchor has region dimension"))
        };
        let units = region
            .units()
            .map(|u| UnitDoc {
                layer: u.layer,
                index: u.index,
                w: u.w.clone(),
                c: u.c,
                active: u.active,
                degenerate: u.degenerate(),
                a: distance(&u.hyperplane),
            })
            .collect();
        let decision = region.decision();
        let margin = region.margin(anchor).expect("anchor lies in its region").a;
        RegionDoc {
            network,
            anchor: anchor.to_vec(),
            pattern: region.pattern().layers().to_vec(),
            label: region.label(),
            total_units: region.total_units(),
            hyperplane_count: region.hyperplane_count(),
            margin: margin.is_finite().then_some(margin),
            units,
            decision: DecisionDoc {
                w: decision.w.clone(),
                c: decision.c,
                degenerate: decision.hyperplane.is_none(),
                side: side_name(decision.side).to_string(),
                a: distance(&decision.hyperplane),
            },
        }
    }
}

/// Parse a point given inline as a JSON array.
pub fn parse_point(text: &str) -> Result<Vec<f64>, CliError> {
    serde_json::from_str(text.trim()).map_err(|source| CliError::Parse {
        what: "input vector",
        source,
    })
}

pub fn to_json_line<T: Serialize>(value: &T) -> Vec<u8> {
    let mut bytes = serde_json::to_vec_pretty(value).expect("document serializes");
    bytes.push(b'\n');
    bytes
}
