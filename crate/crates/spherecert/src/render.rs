//! Raster pictures of the input-space partition of two-input networks, written
//! as binary PPM (`P6`).
//!
//! Every pixel is colored by a hash of the activation pattern at its center.
//! Pixels where the label changes are drawn black, and an optional query point
//! and its perturbation circle are drawn white.

use std::collections::{BTreeMap, BTreeSet};

use spherecert_core::network::{ActivationPattern, ReluNetwork};

use crate::CliError;

pub const BOUNDARY: [u8; 3] = [0, 0, 0];
pub const OVERLAY: [u8; 3] = [255, 255, 255];

#[derive(Debug, Clone)]
pub struct RenderSpec {
    /// `[x0, y0, x1, y1]`
    pub bbox: [f64; 4],
    /// Pixels per side.
    pub res: usize,
    /// Query point and perturbation radius to overlay.
    pub query: Option<(Vec<f64>, f64)>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Raster {
    pub width: usize,
    pub height: usize,
    pub rgb: Vec<u8>,
    /// Distinct activation patterns seen at pixel centers.
    pub pattern_count: usize,
    /// Color assigned to each pattern hash.
    pub palette: BTreeMap<u64, [u8; 3]>,
}

impl Raster {
    pub fn pixel(&self, col: usize, row: usize) -> [u8; 3] {
        let i = 3 * (row * self.width + col);
        [self.rgb[i], self.rgb[i + 1], self.rgb[i + 2]]
    }

    pub fn to_ppm(&self) -> Vec<u8> {
        let mut out = format!("P6\n{} {}\n255\n", self.width, self.height).into_bytes();
        out.extend_from_slice(&self.rgb);
        out
    }
}

fn mix(mut h: u64) -> u64 {
    // splitmix64 finalizer
    h = (h ^ (h >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    h = (h ^ (h >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    h ^ (h >> 31)
}

fn hsv_to_rgb(h: f64, s: f64, v: f64) -> [u8; 3] {
    let c = v * s;
    let hp = h / 60.0;
    let x = c * (1.0 - (hp % 2.0 - 1.0).abs());
    let (r, g, b) = match hp as u32 {
        0 => (c, x, 0.0),
        1 => (x, c, 0.0),
        2 => (0.0, c, x),
        3 => (0.0, x, c),
        4 => (x, 0.0, c),
        _ => (c, 0.0, x),
    };
    let m = v - c;
    let q = |t: f64| ((t + m) * 255.0).round().clamp(0.0, 255.0) as u8;
    [q(r), q(g), q(b)]
}

fn pattern_color(hash: u64, salt: u64) -> [u8; 3] {
    let h = mix(hash ^ salt.wrapping_mul(0x9e37_79b9_7f4a_7c15));
    let hue = (h % 360) as f64;
    let sat = 0.45 + ((h >> 16) % 40) as f64 / 100.0;
    let val = 0.75 + ((h >> 32) % 20) as f64 / 100.0;
    hsv_to_rgb(hue, sat, val)
}

/// Colors for all hashes, re-salting until no two patterns share a color.
fn assign_palette(hashes: &BTreeSet<u64>) -> BTreeMap<u64, [u8; 3]> {
    for salt in 0.. {
        let palette: BTreeMap<u64, [u8; 3]> = hashes
            .iter()
            .map(|&h| (h, pattern_color(h, salt)))
            .collect();
        let distinct: BTreeSet<[u8; 3]> = palette.values().copied().collect();
        if distinct.len() == palette.len() {
            return palette;
        }
    }
    unreachable!()
}

pub fn render_partition(net: &ReluNetwork, spec: &RenderSpec) -> Result<Raster, CliError> {
    if net.input_dim() != 2 {
        return Err(CliError::Usage(format!(
            "render2d draws the partition of the plane and needs a network with input_dim = 2, got {}",
            net.input_dim()
        )));
    }
    let [x0, y0, x1, y1] = spec.bbox;
    if !(x1 > x0 && y1 > y0) || spec.bbox.iter().any(|v| !v.is_finite()) {
        return Err(CliError::Usage(format!(
            "bbox must satisfy x0 < x1 and y0 < y1, got {:?}",
            spec.bbox
        )));
    }
    if spec.res < 2 {
        return Err(CliError::Usage("res must be at least 2".into()));
    }
    let n = spec.res;
    let sx = (x1 - x0) / n as f64;
    let sy = (y1 - y0) / n as f64;
    let center =
        |col: usize, row: usize| [x0 + (col as f64 + 0.5) * sx, y1 - (row as f64 + 0.5) * sy];

    let mut hashes = Vec::with_capacity(n * n);
    let mut labels = Vec::with_capacity(n * n);
    for row in 0..n {
        for col in 0..n {
            let p = center(col, row);
            let pattern: ActivationPattern = net.activation_pattern(&p)?;
            hashes.push(pattern.stable_hash());
            labels.push(net.forward(&p)?.label);
        }
    }
    let distinct: BTreeSet<u64> = hashes.iter().copied().collect();
    let palette = assign_palette(&distinct);

    let mut rgb = Vec::with_capacity(3 * n * n);
    for row in 0..n {
        for col in 0..n {
            let i = row * n + col;
            let edge = (col + 1 < n && labels[i + 1] != labels[i])
                || (row + 1 < n && labels[i + n] != labels[i]);
            let color = if edge { BOUNDARY } else { palette[&hashes[i]] };
            rgb.extend_from_slice(&color);
        }
    }

    if let Some((q, r)) = &spec.query {
        if q.len() != 2 {
            return Err(CliError::Usage(format!(
                "query point must have 2 coordinates, got {}",
                q.len()
            )));
        }
        let tol = 0.75 * sx.hypot(sy);
        for row in 0..n {
            for col in 0..n {
                let p = center(col, row);
                let dist = (p[0] - q[0]).hypot(p[1] - q[1]);
                let on_circle = (dist - r).abs() <= tol / 2.0;
                let on_cross = ((p[0] - q[0]).abs() <= sx / 2.0 && (p[1] - q[1]).abs() <= 3.0 * sy)
                    || ((p[1] - q[1]).abs() <= sy / 2.0 && (p[0] - q[0]).abs() <= 3.0 * sx);
                if on_circle || on_cross {
                    let i = 3 * (row * n + col);
                    rgb[i..i + 3].copy_from_slice(&OVERLAY);
                }
            }
        }
    }

    Ok(Raster {
        width: n,
        height: n,
        rgb,
        pattern_count: distinct.len(),
        palette,
    })
}
