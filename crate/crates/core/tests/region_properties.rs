use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use spherecert_core::certify::{certify_in_region, deep_certificate, required_margin, union_bound};
use spherecert_core::geometry::{sample_unit_sphere_into, Side};
use spherecert_core::network::ReluNetwork;
use spherecert_core::region::LinearRegion;

fn random_point(d: usize, rng: &mut ChaCha8Rng) -> Vec<f64> {
    (0..d).map(|_| rng.sample(StandardNormal)).collect()
}

fn random_layout(rng: &mut ChaCha8Rng) -> (usize, Vec<usize>) {
    let d = rng.random_range(1..=16);
    let depth = rng.random_range(1..=3);
    let widths = (0..depth).map(|_| rng.random_range(1..=20)).collect();
    (d, widths)
}

fn rel_close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol * a.abs().max(b.abs()).max(1.0)
}

/// Points of the region around its anchor: a guaranteed-interior ball of radius
/// below the margin, plus rejection samples farther out.
fn interior_points(region: &LinearRegion, count: usize, rng: &mut ChaCha8Rng) -> Vec<Vec<f64>> {
    let anchor = region.anchor().to_vec();
    let a = region.margin(&anchor).unwrap().a;
    let reach = if a.is_finite() { a } else { 1.0 };
    let mut out = Vec::with_capacity(count);
    let mut dir = vec![0.0; anchor.len()];
    let mut attempts = 0u64;
    while out.len() < count {
        attempts += 1;
        sample_unit_sphere_into(&mut dir, rng);
        let scale = if attempts.is_multiple_of(2) {
            reach * rng.random_range(0.0..0.999)
        } else {
            reach * rng.random_range(1.0..8.0)
        };
        let z: Vec<f64> = anchor
            .iter()
            .zip(&dir)
            .map(|(c, u)| c + scale * u)
            .collect();
        if region.contains(&z) {
            out.push(z);
        }
    }
    out
}

#[test]
fn collapsed_maps_reproduce_forward_pass() {
    let mut rng = ChaCha8Rng::seed_from_u64(0xA11CE);
    for _ in 0..100 {
        let (d, widths) = random_layout(&mut rng);
        let net = ReluNetwork::random(d, &widths, &mut rng).unwrap();
        let anchor = random_point(d, &mut rng);
        let region = LinearRegion::build(&net, &anchor).unwrap();

        assert!(region.contains(&anchor));
        assert!(region.hyperplane_count() <= net.total_units());
        assert_eq!(region.pattern(), &net.activation_pattern(&anchor).unwrap());

        for z in interior_points(&region, 100, &mut rng) {
            let f = net.forward(&z).unwrap();
            assert_eq!(f.label, region.label());
            for (l, expected) in f.hidden.iter().enumerate() {
                let got = region.collapsed_affine_eval(l, &z).unwrap();
                for (g, e) in got.iter().zip(expected) {
                    assert!(rel_close(*g, *e, 1e-9), "layer {l}: {g} vs {e}");
                }
            }
        }
    }
}

#[test]
fn convex_combinations_interpolate_affinely() {
    let mut rng = ChaCha8Rng::seed_from_u64(77);
    for _ in 0..30 {
        let (d, widths) = random_layout(&mut rng);
        let net = ReluNetwork::random(d, &widths, &mut rng).unwrap();
        let anchor = random_point(d, &mut rng);
        let region = LinearRegion::build(&net, &anchor).unwrap();
        let points = interior_points(&region, 10, &mut rng);
        for z in &points {
            let t: f64 = rng.random_range(0.0..1.0);
            let m: Vec<f64> = anchor
                .iter()
                .zip(z)
                .map(|(a, b)| (1.0 - t) * a + t * b)
                .collect();
            // Convexity: the combination stays in the cell with the same pattern.
            assert!(region.contains(&m));
            assert_eq!(net.activation_pattern(&m).unwrap(), *region.pattern());
            let (fa, fz, fm) = (
                net.forward(&anchor).unwrap(),
                net.forward(z).unwrap(),
                net.forward(&m).unwrap(),
            );
            for l in 0..fm.hidden.len() {
                for k in 0..fm.hidden[l].len() {
                    let want = (1.0 - t) * fa.hidden[l][k] + t * fz.hidden[l][k];
                    assert!(rel_close(fm.hidden[l][k], want, 1e-9));
                }
            }
        }
    }
}

#[test]
fn membership_matches_pattern_on_dense_grid() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for _ in 0..12 {
        let depth = rng.random_range(1..=3);
        let widths: Vec<usize> = (0..depth).map(|_| rng.random_range(2..=6)).collect();
        let net = ReluNetwork::random(2, &widths, &mut rng).unwrap();
        let anchor = random_point(2, &mut rng);
        let region = LinearRegion::build(&net, &anchor).unwrap();
        let anchor_side = Side::of(net.forward(&anchor).unwrap().output_preactivation);
        for i in 0..120 {
            for j in 0..120 {
                let z = [-3.0 + 6.0 * i as f64 / 119.0, -3.0 + 6.0 * j as f64 / 119.0];
                let f = net.forward(&z).unwrap();
                let same = net.activation_pattern(&z).unwrap() == *region.pattern()
                    && Side::of(f.output_preactivation) == anchor_side;
                assert_eq!(region.contains(&z), same, "grid point {z:?}");
                if same {
                    assert_eq!(f.label, region.label());
                }
            }
        }
    }
}

#[test]
fn bound_ordering_and_monotonicity_in_radius() {
    let mut rng = ChaCha8Rng::seed_from_u64(99);
    for _ in 0..200 {
        let (d, widths) = random_layout(&mut rng);
        let net = ReluNetwork::random(d, &widths, &mut rng).unwrap();
        let x = random_point(d, &mut rng);
        let region = LinearRegion::build(&net, &x).unwrap();
        let a = region.margin(&x).unwrap().a;
        let mut prev: Option<(f64, f64, f64)> = None;
        for factor in [0.25, 0.5, 1.0, 2.0, 4.0, 10.0] {
            let r = if a.is_finite() { a * factor } else { factor };
            let c = certify_in_region(&region, &x, r).unwrap();
            assert!(0.0 <= c.bound_paper);
            assert!(c.bound_paper <= c.bound_sum_exp);
            assert!(c.bound_sum_exp <= c.bound_exact_cap);
            assert!(c.bound_exact_cap <= 1.0);
            if let Some((p, s, e)) = prev {
                assert!(c.bound_paper <= p && c.bound_sum_exp <= s && c.bound_exact_cap <= e);
            }
            prev = Some((c.bound_paper, c.bound_sum_exp, c.bound_exact_cap));
        }
        assert_eq!(
            deep_certificate(&net, &x, 1.0)
                .unwrap()
                .per_hyperplane
                .len(),
            region.hyperplane_count()
        );
    }
}

#[test]
fn required_margin_inverts_the_union_bound() {
    for &(eps, r, d, n) in &[
        (0.01, 1.0, 1000, 100),
        (0.5, 1.0, 2, 1),
        (1e-6, 0.3, 64, 49),
        (0.2, 2.5, 256, 7),
    ] {
        let a = required_margin(eps, r, d, n).unwrap();
        assert!((union_bound(a, r, d, n) - (1.0 - eps)).abs() < 1e-12);
    }
}
