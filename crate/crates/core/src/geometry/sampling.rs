use alloc::vec::Vec;

use rand::Rng;
use rand_distr::StandardNormal;

use super::SphereSpec;
use crate::linalg::norm;

/// Fill `out` with a point drawn uniformly from the unit sphere `S^{d-1}`, `d = out.len()`.
///
/// Draws a standard normal vector and normalizes it.
pub fn sample_unit_sphere_into<R: Rng + ?Sized>(out: &mut [f64], rng: &mut R) {
    if out.is_empty() {
        return;
    }
    loop {
        for v in out.iter_mut() {
            *v = rng.sample(StandardNormal);
        }
        let len = norm(out);
        if len > 0.0 && len.is_finite() {
            for v in out.iter_mut() {
                *v /= len;
            }
            return;
        }
    }
}

/// Draw `x + ξ` with `ξ` uniform on the sphere of the given radius around the center.
pub fn sample_sphere<R: Rng + ?Sized>(spec: &SphereSpec, rng: &mut R) -> Vec<f64> {
    let mut out = alloc::vec![0.0; spec.dim()];
    sample_unit_sphere_into(&mut out, rng);
    for (o, c) in out.iter_mut().zip(spec.center()) {
        *o = c + spec.radius() * *o;
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn draws_lie_on_the_sphere() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for d in [1, 2, 5, 64, 300] {
            let center: Vec<f64> = (0..d).map(|i| i as f64 * 0.1 - 1.0).collect();
            let spec = SphereSpec::new(center.clone(), 0.37).unwrap();
            for _ in 0..100 {
                let p = sample_sphere(&spec, &mut rng);
                let diff: Vec<f64> = p.iter().zip(&center).map(|(a, b)| a - b).collect();
                assert!((norm(&diff) - 0.37).abs() <= 1e-12 * 0.37 * 10.0);
            }
        }
    }

    #[test]
    fn mean_and_half_space_symmetry() {
        // Per-coordinate sample mean has std r/sqrt(d N); with N = 10^6, d = 3
        // that is ~5.8e-4·r, so 5σ stays within r/300. The first-coordinate sign
        // count is Binomial(10^6, 1/2) with std 5e-4; 0.002 is 4σ.
        let n = 1_000_000;
        let r = 2.0;
        let center = vec![1.0, -3.0, 0.5];
        let spec = SphereSpec::new(center.clone(), r).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let mut sum = [0.0f64; 3];
        let mut above = 0usize;
        for _ in 0..n {
            let p = sample_sphere(&spec, &mut rng);
            for (s, v) in sum.iter_mut().zip(&p) {
                *s += v;
            }
            if p[0] > center[0] {
                above += 1;
            }
        }
        for (s, c) in sum.iter().zip(&center) {
            assert!((s / n as f64 - c).abs() < r / 300.0);
        }
        assert!((above as f64 / n as f64 - 0.5).abs() < 0.002);
    }

    #[test]
    fn seeded_draws_reproduce() {
        let spec = SphereSpec::new(vec![0.0; 10], 1.0).unwrap();
        let a = sample_sphere(&spec, &mut ChaCha8Rng::seed_from_u64(5));
        let b = sample_sphere(&spec, &mut ChaCha8Rng::seed_from_u64(5));
        assert_eq!(a, b);
    }
}
