//! Seeded random test objects: positive densities and coefficient vectors.

use alloc::vec::Vec;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::field::DensityProfile;
use crate::fourier;

pub type CorpusRng = ChaCha8Rng;

pub fn rng(seed: u64) -> CorpusRng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// `1 + p(x)` with `p` a random trigonometric polynomial of degree `kmax`,
/// rescaled so that `sup |p| = amplitude` on the collocation grid.
pub fn random_density(rng: &mut CorpusRng, order: usize, kmax: usize, amplitude: f64) -> DensityProfile {
    let kmax = kmax.min(order).max(1);
    let terms: Vec<(usize, f64, f64)> = (1..=kmax)
        .map(|k| {
            let decay = 1.0 / k as f64;
            (
                k,
                decay * rng.random_range(-1.0..1.0),
                decay * rng.random_range(-1.0..1.0),
            )
        })
        .collect();
    let p = DensityProfile::from_trig(order, 0.0, &terms).expect("modes within the truncation");
    let sup = p.sup_abs_on_grid(fourier::collocation_points(order));
    let scale = if sup > 0.0 { amplitude / sup } else { 0.0 };
    DensityProfile::constant(order, 1.0).combine(1.0, &p, scale)
}

/// Complex vector with entries uniform in the unit square.
pub fn random_complex(rng: &mut CorpusRng, n: usize) -> Vec<Complex64> {
    (0..n)
        .map(|_| Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)))
        .collect()
}

/// Real vector with entries uniform in `[-1, 1]`.
pub fn random_real(rng: &mut CorpusRng, n: usize) -> Vec<f64> {
    (0..n).map(|_| rng.random_range(-1.0..1.0)).collect()
}

pub fn uniform(rng: &mut CorpusRng, lo: f64, hi: f64) -> f64 {
    rng.random_range(lo..hi)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn densities_are_positive_and_seeded() {
        let mut a = rng(7);
        let mut b = rng(7);
        let p = random_density(&mut a, 16, 5, 0.6);
        let q = random_density(&mut b, 16, 5, 0.6);
        assert_eq!(p, q);
        assert!((p.mean() - 1.0).abs() < 1e-15);
        assert!(p.min_on_grid(64) >= 0.4 - 1e-12);
    }
}
