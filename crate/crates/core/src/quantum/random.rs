//! Seeded random states and observables.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use super::{c, hermitian_sign, CMatrix, CVector};

/// Deterministic generator for a seed and an independent stream.
pub fn rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut r = ChaCha8Rng::seed_from_u64(seed);
    r.set_stream(stream);
    r
}

fn gaussian_matrix(d: usize, rng: &mut impl Rng) -> CMatrix {
    CMatrix::from_fn(d, d, |_, _| c(rng.sample(StandardNormal), rng.sample(StandardNormal)))
}

pub fn random_pure_state(d: usize, rng: &mut impl Rng) -> CVector {
    let v = CVector::from_fn(d, |_, _| c(rng.sample(StandardNormal), rng.sample(StandardNormal)));
    let n = v.norm();
    v.unscale(n)
}

/// `G G† / Tr[G G†]` for a complex Ginibre matrix `G`.
pub fn random_density_matrix(d: usize, rng: &mut impl Rng) -> CMatrix {
    let g = gaussian_matrix(d, rng);
    let rho = &g * g.adjoint();
    let t = rho.trace().re;
    rho.unscale(t)
}

/// `sign(H)` for a random Hermitian `H`: a ±1-valued observable.
pub fn random_observable(d: usize, rng: &mut impl Rng) -> CMatrix {
    let g = gaussian_matrix(d, rng);
    hermitian_sign(&(&g + g.adjoint()))
}

pub fn random_product_state(dims: &[usize], rng: &mut impl Rng) -> CVector {
    dims.iter().fold(CVector::from_element(1, c(1.0, 0.0)), |acc, &d| acc.kronecker(&random_pure_state(d, rng)))
}

/// Random convex mixture of `terms` random product pure states.
pub fn random_separable_state(dims: &[usize], terms: usize, rng: &mut impl Rng) -> CMatrix {
    let total: usize = dims.iter().product();
    let weights: Vec<f64> = (0..terms).map(|_| rng.random::<f64>() + 1e-3).collect();
    let norm: f64 = weights.iter().sum();
    let mut rho = CMatrix::zeros(total, total);
    for w in weights {
        let v = random_product_state(dims, rng);
        rho += (&v * v.adjoint()).scale(w / norm);
    }
    rho
}
