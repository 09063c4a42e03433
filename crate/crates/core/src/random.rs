//! Seeded generators for random plants and perturbations.

use alloc::vec::Vec;
use nalgebra::DMatrix;
use rand::Rng;
pub use rand::SeedableRng;
pub use rand_chacha::ChaCha8Rng;

use crate::operator::LtvOperator;
use crate::space::SignalSpace;

/// Deterministic generator used throughout the crate.
pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Signal space with horizon `horizon` and block sizes drawn from `1..=max_dim`.
pub fn random_space<R: Rng>(rng: &mut R, horizon: usize, max_dim: usize) -> SignalSpace {
    let dims: Vec<usize> = (0..horizon).map(|_| rng.gen_range(1..=max_dim)).collect();
    SignalSpace::new(dims).expect("positive horizon and dims")
}

/// Dense matrix with entries uniform in `[-scale, scale]`.
pub fn random_matrix<R: Rng>(rng: &mut R, rows: usize, cols: usize, scale: f64) -> DMatrix<f64> {
    DMatrix::from_fn(rows, cols, |_, _| rng.gen_range(-scale..=scale))
}

/// General (non-causal) operator with uniform entries.
pub fn random_operator<R: Rng>(
    rng: &mut R,
    domain: SignalSpace,
    codomain: SignalSpace,
    scale: f64,
) -> LtvOperator {
    let data = random_matrix(rng, codomain.total_dim(), domain.total_dim(), scale);
    LtvOperator::new(domain, codomain, data).expect("shapes built from the spaces")
}

/// Causal operator with uniform entries in the lower block triangle.
pub fn random_causal<R: Rng>(
    rng: &mut R,
    domain: SignalSpace,
    codomain: SignalSpace,
    scale: f64,
) -> LtvOperator {
    random_operator(rng, domain, codomain, scale).nest_project()
}

/// A random causal plant: horizon in `1..=max_horizon`, block sizes in
/// `1..=max_dim` for inputs and outputs independently.
pub fn random_plant<R: Rng>(rng: &mut R, max_horizon: usize, max_dim: usize) -> LtvOperator {
    let t = rng.gen_range(1..=max_horizon);
    let inputs = random_space(rng, t, max_dim);
    let outputs = random_space(rng, t, max_dim);
    let scale = rng.gen_range(0.2..=2.0);
    random_causal(rng, inputs, outputs, scale)
}

/// Random unit vectors in `R^dim`.
pub fn random_unit_vectors<R: Rng>(rng: &mut R, dim: usize, count: usize) -> Vec<nalgebra::DVector<f64>> {
    (0..count)
        .map(|_| {
            let v = nalgebra::DVector::from_fn(dim, |_, _| rng.gen_range(-1.0..=1.0));
            let n = v.norm();
            v / n
        })
        .collect()
}
