//! Seeded random inputs: i.i.d. complex Gaussian functions and Gram-generated
//! positive-definite functions.

use num_complex::Complex;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::group::{Carrier, FiniteGroup, GroupFunction};
use crate::linalg::CMatrix;

pub type SampleRng = ChaCha8Rng;

pub fn rng(seed: u64) -> SampleRng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn gaussian(rng: &mut impl Rng) -> Complex<f64> {
    Complex::new(rng.sample(StandardNormal), rng.sample(StandardNormal))
}

pub fn random_function(carrier: &impl Carrier, rng: &mut impl Rng) -> GroupFunction<f64> {
    GroupFunction::from_fn(carrier, |_| gaussian(rng))
}

/// Random function with nonnegative real values.
pub fn random_nonnegative(carrier: &impl Carrier, rng: &mut impl Rng) -> GroupFunction<f64> {
    GroupFunction::from_real_fn(carrier, |_| rng.random::<f64>())
}

/// `φ(g) = ⟨λ(g)u, u⟩ / ‖u‖²` for a Gaussian `u ∈ ℓ²(G)`.
pub fn random_pd_function(g: &FiniteGroup, rng: &mut impl Rng) -> GroupFunction<f64> {
    let u: Vec<Complex<f64>> = (0..g.order()).map(|_| gaussian(rng)).collect();
    pd_from_vector(g, &u)
}

/// `φ(x) = Σ_y u(x⁻¹y) conj(u(y)) / ‖u‖²`.
pub fn pd_from_vector(g: &FiniteGroup, u: &[Complex<f64>]) -> GroupFunction<f64> {
    let norm: f64 = u.iter().map(|z| z.norm_sqr()).sum();
    GroupFunction::from_fn(g, |x| {
        let xi = g.inv(x);
        g.elements()
            .map(|y| u[g.mul(xi, y)] * u[y].conj())
            .sum::<Complex<f64>>()
            / norm
    })
}

pub fn random_matrix(rows: usize, cols: usize, rng: &mut impl Rng) -> CMatrix<f64> {
    CMatrix::from_fn(rows, cols, |_, _| gaussian(rng))
}

pub fn random_hermitian(n: usize, rng: &mut impl Rng) -> CMatrix<f64> {
    let a = random_matrix(n, n, rng);
    (&a + a.adjoint()) * Complex::new(0.5, 0.0)
}

pub fn random_permutation(n: usize, rng: &mut impl Rng) -> Vec<usize> {
    use rand::seq::SliceRandom;
    let mut p: Vec<usize> = (0..n).collect();
    p.shuffle(rng);
    p
}

pub fn permutation_matrix(p: &[usize]) -> CMatrix<f64> {
    let n = p.len();
    let mut m = CMatrix::zeros(n, n);
    for (i, &j) in p.iter().enumerate() {
        m[(i, j)] = Complex::new(1.0, 0.0);
    }
    m
}
