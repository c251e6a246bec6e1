//! Independent reference computations used to cross-check the engines.

use nalgebra::DVector;
use num_complex::Complex;
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand::SeedableRng;

use crate::linalg::CMatrix;

/// `‖φ‖_B` on the cyclic group `ℤ_n` (element `k` is `k mod n`): the ℓ¹-norm of
/// the normalised discrete Fourier transform, `(1/n) Σ_k |Σ_m φ(m) e^{-2πikm/n}|`.
pub fn cyclic_fourier_l1(values: &[Complex<f64>]) -> f64 {
    let n = values.len();
    let mut total = 0.0;
    for k in 0..n {
        let mut acc = Complex::new(0.0, 0.0);
        for (m, v) in values.iter().enumerate() {
            let angle = -2.0 * std::f64::consts::PI * ((k * m) % n) as f64 / n as f64;
            acc += v * Complex::from_polar(1.0, angle);
        }
        total += acc.norm();
    }
    total / n as f64
}

/// Bracket on the Schur norm from a factorization search.
#[derive(Debug, Clone, Copy)]
pub struct FactorizationBracket {
    /// `max_i ‖p_i‖ · max_j ‖q_j‖` for the best factorization `M_ij = ⟨q_j, p_i⟩` found.
    pub upper: f64,
    /// `‖D_a M D_b‖₁` for the best weights found.
    pub lower: f64,
    pub iterations: usize,
}

/// Reweighted factorization search for the Schur-multiplier norm.
///
/// With weights `α, β` on rows and columns, `K = D_{√α} M D_{√β} = U Σ V*` gives
/// the factorization `P = D_{√α}⁻¹ U Σ^{1/2}`, `Q = D_{√β}⁻¹ V Σ^{1/2}`. The weights
/// are then reset to the normalised diagonals of `U Σ U*` and `V Σ V*`, which
/// equalises the row norms of `P` and `Q` at a fixed point. Random restarts
/// perturb the initial weights.
pub fn schur_factorization_search(
    m: &CMatrix<f64>,
    restarts: usize,
    iterations: usize,
    seed: u64,
) -> FactorizationBracket {
    let (r, s) = m.shape();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut best = FactorizationBracket {
        upper: f64::INFINITY,
        lower: 0.0,
        iterations: 0,
    };
    for restart in 0..restarts.max(1) {
        let mut alpha: Vec<f64> = (0..r)
            .map(|_| if restart == 0 { 1.0 } else { 0.5 + rng.random::<f64>() })
            .collect();
        let mut beta: Vec<f64> = (0..s)
            .map(|_| if restart == 0 { 1.0 } else { 0.5 + rng.random::<f64>() })
            .collect();
        for _ in 0..iterations {
            let a: Vec<f64> = alpha.iter().map(|x| x.max(1e-300).sqrt()).collect();
            let b: Vec<f64> = beta.iter().map(|x| x.max(1e-300).sqrt()).collect();
            let na = a.iter().map(|x| x * x).sum::<f64>().sqrt();
            let nb = b.iter().map(|x| x * x).sum::<f64>().sqrt();
            let k = CMatrix::from_fn(r, s, |i, j| m[(i, j)] * (a[i] * b[j] / (na * nb)));
            let svd = k.svd(true, true);
            let u = svd.u.unwrap();
            let v = svd.v_t.unwrap().adjoint();
            let sv: DVector<f64> = svd.singular_values;
            let total = sv.sum();
            best.lower = best.lower.max(total);
            best.iterations += 1;
            if total <= 0.0 {
                best.upper = 0.0;
                return best;
            }
            let row_w: Vec<f64> = (0..r)
                .map(|i| (0..sv.len()).map(|k| u[(i, k)].norm_sqr() * sv[k]).sum())
                .collect();
            let col_w: Vec<f64> = (0..s)
                .map(|j| (0..sv.len()).map(|k| v[(j, k)].norm_sqr() * sv[k]).sum())
                .collect();
            // ‖p_i‖² = row_w[i] / (a_i/na)², likewise for q_j; rows with zero weight
            // carry zero rows of M and contribute nothing.
            let pmax = (0..r)
                .filter(|&i| row_w[i] > 0.0)
                .map(|i| row_w[i] * (na / a[i]).powi(2))
                .fold(0.0, f64::max)
                .sqrt();
            let qmax = (0..s)
                .filter(|&j| col_w[j] > 0.0)
                .map(|j| col_w[j] * (nb / b[j]).powi(2))
                .fold(0.0, f64::max)
                .sqrt();
            best.upper = best.upper.min(pmax * qmax);
            if best.upper - best.lower <= 1e-9 * best.upper.max(1.0) {
                return best;
            }
            alpha = row_w.iter().map(|w| w / total).collect();
            beta = col_w.iter().map(|w| w / total).collect();
        }
    }
    best
}

/// Direct partial sum `Σ_{k=n+1}^{k_max} 2k e^{-tk}`.
pub fn tail_partial_sum(n: usize, t: f64, k_max: usize) -> f64 {
    (n + 1..=k_max)
        .map(|k| 2.0 * k as f64 * (-t * k as f64).exp())
        .sum()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fourier_of_delta_and_constant() {
        let mut delta = vec![Complex::new(0.0, 0.0); 5];
        delta[0] = Complex::new(1.0, 0.0);
        assert!((cyclic_fourier_l1(&delta) - 1.0).abs() < 1e-12);
        let ones = vec![Complex::new(1.0, 0.0); 5];
        assert!((cyclic_fourier_l1(&ones) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn factorization_search_on_rank_one() {
        let u = [1.0, -2.0, 0.5];
        let v = [0.3, 1.5];
        let m = CMatrix::from_fn(3, 2, |i, j| Complex::new(u[i] * v[j], 0.0));
        let br = schur_factorization_search(&m, 1, 500, 0);
        assert!((br.upper - 3.0).abs() < 1e-6, "{br:?}");
        assert!((br.lower - 3.0).abs() < 1e-6, "{br:?}");
    }

    #[test]
    fn tail_sum_converges() {
        let a = tail_partial_sum(10, 0.5, 10_000);
        let b = tail_partial_sum(10, 0.5, 200);
        assert!((a - b).abs() < 1e-30_f64.max(a * 1e-12));
    }
}
