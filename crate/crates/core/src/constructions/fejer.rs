use num_complex::Complex;

use crate::error::{Error, Result};
use crate::group::{GroupFunction, IntegerWindow};
use crate::Scalar;

/// A Fejér term `φ_n = ⟨λ(·)u, u⟩` on a window of ℤ, with `u = χ_{F_n}/√n`
/// and `F_n = {1, …, n}`.
#[derive(Debug, Clone)]
pub struct FejerTerm<T> {
    pub n: usize,
    pub phi: GroupFunction<T>,
    pub certificate: FejerCertificate<T>,
}

/// The coefficient realization `u = √amp_sq · χ_support`, stored through
/// `|u(k)|² = amp_sq` so that it stays exact over rationals.
#[derive(Debug, Clone)]
pub struct FejerCertificate<T> {
    pub support: Vec<i64>,
    pub amp_sq: T,
}

impl<T: Scalar> FejerCertificate<T> {
    /// `‖u‖₂²`, an upper bound on the A-norm (hence on every M_d-norm).
    pub fn norm_sq(&self) -> T {
        self.support
            .iter()
            .fold(T::zero(), |s, _| s + self.amp_sq.clone())
    }

    /// `⟨λ(m)u, u⟩ = Σ_k u(k − m) u(k)`, evaluated by direct summation.
    pub fn coefficient_at(&self, m: i64) -> T {
        self.support
            .iter()
            .filter(|&&k| self.support.binary_search(&(k - m)).is_ok())
            .fold(T::zero(), |s, _| s + self.amp_sq.clone())
    }
}

/// `φ_n(m) = (n − |m|)/n` for `|m| < n`, else `0`, on `[−N, N]` with `N ≥ n`.
pub fn fejer<T: Scalar>(n: usize, window: &IntegerWindow) -> Result<FejerTerm<T>> {
    if n == 0 {
        return Err(Error::InvalidParameter("Fejér index must be positive".into()));
    }
    if window.halfwidth() < n {
        return Err(Error::WindowTooSmall {
            halfwidth: window.halfwidth(),
            needed: n,
        });
    }
    let nn = T::from_usize(n).expect("index fits the scalar");
    let phi = GroupFunction::from_fn(window, |x| {
        let m = window.value(x).unsigned_abs() as usize;
        let v = if m < n {
            T::from_usize(n - m).expect("index fits the scalar") / nn.clone()
        } else {
            T::zero()
        };
        Complex::new(v, T::zero())
    });
    Ok(FejerTerm {
        n,
        phi,
        certificate: FejerCertificate {
            support: (1..=n as i64).collect(),
            amp_sq: T::one() / nn,
        },
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::Rational;

    #[test]
    fn values_and_certificate_are_exact() {
        let w = IntegerWindow::new(6).unwrap();
        let f = fejer::<Rational>(3, &w).unwrap();
        let at = |m| f.phi.get(w.element(m).unwrap()).re;
        assert_eq!(at(0), Rational::from_integer(1));
        assert_eq!(at(1), Rational::new(2, 3));
        assert_eq!(at(-2), Rational::new(1, 3));
        assert_eq!(at(5), Rational::from_integer(0));
        assert_eq!(f.certificate.norm_sq(), Rational::from_integer(1));
        for m in -6..=6 {
            assert_eq!(f.certificate.coefficient_at(m), at(m));
        }
    }

    #[test]
    fn small_window_is_rejected() {
        let w = IntegerWindow::new(2).unwrap();
        assert!(matches!(fejer::<f64>(3, &w), Err(Error::WindowTooSmall { .. })));
    }
}
