//! Degenerate Bell and Fubini polynomials and the degenerate exponential.

use num_traits::Zero;

use crate::combinatorics::{degenerate_falling, CombCache};
use crate::error::{Error, Result};
use crate::exact::{binomial_nat, Polynomial, Rational, TruncatedSeries};

/// `e_λ^x(t)` truncated at `t^order`; the `t^k/k!` coefficient is `(x)_{k,λ}`.
pub fn degenerate_exp_series(x: &Rational, lambda: &Rational, order: usize) -> TruncatedSeries {
    let egf = (0..=order)
        .map(|k| degenerate_falling(x, k, lambda))
        .collect();
    TruncatedSeries::from_egf(order, egf)
}

/// `φ_{n,λ}(x) = sum_k {n k}_λ x^k`.
pub fn bell_poly_degenerate(cache: &CombCache, n: usize, lambda: &Rational) -> Polynomial {
    Polynomial::new(
        (0..=n)
            .map(|k| cache.stirling2_degenerate(n, k, lambda))
            .collect(),
    )
}

/// `F_{n,λ}(x) = sum_k {n k}_λ k! x^k`.
pub fn fubini_poly_degenerate(cache: &CombCache, n: usize, lambda: &Rational) -> Polynomial {
    Polynomial::new(
        (0..=n)
            .map(|k| cache.stirling2_degenerate(n, k, lambda) * cache.factorial(k))
            .collect(),
    )
}

/// Classical Fubini polynomial `F_n(x) = sum_k S2(n,k) k! x^k`.
pub fn fubini_poly_classical(cache: &CombCache, n: usize) -> Polynomial {
    Polynomial::new(
        (0..=n)
            .map(|k| cache.stirling2_classical(n, k) * cache.factorial(k))
            .collect(),
    )
}

/// Order-`r` degenerate Fubini polynomial, `sum_k C(k+r-1, k) {n k}_λ k! y^k`.
pub fn fubini_poly_degenerate_order(
    cache: &CombCache,
    n: usize,
    r: usize,
    lambda: &Rational,
) -> Result<Polynomial> {
    if r < 1 {
        return Err(Error::InvalidOrder(r));
    }
    Ok(Polynomial::new(
        (0..=n)
            .map(|k| {
                cache.binomial((k + r - 1) as i64, k as i64)
                    * cache.stirling2_degenerate(n, k, lambda)
                    * cache.factorial(k)
            })
            .collect(),
    ))
}

/// Coefficient of `x^i` in the power-series expansion of
/// `(1-x)^{-(r+1)} f(x/(1-x))`.
///
/// Each monomial contributes `f_l x^l (1-x)^{-(l+r+1)}`, whose `x^i`
/// coefficient is `f_l C(i+r, i-l)`, so the expansion is exact.
pub fn geometric_transform_coeff(f: &Polynomial, r: usize, i: usize) -> Rational {
    f.coeffs()
        .iter()
        .enumerate()
        .take(i + 1)
        .filter(|(_, c)| !c.is_zero())
        .map(|(l, c)| c * binomial_nat(i + r, i - l))
        .sum()
}
