//! Exact scalars, dense polynomials and truncated power series.
//!
//! Everything here works over [`Rational`] (a big rational kept in lowest
//! terms), so none of the arithmetic ever rounds. The routines in this module
//! are also the oracle engine used by the identity checks: they know nothing
//! about the combinatorial tables and recompute factorials and binomials
//! locally.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};

/// Arbitrary precision rational, always normalized (denominator > 0, lowest terms).
pub type Rational = BigRational;

/// Shorthand for the rational `num/den`. Panics if `den == 0`.
pub fn rat(num: i64, den: i64) -> Rational {
    Rational::new(BigInt::from(num), BigInt::from(den))
}

pub fn int(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

/// Parses `n`, `-n`, `p/q` or `-p/q` into a rational in lowest terms.
pub fn parse_rational(token: &str) -> Result<Rational> {
    let bad = |reason: &str| Error::Parse {
        token: token.to_string(),
        reason: reason.to_string(),
    };
    let s = token.trim();
    if s.is_empty() {
        return Err(bad("empty number"));
    }
    let parse_int = |part: &str| -> Result<BigInt> {
        let digits = part.strip_prefix(['+', '-']).unwrap_or(part);
        if digits.is_empty() || !digits.bytes().all(|b| b.is_ascii_digit()) {
            return Err(bad("expected an integer or p/q"));
        }
        part.parse::<BigInt>()
            .map_err(|_| bad("expected an integer or p/q"))
    };
    match s.split_once('/') {
        None => Ok(Rational::from_integer(parse_int(s)?)),
        Some((p, q)) => {
            let num = parse_int(p)?;
            if q.starts_with(['+', '-']) {
                return Err(bad("denominator must be an unsigned integer"));
            }
            let den = parse_int(q)?;
            if den.is_zero() {
                return Err(bad("zero denominator"));
            }
            Ok(Rational::new(num, den))
        }
    }
}

/// Wire format: `n` for integers, `p/q` (with leading `-` when negative) otherwise.
pub fn format_rational(value: &Rational) -> String {
    if value.denom().is_one() {
        value.numer().to_string()
    } else {
        format!("{}/{}", value.numer(), value.denom())
    }
}

pub fn to_f64(value: &Rational) -> f64 {
    use num_traits::ToPrimitive;
    value.to_f64().unwrap_or(f64::NAN)
}

pub(crate) fn factorial_int(n: usize) -> BigInt {
    (1..=n).fold(BigInt::one(), |acc, i| acc * BigInt::from(i))
}

pub(crate) fn factorial(n: usize) -> Rational {
    Rational::from_integer(factorial_int(n))
}

/// Multiplicative binomial coefficient for `0 <= k`; zero when `k > n`.
pub(crate) fn binomial_nat(n: usize, k: usize) -> Rational {
    if k > n {
        return Rational::zero();
    }
    let k = k.min(n - k);
    let mut acc = BigInt::one();
    for i in 0..k {
        acc = acc * BigInt::from(n - i) / BigInt::from(i + 1);
    }
    Rational::from_integer(acc)
}

/// Dense univariate polynomial, coefficient `i` multiplies `x^i`.
///
/// Trailing zeros are always stripped, so the zero polynomial has no
/// coefficients and structural equality is polynomial equality.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Default)]
pub struct Polynomial {
    coeffs: Vec<Rational>,
}

impl Polynomial {
    pub fn new(mut coeffs: Vec<Rational>) -> Self {
        while coeffs.last().is_some_and(Zero::is_zero) {
            coeffs.pop();
        }
        Polynomial { coeffs }
    }

    pub fn zero() -> Self {
        Polynomial { coeffs: Vec::new() }
    }

    pub fn one() -> Self {
        Self::constant(Rational::one())
    }

    pub fn constant(c: Rational) -> Self {
        Self::new(vec![c])
    }

    /// `c * x^k`
    pub fn monomial(c: Rational, k: usize) -> Self {
        let mut coeffs = vec![Rational::zero(); k + 1];
        coeffs[k] = c;
        Self::new(coeffs)
    }

    /// The polynomial `x`.
    pub fn x() -> Self {
        Self::monomial(Rational::one(), 1)
    }

    pub fn from_ints(coeffs: &[i64]) -> Self {
        Self::new(coeffs.iter().map(|&c| int(c)).collect())
    }

    pub fn coeffs(&self) -> &[Rational] {
        &self.coeffs
    }

    /// Coefficient of `x^k`, zero beyond the degree.
    pub fn coeff(&self, k: usize) -> Rational {
        self.coeffs.get(k).cloned().unwrap_or_else(Rational::zero)
    }

    /// `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn leading_coeff(&self) -> Rational {
        self.coeffs.last().cloned().unwrap_or_else(Rational::zero)
    }

    /// Horner evaluation.
    pub fn eval(&self, x: &Rational) -> Rational {
        self.coeffs
            .iter()
            .rev()
            .fold(Rational::zero(), |acc, c| acc * x + c)
    }

    /// `r`-th formal derivative.
    pub fn derivative(&self, r: usize) -> Polynomial {
        if r == 0 {
            return self.clone();
        }
        let coeffs = self
            .coeffs
            .iter()
            .enumerate()
            .skip(r)
            .map(|(k, c)| {
                // k (k-1) ... (k-r+1)
                let falling: BigInt = ((k - r + 1)..=k).map(BigInt::from).product();
                c * Rational::from_integer(falling)
            })
            .collect();
        Polynomial::new(coeffs)
    }

    pub fn scale(&self, c: &Rational) -> Polynomial {
        Polynomial::new(self.coeffs.iter().map(|a| a * c).collect())
    }

    /// `p(c x)`.
    pub fn dilate(&self, c: &Rational) -> Polynomial {
        let mut power = Rational::one();
        let mut coeffs = Vec::with_capacity(self.coeffs.len());
        for a in &self.coeffs {
            coeffs.push(a * &power);
            power *= c;
        }
        Polynomial::new(coeffs)
    }

    /// `x^k * self`.
    pub fn shift(&self, k: usize) -> Polynomial {
        if self.is_zero() {
            return Polynomial::zero();
        }
        let mut coeffs = vec![Rational::zero(); k];
        coeffs.extend(self.coeffs.iter().cloned());
        Polynomial { coeffs }
    }
}

impl fmt::Display for Polynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (k, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let mag = c.abs();
            if first {
                if c.is_negative() {
                    write!(f, "-")?;
                }
            } else {
                write!(f, " {} ", if c.is_negative() { "-" } else { "+" })?;
            }
            first = false;
            let mag_str = format_rational(&mag);
            match k {
                0 => write!(f, "{mag_str}")?,
                _ => {
                    if !mag.is_one() {
                        write!(f, "{mag_str}*")?;
                    }
                    if k == 1 {
                        write!(f, "x")?;
                    } else {
                        write!(f, "x^{k}")?;
                    }
                }
            }
        }
        Ok(())
    }
}

impl Add for &Polynomial {
    type Output = Polynomial;
    fn add(self, rhs: &Polynomial) -> Polynomial {
        let len = self.coeffs.len().max(rhs.coeffs.len());
        Polynomial::new((0..len).map(|k| self.coeff(k) + rhs.coeff(k)).collect())
    }
}

impl Sub for &Polynomial {
    type Output = Polynomial;
    fn sub(self, rhs: &Polynomial) -> Polynomial {
        let len = self.coeffs.len().max(rhs.coeffs.len());
        Polynomial::new((0..len).map(|k| self.coeff(k) - rhs.coeff(k)).collect())
    }
}

impl Mul for &Polynomial {
    type Output = Polynomial;
    fn mul(self, rhs: &Polynomial) -> Polynomial {
        if self.is_zero() || rhs.is_zero() {
            return Polynomial::zero();
        }
        let mut out = vec![Rational::zero(); self.coeffs.len() + rhs.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in rhs.coeffs.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        Polynomial::new(out)
    }
}

impl Neg for &Polynomial {
    type Output = Polynomial;
    fn neg(self) -> Polynomial {
        Polynomial::new(self.coeffs.iter().map(|c| -c).collect())
    }
}

impl std::iter::Sum for Polynomial {
    fn sum<I: Iterator<Item = Polynomial>>(iter: I) -> Self {
        iter.fold(Polynomial::zero(), |acc, p| &acc + &p)
    }
}

/// Free-function form of [`Polynomial::eval`].
pub fn poly_eval(p: &Polynomial, x: &Rational) -> Rational {
    p.eval(x)
}

/// Free-function form of [`Polynomial::derivative`].
pub fn poly_derivative(p: &Polynomial, r: usize) -> Polynomial {
    p.derivative(r)
}

/// Power series in `t` truncated after `t^order`.
///
/// Coefficients are kept in the plain `t^k` basis. Exponential generating
/// function values (the multiplier of `t^k / k!`) go through
/// [`TruncatedSeries::from_egf`] and [`TruncatedSeries::egf_coeff`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TruncatedSeries {
    coeffs: Vec<Rational>,
}

impl TruncatedSeries {
    /// Pads with zeros or drops terms so exactly `order + 1` coefficients remain.
    pub fn from_raw(order: usize, mut coeffs: Vec<Rational>) -> Self {
        coeffs.resize(order + 1, Rational::zero());
        TruncatedSeries { coeffs }
    }

    /// Builds the series `sum_k egf[k] t^k / k!`.
    pub fn from_egf(order: usize, egf: Vec<Rational>) -> Self {
        let mut series = Self::from_raw(order, egf);
        let mut fact = Rational::one();
        for (k, c) in series.coeffs.iter_mut().enumerate() {
            if k > 0 {
                fact *= int(k as i64);
            }
            *c /= &fact;
        }
        series
    }

    pub fn zero(order: usize) -> Self {
        Self::from_raw(order, Vec::new())
    }

    pub fn one(order: usize) -> Self {
        Self::from_raw(order, vec![Rational::one()])
    }

    pub fn order(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn coeffs(&self) -> &[Rational] {
        &self.coeffs
    }

    /// Coefficient of `t^k`.
    pub fn coeff(&self, k: usize) -> &Rational {
        &self.coeffs[k]
    }

    /// The value multiplying `t^k / k!`.
    pub fn egf_coeff(&self, k: usize) -> Rational {
        &self.coeffs[k] * factorial(k)
    }

    pub fn egf_coeffs(&self) -> Vec<Rational> {
        (0..self.coeffs.len()).map(|k| self.egf_coeff(k)).collect()
    }

    fn check_order(&self, other: &TruncatedSeries) -> Result<()> {
        if self.order() != other.order() {
            return Err(Error::OrderMismatch {
                left: self.order(),
                right: other.order(),
            });
        }
        Ok(())
    }

    pub fn add(&self, other: &TruncatedSeries) -> Result<TruncatedSeries> {
        self.check_order(other)?;
        Ok(TruncatedSeries {
            coeffs: self
                .coeffs
                .iter()
                .zip(&other.coeffs)
                .map(|(a, b)| a + b)
                .collect(),
        })
    }

    pub fn sub(&self, other: &TruncatedSeries) -> Result<TruncatedSeries> {
        self.check_order(other)?;
        Ok(TruncatedSeries {
            coeffs: self
                .coeffs
                .iter()
                .zip(&other.coeffs)
                .map(|(a, b)| a - b)
                .collect(),
        })
    }

    pub fn scale(&self, c: &Rational) -> TruncatedSeries {
        TruncatedSeries {
            coeffs: self.coeffs.iter().map(|a| a * c).collect(),
        }
    }

    /// Cauchy product truncated at the common order.
    pub fn mul(&self, other: &TruncatedSeries) -> Result<TruncatedSeries> {
        self.check_order(other)?;
        let n = self.order();
        let mut out = vec![Rational::zero(); n + 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in other.coeffs[..=n - i].iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        Ok(TruncatedSeries { coeffs: out })
    }

    pub fn pow(&self, exp: usize) -> TruncatedSeries {
        let mut acc = TruncatedSeries::one(self.order());
        for _ in 0..exp {
            acc = acc.mul(self).expect("orders agree");
        }
        acc
    }

    /// Multiplicative inverse; requires a nonzero constant term.
    pub fn reciprocal(&self) -> Result<TruncatedSeries> {
        let a0 = &self.coeffs[0];
        if a0.is_zero() {
            return Err(Error::ZeroConstantTerm);
        }
        let inv0 = a0.recip();
        let n = self.order();
        let mut out: Vec<Rational> = Vec::with_capacity(n + 1);
        out.push(inv0.clone());
        for k in 1..=n {
            let acc: Rational = (1..=k).map(|i| &self.coeffs[i] * &out[k - i]).sum();
            out.push(-acc * &inv0);
        }
        Ok(TruncatedSeries { coeffs: out })
    }

    /// `exp(self)`; requires a zero constant term.
    pub fn exp(&self) -> Result<TruncatedSeries> {
        if !self.coeffs[0].is_zero() {
            return Err(Error::NonzeroConstantTerm);
        }
        // k b_k = sum_{j=1}^{k} j a_j b_{k-j}
        let n = self.order();
        let mut out: Vec<Rational> = Vec::with_capacity(n + 1);
        out.push(Rational::one());
        for k in 1..=n {
            let acc: Rational = (1..=k)
                .map(|j| &self.coeffs[j] * int(j as i64) * &out[k - j])
                .sum();
            out.push(acc / int(k as i64));
        }
        Ok(TruncatedSeries { coeffs: out })
    }
}

pub fn series_mul(a: &TruncatedSeries, b: &TruncatedSeries) -> Result<TruncatedSeries> {
    a.mul(b)
}

pub fn series_reciprocal(a: &TruncatedSeries) -> Result<TruncatedSeries> {
    a.reciprocal()
}

pub fn series_exp(a: &TruncatedSeries) -> Result<TruncatedSeries> {
    a.exp()
}

/// `int_0^inf y^(r-1) p(y) e^(-y) dy = sum_k p_k (r+k-1)!`, exactly.
pub fn gamma_weight_integral(p: &Polynomial, r: usize) -> Result<Rational> {
    if r < 1 {
        return Err(Error::InvalidWeight(r));
    }
    Ok(p.coeffs()
        .iter()
        .enumerate()
        .map(|(k, c)| c * factorial(r + k - 1))
        .sum())
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn series(order: usize, coeffs: &[i64]) -> TruncatedSeries {
        TruncatedSeries::from_raw(order, coeffs.iter().map(|&c| int(c)).collect())
    }

    #[test]
    fn parse_and_format() {
        assert_eq!(parse_rational("6/4").unwrap(), rat(3, 2));
        assert_eq!(parse_rational("-2/5").unwrap(), rat(-2, 5));
        assert_eq!(parse_rational("7").unwrap(), int(7));
        assert!(parse_rational("1/0").is_err());
        assert!(parse_rational("abc").is_err());
        assert!(parse_rational("1/-2").is_err());
        assert!(parse_rational("").is_err());
        assert_eq!(format_rational(&rat(-6, 4)), "-3/2");
        assert_eq!(format_rational(&rat(8, 4)), "2");
        assert_eq!(format_rational(&Rational::zero()), "0");
    }

    #[test]
    fn eval_examples() {
        assert_eq!(Polynomial::zero().eval(&rat(7, 2)), Rational::zero());
        assert_eq!(Polynomial::from_ints(&[0, 1, 2]).eval(&int(1)), int(3));
        let p = Polynomial::new(vec![int(0), rat(1, 2), int(2)]);
        assert_eq!(p.eval(&int(1)), rat(5, 2));
    }

    #[test]
    fn canonical_form() {
        let p = Polynomial::from_ints(&[1, 0, 0]);
        assert_eq!(p.coeffs().len(), 1);
        assert_eq!(Polynomial::from_ints(&[0, 0]).degree(), None);
    }

    #[test]
    fn derivative_examples() {
        assert_eq!(
            Polynomial::from_ints(&[0, 1, 2]).derivative(1),
            Polynomial::from_ints(&[1, 4])
        );
        assert!(Polynomial::from_ints(&[5]).derivative(3).is_zero());
        assert_eq!(
            Polynomial::from_ints(&[0, 0, 0, 1]).derivative(2),
            Polynomial::from_ints(&[0, 6])
        );
        let p = Polynomial::from_ints(&[3, 1, 4]);
        assert_eq!(p.derivative(0), p);
    }

    #[test]
    fn display_reads_naturally() {
        let p = Polynomial::new(vec![rat(2, 5), rat(4, 5)]);
        assert_eq!(p.to_string(), "2/5 + 4/5*x");
        assert_eq!(
            Polynomial::from_ints(&[0, -1, 0, 3]).to_string(),
            "-x + 3*x^3"
        );
    }

    #[test]
    fn series_mul_examples() {
        let a = series(2, &[1, 1]);
        assert_eq!(a.mul(&a).unwrap(), series(2, &[1, 2, 1]));
        let geo = series(2, &[1, 1, 1]);
        assert_eq!(
            geo.mul(&series(2, &[1, -1])).unwrap(),
            series(2, &[1, 0, 0])
        );
        assert!(matches!(
            a.mul(&series(3, &[1])),
            Err(Error::OrderMismatch { left: 2, right: 3 })
        ));
    }

    #[test]
    fn reciprocal_examples() {
        assert_eq!(
            series(3, &[1, -1]).reciprocal().unwrap(),
            series(3, &[1, 1, 1, 1])
        );
        assert_eq!(series(2, &[1]).reciprocal().unwrap(), series(2, &[1]));
        // 1 - x(e_1(t) - 1) at x = 1 is 1 - t; egf coefficients 1, 1, 2
        let inv = series(2, &[1, -1]).reciprocal().unwrap();
        assert_eq!(inv.egf_coeffs(), vec![int(1), int(1), int(2)]);
        assert!(matches!(
            series(2, &[0, 1]).reciprocal(),
            Err(Error::ZeroConstantTerm)
        ));
    }

    #[test]
    fn exp_examples() {
        assert_eq!(
            TruncatedSeries::zero(3).exp().unwrap(),
            TruncatedSeries::one(3)
        );
        let e = series(3, &[0, 1]).exp().unwrap();
        assert_eq!(e.coeffs(), &[int(1), int(1), rat(1, 2), rat(1, 6)]);
        assert_eq!(
            series(2, &[0, 1]).exp().unwrap().egf_coeffs(),
            vec![int(1); 3]
        );
        assert!(matches!(
            series(2, &[1]).exp(),
            Err(Error::NonzeroConstantTerm)
        ));
    }

    #[test]
    fn egf_roundtrip() {
        let s = TruncatedSeries::from_egf(4, vec![int(1), int(1), int(3), int(13), int(75)]);
        assert_eq!(s.coeff(3), &rat(13, 6));
        assert_eq!(s.egf_coeff(4), int(75));
    }

    #[test]
    fn gamma_integral_examples() {
        assert_eq!(
            gamma_weight_integral(&Polynomial::from_ints(&[0, 0, 1]), 1).unwrap(),
            int(2)
        );
        assert_eq!(
            gamma_weight_integral(&Polynomial::one(), 2).unwrap(),
            int(1)
        );
        assert_eq!(
            gamma_weight_integral(&Polynomial::from_ints(&[0, 1]), 3).unwrap(),
            int(6)
        );
        assert!(gamma_weight_integral(&Polynomial::one(), 0).is_err());
        for k in 0..=20 {
            let mono = Polynomial::monomial(int(1), k);
            assert_eq!(gamma_weight_integral(&mono, 1).unwrap(), factorial(k));
        }
    }

    fn small_rational() -> impl Strategy<Value = Rational> {
        (-30i64..30, 1i64..12).prop_map(|(p, q)| rat(p, q))
    }

    fn small_series(order: usize) -> impl Strategy<Value = TruncatedSeries> {
        prop::collection::vec(small_rational(), order + 1)
            .prop_map(move |c| TruncatedSeries::from_raw(order, c))
    }

    proptest! {
        #[test]
        fn field_inverse(a in small_rational(), b in small_rational()) {
            prop_assume!(!a.is_zero() && !b.is_zero());
            prop_assert_eq!((&a / &b) * (&b / &a), Rational::one());
        }

        #[test]
        fn reciprocal_is_inverse(mut a in small_series(6), c0 in 1i64..9) {
            a.coeffs[0] = int(c0);
            let prod = a.reciprocal().unwrap().mul(&a).unwrap();
            prop_assert_eq!(prod, TruncatedSeries::one(6));
        }

        #[test]
        fn exp_is_additive(mut a in small_series(5), mut b in small_series(5)) {
            a.coeffs[0] = Rational::zero();
            b.coeffs[0] = Rational::zero();
            let lhs = a.add(&b).unwrap().exp().unwrap();
            let rhs = a.exp().unwrap().mul(&b.exp().unwrap()).unwrap();
            prop_assert_eq!(lhs, rhs);
        }

        #[test]
        fn derivative_composes(c in prop::collection::vec(small_rational(), 0..9), r in 0usize..5, s in 0usize..5) {
            let p = Polynomial::new(c);
            prop_assert_eq!(p.derivative(r).derivative(s), p.derivative(r + s));
        }
    }
}
