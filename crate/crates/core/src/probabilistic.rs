//! Random variables with exact moments and the probabilistic degenerate
//! Stirling, Bell and Fubini families built from iid partial sums.
//!
//! A [`MomentProvider`] supplies the raw moments `E[Y^m]`. A [`ProbModel`]
//! fixes `Y` and `λ` and memoizes the moment tables of the partial sums
//! `S_k = Y_1 + ... + Y_k`, from which the probabilistic Stirling numbers are
//! taken by the alternating binomial sum over `E[(S_j)_{n,λ}]`.

use std::cell::RefCell;
use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use num_traits::{One, Signed, Zero};

use crate::combinatorics::{falling_factorial_coeffs, rising_factorial, CombCache};
use crate::error::{Error, Result};
use crate::exact::{
    binomial_nat, format_rational, parse_rational, Polynomial, Rational, TruncatedSeries,
};

/// A random variable described by its exact raw moments.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum MomentProvider {
    PointMass(Rational),
    Bernoulli(Rational),
    Poisson(Rational),
    Gamma { shape: Rational, rate: Rational },
    FiniteDiscrete(Vec<(Rational, Rational)>),
}

impl MomentProvider {
    pub fn point(c: Rational) -> Self {
        MomentProvider::PointMass(c)
    }

    pub fn bernoulli(p: Rational) -> Result<Self> {
        if p.is_negative() || p > Rational::one() {
            return Err(invalid(format!(
                "bernoulli p must lie in [0, 1], got {}",
                format_rational(&p)
            )));
        }
        Ok(MomentProvider::Bernoulli(p))
    }

    pub fn poisson(alpha: Rational) -> Result<Self> {
        if !alpha.is_positive() {
            return Err(invalid(format!(
                "poisson rate must be > 0, got {}",
                format_rational(&alpha)
            )));
        }
        Ok(MomentProvider::Poisson(alpha))
    }

    pub fn gamma(shape: Rational, rate: Rational) -> Result<Self> {
        if !shape.is_positive() || !rate.is_positive() {
            return Err(invalid(format!(
                "gamma parameters must be > 0, got {},{}",
                format_rational(&shape),
                format_rational(&rate)
            )));
        }
        Ok(MomentProvider::Gamma { shape, rate })
    }

    pub fn discrete(atoms: Vec<(Rational, Rational)>) -> Result<Self> {
        if atoms.is_empty() {
            return Err(invalid(
                "discrete distribution needs at least one atom".into(),
            ));
        }
        if let Some((_, w)) = atoms.iter().find(|(_, w)| !w.is_positive()) {
            return Err(invalid(format!(
                "discrete weights must be > 0, got {}",
                format_rational(w)
            )));
        }
        let total: Rational = atoms.iter().map(|(_, w)| w.clone()).sum();
        if !total.is_one() {
            return Err(invalid(format!(
                "discrete weights sum to {}, not 1",
                format_rational(&total)
            )));
        }
        Ok(MomentProvider::FiniteDiscrete(atoms))
    }

    /// `E[Y^m]`.
    pub fn raw_moment(&self, m: usize) -> Rational {
        self.raw_moments(m).pop().expect("nonempty")
    }

    /// `E[Y^0], ..., E[Y^upto]`.
    pub fn raw_moments(&self, upto: usize) -> Vec<Rational> {
        match self {
            MomentProvider::PointMass(c) => {
                let mut out = Vec::with_capacity(upto + 1);
                let mut pow = Rational::one();
                for _ in 0..=upto {
                    out.push(pow.clone());
                    pow *= c;
                }
                out
            }
            MomentProvider::Bernoulli(p) => {
                let mut out = vec![p.clone(); upto + 1];
                out[0] = Rational::one();
                out
            }
            MomentProvider::Poisson(alpha) => {
                // E[Y^{m+1}] = α sum_j C(m, j) E[Y^j]
                let mut out = vec![Rational::one()];
                for m in 0..upto {
                    let acc: Rational = (0..=m).map(|j| binomial_nat(m, j) * &out[j]).sum();
                    out.push(acc * alpha);
                }
                out
            }
            MomentProvider::Gamma { shape, rate } => (0..=upto)
                .map(|m| rising_factorial(shape, m) / rate.pow(m as i32))
                .collect(),
            MomentProvider::FiniteDiscrete(atoms) => (0..=upto)
                .map(|m| atoms.iter().map(|(v, w)| w * v.pow(m as i32)).sum())
                .collect(),
        }
    }

    /// True for the degenerate variable `Y = 1`.
    pub fn is_unit_point(&self) -> bool {
        matches!(self, MomentProvider::PointMass(c) if c.is_one())
    }
}

fn invalid(msg: String) -> Error {
    Error::InvalidParameter(msg)
}

impl fmt::Display for MomentProvider {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            MomentProvider::PointMass(c) => write!(f, "point:{}", format_rational(c)),
            MomentProvider::Bernoulli(p) => write!(f, "bernoulli:{}", format_rational(p)),
            MomentProvider::Poisson(a) => write!(f, "poisson:{}", format_rational(a)),
            MomentProvider::Gamma { shape, rate } => {
                write!(
                    f,
                    "gamma:{},{}",
                    format_rational(shape),
                    format_rational(rate)
                )
            }
            MomentProvider::FiniteDiscrete(atoms) => {
                let parts: Vec<String> = atoms
                    .iter()
                    .map(|(v, w)| format!("{}={}", format_rational(v), format_rational(w)))
                    .collect();
                write!(f, "discrete:{}", parts.join(","))
            }
        }
    }
}

impl FromStr for MomentProvider {
    type Err = Error;

    /// `point:c`, `bernoulli:p`, `poisson:a`, `gamma:a,b`, `discrete:v1=w1,v2=w2,...`
    fn from_str(spec: &str) -> Result<Self> {
        let spec = spec.trim();
        let (kind, args) = spec.split_once(':').ok_or_else(|| Error::Parse {
            token: spec.to_string(),
            reason: "expected <kind>:<parameters>".into(),
        })?;
        let arity = |n: usize| -> Result<Vec<Rational>> {
            let parts: Vec<&str> = args.split(',').collect();
            if parts.len() != n {
                return Err(Error::Parse {
                    token: args.to_string(),
                    reason: format!("{kind} takes {n} parameter(s)"),
                });
            }
            parts.into_iter().map(parse_rational).collect()
        };
        match kind {
            "point" => Ok(MomentProvider::point(arity(1)?.remove(0))),
            "bernoulli" => MomentProvider::bernoulli(arity(1)?.remove(0)),
            "poisson" => MomentProvider::poisson(arity(1)?.remove(0)),
            "gamma" => {
                let mut v = arity(2)?;
                let rate = v.pop().expect("two values");
                MomentProvider::gamma(v.pop().expect("two values"), rate)
            }
            "discrete" => {
                let atoms = args
                    .split(',')
                    .map(|atom| {
                        let (v, w) = atom.split_once('=').ok_or_else(|| Error::Parse {
                            token: atom.to_string(),
                            reason: "expected value=weight".into(),
                        })?;
                        Ok((parse_rational(v)?, parse_rational(w)?))
                    })
                    .collect::<Result<Vec<_>>>()?;
                MomentProvider::discrete(atoms)
            }
            other => Err(Error::Parse {
                token: other.to_string(),
                reason: "unknown distribution kind (point, bernoulli, poisson, gamma, discrete)"
                    .into(),
            }),
        }
    }
}

#[derive(Default)]
struct State {
    raw: Vec<Rational>,
    // sums[k][m] = E[S_k^m]
    sums: Vec<Vec<Rational>>,
    falling: Vec<Polynomial>,
    sum_falling: HashMap<(usize, usize), Rational>,
    stirling: HashMap<(usize, usize), Rational>,
}

/// `Y` and `λ` fixed, with memoized moment tables for the partial sums.
///
/// Not `Sync`: each thread builds its own model.
pub struct ProbModel {
    cache: Arc<CombCache>,
    dist: MomentProvider,
    lambda: Rational,
    bumped_moment: Option<usize>,
    state: RefCell<State>,
}

impl ProbModel {
    pub fn new(cache: Arc<CombCache>, dist: MomentProvider, lambda: Rational) -> Self {
        ProbModel {
            cache,
            dist,
            lambda,
            bumped_moment: None,
            state: RefCell::new(State::default()),
        }
    }

    /// Fault injection: `E[Y^m]` reads as one larger than its true value.
    pub fn with_bumped_moment(mut self, m: usize) -> Self {
        self.bumped_moment = Some(m);
        self.state = RefCell::new(State::default());
        self
    }

    pub fn dist(&self) -> &MomentProvider {
        &self.dist
    }

    pub fn lambda(&self) -> &Rational {
        &self.lambda
    }

    pub fn cache(&self) -> &CombCache {
        &self.cache
    }

    pub fn raw_moment(&self, m: usize) -> Rational {
        let mut st = self.state.borrow_mut();
        if st.raw.len() <= m {
            let upto = m.max(2 * st.raw.len()).max(8);
            let mut raw = self.dist.raw_moments(upto);
            if let Some(b) = self.bumped_moment {
                if b <= upto {
                    raw[b] += Rational::one();
                }
            }
            st.raw = raw;
        }
        st.raw[m].clone()
    }

    fn falling(&self, n: usize) -> Polynomial {
        let mut st = self.state.borrow_mut();
        while st.falling.len() <= n {
            let next = falling_factorial_coeffs(st.falling.len(), &self.lambda);
            st.falling.push(next);
        }
        st.falling[n].clone()
    }

    /// `E[(Y)_{n,λ}]`.
    pub fn degenerate_moment(&self, n: usize) -> Rational {
        let coeffs = self.falling(n);
        coeffs
            .coeffs()
            .iter()
            .enumerate()
            .map(|(k, c)| c * self.raw_moment(k))
            .sum()
    }

    /// `E[S_k^m]` by the binomial convolution `E[S_k^m] = sum_j C(m,j) E[S_{k-1}^{m-j}] E[Y^j]`.
    pub fn sum_raw_moment(&self, k: usize, m: usize) -> Rational {
        {
            let st = self.state.borrow();
            if let Some(v) = st.sums.get(k).and_then(|row| row.get(m)) {
                return v.clone();
            }
        }
        let cols = {
            let st = self.state.borrow();
            let have = st.sums.first().map_or(0, Vec::len);
            if m < have {
                have
            } else {
                (m + 1).max(2 * have)
            }
        };
        let raw: Vec<Rational> = (0..cols).map(|j| self.raw_moment(j)).collect();
        let mut st = self.state.borrow_mut();
        if st.sums.first().map_or(0, Vec::len) != cols {
            let mut base = vec![Rational::zero(); cols];
            base[0] = Rational::one();
            st.sums = vec![base];
        }
        while st.sums.len() <= k {
            let prev = st.sums.last().expect("row 0 present");
            let next: Vec<Rational> = (0..cols)
                .map(|mm| {
                    (0..=mm)
                        .map(|j| self.cache.binomial(mm as i64, j as i64) * &prev[mm - j] * &raw[j])
                        .sum()
                })
                .collect();
            st.sums.push(next);
        }
        st.sums[k][m].clone()
    }

    /// `E[(S_k)_{n,λ}]`.
    pub fn sum_degenerate_moment(&self, k: usize, n: usize) -> Rational {
        if let Some(v) = self.state.borrow().sum_falling.get(&(k, n)) {
            return v.clone();
        }
        let coeffs = self.falling(n);
        let value: Rational = coeffs
            .coeffs()
            .iter()
            .enumerate()
            .map(|(m, c)| c * self.sum_raw_moment(k, m))
            .sum();
        self.state
            .borrow_mut()
            .sum_falling
            .insert((k, n), value.clone());
        value
    }

    /// `{n k}_{Y,λ} = (1/k!) sum_j C(k,j) (-1)^(k-j) E[(S_j)_{n,λ}]`, zero for `k > n`.
    pub fn stirling2(&self, n: usize, k: usize) -> Rational {
        if k > n {
            return Rational::zero();
        }
        if let Some(v) = self.state.borrow().stirling.get(&(n, k)) {
            return v.clone();
        }
        let mut acc = Rational::zero();
        for j in 0..=k {
            let term = self.cache.binomial(k as i64, j as i64) * self.sum_degenerate_moment(j, n);
            if (k - j).is_multiple_of(2) {
                acc += term;
            } else {
                acc -= term;
            }
        }
        let value = acc / self.cache.factorial(k);
        self.state
            .borrow_mut()
            .stirling
            .insert((n, k), value.clone());
        value
    }

    /// `φ^Y_{n,λ}(x) = sum_k {n k}_{Y,λ} x^k`.
    pub fn bell_poly(&self, n: usize) -> Polynomial {
        Polynomial::new((0..=n).map(|k| self.stirling2(n, k)).collect())
    }

    /// `F^Y_{n,λ}(x) = sum_k {n k}_{Y,λ} k! x^k`.
    pub fn fubini_poly(&self, n: usize) -> Polynomial {
        Polynomial::new(
            (0..=n)
                .map(|k| self.stirling2(n, k) * self.cache.factorial(k))
                .collect(),
        )
    }

    /// `F^{(r,Y)}_{n,λ}(x) = sum_i C(r+i-1, i) i! {n i}_{Y,λ} x^i`.
    pub fn fubini_poly_order(&self, n: usize, r: usize) -> Result<Polynomial> {
        if r < 1 {
            return Err(Error::InvalidOrder(r));
        }
        Ok(Polynomial::new(
            (0..=n)
                .map(|i| {
                    self.cache.binomial((r + i - 1) as i64, i as i64)
                        * self.cache.factorial(i)
                        * self.stirling2(n, i)
                })
                .collect(),
        ))
    }

    /// `E[e_λ^Y(t)]` truncated at `t^order`.
    pub fn mgf_series(&self, order: usize) -> TruncatedSeries {
        TruncatedSeries::from_egf(
            order,
            (0..=order).map(|n| self.degenerate_moment(n)).collect(),
        )
    }
}

fn model(dist: &MomentProvider, lambda: &Rational) -> ProbModel {
    ProbModel::new(CombCache::global(), dist.clone(), lambda.clone())
}

pub fn raw_moment(dist: &MomentProvider, m: usize) -> Rational {
    dist.raw_moment(m)
}

pub fn degenerate_moment(dist: &MomentProvider, n: usize, lambda: &Rational) -> Rational {
    model(dist, lambda).degenerate_moment(n)
}

pub fn sum_raw_moment(dist: &MomentProvider, k: usize, m: usize) -> Rational {
    model(dist, &Rational::zero()).sum_raw_moment(k, m)
}

pub fn sum_degenerate_moment(
    dist: &MomentProvider,
    k: usize,
    n: usize,
    lambda: &Rational,
) -> Rational {
    model(dist, lambda).sum_degenerate_moment(k, n)
}

pub fn prob_stirling2(dist: &MomentProvider, n: usize, k: usize, lambda: &Rational) -> Rational {
    model(dist, lambda).stirling2(n, k)
}

pub fn prob_bell_poly(dist: &MomentProvider, n: usize, lambda: &Rational) -> Polynomial {
    model(dist, lambda).bell_poly(n)
}

pub fn prob_fubini_poly(dist: &MomentProvider, n: usize, lambda: &Rational) -> Polynomial {
    model(dist, lambda).fubini_poly(n)
}

pub fn prob_fubini_poly_order(
    dist: &MomentProvider,
    n: usize,
    r: usize,
    lambda: &Rational,
) -> Result<Polynomial> {
    model(dist, lambda).fubini_poly_order(n, r)
}

pub fn mgf_degenerate_series(
    dist: &MomentProvider,
    lambda: &Rational,
    order: usize,
) -> TruncatedSeries {
    model(dist, lambda).mgf_series(order)
}
