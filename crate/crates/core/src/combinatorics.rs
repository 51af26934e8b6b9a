//! Classical and degenerate combinatorial numbers.
//!
//! [`CombCache`] memoizes factorials, binomials, signed Stirling numbers of the
//! first kind and Stirling numbers of the second kind. Tables grow on demand
//! behind a lock and are never rewritten, so lookups behave as pure functions.
//! A cache can carry [`TablePerturbation`]s, which shift single entries by one
//! on read; the identity suite uses them for fault injection.

use std::sync::{Arc, RwLock};

use num_bigint::BigInt;
use num_traits::{One, Zero};
use once_cell::sync::Lazy;

use crate::error::{Error, Result};
use crate::exact::{factorial, int, Polynomial, Rational};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Table {
    Factorial,
    Binomial,
    Stirling1,
    Stirling2,
    Lah,
}

/// Adds one to the entry `(n, k)` of `table` whenever it is read.
/// For [`Table::Factorial`] the `k` index is ignored.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct TablePerturbation {
    pub table: Table,
    pub n: usize,
    pub k: usize,
}

#[derive(Default)]
struct Tables {
    fact: Vec<BigInt>,
    binom: Vec<Vec<BigInt>>,
    s1: Vec<Vec<BigInt>>,
    s2: Vec<Vec<BigInt>>,
}

impl Tables {
    fn rows(&self) -> usize {
        self.fact.len()
    }

    fn build(rows: usize) -> Tables {
        let mut t = Tables::default();
        let mut f = BigInt::one();
        for n in 0..rows {
            if n > 0 {
                f *= BigInt::from(n);
            }
            t.fact.push(f.clone());
        }
        for n in 0..rows {
            let mut b = vec![BigInt::zero(); n + 1];
            let mut s1 = vec![BigInt::zero(); n + 1];
            let mut s2 = vec![BigInt::zero(); n + 1];
            b[0] = BigInt::one();
            b[n] = BigInt::one();
            if n == 0 {
                s1[0] = BigInt::one();
                s2[0] = BigInt::one();
            } else {
                let (pb, ps1, ps2) = (&t.binom[n - 1], &t.s1[n - 1], &t.s2[n - 1]);
                for k in 1..n {
                    b[k] = &pb[k - 1] + &pb[k];
                }
                for k in 1..=n {
                    let prev1 = if k < n {
                        ps1[k].clone()
                    } else {
                        BigInt::zero()
                    };
                    let prev2 = if k < n {
                        ps2[k].clone()
                    } else {
                        BigInt::zero()
                    };
                    // S1(n,k) = S1(n-1,k-1) - (n-1) S1(n-1,k)
                    s1[k] = &ps1[k - 1] - BigInt::from(n - 1) * prev1;
                    // S2(n,k) = S2(n-1,k-1) + k S2(n-1,k)
                    s2[k] = &ps2[k - 1] + BigInt::from(k) * prev2;
                }
            }
            t.binom.push(b);
            t.s1.push(s1);
            t.s2.push(s2);
        }
        t
    }
}

/// Memo tables for the classical combinatorial numbers.
pub struct CombCache {
    tables: RwLock<Tables>,
    perturbations: Vec<TablePerturbation>,
}

static GLOBAL: Lazy<Arc<CombCache>> = Lazy::new(|| Arc::new(CombCache::new()));

impl Default for CombCache {
    fn default() -> Self {
        Self::new()
    }
}

impl CombCache {
    pub fn new() -> Self {
        Self::with_perturbations(Vec::new())
    }

    pub fn with_perturbations(perturbations: Vec<TablePerturbation>) -> Self {
        CombCache {
            tables: RwLock::new(Tables::build(16)),
            perturbations,
        }
    }

    /// Shared unperturbed cache.
    pub fn global() -> Arc<CombCache> {
        Arc::clone(&GLOBAL)
    }

    pub fn perturbations(&self) -> &[TablePerturbation] {
        &self.perturbations
    }

    /// Largest `n` with all rows currently materialized.
    pub fn max_cached_n(&self) -> usize {
        self.tables.read().expect("table lock").rows() - 1
    }

    fn lookup(&self, table: Table, n: usize, k: usize) -> Rational {
        {
            let guard = self.tables.read().expect("table lock");
            if n >= guard.rows() {
                drop(guard);
                let mut guard = self.tables.write().expect("table lock");
                if n >= guard.rows() {
                    *guard = Tables::build((n + 1).max(2 * guard.rows()));
                }
            }
        }
        let guard = self.tables.read().expect("table lock");
        let raw = match table {
            Table::Factorial => guard.fact[n].clone(),
            Table::Binomial => guard.binom[n][k].clone(),
            Table::Stirling1 => guard.s1[n][k].clone(),
            Table::Stirling2 => guard.s2[n][k].clone(),
            Table::Lah => {
                // n!/k! C(n-1, k-1), for 1 <= k <= n
                &guard.fact[n] / &guard.fact[k] * &guard.binom[n - 1][k - 1]
            }
        };
        drop(guard);
        self.bumped(table, n, k, Rational::from_integer(raw))
    }

    fn bumped(&self, table: Table, n: usize, k: usize, value: Rational) -> Rational {
        let hits = self
            .perturbations
            .iter()
            .filter(|p| p.table == table && p.n == n && (table == Table::Factorial || p.k == k))
            .count();
        if hits == 0 {
            value
        } else {
            value + int(hits as i64)
        }
    }

    pub fn factorial(&self, n: usize) -> Rational {
        self.lookup(Table::Factorial, n, 0)
    }

    /// `C(n, k)`; zero for `k < 0` or `k > n >= 0`. Negative `n` uses the
    /// generalized falling-product definition `n (n-1) ... (n-k+1) / k!`.
    pub fn binomial(&self, n: i64, k: i64) -> Rational {
        if k < 0 {
            return Rational::zero();
        }
        if n >= 0 {
            if k > n {
                return Rational::zero();
            }
            return self.lookup(Table::Binomial, n as usize, k as usize);
        }
        let num: BigInt = (0..k).map(|i| BigInt::from(n - i)).product();
        Rational::new(num, crate::exact::factorial_int(k as usize))
    }

    /// Signed Stirling number of the first kind.
    pub fn stirling1(&self, n: usize, k: usize) -> Rational {
        if k > n {
            return Rational::zero();
        }
        self.lookup(Table::Stirling1, n, k)
    }

    /// Stirling number of the second kind.
    pub fn stirling2_classical(&self, n: usize, k: usize) -> Rational {
        if k > n {
            return Rational::zero();
        }
        self.lookup(Table::Stirling2, n, k)
    }

    /// Lah number. `L(0,0) = 1`, and `L(n,0) = 0` for `n >= 1`.
    pub fn lah(&self, n: usize, k: usize) -> Rational {
        if k > n {
            return Rational::zero();
        }
        if k == 0 {
            let base = if n == 0 {
                Rational::one()
            } else {
                Rational::zero()
            };
            return self.bumped(Table::Lah, n, k, base);
        }
        self.lookup(Table::Lah, n, k)
    }

    /// Degenerate Stirling number of the second kind, through the basis change
    /// `(x)_{n,λ} -> x^m -> (x)_k`: `sum_m λ^(n-m) S1(n,m) S2(m,k)`.
    pub fn stirling2_degenerate(&self, n: usize, k: usize, lambda: &Rational) -> Rational {
        if k > n {
            return Rational::zero();
        }
        let mut acc = Rational::zero();
        let mut lambda_pow = Rational::one();
        for m in (k..=n).rev() {
            let s1 = self.stirling1(n, m);
            if !s1.is_zero() {
                acc += &lambda_pow * s1 * self.stirling2_classical(m, k);
            }
            lambda_pow *= lambda;
        }
        acc
    }
}

pub fn binomial(n: i64, k: i64) -> Rational {
    GLOBAL.binomial(n, k)
}

pub fn stirling1(n: usize, k: usize) -> Rational {
    GLOBAL.stirling1(n, k)
}

pub fn stirling2_classical(n: usize, k: usize) -> Rational {
    GLOBAL.stirling2_classical(n, k)
}

pub fn lah(n: usize, k: usize) -> Rational {
    GLOBAL.lah(n, k)
}

pub fn stirling2_degenerate(n: usize, k: usize, lambda: &Rational) -> Rational {
    GLOBAL.stirling2_degenerate(n, k, lambda)
}

/// `x (x - λ) ... (x - (n-1)λ)` evaluated at `x`.
pub fn degenerate_falling(x: &Rational, n: usize, lambda: &Rational) -> Rational {
    (0..n).fold(Rational::one(), |acc, i| acc * (x - lambda * int(i as i64)))
}

/// Falling factorial `(x)_n`.
pub fn falling_factorial(x: &Rational, n: usize) -> Rational {
    degenerate_falling(x, n, &Rational::one())
}

/// Rising factorial `<x>_n = x (x+1) ... (x+n-1)`.
pub fn rising_factorial(x: &Rational, n: usize) -> Rational {
    degenerate_falling(x, n, &int(-1))
}

/// `(y)_{n,λ}` expanded in powers of `y`, by multiplying out the linear factors.
pub fn falling_factorial_coeffs(n: usize, lambda: &Rational) -> Polynomial {
    let mut coeffs = vec![Rational::one()];
    for i in 0..n {
        let root = lambda * int(i as i64);
        // multiply by (y - root)
        let mut next = vec![Rational::zero(); coeffs.len() + 1];
        for (j, c) in coeffs.iter().enumerate() {
            next[j + 1] += c;
            next[j] -= c * &root;
        }
        coeffs = next;
    }
    Polynomial::new(coeffs)
}

/// Partial Bell polynomial `B_{n,k}(x_1, ..., x_{n-k+1})` by direct
/// enumeration of the multiplicities `l_1 + ... = k`, `1 l_1 + 2 l_2 + ... = n`.
///
/// `B_{0,0} = 1` and `B_{n,k} = 0` for `k > n`; `args` must hold at least
/// `n - k + 1` entries whenever `k >= 1`.
pub fn partial_bell(n: usize, k: usize, args: &[Rational]) -> Result<Rational> {
    if k > n {
        return Ok(Rational::zero());
    }
    if k == 0 {
        return Ok(if n == 0 {
            Rational::one()
        } else {
            Rational::zero()
        });
    }
    let width = n - k + 1;
    if args.len() < width {
        return Err(Error::InsufficientArguments {
            n,
            k,
            needed: width,
            got: args.len(),
        });
    }
    // scaled[i] = x_{i+1} / (i+1)!
    let scaled: Vec<Rational> = (0..width).map(|i| &args[i] / factorial(i + 1)).collect();
    let mut total = Rational::zero();
    enumerate_parts(width, k, n, &scaled, Rational::one(), &mut total);
    Ok(total * factorial(n))
}

/// Sums `prod (scaled_i^l_i / l_i!)` over multiplicities of part sizes
/// `1..=size` using `parts` parts of total `weight`.
fn enumerate_parts(
    size: usize,
    parts: usize,
    weight: usize,
    scaled: &[Rational],
    acc: Rational,
    total: &mut Rational,
) {
    if parts == 0 {
        if weight == 0 {
            *total += acc;
        }
        return;
    }
    if size == 0 || weight < parts || weight > parts * size {
        return;
    }
    // choose multiplicity l of the largest part size, then recurse on smaller sizes
    let mut term = acc;
    let max_l = parts.min(weight / size);
    for l in 0..=max_l {
        if l > 0 {
            term = term * &scaled[size - 1] / int(l as i64);
        }
        enumerate_parts(
            size - 1,
            parts - l,
            weight - l * size,
            scaled,
            term.clone(),
            total,
        );
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::{rat, TruncatedSeries};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    /// Count set partitions of {0..n} into exactly k blocks by assigning
    /// each element a block label in restricted-growth form.
    fn brute_set_partitions(n: usize, k: usize) -> i64 {
        fn go(i: usize, n: usize, used: usize, k: usize) -> i64 {
            if i == n {
                return (used == k) as i64;
            }
            let mut c = 0;
            for b in 0..=used {
                if b < k {
                    c += go(i + 1, n, used.max(b + 1), k);
                }
            }
            c
        }
        go(0, n, 0, k)
    }

    fn lambda_grid() -> Vec<Rational> {
        vec![
            int(0),
            rat(1, 3),
            rat(1, 2),
            int(1),
            rat(-1, 4),
            rat(7, 5),
            int(-3),
        ]
    }

    #[test]
    fn binomial_examples() {
        assert_eq!(binomial(4, 2), int(6));
        assert_eq!(binomial(-3, 2), int(6));
        assert_eq!(binomial(3, 5), int(0));
        assert_eq!(binomial(-3, -1), int(0));
        // C(-r, i)(-1)^i = C(r+i-1, i)
        for r in 1..5i64 {
            for i in 0..6i64 {
                let sign = if i % 2 == 0 { int(1) } else { int(-1) };
                assert_eq!(binomial(-r, i) * sign, binomial(r + i - 1, i));
            }
        }
    }

    #[test]
    fn stirling1_examples() {
        assert_eq!(stirling1(3, 1), int(2));
        assert_eq!(stirling1(3, 2), int(-3));
        assert_eq!(stirling1(3, 3), int(1));
        assert_eq!(stirling1(4, 2), int(11));
        assert_eq!(stirling1(5, 0), int(0));
        assert_eq!(stirling1(0, 0), int(1));
    }

    #[test]
    fn stirling1_matches_product_expansion() {
        for n in 0..=10 {
            let p = falling_factorial_coeffs(n, &int(1));
            for k in 0..=n {
                assert_eq!(p.coeff(k), stirling1(n, k), "S1({n},{k})");
            }
        }
    }

    #[test]
    fn lah_examples() {
        assert_eq!(lah(3, 2), int(6));
        assert_eq!(lah(4, 2), int(36));
        assert_eq!(lah(0, 0), int(1));
        assert_eq!(lah(3, 0), int(0));
        for n in 0..=10 {
            assert_eq!(lah(n, n), int(1));
        }
    }

    #[test]
    fn stirling2_examples_match_brute_force() {
        assert_eq!(stirling2_classical(3, 2), int(3));
        assert_eq!(stirling2_classical(4, 2), int(7));
        for n in 0..=8 {
            for k in 0..=n {
                assert_eq!(stirling2_classical(n, k), int(brute_set_partitions(n, k)));
            }
        }
        for n in 1..6 {
            assert_eq!(stirling2_classical(n, 0), int(0));
        }
    }

    #[test]
    fn falling_factorial_examples() {
        assert_eq!(falling_factorial_coeffs(0, &rat(1, 2)), Polynomial::one());
        let p = falling_factorial_coeffs(3, &rat(1, 2));
        assert_eq!(p.coeffs(), &[int(0), rat(1, 2), rat(-3, 2), int(1)]);
        assert_eq!(
            falling_factorial_coeffs(2, &int(0)),
            Polynomial::monomial(int(1), 2)
        );
    }

    #[test]
    fn falling_factorial_coeffs_cross_check_with_stirling1() {
        for lambda in lambda_grid() {
            for n in 0..=10 {
                let p = falling_factorial_coeffs(n, &lambda);
                for k in 0..=n {
                    let expected = lambda.pow((n - k) as i32) * stirling1(n, k);
                    assert_eq!(p.coeff(k), expected);
                }
            }
        }
    }

    #[test]
    fn degenerate_stirling_examples() {
        assert_eq!(stirling2_degenerate(2, 1, &rat(1, 2)), rat(1, 2));
        assert_eq!(stirling2_degenerate(3, 2, &rat(1, 3)), int(2));
        for lambda in lambda_grid() {
            for n in 0..=10 {
                assert_eq!(stirling2_degenerate(n, n, &lambda), int(1));
                assert_eq!(stirling2_degenerate(n, n + 2, &lambda), int(0));
            }
        }
    }

    #[test]
    fn degenerate_stirling_at_zero_is_classical() {
        for n in 0..=10 {
            for k in 0..=10 {
                assert_eq!(
                    stirling2_degenerate(n, k, &int(0)),
                    stirling2_classical(n, k)
                );
            }
        }
    }

    #[test]
    fn degenerate_falling_expands_in_falling_factorials() {
        for lambda in lambda_grid() {
            for n in 0..=10usize {
                for x in 0..=n as i64 {
                    let x = int(x);
                    let lhs = falling_factorial_coeffs(n, &lambda).eval(&x);
                    let rhs: Rational = (0..=n)
                        .map(|k| stirling2_degenerate(n, k, &lambda) * falling_factorial(&x, k))
                        .sum();
                    assert_eq!(lhs, rhs);
                }
            }
        }
    }

    #[test]
    fn rising_factorial_expands_with_lah() {
        for n in 0..=10usize {
            for x in 0..=n as i64 {
                let x = int(x);
                let rhs: Rational = (0..=n).map(|k| lah(n, k) * falling_factorial(&x, k)).sum();
                assert_eq!(rising_factorial(&x, n), rhs);
            }
        }
    }

    #[test]
    fn falling_factorial_expands_with_stirling1() {
        for n in 0..=10usize {
            for x in 0..=n as i64 {
                let x = int(x);
                let rhs: Rational = (0..=n).map(|k| stirling1(n, k) * x.pow(k as i32)).sum();
                assert_eq!(falling_factorial(&x, n), rhs);
            }
        }
    }

    #[test]
    fn partial_bell_examples() {
        assert_eq!(partial_bell(3, 2, &[int(1), int(1)]).unwrap(), int(3));
        assert_eq!(partial_bell(0, 0, &[]).unwrap(), int(1));
        let xs: Vec<Rational> = (1..=6).map(|i| rat(i, i + 2)).collect();
        for n in 1..=6 {
            assert_eq!(partial_bell(n, 1, &xs[..n]).unwrap(), xs[n - 1]);
            assert_eq!(partial_bell(n, n, &xs[..1]).unwrap(), xs[0].pow(n as i32));
        }
        assert!(matches!(
            partial_bell(5, 2, &xs[..2]),
            Err(Error::InsufficientArguments {
                needed: 4,
                got: 2,
                ..
            })
        ));
    }

    #[test]
    fn partial_bell_counts_set_partitions() {
        let ones = vec![int(1); 12];
        for n in 0..=8 {
            for k in 0..=n {
                assert_eq!(
                    partial_bell(n, k, &ones).unwrap(),
                    stirling2_classical(n, k)
                );
            }
        }
    }

    #[test]
    fn partial_bell_matches_series_power() {
        let mut rng = ChaCha8Rng::seed_from_u64(15);
        let order = 10;
        for _ in 0..4 {
            let xs: Vec<Rational> = (0..order)
                .map(|_| rat(rng.gen_range(-9..=9), rng.gen_range(1..=7)))
                .collect();
            let mut egf = vec![int(0)];
            egf.extend(xs.iter().cloned());
            let base = TruncatedSeries::from_egf(order, egf);
            for k in 0..=5 {
                let series = base.pow(k).scale(&factorial(k).recip());
                for n in k..=order {
                    assert_eq!(series.egf_coeff(n), partial_bell(n, k, &xs).unwrap());
                }
            }
        }
    }

    #[test]
    fn perturbation_shifts_single_entry() {
        let cache = CombCache::with_perturbations(vec![TablePerturbation {
            table: Table::Stirling2,
            n: 4,
            k: 2,
        }]);
        assert_eq!(cache.stirling2_classical(4, 2), int(8));
        assert_eq!(cache.stirling2_classical(4, 3), int(6));
        assert_eq!(cache.stirling2_classical(5, 2), int(15));
    }

    #[test]
    fn cache_grows_and_stays_stable() {
        let cache = CombCache::new();
        let before = cache.stirling1(10, 4);
        assert_eq!(
            cache.binomial(40, 20),
            Rational::from_integer(BigInt::from(137846528820u64))
        );
        assert!(cache.max_cached_n() >= 40);
        assert_eq!(cache.stirling1(10, 4), before);
        assert_eq!(cache.factorial(20), factorial(20));
    }
}
