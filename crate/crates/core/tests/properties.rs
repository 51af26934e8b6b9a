use proptest::prelude::*;

use probfubini::combinatorics::CombCache;
use probfubini::degenerate::fubini_poly_degenerate;
use probfubini::exact::{int, rat, Rational};
use probfubini::probabilistic::{MomentProvider, ProbModel};

fn small_rational() -> impl Strategy<Value = Rational> {
    (-12i64..=12, 1i64..=6).prop_map(|(p, q)| rat(p, q))
}

/// Finite distributions on small integer atoms with positive rational weights.
fn discrete() -> impl Strategy<Value = MomentProvider> {
    prop::collection::vec((-3i64..=4, 1i64..=5), 1..=4).prop_map(|atoms| {
        let total: i64 = atoms.iter().map(|(_, w)| w).sum();
        MomentProvider::discrete(
            atoms
                .into_iter()
                .map(|(v, w)| (int(v), rat(w, total)))
                .collect(),
        )
        .unwrap()
    })
}

/// E[(S_k)_{n,λ}] by summing over every k-tuple of atoms.
fn brute_sum_moment(dist: &MomentProvider, k: usize, n: usize, lambda: &Rational) -> Rational {
    let MomentProvider::FiniteDiscrete(atoms) = dist else {
        unreachable!()
    };
    let mut total = Rational::default();
    let mut idx = vec![0usize; k];
    loop {
        let mut weight = int(1);
        let mut s = int(0);
        for &i in &idx {
            weight *= &atoms[i].1;
            s += &atoms[i].0;
        }
        let falling: Rational = (0..n).map(|j| &s - lambda * int(j as i64)).product();
        total += weight * falling;
        let mut pos = 0;
        loop {
            if pos == k {
                return total;
            }
            idx[pos] += 1;
            if idx[pos] < atoms.len() {
                break;
            }
            idx[pos] = 0;
            pos += 1;
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn sum_moments_match_enumeration(dist in discrete(), lambda in small_rational(), k in 0usize..=3, n in 0usize..=4) {
        let model = ProbModel::new(CombCache::global(), dist.clone(), lambda.clone());
        prop_assert_eq!(model.sum_degenerate_moment(k, n), brute_sum_moment(&dist, k, n, &lambda));
    }

    #[test]
    fn stirling_numbers_invert_sum_moments(dist in discrete(), lambda in small_rational(), n in 0usize..=5) {
        let model = ProbModel::new(CombCache::global(), dist, lambda);
        let cache = CombCache::global();
        for k in 0..=n + 1 {
            let rebuilt: Rational = (0..=k)
                .map(|j| cache.binomial(k as i64, j as i64) * cache.factorial(j) * model.stirling2(n, j))
                .sum();
            prop_assert_eq!(rebuilt, model.sum_degenerate_moment(k, n));
        }
        prop_assert_eq!(model.stirling2(n, n + 1), int(0));
    }

    #[test]
    fn order_one_is_the_plain_polynomial(dist in discrete(), lambda in small_rational(), n in 0usize..=6) {
        let model = ProbModel::new(CombCache::global(), dist, lambda);
        prop_assert_eq!(model.fubini_poly_order(n, 1).unwrap(), model.fubini_poly(n));
    }

    #[test]
    fn unit_point_mass_reduces_to_degenerate_fubini(lambda in small_rational(), n in 0usize..=8) {
        let model = ProbModel::new(CombCache::global(), MomentProvider::point(int(1)), lambda.clone());
        prop_assert_eq!(model.fubini_poly(n), fubini_poly_degenerate(&CombCache::global(), n, &lambda));
    }

    #[test]
    fn leading_coefficient_is_scaled_factorial(dist in discrete(), lambda in small_rational(), n in 1usize..=6) {
        // {n n}_{Y,λ} = E[Y]^n, so the top coefficient is n! E[Y]^n
        let model = ProbModel::new(CombCache::global(), dist.clone(), lambda);
        let mean = dist.raw_moment(1);
        let expected = CombCache::global().factorial(n) * mean.pow(n as i32);
        prop_assert_eq!(model.fubini_poly(n).coeff(n), expected);
    }
}
