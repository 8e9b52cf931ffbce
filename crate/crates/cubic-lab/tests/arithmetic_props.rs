use cubic_lab::eisenstein::{enumerate_by_norm, primary_associate, ClassFilter, EisInt};
use cubic_lab::factorization::{factor, is_prime_element};
use cubic_lab::gauss::{g3_direct, g3_fast, tau3};
use cubic_lab::symbol::{symbol, symbol_definition};
use num_complex::Complex64;
use proptest::prelude::*;

fn small_primes() -> Vec<EisInt> {
    enumerate_by_norm(200, ClassFilter::Primary).into_iter().filter(is_prime_element).collect()
}

fn primary(a: i64, b: i64) -> Option<EisInt> {
    let x = EisInt::new(a, b);
    if x.is_zero() || x.divisible_by_lambda() {
        return None;
    }
    Some(primary_associate(&x).unwrap().1)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    /// `τ₃(±λ^{3n−3}cd³) = 3^{(n+5)/2}·conj(g̃₃(c))·N(d)^{1/2}` for squarefree
    /// primary `c`, checked against directly summed Gauss sums.
    #[test]
    fn tau3_evaluation_on_cube_free_part(
        i in 0usize..40, j in 0usize..40, use_second in any::<bool>(),
        da in -4i64..=4, db in -4i64..=4, n in 1u32..=3, neg in any::<bool>(),
    ) {
        let primes = small_primes();
        let (p, q) = (primes[i % primes.len()], primes[j % primes.len()]);
        let c = if use_second && p != q { p * q } else { p };
        let d = primary(da, db).unwrap_or(EisInt::one());
        let sign = if neg { -EisInt::one() } else { EisInt::one() };
        let r = sign * EisInt::lambda().pow(3 * n - 3) * c * d * d * d;
        let gt = g3_direct(&EisInt::one(), &c).unwrap() / (c.norm() as f64).sqrt();
        let expected = gt.conj() * 3f64.powf((n as f64 + 5.0) / 2.0) * (d.norm() as f64).sqrt();
        let got = tau3(&r).unwrap();
        prop_assert!((got - expected).norm() <= 1e-8 * expected.norm().max(1.0), "{} {} {}", r, got, expected);
    }

    /// A square factor of exponent 2 mod 3 kills `τ₃`.
    #[test]
    fn tau3_vanishes_on_square_classes(i in 0usize..40, da in -3i64..=3, db in -3i64..=3) {
        let primes = small_primes();
        let p = primes[i % primes.len()];
        let d = primary(da, db).unwrap_or(EisInt::one());
        let r = p * p * d * d * d;
        prop_assert_eq!(tau3(&r).unwrap(), Complex64::new(0.0, 0.0));
    }

    /// Fast Gauss sums agree with the defining sum.
    #[test]
    fn fast_gauss_sum_matches_definition(ma in -20i64..=20, mb in -20i64..=20, ca in -25i64..=25, cb in -25i64..=25) {
        let mu = EisInt::new(ma, mb);
        prop_assume!(!mu.is_zero());
        let Some(c) = primary(ca, cb) else { return Ok(()); };
        prop_assume!(c.norm() <= 700);
        let fast = g3_fast(&mu, &c).unwrap();
        let direct = g3_direct(&mu, &c).unwrap();
        prop_assert!((fast - direct).norm() <= 1e-8 * (1.0 + direct.norm()), "{} {} {} {}", mu, c, fast, direct);
    }

    /// `(ab/c)₃ = (a/c)₃(b/c)₃` and the fast symbol matches Euler's criterion on primes.
    #[test]
    fn symbol_is_multiplicative(aa in -50i64..=50, ab in -50i64..=50, ba in -50i64..=50, bb in -50i64..=50, i in 0usize..40) {
        let primes = small_primes();
        let pi = primes[i % primes.len()];
        let (a, b) = (EisInt::new(aa, ab), EisInt::new(ba, bb));
        let lhs = symbol(&(a * b), &pi).unwrap();
        let rhs = symbol(&a, &pi).unwrap().to_complex() * symbol(&b, &pi).unwrap().to_complex();
        prop_assert!((lhs.to_complex() - rhs).norm() < 1e-12);
        prop_assert_eq!(symbol(&a, &pi).unwrap(), symbol_definition(&a, &pi).unwrap());
    }

    /// Factorizations multiply back to the input.
    #[test]
    fn factorization_round_trip(a in -3000i64..=3000, b in -3000i64..=3000) {
        let x = EisInt::new(a, b);
        prop_assume!(!x.is_zero());
        let f = factor(&x).unwrap();
        prop_assert_eq!(f.product(), x);
        prop_assert!(f.primes.iter().all(|(p, _)| p.is_primary() && is_prime_element(p)));
    }
}
