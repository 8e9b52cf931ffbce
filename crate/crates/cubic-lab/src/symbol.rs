//! The cubic residue symbol `(a/b)₃` for primary moduli `b ≡ 1 (mod 3)`.
//!
//! Two independent evaluations are provided:
//!
//! * [`symbol_definition`] — Euler's criterion `a^{(N(π)−1)/3} mod π` for a
//!   primary prime `π`, extended multiplicatively by [`symbol_by_factoring`];
//! * [`symbol`] — a factorization-free Euclidean algorithm that mirrors the
//!   binary Jacobi-symbol loop: reduce `a mod b`, strip units and powers of `λ`
//!   with the supplementary laws, then swap by cubic reciprocity.
//!
//! Values are kept exact as exponents `k` of `ω^k`; complex numbers only
//! appear at summation boundaries through [`CubicSymbolValue::to_complex`].

use std::ops::Mul;

use num_complex::Complex64;

use crate::eisenstein::{div_round, lambda_decompose, EisInt};
use crate::error::{LabError, LabResult};
use crate::factorization::{factor, is_prime_element};

/// `ω^k` as a complex number, `k ∈ {0, 1, 2}`.
pub const OMEGA_POWERS: [Complex64; 3] = [
    Complex64::new(1.0, 0.0),
    Complex64::new(-0.5, 0.866_025_403_784_438_6),
    Complex64::new(-0.5, -0.866_025_403_784_438_6),
];

/// A value of a cubic character: `0` or a cube root of unity `ω^k`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum CubicSymbolValue {
    /// The symbol vanishes (non-coprime arguments).
    Zero,
    /// `ω^k` with `k ∈ {0, 1, 2}`.
    Root(u8),
}

impl CubicSymbolValue {
    /// The value `1`.
    pub const ONE: Self = CubicSymbolValue::Root(0);

    /// `ω^k` for any integer `k`.
    pub fn root(k: i64) -> Self {
        CubicSymbolValue::Root(k.rem_euclid(3) as u8)
    }

    /// Complex conjugate (`ω^k ↦ ω^{−k}`).
    pub fn conj(self) -> Self {
        match self {
            CubicSymbolValue::Zero => CubicSymbolValue::Zero,
            CubicSymbolValue::Root(k) => CubicSymbolValue::Root((3 - k) % 3),
        }
    }

    /// Integer power; `0⁰ = 1` by convention.
    pub fn pow(self, e: u64) -> Self {
        match self {
            CubicSymbolValue::Zero if e == 0 => Self::ONE,
            CubicSymbolValue::Zero => CubicSymbolValue::Zero,
            CubicSymbolValue::Root(k) => Self::root((k as u64 * (e % 3)) as i64),
        }
    }

    /// The exponent `k`, or `None` for zero.
    pub fn exponent(self) -> Option<u8> {
        match self {
            CubicSymbolValue::Zero => None,
            CubicSymbolValue::Root(k) => Some(k),
        }
    }

    /// Complex value.
    pub fn to_complex(self) -> Complex64 {
        match self {
            CubicSymbolValue::Zero => Complex64::new(0.0, 0.0),
            CubicSymbolValue::Root(k) => OMEGA_POWERS[k as usize],
        }
    }

    /// `true` for the zero value.
    pub fn is_zero(self) -> bool {
        self == CubicSymbolValue::Zero
    }
}

impl Mul for CubicSymbolValue {
    type Output = Self;
    fn mul(self, o: Self) -> Self {
        match (self, o) {
            (CubicSymbolValue::Root(a), CubicSymbolValue::Root(b)) => CubicSymbolValue::Root((a + b) % 3),
            _ => CubicSymbolValue::Zero,
        }
    }
}

/// The supplementary-law exponents `(α₂, α₃) ∈ (Z/3)²` of a primary `d`,
/// defined by `d ≡ 1 + α₂λ² + α₃λ³ (mod 9)`.
///
/// Writing `d = 1 + 3t` and using `λ² = −3`, `λ³ = −3λ`, `λ = 1 + 2ω` gives
/// `t ≡ −α₂ − α₃ − 2α₃ω (mod 3)`, which is solved coordinatewise.
pub fn supplementary_exponents(d: &EisInt) -> (u8, u8) {
    debug_assert!(d.is_primary());
    let ta = (d.a - 1).div_euclid(3).rem_euclid(3);
    let tb = d.b.div_euclid(3).rem_euclid(3);
    let a3 = tb;
    let a2 = (-(ta + tb)).rem_euclid(3);
    (a2 as u8, a3 as u8)
}

/// Exponent `j` with `u = ±ω^j` for a unit `u`.
fn unit_omega_exponent(u: &EisInt) -> u8 {
    match (u.a, u.b) {
        (1, 0) | (-1, 0) => 0,
        (0, 1) | (0, -1) => 1,
        (-1, -1) | (1, 1) => 2,
        _ => unreachable!("not a unit: {u}"),
    }
}

/// `(ω/d)₃` exponent for primary `d`.
pub fn omega_symbol_exponent(d: &EisInt) -> u8 {
    supplementary_exponents(d).0
}

/// `(λ/d)₃` exponent for primary `d`.
pub fn lambda_symbol_exponent(d: &EisInt) -> u8 {
    (3 - supplementary_exponents(d).1) % 3
}

/// Remainder of `a` modulo `b`, robust to large `a`.
fn reduce(a: &EisInt, b: &EisInt) -> EisInt {
    if let (Some(_), Some(_)) = (a.checked_mul(&b.conj()), a.checked_norm()) {
        return div_round(a, b).1;
    }
    // Wide fallback: the quotient is formed in 128-bit arithmetic.
    let (aa, ab) = (a.a as i128, a.b as i128);
    let (ba, bb) = (b.a as i128, b.b as i128);
    let (ca, cb) = (ba - bb, -bb);
    let n = ba * ba - ba * bb + bb * bb;
    let u = aa * ca - ab * cb;
    let v = aa * cb + ab * ca - ab * cb;
    let rd = |x: i128| (2 * x + n).div_euclid(2 * n);
    let (qa, qb) = (rd(u), rd(v));
    let ra = aa - (qa * ba - qb * bb);
    let rb = ab - (qa * bb + qb * ba - qb * bb);
    EisInt::new(ra as i64, rb as i64)
}

/// Fast cubic residue symbol `(a/b)₃` via cubic reciprocity.
pub fn symbol(a: &EisInt, b: &EisInt) -> LabResult<CubicSymbolValue> {
    if b.is_zero() || !b.is_primary() {
        return Err(LabError::BadModulus(*b));
    }
    Ok(symbol_unchecked(*a, *b))
}

/// Fast symbol without modulus validation; `b` must be primary.
pub fn symbol_unchecked(mut a: EisInt, mut b: EisInt) -> CubicSymbolValue {
    let mut acc: u32 = 0;
    loop {
        if b.a == 1 && b.b == 0 {
            return CubicSymbolValue::Root((acc % 3) as u8);
        }
        a = reduce(&a, &b);
        if a.is_zero() {
            return CubicSymbolValue::Zero;
        }
        let (u, k, c) = lambda_decompose(&a).expect("nonzero");
        let (a2, a3) = supplementary_exponents(&b);
        // (u/b) = ω^{j·α₂} (the sign is a cube), (λ/b)^k = ω^{−k·α₃}.
        acc += unit_omega_exponent(&u) as u32 * a2 as u32;
        acc += k * ((3 - a3 as u32) % 3);
        // Both b and c are primary: (c/b) = (b/c).
        a = b;
        b = c;
    }
}

/// Euler's criterion `(a/π)₃ ≡ a^{(N(π)−1)/3} (mod π)` for a primary prime `π`.
pub fn symbol_definition(a: &EisInt, pi: &EisInt) -> LabResult<CubicSymbolValue> {
    if !pi.is_primary() || !is_prime_element(pi) {
        return Err(LabError::NotPrimaryPrime(*pi));
    }
    let x = reduce(a, pi);
    if x.is_zero() {
        return Ok(CubicSymbolValue::Zero);
    }
    let mut e = (pi.norm() - 1) / 3;
    let mut base = x;
    let mut acc = EisInt::one();
    while e > 0 {
        if e & 1 == 1 {
            acc = reduce(&(acc * base), pi);
        }
        base = reduce(&(base * base), pi);
        e >>= 1;
    }
    let mut w = EisInt::one();
    for k in 0..3u8 {
        if reduce(&(acc - w), pi).is_zero() {
            return Ok(CubicSymbolValue::Root(k));
        }
        w = w * EisInt::omega();
    }
    Err(LabError::NotPrimaryPrime(*pi))
}

/// Multiplicative extension of [`symbol_definition`] over the factorization of `b`.
pub fn symbol_by_factoring(a: &EisInt, b: &EisInt) -> LabResult<CubicSymbolValue> {
    if b.is_zero() || !b.is_primary() {
        return Err(LabError::BadModulus(*b));
    }
    let f = factor(b)?;
    let mut v = CubicSymbolValue::ONE;
    for (p, e) in &f.primes {
        v = v * symbol_definition(a, p)?.pow(*e as u64);
    }
    Ok(v)
}

/// `χ_q(x) = (x/q)₃` on elements.
pub fn chi_q(q: &EisInt, x: &EisInt) -> LabResult<CubicSymbolValue> {
    symbol(x, q)
}

/// `χ_q` on the ideal `(λ^g n)` with `n` primary: `(λ/q)^g · (n/q)`.
pub fn chi_q_ideal(q: &EisInt, g: u32, n: &EisInt) -> LabResult<CubicSymbolValue> {
    if q.is_zero() || !q.is_primary() {
        return Err(LabError::BadModulus(*q));
    }
    let lam = CubicSymbolValue::Root(lambda_symbol_exponent(q));
    Ok(lam.pow(g as u64) * symbol_unchecked(*n, *q))
}

/// The 18 divisors `±ω^a λ^b` (`0 ≤ a, b ≤ 2`) of 3 used to detect classes mod 9.
pub fn divisors_of_three() -> Vec<EisInt> {
    let mut out = Vec::with_capacity(18);
    for sign in [1i64, -1] {
        for a in 0..3 {
            for b in 0..3 {
                out.push(EisInt::new(sign, 0) * EisInt::omega().pow(a) * EisInt::lambda().pow(b));
            }
        }
    }
    out
}

/// `(1/18) Σ_{η | 3} χ_c(η) conj(χ_m(η))` for primary `m`, `c`: the indicator of `m ≡ c (mod 9)`.
pub fn indicator_mod9_via_characters(m: &EisInt, c: &EisInt) -> LabResult<f64> {
    let mut s = Complex64::new(0.0, 0.0);
    for eta in divisors_of_three() {
        s += symbol(&eta, c)?.to_complex() * symbol(&eta, m)?.conj().to_complex();
    }
    Ok(s.re / 18.0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::eisenstein::{enumerate_by_norm, primary_associate, ClassFilter};
    use proptest::prelude::*;

    fn e(a: i64, b: i64) -> EisInt {
        EisInt::new(a, b)
    }

    #[test]
    fn definition_examples() {
        let pi = e(-2, -3);
        assert_eq!(symbol_definition(&(pi * e(5, 1)), &pi).unwrap(), CubicSymbolValue::Zero);
        let c = e(4, 1); // norm 13, coprime to π
        assert_eq!(symbol_definition(&c.pow(3), &pi).unwrap(), CubicSymbolValue::ONE);
        // 2^{(7−1)/3} = 4; match 4 mod π against 1, ω, ω².
        let v = symbol_definition(&e(2, 0), &pi).unwrap();
        let k = v.exponent().unwrap() as u32;
        assert!(pi.divides(&(e(4, 0) - EisInt::omega().pow(k))));
        assert!(matches!(symbol_definition(&e(2, 0), &e(4, 0)), Err(LabError::NotPrimaryPrime(_))));
    }

    #[test]
    fn fast_examples() {
        assert_eq!(symbol(&e(17, 5), &EisInt::one()).unwrap(), CubicSymbolValue::ONE);
        let b = e(1, 3);
        let (a2, _) = supplementary_exponents(&b);
        assert_eq!(symbol(&EisInt::omega(), &b).unwrap(), CubicSymbolValue::Root(a2));
        // ω^{(N−1)/3} for a prime modulus.
        assert_eq!(a2 as i64, ((b.norm() - 1) / 3) % 3);
        assert_eq!(chi_q(&e(10, 0), &e(1, 3)).unwrap(), symbol_by_factoring(&e(1, 3), &e(10, 0)).unwrap());
        assert!(matches!(symbol(&e(1, 0), &e(2, 0)), Err(LabError::BadModulus(_))));
    }

    #[test]
    fn supplementary_laws_match_definition() {
        for pi in enumerate_by_norm(3_000, ClassFilter::Primary) {
            if !is_prime_element(&pi) {
                continue;
            }
            let w = symbol_definition(&EisInt::omega(), &pi).unwrap();
            assert_eq!(w, CubicSymbolValue::Root(omega_symbol_exponent(&pi)), "ω over {pi}");
            let l = symbol_definition(&EisInt::lambda(), &pi).unwrap();
            assert_eq!(l, CubicSymbolValue::Root(lambda_symbol_exponent(&pi)), "λ over {pi}");
        }
    }

    #[test]
    fn fast_matches_definition_exhaustively_small() {
        let mods = enumerate_by_norm(400, ClassFilter::Primary);
        let tops = enumerate_by_norm(60, ClassFilter::All);
        for b in &mods {
            for a in &tops {
                assert_eq!(symbol(a, b).unwrap(), symbol_by_factoring(a, b).unwrap(), "({a}/{b})");
            }
        }
    }

    #[test]
    fn family_characters_trivial_on_units_and_lambda() {
        for q in enumerate_by_norm(5_000, ClassFilter::Primary) {
            if q.mod9() != e(1, 0) || q == EisInt::one() {
                continue;
            }
            assert_eq!(chi_q(&q, &EisInt::omega()).unwrap(), CubicSymbolValue::ONE);
            assert_eq!(chi_q(&q, &EisInt::lambda()).unwrap(), CubicSymbolValue::ONE);
            assert_eq!(chi_q(&q, &(q * e(3, 7))).unwrap(), CubicSymbolValue::Zero);
        }
    }

    #[test]
    fn mod9_indicator_uses_eighteen_divisors() {
        let divs = divisors_of_three();
        assert_eq!(divs.len(), 18);
        for d in &divs {
            assert!(d.divides(&e(3, 0)));
        }
        let classes: Vec<EisInt> = crate::eisenstein::ResidueClassMod9::primary_classes()
            .iter()
            .map(|c| c.representative)
            .collect();
        for m in enumerate_by_norm(2_000, ClassFilter::Primary).iter().step_by(5) {
            let mut total = 0.0;
            for c in &classes {
                let ind = indicator_mod9_via_characters(m, c).unwrap();
                let oracle = if m.mod9() == c.mod9() { 1.0 } else { 0.0 };
                assert!((ind - oracle).abs() < 1e-12, "m = {m}, c = {c}: {ind}");
                total += ind;
            }
            assert!((total - 1.0).abs() < 1e-12);
            // m ≡ c + 3λ (mod 9) is a different class.
            let shifted = (*m + e(3, 0) * EisInt::lambda()).mod9();
            assert!(indicator_mod9_via_characters(m, &shifted).unwrap().abs() < 1e-12);
        }
    }

    fn primary_elem() -> impl Strategy<Value = EisInt> {
        (-300i64..300, -300i64..300).prop_filter_map("coprime to λ", |(a, b)| {
            let x = e(a, b);
            if x.is_zero() || x.divisible_by_lambda() {
                None
            } else {
                Some(primary_associate(&x).unwrap().1)
            }
        })
    }

    proptest! {
        #[test]
        fn reciprocity(a in primary_elem(), b in primary_elem()) {
            prop_assume!(crate::eisenstein::coprime(&a, &b));
            prop_assert_eq!(symbol(&a, &b).unwrap(), symbol(&b, &a).unwrap());
        }

        #[test]
        fn multiplicative_in_top(a1 in primary_elem(), a2 in primary_elem(), b in primary_elem()) {
            let lhs = symbol(&(a1 * a2), &b).unwrap();
            prop_assert_eq!(lhs, symbol(&a1, &b).unwrap() * symbol(&a2, &b).unwrap());
        }

        #[test]
        fn unit_modulus_for_coprime(a in primary_elem(), b in primary_elem()) {
            let v = symbol(&a, &b).unwrap();
            prop_assert_eq!(v.is_zero(), !crate::eisenstein::coprime(&a, &b));
            if !v.is_zero() {
                prop_assert_eq!(v * v.conj(), CubicSymbolValue::ONE);
            }
        }
    }
}
