//! Cubic Gauss sums `g₃(μ, c)`, their normalizations, twisted sums `h̃₃`,
//! root numbers and the theta coefficients `τ₃(r)`.
//!
//! Additive phases `ě(z) = e^{2πi Tr(z)}` are always reduced exactly: for
//! `z = μd/c` one has `Tr(z) = Tr(μ d c̄)/N(c)`, an integer numerator modulo
//! `N(c)`, which is only then converted to an angle.
//!
//! Prime values `g₃(π)` come from [`g3_prime`], which evaluates split primes
//! in the prime field `Z[ω]/π ≅ F_p` (one generator walk plus one cosine
//! pass, `O(p)`) and inert primes `−p` by the pure Gauss sum evaluation
//! `g₃(−p) = (−1)^{(p+1)/3}·p` (and `g₃(−2) = 2`). Both are cross-checked against the
//! definitional sum [`g3_direct`] in the tests.

use std::collections::HashMap;
use std::f64::consts::TAU;
use std::io::{BufRead, Write};
use std::path::Path;
use std::sync::{OnceLock, RwLock};

use num_complex::Complex64;
use rayon::prelude::*;

use crate::eisenstein::{lambda_decompose, EisInt};
use crate::error::{LabError, LabResult};
use crate::factorization::{factor_u64, is_prime_element, pow_mod, EisFactorization, Factorizer};
use crate::symbol::{symbol_unchecked, CubicSymbolValue};

/// Default cap on `N(c)` for direct (definitional) evaluation.
pub const DIRECT_CAP: i64 = 1_000_000;

/// `e^{2πi k/n}` with `k` reduced into `(−n/2, n/2]` before scaling.
#[inline]
pub fn phase(k: i64, n: i64) -> Complex64 {
    let mut r = k.rem_euclid(n);
    if 2 * r > n {
        r -= n;
    }
    let (s, c) = (TAU * r as f64 / n as f64).sin_cos();
    Complex64::new(c, s)
}

/// `e(x) = e^{2πix}` for a real `x`.
#[inline]
pub fn e_real(x: f64) -> Complex64 {
    let (s, c) = (TAU * x).sin_cos();
    Complex64::new(c, s)
}

/// A complete residue system modulo `c ≠ 0`, from the Hermite normal form of
/// the lattice `cZ[ω]`: elements `x + yω` with `0 ≤ x < N(c)/g`, `0 ≤ y < g`,
/// `g = gcd(a, b)`.
pub fn residue_system(c: &EisInt) -> Vec<EisInt> {
    let n = c.norm();
    assert!(n > 0, "residue system of zero");
    let g = gcd_i64(c.a.abs(), c.b.abs());
    let d1 = n / g;
    let mut out = Vec::with_capacity(n as usize);
    for y in 0..g {
        for x in 0..d1 {
            out.push(EisInt::new(x, y));
        }
    }
    out
}

fn gcd_i64(mut a: i64, mut b: i64) -> i64 {
    while b != 0 {
        let t = a % b;
        a = b;
        b = t;
    }
    a.abs()
}

/// Definitional `g₃(μ, c) = Σ_{d mod c} χ_c(d) ě(μd/c)` for primary `c`.
pub fn g3_direct(mu: &EisInt, c: &EisInt) -> LabResult<Complex64> {
    g3_direct_capped(mu, c, DIRECT_CAP)
}

/// [`g3_direct`] with an explicit norm cap.
pub fn g3_direct_capped(mu: &EisInt, c: &EisInt, cap: i64) -> LabResult<Complex64> {
    if !c.is_primary() {
        return Err(LabError::BadModulus(*c));
    }
    let n = c.norm();
    if n > cap {
        return Err(LabError::CapExceeded { norm: n, cap });
    }
    if n == 1 {
        return Ok(Complex64::new(1.0, 0.0));
    }
    let w = *mu * c.conj();
    let mut acc = [Complex64::new(0.0, 0.0); 3];
    for d in residue_system(c) {
        if let CubicSymbolValue::Root(k) = symbol_unchecked(d, *c) {
            // Tr(μ d c̄) as an exact integer.
            let t = (w * d).trace();
            acc[k as usize] += phase(t, n);
        }
    }
    Ok(combine_by_roots(&acc))
}

/// `Σ_k ω^k·acc[k]`.
#[inline]
fn combine_by_roots(acc: &[Complex64; 3]) -> Complex64 {
    acc[0]
        + acc[1] * crate::symbol::OMEGA_POWERS[1]
        + acc[2] * crate::symbol::OMEGA_POWERS[2]
}

/// Barrett-style multiplier modulo a 32-bit prime.
#[derive(Clone, Copy)]
struct ModMul {
    p: u64,
    m: u64,
}

impl ModMul {
    fn new(p: u64) -> Self {
        debug_assert!(p < 1 << 32);
        Self { p, m: u64::MAX / p }
    }

    #[inline(always)]
    fn mul(&self, x: u64, y: u64) -> u64 {
        let z = x * y;
        let q = ((z as u128 * self.m as u128) >> 64) as u64;
        let mut r = z - q * self.p;
        while r >= self.p {
            r -= self.p;
        }
        r
    }
}

/// Smallest primitive root modulo the prime `p`.
pub fn primitive_root(p: u64) -> u64 {
    if p == 2 {
        return 1;
    }
    let fs = factor_u64(p - 1);
    (2..p)
        .find(|&g| fs.iter().all(|&(q, _)| pow_mod(g, (p - 1) / q, p) != 1))
        .expect("primes have primitive roots")
}

fn inv_mod(a: u64, p: u64) -> u64 {
    pow_mod(a, p - 2, p)
}

/// `g₃(π)` for a primary prime `π` over a split rational prime `p = N(π)`.
///
/// In `Z[ω]/π ≅ F_p` one has `ω ≡ r = −a·b⁻¹`, the residues are `0..p`, and
/// `Tr(xπ̄) = x·t` with `t = Tr(π)` invertible mod `p`. Hence
/// `g₃(π) = conj(χ(t))·2·Σ_{1≤y≤(p−1)/2} χ(y) cos(2πy/p)`, using `χ(−1) = 1`.
/// The character is read off a discrete-logarithm table mod 3.
pub fn g3_split_prime(pi: &EisInt, scratch: &mut Vec<u8>) -> Complex64 {
    let p = pi.norm() as u64;
    let pm = ModMul::new(p);
    let a = pi.a.rem_euclid(p as i64) as u64;
    let b = pi.b.rem_euclid(p as i64) as u64;
    debug_assert!(b != 0);
    let r = pm.mul(p - a % p, inv_mod(b, p)) % p;
    let t = (2 * pi.a - pi.b).rem_euclid(p as i64) as u64;
    let g = primitive_root(p);
    let gk = pow_mod(g, (p - 1) / 3, p);
    let k0: u8 = if gk == r {
        1
    } else {
        debug_assert_eq!(gk, pm.mul(r, r));
        2
    };
    let h = ((p - 1) / 2) as usize;
    scratch.clear();
    scratch.resize(h + 1, 0);
    // Discrete logs mod 3 on 1..=h; g^{j+(p−1)/2} = −g^j and (p−1)/2 ≡ 0 (mod 3).
    let mut x = 1u64;
    let mut j3 = 0u8;
    for _ in 0..h {
        let y = if x > p / 2 { p - x } else { x };
        scratch[y as usize] = j3;
        j3 = if j3 == 2 { 0 } else { j3 + 1 };
        x = pm.mul(x, g);
    }
    // Cosine pass with a periodically resynchronised rotation.
    let mut sums = [0.0f64; 3];
    let step = TAU / p as f64;
    let (sd, cd) = step.sin_cos();
    let (mut s, mut c) = (0.0f64, 1.0f64);
    for y in 1..=h {
        if y % 64 == 0 {
            let (s1, c1) = (step * y as f64).sin_cos();
            s = s1;
            c = c1;
        } else {
            let c1 = c * cd - s * sd;
            s = s * cd + c * sd;
            c = c1;
        }
        sums[scratch[y] as usize] += c;
    }
    let kmap = |j: u8| ((j as u32 * k0 as u32) % 3) as usize;
    let mut acc = [Complex64::new(0.0, 0.0); 3];
    for j in 0..3u8 {
        acc[kmap(j)] += Complex64::new(2.0 * sums[j as usize], 0.0);
    }
    let body = combine_by_roots(&acc);
    let ty = if t > p / 2 { p - t } else { t };
    let chi_t = CubicSymbolValue::Root(kmap(scratch[ty as usize]) as u8);
    chi_t.conj().to_complex() * body
}

/// `g₃(−p) = (−1)^{(p+1)/3}·p` for an inert rational prime `p ≡ 2 (mod 3)`
/// (a pure Gauss sum over `F_{p²}`: the cubic character is trivial on `F_p`),
/// and `g₃(−2) = 2`.
pub fn g3_inert_prime(p: u64) -> Complex64 {
    if p == 2 {
        return Complex64::new(2.0, 0.0);
    }
    let sign = if ((p + 1) / 3) % 2 == 0 { 1.0 } else { -1.0 };
    Complex64::new(sign * p as f64, 0.0)
}

fn prime_cache() -> &'static RwLock<HashMap<EisInt, Complex64>> {
    static CACHE: OnceLock<RwLock<HashMap<EisInt, Complex64>>> = OnceLock::new();
    CACHE.get_or_init(|| RwLock::new(HashMap::new()))
}

fn g3_prime_uncached(pi: &EisInt, scratch: &mut Vec<u8>) -> Complex64 {
    if pi.b == 0 {
        g3_inert_prime((-pi.a) as u64)
    } else {
        g3_split_prime(pi, scratch)
    }
}

/// `g₃(π) = g₃(1, π)` for a primary prime `π`, memoized process-wide.
pub fn g3_prime(pi: &EisInt) -> Complex64 {
    if let Some(v) = prime_cache().read().expect("cache lock").get(pi) {
        return *v;
    }
    let mut scratch = Vec::new();
    let v = g3_prime_uncached(pi, &mut scratch);
    prime_cache().write().expect("cache lock").insert(*pi, v);
    v
}

/// Computes `g₃(π)` for every given primary prime in parallel and stores the
/// results in the shared memo. Values are independent of scheduling.
pub fn prefill_prime_table(primes: &[EisInt]) {
    let missing: Vec<EisInt> = {
        let cache = prime_cache().read().expect("cache lock");
        primes.iter().filter(|p| !cache.contains_key(p)).copied().collect()
    };
    // g₃(π̄) = conj(g₃(π)): one F_p pass serves both primes above p.
    let mut reps: Vec<EisInt> = Vec::with_capacity(missing.len());
    let mut seen = std::collections::HashSet::new();
    for pi in missing {
        if seen.insert(pi) {
            if pi.b != 0 {
                seen.insert(pi.conj());
            }
            reps.push(pi);
        }
    }
    let vals: Vec<(EisInt, Complex64)> = reps
        .par_iter()
        .map_init(Vec::new, |scratch, pi| (*pi, g3_prime_uncached(pi, scratch)))
        .collect();
    let mut cache = prime_cache().write().expect("cache lock");
    for (pi, v) in vals {
        if pi.b != 0 {
            cache.insert(pi.conj(), v.conj());
        }
        cache.insert(pi, v);
    }
}

/// Writes `(a, b, Re g₃(π), Im g₃(π))` rows for the given primes.
pub fn write_gauss_cache(path: &Path, primes: &[EisInt]) -> LabResult<()> {
    let mut f = std::io::BufWriter::new(std::fs::File::create(path)?);
    writeln!(f, "a,b,re_g3,im_g3")?;
    for pi in primes {
        let g = g3_prime(pi);
        writeln!(f, "{},{},{:.17e},{:.17e}", pi.a, pi.b, g.re, g.im)?;
    }
    f.flush()?;
    Ok(())
}

/// Loads a Gauss-sum cache written by [`write_gauss_cache`] into the memo.
pub fn read_gauss_cache(path: &Path) -> LabResult<usize> {
    let f = std::io::BufReader::new(std::fs::File::open(path)?);
    let mut rows = Vec::new();
    for (i, line) in f.lines().enumerate() {
        let line = line?;
        if i == 0 {
            continue;
        }
        let parts: Vec<&str> = line.split(',').collect();
        if parts.len() != 4 {
            return Err(LabError::InvalidInput(format!("gauss cache row {i}")));
        }
        let bad = |_| LabError::InvalidInput(format!("gauss cache row {i}"));
        let a: i64 = parts[0].parse().map_err(bad)?;
        let b: i64 = parts[1].parse().map_err(bad)?;
        let re: f64 = parts[2].parse().map_err(|_| LabError::InvalidInput(format!("row {i}")))?;
        let im: f64 = parts[3].parse().map_err(|_| LabError::InvalidInput(format!("row {i}")))?;
        rows.push((EisInt::new(a, b), Complex64::new(re, im)));
    }
    let n = rows.len();
    prime_cache().write().expect("cache lock").extend(rows);
    Ok(n)
}

/// `φ(π^ℓ)` for a primary prime `π`.
fn phi_prime_power(norm: i64, l: u32) -> f64 {
    (norm as f64).powi(l as i32 - 1) * (norm as f64 - 1.0)
}

/// `g₃(π^k, π^ℓ)` from the local table, given `g₃(π)`.
pub fn g3_local(pi_norm: i64, g_pi: Complex64, k: u32, l: u32) -> Complex64 {
    let nk = (pi_norm as f64).powi(k as i32);
    if l == 0 {
        Complex64::new(1.0, 0.0)
    } else if l <= k && l % 3 == 0 {
        Complex64::new(phi_prime_power(pi_norm, l), 0.0)
    } else if l == k + 1 {
        match l % 3 {
            0 => Complex64::new(-nk, 0.0),
            1 => g_pi * nk,
            _ => g_pi.conj() * nk,
        }
    } else {
        Complex64::new(0.0, 0.0)
    }
}

/// `v_π(μ)` and the cofactor, for `μ ≠ 0`.
fn valuation(mu: &EisInt, pi: &EisInt) -> (u32, EisInt) {
    let mut v = 0;
    let mut m = *mu;
    while let Some(q) = EisInt::exact_div(&m, pi) {
        m = q;
        v += 1;
    }
    (v, m)
}

/// `g₃(μ, π^ℓ)` for a primary prime `π`.
pub fn g3_prime_power(mu: &EisInt, pi: &EisInt, l: u32) -> Complex64 {
    if l == 0 {
        return Complex64::new(1.0, 0.0);
    }
    let n = pi.norm();
    if mu.is_zero() {
        // Σ_d χ_{π^ℓ}(d) is φ(π^ℓ) when the character is trivial, else 0.
        return if l % 3 == 0 {
            Complex64::new(phi_prime_power(n, l), 0.0)
        } else {
            Complex64::new(0.0, 0.0)
        };
    }
    let (k, delta) = valuation(mu, pi);
    let local = g3_local(n, g3_prime(pi), k, l);
    if local.norm_sqr() == 0.0 {
        return local;
    }
    let chi = symbol_unchecked(delta, *pi).pow(l as u64);
    chi.conj().to_complex() * local
}

/// `g₃(μ, c)` from a factorization of the primary `c` by twisted
/// multiplicativity `g₃(μ, c₁c₂) = g₃(μ, c₁)·g₃(μc₁, c₂)`.
pub fn g3_from_factorization(mu: &EisInt, f: &EisFactorization) -> Complex64 {
    debug_assert!(f.lambda_exp == 0 && f.unit == EisInt::one());
    let mut acc = Complex64::new(1.0, 0.0);
    let mut shift = *mu;
    for (pi, l) in &f.primes {
        acc *= g3_prime_power(&shift, pi, *l);
        if acc.norm_sqr() == 0.0 {
            return acc;
        }
        shift = shift * pi.pow(*l);
    }
    acc
}

/// `g₃(μ, c)` by factoring `c` and combining local values.
pub fn g3_fast(mu: &EisInt, c: &EisInt) -> LabResult<Complex64> {
    if !c.is_primary() {
        return Err(LabError::BadModulus(*c));
    }
    let f = Factorizer::default().factor(c)?;
    Ok(g3_from_factorization(mu, &f))
}

/// Normalized `g̃₃(μ, c) = g₃(μ, c)/√N(c)`.
pub fn g3_tilde(mu: &EisInt, c: &EisInt) -> LabResult<Complex64> {
    Ok(g3_fast(mu, c)? / (c.norm() as f64).sqrt())
}

/// `|g₃(π)³ + π²π̄|` for a primary prime `π`.
pub fn cube_relation_check(pi: &EisInt) -> LabResult<f64> {
    if !pi.is_primary() || !is_prime_element(pi) {
        return Err(LabError::NotPrimaryPrime(*pi));
    }
    let g = g3_prime(pi);
    let target = (*pi * *pi * pi.conj()).to_complex();
    Ok((g * g * g + target).norm())
}

/// [`cube_relation_check`] restricted to split primes.
pub fn cube_relation_check_split(pi: &EisInt) -> LabResult<f64> {
    if pi.b == 0 {
        return Err(LabError::NotSplit(*pi));
    }
    cube_relation_check(pi)
}

/// Direct `h̃₃(μ, χ_{c₁c₂²}) = N(c₁c₂)^{−1/2} Σ_{x mod c₁c₂, coprime} χ_{c₁c₂²}(x) ě(μx/(c₁c₂))`.
pub fn h3_tilde(mu: &EisInt, c1: &EisInt, c2: &EisInt) -> LabResult<Complex64> {
    if !c1.is_primary() || !c2.is_primary() {
        return Err(LabError::BadModulus(if c1.is_primary() { *c2 } else { *c1 }));
    }
    let m = *c1 * *c2;
    let n = m.norm();
    if n > DIRECT_CAP {
        return Err(LabError::CapExceeded { norm: n, cap: DIRECT_CAP });
    }
    let c = *c1 * *c2 * *c2;
    let w = *mu * m.conj();
    let mut acc = [Complex64::new(0.0, 0.0); 3];
    for x in residue_system(&m) {
        if let CubicSymbolValue::Root(k) = symbol_unchecked(x, c) {
            acc[k as usize] += phase((w * x).trace(), n);
        }
    }
    Ok(combine_by_roots(&acc) / (n as f64).sqrt())
}

/// `true` iff `q₁q₂²` lies in the family `F₃` (primary, squarefree coprime
/// parts, `≡ 1 (mod 9)`, `≠ 1`).
pub fn in_family_f3(q1: &EisInt, q2: &EisInt) -> bool {
    if !q1.is_primary() || !q2.is_primary() {
        return false;
    }
    let q = *q1 * *q2 * *q2;
    if q == EisInt::one() || q.mod9() != EisInt::one() {
        return false;
    }
    match crate::factorization::factor(&(*q1 * *q2)) {
        Ok(f) => f.is_squarefree(),
        Err(_) => false,
    }
}

/// Root number `W(χ_q)/N(q₁q₂)^{1/2} = g̃₃(q₁)·conj(g̃₃(q₂))` for `q = q₁q₂² ∈ F₃`.
pub fn root_number(q1: &EisInt, q2: &EisInt) -> LabResult<Complex64> {
    if !in_family_f3(q1, q2) {
        return Err(LabError::NotInFamily(*q1 * *q2 * *q2));
    }
    Ok(g3_tilde(&EisInt::one(), q1)? * g3_tilde(&EisInt::one(), q2)?.conj())
}

/// Direct `W(χ_q)/N(m)^{1/2}` with `W = Σ_{x mod m, coprime} χ_q(x) ě(x/(λm))`, `m = q₁q₂`.
pub fn root_number_direct(q1: &EisInt, q2: &EisInt) -> LabResult<Complex64> {
    if !in_family_f3(q1, q2) {
        return Err(LabError::NotInFamily(*q1 * *q2 * *q2));
    }
    let m = *q1 * *q2;
    let n = m.norm();
    if n > DIRECT_CAP {
        return Err(LabError::CapExceeded { norm: n, cap: DIRECT_CAP });
    }
    let q = *q1 * *q2 * *q2;
    // x/(λm) = x·conj(λm)/(3N(m)).
    let w = (EisInt::lambda() * m).conj();
    let big = 3 * n;
    let mut acc = [Complex64::new(0.0, 0.0); 3];
    for x in residue_system(&m) {
        if let CubicSymbolValue::Root(k) = symbol_unchecked(x, q) {
            acc[k as usize] += phase((w * x).trace(), big);
        }
    }
    Ok(combine_by_roots(&acc) / (n as f64).sqrt())
}

/// Sign convention for the unit-twisted branches of `τ₃`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Tau3Phase {
    /// `e(−1/9)` on `±ωλ^{3n−4}cd³` and `e(1/9)` on `±ω²λ^{3n−4}cd³`.
    Standard,
    /// The opposite assignment, kept for the convention experiment.
    Swapped,
}

/// `τ₃(r)` with the standard phase convention.
pub fn tau3(r: &EisInt) -> LabResult<Complex64> {
    tau3_with(r, Tau3Phase::Standard)
}

/// `τ₃(r)` with an explicit phase convention; `r ≠ 0`.
pub fn tau3_with(r: &EisInt, conv: Tau3Phase) -> LabResult<Complex64> {
    let (unit, m, cprime) = lambda_decompose(r)?;
    let j = match (unit.a, unit.b) {
        (1, 0) | (-1, 0) => 0,
        (0, 1) | (0, -1) => 1,
        _ => 2,
    };
    let f = Factorizer::default().factor(&cprime)?;
    let mut c = EisInt::one();
    let mut d = EisInt::one();
    for (pi, e) in &f.primes {
        if e % 3 == 2 {
            return Ok(Complex64::new(0.0, 0.0));
        }
        if e % 3 == 1 {
            c = c * *pi;
        }
        d = d * pi.pow(e / 3);
    }
    let ratio = (d.norm() as f64 / c.norm() as f64).sqrt();
    let zero = Complex64::new(0.0, 0.0);
    match m % 3 {
        0 => {
            if j != 0 {
                return Ok(zero);
            }
            let n = (m / 3 + 1) as f64;
            Ok(g3_fast(&EisInt::one(), &c)?.conj() * ratio * 3f64.powf((n + 5.0) / 2.0))
        }
        2 => {
            let n = ((m + 4) / 3) as f64;
            let lam2 = EisInt::lambda().pow(2);
            let mu = EisInt::omega().pow(j) * lam2;
            let ph = match (j, conv) {
                (0, _) => Complex64::new(1.0, 0.0),
                (1, Tau3Phase::Standard) | (2, Tau3Phase::Swapped) => e_real(-1.0 / 9.0),
                _ => e_real(1.0 / 9.0),
            };
            Ok(ph * g3_fast(&mu, &c)?.conj() * ratio * 3f64.powf(n / 2.0 + 2.0))
        }
        _ => Ok(zero),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::eisenstein::{enumerate_by_norm, ClassFilter};
    use crate::factorization::{factor, primes_up_to, split_rational_prime, SplitResult};

    fn e(a: i64, b: i64) -> EisInt {
        EisInt::new(a, b)
    }

    fn close(x: Complex64, y: Complex64, tol: f64) -> bool {
        (x - y).norm() <= tol
    }

    #[test]
    fn residue_system_is_complete() {
        for c in [e(-2, -3), e(4, 0), e(7, 3), e(-5, 0), e(10, 0)] {
            let rs = residue_system(&c);
            assert_eq!(rs.len() as i64, c.norm());
            for i in 0..rs.len() {
                for j in 0..i {
                    assert!(!c.divides(&(rs[i] - rs[j])), "{} ≡ {} mod {c}", rs[i], rs[j]);
                }
            }
        }
    }

    #[test]
    fn direct_examples() {
        assert_eq!(g3_direct(&e(5, 2), &EisInt::one()).unwrap(), Complex64::new(1.0, 0.0));
        for c in [e(-2, -3), e(1, 3), e(-5, 0), e(10, 0)] {
            let g = g3_direct(&EisInt::one(), &c).unwrap();
            assert!((g.norm_sqr() / c.norm() as f64 - 1.0).abs() < 1e-9);
        }
        let pi = e(-2, -3);
        assert!(g3_direct(&pi, &pi).unwrap().norm() < 1e-9);
        assert!(matches!(
            g3_direct_capped(&EisInt::one(), &e(-2, -3), 5),
            Err(LabError::CapExceeded { .. })
        ));
    }

    #[test]
    fn split_prime_fast_path_matches_direct() {
        for p in primes_up_to(3000).into_iter().filter(|p| p % 3 == 1) {
            if let SplitResult::Split(x, y) = split_rational_prime(p).unwrap() {
                for pi in [x, y] {
                    let fast = g3_prime(&pi);
                    let direct = g3_direct(&EisInt::one(), &pi).unwrap();
                    assert!(close(fast, direct, 1e-9 * p as f64), "π = {pi}: {fast} vs {direct}");
                }
            }
        }
    }

    #[test]
    fn conjugate_prime_gives_conjugate_sum() {
        let mut scratch = Vec::new();
        for (_, pi) in crate::factorization::split_prime_table(2000) {
            let pi = crate::eisenstein::primary_associate(&pi).unwrap().1;
            let a = g3_split_prime(&pi, &mut scratch);
            let b = g3_split_prime(&pi.conj(), &mut scratch);
            assert!((a.conj() - b).norm() < 1e-9 * a.norm());
        }
    }

    #[test]
    fn inert_closed_form_matches_direct() {
        for p in primes_up_to(1000).into_iter().filter(|p| p % 3 == 2) {
            let pi = e(-(p as i64), 0);
            let direct = g3_direct(&EisInt::one(), &pi).unwrap();
            assert!(close(g3_inert_prime(p), direct, 1e-8 * (p * p) as f64), "p = {p}: {direct}");
        }
    }

    #[test]
    fn cube_relation_small_primes() {
        let pi = e(-2, -3);
        assert!(cube_relation_check(&pi).unwrap() <= 1e-8 * 7f64.powf(1.5));
        if let SplitResult::Split(x, _) = split_rational_prime(13).unwrap() {
            assert!(cube_relation_check(&x).unwrap() <= 1e-8 * 13f64.powf(1.5));
        }
        assert!(matches!(cube_relation_check_split(&e(-2, 0)), Err(LabError::NotSplit(_))));
        assert!(cube_relation_check(&e(-2, 0)).unwrap() <= 1e-9);
    }

    #[test]
    fn local_table_examples() {
        let pi = e(-2, -3);
        for k in [2u32, 5] {
            let v = g3_prime_power(&pi.pow(k), &pi, k + 1);
            assert!(close(v, Complex64::new(-(7f64.powi(k as i32)), 0.0), 1e-9));
        }
        let direct = g3_direct(&pi.pow(2), &pi.pow(3)).unwrap();
        assert!(close(g3_fast(&pi.pow(2), &pi.pow(3)).unwrap(), direct, 1e-8 * 343.0));
    }

    #[test]
    fn fast_matches_direct_on_small_moduli() {
        let shifts = [EisInt::one(), EisInt::lambda(), e(4, -7), e(-2, -3)];
        for c in enumerate_by_norm(700, ClassFilter::Primary) {
            for mu in &shifts {
                let d = g3_direct(mu, &c).unwrap();
                let f = g3_fast(mu, &c).unwrap();
                assert!(close(d, f, 1e-8 * c.norm() as f64), "μ = {mu}, c = {c}: {d} vs {f}");
            }
        }
    }

    #[test]
    fn twisted_multiplicativity_and_change_of_variables() {
        let (c1, c2) = (e(-2, -3), e(4, 3)); // norms 7 and 13
        let c = c1 * c2;
        let lhs = g3_direct(&EisInt::one(), &c).unwrap();
        let chi = symbol_unchecked(c1, c2).conj().to_complex();
        let rhs = chi * g3_direct(&EisInt::one(), &c1).unwrap() * g3_direct(&EisInt::one(), &c2).unwrap();
        assert!(close(lhs, rhs, 1e-9 * 91.0));
        let nu = e(5, 1);
        let mu = e(2, -1);
        let l = g3_fast(&(nu * mu), &c).unwrap();
        let r = symbol_unchecked(nu, c).conj().to_complex() * g3_fast(&mu, &c).unwrap();
        assert!(close(l, r, 1e-9 * 91.0));
    }

    #[test]
    fn magnitude_identity_small() {
        for c in enumerate_by_norm(400, ClassFilter::Primary) {
            let g = g3_direct(&EisInt::one(), &c).unwrap();
            let mu2 = if factor(&c).unwrap().is_squarefree() { 1.0 } else { 0.0 };
            assert!((g.norm_sqr() - mu2 * c.norm() as f64).abs() <= 1e-9 * c.norm() as f64, "c = {c}");
        }
    }

    #[test]
    fn h3_examples() {
        let c1 = e(-2, -3);
        let c2 = e(4, 3);
        let mu = e(2, 1);
        let h = h3_tilde(&mu, &c1, &EisInt::one()).unwrap();
        assert!(close(h, g3_tilde(&mu, &c1).unwrap(), 1e-9));
        let prod = g3_tilde(&mu, &c1).unwrap() * g3_tilde(&mu, &c2).unwrap().conj();
        assert!(close(h3_tilde(&mu, &c1, &c2).unwrap(), prod, 1e-8));
        let nu = e(5, 1);
        let c = c1 * c2 * c2;
        let lhs = h3_tilde(&(nu * mu), &c1, &c2).unwrap();
        let rhs = symbol_unchecked(nu, c).conj().to_complex() * h3_tilde(&mu, &c1, &c2).unwrap();
        assert!(close(lhs, rhs, 1e-8));
    }

    #[test]
    fn root_number_examples() {
        let q = e(10, 0);
        let w = root_number(&q, &EisInt::one()).unwrap();
        assert!(close(w, g3_tilde(&EisInt::one(), &q).unwrap(), 1e-12));
        assert!((w.norm() - 1.0).abs() < 1e-8);
        let wd = root_number_direct(&q, &EisInt::one()).unwrap();
        assert!(close(wd, w, 1e-8), "{wd} vs {w}");
        assert!(matches!(root_number(&e(4, 3), &EisInt::one()), Err(LabError::NotInFamily(_))));
    }

    #[test]
    fn root_number_product_formula_on_family() {
        let small = enumerate_by_norm(60, ClassFilter::Primary);
        let mut checked = 0;
        for q1 in &small {
            for q2 in &small {
                if !in_family_f3(q1, q2) || (*q1 * *q2).norm() > 3000 {
                    continue;
                }
                let w = root_number(q1, q2).unwrap();
                let wd = root_number_direct(q1, q2).unwrap();
                assert!(close(w, wd, 1e-8), "q₁ = {q1}, q₂ = {q2}: {w} vs {wd}");
                checked += 1;
            }
        }
        assert!(checked > 5, "only {checked} family members");
    }

    #[test]
    fn tau3_examples() {
        assert!(close(tau3(&EisInt::one()).unwrap(), Complex64::new(27.0, 0.0), 1e-12));
        assert_eq!(tau3(&EisInt::lambda()).unwrap(), Complex64::new(0.0, 0.0));
        let c = e(-2, -3) * e(-5, 0);
        let d = e(4, 3);
        let r = c * d.pow(3);
        let expected = g3_tilde(&EisInt::one(), &c).unwrap().conj() * 27.0 * (d.norm() as f64).sqrt();
        assert!(close(tau3(&r).unwrap(), expected, 1e-8 * expected.norm()));
        // Squares of primes never occur.
        assert_eq!(tau3(&e(-2, -3).pow(2)).unwrap(), Complex64::new(0.0, 0.0));
    }
}
