//! Factorization in `Z[ω]` built on rational factorization of the norm.
//!
//! Rational integers are factored by trial division up to `10⁶` followed by
//! Brent's variant of Pollard's rho; primality is decided by a deterministic
//! Miller–Rabin test valid for all 64-bit inputs. A rational prime
//! `p ≡ 1 (mod 3)` is split as `gcd(p, r − ω)` where `r² + r + 1 ≡ 0 (mod p)`.
//!
//! For bulk work (family enumeration, bias scans) a [`Factorizer`] holds a
//! smallest-prime-factor sieve for norms and a memo of split primes.

use std::collections::HashMap;
use std::io::{BufRead, Write};
use std::path::Path;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::eisenstein::{lambda_decompose, EisInt};
use crate::error::{LabError, LabResult};

/// Trial-division limit before switching to Pollard rho.
pub const TRIAL_DIVISION_LIMIT: u64 = 1_000_000;

#[inline]
fn mul_mod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

#[inline]
fn add_mod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 + b as u128) % m as u128) as u64
}

/// `b^e mod m` for 64-bit moduli.
pub fn pow_mod(mut b: u64, mut e: u64, m: u64) -> u64 {
    if m == 1 {
        return 0;
    }
    let mut acc = 1u64;
    b %= m;
    while e > 0 {
        if e & 1 == 1 {
            acc = mul_mod(acc, b, m);
        }
        b = mul_mod(b, b, m);
        e >>= 1;
    }
    acc
}

/// Deterministic Miller–Rabin primality test for all `n < 2⁶⁴`.
pub fn is_prime_u64(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    const BASES: [u64; 12] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37];
    for &p in &BASES {
        if n % p == 0 {
            return n == p;
        }
    }
    let mut d = n - 1;
    let mut s = 0;
    while d % 2 == 0 {
        d /= 2;
        s += 1;
    }
    'witness: for &a in &BASES {
        let mut x = pow_mod(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mul_mod(x, x, n);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

fn gcd_u64(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        let t = a % b;
        a = b;
        b = t;
    }
    a
}

/// Brent–Pollard rho: returns a nontrivial factor of the odd composite `n`.
fn pollard_brent(n: u64, rng: &mut ChaCha8Rng) -> u64 {
    loop {
        let c = rng.gen_range(1..n);
        let mut y = rng.gen_range(0..n);
        let m = 128u64;
        let (mut g, mut r, mut q) = (1u64, 1u64, 1u64);
        let mut x = y;
        let mut ys = y;
        while g == 1 {
            x = y;
            for _ in 0..r {
                y = add_mod(mul_mod(y, y, n), c, n);
            }
            let mut k = 0;
            while k < r && g == 1 {
                ys = y;
                for _ in 0..m.min(r - k) {
                    y = add_mod(mul_mod(y, y, n), c, n);
                    q = mul_mod(q, x.abs_diff(y), n);
                }
                g = gcd_u64(q, n);
                k += m;
            }
            r *= 2;
        }
        if g == n {
            loop {
                ys = add_mod(mul_mod(ys, ys, n), c, n);
                g = gcd_u64(x.abs_diff(ys), n);
                if g > 1 {
                    break;
                }
            }
        }
        if g != n {
            return g;
        }
    }
}

fn push_factor(out: &mut Vec<(u64, u32)>, p: u64, e: u32) {
    if let Some(slot) = out.iter_mut().find(|(q, _)| *q == p) {
        slot.1 += e;
    } else {
        out.push((p, e));
    }
}

fn rho_split(n: u64, rng: &mut ChaCha8Rng, out: &mut Vec<(u64, u32)>) {
    if n == 1 {
        return;
    }
    if is_prime_u64(n) {
        push_factor(out, n, 1);
        return;
    }
    let d = pollard_brent(n, rng);
    rho_split(d, rng, out);
    rho_split(n / d, rng, out);
}

/// Factors a positive rational integer as sorted `(prime, exponent)` pairs.
pub fn factor_u64(mut n: u64) -> Vec<(u64, u32)> {
    let mut out = Vec::new();
    if n <= 1 {
        return out;
    }
    for p in [2u64, 3, 5] {
        let mut e = 0;
        while n % p == 0 {
            n /= p;
            e += 1;
        }
        if e > 0 {
            out.push((p, e));
        }
    }
    // Wheel over residues coprime to 30.
    const STEPS: [u64; 8] = [4, 2, 4, 2, 4, 6, 2, 6];
    let mut p = 7u64;
    let mut i = 0;
    while p <= TRIAL_DIVISION_LIMIT && p * p <= n {
        if n % p == 0 {
            let mut e = 0;
            while n % p == 0 {
                n /= p;
                e += 1;
            }
            out.push((p, e));
        }
        p += STEPS[i];
        i = (i + 1) % 8;
    }
    if n > 1 {
        let mut rng = ChaCha8Rng::seed_from_u64(n);
        rho_split(n, &mut rng, &mut out);
    }
    out.sort_unstable();
    out
}

/// Splitting type of a rational prime in `Z[ω]`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SplitResult {
    /// `p = 3 = −λ²`.
    Ramified(EisInt),
    /// `p ≡ 2 (mod 3)` stays prime; the primary associate `−p` is returned.
    Inert(EisInt),
    /// `p ≡ 1 (mod 3)` splits as `p = π·π̄`; both primary, lexicographically ordered.
    Split(EisInt, EisInt),
}

/// Splits the rational prime `p` in `Z[ω]`.
pub fn split_rational_prime(p: u64) -> LabResult<SplitResult> {
    if !is_prime_u64(p) {
        return Err(LabError::NotPrime(p));
    }
    if p == 3 {
        return Ok(SplitResult::Ramified(EisInt::lambda()));
    }
    if p % 3 == 2 {
        return Ok(SplitResult::Inert(EisInt::new(-(p as i64), 0)));
    }
    let r = cube_root_of_unity_mod(p);
    let g = crate::eisenstein::gcd(&EisInt::new(p as i64, 0), &EisInt::new(r as i64, -1))?;
    debug_assert_eq!(g.norm() as u64, p);
    let (x, y) = (g, g.conj());
    Ok(if (x.a, x.b) <= (y.a, y.b) {
        SplitResult::Split(x, y)
    } else {
        SplitResult::Split(y, x)
    })
}

/// A root of `r² + r + 1 ≡ 0 (mod p)` for a prime `p ≡ 1 (mod 3)`, found as
/// `g^{(p−1)/3}` for pseudo-random `g` drawn from a `p`-seeded generator.
pub fn cube_root_of_unity_mod(p: u64) -> u64 {
    let mut rng = ChaCha8Rng::seed_from_u64(p ^ 0x5eed_cafe);
    loop {
        let g = rng.gen_range(2..p);
        let r = pow_mod(g, (p - 1) / 3, p);
        if r != 1 {
            return r;
        }
    }
}

/// A factorization `unit · λ^k · Π πᵢ^{eᵢ}` with primary primes `πᵢ`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EisFactorization {
    /// One of the six units.
    pub unit: EisInt,
    /// Exponent of `λ`.
    pub lambda_exp: u32,
    /// Primary primes with exponents, sorted by `(norm, a, b)`.
    pub primes: Vec<(EisInt, u32)>,
}

impl EisFactorization {
    /// Multiplies the factorization back out.
    pub fn product(&self) -> EisInt {
        let mut x = self.unit * EisInt::lambda().pow(self.lambda_exp);
        for (p, e) in &self.primes {
            x = x * p.pow(*e);
        }
        x
    }

    /// The primary part `Π πᵢ^{eᵢ}`.
    pub fn primary_part(&self) -> EisInt {
        self.primes.iter().fold(EisInt::one(), |acc, (p, e)| acc * p.pow(*e))
    }

    /// Squarefree as an ideal: every exponent (including that of `λ`) is at most one.
    pub fn is_squarefree(&self) -> bool {
        self.lambda_exp <= 1 && self.primes.iter().all(|(_, e)| *e <= 1)
    }

    /// Möbius function of the generated ideal.
    pub fn mobius(&self) -> i32 {
        if !self.is_squarefree() {
            return 0;
        }
        let k = self.primes.len() + self.lambda_exp as usize;
        if k % 2 == 0 {
            1
        } else {
            -1
        }
    }

    /// Number of ideal divisors.
    pub fn num_divisors(&self) -> u64 {
        self.primes
            .iter()
            .fold(self.lambda_exp as u64 + 1, |acc, (_, e)| acc * (*e as u64 + 1))
    }

    /// Radical, normalized as `λ^{0|1} · Π πᵢ`.
    pub fn radical(&self) -> EisInt {
        let base = if self.lambda_exp > 0 { EisInt::lambda() } else { EisInt::one() };
        self.primes.iter().fold(base, |acc, (p, _)| acc * *p)
    }

    /// Every ideal divisor, represented by `λ^j · (primary element)`.
    pub fn divisors(&self) -> Vec<EisInt> {
        let mut out = vec![EisInt::one()];
        let lam = EisInt::lambda();
        let mut lp = Vec::with_capacity(self.lambda_exp as usize + 1);
        let mut acc = EisInt::one();
        for _ in 0..=self.lambda_exp {
            lp.push(acc);
            acc = acc * lam;
        }
        for (p, e) in &self.primes {
            let mut next = Vec::with_capacity(out.len() * (*e as usize + 1));
            for d in &out {
                let mut t = *d;
                for _ in 0..=*e {
                    next.push(t);
                    t = t * *p;
                }
            }
            out = next;
        }
        let mut all = Vec::with_capacity(out.len() * lp.len());
        for l in &lp {
            for d in &out {
                all.push(*l * *d);
            }
        }
        all
    }
}

/// Bulk factorization engine: a smallest-prime-factor sieve for norms up to a
/// bound plus a memo of split primes. Falls back to [`factor_u64`] beyond the
/// sieve range.
#[derive(Clone, Debug, Default)]
pub struct Factorizer {
    spf: Vec<u32>,
    split: HashMap<u64, EisInt>,
}

impl Factorizer {
    /// Sieve for rational integers up to `limit`.
    pub fn with_sieve(limit: usize) -> Self {
        let spf = smallest_prime_factors(limit);
        Self { spf, split: HashMap::new() }
    }

    /// Sieve limit.
    pub fn limit(&self) -> usize {
        self.spf.len().saturating_sub(1)
    }

    /// Rational factorization of `n` (sieve when possible).
    pub fn factor_rational(&self, mut n: u64) -> Vec<(u64, u32)> {
        if (n as usize) < self.spf.len() {
            let mut out: Vec<(u64, u32)> = Vec::new();
            while n > 1 {
                let p = self.spf[n as usize] as u64;
                let mut e = 0;
                while n % p == 0 {
                    n /= p;
                    e += 1;
                }
                out.push((p, e));
            }
            out
        } else {
            factor_u64(n)
        }
    }

    /// One primary prime above the split rational prime `p` (memoized).
    pub fn split_prime(&mut self, p: u64) -> EisInt {
        if let Some(pi) = self.split.get(&p) {
            return *pi;
        }
        let pi = match split_rational_prime(p).expect("caller passes a prime") {
            SplitResult::Split(x, _) => x,
            _ => panic!("{p} is not split"),
        };
        self.split.insert(p, pi);
        pi
    }

    /// Preloads split primes (e.g. from an on-disk cache).
    pub fn preload(&mut self, primes: impl IntoIterator<Item = (u64, EisInt)>) {
        self.split.extend(primes);
    }

    /// Full factorization of `x ≠ 0`.
    pub fn factor(&mut self, x: &EisInt) -> LabResult<EisFactorization> {
        let (unit, lambda_exp, c) = lambda_decompose(x)?;
        let mut primes = Vec::new();
        let mut rest = c;
        for (p, e) in self.factor_rational(c.norm() as u64) {
            if p % 3 == 2 {
                // v_p(N(c)) = 2·v_p(c) for an inert p.
                primes.push((EisInt::new(-(p as i64), 0), e / 2));
                continue;
            }
            let pi = self.split_prime(p);
            let pibar = pi.conj();
            let mut e1 = 0;
            while e1 < e {
                match EisInt::exact_div(&rest, &pi) {
                    Some(q) => {
                        rest = q;
                        e1 += 1;
                    }
                    None => break,
                }
            }
            if e1 > 0 {
                primes.push((pi, e1));
            }
            if e > e1 {
                primes.push((pibar, e - e1));
            }
        }
        primes.sort_by_key(|(p, _)| (p.norm(), p.a, p.b));
        Ok(EisFactorization { unit, lambda_exp, primes })
    }
}

/// Smallest-prime-factor table for `0..=limit` (`spf[0] = spf[1] = 0`).
pub fn smallest_prime_factors(limit: usize) -> Vec<u32> {
    let mut spf = vec![0u32; limit + 1];
    let mut primes: Vec<u32> = Vec::new();
    for i in 2..=limit {
        if spf[i] == 0 {
            spf[i] = i as u32;
            primes.push(i as u32);
        }
        let si = spf[i];
        for &p in &primes {
            let ip = i * p as usize;
            if p > si || ip > limit {
                break;
            }
            spf[ip] = p;
        }
    }
    spf
}

/// All rational primes up to `limit` (inclusive).
pub fn primes_up_to(limit: u64) -> Vec<u64> {
    if limit < 2 {
        return Vec::new();
    }
    let n = limit as usize;
    let mut comp = vec![false; n + 1];
    let mut out = Vec::new();
    for i in 2..=n {
        if !comp[i] {
            out.push(i as u64);
            let mut j = i * i;
            while j <= n {
                comp[j] = true;
                j += i;
            }
        }
    }
    out
}

/// Factors `x ≠ 0` (trial division and Pollard rho on the norm).
pub fn factor(x: &EisInt) -> LabResult<EisFactorization> {
    Factorizer::default().factor(x)
}

/// `true` iff the ideal `(x)` is squarefree.
pub fn is_squarefree(x: &EisInt) -> LabResult<bool> {
    Ok(factor(x)?.is_squarefree())
}

/// Möbius function of the ideal `(x)`.
pub fn mobius(x: &EisInt) -> LabResult<i32> {
    Ok(factor(x)?.mobius())
}

/// Number of ideal divisors of `(x)`.
pub fn num_divisors(x: &EisInt) -> LabResult<u64> {
    Ok(factor(x)?.num_divisors())
}

/// Radical of `x`, as `λ^{0|1}` times a primary element.
pub fn radical(x: &EisInt) -> LabResult<EisInt> {
    Ok(factor(x)?.radical())
}

/// `true` iff `x` is a prime element (norm a rational prime, or an associate
/// of a rational prime `≡ 2 (mod 3)`).
pub fn is_prime_element(x: &EisInt) -> bool {
    if x.is_zero() {
        return false;
    }
    let n = x.norm() as u64;
    if is_prime_u64(n) {
        return true;
    }
    let r = (n as f64).sqrt().round() as u64;
    r * r == n && r % 3 == 2 && is_prime_u64(r) && EisInt::new(r as i64, 0).norm() as u64 == n && {
        let p = EisInt::new(r as i64, 0);
        EisInt::exact_div(&p, x).map(|u| u.is_unit()).unwrap_or(false)
    }
}

/// One primary prime above each split rational prime `p ≤ bound`, in order of `p`.
pub fn split_prime_table(bound: u64) -> Vec<(u64, EisInt)> {
    primes_up_to(bound)
        .into_iter()
        .filter(|p| p % 3 == 1)
        .map(|p| match split_rational_prime(p) {
            Ok(SplitResult::Split(x, _)) => (p, x),
            _ => unreachable!("p ≡ 1 (mod 3) splits"),
        })
        .collect()
}

/// Writes a split-prime table as CSV with columns `p,a,b`.
pub fn write_split_prime_cache(path: &Path, table: &[(u64, EisInt)]) -> LabResult<()> {
    let mut f = std::io::BufWriter::new(std::fs::File::create(path)?);
    writeln!(f, "p,a,b")?;
    for (p, x) in table {
        writeln!(f, "{},{},{}", p, x.a, x.b)?;
    }
    f.flush()?;
    Ok(())
}

/// Reads a split-prime CSV cache, validating every row.
pub fn read_split_prime_cache(path: &Path) -> LabResult<Vec<(u64, EisInt)>> {
    let f = std::io::BufReader::new(std::fs::File::open(path)?);
    let mut out = Vec::new();
    for (i, line) in f.lines().enumerate() {
        let line = line?;
        if i == 0 {
            if line.trim() != "p,a,b" {
                return Err(LabError::InvalidInput(format!("bad split-prime header {line:?}")));
            }
            continue;
        }
        let parts: Vec<&str> = line.split(',').collect();
        let parse = |s: &str| {
            s.trim()
                .parse::<i64>()
                .map_err(|e| LabError::InvalidInput(format!("row {i}: {e}")))
        };
        if parts.len() != 3 {
            return Err(LabError::InvalidInput(format!("row {i}: expected 3 columns")));
        }
        let p = parse(parts[0])? as u64;
        let x = EisInt::new(parse(parts[1])?, parse(parts[2])?);
        if x.norm() as u64 != p || !x.is_primary() {
            return Err(LabError::InvalidInput(format!("row {i}: {x} is not a primary prime over {p}")));
        }
        out.push((p, x));
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::eisenstein::{enumerate_by_norm, ClassFilter};
    use proptest::prelude::*;

    fn e(a: i64, b: i64) -> EisInt {
        EisInt::new(a, b)
    }

    #[test]
    fn miller_rabin_matches_sieve() {
        let ps = primes_up_to(100_000);
        let set: std::collections::HashSet<u64> = ps.iter().copied().collect();
        for n in 0..100_000u64 {
            assert_eq!(is_prime_u64(n), set.contains(&n), "n = {n}");
        }
        assert!(is_prime_u64(18_446_744_073_709_551_557));
        assert!(!is_prime_u64(3_215_031_751)); // strong pseudoprime to bases 2, 3, 5, 7
    }

    #[test]
    fn rational_factorization_with_large_cofactors() {
        let n = 1_000_003u64 * 1_000_033;
        assert_eq!(factor_u64(n), vec![(1_000_003, 1), (1_000_033, 1)]);
        assert_eq!(factor_u64(360), vec![(2, 3), (3, 2), (5, 1)]);
        let big = 4_294_967_291u64 * 4_294_967_279;
        assert_eq!(factor_u64(big), vec![(4_294_967_279, 1), (4_294_967_291, 1)]);
    }

    #[test]
    fn splitting_examples() {
        assert_eq!(split_rational_prime(3).unwrap(), SplitResult::Ramified(e(1, 2)));
        assert_eq!(split_rational_prime(2).unwrap(), SplitResult::Inert(e(-2, 0)));
        match split_rational_prime(7).unwrap() {
            SplitResult::Split(x, y) => {
                assert_eq!((x, y), (e(-2, -3), e(1, 3)));
                assert_eq!(x * y, e(7, 0));
                assert_eq!((x.norm(), y.norm()), (7, 7));
            }
            other => panic!("unexpected {other:?}"),
        }
        assert!(matches!(split_rational_prime(9), Err(LabError::NotPrime(9))));
    }

    #[test]
    fn factor_examples() {
        let f1 = factor(&EisInt::one()).unwrap();
        assert_eq!((f1.unit, f1.lambda_exp, f1.primes.len()), (EisInt::one(), 0, 0));
        let f3 = factor(&e(-3, 0)).unwrap();
        assert_eq!(f3.lambda_exp, 2);
        assert!(f3.primes.is_empty());
        assert_eq!(f3.product(), e(-3, 0));
        let f10 = factor(&e(10, 0)).unwrap();
        assert_eq!(f10.primes, vec![(e(-2, 0), 1), (e(-5, 0), 1)]);
        assert_eq!(f10.product(), e(10, 0));
        assert!(matches!(factor(&EisInt::zero()), Err(LabError::ZeroInput)));
    }

    #[test]
    fn multiplicative_function_examples() {
        assert_eq!(mobius(&EisInt::one()).unwrap(), 1);
        assert!(is_squarefree(&e(10, 0)).unwrap());
        assert_eq!(mobius(&e(49, 0)).unwrap(), 0);
        assert_eq!(num_divisors(&e(49, 0)).unwrap(), 9);
        // 49 = (π·π̄)² with π·π̄ = 7.
        assert_eq!(radical(&e(49, 0)).unwrap(), e(7, 0));
    }

    #[test]
    fn every_small_element_factors_back() {
        let mut fz = Factorizer::with_sieve(100_000);
        for x in enumerate_by_norm(100_000, ClassFilter::All).iter().step_by(7) {
            let f = fz.factor(x).unwrap();
            assert_eq!(f.product(), *x);
            for (p, _) in &f.primes {
                assert!(p.is_primary() && is_prime_element(p), "{p}");
            }
        }
    }

    #[test]
    fn divisor_count_matches_brute_force() {
        let elems = enumerate_by_norm(2_000, ClassFilter::All);
        for x in enumerate_by_norm(10_000, ClassFilter::All).iter().step_by(53) {
            let n = x.norm();
            let mut count = 0u64;
            let r = (2.0 * (n as f64).sqrt()).ceil() as i64 + 1;
            for a in -r..=r {
                for b in -r..=r {
                    let d = e(a, b);
                    let nd = d.norm();
                    if nd > 0 && n % nd == 0 && d.divides(x) {
                        count += 1;
                    }
                }
            }
            assert_eq!(num_divisors(x).unwrap(), count / 6, "x = {x}");
        }
        assert!(!elems.is_empty());
    }

    #[test]
    fn split_cache_round_trip() {
        let table = split_prime_table(500);
        let dir = std::env::temp_dir().join(format!("cubic-lab-split-{}", std::process::id()));
        std::fs::create_dir_all(&dir).unwrap();
        let path = dir.join("split.csv");
        write_split_prime_cache(&path, &table).unwrap();
        assert_eq!(read_split_prime_cache(&path).unwrap(), table);
        std::fs::remove_dir_all(&dir).unwrap();
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(1000))]
        #[test]
        fn mobius_sums_to_unit_indicator(a in -300i64..300, b in -300i64..300) {
            let x = e(a, b);
            prop_assume!(!x.is_zero());
            let f = factor(&x).unwrap();
            let s: i32 = f.divisors().iter().map(|d| mobius(d).unwrap()).sum();
            prop_assert_eq!(s, if x.is_unit() { 1 } else { 0 });
            for d in f.divisors() {
                prop_assert!(d.divides(&x));
            }
        }
    }
}
