//! Central values `L(1/2, χ_q)` through the balanced approximate functional
//! equation, the diagonal quantity `A₂(q)` used as its oracle, and
//! `L(s, χ_q)` on the critical strip through the general smoothed form.
//!
//! Ideals coprime to `λ` are represented by their primary generators. Since
//! `χ_q(λ) = 1` for `q ≡ 1 (mod 9)`, an ideal `(λ^g n)` contributes `χ_q(n)`
//! with norm `3^g N(n)`.

use std::collections::HashMap;
use std::f64::consts::PI;
use std::fmt::Write as _;
use std::path::Path;
use std::sync::{Arc, RwLock};

use num_complex::Complex64;

use crate::eisenstein::{enumerate_by_norm, ClassFilter, EisInt};
use crate::error::{LabError, LabResult};
use crate::factorization::factor;
use crate::gauss::{g3_tilde, in_family_f3};
use crate::special::{erfc, gamma};
use crate::symbol::{symbol_unchecked, CubicSymbolValue, OMEGA_POWERS};
use crate::weights::{phi_fast, VsKernel, DEFAULT_A};

/// Default truncation: `N(𝔫) ≤ 6·√(3N(q))`, where `Φ₁(6) < 10⁻¹⁷`.
pub const DEFAULT_TRUNCATION: f64 = 6.0;
/// `A₂` is an `O(N(q) log N(q))` oracle; it is refused above this norm.
pub const A2_CAP: i64 = 10_000;
/// `A₂` keeps `N(𝔫₁𝔫₂) ≤ 3N(q)·6`, where `Φ₂(6) < 10⁻¹³`.
pub const A2_TRUNCATION: f64 = 6.0;
/// Strip sums keep `N(𝔫) ≤ STRIP_TRUNCATION·√(3N(q₁q₂))·max(Y, 1/Y)`;
/// `V_s` decays only like a power, see [`strip_tail_scale`].
pub const STRIP_TRUNCATION: f64 = 400.0;

/// Residue of `ζ_{Q(ω)}` at `s = 1`: ideals of norm `≤ x` number `~ ρx`.
const IDEAL_DENSITY: f64 = 0.604_599_788_078_072_6;

/// Primary elements of norm `≤ bound`, ordered by norm, each composite one
/// linked to a primary prime factor and the complementary cofactor.
#[derive(Clone, Debug)]
pub struct PrimaryTable {
    bound: i64,
    elems: Vec<EisInt>,
    norms: Vec<i64>,
    /// For composite entries, `(prime index, cofactor index)`; `None` for
    /// primes and for `1` (index 0).
    links: Vec<Option<(u32, u32)>>,
}

impl PrimaryTable {
    /// Builds the table by a sieve over primary primes in norm order.
    pub fn new(bound: i64) -> Self {
        let elems = enumerate_by_norm(bound.max(1), ClassFilter::Primary);
        let norms: Vec<i64> = elems.iter().map(|x| x.norm()).collect();
        let index: HashMap<EisInt, u32> =
            elems.iter().enumerate().map(|(i, x)| (*x, i as u32)).collect();
        let mut links: Vec<Option<(u32, u32)>> = vec![None; elems.len()];
        for i in 1..elems.len() {
            if links[i].is_some() {
                continue;
            }
            // Unmarked after all smaller norms were processed: a prime.
            let p = elems[i];
            let np = norms[i];
            for j in 0..elems.len() {
                if norms[j] > bound / np {
                    break;
                }
                let prod = p * elems[j];
                if let Some(&k) = index.get(&prod) {
                    let k = k as usize;
                    if links[k].is_none() && k != i {
                        links[k] = Some((i as u32, j as u32));
                    }
                }
            }
        }
        Self { bound, elems, norms, links }
    }

    /// Largest norm covered.
    pub fn bound(&self) -> i64 {
        self.bound
    }

    /// Number of entries (including `1`).
    pub fn len(&self) -> usize {
        self.elems.len()
    }

    /// `true` if only `1` is present.
    pub fn is_empty(&self) -> bool {
        self.elems.len() <= 1
    }

    /// Entries with norm `≤ n`.
    pub fn count_up_to(&self, n: i64) -> usize {
        self.norms.partition_point(|&m| m <= n)
    }

    /// Element at index `i`.
    pub fn element(&self, i: usize) -> EisInt {
        self.elems[i]
    }

    /// Norm at index `i`.
    pub fn norm(&self, i: usize) -> i64 {
        self.norms[i]
    }

    /// `χ_q(n)` for the first `len` entries, as exponents of `ω` (`3` = zero),
    /// evaluated by the symbol on primes and multiplicativity elsewhere.
    pub fn character_exponents(&self, q: &EisInt, len: usize) -> Vec<u8> {
        let len = len.min(self.elems.len());
        let mut out = vec![0u8; len];
        for i in 1..len {
            out[i] = match self.links[i] {
                None => match symbol_unchecked(self.elems[i], *q) {
                    CubicSymbolValue::Zero => 3,
                    CubicSymbolValue::Root(k) => k,
                },
                Some((p, c)) => {
                    let (a, b) = (out[p as usize], out[c as usize]);
                    if a == 3 || b == 3 {
                        3
                    } else {
                        (a + b) % 3
                    }
                }
            };
        }
        out
    }
}

/// Table shared between evaluations; grows on demand.
fn shared_table(bound: i64) -> Arc<PrimaryTable> {
    static CELL: RwLock<Option<Arc<PrimaryTable>>> = RwLock::new(None);
    if let Some(t) = CELL.read().expect("table lock").as_ref() {
        if t.bound >= bound {
            return Arc::clone(t);
        }
    }
    let mut guard = CELL.write().expect("table lock");
    if let Some(t) = guard.as_ref() {
        if t.bound >= bound {
            return Arc::clone(t);
        }
    }
    let t = Arc::new(PrimaryTable::new(bound));
    *guard = Some(Arc::clone(&t));
    t
}

/// Checks `q ∈ F₃′`: primary, `≡ 1 (mod 9)`, squarefree, `q ≠ 1`.
pub fn check_f3prime(q: &EisInt) -> LabResult<()> {
    if q.is_zero() || !q.is_primary() || *q == EisInt::one() || q.mod9() != EisInt::one() {
        return Err(LabError::NotInFamily(*q));
    }
    if !factor(q)?.is_squarefree() {
        return Err(LabError::NotInFamily(*q));
    }
    Ok(())
}

/// `∫_T^∞ y^{−1/2} erfc(√(2πy)) dy` (Simpson; the integrand is below
/// `10⁻⁴⁰` after `T + 15`).
fn phi1_tail_integral(t: f64) -> f64 {
    let n = 3000;
    let h = 15.0 / n as f64;
    let f = |y: f64| erfc((2.0 * PI * y).sqrt()) / y.sqrt();
    let mut s = f(t) + f(t + 15.0);
    for i in 1..n {
        s += f(t + i as f64 * h) * if i % 2 == 1 { 4.0 } else { 2.0 };
    }
    s * h / 3.0
}

/// One central value with its diagnostics.
#[derive(Clone, Debug, PartialEq)]
pub struct LValueRecord {
    /// Family element.
    pub q: EisInt,
    /// `N(q)` (the conductor of `χ_q` for squarefree `q`).
    pub conductor_norm: i64,
    /// `L(1/2, χ_q)`.
    pub l_half: Complex64,
    /// `A₁(q)`.
    pub a1: Complex64,
    /// `A₂(q)` when computed.
    pub a2: Option<f64>,
    /// Ideals summed in `A₁`.
    pub terms_used: u64,
    /// Bound on the truncation plus rounding error of `l_half`.
    pub afe_tail_bound: f64,
}

/// Central-value evaluator sharing one primary table.
#[derive(Clone, Debug)]
pub struct LEngine {
    table: Arc<PrimaryTable>,
    truncation: f64,
}

impl LEngine {
    /// Evaluator able to handle conductors of norm `≤ max_norm` at the
    /// given truncation `T`.
    pub fn new(max_norm: i64, truncation: f64) -> Self {
        let bound = (truncation * (3.0 * max_norm as f64).sqrt()).ceil() as i64;
        Self { table: shared_table(bound), truncation }
    }

    /// Evaluator with the default truncation.
    pub fn with_default_truncation(max_norm: i64) -> Self {
        Self::new(max_norm, DEFAULT_TRUNCATION)
    }

    /// Truncation constant `T`.
    pub fn truncation(&self) -> f64 {
        self.truncation
    }

    fn ensure(&self, bound: i64) -> Arc<PrimaryTable> {
        if bound <= self.table.bound {
            Arc::clone(&self.table)
        } else {
            shared_table(bound)
        }
    }

    /// `A₁(q)`, the number of ideals summed, and `Σ|terms|`.
    fn a1_parts(&self, q: &EisInt) -> (Complex64, u64, f64) {
        let scale = (3.0 * q.norm() as f64).sqrt();
        let limit = self.truncation * scale;
        let bound = limit.floor() as i64;
        let table = self.ensure(bound);
        let len = table.count_up_to(bound);
        let chi = table.character_exponents(q, len);
        let mut bins = [0.0f64; 3];
        let mut terms = 0u64;
        let mut abs_sum = 0.0;
        let mut i = 0;
        while i < len {
            let n = table.norms[i];
            // Weight of all ideals λ^g·(n) sharing N(n) = n.
            let mut w = 0.0;
            let mut m = n as f64;
            let mut g_terms = 0u64;
            while m <= limit {
                w += erfc((2.0 * PI * m / scale).sqrt()) / m.sqrt();
                m *= 3.0;
                g_terms += 1;
            }
            while i < len && table.norms[i] == n {
                if chi[i] != 3 {
                    bins[chi[i] as usize] += w;
                    terms += g_terms;
                    abs_sum += w;
                }
                i += 1;
            }
        }
        let a1 = OMEGA_POWERS[0] * bins[0] + OMEGA_POWERS[1] * bins[1] + OMEGA_POWERS[2] * bins[2];
        (a1, terms, abs_sum)
    }

    /// `A₁(q) = Σ χ_q(𝔫) N(𝔫)^{−1/2} Φ₁(N(𝔫)/√(3N(q)))` over `N(𝔫) ≤ T√(3N(q))`.
    pub fn a1(&self, q: &EisInt) -> LabResult<Complex64> {
        check_f3prime(q)?;
        Ok(self.a1_parts(q).0)
    }

    /// Error bound for `l_half` at this truncation: twice the `A₁` tail
    /// estimated with twice the ideal density, plus a rounding allowance
    /// proportional to `Σ_{N(𝔫) ≤ B} N(𝔫)^{−1/2} ≤ 4√B + 1`.
    pub fn tail_bound(&self, q: &EisInt) -> f64 {
        let scale = (3.0 * q.norm() as f64).sqrt();
        let tail = 2.0 * IDEAL_DENSITY * scale.sqrt() * phi1_tail_integral(self.truncation);
        let abs_sum = 4.0 * (self.truncation * scale).sqrt() + 1.0;
        2.0 * tail + 64.0 * f64::EPSILON * abs_sum
    }

    /// Full record for `q ∈ F₃′` (without `A₂`).
    pub fn record(&self, q: &EisInt) -> LabResult<LValueRecord> {
        check_f3prime(q)?;
        Ok(self.record_unchecked(q))
    }

    /// Record for an element already known to lie in `F₃′`.
    pub fn record_unchecked(&self, q: &EisInt) -> LValueRecord {
        let (a1, terms, _) = self.a1_parts(q);
        let w = g3_tilde(&EisInt::one(), q).expect("q primary, coprime to λ");
        LValueRecord {
            q: *q,
            conductor_norm: q.norm(),
            l_half: a1 + w * a1.conj(),
            a1,
            a2: None,
            terms_used: terms,
            afe_tail_bound: self.tail_bound(q),
        }
    }

    /// `L(1/2, χ_q) = A₁(q) + g̃₃(q)·conj(A₁(q))`.
    pub fn l_half(&self, q: &EisInt) -> LabResult<Complex64> {
        Ok(self.record(q)?.l_half)
    }
}

/// `A₁(q)` with the default truncation.
pub fn a1(q: &EisInt) -> LabResult<Complex64> {
    LEngine::with_default_truncation(q.norm()).a1(q)
}

/// `L(1/2, χ_q)` with the default truncation.
pub fn l_half(q: &EisInt) -> LabResult<Complex64> {
    LEngine::with_default_truncation(q.norm()).l_half(q)
}

/// `A₂(q)` together with the imaginary part of its accumulator.
pub fn a2_with_imaginary(q: &EisInt) -> LabResult<(f64, f64)> {
    check_f3prime(q)?;
    let nq = q.norm();
    if nq > A2_CAP {
        return Err(LabError::CapExceeded { norm: nq, cap: A2_CAP });
    }
    let three_n = 3.0 * nq as f64;
    let mmax = (A2_TRUNCATION * three_n).floor() as usize;
    let table = shared_table(mmax as i64);
    let len = table.count_up_to(mmax as i64);
    let chi = table.character_exponents(q, len);
    // b(k) = Σ_{N(𝔫) = k} χ_q(𝔫).
    let mut b = vec![Complex64::new(0.0, 0.0); mmax + 1];
    for i in 0..len {
        if chi[i] == 3 {
            continue;
        }
        let v = OMEGA_POWERS[chi[i] as usize];
        let mut m = table.norms[i] as usize;
        while m <= mmax {
            b[m] += v;
            m *= 3;
        }
    }
    let support: Vec<usize> = (1..=mmax).filter(|&k| b[k].norm_sqr() > 0.25).collect();
    let weight: Vec<f64> = (0..=mmax)
        .map(|m| if m == 0 { 0.0 } else { phi_fast(2, m as f64 / three_n) / (m as f64).sqrt() })
        .collect();
    let mut acc = Complex64::new(0.0, 0.0);
    for &k1 in &support {
        let lim = mmax / k1;
        let mut inner = Complex64::new(0.0, 0.0);
        for &k2 in support.iter().take_while(|&&k| k <= lim) {
            inner += b[k2].conj() * weight[k1 * k2];
        }
        acc += b[k1] * inner;
    }
    Ok((acc.re, acc.im))
}

/// `A₂(q) = ΣΣ χ_q(𝔫₁) conj χ_q(𝔫₂) N(𝔫₁𝔫₂)^{−1/2} Φ₂(N(𝔫₁𝔫₂)/(3N(q)))`.
pub fn a2(q: &EisInt) -> LabResult<f64> {
    Ok(a2_with_imaginary(q)?.0)
}

/// Record including `A₂` (small conductors only).
pub fn record_with_a2(q: &EisInt) -> LabResult<LValueRecord> {
    let mut rec = LEngine::with_default_truncation(q.norm()).record(q)?;
    rec.a2 = Some(a2(q)?);
    Ok(rec)
}

/// Size of the truncation error of [`l_strip`] relative to `√N`-normalized
/// terms: `|V_s(y)|` for the largest dropped argument.
pub fn strip_tail_scale(s: Complex64) -> LabResult<f64> {
    Ok(VsKernel::new(s, DEFAULT_A)?.eval(STRIP_TRUNCATION).norm())
}

/// `L(s, χ_q)` for `q = q₁q₂² ∈ F₃` and `0 ≤ Re s ≤ 1`, from the smoothed
/// functional equation with weights `V_s`, `V_{1−s}` and balance `Y`.
pub fn l_strip(q1: &EisInt, q2: &EisInt, s: Complex64, y: f64) -> LabResult<Complex64> {
    if !(0.0..=1.0).contains(&s.re) {
        return Err(LabError::OutOfStrip(s.re));
    }
    if !(y > 0.0) {
        return Err(LabError::InvalidInput(format!("balance parameter must be positive, got {y}")));
    }
    if !in_family_f3(q1, q2) {
        return Err(LabError::NotInFamily(*q1 * *q2 * *q2));
    }
    let q = *q1 * *q2 * *q2;
    let cond = (*q1 * *q2).norm() as f64;
    let scale = (3.0 * cond).sqrt();
    let bound = (STRIP_TRUNCATION * scale * y.max(1.0 / y)).ceil() as i64;
    let one = Complex64::new(1.0, 0.0);
    let vs = VsKernel::new(s, DEFAULT_A)?;
    let v1s = VsKernel::new(one - s, DEFAULT_A)?;

    let table = shared_table(bound);
    let len = table.count_up_to(bound);
    let chi = table.character_exponents(&q, len);
    let mut b: HashMap<i64, Complex64> = HashMap::new();
    for i in 0..len {
        if chi[i] == 3 {
            continue;
        }
        let mut m = table.norms[i];
        while m <= bound {
            *b.entry(m).or_default() += OMEGA_POWERS[chi[i] as usize];
            m *= 3;
        }
    }
    let mut norms: Vec<i64> = b.keys().copied().collect();
    norms.sort_unstable();
    let mut first = Complex64::new(0.0, 0.0);
    let mut second = Complex64::new(0.0, 0.0);
    for m in norms {
        let c = b[&m];
        if c.norm_sqr() < 1e-20 {
            continue;
        }
        let mf = m as f64;
        let ln_m = mf.ln();
        first += c * (-s * ln_m).exp() * vs.eval(mf / (y * scale));
        second += c.conj() * ((s - 1.0) * ln_m).exp() * v1s.eval(y * mf / scale);
    }
    let root = g3_tilde(&EisInt::one(), q1)? * g3_tilde(&EisInt::one(), q2)?.conj();
    let factor = ((0.5 - s) * (3.0 * cond).ln()).exp()
        * ((2.0 * s - 1.0) * (2.0 * PI).ln()).exp()
        * gamma(one - s)
        / gamma(s)
        * root;
    Ok(first + factor * second)
}

/// Identifies the parameters a cache file was computed with.
#[derive(Clone, Debug, PartialEq)]
pub struct CacheKey {
    /// Scale `X` of the family window.
    pub x: f64,
    /// Truncation constant `T`.
    pub truncation: f64,
    /// Test-function name.
    pub f_kind: String,
}

impl CacheKey {
    fn header(&self) -> String {
        format!("# lvalue-cache x={:e} truncation={:e} f={}", self.x, self.truncation, self.f_kind)
    }
}

const CACHE_COLUMNS: &str = "a,b,conductor_norm,re_L,im_L,terms_used";

/// Writes records as CSV with the key in a comment header; floats carry
/// 17 significant digits so reading reproduces them exactly.
pub fn write_lvalue_cache(path: &Path, key: &CacheKey, records: &[LValueRecord]) -> LabResult<()> {
    let mut out = String::new();
    let _ = writeln!(out, "{}", key.header());
    let _ = writeln!(out, "{CACHE_COLUMNS}");
    for r in records {
        let _ = writeln!(
            out,
            "{},{},{},{:.16e},{:.16e},{}",
            r.q.a, r.q.b, r.conductor_norm, r.l_half.re, r.l_half.im, r.terms_used
        );
    }
    std::fs::write(path, out)?;
    Ok(())
}

/// Reads a cache written by [`write_lvalue_cache`]; `CacheMismatch` if its
/// key differs from `expected`. Only `q`, `l_half` and `terms_used` are
/// restored; the other fields are left empty.
pub fn read_lvalue_cache(path: &Path, expected: &CacheKey) -> LabResult<Vec<(EisInt, Complex64, u64)>> {
    let text = std::fs::read_to_string(path)?;
    let mut lines = text.lines();
    let header = lines.next().unwrap_or("");
    if header != expected.header() {
        return Err(LabError::CacheMismatch(format!("expected `{}`, found `{header}`", expected.header())));
    }
    if lines.next() != Some(CACHE_COLUMNS) {
        return Err(LabError::CacheMismatch(format!("unexpected columns in {}", path.display())));
    }
    let bad = |l: &str| LabError::InvalidInput(format!("malformed cache row: {l}"));
    let mut out = Vec::new();
    for line in lines.filter(|l| !l.trim().is_empty()) {
        let f: Vec<&str> = line.split(',').collect();
        if f.len() != 6 {
            return Err(bad(line));
        }
        let a: i64 = f[0].parse().map_err(|_| bad(line))?;
        let b: i64 = f[1].parse().map_err(|_| bad(line))?;
        let re: f64 = f[3].parse().map_err(|_| bad(line))?;
        let im: f64 = f[4].parse().map_err(|_| bad(line))?;
        let terms: u64 = f[5].parse().map_err(|_| bad(line))?;
        out.push((EisInt::new(a, b), Complex64::new(re, im), terms));
    }
    Ok(out)
}
