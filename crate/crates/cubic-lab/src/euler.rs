//! Zeta functions of `Q(ω)`, the local factors `r, g, h, G, H, η`, and the
//! Euler-product constants `C`, `D`, `c₀`, `𝒫` of the moment main terms.
//!
//! Products run over prime ideals `𝔭 ∤ 3`: a split rational prime
//! `p ≡ 1 (mod 3)` contributes two ideals of norm `p`, an inert `p ≡ 2 (mod 3)`
//! one ideal of norm `p²`. Logarithms of the factors are accumulated with
//! compensated summation over fixed shards merged in index order, so results
//! are independent of the worker count.
//!
//! The factors of `C` and `D` are `1 + O(q^{−3/2})`, whose truncated products
//! still move by about `B^{−1/2}/log B` past a bound `B`. Each reported value
//! therefore includes the tail `∫_B^∞ log f(x) dx/log x` predicted by the
//! prime ideal theorem; the raw truncated product is reported alongside.

use std::f64::consts::PI;

use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{LabError, LabResult};
use crate::factorization::primes_up_to;
use crate::special::gamma;

const BERNOULLI_2K: [f64; 10] = [
    1.0 / 6.0,
    -1.0 / 30.0,
    1.0 / 42.0,
    -1.0 / 30.0,
    5.0 / 66.0,
    -691.0 / 2730.0,
    7.0 / 6.0,
    -3617.0 / 510.0,
    43867.0 / 798.0,
    -174611.0 / 330.0,
];

/// Hurwitz zeta `ζ(s, a) = Σ_{n≥0} (n+a)^{−s}` for real `s > 1`, `a > 0`,
/// by Euler–Maclaurin summation.
pub fn hurwitz_zeta(s: f64, a: f64) -> LabResult<f64> {
    if !(s > 1.0) {
        return Err(LabError::DivergentArgument(s));
    }
    let n = 40usize;
    let mut sum: f64 = (0..n).map(|k| (k as f64 + a).powf(-s)).sum();
    let x = n as f64 + a;
    sum += x.powf(1.0 - s) / (s - 1.0) + 0.5 * x.powf(-s);
    // Σ B_{2k}/(2k)! · s(s+1)…(s+2k−2) · x^{−s−2k+1}
    let mut rising = s; // s(s+1)…(s+2k−2) for k = 1
    let mut fact = 2.0; // (2k)!
    for (k, b) in BERNOULLI_2K.iter().enumerate() {
        let k = k + 1;
        sum += b / fact * rising * x.powf(-s - 2.0 * k as f64 + 1.0);
        rising *= (s + 2.0 * k as f64 - 1.0) * (s + 2.0 * k as f64);
        fact *= (2 * k + 1) as f64 * (2 * k + 2) as f64;
    }
    Ok(sum)
}

/// Riemann zeta `ζ(s)`, `s > 1`.
pub fn zeta(s: f64) -> LabResult<f64> {
    hurwitz_zeta(s, 1.0)
}

/// `L(s, χ₋₃) = 3^{−s}(ζ(s, 1/3) − ζ(s, 2/3))`, `s > 1`.
pub fn l_chi_minus3(s: f64) -> LabResult<f64> {
    Ok(3f64.powf(-s) * (hurwitz_zeta(s, 1.0 / 3.0)? - hurwitz_zeta(s, 2.0 / 3.0)?))
}

/// Dedekind zeta `ζ_{Q(ω)}(s) = ζ(s)·L(s, χ₋₃)`, `s > 1`.
pub fn zeta_k(s: f64) -> LabResult<f64> {
    Ok(zeta(s)? * l_chi_minus3(s)?)
}

/// `ζ_λ(s) = Σ_{c ≡ 1 (3)} N(c)^{−s} = (1 − 3^{−s})·ζ_{Q(ω)}(s)`.
pub fn zeta_lambda(s: f64) -> LabResult<f64> {
    Ok((1.0 - 3f64.powf(-s)) * zeta_k(s)?)
}

/// `ζ_λ(s)` by direct summation over primary `c` with `N(c) ≤ bound`
/// (an independent oracle for the identity above).
pub fn zeta_lambda_partial(s: f64, bound: i64) -> f64 {
    crate::eisenstein::enumerate_by_norm(bound, crate::eisenstein::ClassFilter::Primary)
        .iter()
        .map(|c| (c.norm() as f64).powf(-s))
        .sum()
}

/// `c₀ = (2π)^{5/3} / (8·3^{9/2}·Γ(2/3)·ζ_{Q(ω)}(2))`.
pub fn c0() -> f64 {
    let g23 = gamma(Complex64::new(2.0 / 3.0, 0.0)).re;
    (2.0 * PI).powf(5.0 / 3.0) / (8.0 * 3f64.powf(4.5) * g23 * zeta_k(2.0).expect("s = 2"))
}

/// Local multiplicative functions on prime ideals.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum MultFn {
    /// `r(𝔭^k) = q^{5/2}/(q^{5/2} + q^{3/2} − 1)`.
    R,
    /// `g(𝔭^k)`.
    SmallG,
    /// `h(𝔭^k)`.
    SmallH,
    /// `G(𝔭) = r(𝔭)/√q − h(𝔭)`.
    BigG,
    /// `H(𝔭) = g(𝔭) − h(𝔭)²/q`.
    BigH,
    /// `η(𝔭) = h(𝔭)² log q/(q H(𝔭))`.
    Eta,
}

impl MultFn {
    /// Parses `r|g|h|G|H|eta`.
    pub fn parse(s: &str) -> LabResult<Self> {
        Ok(match s {
            "r" => MultFn::R,
            "g" => MultFn::SmallG,
            "h" => MultFn::SmallH,
            "G" => MultFn::BigG,
            "H" => MultFn::BigH,
            "eta" => MultFn::Eta,
            _ => return Err(LabError::InvalidInput(format!("unknown multiplicative function {s:?}"))),
        })
    }
}

fn is_prime_ideal_norm(q: u64) -> bool {
    use crate::factorization::is_prime_u64;
    if is_prime_u64(q) {
        return q % 3 == 1;
    }
    let r = (q as f64).sqrt().round() as u64;
    r * r == q && is_prime_u64(r) && r % 3 == 2
}

fn local_r(q: f64) -> f64 {
    let q52 = q.powf(2.5);
    q52 / (q52 + q.powf(1.5) - 1.0)
}

fn local_den(q: f64) -> f64 {
    q.powf(3.5) + q.powf(2.5) + q * q - q.powf(1.5) - q + 1.0
}

fn local_g(q: f64) -> f64 {
    1.0 - (q.powf(1.5) - 1.0) * (q - 1.0) / local_den(q)
}

fn local_h(q: f64) -> f64 {
    1.0 + (q * q - q.powf(1.5) + 1.0) * (q - 1.0) / local_den(q)
}

fn local_big_g(q: f64) -> f64 {
    local_r(q) / q.sqrt() - local_h(q)
}

fn local_big_h(q: f64) -> f64 {
    local_g(q) - local_h(q).powi(2) / q
}

fn local_eval(f: MultFn, q: f64) -> f64 {
    match f {
        MultFn::R => local_r(q),
        MultFn::SmallG => local_g(q),
        MultFn::SmallH => local_h(q),
        MultFn::BigG => local_big_g(q),
        MultFn::BigH => local_big_h(q),
        MultFn::Eta => local_h(q).powi(2) * q.ln() / (q * local_big_h(q)),
    }
}

/// Evaluates a local function at a prime ideal of norm `q` (coprime to 3).
pub fn mult_fn(f: MultFn, q: u64) -> LabResult<f64> {
    if q == 3 {
        return Err(LabError::RamifiedPrime);
    }
    if !is_prime_ideal_norm(q) {
        return Err(LabError::InvalidInput(format!("{q} is not the norm of a prime ideal")));
    }
    Ok(local_eval(f, q as f64))
}

/// Local factor evaluation without input validation (hot loops).
#[inline]
pub fn mult_fn_unchecked(f: MultFn, q: f64) -> f64 {
    local_eval(f, q)
}

/// Norms of all prime ideals coprime to 3 with norm `≤ bound`, ascending
/// (split norms appear twice).
pub fn prime_ideal_norms(bound: u64) -> Vec<u64> {
    let mut out = Vec::new();
    for p in primes_up_to(bound) {
        match p % 3 {
            1 => {
                out.push(p);
                out.push(p);
            }
            2 if p.saturating_mul(p) <= bound => out.push(p * p),
            _ => {}
        }
    }
    out.sort_unstable();
    out
}

/// `li(x) = ∫₂^x dt/log t + li(2)`, by Ramanujan's series.
pub fn li(x: f64) -> f64 {
    let l = x.ln();
    let gamma_e = 0.577_215_664_901_532_9;
    // Σ_{n≥1} (−1)^{n−1} lⁿ/(n!·2^{n−1}) · Σ_{k≤(n−1)/2} 1/(2k+1)
    let mut sum = 0.0;
    let mut coef = 1.0; // lⁿ/(n!·2^{n−1})
    let mut inner = 0.0;
    for n in 1..400 {
        coef *= if n == 1 { l } else { l / (n as f64 * 2.0) };
        if (n - 1) % 2 == 0 {
            inner += 1.0 / n as f64;
        }
        let t = coef * inner;
        sum += if n % 2 == 1 { t } else { -t };
        if n as f64 > 2.0 * l && t < 1e-18 * sum.abs() {
            break;
        }
    }
    gamma_e + l.ln() + x.sqrt() * sum
}

/// Neumaier-compensated sum.
#[derive(Clone, Copy, Debug, Default)]
pub struct CompensatedSum {
    sum: f64,
    comp: f64,
}

impl CompensatedSum {
    /// Adds one term.
    #[inline]
    pub fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.comp += (self.sum - t) + x;
        } else {
            self.comp += (x - t) + self.sum;
        }
        self.sum = t;
    }

    /// Merges another accumulator.
    pub fn merge(&mut self, other: &CompensatedSum) {
        self.add(other.sum);
        self.add(other.comp);
    }

    /// Current total.
    pub fn value(&self) -> f64 {
        self.sum + self.comp
    }
}

/// Shard length for deterministic parallel accumulation.
const SHARD: usize = 4096;

/// `Σ log(1 + δ(q))` over the given norms: shards in parallel, merged in order.
pub fn log_product(norms: &[u64], delta: impl Fn(f64) -> f64 + Sync) -> f64 {
    let shards: Vec<CompensatedSum> = norms
        .par_chunks(SHARD)
        .map(|chunk| {
            let mut acc = CompensatedSum::default();
            for &q in chunk {
                acc.add(delta(q as f64).ln_1p());
            }
            acc
        })
        .collect();
    let mut total = CompensatedSum::default();
    for s in &shards {
        total.merge(s);
    }
    total.value()
}

/// Estimated `Σ_{N(𝔭) > bound} log(1 + δ(N(𝔭)))` from the prime ideal theorem:
/// degree-one ideals with density `1/log x`, plus inert ideals `p²` with
/// density `1/(2 log p)` in `p`.
pub fn log_tail(bound: u64, delta: impl Fn(f64) -> f64) -> f64 {
    // Degree-one part: integrate in u = log x over [log B, log B + 70].
    let simpson = |g: &dyn Fn(f64) -> f64, a: f64, b: f64, n: usize| {
        let h = (b - a) / n as f64;
        let mut s = g(a) + g(b);
        for i in 1..n {
            s += g(a + i as f64 * h) * if i % 2 == 1 { 4.0 } else { 2.0 };
        }
        s * h / 3.0
    };
    let u0 = (bound as f64).ln();
    let deg1 = |u: f64| {
        let x = u.exp();
        delta(x).ln_1p() * x / u
    };
    let t1 = simpson(&deg1, u0, u0 + 70.0, 14_000);
    // Inert part: p > √B, ideal norm p², density dp/log p over half the primes.
    let v0 = 0.5 * u0;
    let inert = |v: f64| {
        let p = v.exp();
        delta(p * p).ln_1p() * p / (2.0 * v)
    };
    let t2 = simpson(&inert, v0, v0 + 40.0, 8_000);
    t1 + t2
}

/// Named Euler-product constants.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ConstantName {
    /// First-moment constant `C`.
    C,
    /// Second-moment constant `D`.
    D,
    /// Patterson residue constant `c₀` (closed form).
    C0,
    /// Mollifier product `𝒫`.
    ScriptP,
}

impl ConstantName {
    /// Parses `C|D|c0|scriptP`.
    pub fn parse(s: &str) -> LabResult<Self> {
        Ok(match s {
            "C" => ConstantName::C,
            "D" => ConstantName::D,
            "c0" => ConstantName::C0,
            "scriptP" | "P" => ConstantName::ScriptP,
            _ => return Err(LabError::InvalidInput(format!("unknown constant {s:?}"))),
        })
    }

    /// Printable name.
    pub fn name(&self) -> &'static str {
        match self {
            ConstantName::C => "C",
            ConstantName::D => "D",
            ConstantName::C0 => "c0",
            ConstantName::ScriptP => "scriptP",
        }
    }
}

/// A truncated Euler product with its tail estimate.
#[derive(Clone, Debug, PartialEq)]
pub struct EulerProductResult {
    /// Best estimate: prefactor × truncated product × `exp(tail)`.
    pub value: f64,
    /// Prefactor × product over `N(𝔭) ≤ prime_norm_bound` only.
    pub truncated_value: f64,
    /// Largest prime-ideal norm included.
    pub prime_norm_bound: u64,
    /// Estimated log of the omitted factors.
    pub tail_estimate: f64,
    /// `|value(B) − value(B/2)|`.
    pub successive_diff: f64,
}

/// `c_factor(q) − 1 = q/((q+1)(q^{3/2}−1))`.
pub fn c_delta(q: f64) -> f64 {
    q / ((q + 1.0) * (q.powf(1.5) - 1.0))
}

/// Per-prime factor of `C`.
pub fn c_factor(q: f64) -> f64 {
    1.0 + c_delta(q)
}

/// `d_factor(q) − 1`.
pub fn d_delta(q: f64) -> f64 {
    -1.0 / (q * (q + 1.0)) + 2.0 * q / ((q + 1.0) * (q.powf(1.5) - 1.0))
}

/// Per-prime factor of `D`.
pub fn d_factor(q: f64) -> f64 {
    1.0 + d_delta(q)
}

/// `script_p_factor(q) − 1`, expanded so that no cancellation occurs:
/// numerator minus denominator of the closed form is
/// `−q⁴ − 2q³ + 2q^{5/2} + 2q^{3/2} − q − 1`.
pub fn script_p_delta(q: f64) -> f64 {
    let u = 1.0 / q;
    let r = u.sqrt();
    let num = -u * u - 2.0 * u.powi(3) + 2.0 * u.powi(3) * r + 2.0 * u.powi(4) * r - u.powi(5) - u.powi(6);
    let den = 1.0 + 2.0 * u + u * u - 2.0 * u * u * r - 2.0 * u.powi(3) * r + u.powi(5);
    num / den
}

/// Per-prime factor of `𝒫`:
/// `(q−1)(q+1)(q⁴+2q³+q²−2q^{3/2}+1) / (q(q^{5/2}+q^{3/2}−1)²)`.
pub fn script_p_factor(q: f64) -> f64 {
    1.0 + script_p_delta(q)
}

/// `script_p_factor_alt(q) − 1 = −1/q + (1 − 1/q)·G²/(qH)`.
pub fn script_p_alt_delta(q: f64) -> f64 {
    let g = local_big_g(q);
    -1.0 / q + (1.0 - 1.0 / q) * g * g / (q * local_big_h(q))
}

/// Per-prime factor of `𝒫` assembled from `G` and `H`: `(1 − 1/q)(1 + G²/(qH))`.
pub fn script_p_factor_alt(q: f64) -> f64 {
    1.0 + script_p_alt_delta(q)
}

/// `script_p1_factor(q) − 1`.
pub fn script_p1_delta(q: f64) -> f64 {
    let lp = script_p_delta(q).ln_1p() + 2.0 * c_delta(q).ln_1p() - d_delta(q).ln_1p();
    lp.exp_m1()
}

/// Per-prime factor of `𝒫₁`.
pub fn script_p1_factor(q: f64) -> f64 {
    1.0 + script_p1_delta(q)
}

fn prefactor(name: ConstantName) -> f64 {
    let zk2 = zeta_k(2.0).expect("s = 2");
    match name {
        ConstantName::C => PI / (36.0 * (3f64.sqrt() - 1.0) * zk2),
        ConstantName::D => PI * PI / (648.0 * (2.0 - 3f64.sqrt()) * zk2),
        ConstantName::C0 => c0(),
        ConstantName::ScriptP => 1.0,
    }
}

fn delta_fn(name: ConstantName) -> fn(f64) -> f64 {
    match name {
        ConstantName::C => c_delta,
        ConstantName::D => d_delta,
        ConstantName::ScriptP => script_p_delta,
        ConstantName::C0 => |_| 0.0,
    }
}

/// Evaluates `prefactor·Π(1 + δ(N(𝔭)))` from a precomputed norm list.
pub fn euler_product_with(
    prefactor: f64,
    norms: &[u64],
    bound: u64,
    delta: fn(f64) -> f64,
) -> EulerProductResult {
    let eval = |b: u64| {
        let end = norms.partition_point(|&q| q <= b);
        let lp = log_product(&norms[..end], delta);
        let tail = log_tail(b, delta);
        (prefactor * (lp + tail).exp(), prefactor * lp.exp(), tail)
    };
    let (value, truncated_value, tail_estimate) = eval(bound);
    let (half, _, _) = eval(bound / 2);
    EulerProductResult {
        value,
        truncated_value,
        prime_norm_bound: bound,
        tail_estimate,
        successive_diff: (value - half).abs(),
    }
}

/// `C`, `D`, `c₀` or `𝒫` with prime ideals of norm `≤ prime_bound`.
pub fn constant(name: ConstantName, prime_bound: u64) -> LabResult<EulerProductResult> {
    if prime_bound < 1000 {
        return Err(LabError::InvalidInput(format!("prime_bound {prime_bound} < 1000")));
    }
    if name == ConstantName::C0 {
        let v = c0();
        return Ok(EulerProductResult {
            value: v,
            truncated_value: v,
            prime_norm_bound: prime_bound,
            tail_estimate: 0.0,
            successive_diff: 0.0,
        });
    }
    let norms = prime_ideal_norms(prime_bound);
    Ok(euler_product_with(prefactor(name), &norms, prime_bound, delta_fn(name)))
}

/// `𝒫` from the assembled `G²/H` factors (independent of the closed form).
pub fn script_p_alternative(prime_bound: u64) -> EulerProductResult {
    let norms = prime_ideal_norms(prime_bound);
    euler_product_with(1.0, &norms, prime_bound, script_p_alt_delta)
}

/// Truncated `𝒫₁ = 𝒫·Π c_factor²/d_factor` (no tail correction).
pub fn remarkable_identity(prime_bound: u64) -> LabResult<f64> {
    if prime_bound < 1000 {
        return Err(LabError::InvalidInput(format!("prime_bound {prime_bound} < 1000")));
    }
    let norms = prime_ideal_norms(prime_bound);
    Ok(log_product(&norms, script_p1_delta).exp())
}

/// Largest `|factor(q) − 1|·q^{3/2}` over prime-ideal norms `≤ bound`.
pub fn fitted_decay_constant(name: ConstantName, bound: u64) -> f64 {
    let delta = delta_fn(name);
    prime_ideal_norms(bound)
        .into_iter()
        .map(|q| {
            let q = q as f64;
            delta(q).abs() * q.powf(1.5)
        })
        .fold(0.0, f64::max)
}

/// First-moment main term coefficient of the mollified moment,
/// `π√3/(54·ζ_{Q(ω)}(2))`.
pub fn mollified_first_moment_constant() -> f64 {
    PI * 3f64.sqrt() / (54.0 * zeta_k(2.0).expect("s = 2"))
}

/// Density of `F₃′` per unit norm: `π√3/(108·ζ_{Q(ω)}(2))`.
pub fn family_density() -> f64 {
    PI * 3f64.sqrt() / (108.0 * zeta_k(2.0).expect("s = 2"))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zeta_values() {
        assert!((zeta(2.0).unwrap() - PI * PI / 6.0).abs() < 1e-14);
        assert!((zeta(4.0).unwrap() - PI.powi(4) / 90.0).abs() < 1e-14);
        let zk = zeta_k(2.0).unwrap();
        assert!((zk - 1.285_190_955_484_149_6).abs() < 1e-12, "{zk}");
        assert!(matches!(zeta_k(1.0), Err(LabError::DivergentArgument(_))));
        assert!((zeta_lambda(2.0).unwrap() / zk - 8.0 / 9.0).abs() < 1e-12);
    }

    #[test]
    fn zeta_lambda_by_direct_summation() {
        // Tail of Σ N(c)^{-3} beyond 10⁴ is below 10⁻⁸.
        let direct = zeta_lambda_partial(3.0, 10_000);
        assert!((direct - zeta_lambda(3.0).unwrap()).abs() < 1e-8);
    }

    #[test]
    fn zeta_lambda_residue() {
        let target = 2.0 * PI / (9.0 * 3f64.sqrt());
        let vals: Vec<f64> = [1.1, 1.01, 1.001]
            .iter()
            .map(|&s| (s - 1.0) * zeta_lambda(s).unwrap())
            .collect();
        // Linear in (s − 1): Richardson with the last two points.
        let extrap = vals[2] + (vals[2] - vals[1]) / 9.0;
        assert!((extrap - target).abs() < 1e-5, "{vals:?}");
        assert!((vals[2] - target).abs() < (vals[1] - target).abs());
    }

    #[test]
    fn local_function_values() {
        assert!((mult_fn(MultFn::R, 4).unwrap() - 32.0 / 39.0).abs() < 1e-15);
        assert!((mult_fn(MultFn::SmallH, 4).unwrap() - 64.0 / 55.0).abs() < 1e-15);
        assert_eq!(mult_fn(MultFn::R, 3), Err(LabError::RamifiedPrime));
        assert!(mult_fn(MultFn::R, 5).is_err());
        assert!(mult_fn(MultFn::R, 7).is_ok());
        let g = mult_fn(MultFn::BigG, 7).unwrap();
        let expected = mult_fn(MultFn::R, 7).unwrap() / 7f64.sqrt() - mult_fn(MultFn::SmallH, 7).unwrap();
        assert!((g - expected).abs() < 1e-15);
    }

    #[test]
    fn big_h_positive_and_g_near_minus_one() {
        let mut kg: f64 = 0.0;
        for q in prime_ideal_norms(1_000_000) {
            let qf = q as f64;
            assert!(mult_fn_unchecked(MultFn::BigH, qf) > 0.0, "q = {q}");
            kg = kg.max((mult_fn_unchecked(MultFn::BigG, qf) + 1.0).abs() * qf);
        }
        assert!(kg < 10.0, "fitted constant {kg}");
    }

    #[test]
    fn script_p_forms_agree() {
        for q in [4.0, 7.0, 13.0, 25.0, 1e4, 1e6] {
            assert!((script_p_factor(q) - script_p_factor_alt(q)).abs() < 1e-13);
            assert!((script_p1_factor(q) - 1.0).abs() < 1e-13);
            let closed = (q - 1.0) * (q + 1.0) * (q.powi(4) + 2.0 * q.powi(3) + q * q - 2.0 * q.powf(1.5) + 1.0)
                / (q * (q.powf(2.5) + q.powf(1.5) - 1.0).powi(2));
            assert!((script_p_factor(q) - closed).abs() < 1e-13);
        }
    }

    #[test]
    fn factor_decay_and_expansion() {
        let q = 1e4f64;
        let dev = c_factor(q) - 1.0;
        // 1 + q^{-3/2} − q^{-5/2} + O(q^{-3}).
        assert!((dev - (q.powf(-1.5) - q.powf(-2.5))).abs() < 2.0 * q.powi(-3));
        for name in [ConstantName::C, ConstantName::D, ConstantName::ScriptP] {
            let k = fitted_decay_constant(name, 10_000);
            assert!(k.is_finite() && k < 10.0, "{name:?}: {k}");
            for q in prime_ideal_norms(10_000) {
                let v = 1.0 + delta_fn(name)(q as f64);
                assert!(v > 0.0 && v < 2.0);
            }
        }
    }

    #[test]
    fn prime_ideal_count_vs_li() {
        let b = 1_000_000u64;
        let count = prime_ideal_norms(b).len() as f64;
        assert!((count / li(b as f64) - 1.0).abs() < 0.05);
        assert!((li(1e6) - 78_627.549_159_5).abs() < 1e-3, "{}", li(1e6));
    }

    #[test]
    fn compensated_sum_is_order_independent_enough() {
        let xs: Vec<f64> = (1..100_000).map(|k| 1.0 / (k as f64).powi(2)).collect();
        let mut a = CompensatedSum::default();
        xs.iter().for_each(|x| a.add(*x));
        let mut b = CompensatedSum::default();
        xs.iter().rev().for_each(|x| b.add(*x));
        assert!((a.value() - b.value()).abs() < 1e-16);
    }

    #[test]
    fn c0_closed_form() {
        let v = c0();
        let g23 = 1.354_117_939_426_400_5;
        let expected = (2.0 * PI).powf(5.0 / 3.0) / (8.0 * 3f64.powf(4.5) * g23 * 1.285_190_955_484_149_6);
        assert!((v - expected).abs() < 1e-13);
    }
}
#[cfg(test)]
mod stability_tests {
    use super::*;

    #[test]
    fn constants_stable_between_bounds() {
        for name in [ConstantName::C, ConstantName::D, ConstantName::ScriptP] {
            let a = constant(name, 100_000).unwrap();
            let b = constant(name, 200_000).unwrap();
            assert!((a.value - b.value).abs() < 1e-6, "{name:?}: {} vs {}", a.value, b.value);
            // The tail correction is what makes the product stable.
            assert!((a.truncated_value - b.truncated_value).abs() > (a.value - b.value).abs());
        }
        assert!(constant(ConstantName::C, 999).is_err());
    }

    #[test]
    fn script_p_alternative_matches_closed_form() {
        let closed = constant(ConstantName::ScriptP, 200_000).unwrap();
        let alt = script_p_alternative(200_000);
        assert!((closed.value - alt.value).abs() < 1e-9);
    }

    #[test]
    fn remarkable_identity_holds() {
        let p1 = remarkable_identity(1_000_000).unwrap();
        assert!((p1 - 1.0).abs() < 1e-4);
    }

    #[test]
    fn deltas_match_factors_where_representable() {
        for q in [4.0, 7.0, 13.0, 25.0, 1e3] {
            assert!((c_factor(q) - 1.0 - c_delta(q)).abs() < 1e-14);
            assert!((d_factor(q) - 1.0 - d_delta(q)).abs() < 1e-14);
        }
        // Far out the deviations stay accurate while `f − 1` would underflow to 0.
        let q = 1e20;
        assert!((script_p_delta(q) / (-1.0 / (q * q)) - 1.0).abs() < 1e-6);
        // The assembled form cancels to `O(q^{-2})`; its error is `O(ε/q)`.
        let q = 1e4;
        assert!((script_p_alt_delta(q) - script_p_delta(q)).abs() < 1e-15);
    }
}
