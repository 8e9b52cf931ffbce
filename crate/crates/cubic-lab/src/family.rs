//! The families `F₃′(X)` and `F₃`, the weighted sums `S`, `S_M`, `S_R`, the
//! smoothed moment experiments, non-vanishing statistics and the mollifier.
//!
//! Every parallel computation collects per-element values in index order and
//! reduces them serially with compensated summation, so results do not
//! depend on the number of worker threads.

use std::collections::HashMap;
use std::path::{Path, PathBuf};
use std::time::Instant;

use num_complex::Complex64;
use rayon::prelude::*;

use crate::eisenstein::EisInt;
use crate::error::{LabError, LabResult};
use crate::euler::{constant, mollified_first_moment_constant, mult_fn_unchecked, ConstantName, CompensatedSum, MultFn};
use crate::factorization::{factor, EisFactorization, Factorizer};
use crate::gauss::in_family_f3;
use crate::lfun::{read_lvalue_cache, write_lvalue_cache, CacheKey, LEngine, LValueRecord};
use crate::symbol::symbol_unchecked;
use crate::weights::TestFunction;

/// Prime bound used for the constants `C` and `D` in predictions.
pub const CONSTANT_PRIME_BOUND: u64 = 200_000;

/// Worker count from `CML_WORKERS`, defaulting to the number of logical cores.
pub fn worker_count() -> usize {
    std::env::var("CML_WORKERS")
        .ok()
        .and_then(|v| v.trim().parse::<usize>().ok())
        .filter(|&n| n > 0)
        .unwrap_or_else(|| std::thread::available_parallelism().map(|n| n.get()).unwrap_or(1))
}

/// Runs `f` on a dedicated pool with `n` threads.
pub fn with_workers<T: Send>(n: usize, f: impl FnOnce() -> T + Send) -> LabResult<T> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(n.max(1))
        .build()
        .map_err(|e| LabError::InvalidInput(format!("thread pool: {e}")))?;
    Ok(pool.install(f))
}

/// Elements `q ≡ 1 (mod 9)` with `lo < N(q) ≤ hi`, ordered by `(norm, a, b)`.
pub fn elements_one_mod_nine(lo: i64, hi: i64) -> Vec<EisInt> {
    let mut out = Vec::new();
    if hi <= lo.max(0) {
        return out;
    }
    // N(a + bω) = (a − b/2)² + 3b²/4, so |b| ≤ 2√(hi/3).
    let bmax = (2.0 * (hi as f64 / 3.0).sqrt()).floor() as i64 + 1;
    let mut b = -(bmax / 9) * 9;
    while b <= bmax {
        let rest = hi as f64 - 0.75 * (b * b) as f64;
        if rest >= 0.0 {
            let r = rest.sqrt();
            let centre = b as f64 / 2.0;
            let amin = (centre - r).floor() as i64 - 1;
            let amax = (centre + r).ceil() as i64 + 1;
            let mut a = amin + (1 - amin).rem_euclid(9);
            while a <= amax {
                let x = EisInt::new(a, b);
                let n = x.norm();
                if n > lo && n <= hi {
                    out.push(x);
                }
                a += 9;
            }
        }
        b += 9;
    }
    out.sort_by_key(|x| (x.norm(), x.a, x.b));
    out
}

/// Squarefree flags for a list of elements, computed in parallel.
fn squarefree_flags(xs: &[EisInt]) -> Vec<bool> {
    xs.par_iter()
        .map_init(Factorizer::default, |f, x| f.factor(x).map(|g| g.is_squarefree()).unwrap_or(false))
        .collect()
}

/// `F₃′ ∩ {lo < N(q) ≤ hi}` in deterministic order (`q = 1` never included).
pub fn enumerate_f3prime_range(lo: i64, hi: i64) -> Vec<EisInt> {
    let xs = elements_one_mod_nine(lo.max(1), hi);
    let flags = squarefree_flags(&xs);
    xs.into_iter().zip(flags).filter_map(|(x, ok)| ok.then_some(x)).collect()
}

/// `F₃′(X)`: primary squarefree `q ≡ 1 (mod 9)` with `1 < N(q) ≤ X`.
pub fn enumerate_f3prime(x: i64) -> Vec<EisInt> {
    enumerate_f3prime_range(1, x)
}

/// Element of `F₃`: `q = q₁q₂²` with `q₁q₂` squarefree.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct F3Element {
    /// Squarefree part.
    pub q1: EisInt,
    /// Squared part.
    pub q2: EisInt,
}

impl F3Element {
    /// `q₁q₂²`.
    pub fn q(&self) -> EisInt {
        self.q1 * self.q2 * self.q2
    }

    /// Conductor norm `N(q₁q₂)`.
    pub fn conductor_norm(&self) -> i64 {
        (self.q1 * self.q2).norm()
    }
}

/// `F₃(Q₁, Q₂)` with `N(q₁) ≤ Q₁`, `N(q₂) ≤ Q₂` (sizes taken as upper bounds).
pub fn enumerate_f3(q1_max: i64, q2_max: i64) -> Vec<F3Element> {
    let primaries = |bound: i64| -> Vec<EisInt> {
        crate::eisenstein::enumerate_by_norm(bound, crate::eisenstein::ClassFilter::Primary)
            .into_iter()
            .filter(|x| factor(x).map(|f| f.is_squarefree()).unwrap_or(false))
            .collect()
    };
    let mut a = primaries(q1_max);
    a.insert(0, EisInt::one());
    a.dedup();
    let mut b = primaries(q2_max);
    b.insert(0, EisInt::one());
    b.dedup();
    let mut out = Vec::new();
    for q1 in &a {
        for q2 in &b {
            if in_family_f3(q1, q2) {
                out.push(F3Element { q1: *q1, q2: *q2 });
            }
        }
    }
    out
}

/// Squarefree `𝔩` with `𝔩² | q`, as `(N(𝔩), μ(𝔩))`.
fn square_divisors(f: &EisFactorization) -> Vec<(i64, i32)> {
    let mut primes: Vec<i64> = f.primes.iter().filter(|(_, e)| *e >= 2).map(|(p, _)| p.norm()).collect();
    if f.lambda_exp >= 2 {
        primes.push(3);
    }
    let mut out = vec![(1i64, 1i32)];
    for p in primes {
        let extra: Vec<(i64, i32)> = out.iter().map(|&(n, m)| (n * p, -m)).collect();
        out.extend(extra);
    }
    out
}

/// `M_Y(q) = Σ_{𝔩² | q, N(𝔩) ≤ Y} μ(𝔩)`.
pub fn m_y(q: &EisInt, y: f64) -> LabResult<i32> {
    let f = factor(q)?;
    Ok(square_divisors(&f).into_iter().filter(|&(n, _)| n as f64 <= y).map(|(_, m)| m).sum())
}

/// `R_Y(q) = Σ_{𝔩² | q, N(𝔩) > Y} μ(𝔩)`.
pub fn r_y(q: &EisInt, y: f64) -> LabResult<i32> {
    let f = factor(q)?;
    Ok(square_divisors(&f).into_iter().filter(|&(n, _)| n as f64 > y).map(|(_, m)| m).sum())
}

/// `(S, S_M, S_R)`: the sums `Σ w(q)·β_q·F(N(q)/X)` over the given `q ≡ 1
/// (mod 9)` with `w = μ²`, `M_Y` and `R_Y` respectively.
pub fn weighted_sums(
    beta: &[(EisInt, f64)],
    f: TestFunction,
    x: f64,
    y: f64,
) -> LabResult<(f64, f64, f64)> {
    let (mut s, mut sm, mut sr) = (CompensatedSum::default(), CompensatedSum::default(), CompensatedSum::default());
    for (q, b) in beta {
        let fac = factor(q)?;
        let mu2 = if fac.is_squarefree() { 1 } else { 0 };
        let sq = square_divisors(&fac);
        let my: i32 = sq.iter().filter(|&&(n, _)| n as f64 <= y).map(|&(_, m)| m).sum();
        let ry: i32 = sq.iter().filter(|&&(n, _)| n as f64 > y).map(|&(_, m)| m).sum();
        let w = b * f.eval(q.norm() as f64 / x);
        s.add(mu2 as f64 * w);
        sm.add(my as f64 * w);
        sr.add(ry as f64 * w);
    }
    Ok((s.value(), sm.value(), sr.value()))
}

/// Which moment a report describes.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum MomentKind {
    /// `Σ μ²(q) L(1/2, χ_q) F(N(q)/X)`.
    First,
    /// `Σ μ²(q) |L(1/2, χ_q)|² F(N(q)/X)`.
    Second,
    /// Weighted fraction of `q` with `|L(1/2, χ_q)|` above its certificate.
    Nonvanishing,
    /// `Σ L(1/2, χ_q) M(q) F(N(q)/X)`.
    MollifiedFirst,
    /// `Σ |L(1/2, χ_q) M(q)|² F(N(q)/X)`.
    MollifiedSecond,
}

impl MomentKind {
    /// Short identifier.
    pub fn name(&self) -> &'static str {
        match self {
            MomentKind::First => "first",
            MomentKind::Second => "second",
            MomentKind::Nonvanishing => "nonvanishing",
            MomentKind::MollifiedFirst => "mollified_first",
            MomentKind::MollifiedSecond => "mollified_second",
        }
    }
}

/// Outcome of one moment experiment.
#[derive(Clone, Debug, PartialEq)]
pub struct MomentReport {
    /// Scale `X`.
    pub x: f64,
    /// Test function.
    pub f: TestFunction,
    /// Moment computed.
    pub kind: MomentKind,
    /// Raw sum (for `Nonvanishing`, the smoothed fraction).
    pub raw: Complex64,
    /// Main-term prediction (for `Nonvanishing`, the lower bound `1/7`).
    pub prediction: f64,
    /// `Re(raw)/prediction`.
    pub ratio: f64,
    /// Slope of the affine fit (second moment over a grid only).
    pub slope: Option<f64>,
    /// Intercept of the affine fit.
    pub intercept: Option<f64>,
    /// Unweighted fraction over the sharp window (non-vanishing only).
    pub sharp_fraction: Option<f64>,
    /// Number of `q` in the window.
    pub count: usize,
    /// Wall time in seconds.
    pub wall_time: f64,
}

/// Central values for every `q ∈ F₃′` with `X < N(q) < 2X` together with
/// their weights `F(N(q)/X)`.
#[derive(Clone, Debug)]
pub struct FamilyWindow {
    /// Scale `X`.
    pub x: f64,
    /// Test function.
    pub f: TestFunction,
    /// Truncation constant used for the central values.
    pub truncation: f64,
    /// One record per element, in enumeration order.
    pub records: Vec<LValueRecord>,
    /// `F(N(q)/X)` per record.
    pub weights: Vec<f64>,
    /// Seconds spent computing (zero when loaded from a cache).
    pub wall_time: f64,
}

impl FamilyWindow {
    /// Computes every central value in the window.
    pub fn compute(x: f64, f: TestFunction, truncation: f64) -> Self {
        let start = Instant::now();
        let hi = (2.0 * x).ceil() as i64;
        let qs = enumerate_f3prime_range(x.floor() as i64, hi);
        let engine = LEngine::new(hi, truncation);
        let records: Vec<LValueRecord> = qs.par_iter().map(|q| engine.record_unchecked(q)).collect();
        let weights = records.iter().map(|r| f.eval(r.conductor_norm as f64 / x)).collect();
        Self { x, f, truncation, records, weights, wall_time: start.elapsed().as_secs_f64() }
    }

    /// Cache key for this window.
    pub fn key(x: f64, f: TestFunction, truncation: f64) -> CacheKey {
        CacheKey { x, truncation, f_kind: f.name().to_string() }
    }

    /// File used for the window inside a cache directory.
    pub fn cache_path(dir: &Path, x: f64) -> PathBuf {
        dir.join(format!("lvalues_x{x:e}.csv"))
    }

    /// Loads the window from `dir` if present (failing with `CacheMismatch`
    /// when it was written with other parameters), computing and storing it
    /// otherwise.
    pub fn load_or_compute(x: f64, f: TestFunction, truncation: f64, dir: Option<&Path>) -> LabResult<Self> {
        let Some(dir) = dir else {
            return Ok(Self::compute(x, f, truncation));
        };
        let path = Self::cache_path(dir, x);
        let key = Self::key(x, f, truncation);
        if path.exists() {
            let rows = read_lvalue_cache(&path, &key)?;
            let hi = (2.0 * x).ceil() as i64;
            let engine = LEngine::new(hi, truncation);
            let records: Vec<LValueRecord> = rows
                .into_iter()
                .map(|(q, l, terms)| LValueRecord {
                    q,
                    conductor_norm: q.norm(),
                    l_half: l,
                    a1: Complex64::new(f64::NAN, f64::NAN),
                    a2: None,
                    terms_used: terms,
                    afe_tail_bound: engine.tail_bound(&q),
                })
                .collect();
            let weights = records.iter().map(|r| f.eval(r.conductor_norm as f64 / x)).collect();
            return Ok(Self { x, f, truncation, records, weights, wall_time: 0.0 });
        }
        std::fs::create_dir_all(dir)?;
        let w = Self::compute(x, f, truncation);
        write_lvalue_cache(&path, &key, &w.records)?;
        Ok(w)
    }

    /// `Σ F(N(q)/X)` over the window.
    pub fn total_weight(&self) -> f64 {
        let mut s = CompensatedSum::default();
        for w in &self.weights {
            s.add(*w);
        }
        s.value()
    }

    fn weighted_sum(&self, g: impl Fn(usize) -> Complex64) -> Complex64 {
        let (mut re, mut im) = (CompensatedSum::default(), CompensatedSum::default());
        for (i, w) in self.weights.iter().enumerate() {
            if *w == 0.0 {
                continue;
            }
            let v = g(i) * *w;
            re.add(v.re);
            im.add(v.im);
        }
        Complex64::new(re.value(), im.value())
    }

    fn report(&self, kind: MomentKind, raw: Complex64, prediction: f64) -> MomentReport {
        MomentReport {
            x: self.x,
            f: self.f,
            kind,
            raw,
            prediction,
            ratio: raw.re / prediction,
            slope: None,
            intercept: None,
            sharp_fraction: None,
            count: self.records.len(),
            wall_time: self.wall_time,
        }
    }

    /// First moment against `C·F̌(0)·X`.
    pub fn first_moment(&self) -> LabResult<MomentReport> {
        let c = constant(ConstantName::C, CONSTANT_PRIME_BOUND)?.value;
        let raw = self.weighted_sum(|i| self.records[i].l_half);
        Ok(self.report(MomentKind::First, raw, c * f_check0(self.f) * self.x))
    }

    /// Second moment against its leading term `2D·F̌(0)·X·log X`.
    pub fn second_moment(&self) -> LabResult<MomentReport> {
        let d = constant(ConstantName::D, CONSTANT_PRIME_BOUND)?.value;
        let raw = self.weighted_sum(|i| Complex64::new(self.records[i].l_half.norm_sqr(), 0.0));
        Ok(self.report(MomentKind::Second, raw, 2.0 * d * f_check0(self.f) * self.x * self.x.ln()))
    }

    /// Fraction of the window with `|L(1/2, χ_q)|` above the record's
    /// truncation certificate; values below it count as undetermined, that
    /// is, against the fraction.
    pub fn nonvanishing(&self) -> MomentReport {
        let above: Vec<bool> = self.records.iter().map(|r| r.l_half.norm() > r.afe_tail_bound).collect();
        let num = self.weighted_sum(|i| Complex64::new(if above[i] { 1.0 } else { 0.0 }, 0.0)).re;
        let smoothed = num / self.total_weight();
        let sharp = above.iter().filter(|&&a| a).count() as f64 / self.records.len().max(1) as f64;
        let mut rep = self.report(MomentKind::Nonvanishing, Complex64::new(smoothed, 0.0), 1.0 / 7.0);
        rep.sharp_fraction = Some(sharp);
        rep
    }
}

/// `F̌(0) = ∫ F`.
pub fn f_check0(f: TestFunction) -> f64 {
    f.f_check(Complex64::new(0.0, 0.0)).re
}

/// Least-squares fit `S₂/X ≈ slope·log X + intercept` over the reports;
/// returns `(slope, intercept)`. Needs at least two distinct `X`.
pub fn second_moment_fit(reports: &[MomentReport]) -> LabResult<(f64, f64)> {
    if reports.len() < 2 {
        return Err(LabError::InvalidInput("affine fit needs at least two grid points".into()));
    }
    let pts: Vec<(f64, f64)> = reports.iter().map(|r| (r.x.ln(), r.raw.re / r.x)).collect();
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    if sxx == 0.0 {
        return Err(LabError::InvalidInput("affine fit needs distinct X".into()));
    }
    let slope = sxy / sxx;
    Ok((slope, my - slope * mx))
}

/// Predicted slope `2D·F̌(0)` of `S₂/X` against `log X`.
pub fn second_moment_slope_prediction(f: TestFunction) -> LabResult<f64> {
    Ok(2.0 * constant(ConstantName::D, CONSTANT_PRIME_BOUND)?.value * f_check0(f))
}

/// Mollifier coefficients on squarefree ideals coprime to 3 of norm `≤ M`.
#[derive(Clone, Debug)]
pub struct MollifierSpec {
    /// Mollifier length exponent (`M = X^θ`), or `NaN` if `M` was given directly.
    pub theta: f64,
    /// Length `M`.
    pub m: f64,
    /// Primary generators of the support, ordered by norm.
    pub support: Vec<EisInt>,
    /// Norms of the support.
    pub norms: Vec<i64>,
    /// `ξ(𝔡)`.
    pub xi: Vec<f64>,
    /// `λ(𝔟)`.
    pub lambda: Vec<f64>,
    /// Prime norms of each support element.
    prime_norms: Vec<Vec<i64>>,
    /// Index of each element's divisors: `(divisor index, cofactor index)`.
    divisor_pairs: Vec<Vec<(usize, usize)>>,
}

fn multiplicative(f: MultFn, primes: &[i64]) -> f64 {
    primes.iter().map(|&p| mult_fn_unchecked(f, p as f64)).product()
}

/// Builds the mollifier with `M = X^θ`, `0 < θ ≤ 1/6`.
pub fn build_mollifier(theta: f64, x: f64) -> LabResult<MollifierSpec> {
    if !(theta > 0.0 && theta <= 1.0 / 6.0) {
        return Err(LabError::ThetaOutOfRange(theta));
    }
    let mut spec = build_mollifier_with_length(x.powf(theta))?;
    spec.theta = theta;
    Ok(spec)
}

/// Builds the mollifier for an explicit length `M > 1`:
/// `ξ(𝔡) = (C/(D log M))·G(𝔡)/(N(𝔡)H(𝔡))` and
/// `λ(𝔩) = Σ_𝔞 μ(𝔞) h(𝔞) ξ(𝔩𝔞)`.
pub fn build_mollifier_with_length(m: f64) -> LabResult<MollifierSpec> {
    if !(m > 1.0) {
        return Err(LabError::InvalidInput(format!("mollifier length must exceed 1, got {m}")));
    }
    let c = constant(ConstantName::C, CONSTANT_PRIME_BOUND)?.value;
    let d = constant(ConstantName::D, CONSTANT_PRIME_BOUND)?.value;
    let support: Vec<EisInt> =
        crate::eisenstein::enumerate_by_norm(m.floor() as i64, crate::eisenstein::ClassFilter::Primary)
            .into_iter()
            .filter(|x| factor(x).map(|f| f.is_squarefree()).unwrap_or(false))
            .collect();
    let index: HashMap<EisInt, usize> = support.iter().enumerate().map(|(i, x)| (*x, i)).collect();
    let norms: Vec<i64> = support.iter().map(|x| x.norm()).collect();
    let mut prime_norms = Vec::with_capacity(support.len());
    let mut divisor_pairs = Vec::with_capacity(support.len());
    for x in &support {
        let f = factor(x)?;
        prime_norms.push(f.primes.iter().map(|(p, _)| p.norm()).collect::<Vec<_>>());
        let primes: Vec<EisInt> = f.primes.iter().map(|(p, _)| *p).collect();
        let mut pairs = Vec::with_capacity(1 << primes.len());
        for mask in 0u32..(1 << primes.len()) {
            let (mut l, mut a) = (EisInt::one(), EisInt::one());
            for (k, p) in primes.iter().enumerate() {
                if mask & (1 << k) != 0 {
                    l = l * *p;
                } else {
                    a = a * *p;
                }
            }
            pairs.push((index[&l], index[&a]));
        }
        divisor_pairs.push(pairs);
    }
    let log_m = m.ln();
    let xi: Vec<f64> = (0..support.len())
        .map(|i| {
            let p = &prime_norms[i];
            c / (d * log_m) * multiplicative(MultFn::BigG, p) / (norms[i] as f64 * multiplicative(MultFn::BigH, p))
        })
        .collect();
    let mut lambda = vec![0.0; support.len()];
    for (i, pairs) in divisor_pairs.iter().enumerate() {
        for &(l, a) in pairs {
            let pa = &prime_norms[a];
            let mu = if pa.len() % 2 == 0 { 1.0 } else { -1.0 };
            lambda[l] += mu * multiplicative(MultFn::SmallH, pa) * xi[i];
        }
    }
    Ok(MollifierSpec { theta: f64::NAN, m, support, norms, xi, lambda, prime_norms, divisor_pairs })
}

impl MollifierSpec {
    /// `Q₁ = Σ λ(𝔟) r(𝔟)/√N(𝔟)`.
    pub fn q1_from_lambda(&self) -> f64 {
        let mut s = CompensatedSum::default();
        for i in 0..self.support.len() {
            s.add(self.lambda[i] * multiplicative(MultFn::R, &self.prime_norms[i]) / (self.norms[i] as f64).sqrt());
        }
        s.value()
    }

    /// `Q₁ = Σ ξ(𝔡) G(𝔡)`.
    pub fn q1_from_xi(&self) -> f64 {
        let mut s = CompensatedSum::default();
        for i in 0..self.support.len() {
            s.add(self.xi[i] * multiplicative(MultFn::BigG, &self.prime_norms[i]));
        }
        s.value()
    }

    /// `ξ` recomputed from `λ` by `ξ(𝔩) = Σ_𝔞 λ(𝔩𝔞) h(𝔞)`.
    pub fn xi_from_lambda(&self) -> Vec<f64> {
        let mut xi = vec![0.0; self.support.len()];
        for (i, pairs) in self.divisor_pairs.iter().enumerate() {
            for &(l, a) in pairs {
                xi[l] += self.lambda[i] * multiplicative(MultFn::SmallH, &self.prime_norms[a]);
            }
        }
        xi
    }

    /// `M(q) = Σ λ(𝔟) √N(𝔟) χ_q(𝔟)`.
    pub fn evaluate(&self, q: &EisInt) -> Complex64 {
        let mut s = Complex64::new(0.0, 0.0);
        for (i, b) in self.support.iter().enumerate() {
            let chi = symbol_unchecked(*b, *q).to_complex();
            s += chi * (self.lambda[i] * (self.norms[i] as f64).sqrt());
        }
        s
    }

    /// `Σ |λ(𝔟)| √N(𝔟)`, the trivial bound for `|M(q)|`.
    pub fn triangle_bound(&self) -> f64 {
        (0..self.support.len()).map(|i| self.lambda[i].abs() * (self.norms[i] as f64).sqrt()).sum()
    }
}

/// Mollified first and second moments over a window and their
/// Cauchy–Schwarz ratio.
#[derive(Clone, Debug)]
pub struct MollifiedReport {
    /// `Σ L·M·F` against `(π√3/(54ζ_K(2)))·F̌(0)·X`.
    pub first: MomentReport,
    /// `Σ |L·M|²·F`.
    pub second: MomentReport,
    /// `|S₁|²/(S₂·Σ F)`: a lower bound for the weighted non-vanishing
    /// fraction, in `[0, 1]` by Cauchy–Schwarz.
    pub cs_ratio: f64,
    /// Asymptotic value `θ/(θ+1)` of the ratio.
    pub asymptotic: f64,
}

/// Mollified moments of a window.
pub fn mollified_moments(window: &FamilyWindow, spec: &MollifierSpec) -> MollifiedReport {
    let mvals: Vec<Complex64> = window.records.par_iter().map(|r| spec.evaluate(&r.q)).collect();
    let s1 = window.weighted_sum(|i| window.records[i].l_half * mvals[i]);
    let s2 = window.weighted_sum(|i| Complex64::new((window.records[i].l_half * mvals[i]).norm_sqr(), 0.0)).re;
    let pred1 = mollified_first_moment_constant() * f_check0(window.f) * window.x;
    let first = window.report(MomentKind::MollifiedFirst, s1, pred1);
    let mut second = window.report(MomentKind::MollifiedSecond, Complex64::new(s2, 0.0), f64::NAN);
    second.ratio = f64::NAN;
    let cs_ratio = s1.norm_sqr() / (s2 * window.total_weight());
    MollifiedReport { first, second, cs_ratio, asymptotic: spec.theta / (spec.theta + 1.0) }
}
