//! Experiments with the Gauss-sum Dirichlet series
//! `ψ_α(r, s) = Σ_{c ≡ 1 (3), (c, α) = 1} g₃(r, c)/N(c)^s`: truncated sums,
//! the polar term at `s = 4/3`, the `T^{5/6}` bias of normalized partial sums,
//! the coprimality-removal identities, a cubic large-sieve probe and the
//! radial Poisson summation identity.

use std::collections::HashMap;
use std::f64::consts::PI;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::eisenstein::{coprime, enumerate_by_norm, primary_associate, ClassFilter, EisInt, ResidueClassMod9};
use crate::error::{LabError, LabResult};
use crate::euler::{c0, CompensatedSum};
use crate::factorization::{factor, is_prime_element, EisFactorization, Factorizer};
use crate::gauss::{g3_fast, g3_from_factorization, phase, prefill_prime_table, tau3_with, Tau3Phase, DIRECT_CAP};
use crate::symbol::{symbol_unchecked, CubicSymbolValue, OMEGA_POWERS};
use crate::weights::{v_ddot, TestFunction};

/// All primary moduli `c` with `N(c) ≤ T`, factored once, with `g₃(π)`
/// precomputed for every prime that occurs.
#[derive(Clone, Debug)]
pub struct PsiTable {
    bound: i64,
    moduli: Vec<EisInt>,
    norms: Vec<i64>,
    factorizations: Vec<EisFactorization>,
}

impl PsiTable {
    /// Builds the table; `CapExceeded` above [`DIRECT_CAP`].
    pub fn new(bound: i64) -> LabResult<Self> {
        if bound > DIRECT_CAP {
            return Err(LabError::CapExceeded { norm: bound, cap: DIRECT_CAP });
        }
        let moduli = enumerate_by_norm(bound, ClassFilter::Primary);
        let norms: Vec<i64> = moduli.iter().map(|c| c.norm()).collect();
        let limit = bound.max(2) as usize;
        let factorizations: Vec<EisFactorization> = moduli
            .par_iter()
            .map_init(|| Factorizer::with_sieve(limit), |f, c| f.factor(c).expect("nonzero modulus"))
            .collect();
        // Primes are exactly the moduli with a single prime factor of exponent one.
        let primes: Vec<EisInt> = moduli
            .iter()
            .zip(&factorizations)
            .filter(|(_, f)| f.primes.len() == 1 && f.primes[0].1 == 1)
            .map(|(c, _)| *c)
            .collect();
        prefill_prime_table(&primes);
        Ok(Self { bound, moduli, norms, factorizations })
    }

    /// Largest norm covered.
    pub fn bound(&self) -> i64 {
        self.bound
    }

    /// Number of moduli.
    pub fn len(&self) -> usize {
        self.moduli.len()
    }

    /// `true` if the table is empty.
    pub fn is_empty(&self) -> bool {
        self.moduli.is_empty()
    }

    /// `g₃(r, c)` for every modulus in the table, in order.
    pub fn gauss_sums(&self, r: &EisInt) -> Vec<Complex64> {
        self.factorizations.par_iter().map(|f| g3_from_factorization(r, f)).collect()
    }

    /// `ψ_α(r, s)` truncated to `N(c) ≤ T` (`T ≤` the table bound);
    /// `α` must be primary.
    pub fn psi(&self, alpha: &EisInt, r: &EisInt, s: Complex64, t: i64) -> LabResult<Complex64> {
        if r.is_zero() {
            return Err(LabError::ZeroInput);
        }
        if t > self.bound {
            return Err(LabError::CapExceeded { norm: t, cap: self.bound });
        }
        let alpha_primes: Vec<EisInt> = factor(alpha)?.primes.iter().map(|(p, _)| *p).collect();
        let len = self.norms.partition_point(|&n| n <= t);
        let terms: Vec<Complex64> = self.factorizations[..len]
            .par_iter()
            .zip(&self.norms[..len])
            .map(|(f, &n)| {
                if f.primes.iter().any(|(p, _)| alpha_primes.contains(p)) {
                    return Complex64::new(0.0, 0.0);
                }
                let g = g3_from_factorization(r, f);
                if g == Complex64::new(0.0, 0.0) {
                    return g;
                }
                g * (-s * (n as f64).ln()).exp()
            })
            .collect();
        Ok(sum_complex(&terms))
    }
}

fn sum_complex(xs: &[Complex64]) -> Complex64 {
    let (mut re, mut im) = (CompensatedSum::default(), CompensatedSum::default());
    for x in xs {
        re.add(x.re);
        im.add(x.im);
    }
    Complex64::new(re.value(), im.value())
}

/// `ψ(r, s)` truncated to primary `c` with `N(c) ≤ T`; needs `Re s > 1`.
pub fn psi_truncated(r: &EisInt, s: Complex64, t: i64) -> LabResult<Complex64> {
    if !(s.re > 1.0) {
        return Err(LabError::DivergentArgument(s.re));
    }
    PsiTable::new(t)?.psi(&EisInt::one(), r, s, t)
}

/// Residue coefficient `c₀·τ₃(r)/N(r)^{1/6}` of `ψ(r, s)` at `s = 4/3`.
pub fn polar_prediction(r: &EisInt) -> LabResult<Complex64> {
    polar_prediction_with(r, Tau3Phase::Standard)
}

/// [`polar_prediction`] under an explicit `τ₃` phase convention.
pub fn polar_prediction_with(r: &EisInt, conv: Tau3Phase) -> LabResult<Complex64> {
    if r.is_zero() {
        return Err(LabError::ZeroInput);
    }
    Ok(tau3_with(r, conv)? * (c0() / (r.norm() as f64).powf(1.0 / 6.0)))
}

/// Partial sums of normalized Gauss sums on a dyadic grid.
#[derive(Clone, Debug)]
pub struct BiasReport {
    /// Shift `k`.
    pub k: EisInt,
    /// Dyadic grid `T_max/2^j`, increasing.
    pub t_grid: Vec<i64>,
    /// `Σ_{N(n) ≤ T} g̃₃(k, n)` at each grid point.
    pub partial_sums: Vec<Complex64>,
    /// `(6/5)·c₀·τ₃(k)·N(k)^{−1/6}·T^{5/6}` at each grid point.
    pub predicted: Vec<Complex64>,
    /// Slope of `log|partial sum|` against `log T` (least squares).
    pub exponent: f64,
    /// `|partial sum|/|predicted|` (NaN where the prediction vanishes).
    pub ratios: Vec<f64>,
}

/// Smallest grid point used by [`bias_scan`].
pub const BIAS_T_MIN: i64 = 1000;

fn fit_exponent(ts: &[i64], vals: &[f64]) -> f64 {
    let pts: Vec<(f64, f64)> = ts.iter().zip(vals).map(|(&t, &v)| ((t as f64).ln(), v.max(1e-300).ln())).collect();
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    sxy / sxx
}

/// Dyadic grid `T_max, T_max/2, …` down to [`BIAS_T_MIN`], increasing.
pub fn dyadic_grid(t_max: i64) -> Vec<i64> {
    let mut grid = Vec::new();
    let mut t = t_max;
    while t >= BIAS_T_MIN {
        grid.push(t);
        t /= 2;
    }
    grid.reverse();
    grid
}

/// Partial sums `Σ_{N(n) ≤ T} g̃₃(k, n)` over primary `n` from a table.
pub fn bias_scan_with(table: &PsiTable, k: &EisInt, conv: Tau3Phase) -> LabResult<BiasReport> {
    if k.is_zero() {
        return Err(LabError::ZeroInput);
    }
    let grid = dyadic_grid(table.bound);
    if grid.len() < 5 {
        return Err(LabError::InvalidInput(format!("bias scan needs T_max ≥ {}", BIAS_T_MIN * 16)));
    }
    let g = table.gauss_sums(k);
    let (mut re, mut im) = (CompensatedSum::default(), CompensatedSum::default());
    let mut sums = Vec::with_capacity(grid.len());
    let mut gi = 0;
    for i in 0..table.len() {
        while gi < grid.len() && table.norms[i] > grid[gi] {
            sums.push(Complex64::new(re.value(), im.value()));
            gi += 1;
        }
        let v = g[i] / (table.norms[i] as f64).sqrt();
        re.add(v.re);
        im.add(v.im);
    }
    while sums.len() < grid.len() {
        sums.push(Complex64::new(re.value(), im.value()));
    }
    let coef = polar_prediction_with(k, conv)? * 1.2;
    let predicted: Vec<Complex64> = grid.iter().map(|&t| coef * (t as f64).powf(5.0 / 6.0)).collect();
    let mags: Vec<f64> = sums.iter().map(|z| z.norm()).collect();
    let ratios = mags
        .iter()
        .zip(&predicted)
        .map(|(m, p)| if p.norm() > 0.0 { m / p.norm() } else { f64::NAN })
        .collect();
    Ok(BiasReport { k: *k, t_grid: grid.clone(), partial_sums: sums, predicted, exponent: fit_exponent(&grid, &mags), ratios })
}

/// [`bias_scan_with`] on a fresh table up to `T_max` with the standard phase.
pub fn bias_scan(k: &EisInt, t_max: i64) -> LabResult<BiasReport> {
    bias_scan_with(&PsiTable::new(t_max)?, k, Tau3Phase::Standard)
}

/// Outcome of comparing the two `τ₃` phase conventions on one shift.
#[derive(Clone, Debug)]
pub struct PhaseExperiment {
    /// Shift used.
    pub k: EisInt,
    /// Partial sum at the largest `T`.
    pub observed: Complex64,
    /// Angle between the observation and the prediction, per convention.
    pub angle_standard: f64,
    /// Same for the swapped convention.
    pub angle_swapped: f64,
}

impl PhaseExperiment {
    /// Convention whose predicted phase is closer to the observation.
    pub fn preferred(&self) -> Tau3Phase {
        if self.angle_standard <= self.angle_swapped {
            Tau3Phase::Standard
        } else {
            Tau3Phase::Swapped
        }
    }
}

/// Compares both `τ₃` conventions at a shift whose `τ₃` carries a
/// non-trivial ninth root of unity (`k = ωλ²` by default).
pub fn tau3_phase_experiment(table: &PsiTable, k: &EisInt) -> LabResult<PhaseExperiment> {
    let std = bias_scan_with(table, k, Tau3Phase::Standard)?;
    let swp = bias_scan_with(table, k, Tau3Phase::Swapped)?;
    let observed = *std.partial_sums.last().expect("non-empty grid");
    let angle = |p: Complex64| (observed / p).arg().abs();
    Ok(PhaseExperiment {
        k: *k,
        observed,
        angle_standard: angle(*std.predicted.last().expect("grid")),
        angle_swapped: angle(*swp.predicted.last().expect("grid")),
    })
}

/// `Δ_α(s) = Π_{π | α} (1 − N(π)^{2−3s})` over primary primes.
pub fn delta(alpha: &EisInt, s: Complex64) -> LabResult<Complex64> {
    let f = factor(alpha)?;
    let mut d = Complex64::new(1.0, 0.0);
    for (p, _) in &f.primes {
        d *= Complex64::new(1.0, 0.0) - ((2.0 - 3.0 * s) * (p.norm() as f64).ln()).exp();
    }
    Ok(d)
}

/// Squarefree primary divisors of a squarefree primary `α` with `μ(d)`.
fn squarefree_divisors(alpha: &EisInt) -> LabResult<Vec<(EisInt, f64)>> {
    let f = factor(alpha)?;
    let mut out = vec![(EisInt::one(), 1.0)];
    for (p, _) in &f.primes {
        let extra: Vec<(EisInt, f64)> = out.iter().map(|&(d, m)| (d * *p, -m)).collect();
        out.extend(extra);
    }
    Ok(out)
}

/// The identity being checked.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CoprimalityItem {
    /// `ψ_{αβ}(α²r)Δ_α = ψ_β(α²r)`.
    I,
    /// `ψ_{αβ}(αr)Δ_α = Σ_{d|α} μ(d)N(d)^{1−2s} conj(g₃(αr/d, d)) ψ_β(αr/d)`.
    II,
    /// `ψ_{αβ}(r)Δ_α = Σ_{d|α} μ(d)N(d)^{−s} g₃(r, d) ψ_β(rd)`.
    III,
    /// Cube-free twists `ψ_{abc}(ab²r)` in terms of `ψ` (with `α = a`,
    /// `β = b`, and `c` passed separately).
    Corollary,
}

/// Both sides of an identity and their difference.
#[derive(Clone, Copy, Debug)]
pub struct IdentityResidual {
    /// Left side.
    pub lhs: Complex64,
    /// Right side.
    pub rhs: Complex64,
    /// `|lhs − rhs|`.
    pub residual: f64,
    /// Tail budget `10·T^{−1/2}`.
    pub budget: f64,
}

/// Checks one coprimality-removal identity with every `ψ` truncated at
/// `N(c) ≤ T`. For [`CoprimalityItem::Corollary`], `(a, b, c) = (alpha,
/// beta, extra)`; otherwise `extra` is ignored.
pub fn coprimality_identity_check(
    table: &PsiTable,
    item: CoprimalityItem,
    alpha: &EisInt,
    beta: &EisInt,
    extra: &EisInt,
    r: &EisInt,
    s: Complex64,
    t: i64,
) -> LabResult<IdentityResidual> {
    let one = EisInt::one();
    let exact = |x: &EisInt, d: &EisInt| EisInt::exact_div(x, d).ok_or(LabError::DivisionByZero);
    let n_pow = |d: &EisInt, e: Complex64| (e * (d.norm() as f64).ln()).exp();
    let (lhs, rhs) = match item {
        CoprimalityItem::I => {
            let rho = *alpha * *alpha * *r;
            (table.psi(&(*alpha * *beta), &rho, s, t)? * delta(alpha, s)?, table.psi(beta, &rho, s, t)?)
        }
        CoprimalityItem::II => {
            let rho = *alpha * *r;
            let lhs = table.psi(&(*alpha * *beta), &rho, s, t)? * delta(alpha, s)?;
            let mut rhs = Complex64::new(0.0, 0.0);
            for (d, mu) in squarefree_divisors(alpha)? {
                let rd = exact(&rho, &d)?;
                rhs += n_pow(&d, 1.0 - 2.0 * s) * g3_fast(&rd, &d)?.conj() * table.psi(beta, &rd, s, t)? * mu;
            }
            (lhs, rhs)
        }
        CoprimalityItem::III => {
            let lhs = table.psi(&(*alpha * *beta), r, s, t)? * delta(alpha, s)?;
            let mut rhs = Complex64::new(0.0, 0.0);
            for (d, mu) in squarefree_divisors(alpha)? {
                rhs += n_pow(&d, -s) * g3_fast(r, &d)? * table.psi(beta, &(*r * d), s, t)? * mu;
            }
            (lhs, rhs)
        }
        CoprimalityItem::Corollary => {
            let (a, b, c) = (*alpha, *beta, *extra);
            let abc = a * b * c;
            let rho = a * b * b * *r;
            let lhs = table.psi(&abc, &rho, s, t)?;
            let mut acc = Complex64::new(0.0, 0.0);
            for (d, mu_d) in squarefree_divisors(&a)? {
                let rd = exact(&rho, &d)?;
                let gd = g3_fast(&rd, &d)?.conj();
                for (e, mu_e) in squarefree_divisors(&c)? {
                    let w = (d.norm() as f64) * n_pow(&(d * d * e), -s);
                    acc += w * gd * g3_fast(&rd, &e)? * table.psi(&one, &(rd * e), s, t)? * (mu_d * mu_e);
                }
            }
            (lhs, acc / delta(&abc, s)?)
        }
    };
    Ok(IdentityResidual { lhs, rhs, residual: (lhs - rhs).norm(), budget: 10.0 / (t as f64).sqrt() })
}

/// A random admissible parameter set for [`coprimality_identity_check`].
#[derive(Clone, Copy, Debug)]
pub struct CoprimalityCase {
    /// Identity.
    pub item: CoprimalityItem,
    /// `α` (or `a`).
    pub alpha: EisInt,
    /// `β` (or `b`).
    pub beta: EisInt,
    /// `c` for the corollary, `1` otherwise.
    pub extra: EisInt,
    /// Twist `r`.
    pub r: EisInt,
}

/// Draws admissible cases from small primary primes, deterministically
/// from `seed`.
pub fn random_coprimality_cases(count: usize, seed: u64) -> Vec<CoprimalityCase> {
    let primes: Vec<EisInt> = enumerate_by_norm(50, ClassFilter::Primary)
        .into_iter()
        .filter(is_prime_element)
        .collect();
    let units = EisInt::units();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let items = [CoprimalityItem::I, CoprimalityItem::II, CoprimalityItem::III, CoprimalityItem::Corollary];
    let mut out = Vec::with_capacity(count);
    for i in 0..count {
        let item = items[i % items.len()];
        // Four distinct primes: α uses one or two, β and c one each.
        let mut chosen: Vec<EisInt> = Vec::with_capacity(4);
        while chosen.len() < 4 {
            let p = primes[rng.gen_range(0..primes.len())];
            if !chosen.contains(&p) {
                chosen.push(p);
            }
        }
        let alpha = if rng.gen_bool(0.5) { chosen[0] } else { chosen[0] * chosen[1] };
        let beta = if item == CoprimalityItem::Corollary || rng.gen_bool(0.5) { chosen[2] } else { EisInt::one() };
        let extra = if item == CoprimalityItem::Corollary { chosen[3] } else { EisInt::one() };
        // r: unit·λ^j·(small primary coprime to everything chosen).
        let forbidden = [alpha, beta, extra];
        let r = loop {
            let a = rng.gen_range(-6i64..=6);
            let b = rng.gen_range(-6i64..=6);
            let cand = EisInt::new(a, b);
            if cand.is_zero() || cand.divisible_by_lambda() {
                continue;
            }
            let core = primary_associate(&cand).expect("nonzero").1;
            if forbidden.iter().all(|f| coprime(&core, f)) {
                let j = rng.gen_range(0..3u32);
                break units[rng.gen_range(0..6)] * EisInt::lambda().pow(j) * core;
            }
        };
        out.push(CoprimalityCase { item, alpha, beta, extra, r });
    }
    out
}

/// Squarefree primary elements of norm `≤ n`.
fn squarefree_primaries(n: i64) -> Vec<EisInt> {
    enumerate_by_norm(n, ClassFilter::Primary)
        .into_iter()
        .filter(|x| factor(x).map(|f| f.is_squarefree()).unwrap_or(false))
        .collect()
}

/// Largest value over `trials` of
/// `Σ_a |Σ_b λ_b χ_a(b)|² / (‖λ‖²·(A + B + (AB)^{2/3}))` for random signs
/// `λ_b ∈ {±1}` on squarefree primary `b`, `N(b) ≤ B`, summing over
/// squarefree primary `a`, `N(a) ≤ A`. Trial `i` uses seed `seed + i`.
pub fn large_sieve_ratio(a_max: i64, b_max: i64, trials: usize, seed: u64) -> LabResult<f64> {
    large_sieve_ratio_with(a_max, b_max, trials, seed, |rng| if rng.gen_bool(0.5) { 1.0 } else { -1.0 })
}

/// [`large_sieve_ratio`] with a custom coefficient generator.
pub fn large_sieve_ratio_with(
    a_max: i64,
    b_max: i64,
    trials: usize,
    seed: u64,
    coef: impl Fn(&mut ChaCha8Rng) -> f64 + Sync,
) -> LabResult<f64> {
    if a_max > 5000 || b_max > 5000 {
        return Err(LabError::CapExceeded { norm: a_max.max(b_max), cap: 5000 });
    }
    let a_list = squarefree_primaries(a_max);
    let b_list = squarefree_primaries(b_max);
    // χ_a(b) as ω-exponents (3 = zero), one row per a.
    let table: Vec<Vec<u8>> = a_list
        .par_iter()
        .map(|a| {
            b_list
                .iter()
                .map(|b| match symbol_unchecked(*b, *a) {
                    CubicSymbolValue::Zero => 3,
                    CubicSymbolValue::Root(k) => k,
                })
                .collect()
        })
        .collect();
    let norm = a_max as f64 + b_max as f64 + ((a_max * b_max) as f64).powf(2.0 / 3.0);
    let ratios: Vec<f64> = (0..trials)
        .into_par_iter()
        .map(|i| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed.wrapping_add(i as u64));
            let lam: Vec<f64> = b_list.iter().map(|_| coef(&mut rng)).collect();
            let l2: f64 = lam.iter().map(|x| x * x).sum();
            if l2 == 0.0 {
                return 0.0;
            }
            let lhs: f64 = table
                .iter()
                .map(|row| {
                    let mut bins = [0.0f64; 3];
                    for (e, l) in row.iter().zip(&lam) {
                        if *e != 3 {
                            bins[*e as usize] += l;
                        }
                    }
                    (OMEGA_POWERS[0] * bins[0] + OMEGA_POWERS[1] * bins[1] + OMEGA_POWERS[2] * bins[2]).norm_sqr()
                })
                .sum();
            lhs / (l2 * norm)
        })
        .collect();
    Ok(ratios.into_iter().fold(0.0, f64::max))
}

/// Both sides of the radial Poisson identity for `Ψ = χ_q`.
#[derive(Clone, Debug)]
pub struct PoissonResult {
    /// Lattice side `Σ_{m ≡ c (9)} Ψ(m) V(N(m)/M)`.
    pub lhs: Complex64,
    /// Dual side.
    pub rhs: Complex64,
    /// Scale: the larger of `Σ|Ψ(m)V(N(m)/M)|`, `|lhs|` and `|rhs|`.
    pub scale: f64,
    /// `|lhs − rhs|/scale`.
    pub residual: f64,
    /// Dual frequencies `k` summed.
    pub k_terms: usize,
    /// Cutoff `|u| = |k|√M/|q|` of the dual sum.
    pub u_cutoff: f64,
}

/// `Ψ(m) = χ_q(m)`, with `χ_1 ≡ 1`.
fn psi_char(q: &EisInt, m: &EisInt) -> Complex64 {
    if *q == EisInt::one() {
        return Complex64::new(1.0, 0.0);
    }
    symbol_unchecked(*m, *q).to_complex()
}

/// `Ψ̈(k) = Σ_{b mod q} Ψ(9λb) ě(−kb/q)` by the direct finite sum.
pub fn psi_ddot(q: &EisInt, k: &EisInt) -> Complex64 {
    let nq = q.norm();
    let w = q.conj();
    let nine_lambda = EisInt::new(9, 0) * EisInt::lambda();
    let mut s = Complex64::new(0.0, 0.0);
    for b in crate::gauss::residue_system(q) {
        let v = psi_char(q, &(nine_lambda * b));
        if v != Complex64::new(0.0, 0.0) {
            s += v * phase(-(*k * b * w).trace(), nq);
        }
    }
    s
}

/// Lattice side of the Poisson identity.
fn poisson_lhs(q: &EisInt, c: &EisInt, m: f64, v: TestFunction) -> (Complex64, f64) {
    let hi = (2.0 * m).ceil() as i64;
    let mut s = Complex64::new(0.0, 0.0);
    let mut abs = 0.0;
    for x in enumerate_by_norm(hi, ClassFilter::Mod9(ResidueClassMod9::of(c))) {
        let w = v.eval(x.norm() as f64 / m);
        if w == 0.0 {
            continue;
        }
        let t = psi_char(q, &x) * w;
        s += t;
        abs += t.norm();
    }
    (s, abs)
}

/// Dual side truncated at `|u| ≤ u_cutoff`; returns the value and the
/// number of frequencies used. `V̈` is evaluated once per norm shell.
pub fn poisson_rhs(q: &EisInt, c: &EisInt, m: f64, v: TestFunction, u_cutoff: f64) -> LabResult<(Complex64, usize)> {
    let nq = q.norm() as f64;
    let kmax = (u_cutoff * u_cutoff * nq / m).floor() as i64;
    let mut ks = enumerate_by_norm(kmax, ClassFilter::All);
    ks.insert(0, EisInt::zero());
    let mut norms: Vec<i64> = ks.iter().map(|k| k.norm()).collect();
    norms.dedup();
    let vals: Vec<LabResult<f64>> = norms.par_iter().map(|&n| v_ddot(v, (n as f64 * m / nq).sqrt())).collect();
    let mut vdd: HashMap<i64, f64> = HashMap::with_capacity(norms.len());
    for (n, val) in norms.iter().zip(vals) {
        vdd.insert(*n, val?);
    }
    let cq2l = *c * *q * *q * EisInt::lambda().conj();
    let terms: Vec<Complex64> = ks
        .par_iter()
        .map(|k| {
            let vd = vdd[&k.norm()];
            if vd == 0.0 {
                return Complex64::new(0.0, 0.0);
            }
            // ě(−kcq²/(9λ)) = e(−Tr(k·c·q²·λ̄)/27).
            psi_ddot(q, k) * phase(-(*k * cq2l).trace(), 27) * vd
        })
        .collect();
    let pref = 4.0 * PI * m / (3f64.powf(4.5) * nq);
    Ok((sum_complex(&terms) * pref, ks.len()))
}

/// Dual-tail budget relative to `Σ|Ψ(m)V(N(m)/M)|`.
pub const POISSON_TAIL_TOL: f64 = 1e-9;

/// Largest dual cutoff tried by [`poisson_cutoff`].
pub const POISSON_U_MAX: f64 = 4000.0;

/// Cutoff for the dual sum: the smallest `U = 100·1.25^j` such that the
/// `V̈` envelope on `[U, 2U]`, times the number of frequencies there and the
/// trivial bound `|Ψ̈| ≤ N(q)`, stays below the absolute tolerance `tol`.
pub fn poisson_cutoff(q: &EisInt, m: f64, v: TestFunction, tol: f64) -> LabResult<f64> {
    let nq = q.norm() as f64;
    let pref = 4.0 * PI * m / (3f64.powf(4.5) * nq);
    let mut u = 100.0;
    while u <= POISSON_U_MAX {
        let mut env = 0.0f64;
        for i in 0..=16 {
            env = env.max(v_ddot(v, u * (1.0 + i as f64 / 16.0))?.abs());
        }
        // Lattice points with N(k) ≤ x number about (2π/√3)·x.
        let count = 2.0 * PI / 3f64.sqrt() * 4.0 * u * u * nq / m + 6.0;
        if pref * nq * env * count < tol {
            return Ok(u);
        }
        u *= 1.25;
    }
    Err(LabError::QuadratureNotConverged(format!("dual sum needs |u| > {POISSON_U_MAX}")))
}

/// Evaluates both sides of the Poisson identity for `Ψ = χ_q`, a class
/// `c (mod 9)` and length `M`; `N(q) ≤ 50`.
pub fn poisson_check(q: &EisInt, c: &EisInt, m: f64) -> LabResult<PoissonResult> {
    if !q.is_primary() || q.norm() > 50 {
        return Err(LabError::BadModulus(*q));
    }
    let v = TestFunction::Bump;
    let (lhs, abs) = poisson_lhs(q, c, m, v);
    let u_cutoff = poisson_cutoff(q, m, v, POISSON_TAIL_TOL * abs)?;
    let (rhs, k_terms) = poisson_rhs(q, c, m, v, u_cutoff)?;
    let scale = abs.max(lhs.norm()).max(rhs.norm());
    Ok(PoissonResult { lhs, rhs, scale, residual: (lhs - rhs).norm() / scale, k_terms, u_cutoff })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gauss::tau3;

    #[test]
    fn polar_prediction_examples() {
        let one = EisInt::one();
        assert!((polar_prediction(&one).unwrap() - Complex64::new(27.0 * c0(), 0.0)).norm() < 1e-12);
        assert_eq!(polar_prediction(&EisInt::lambda()).unwrap(), Complex64::new(0.0, 0.0));
        assert!(polar_prediction(&EisInt::zero()).is_err());
        // r = c·d³ with c squarefree primary: 27·c₀·conj(g̃₃(c))·N(d)^{1/2}/N(r)^{1/6}.
        let c = EisInt::new(-1, 3);
        let c = primary_associate(&c).unwrap().1;
        let d = EisInt::new(-2, 0);
        let r = c * d * d * d;
        let gt = crate::gauss::g3_tilde(&one, &c).unwrap();
        let expected = gt.conj() * 27.0 * c0() * (d.norm() as f64).sqrt() / (r.norm() as f64).powf(1.0 / 6.0);
        assert!((polar_prediction(&r).unwrap() - expected).norm() < 1e-10);
        assert!((tau3(&r).unwrap() - gt.conj() * 27.0 * (d.norm() as f64).sqrt()).norm() < 1e-9);
    }

    #[test]
    fn psi_truncation_stabilizes() {
        let table = PsiTable::new(8000).unwrap();
        let s = Complex64::new(2.0, 0.0);
        let one = EisInt::one();
        let a = table.psi(&one, &one, s, 2000).unwrap();
        let b = table.psi(&one, &one, s, 4000).unwrap();
        let c = table.psi(&one, &one, s, 8000).unwrap();
        assert!((b - a).norm() <= 3.0 * 2000f64.powf(-0.5));
        assert!((c - b).norm() <= 3.0 * 4000f64.powf(-0.5));
        assert!(psi_truncated(&one, Complex64::new(1.0, 0.0), 100).is_err());
        assert!(table.psi(&one, &EisInt::zero(), s, 100).is_err());
    }

    #[test]
    fn psi_table_matches_direct_gauss_sums() {
        let table = PsiTable::new(300).unwrap();
        let r = EisInt::new(2, 1);
        let g = table.gauss_sums(&r);
        for (c, v) in table.moduli.iter().zip(&g) {
            let direct = crate::gauss::g3_direct(&r, c).unwrap();
            assert!((direct - v).norm() < 1e-8 * (1.0 + direct.norm()), "{c}");
        }
    }

    #[test]
    fn coprimality_trivial_alpha() {
        let table = PsiTable::new(3000).unwrap();
        let s = Complex64::new(2.0, 0.0);
        let one = EisInt::one();
        let r = EisInt::new(2, 3);
        for item in [CoprimalityItem::I, CoprimalityItem::II, CoprimalityItem::III] {
            let res = coprimality_identity_check(&table, item, &one, &one, &one, &r, s, 3000).unwrap();
            assert!(res.residual < 1e-12, "{item:?}: {res:?}");
        }
    }

    #[test]
    fn coprimality_items_within_budget() {
        let t = 20_000;
        let table = PsiTable::new(t).unwrap();
        let s = Complex64::new(2.0, 0.0);
        let pi = primary_associate(&EisInt::new(3, 1)).unwrap().1; // N = 7
        let pi2 = primary_associate(&EisInt::new(4, 1)).unwrap().1; // N = 13
        let one = EisInt::one();
        let r = one;
        let res = coprimality_identity_check(&table, CoprimalityItem::I, &pi, &one, &one, &r, s, t).unwrap();
        assert!(res.residual <= res.budget, "{res:?}");
        let res = coprimality_identity_check(&table, CoprimalityItem::Corollary, &pi, &one, &pi2, &r, s, t).unwrap();
        assert!(res.residual <= res.budget, "{res:?}");
        for case in random_coprimality_cases(8, 3) {
            let res =
                coprimality_identity_check(&table, case.item, &case.alpha, &case.beta, &case.extra, &case.r, s, t).unwrap();
            assert!(res.residual <= res.budget, "{case:?}: {res:?}");
        }
    }

    #[test]
    fn large_sieve_degenerate_cases() {
        assert_eq!(large_sieve_ratio_with(200, 200, 2, 1, |_| 0.0).unwrap(), 0.0);
        // B = 1: only b = 1, so the sum is the number of squarefree a.
        let count = squarefree_primaries(300).len() as f64;
        let r = large_sieve_ratio(300, 1, 3, 5).unwrap();
        assert!((r - count / (300.0 + 1.0 + 300f64.powf(2.0 / 3.0))).abs() < 1e-12);
        let r1 = large_sieve_ratio(300, 300, 5, 1).unwrap();
        let r2 = large_sieve_ratio(300, 300, 5, 99).unwrap();
        assert!(r1.is_finite() && r1 > 0.0 && (r1 / r2 - 1.0).abs() < 0.5);
    }

    #[test]
    fn psi_ddot_is_a_gauss_sum() {
        // Ψ̈(k) = χ_q(9λ)·g₃(−k, q) for Ψ = χ_q.
        for q in enumerate_by_norm(50, ClassFilter::Primary).into_iter().filter(|q| *q != EisInt::one()) {
            let chi = symbol_unchecked(EisInt::new(9, 0) * EisInt::lambda(), q).to_complex();
            for k in enumerate_by_norm(30, ClassFilter::All).into_iter().step_by(5) {
                let direct = psi_ddot(&q, &k);
                let via = chi * crate::gauss::g3_direct(&(-k), &q).unwrap();
                assert!((direct - via).norm() < 1e-9, "{q} {k}");
            }
        }
    }

    #[test]
    fn poisson_trivial_character() {
        let res = poisson_check(&EisInt::one(), &EisInt::one(), 400.0).unwrap();
        assert!(res.residual <= 1e-6, "{res:?}");
    }

    #[test]
    fn poisson_nontrivial_characters() {
        for n in [7, 13] {
            let q = enumerate_by_norm(n, ClassFilter::Primary).into_iter().find(|q| q.norm() == n).unwrap();
            for c in [EisInt::one(), EisInt::new(2, 3)] {
                let res = poisson_check(&q, &c, 400.0).unwrap();
                assert!(res.residual <= 1e-6, "{q} {c}: {res:?}");
            }
        }
    }

    #[test]
    fn poisson_dual_sum_converges() {
        let q = enumerate_by_norm(7, ClassFilter::Primary).into_iter().find(|q| q.norm() == 7).unwrap();
        let c = EisInt::new(4, 0);
        let (a, _) = poisson_rhs(&q, &c, 400.0, TestFunction::Bump, 700.0).unwrap();
        let (b, _) = poisson_rhs(&q, &c, 400.0, TestFunction::Bump, 1400.0).unwrap();
        assert!((a - b).norm() < 1e-8, "{a} {b}");
    }
}
