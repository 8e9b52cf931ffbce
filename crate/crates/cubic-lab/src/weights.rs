//! Smooth weights: the cutoffs `Φ_j` of the central approximate functional
//! equation, the general-point cutoff `V_s`, the test functions `F` with
//! their Mellin-type transform `F̌(w) = ∫₀^∞ F(t) t^w dt`, and the radial
//! transform `V̈` used in the lattice Poisson formula.
//!
//! Inverse Mellin integrals `(1/2πi)∫_{(c)} K(w) y^{−w} dw/w` are evaluated by
//! the trapezoid rule on the vertical line `Re w = c`. The integrands are
//! analytic in a strip around the line and decay exponentially, so the rule
//! converges geometrically in the step; each evaluation is certified by
//! halving the step and doubling the height until two passes agree.

use std::f64::consts::PI;
use std::sync::OnceLock;

use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{LabError, LabResult};
use crate::scalar::Real;
use crate::special::{bessel_j0, ln_gamma};

/// Agreement required between successive contour refinements.
pub const CONTOUR_TOL: f64 = 1e-9;
/// Initial trapezoid step on the contour.
pub const CONTOUR_STEP: f64 = 1.0 / 64.0;
/// Initial truncation height `|Im w| ≤ H`.
pub const CONTOUR_HEIGHT: f64 = 60.0;
/// Default `A` in `G(u) = cos(πu/(4A))^{−8A}`.
pub const DEFAULT_A: u32 = 2;

/// Abscissa of the `Φ_j` contour. The canonical line is `Re w = 2`; for
/// small `y` the factor `y^{−c}` would amplify rounding, so a line closer to
/// the pole at `w = 0` is used (no singularity lies in between).
fn phi_abscissa(y: f64) -> f64 {
    if y >= 0.1 {
        2.0
    } else {
        0.5
    }
}

/// Precomputed trapezoid nodes `(w_k, weight_k)` for one contour; the
/// weights include `h/2π`, the `1/w` factor and the symmetric doubling.
#[derive(Clone, Debug)]
struct Contour {
    nodes: Vec<(Complex64, Complex64)>,
}

impl Contour {
    /// Builds nodes for `(1/2πi)∫ K(w) y^{−w} dw/w` on `Re w = c`, assuming
    /// `K(w̄) = conj(K(w))` so only `Im w ≥ 0` is sampled.
    fn new(c: f64, h: f64, height: f64, kernel: impl Fn(Complex64) -> Complex64) -> Self {
        let n = (height / h).ceil() as usize;
        let nodes = (0..=n)
            .map(|k| {
                let w = Complex64::new(c, k as f64 * h);
                let sym = if k == 0 { 1.0 } else { 2.0 };
                (w, kernel(w) / w * (sym * h / (2.0 * PI)))
            })
            .collect();
        Self { nodes }
    }

    /// Returns `(Re I(y), Re of −y·dI/dy)` where `I(y) = Σ weight·y^{−w}`.
    fn eval(&self, ln_y: f64) -> (f64, f64) {
        let mut v = 0.0;
        let mut d = 0.0;
        for (w, wt) in &self.nodes {
            let term = *wt * (-*w * ln_y).exp();
            v += term.re;
            d += (term * *w).re;
        }
        (v, d)
    }

    /// Complex-valued evaluation (no conjugate symmetry assumed by caller:
    /// used with explicit two-sided node sets).
    fn eval_complex(&self, ln_y: f64) -> Complex64 {
        self.nodes.iter().map(|(w, wt)| *wt * (-*w * ln_y).exp()).sum()
    }
}

fn phi_kernel(j: u32) -> impl Fn(Complex64) -> Complex64 {
    let ln_sqrt_pi = 0.5 * PI.ln();
    let ln_2pi = (2.0 * PI).ln();
    move |w: Complex64| {
        let jf = j as f64;
        ((ln_gamma(w + 0.5) - ln_sqrt_pi) * jf - w * (jf * ln_2pi)).exp()
    }
}

fn check_j(j: u32) -> LabResult<()> {
    if j == 1 || j == 2 {
        Ok(())
    } else {
        Err(LabError::InvalidInput(format!("Φ_j needs j ∈ {{1, 2}}, got {j}")))
    }
}

/// `Φ_j(y)` by certified Mellin–Barnes quadrature (no table).
pub fn phi(j: u32, y: f64) -> LabResult<f64> {
    check_j(j)?;
    if !(y > 0.0) || !y.is_finite() {
        return Err(LabError::InvalidInput(format!("Φ_j needs y > 0, got {y}")));
    }
    let c = phi_abscissa(y);
    let ln_y = y.ln();
    let (mut h, mut height) = (CONTOUR_STEP, CONTOUR_HEIGHT);
    let mut prev = Contour::new(c, h, height, phi_kernel(j)).eval(ln_y).0;
    for _ in 0..4 {
        h /= 2.0;
        height *= 2.0;
        let next = Contour::new(c, h, height, phi_kernel(j)).eval(ln_y).0;
        if (next - prev).abs() <= CONTOUR_TOL {
            return Ok(next);
        }
        prev = next;
    }
    Err(LabError::QuadratureNotConverged(format!("Φ_{j}({y})")))
}

/// Closed form `Φ₁(y) = erfc(√(2πy))`.
pub fn phi1_closed_form(y: f64) -> f64 {
    crate::special::erfc((2.0 * PI * y).sqrt())
}

/// Closed form `Φ₂(y) = (2/π)∫_{4π√y}^∞ K₀(u) du`.
pub fn phi2_closed_form(y: f64) -> f64 {
    2.0 / PI * crate::special::k0_tail_integral(4.0 * PI * y.sqrt())
}

/// Cubic Hermite table of `Φ_j` in the variable `u = ln y`.
#[derive(Clone, Debug)]
pub struct PhiTable {
    j: u32,
    u_min: f64,
    step: f64,
    values: Vec<f64>,
    /// `dΦ/du = y·Φ'(y)`.
    slopes: Vec<f64>,
}

impl PhiTable {
    /// Smallest tabulated argument; below it [`PhiTable::eval`] falls back
    /// to direct quadrature.
    pub const Y_MIN: f64 = 1e-7;
    /// Largest tabulated argument; above it `Φ_j` is below `10⁻¹⁸`.
    pub const Y_MAX: f64 = 12.0;
    /// Grid spacing in `ln y`.
    pub const STEP: f64 = 0.005;

    /// Tabulates `Φ_j` on the geometric grid (parallel, deterministic).
    pub fn build(j: u32) -> LabResult<Self> {
        check_j(j)?;
        let u_min = Self::Y_MIN.ln();
        let n = ((Self::Y_MAX.ln() - u_min) / Self::STEP).ceil() as usize + 1;
        let small = Contour::new(0.5, CONTOUR_STEP, CONTOUR_HEIGHT, phi_kernel(j));
        let large = Contour::new(2.0, CONTOUR_STEP, CONTOUR_HEIGHT, phi_kernel(j));
        let pts: Vec<(f64, f64)> = (0..n)
            .into_par_iter()
            .map(|i| {
                let u = u_min + i as f64 * Self::STEP;
                let contour = if u.exp() >= 0.1 { &large } else { &small };
                let (v, d) = contour.eval(u);
                (v, -d)
            })
            .collect();
        let (values, slopes) = pts.into_iter().unzip();
        Ok(Self { j, u_min, step: Self::STEP, values, slopes })
    }

    /// Interpolated `Φ_j(y)`.
    pub fn eval(&self, y: f64) -> f64 {
        if y >= Self::Y_MAX {
            return 0.0;
        }
        if y < Self::Y_MIN {
            return phi(self.j, y).unwrap_or(1.0);
        }
        let u = (y.ln() - self.u_min) / self.step;
        let i = (u.floor() as usize).min(self.values.len() - 2);
        let t = u - i as f64;
        let (p0, p1) = (self.values[i], self.values[i + 1]);
        let (m0, m1) = (self.slopes[i] * self.step, self.slopes[i + 1] * self.step);
        let t2 = t * t;
        let t3 = t2 * t;
        (2.0 * t3 - 3.0 * t2 + 1.0) * p0
            + (t3 - 2.0 * t2 + t) * m0
            + (-2.0 * t3 + 3.0 * t2) * p1
            + (t3 - t2) * m1
    }
}

/// Shared table for `Φ_j`, built on first use.
pub fn phi_table(j: u32) -> &'static PhiTable {
    static T1: OnceLock<PhiTable> = OnceLock::new();
    static T2: OnceLock<PhiTable> = OnceLock::new();
    let cell = if j == 1 { &T1 } else { &T2 };
    cell.get_or_init(|| PhiTable::build(if j == 1 { 1 } else { 2 }).expect("valid j"))
}

/// Fast tabulated `Φ_j(y)`.
#[inline]
pub fn phi_fast(j: u32, y: f64) -> f64 {
    phi_table(j).eval(y)
}

/// `G(u) = cos(πu/(4A))^{−8A}`.
pub fn g_weight(u: Complex64, a: u32) -> Complex64 {
    (u * (PI / (4.0 * a as f64))).cos().powi(-8 * a as i32)
}

/// Kernel of `V_s`: precomputed contour nodes for a fixed `s` and `A`.
#[derive(Clone, Debug)]
pub struct VsKernel {
    s: Complex64,
    near: Contour,
    far: Contour,
}

impl VsKernel {
    /// Nodes for `V_s(y) = (1/2πi)∫_{(c)} (2π)^{−w} y^{−w} G(w) Γ(s+w)/Γ(s) dw/w`.
    pub fn new(s: Complex64, a: u32) -> LabResult<Self> {
        Self::with_resolution(s, a, 1.0 / 32.0, 30.0)
    }

    fn with_resolution(s: Complex64, a: u32, h: f64, height: f64) -> LabResult<Self> {
        if !(0.0..=1.5).contains(&s.re) || a == 0 {
            return Err(LabError::OutOfStrip(s.re));
        }
        let lg_s = ln_gamma(s);
        let ln_2pi = (2.0 * PI).ln();
        let kernel = move |w: Complex64| {
            (ln_gamma(s + w) - lg_s - w * ln_2pi).exp() * g_weight(w, a)
        };
        // Complex s: no conjugate symmetry, so sample both half-lines.
        let two_sided = |c: f64| {
            let n = (height / h).ceil() as i64;
            let nodes = (-n..=n)
                .map(|k| {
                    let w = Complex64::new(c, k as f64 * h);
                    (w, kernel(w) / w * (h / (2.0 * PI)))
                })
                .collect();
            Contour { nodes }
        };
        Ok(Self { s, near: two_sided(1.0), far: two_sided(2.0) })
    }

    /// The parameter `s`.
    pub fn s(&self) -> Complex64 {
        self.s
    }

    /// `V_s(y)` for `y > 0`.
    pub fn eval(&self, y: f64) -> Complex64 {
        let c = if y >= 1.0 { &self.far } else { &self.near };
        c.eval_complex(y.ln())
    }
}

/// `V_s(y)` with `G` from `A`, certified by one refinement of the contour.
pub fn v_s(s: Complex64, y: f64, a: u32) -> LabResult<Complex64> {
    if !(0.1..=1.5).contains(&s.re) {
        return Err(LabError::OutOfStrip(s.re));
    }
    if !(y > 0.0) {
        return Err(LabError::InvalidInput(format!("V_s needs y > 0, got {y}")));
    }
    let coarse = VsKernel::with_resolution(s, a, 1.0 / 32.0, 30.0)?.eval(y);
    let fine = VsKernel::with_resolution(s, a, 1.0 / 64.0, 60.0)?.eval(y);
    if (coarse - fine).norm() > CONTOUR_TOL * (1.0 + fine.norm()) {
        return Err(LabError::QuadratureNotConverged(format!("V_{s}({y})")));
    }
    Ok(fine)
}

/// Smooth test functions supported in `(1, 2)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum TestFunction {
    /// `exp(−1/((t−1)(2−t)))` on `(1, 2)`.
    Bump,
    /// Equal to 1 on `[1.1, 1.9]` with `C^∞` shoulders on `(1, 1.1)` and `(1.9, 2)`.
    Smoothstep,
}

impl TestFunction {
    /// Short identifier used in configuration files and CSV headers.
    pub fn name(&self) -> &'static str {
        match self {
            TestFunction::Bump => "bump",
            TestFunction::Smoothstep => "smoothstep",
        }
    }

    /// Parses [`TestFunction::name`].
    pub fn parse(s: &str) -> LabResult<Self> {
        match s {
            "bump" => Ok(TestFunction::Bump),
            "smoothstep" => Ok(TestFunction::Smoothstep),
            _ => Err(LabError::InvalidInput(format!("unknown test function {s:?}"))),
        }
    }

    /// `F(t)`.
    pub fn eval<R: Real>(&self, t: R) -> R {
        let one = R::one();
        let two = R::lit(2.0);
        if t <= one || t >= two {
            return R::zero();
        }
        match self {
            TestFunction::Bump => (-(one / ((t - one) * (two - t)))).exp(),
            TestFunction::Smoothstep => {
                let w = R::lit(0.1);
                if t < one + w {
                    smooth_transition((t - one) / w)
                } else if t > two - w {
                    smooth_transition((two - t) / w)
                } else {
                    one
                }
            }
        }
    }

    /// `F̌(w) = ∫₁² F(t) t^w dt`.
    pub fn f_check(&self, w: Complex64) -> Complex64 {
        f_check_trapezoid(|t| self.eval(t), w, 1e-12)
    }
}

/// `C^∞` step from 0 at `x ≤ 0` to 1 at `x ≥ 1`, built from `e^{−1/x}`.
pub fn smooth_transition<R: Real>(x: R) -> R {
    let one = R::one();
    if x <= R::zero() {
        return R::zero();
    }
    if x >= one {
        return one;
    }
    let a = (-(one / x)).exp();
    let b = (-(one / (one - x))).exp();
    a / (a + b)
}

/// `∫₁² f(t) t^w dt` by trapezoid refinement. For integrands that vanish to
/// infinite order at both ends the rule converges faster than any power of
/// the step, so successive halving is a reliable certificate.
fn f_check_trapezoid(f: impl Fn(f64) -> f64, w: Complex64, tol: f64) -> Complex64 {
    let integrand = |t: f64| Complex64::new(f(t), 0.0) * (w * t.ln()).exp();
    let mut n = 64usize;
    let mut sum: Complex64 = (1..n).map(|k| integrand(1.0 + k as f64 / n as f64)).sum();
    let mut prev = sum / n as f64;
    for _ in 0..12 {
        let extra: Complex64 = (0..n).map(|k| integrand(1.0 + (2 * k + 1) as f64 / (2 * n) as f64)).sum();
        sum += extra;
        n *= 2;
        let cur = sum / n as f64;
        if (cur - prev).norm() <= tol {
            return cur;
        }
        prev = cur;
    }
    prev
}

/// `V̈(u) = ∫₀^∞ t V(t²) J₀(4πt|u|/(9√3)) dt` for `V = F` supported in `(1, 2)`,
/// so the integral runs over `t ∈ (1, √2)`.
pub fn v_ddot(v: TestFunction, u_abs: f64) -> LabResult<f64> {
    if !(u_abs >= 0.0) {
        return Err(LabError::InvalidInput(format!("V̈ needs |u| ≥ 0, got {u_abs}")));
    }
    let k = 4.0 * PI * u_abs / (9.0 * 3f64.sqrt());
    let (lo, hi) = (1.0, 2f64.sqrt());
    let integrand = |t: f64| t * v.eval(t * t) * bessel_j0(k * t);
    // Enough initial points to resolve the oscillation of J₀.
    let mut n = (64.0 + 4.0 * k * (hi - lo)).ceil() as usize;
    let width = hi - lo;
    let mut sum: f64 = (1..n).map(|i| integrand(lo + width * i as f64 / n as f64)).sum();
    let mut prev = sum * width / n as f64;
    for _ in 0..14 {
        let extra: f64 = (0..n).map(|i| integrand(lo + width * (2 * i + 1) as f64 / (2 * n) as f64)).sum();
        sum += extra;
        n *= 2;
        let cur = sum * width / n as f64;
        if (cur - prev).abs() <= 1e-15 + 1e-13 * cur.abs() {
            return Ok(cur);
        }
        prev = cur;
    }
    Err(LabError::QuadratureNotConverged(format!("V̈({u_abs})")))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn phi1_matches_erfc() {
        for &y in &[1e-3, 0.01, 0.05, 0.1, 0.3, 1.0, 2.5, 10.0] {
            let v = phi(1, y).unwrap();
            assert!((v - phi1_closed_form(y)).abs() <= 1e-8, "y = {y}: {v}");
        }
    }

    #[test]
    fn phi2_matches_bessel_form() {
        for &y in &[1e-3, 0.02, 0.2, 1.0, 5.0] {
            let v = phi(2, y).unwrap();
            assert!((v - phi2_closed_form(y)).abs() <= 1e-8, "y = {y}: {v}");
        }
    }

    #[test]
    fn phi_limits() {
        for j in [1, 2] {
            assert!(phi(j, 10.0).unwrap() <= 1e-6);
            // Next singularity at w = −1/2: deviation O(√y), with an extra
            // logarithm for j = 2 (double pole).
            let dev = |y: f64| 1.0 - phi(j, y).unwrap();
            for y in [1e-8, 1e-6, 1e-4] {
                let d = dev(y);
                assert!(d > 0.0 && d <= 5.0 * y.sqrt() * (1.0 + y.ln().abs()), "j = {j}, y = {y}: {d}");
            }
            assert!(dev(1e-8) < dev(1e-6) / 5.0);
        }
        assert!(phi(3, 1.0).is_err());
        assert!(phi(1, -1.0).is_err());
    }

    #[test]
    fn tables_match_direct_evaluation() {
        for j in [1, 2] {
            let t = phi_table(j);
            let mut y = 1.3e-7;
            while y < 11.0 {
                let exact = if j == 1 { phi1_closed_form(y) } else { phi2_closed_form(y) };
                assert!((t.eval(y) - exact).abs() <= 1e-8, "j = {j}, y = {y}");
                y *= 1.173;
            }
            assert_eq!(t.eval(20.0), 0.0);
        }
    }

    #[test]
    fn v_s_contracts() {
        let half = Complex64::new(0.5, 0.0);
        assert!((v_s(half, 1e-4, 2).unwrap() - 1.0).norm() <= 0.05);
        assert!(v_s(half, 100.0, 2).unwrap().norm() <= 1e-4);
        let s = Complex64::new(0.7, 3.0);
        let a = v_s(s, 0.8, 2).unwrap();
        let b = v_s(s.conj(), 0.8, 2).unwrap();
        assert!((a - b.conj()).norm() < 1e-12);
        assert!(matches!(v_s(Complex64::new(1.7, 0.0), 1.0, 2), Err(LabError::OutOfStrip(_))));
    }

    #[test]
    fn test_functions() {
        assert!((TestFunction::Bump.eval(1.5f64) - (-4.0f64).exp()).abs() < 1e-16);
        assert_eq!(TestFunction::Smoothstep.eval(1.5f64), 1.0);
        assert_eq!(TestFunction::Bump.eval(1.0f64), 0.0);
        assert_eq!(TestFunction::Smoothstep.eval(2.0f32), 0.0);
        for f in [TestFunction::Bump, TestFunction::Smoothstep] {
            let c = f.f_check(Complex64::new(0.0, 0.0));
            assert!(c.re > 0.0 && c.re <= 1.0 && c.im == 0.0);
            for i in 0..=10_000 {
                let t = 0.9 + 1.2 * i as f64 / 10_000.0;
                let v = f.eval(t);
                assert!((0.0..=1.0).contains(&v));
                if t <= 1.0 || t >= 2.0 {
                    assert_eq!(v, 0.0);
                }
            }
        }
    }

    #[test]
    fn f_check_against_simpson() {
        let f = TestFunction::Bump;
        let n = 20_000;
        let h = 1.0 / n as f64;
        let mut s = 0.0;
        for i in 0..=n {
            let t = 1.0 + i as f64 * h;
            let wgt = if i == 0 || i == n { 1.0 } else if i % 2 == 1 { 4.0 } else { 2.0 };
            s += wgt * f.eval(t);
        }
        s *= h / 3.0;
        assert!((f.f_check(Complex64::new(0.0, 0.0)).re - s).abs() <= 1e-9);
    }

    #[test]
    fn v_ddot_properties() {
        let f = TestFunction::Bump;
        let half_integral = 0.5 * f.f_check(Complex64::new(0.0, 0.0)).re;
        assert!((v_ddot(f, 0.0).unwrap() - half_integral).abs() < 1e-12);
        // Independent Simpson oracle at a point where J₀ oscillates.
        let u = 50.0;
        let k = 4.0 * PI * u / (9.0 * 3f64.sqrt());
        let (lo, hi) = (1.0, 2f64.sqrt());
        let n = 200_000;
        let h = (hi - lo) / n as f64;
        let mut s = 0.0;
        for i in 0..=n {
            let t = lo + i as f64 * h;
            let wgt = if i == 0 || i == n { 1.0 } else if i % 2 == 1 { 4.0 } else { 2.0 };
            s += wgt * t * f.eval(t * t) * bessel_j0(k * t);
        }
        s *= h / 3.0;
        let v50 = v_ddot(f, u).unwrap();
        assert!((v50 - s).abs() <= 1e-12, "{v50} vs {s}");
        // Rapid but sub-exponential decay (the bump is Gevrey, not analytic).
        assert!(v50.abs() <= 1e-5);
        assert!(v_ddot(f, 120.0).unwrap().abs() <= 1e-6);
        assert!(v_ddot(f, 400.0).unwrap().abs() <= 1e-9);
    }

    #[test]
    fn v_ddot_refinement_is_stable() {
        for u in [0.0, 3.0, 17.0, 90.0] {
            let a = v_ddot(TestFunction::Bump, u).unwrap();
            let b = v_ddot(TestFunction::Bump, u * (1.0 + 1e-15)).unwrap();
            assert!((a - b).abs() <= 1e-8);
        }
    }
}
