//! Special functions needed by the smooth weights: complex `ln Γ`, `erfc`,
//! `J₀` and the tail integral of `K₀`.
//!
//! Real `erfc` and `J₀` come from `libm` (ports of the fdlibm routines).

use std::f64::consts::PI;

use num_complex::Complex64;

const LANCZOS_G: f64 = 7.0;
const LANCZOS: [f64; 9] = [
    0.999_999_999_999_809_9,
    676.520_368_121_885_1,
    -1_259.139_216_722_402_8,
    771.323_428_777_653_1,
    -176.615_029_162_140_6,
    12.507_343_278_686_905,
    -0.138_571_095_265_720_12,
    9.984_369_578_019_572e-6,
    1.505_632_735_149_311_6e-7,
];

/// `ln Γ(z)` for complex `z` off the non-positive integers (Lanczos, `g = 7`),
/// with reflection for `Re z < 1/2`. Only `exp` of the result is meaningful:
/// the imaginary part is determined modulo `2π`.
pub fn ln_gamma(z: Complex64) -> Complex64 {
    if z.re < 0.5 {
        let s = (z * PI).sin();
        return Complex64::new(PI.ln(), 0.0) - s.ln() - ln_gamma(Complex64::new(1.0, 0.0) - z);
    }
    let z = z - 1.0;
    let mut x = Complex64::new(LANCZOS[0], 0.0);
    for (i, c) in LANCZOS.iter().enumerate().skip(1) {
        x += *c / (z + i as f64);
    }
    let t = z + LANCZOS_G + 0.5;
    Complex64::new(0.5 * (2.0 * PI).ln(), 0.0) + (z + 0.5) * t.ln() - t + x.ln()
}

/// `Γ(z)` for complex `z`.
pub fn gamma(z: Complex64) -> Complex64 {
    ln_gamma(z).exp()
}

/// Complementary error function.
#[inline]
pub fn erfc(x: f64) -> f64 {
    libm::erfc(x)
}

/// Bessel function `J₀`.
#[inline]
pub fn bessel_j0(x: f64) -> f64 {
    libm::j0(x)
}

/// `∫_a^∞ K₀(u) du` for `a ≥ 0`, from `K₀(u) = ∫₀^∞ e^{−u cosh t} dt`:
/// the tail equals `∫₀^∞ e^{−a cosh t}/cosh t dt`, evaluated by the
/// trapezoid rule (even, analytic integrand in a strip of half-width `π/2`).
pub fn k0_tail_integral(a: f64) -> f64 {
    let h = 1.0 / 16.0;
    let mut sum = 0.5 * (-a).exp();
    let mut k = 1;
    loop {
        let t = k as f64 * h;
        let ch = t.cosh();
        let term = (-a * ch).exp() / ch;
        sum += term;
        if term < 1e-18 * sum.max(1e-300) || a * ch > 745.0 {
            break;
        }
        k += 1;
    }
    sum * h
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gamma_known_values() {
        let one = Complex64::new(1.0, 0.0);
        assert!((gamma(one) - one).norm() < 1e-13);
        assert!((gamma(Complex64::new(0.5, 0.0)).re - PI.sqrt()).abs() < 1e-13);
        assert!((gamma(Complex64::new(5.0, 0.0)).re - 24.0).abs() < 1e-11);
        // Reflection region.
        assert!((gamma(Complex64::new(-0.5, 0.0)).re + 2.0 * PI.sqrt()).abs() < 1e-12);
        // |Γ(1/2 + it)|² = π / cosh(πt).
        for t in [0.3, 2.0, 10.0, 40.0] {
            let g = gamma(Complex64::new(0.5, t));
            let expected = PI / (PI * t).cosh();
            assert!((g.norm_sqr() / expected - 1.0).abs() < 1e-11, "t = {t}");
        }
        // Recurrence Γ(z+1) = zΓ(z) off the real axis.
        let z = Complex64::new(0.7, -3.1);
        assert!((gamma(z + 1.0) / (z * gamma(z)) - one).norm() < 1e-12);
    }

    #[test]
    fn k0_tail_limits() {
        assert!((k0_tail_integral(0.0) - PI / 2.0).abs() < 1e-14);
        // ∫_a^∞ K₀ ~ √(π/(2a)) e^{−a}(1 − 5/(8a) + …) for large a.
        let a = 40.0f64;
        let approx = (PI / (2.0 * a)).sqrt() * (-a).exp() * (1.0 - 5.0 / (8.0 * a) + 129.0 / (128.0 * a * a));
        assert!((k0_tail_integral(a) / approx - 1.0).abs() < 1e-4);
    }
}
