//! Sizes and tolerances of the acceptance checklist.

/// Seed for every randomized criterion.
pub const SEED: u64 = 20_240_601;

/// #1: norm bound and relative tolerance for `||g₃(c)|² − μ²(c)N(c)|`.
pub const GAUSS_MAGNITUDE_NORM: i64 = 2000;
/// #1 tolerance, relative to `N(c)`.
pub const GAUSS_MAGNITUDE_REL: f64 = 1e-9;

/// #2: split primes up to this norm.
pub const CUBE_RELATION_NORM: i64 = 5000;
/// #2 tolerance, relative to `N(π)^{3/2}`.
pub const CUBE_RELATION_REL: f64 = 1e-6;

/// #3: random pairs compared against the definition.
pub const SYMBOL_PAIRS: usize = 10_000;
/// #3: primary coprime pairs for the reciprocity swap.
pub const RECIPROCITY_PAIRS: usize = 1000;
/// #3: norm bound of the moduli.
pub const SYMBOL_NORM: i64 = 100_000;

/// #4: family bound for the AFE cross-check.
pub const AFE_FAMILY_NORM: i64 = 10_000;
/// #4 relative tolerance.
pub const AFE_REL: f64 = 1e-6;

/// #5: family elements checked.
pub const ROOT_NUMBER_COUNT: usize = 200;
/// #5: conductor-norm bound.
pub const ROOT_NUMBER_CONDUCTOR: i64 = 10_000;
/// #5 absolute tolerance.
pub const ROOT_NUMBER_ABS: f64 = 1e-8;

/// #6: range of `y`.
pub const PHI1_RANGE: (f64, f64) = (1e-3, 10.0);
/// #6: log-spaced intervals.
pub const PHI1_POINTS: usize = 200;
/// #6 absolute tolerance.
pub const PHI1_ABS: f64 = 1e-8;

/// #7: prime-norm bounds compared.
pub const EULER_BOUNDS: (u64, u64) = (100_000, 200_000);
/// #7: absolute stability.
pub const EULER_STABILITY: f64 = 1e-6;
/// #7: bound for the `𝒫₁` product.
pub const P1_BOUND: u64 = 1_000_000;
/// #7: `|𝒫₁ − 1|` tolerance.
pub const P1_ABS: f64 = 1e-4;

/// #8: scale `X`.
pub const DENSITY_X: i64 = 1_000_000;
/// #8 relative tolerance.
pub const DENSITY_REL: f64 = 0.02;

/// #9–#11, #15: family scales.
pub const MOMENT_GRID: [f64; 4] = [1e4, 3e4, 1e5, 3e5];
/// #9: scale where the band applies.
pub const FIRST_MOMENT_X: f64 = 1e5;
/// #9 ratio band.
pub const FIRST_MOMENT_BAND: (f64, f64) = (0.6, 1.4);
/// #10 slope-ratio band.
pub const SECOND_MOMENT_BAND: (f64, f64) = (0.8, 1.2);
/// #11: scale.
pub const NONVANISHING_X: f64 = 1e5;
/// #11: lower bound on the fraction.
pub const NONVANISHING_MIN: f64 = 1.0 / 7.0;

/// #12: largest `T`.
pub const BIAS_TMAX: i64 = 1_000_000;
/// #12 exponent band.
pub const BIAS_EXPONENT_BAND: (f64, f64) = (0.75, 0.92);
/// #12 ratio band at `T_max`.
pub const BIAS_RATIO_BAND: (f64, f64) = (0.75, 1.25);

/// #13: norms of `q`.
pub const POISSON_NORMS: [i64; 3] = [1, 7, 13];
/// #13: length `M`.
pub const POISSON_M: f64 = 400.0;
/// #13 relative residual.
pub const POISSON_REL: f64 = 1e-6;

/// #14: truncation `T`.
pub const COPRIMALITY_T: i64 = 100_000;
/// #14: random parameter choices.
pub const COPRIMALITY_CASES: usize = 20;

/// #15: mollifier exponent.
pub const MOLLIFIER_THETA: f64 = 0.1;
/// #15: scale.
pub const MOLLIFIER_X: f64 = 1e5;
/// #15: `Q₁` dual-formula tolerance.
pub const MOLLIFIER_Q1_ABS: f64 = 1e-9;
