//! Exact arithmetic in the Eisenstein integers `Z[ω]`, `ω = e^{2πi/3}`.
//!
//! An element is stored as `a + bω` with integer coordinates. The ring type
//! [`Eisenstein<T>`] is generic over any signed primitive integer; the rest of
//! the crate works with the 64-bit alias [`EisInt`]. Every ring operation is
//! overflow-checked: the `checked_*` methods return `None`, while the operator
//! impls panic with a descriptive message instead of silently wrapping.
//!
//! Conventions used throughout the crate:
//!
//! * `N(a + bω) = a² − ab + b²`, `Tr(a + bω) = 2a − b`.
//! * `λ = 1 + 2ω` is the ramified prime, `λ² = −3`.
//! * An element is *primary* when it is `≡ 1 (mod 3)`, i.e. `a ≡ 1`, `b ≡ 0 (mod 3)`.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_traits::{PrimInt, Signed};

use crate::error::{LabError, LabResult};

/// Integer coordinate types admissible for [`Eisenstein`].
pub trait Coord: PrimInt + Signed + fmt::Debug + fmt::Display + Send + Sync + 'static {}
impl<T: PrimInt + Signed + fmt::Debug + fmt::Display + Send + Sync + 'static> Coord for T {}

/// The element `a + bω` of `Z[ω]`.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct Eisenstein<T> {
    /// Rational coordinate.
    pub a: T,
    /// Coefficient of `ω`.
    pub b: T,
}

impl<T: Coord> Eisenstein<T> {
    /// Builds `a + bω`.
    #[inline]
    pub fn new(a: T, b: T) -> Self {
        Self { a, b }
    }

    /// The additive identity.
    #[inline]
    pub fn zero() -> Self {
        Self::new(T::zero(), T::zero())
    }

    /// The multiplicative identity.
    #[inline]
    pub fn one() -> Self {
        Self::new(T::one(), T::zero())
    }

    /// The primitive cube root of unity `ω`.
    #[inline]
    pub fn omega() -> Self {
        Self::new(T::zero(), T::one())
    }

    /// The ramified prime `λ = 1 + 2ω`.
    #[inline]
    pub fn lambda() -> Self {
        let two = T::one() + T::one();
        Self::new(T::one(), two)
    }

    /// Embeds a rational integer.
    #[inline]
    pub fn from_int(n: T) -> Self {
        Self::new(n, T::zero())
    }

    /// `true` for the zero element.
    #[inline]
    pub fn is_zero(&self) -> bool {
        self.a.is_zero() && self.b.is_zero()
    }

    /// Checked addition.
    pub fn checked_add(&self, o: &Self) -> Option<Self> {
        Some(Self::new(self.a.checked_add(&o.a)?, self.b.checked_add(&o.b)?))
    }

    /// Checked subtraction.
    pub fn checked_sub(&self, o: &Self) -> Option<Self> {
        Some(Self::new(self.a.checked_sub(&o.a)?, self.b.checked_sub(&o.b)?))
    }

    /// Checked multiplication: `(a+bω)(c+dω) = (ac − bd) + (ad + bc − bd)ω`.
    pub fn checked_mul(&self, o: &Self) -> Option<Self> {
        let ac = self.a.checked_mul(&o.a)?;
        let bd = self.b.checked_mul(&o.b)?;
        let ad = self.a.checked_mul(&o.b)?;
        let bc = self.b.checked_mul(&o.a)?;
        Some(Self::new(
            ac.checked_sub(&bd)?,
            ad.checked_add(&bc)?.checked_sub(&bd)?,
        ))
    }

    /// Checked multiplication by a rational integer.
    pub fn checked_scale(&self, k: T) -> Option<Self> {
        Some(Self::new(self.a.checked_mul(&k)?, self.b.checked_mul(&k)?))
    }

    /// Complex conjugate: `conj(a + bω) = (a − b) − bω`.
    pub fn conj(&self) -> Self {
        Self::new(self.a - self.b, -self.b)
    }

    /// Checked norm `a² − ab + b²`.
    pub fn checked_norm(&self) -> Option<T> {
        let aa = self.a.checked_mul(&self.a)?;
        let ab = self.a.checked_mul(&self.b)?;
        let bb = self.b.checked_mul(&self.b)?;
        aa.checked_sub(&ab)?.checked_add(&bb)
    }

    /// Norm `a² − ab + b²`; panics on overflow.
    pub fn norm(&self) -> T {
        self.checked_norm().expect("Eisenstein norm overflow")
    }

    /// Trace `x + x̄ = 2a − b`; panics on overflow.
    pub fn trace(&self) -> T {
        self.a
            .checked_add(&self.a)
            .and_then(|t| t.checked_sub(&self.b))
            .expect("Eisenstein trace overflow")
    }

    /// The six units `1, −ω², ω, −1, ω², −ω`, i.e. the powers of `−ω²`.
    pub fn units() -> [Self; 6] {
        let o = T::one();
        let z = T::zero();
        [
            Self::new(o, z),
            Self::new(o, o),
            Self::new(z, o),
            Self::new(-o, z),
            Self::new(-o, -o),
            Self::new(z, -o),
        ]
    }

    /// `true` iff the element is one of the six units.
    pub fn is_unit(&self) -> bool {
        self.checked_norm().map(|n| n.is_one()).unwrap_or(false)
    }

    /// `true` iff `x ≡ 1 (mod 3)`.
    pub fn is_primary(&self) -> bool {
        let three = T::from(3).unwrap();
        (self.a % three + three) % three == T::one() && (self.b % three).is_zero()
    }

    /// `true` iff `λ | x`, equivalently `3 | a + b`.
    pub fn divisible_by_lambda(&self) -> bool {
        let three = T::from(3).unwrap();
        ((self.a % three) + (self.b % three)) % three == T::zero()
    }

    /// `true` iff `self` divides `o` in `Z[ω]`.
    pub fn divides(&self, o: &Self) -> bool {
        if self.is_zero() {
            return o.is_zero();
        }
        let (_, r) = div_round(o, self);
        r.is_zero()
    }

    /// Exact quotient `o / self` when it exists.
    pub fn exact_div(o: &Self, d: &Self) -> Option<Self> {
        if d.is_zero() {
            return None;
        }
        let (q, r) = div_round(o, d);
        r.is_zero().then_some(q)
    }

    /// Reduction modulo the ideal `(9)` with coordinates in `[0, 9)`.
    pub fn mod9(&self) -> Self {
        let nine = T::from(9).unwrap();
        Self::new(mod_floor(self.a, nine), mod_floor(self.b, nine))
    }

    /// Reduction modulo the ideal `(3)` with coordinates in `[0, 3)`.
    pub fn mod3(&self) -> Self {
        let three = T::from(3).unwrap();
        Self::new(mod_floor(self.a, three), mod_floor(self.b, three))
    }

    /// Checked power by repeated squaring.
    pub fn checked_pow(&self, mut e: u32) -> Option<Self> {
        let mut base = *self;
        let mut acc = Self::one();
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.checked_mul(&base)?;
            }
            e >>= 1;
            if e > 0 {
                base = base.checked_mul(&base)?;
            }
        }
        Some(acc)
    }

    /// Power by repeated squaring; panics on overflow.
    pub fn pow(&self, e: u32) -> Self {
        self.checked_pow(e).expect("Eisenstein power overflow")
    }

    /// Converts to a complex number using `ω = −1/2 + i√3/2`.
    pub fn to_complex(&self) -> num_complex::Complex64 {
        let a = self.a.to_f64().unwrap();
        let b = self.b.to_f64().unwrap();
        num_complex::Complex64::new(a - 0.5 * b, b * 0.75f64.sqrt())
    }
}

/// Floor-style remainder in `[0, m)`.
#[inline]
fn mod_floor<T: Coord>(x: T, m: T) -> T {
    let r = x % m;
    if r < T::zero() {
        r + m
    } else {
        r
    }
}

/// Nearest-integer rounding of `u / n` for `n > 0` (ties rounded up).
#[inline]
fn round_div<T: Coord>(u: T, n: T) -> T {
    // floor((2u + n) / (2n)) evaluated without forming 2u.
    let q = u / n;
    let r = u % n;
    let (q, r) = if r < T::zero() { (q - T::one(), r + n) } else { (q, r) };
    if r + r >= n {
        q + T::one()
    } else {
        q
    }
}

/// Division with remainder by rounding `x / y` to the nearest lattice point.
///
/// Panics if `y = 0`; the rounding guarantees `N(r) ≤ (3/4)·N(y)`.
pub fn div_round<T: Coord>(x: &Eisenstein<T>, y: &Eisenstein<T>) -> (Eisenstein<T>, Eisenstein<T>) {
    let n = y.norm();
    let num = x.checked_mul(&y.conj()).expect("Eisenstein division overflow");
    let q = Eisenstein::new(round_div(num.a, n), round_div(num.b, n));
    let r = x
        .checked_sub(&q.checked_mul(y).expect("Eisenstein division overflow"))
        .expect("Eisenstein division overflow");
    (q, r)
}

impl<T: Coord> Add for Eisenstein<T> {
    type Output = Self;
    fn add(self, o: Self) -> Self {
        self.checked_add(&o).expect("Eisenstein addition overflow")
    }
}

impl<T: Coord> Sub for Eisenstein<T> {
    type Output = Self;
    fn sub(self, o: Self) -> Self {
        self.checked_sub(&o).expect("Eisenstein subtraction overflow")
    }
}

impl<T: Coord> Mul for Eisenstein<T> {
    type Output = Self;
    fn mul(self, o: Self) -> Self {
        self.checked_mul(&o).expect("Eisenstein multiplication overflow")
    }
}

impl<T: Coord> Neg for Eisenstein<T> {
    type Output = Self;
    fn neg(self) -> Self {
        Self::new(-self.a, -self.b)
    }
}

impl<T: Coord> fmt::Debug for Eisenstein<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}{:+}ω)", self.a, self.b)
    }
}

impl<T: Coord> fmt::Display for Eisenstein<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}{:+}ω", self.a, self.b)
    }
}

/// The 64-bit Eisenstein integer used by every number-theoretic routine.
pub type EisInt = Eisenstein<i64>;

/// Norm of `x` as a nonnegative 64-bit integer.
pub fn norm(x: &EisInt) -> i64 {
    x.norm()
}

/// The unique unit multiple of `x` that is `≡ 1 (mod 3)`.
///
/// Returns `(unit, primary)` with `primary = unit · x`.
pub fn primary_associate(x: &EisInt) -> LabResult<(EisInt, EisInt)> {
    if x.is_zero() {
        return Err(LabError::ZeroInput);
    }
    if x.divisible_by_lambda() {
        return Err(LabError::DivisibleByLambda(*x));
    }
    for u in EisInt::units() {
        let y = u * *x;
        if y.is_primary() {
            return Ok((u, y));
        }
    }
    unreachable!("an element coprime to λ always has a primary associate")
}

/// Euclidean division `x = q·y + r` with `N(r) ≤ (3/4)·N(y)`.
pub fn divmod(x: &EisInt, y: &EisInt) -> LabResult<(EisInt, EisInt)> {
    if y.is_zero() {
        return Err(LabError::DivisionByZero);
    }
    Ok(div_round(x, y))
}

/// Splits `x ≠ 0` as `unit · λ^k · c` with `c` primary. Returns `(unit, k, c)`.
pub fn lambda_decompose(x: &EisInt) -> LabResult<(EisInt, u32, EisInt)> {
    if x.is_zero() {
        return Err(LabError::ZeroInput);
    }
    let lam = EisInt::lambda();
    let mut y = *x;
    let mut k = 0u32;
    while y.divisible_by_lambda() {
        y = EisInt::exact_div(&y, &lam).expect("λ divides by construction");
        k += 1;
    }
    let (u, c) = primary_associate(&y)?;
    // x = λ^k y = λ^k u^{-1} c; the returned unit is u^{-1} = conj(u).
    Ok((u.conj(), k, c))
}

/// Greatest common divisor, normalized as `λ^k · (primary part)`.
pub fn gcd(x: &EisInt, y: &EisInt) -> LabResult<EisInt> {
    if x.is_zero() && y.is_zero() {
        return Err(LabError::BothZero);
    }
    let (mut u, mut v) = (*x, *y);
    while !v.is_zero() {
        let (_, r) = div_round(&u, &v);
        u = v;
        v = r;
    }
    let (_, k, c) = lambda_decompose(&u)?;
    Ok(EisInt::lambda().pow(k) * c)
}

/// `true` iff `x` and `y` generate the unit ideal.
pub fn coprime(x: &EisInt, y: &EisInt) -> bool {
    matches!(gcd(x, y), Ok(g) if g.is_unit())
}

/// A residue class modulo the ideal `(9)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct ResidueClassMod9 {
    /// Representative with both coordinates in `[0, 9)`.
    pub representative: EisInt,
    /// `true` iff the class is coprime to 3.
    pub coprime_to_3: bool,
}

impl ResidueClassMod9 {
    /// The class of `x`.
    pub fn of(x: &EisInt) -> Self {
        Self {
            representative: x.mod9(),
            coprime_to_3: !x.divisible_by_lambda(),
        }
    }

    /// `true` iff `x` lies in this class.
    pub fn contains(&self, x: &EisInt) -> bool {
        x.mod9() == self.representative
    }

    /// All 81 classes, in lexicographic order of representatives.
    pub fn all() -> Vec<Self> {
        (0..9)
            .flat_map(|a| (0..9).map(move |b| Self::of(&EisInt::new(a, b))))
            .collect()
    }

    /// The classes `≡ 1 (mod 3)`, in lexicographic order of representatives.
    pub fn primary_classes() -> Vec<Self> {
        Self::all()
            .into_iter()
            .filter(|c| c.representative.is_primary())
            .collect()
    }
}

/// Filters accepted by [`enumerate_by_norm`].
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ClassFilter {
    /// Every nonzero element.
    All,
    /// Primary elements, `≡ 1 (mod 3)`.
    Primary,
    /// Elements in a fixed class modulo 9.
    Mod9(ResidueClassMod9),
}

impl ClassFilter {
    fn accepts(&self, x: &EisInt) -> bool {
        match self {
            ClassFilter::All => true,
            ClassFilter::Primary => x.is_primary(),
            ClassFilter::Mod9(c) => c.contains(x),
        }
    }
}

/// All nonzero `x` with `N(x) ≤ bound` accepted by `filter`, ordered by norm
/// and then lexicographically by `(a, b)`.
pub fn enumerate_by_norm(bound: i64, filter: ClassFilter) -> Vec<EisInt> {
    if bound <= 0 {
        return Vec::new();
    }
    let r = (2.0 * (bound as f64).sqrt()).ceil() as i64 + 1;
    let mut out = Vec::new();
    for a in -r..=r {
        for b in -r..=r {
            let x = EisInt::new(a, b);
            let n = x.norm();
            if n > 0 && n <= bound && filter.accepts(&x) {
                out.push(x);
            }
        }
    }
    out.sort_by_key(|x| (x.norm(), x.a, x.b));
    out
}
