//! Coefficient fields.
//!
//! All exact work happens over the Gaussian rationals `Q(i)`. A second
//! implementation of [`Field`] over `Complex64` exists only for the two places
//! that are allowed to leave exact arithmetic: unitary completion and
//! Newton-Puiseux branches whose characteristic roots are not in `Q(i)`.

use alloc::vec::Vec;
use core::fmt;
use core::ops::{Add, Div, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

/// Magnitude below which a floating coefficient is treated as zero.
pub const FLOAT_ZERO: f64 = 1e-11;

/// Exact Gaussian rational `re + im*i`.
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct GaussRat {
    pub re: BigRational,
    pub im: BigRational,
}

impl GaussRat {
    pub fn new(re: BigRational, im: BigRational) -> Self {
        GaussRat { re, im }
    }

    pub fn from_int(n: i64) -> Self {
        GaussRat::new(BigRational::from_integer(BigInt::from(n)), BigRational::zero())
    }

    pub fn from_ratio(num: i64, den: i64) -> Self {
        GaussRat::new(
            BigRational::new(BigInt::from(num), BigInt::from(den)),
            BigRational::zero(),
        )
    }

    /// `(a/b) + (c/d) i`
    pub fn from_parts(a: i64, b: i64, c: i64, d: i64) -> Self {
        GaussRat::new(
            BigRational::new(BigInt::from(a), BigInt::from(b)),
            BigRational::new(BigInt::from(c), BigInt::from(d)),
        )
    }

    pub fn i() -> Self {
        GaussRat::new(BigRational::zero(), BigRational::one())
    }

    pub fn real(re: BigRational) -> Self {
        GaussRat::new(re, BigRational::zero())
    }

    pub fn conj(&self) -> Self {
        GaussRat::new(self.re.clone(), -self.im.clone())
    }

    /// `|z|^2`, always rational.
    pub fn norm_sqr(&self) -> BigRational {
        &self.re * &self.re + &self.im * &self.im
    }

    pub fn is_real(&self) -> bool {
        self.im.is_zero()
    }

    pub fn inv(&self) -> Option<Self> {
        if self.is_zero() {
            return None;
        }
        let n = self.norm_sqr();
        Some(GaussRat::new(&self.re / &n, -(&self.im / &n)))
    }

    pub fn pow(&self, e: u32) -> Self {
        let mut acc = GaussRat::one();
        let mut base = self.clone();
        let mut e = e;
        while e > 0 {
            if e & 1 == 1 {
                acc = &acc * &base;
            }
            base = &base * &base;
            e >>= 1;
        }
        acc
    }

    pub fn to_c64(&self) -> Complex64 {
        Complex64::new(
            self.re.to_f64().unwrap_or(f64::NAN),
            self.im.to_f64().unwrap_or(f64::NAN),
        )
    }

    /// Best rational approximation of a float with bounded denominator.
    pub fn rationalize(z: Complex64, max_den: i64) -> Option<Self> {
        Some(GaussRat::new(
            rationalize_f64(z.re, max_den)?,
            rationalize_f64(z.im, max_den)?,
        ))
    }

    /// Exact square root in `Q(i)` if one exists.
    pub fn sqrt(&self) -> Option<Self> {
        self.nth_root(2)
    }

    /// An exact `q`-th root in `Q(i)`, if any of the `q` roots is Gaussian rational.
    pub fn nth_root(&self, q: u32) -> Option<Self> {
        if q == 1 || self.is_zero() {
            return Some(self.clone());
        }
        let z = self.to_c64();
        let r = num_traits::Float::powf(z.norm(), 1.0 / q as f64);
        let theta = z.arg();
        for k in 0..q {
            let phi = (theta + 2.0 * core::f64::consts::PI * k as f64) / q as f64;
            let guess = Complex64::from_polar(r, phi);
            for den in [1_000_000, 10_000] {
                if let Some(c) = GaussRat::rationalize(guess, den) {
                    if &c.pow(q) == self {
                        return Some(c);
                    }
                }
            }
        }
        None
    }
}

/// Continued-fraction approximation with denominator at most `max_den`.
pub fn rationalize_f64(x: f64, max_den: i64) -> Option<BigRational> {
    if !x.is_finite() {
        return None;
    }
    let neg = x < 0.0;
    let mut v = if neg { -x } else { x };
    // convergents h/k
    let (mut h0, mut h1) = (0i128, 1i128);
    let (mut k0, mut k1) = (1i128, 0i128);
    for _ in 0..64 {
        let a = libm_floor(v);
        if a > 1e15 {
            break;
        }
        let ai = a as i128;
        let h2 = ai * h1 + h0;
        let k2 = ai * k1 + k0;
        if k2 > max_den as i128 {
            break;
        }
        h0 = h1;
        h1 = h2;
        k0 = k1;
        k1 = k2;
        let frac = v - a;
        if frac.abs() < 1e-13 {
            break;
        }
        v = 1.0 / frac;
    }
    if k1 == 0 {
        return None;
    }
    let mut num = BigInt::from(h1);
    if neg {
        num = -num;
    }
    Some(BigRational::new(num, BigInt::from(k1)))
}

fn libm_floor(x: f64) -> f64 {
    num_traits::Float::floor(x)
}

impl fmt::Debug for GaussRat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

/// Literal form: `3/4`, `-1/2i`, `(3/4+1/2i)`.
impl fmt::Display for GaussRat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match (self.re.is_zero(), self.im.is_zero()) {
            (_, true) => write!(f, "{}", self.re),
            (true, false) => write!(f, "{}i", self.im),
            (false, false) => {
                let sign = if self.im.is_negative() { '-' } else { '+' };
                write!(f, "({}{}{}i)", self.re, sign, self.im.abs())
            }
        }
    }
}

impl Zero for GaussRat {
    fn zero() -> Self {
        GaussRat::new(BigRational::zero(), BigRational::zero())
    }
    fn is_zero(&self) -> bool {
        self.re.is_zero() && self.im.is_zero()
    }
}

impl One for GaussRat {
    fn one() -> Self {
        GaussRat::from_int(1)
    }
}

impl<'a> Add<&'a GaussRat> for &'a GaussRat {
    type Output = GaussRat;
    fn add(self, o: &GaussRat) -> GaussRat {
        GaussRat::new(&self.re + &o.re, &self.im + &o.im)
    }
}

impl<'a> Sub<&'a GaussRat> for &'a GaussRat {
    type Output = GaussRat;
    fn sub(self, o: &GaussRat) -> GaussRat {
        GaussRat::new(&self.re - &o.re, &self.im - &o.im)
    }
}

impl<'a> Mul<&'a GaussRat> for &'a GaussRat {
    type Output = GaussRat;
    fn mul(self, o: &GaussRat) -> GaussRat {
        if self.im.is_zero() && o.im.is_zero() {
            return GaussRat::real(&self.re * &o.re);
        }
        GaussRat::new(
            &self.re * &o.re - &self.im * &o.im,
            &self.re * &o.im + &self.im * &o.re,
        )
    }
}

impl<'a> Div<&'a GaussRat> for &'a GaussRat {
    type Output = GaussRat;
    fn div(self, o: &GaussRat) -> GaussRat {
        self * &o.inv().expect("division by zero Gaussian rational")
    }
}

impl Neg for &GaussRat {
    type Output = GaussRat;
    fn neg(self) -> GaussRat {
        GaussRat::new(-self.re.clone(), -self.im.clone())
    }
}

macro_rules! forward_owned {
    ($tr:ident, $m:ident) => {
        impl $tr for GaussRat {
            type Output = GaussRat;
            fn $m(self, o: GaussRat) -> GaussRat {
                (&self).$m(&o)
            }
        }
    };
}
forward_owned!(Add, add);
forward_owned!(Sub, sub);
forward_owned!(Mul, mul);
forward_owned!(Div, div);

impl Neg for GaussRat {
    type Output = GaussRat;
    fn neg(self) -> GaussRat {
        -&self
    }
}

/// Result of searching a polynomial for roots in a coefficient field.
pub struct RootSplit<C> {
    /// Roots found in the field, with multiplicity.
    pub roots: Vec<(C, u32)>,
    /// Cofactor whose roots are not representable (monic, ascending coefficients).
    pub rest: Vec<C>,
}

/// The operations the series and Puiseux machinery needs from a coefficient field.
pub trait Field:
    Clone
    + PartialEq
    + fmt::Debug
    + Zero
    + One
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Neg<Output = Self>
{
    const EXACT: bool;

    fn conjugate(&self) -> Self;
    fn from_i64(n: i64) -> Self;
    fn to_complex(&self) -> Complex64;
    /// Zero test; tolerance-based for floating fields.
    fn negligible(&self) -> bool;
    /// Roots of `sum coeffs[i] x^i` that lie in the field.
    fn split_roots(coeffs: &[Self]) -> RootSplit<Self>;
    /// Some `q`-th root lying in the field.
    fn root_of(&self, q: u32) -> Option<Self>;
    /// The value as a Gaussian rational, for exact fields.
    fn to_exact(&self) -> Option<GaussRat>;
}

impl Field for GaussRat {
    const EXACT: bool = true;

    fn conjugate(&self) -> Self {
        self.conj()
    }
    fn from_i64(n: i64) -> Self {
        GaussRat::from_int(n)
    }
    fn to_complex(&self) -> Complex64 {
        self.to_c64()
    }
    fn negligible(&self) -> bool {
        self.is_zero()
    }
    fn split_roots(coeffs: &[Self]) -> RootSplit<Self> {
        crate::roots::exact_roots(coeffs)
    }
    fn root_of(&self, q: u32) -> Option<Self> {
        self.nth_root(q)
    }
    fn to_exact(&self) -> Option<GaussRat> {
        Some(self.clone())
    }
}

impl Field for Complex64 {
    const EXACT: bool = false;

    fn conjugate(&self) -> Self {
        self.conj()
    }
    fn from_i64(n: i64) -> Self {
        Complex64::new(n as f64, 0.0)
    }
    fn to_complex(&self) -> Complex64 {
        *self
    }
    fn negligible(&self) -> bool {
        self.norm() < FLOAT_ZERO
    }
    fn split_roots(coeffs: &[Self]) -> RootSplit<Self> {
        RootSplit {
            roots: crate::roots::clustered_roots(coeffs),
            rest: alloc::vec![Complex64::one()],
        }
    }
    fn root_of(&self, q: u32) -> Option<Self> {
        Some(self.powf(1.0 / q as f64))
    }
    fn to_exact(&self) -> Option<GaussRat> {
        None
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::string::ToString;

    #[test]
    fn field_ops_are_exact() {
        let a = GaussRat::from_parts(3, 4, 1, 2);
        let b = GaussRat::from_parts(-1, 3, 2, 1);
        let q = &a / &b;
        assert_eq!(&q * &b, a);
        assert_eq!(a.conj().conj(), a);
        assert_eq!((&a * &a.conj()).im, BigRational::zero());
    }

    #[test]
    fn exact_roots_of_gaussian_rationals() {
        let r = GaussRat::from_int(4).sqrt().unwrap();
        assert_eq!(r.pow(2), GaussRat::from_int(4));
        let r = GaussRat::from_int(-4).sqrt().unwrap();
        assert_eq!(r.pow(2), GaussRat::from_int(-4));
        // 2i = (1+i)^2
        let r = GaussRat::from_parts(0, 1, 2, 1).sqrt().unwrap();
        assert_eq!(r.pow(2), GaussRat::from_parts(0, 1, 2, 1));
        assert!(GaussRat::from_int(2).sqrt().is_none());
        assert!(GaussRat::i().sqrt().is_none());
        let c = GaussRat::from_ratio(8, 27).nth_root(3).unwrap();
        assert_eq!(c.pow(3), GaussRat::from_ratio(8, 27));
    }

    #[test]
    fn display_forms() {
        assert_eq!(GaussRat::from_parts(3, 4, 1, 2).to_string(), "(3/4+1/2i)");
        assert_eq!(GaussRat::from_parts(0, 1, -1, 2).to_string(), "-1/2i");
        assert_eq!(GaussRat::from_int(-2).to_string(), "-2");
    }
}
