//! Contact ratios `ord(zeta* r) / ord(zeta)` and jet-level witness checks.

use alloc::vec::Vec;
use core::cmp::Ordering;
use core::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;

use crate::coef::GaussRat;
use crate::curve::FormalCurve;
use crate::error::{Error, Result};
use crate::mixed::HermitianForm;
use crate::series::VanishingOrder;

/// `numerator / denominator`; an `AtLeast` numerator makes the value a lower bound.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct TypeRatio {
    pub numerator: VanishingOrder,
    pub denominator: u32,
}

impl TypeRatio {
    pub fn new(numerator: VanishingOrder, denominator: u32) -> Result<Self> {
        if denominator == 0 {
            return Err(Error::InvalidArgument("ratio denominator must be >= 1".into()));
        }
        Ok(TypeRatio {
            numerator,
            denominator,
        })
    }

    /// Exact value, when the numerator resolved.
    pub fn value(&self) -> Option<BigRational> {
        self.numerator.exact().map(|_| self.bound())
    }

    /// The value, or the lower bound it is known to exceed or equal.
    pub fn bound(&self) -> BigRational {
        BigRational::new(
            BigInt::from(self.numerator.value()),
            BigInt::from(self.denominator),
        )
    }

    pub fn is_lower_bound(&self) -> bool {
        self.numerator.is_bound()
    }
}

impl PartialOrd for TypeRatio {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// By bound; a flagged bound ranks above an exact value of the same size, and
/// equal values prefer the smaller denominator.
impl Ord for TypeRatio {
    fn cmp(&self, other: &Self) -> Ordering {
        self.bound()
            .cmp(&other.bound())
            .then(self.is_lower_bound().cmp(&other.is_lower_bound()))
            .then(other.denominator.cmp(&self.denominator))
    }
}

impl fmt::Display for TypeRatio {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_lower_bound() {
            write!(f, ">= ")?;
        }
        write!(f, "{}", self.bound())
    }
}

/// `ord(zeta* r) / ord(zeta)` at the precision the inputs support.
pub fn dangelo_ratio(r: &HermitianForm, zeta: &FormalCurve) -> Result<TypeRatio> {
    let nu = zeta.nu()?;
    let pulled = r.pullback(zeta)?;
    TypeRatio::new(pulled.as_mixed().order(), nu)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum WitnessOutcome {
    /// `jet_order(zeta* r) = 0`.
    Certified { order: u32 },
    /// First nonzero term `coefficient * t^a tbar^b` with `a + b = order`, smallest `(a, b)`.
    Violation {
        order: u32,
        exponents: (u32, u32),
        coefficient: GaussRat,
    },
}

impl WitnessOutcome {
    pub fn is_certified(&self) -> bool {
        matches!(self, WitnessOutcome::Certified { .. })
    }
}

/// Check `jet_n(zeta* r) = 0` coefficient by coefficient.
pub fn witness_check(r: &HermitianForm, zeta: &FormalCurve, n: u32) -> Result<WitnessOutcome> {
    let available = zeta.pullback_precision(r.precision())?;
    if n > available {
        return Err(Error::InsufficientPrecision {
            needed: n,
            available,
        });
    }
    let pulled = r.pullback(zeta)?.jet(n)?;
    let lowest: Vec<_> = pulled.as_mixed().lowest_terms();
    Ok(match lowest.into_iter().next() {
        None => WitnessOutcome::Certified { order: n },
        Some((a, b, c)) => WitnessOutcome::Violation {
            order: a.total() + b.total(),
            exponents: (a.0[0], b.0[0]),
            coefficient: c,
        },
    })
}
