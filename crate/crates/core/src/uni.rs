//! Dense univariate truncated series.
//!
//! These carry curve components, pullbacks and every intermediate stage of the
//! Newton-Puiseux iteration. Precision `EXACT` marks a polynomial that is known
//! completely; all precision arithmetic saturates at it.

use alloc::vec;
use alloc::vec::Vec;

use crate::coef::{Field, GaussRat};
use crate::error::{Error, Result};
use crate::series::{TruncSeries, VanishingOrder};
use crate::multidegree::Multidegree;

/// Precision of a series whose every coefficient is known.
pub const EXACT: u32 = u32::MAX;

#[derive(Clone, Debug, PartialEq)]
pub struct Series1<C> {
    coeffs: Vec<C>,
    precision: u32,
}

/// Exact univariate series over `Q(i)`.
pub type UniSeries = Series1<GaussRat>;

impl<C: Field> Series1<C> {
    pub fn new(mut coeffs: Vec<C>, precision: u32) -> Self {
        if precision != EXACT && coeffs.len() > precision as usize + 1 {
            coeffs.truncate(precision as usize + 1);
        }
        while coeffs.last().is_some_and(|c| c.is_zero()) {
            coeffs.pop();
        }
        Series1 { coeffs, precision }
    }

    pub fn zero(precision: u32) -> Self {
        Series1::new(Vec::new(), precision)
    }

    pub fn constant(c: C, precision: u32) -> Self {
        Series1::new(vec![c], precision)
    }

    /// `c * t^e`
    pub fn monomial(e: u32, c: C, precision: u32) -> Self {
        let mut v = vec![C::zero(); e as usize];
        v.push(c);
        Series1::new(v, precision)
    }

    pub fn precision(&self) -> u32 {
        self.precision
    }

    pub fn is_exact(&self) -> bool {
        self.precision == EXACT
    }

    pub fn coeffs(&self) -> &[C] {
        &self.coeffs
    }

    pub fn coeff(&self, i: usize) -> C {
        self.coeffs.get(i).cloned().unwrap_or_else(C::zero)
    }

    /// Largest index holding a stored coefficient.
    pub fn degree_bound(&self) -> usize {
        self.coeffs.len().saturating_sub(1)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|c| c.negligible())
    }

    pub fn order(&self) -> VanishingOrder {
        match self.coeffs.iter().position(|c| !c.negligible()) {
            Some(i) => VanishingOrder::Exact(i as u32),
            None => VanishingOrder::AtLeast(self.precision.saturating_add(1)),
        }
    }

    /// Lower bound on the order usable in precision bookkeeping.
    fn order_floor(&self) -> u32 {
        self.order().value()
    }

    pub fn with_precision(mut self, precision: u32) -> Self {
        self.precision = precision;
        if precision != EXACT && self.coeffs.len() > precision as usize + 1 {
            self.coeffs.truncate(precision as usize + 1);
        }
        while self.coeffs.last().is_some_and(|c| c.is_zero()) {
            self.coeffs.pop();
        }
        self
    }

    /// Keep terms of degree `<= k`; fails when `k` exceeds the known range.
    pub fn jet(&self, k: u32) -> Result<Self> {
        if k > self.precision {
            return Err(Error::InsufficientPrecision {
                needed: k,
                available: self.precision,
            });
        }
        Ok(self.clone().with_precision(k))
    }

    pub fn add(&self, o: &Self) -> Self {
        let n = self.coeffs.len().max(o.coeffs.len());
        let v = (0..n).map(|i| self.coeff(i) + o.coeff(i)).collect();
        Series1::new(v, self.precision.min(o.precision))
    }

    pub fn sub(&self, o: &Self) -> Self {
        let n = self.coeffs.len().max(o.coeffs.len());
        let v = (0..n).map(|i| self.coeff(i) - o.coeff(i)).collect();
        Series1::new(v, self.precision.min(o.precision))
    }

    pub fn neg(&self) -> Self {
        Series1::new(self.coeffs.iter().map(|c| -c.clone()).collect(), self.precision)
    }

    pub fn scale(&self, c: &C) -> Self {
        Series1::new(
            self.coeffs.iter().map(|x| x.clone() * c.clone()).collect(),
            self.precision,
        )
    }

    /// Product; unknown tails of one factor are damped by the order of the other.
    pub fn mul(&self, o: &Self) -> Self {
        let prec = self
            .precision
            .saturating_add(o.order_floor())
            .min(o.precision.saturating_add(self.order_floor()));
        if self.coeffs.is_empty() || o.coeffs.is_empty() {
            return Series1::zero(prec);
        }
        let mut len = self.coeffs.len() + o.coeffs.len() - 1;
        if prec != EXACT {
            len = len.min(prec as usize + 1);
        }
        let mut v = vec![C::zero(); len];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() || i >= len {
                continue;
            }
            for (j, b) in o.coeffs.iter().enumerate() {
                if i + j >= len {
                    break;
                }
                if b.is_zero() {
                    continue;
                }
                v[i + j] = v[i + j].clone() + a.clone() * b.clone();
            }
        }
        Series1::new(v, prec)
    }

    pub fn pow(&self, e: u32) -> Self {
        let mut acc = Series1::constant(C::one(), EXACT);
        for _ in 0..e {
            acc = acc.mul(self);
        }
        acc
    }

    /// Multiply by `t^k`.
    pub fn shift_up(&self, k: u32) -> Self {
        let mut v = vec![C::zero(); k as usize];
        v.extend(self.coeffs.iter().cloned());
        Series1::new(v, self.precision.saturating_add(k))
    }

    /// Divide by `t^k`; the low coefficients must vanish.
    pub fn shift_down(&self, k: u32) -> Result<Self> {
        if k > self.precision.saturating_add(1) {
            return Err(Error::InsufficientPrecision {
                needed: k,
                available: self.precision,
            });
        }
        if self.coeffs.iter().take(k as usize).any(|c| !c.negligible()) {
            return Err(Error::InvalidArgument(alloc::format!(
                "series is not divisible by t^{k}"
            )));
        }
        let v = self.coeffs.iter().skip(k as usize).cloned().collect();
        let prec = if self.precision == EXACT {
            EXACT
        } else {
            self.precision - k.min(self.precision)
        };
        Ok(Series1::new(v, prec))
    }

    /// Substitute `t -> t^m`.
    pub fn compose_power(&self, m: u32) -> Self {
        assert!(m >= 1, "power substitution needs m >= 1");
        let mut v = vec![C::zero(); (self.coeffs.len().max(1) - 1) * m as usize + 1];
        for (i, c) in self.coeffs.iter().enumerate() {
            v[i * m as usize] = c.clone();
        }
        let prec = if self.precision == EXACT {
            EXACT
        } else {
            self.precision.saturating_mul(m)
        };
        Series1::new(v, prec)
    }

    /// Multiplicative inverse of a series with nonzero constant term.
    pub fn inverse(&self) -> Result<Self> {
        let c0 = self.coeff(0);
        if c0.negligible() {
            return Err(Error::InvalidArgument("series is not a unit".into()));
        }
        let prec = self.precision;
        if prec == EXACT && self.coeffs.len() > 1 {
            return Err(Error::InvalidArgument(
                "inverse of a non-constant polynomial needs a target precision".into(),
            ));
        }
        let n = if prec == EXACT { 1 } else { prec as usize + 1 };
        let inv0 = C::one() / c0;
        let mut v: Vec<C> = Vec::with_capacity(n);
        v.push(inv0.clone());
        for k in 1..n {
            let mut s = C::zero();
            for i in 1..=k.min(self.coeffs.len().saturating_sub(1)) {
                s = s + self.coeffs[i].clone() * v[k - i].clone();
            }
            v.push(-(s * inv0.clone()));
        }
        Ok(Series1::new(v, prec))
    }

    /// `self / d` where `ord d <= ord self`; the quotient is a power series.
    pub fn divide(&self, d: &Self) -> Result<Self> {
        let s = match d.order() {
            VanishingOrder::Exact(s) => s,
            VanishingOrder::AtLeast(_) => {
                return Err(Error::InvalidArgument("division by a zero series".into()))
            }
        };
        let num = self.shift_down(s)?;
        let mut den = d.shift_down(s)?;
        if den.precision == EXACT {
            let target = num.precision.min(4096);
            den = den.with_precision(target);
        }
        Ok(num.mul(&den.inverse()?))
    }

    pub fn conj(&self) -> Self {
        Series1::new(self.coeffs.iter().map(|c| c.conjugate()).collect(), self.precision)
    }

    pub fn map<D: Field>(&self, f: impl Fn(&C) -> D) -> Series1<D> {
        Series1::new(self.coeffs.iter().map(f).collect(), self.precision)
    }

    /// Evaluate `sum_j a_j(t) y(t)^j` by Horner's rule.
    pub fn eval_poly(coeffs: &[Series1<C>], y: &Series1<C>) -> Series1<C> {
        let mut acc = Series1::zero(EXACT);
        for a in coeffs.iter().rev() {
            acc = acc.mul(y).add(a);
        }
        acc
    }

    /// Largest absolute coefficient below degree `k`.
    pub fn max_magnitude_below(&self, k: usize) -> f64 {
        self.coeffs
            .iter()
            .take(k)
            .map(|c| c.to_complex().norm())
            .fold(0.0, f64::max)
    }
}

impl UniSeries {
    /// View as a one-variable [`TruncSeries`]; exact polynomials need an explicit precision.
    pub fn to_trunc(&self, precision_if_exact: u32) -> TruncSeries {
        let prec = if self.is_exact() {
            precision_if_exact
        } else {
            self.precision
        };
        TruncSeries::from_terms(
            1,
            prec,
            self.coeffs
                .iter()
                .enumerate()
                .map(|(i, c)| (Multidegree::new(vec![i as u32]), c.clone())),
        )
        .expect("one variable")
    }

    pub fn from_trunc(s: &TruncSeries) -> Result<Self> {
        if s.nvars() != 1 {
            return Err(Error::DimensionMismatch {
                expected: 1,
                found: s.nvars(),
            });
        }
        let mut v = vec![GaussRat::default(); s.precision() as usize + 1];
        for (j, c) in s.terms() {
            v[j.0[0] as usize] = c.clone();
        }
        Ok(Series1::new(v, s.precision()))
    }
}
