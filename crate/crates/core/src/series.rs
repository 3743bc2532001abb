//! Truncated multivariate formal power series with exact coefficients.

use alloc::collections::BTreeMap;
use alloc::vec;
use alloc::vec::Vec;
use core::ops::{Add, Mul, Neg, Sub};

use num_traits::{One, Zero};

use crate::coef::GaussRat;
use crate::error::{Error, Result};
use crate::multidegree::Multidegree;

/// Vanishing order of a series or curve, or a lower bound when every
/// known coefficient is zero.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum VanishingOrder {
    Exact(u32),
    /// All coefficients up to `bound - 1` vanish; nothing is known beyond.
    AtLeast(u32),
}

impl VanishingOrder {
    /// The order, or the lower bound.
    pub fn value(self) -> u32 {
        match self {
            VanishingOrder::Exact(v) | VanishingOrder::AtLeast(v) => v,
        }
    }

    pub fn exact(self) -> Option<u32> {
        match self {
            VanishingOrder::Exact(v) => Some(v),
            VanishingOrder::AtLeast(_) => None,
        }
    }

    pub fn is_bound(self) -> bool {
        matches!(self, VanishingOrder::AtLeast(_))
    }
}

/// Element of the formal power series ring in `nvars` variables, known
/// exactly up to total degree `precision`. Higher coefficients are unknown,
/// not zero.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TruncSeries {
    nvars: usize,
    precision: u32,
    coeffs: BTreeMap<Multidegree, GaussRat>,
}

impl TruncSeries {
    pub fn zero(nvars: usize, precision: u32) -> Self {
        TruncSeries {
            nvars,
            precision,
            coeffs: BTreeMap::new(),
        }
    }

    /// Collect terms, summing duplicates and dropping zeros and anything above `precision`.
    pub fn from_terms(
        nvars: usize,
        precision: u32,
        terms: impl IntoIterator<Item = (Multidegree, GaussRat)>,
    ) -> Result<Self> {
        let mut s = TruncSeries::zero(nvars, precision);
        for (j, c) in terms {
            if j.nvars() != nvars {
                return Err(Error::DimensionMismatch {
                    expected: nvars,
                    found: j.nvars(),
                });
            }
            s.add_term(j, c);
        }
        Ok(s)
    }

    pub fn constant(nvars: usize, c: GaussRat, precision: u32) -> Self {
        let mut s = TruncSeries::zero(nvars, precision);
        s.add_term(Multidegree::zero(nvars), c);
        s
    }

    /// The coordinate function `z_{i+1}`.
    pub fn var(nvars: usize, i: usize, precision: u32) -> Self {
        TruncSeries::monomial(Multidegree::unit(nvars, i), GaussRat::one(), precision)
    }

    pub fn monomial(j: Multidegree, c: GaussRat, precision: u32) -> Self {
        let mut s = TruncSeries::zero(j.nvars(), precision);
        s.add_term(j, c);
        s
    }

    pub(crate) fn add_term(&mut self, j: Multidegree, c: GaussRat) {
        if j.total() > self.precision || c.is_zero() {
            return;
        }
        match self.coeffs.entry(j) {
            alloc::collections::btree_map::Entry::Vacant(e) => {
                e.insert(c);
            }
            alloc::collections::btree_map::Entry::Occupied(mut e) => {
                let v = e.get() + &c;
                if v.is_zero() {
                    e.remove();
                } else {
                    *e.get_mut() = v;
                }
            }
        }
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn precision(&self) -> u32 {
        self.precision
    }

    pub fn coeff(&self, j: &Multidegree) -> GaussRat {
        self.coeffs.get(j).cloned().unwrap_or_else(GaussRat::zero)
    }

    /// Nonzero terms in ascending multidegree order.
    pub fn terms(&self) -> impl Iterator<Item = (&Multidegree, &GaussRat)> {
        self.coeffs.iter()
    }

    pub fn num_terms(&self) -> usize {
        self.coeffs.len()
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn constant_term(&self) -> GaussRat {
        self.coeff(&Multidegree::zero(self.nvars))
    }

    /// Lowest total degree carrying a nonzero coefficient.
    pub fn order(&self) -> VanishingOrder {
        match self.coeffs.keys().next() {
            Some(j) => VanishingOrder::Exact(j.total()),
            None => VanishingOrder::AtLeast(self.precision.saturating_add(1)),
        }
    }

    /// Highest total degree among stored terms.
    pub fn max_degree(&self) -> u32 {
        self.coeffs.keys().next_back().map_or(0, |j| j.total())
    }

    /// Lowest-degree homogeneous part as a list of terms.
    pub fn leading_form(&self) -> Vec<(Multidegree, GaussRat)> {
        let Some(d) = self.order().exact() else {
            return Vec::new();
        };
        self.coeffs
            .iter()
            .take_while(|(j, _)| j.total() == d)
            .map(|(j, c)| (j.clone(), c.clone()))
            .collect()
    }

    /// The k-jet: terms of total degree `<= k`, precision `k`.
    pub fn jet(&self, k: u32) -> Result<Self> {
        if k > self.precision {
            return Err(Error::InsufficientPrecision {
                needed: k,
                available: self.precision,
            });
        }
        Ok(self.truncated(k))
    }

    fn truncated(&self, k: u32) -> Self {
        TruncSeries {
            nvars: self.nvars,
            precision: k,
            coeffs: self
                .coeffs
                .iter()
                .take_while(|(j, _)| j.total() <= k)
                .map(|(j, c)| (j.clone(), c.clone()))
                .collect(),
        }
    }

    /// Treat the stored terms as an exact polynomial and relabel its precision.
    ///
    /// Raising the precision asserts that the unknown tail is zero; callers use
    /// this only for inputs that are genuinely polynomial.
    pub fn as_polynomial_to(&self, precision: u32) -> Self {
        if precision <= self.precision {
            return self.truncated(precision);
        }
        TruncSeries {
            nvars: self.nvars,
            precision,
            coeffs: self.coeffs.clone(),
        }
    }

    fn check_dims(&self, o: &Self) -> Result<()> {
        if self.nvars != o.nvars {
            return Err(Error::DimensionMismatch {
                expected: self.nvars,
                found: o.nvars,
            });
        }
        Ok(())
    }

    pub fn checked_add(&self, o: &Self) -> Result<Self> {
        self.check_dims(o)?;
        let prec = self.precision.min(o.precision);
        let mut s = self.truncated(prec);
        for (j, c) in o.coeffs.iter() {
            s.add_term(j.clone(), c.clone());
        }
        Ok(s)
    }

    pub fn checked_sub(&self, o: &Self) -> Result<Self> {
        self.checked_add(&-o)
    }

    /// Product, exact up to the smaller of the two precisions.
    pub fn checked_mul(&self, o: &Self) -> Result<Self> {
        self.check_dims(o)?;
        let prec = self.precision.min(o.precision);
        let mut s = TruncSeries::zero(self.nvars, prec);
        for (a, ca) in self.coeffs.iter() {
            let da = a.total();
            if da > prec {
                break;
            }
            for (b, cb) in o.coeffs.iter() {
                if da + b.total() > prec {
                    break;
                }
                s.add_term(a.add(b), ca * cb);
            }
        }
        Ok(s)
    }

    pub fn scale(&self, c: &GaussRat) -> Self {
        if c.is_zero() {
            return TruncSeries::zero(self.nvars, self.precision);
        }
        TruncSeries {
            nvars: self.nvars,
            precision: self.precision,
            coeffs: self.coeffs.iter().map(|(j, x)| (j.clone(), x * c)).collect(),
        }
    }

    /// Multiply by the monomial `z^m` (precision grows by `|m|`).
    pub fn shift(&self, m: &Multidegree) -> Self {
        TruncSeries {
            nvars: self.nvars,
            precision: self.precision.saturating_add(m.total()),
            coeffs: self.coeffs.iter().map(|(j, c)| (j.add(m), c.clone())).collect(),
        }
    }

    pub fn pow(&self, e: u32) -> Self {
        let mut acc = TruncSeries::constant(self.nvars, GaussRat::one(), self.precision);
        for _ in 0..e {
            acc = &acc * self;
        }
        acc
    }

    /// Coefficientwise conjugate.
    pub fn conj(&self) -> Self {
        TruncSeries {
            nvars: self.nvars,
            precision: self.precision,
            coeffs: self.coeffs.iter().map(|(j, c)| (j.clone(), c.conj())).collect(),
        }
    }

    /// Substitute series for every variable: `s(phi_1, ..., phi_n)`.
    ///
    /// Each `phi_i` must vanish at the origin. The result lives in the variables
    /// of the `phi`s and is exact up to `min(precision, precision of phi)`.
    pub fn compose(&self, phis: &[TruncSeries]) -> Result<Self> {
        if phis.len() != self.nvars {
            return Err(Error::DimensionMismatch {
                expected: self.nvars,
                found: phis.len(),
            });
        }
        let m = phis.first().map_or(0, |p| p.nvars);
        let mut prec = self.precision;
        for p in phis {
            if p.nvars != m {
                return Err(Error::DimensionMismatch {
                    expected: m,
                    found: p.nvars,
                });
            }
            if !p.constant_term().is_zero() {
                return Err(Error::InvalidArgument(
                    "substituted series must vanish at the origin".into(),
                ));
            }
            prec = prec.min(p.precision);
        }
        let mut powers: Vec<Vec<TruncSeries>> = phis
            .iter()
            .map(|p| vec![TruncSeries::constant(m, GaussRat::one(), prec), p.truncated(prec.min(p.precision))])
            .collect();
        let mut out = TruncSeries::zero(m, prec);
        for (j, c) in self.coeffs.iter() {
            if j.total() > prec {
                break;
            }
            let mut term = TruncSeries::constant(m, c.clone(), prec);
            for (i, &e) in j.0.iter().enumerate() {
                if e == 0 {
                    continue;
                }
                while powers[i].len() <= e as usize {
                    let next = &powers[i][powers[i].len() - 1] * &powers[i][1];
                    powers[i].push(next);
                }
                term = &term * &powers[i][e as usize];
            }
            for (k, v) in term.coeffs {
                out.add_term(k, v);
            }
        }
        Ok(out)
    }

    /// Keep only the listed variables (in the given order); the others must not occur.
    pub fn select_vars(&self, keep: &[usize]) -> Result<Self> {
        let mut out = TruncSeries::zero(keep.len(), self.precision);
        for (j, c) in self.coeffs.iter() {
            let mut e = Vec::with_capacity(keep.len());
            for &k in keep {
                e.push(j.0[k]);
            }
            let kept: u32 = e.iter().sum();
            if kept != j.total() {
                return Err(Error::InvalidArgument(
                    "series depends on a dropped variable".into(),
                ));
            }
            out.add_term(Multidegree(e), c.clone());
        }
        Ok(out)
    }

    /// Inverse of [`select_vars`](Self::select_vars): place variable `i` at slot `slots[i]` of `n`.
    pub fn embed(&self, n: usize, slots: &[usize]) -> Self {
        let mut out = TruncSeries::zero(n, self.precision);
        for (j, c) in self.coeffs.iter() {
            let mut e = vec![0; n];
            for (i, &s) in slots.iter().enumerate() {
                e[s] = j.0[i];
            }
            out.add_term(Multidegree(e), c.clone());
        }
        out
    }

    /// Whether variable `i` occurs in any stored term.
    pub fn involves(&self, i: usize) -> bool {
        self.coeffs.keys().any(|j| j.0[i] > 0)
    }

    /// Split into coefficients of powers of variable `w`: `s = sum_e c_e(z') w^e`,
    /// where `c_e` lives in the remaining variables (order preserved).
    pub fn coefficients_in(&self, w: usize) -> Vec<TruncSeries> {
        let mut out: Vec<TruncSeries> = Vec::new();
        for (j, c) in self.coeffs.iter() {
            let e = j.0[w] as usize;
            while out.len() <= e {
                out.push(TruncSeries::zero(self.nvars - 1, self.precision));
            }
            let mut rest = j.0.clone();
            rest.remove(w);
            out[e].add_term(Multidegree(rest), c.clone());
        }
        out
    }
}

impl Add for &TruncSeries {
    type Output = TruncSeries;
    /// Panics on a variable-count mismatch; see [`TruncSeries::checked_add`].
    fn add(self, o: &TruncSeries) -> TruncSeries {
        self.checked_add(o).expect("series dimension mismatch")
    }
}

impl Sub for &TruncSeries {
    type Output = TruncSeries;
    fn sub(self, o: &TruncSeries) -> TruncSeries {
        self.checked_sub(o).expect("series dimension mismatch")
    }
}

impl Mul for &TruncSeries {
    type Output = TruncSeries;
    fn mul(self, o: &TruncSeries) -> TruncSeries {
        self.checked_mul(o).expect("series dimension mismatch")
    }
}

impl Neg for &TruncSeries {
    type Output = TruncSeries;
    fn neg(self) -> TruncSeries {
        TruncSeries {
            nvars: self.nvars,
            precision: self.precision,
            coeffs: self.coeffs.iter().map(|(j, c)| (j.clone(), -c)).collect(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn poly(n: usize, prec: u32, terms: &[(&[u32], i64)]) -> TruncSeries {
        TruncSeries::from_terms(
            n,
            prec,
            terms
                .iter()
                .map(|(e, c)| (Multidegree(e.to_vec()), GaussRat::from_int(*c))),
        )
        .unwrap()
    }

    #[test]
    fn mul_examples() {
        let a = poly(1, 3, &[(&[0], 1), (&[1], 1)]);
        let b = poly(1, 3, &[(&[0], 1), (&[1], -1)]);
        assert_eq!(&a * &b, poly(1, 3, &[(&[0], 1), (&[2], -1)]));

        let z1 = TruncSeries::var(2, 0, 5);
        let z2 = TruncSeries::var(2, 1, 5);
        assert_eq!(&z1 * &z2, poly(2, 5, &[(&[1, 1], 1)]));
    }

    #[test]
    fn geometric_square_matches_convolution() {
        let geo = poly(1, 4, &[(&[0], 1), (&[1], 1), (&[2], 1), (&[3], 1), (&[4], 1)]);
        let sq = &geo * &geo;
        // convolution oracle: number of (i, j) with i + j = k and i, j <= 4
        for k in 0..=4u32 {
            let count = (0..=4).filter(|&i| i <= k && k - i <= 4).count() as i64;
            assert_eq!(sq.coeff(&Multidegree(vec![k])), GaussRat::from_int(count));
        }
        assert_eq!(sq.precision(), 4);
    }

    #[test]
    fn jet_examples() {
        let s = poly(1, 5, &[(&[0], 1), (&[1], 1), (&[2], 1)]);
        assert_eq!(s.jet(1).unwrap(), poly(1, 1, &[(&[0], 1), (&[1], 1)]));
        assert_eq!(s.jet(0).unwrap(), poly(1, 0, &[(&[0], 1)]));
        assert_eq!(s.jet(3).unwrap().jet(1).unwrap(), s.jet(1).unwrap());
        assert!(matches!(
            s.jet(6),
            Err(Error::InsufficientPrecision { needed: 6, available: 5 })
        ));
    }

    #[test]
    fn dimension_mismatch_is_reported() {
        let a = TruncSeries::var(2, 0, 3);
        let b = TruncSeries::var(3, 0, 3);
        assert!(matches!(a.checked_mul(&b), Err(Error::DimensionMismatch { .. })));
    }

    #[test]
    fn compose_substitutes_variables() {
        // (z1 + z2^2) with z1 -> t, z2 -> t + t^2
        let s = poly(2, 6, &[(&[1, 0], 1), (&[0, 2], 1)]);
        let t = TruncSeries::var(1, 0, 6);
        let phi2 = &t + &t.pow(2);
        let out = s.compose(&[t.clone(), phi2]).unwrap();
        assert_eq!(out, poly(1, 6, &[(&[1], 1), (&[2], 1), (&[3], 2), (&[4], 1)]));
    }
}
