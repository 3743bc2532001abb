//! Series in `(z, zbar)` and the real-valued Hermitian forms that house
//! defining functions.

use alloc::collections::BTreeMap;
use alloc::vec::Vec;

use num_traits::Zero;

use crate::coef::GaussRat;
use crate::curve::FormalCurve;
use crate::error::{Error, Result};
use crate::multidegree::Multidegree;
use crate::series::{TruncSeries, VanishingOrder};

/// Bidegree key `(J, K)` for the monomial `z^J zbar^K`.
pub type Bidegree = (Multidegree, Multidegree);

/// A series in `z` and `zbar` known up to total degree `|J| + |K| <= precision`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MixedSeries {
    nvars: usize,
    precision: u32,
    coeffs: BTreeMap<Bidegree, GaussRat>,
}

fn bideg(k: &Bidegree) -> u32 {
    k.0.total() + k.1.total()
}

impl MixedSeries {
    pub fn zero(nvars: usize, precision: u32) -> Self {
        MixedSeries {
            nvars,
            precision,
            coeffs: BTreeMap::new(),
        }
    }

    pub fn from_terms(
        nvars: usize,
        precision: u32,
        terms: impl IntoIterator<Item = (Multidegree, Multidegree, GaussRat)>,
    ) -> Result<Self> {
        let mut m = MixedSeries::zero(nvars, precision);
        for (j, k, c) in terms {
            for d in [&j, &k] {
                if d.nvars() != nvars {
                    return Err(Error::DimensionMismatch {
                        expected: nvars,
                        found: d.nvars(),
                    });
                }
            }
            m.add_term(j, k, c);
        }
        Ok(m)
    }

    pub(crate) fn add_term(&mut self, j: Multidegree, k: Multidegree, c: GaussRat) {
        if j.total() + k.total() > self.precision || c.is_zero() {
            return;
        }
        let key = (j, k);
        let v = match self.coeffs.get(&key) {
            Some(old) => old + &c,
            None => c,
        };
        if v.is_zero() {
            self.coeffs.remove(&key);
        } else {
            self.coeffs.insert(key, v);
        }
    }

    /// `f(z)` as a mixed series.
    pub fn holomorphic(f: &TruncSeries) -> Self {
        let z0 = Multidegree::zero(f.nvars());
        let mut m = MixedSeries::zero(f.nvars(), f.precision());
        for (j, c) in f.terms() {
            m.add_term(j.clone(), z0.clone(), c.clone());
        }
        m
    }

    /// `|f|^2 = f(z) * conj(f)(zbar)`, cut at `precision`.
    pub fn norm_sqr(f: &TruncSeries, precision: u32) -> Self {
        let mut m = MixedSeries::zero(f.nvars(), precision);
        let terms: Vec<_> = f.terms().collect();
        for (a, ca) in terms.iter() {
            if a.total() > precision {
                break;
            }
            for (b, cb) in terms.iter() {
                if a.total() + b.total() > precision {
                    break;
                }
                m.add_term((*a).clone(), (*b).clone(), *ca * &cb.conj());
            }
        }
        m
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn precision(&self) -> u32 {
        self.precision
    }

    pub fn coeff(&self, j: &Multidegree, k: &Multidegree) -> GaussRat {
        self.coeffs
            .get(&(j.clone(), k.clone()))
            .cloned()
            .unwrap_or_else(GaussRat::zero)
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Multidegree, &Multidegree, &GaussRat)> {
        self.coeffs.iter().map(|((j, k), c)| (j, k, c))
    }

    pub fn num_terms(&self) -> usize {
        self.coeffs.len()
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Lowest total degree `|J| + |K|` with a nonzero coefficient.
    pub fn order(&self) -> VanishingOrder {
        self.coeffs
            .keys()
            .map(bideg)
            .min()
            .map_or(VanishingOrder::AtLeast(self.precision.saturating_add(1)), VanishingOrder::Exact)
    }

    /// Terms of lowest total degree, ascending in `(J, K)`.
    pub fn lowest_terms(&self) -> Vec<(Multidegree, Multidegree, GaussRat)> {
        let Some(d) = self.order().exact() else {
            return Vec::new();
        };
        self.coeffs
            .iter()
            .filter(|(k, _)| bideg(k) == d)
            .map(|((j, k), c)| (j.clone(), k.clone(), c.clone()))
            .collect()
    }

    pub fn jet(&self, k: u32) -> Result<Self> {
        if k > self.precision {
            return Err(Error::InsufficientPrecision {
                needed: k,
                available: self.precision,
            });
        }
        Ok(MixedSeries {
            nvars: self.nvars,
            precision: k,
            coeffs: self
                .coeffs
                .iter()
                .filter(|(key, _)| bideg(key) <= k)
                .map(|(key, c)| (key.clone(), c.clone()))
                .collect(),
        })
    }

    /// Same terms, relabelled as known to `precision`; terms above it are dropped.
    pub fn as_polynomial_to(&self, precision: u32) -> Self {
        MixedSeries {
            nvars: self.nvars,
            precision,
            coeffs: self
                .coeffs
                .iter()
                .filter(|(key, _)| bideg(key) <= precision)
                .map(|(key, c)| (key.clone(), c.clone()))
                .collect(),
        }
    }

    pub fn checked_add(&self, o: &Self) -> Result<Self> {
        if self.nvars != o.nvars {
            return Err(Error::DimensionMismatch {
                expected: self.nvars,
                found: o.nvars,
            });
        }
        let mut m = self.jet(self.precision.min(o.precision))?;
        for ((j, k), c) in o.coeffs.iter() {
            m.add_term(j.clone(), k.clone(), c.clone());
        }
        Ok(m)
    }

    pub fn scale(&self, c: &GaussRat) -> Self {
        let mut m = MixedSeries::zero(self.nvars, self.precision);
        for ((j, k), x) in self.coeffs.iter() {
            m.add_term(j.clone(), k.clone(), x * c);
        }
        m
    }

    pub fn checked_sub(&self, o: &Self) -> Result<Self> {
        self.checked_add(&o.scale(&GaussRat::from_int(-1)))
    }

    /// `d/dz_i`; precision drops by one.
    pub fn d_z(&self, i: usize) -> Self {
        self.derivative(i, false)
    }

    /// `d/dzbar_i`; precision drops by one.
    pub fn d_zbar(&self, i: usize) -> Self {
        self.derivative(i, true)
    }

    fn derivative(&self, i: usize, bar: bool) -> Self {
        let mut m = MixedSeries::zero(self.nvars, self.precision.saturating_sub(1));
        for ((j, k), c) in self.coeffs.iter() {
            let (mut j, mut k) = (j.clone(), k.clone());
            let slot = if bar { &mut k.0[i] } else { &mut j.0[i] };
            if *slot == 0 {
                continue;
            }
            let e = *slot;
            *slot -= 1;
            m.add_term(j, k, c * &GaussRat::from_int(e as i64));
        }
        m
    }

    /// Pull back along a curve; the result is a series in `(t, tbar)` (one variable),
    /// known up to `min(N * nu, N_zeta)`.
    pub fn pullback(&self, curve: &FormalCurve) -> Result<MixedSeries> {
        if curve.dim() != self.nvars {
            return Err(Error::DimensionMismatch {
                expected: self.nvars,
                found: curve.dim(),
            });
        }
        let nu = curve.nu()?;
        let prec = curve.pullback_precision(self.precision)?;
        let mut cache = curve.monomial_cache(prec);
        // group terms by J: sum_K c_JK conj(zeta^K)(tbar)
        let mut grouped: BTreeMap<&Multidegree, Vec<(&Multidegree, &GaussRat)>> = BTreeMap::new();
        for ((j, k), c) in self.coeffs.iter() {
            if (bideg(&(j.clone(), k.clone())) as u64) * nu as u64 > prec as u64 {
                continue;
            }
            grouped.entry(j).or_default().push((k, c));
        }
        let mut out = MixedSeries::zero(1, prec);
        for (j, ks) in grouped {
            let hol = cache.get(j);
            let mut anti = crate::uni::Series1::zero(prec);
            for (k, c) in ks {
                anti = anti.add(&cache.get(k).conj().scale(c));
            }
            for (a, ca) in hol.coeffs().iter().enumerate() {
                if ca.is_zero() {
                    continue;
                }
                for (b, cb) in anti.coeffs().iter().enumerate() {
                    if (a + b) as u64 > prec as u64 {
                        break;
                    }
                    if cb.is_zero() {
                        continue;
                    }
                    out.add_term(
                        Multidegree(alloc::vec![a as u32]),
                        Multidegree(alloc::vec![b as u32]),
                        ca * cb,
                    );
                }
            }
        }
        Ok(out)
    }
}

/// Real-valued series `r(z, zbar)`: `coeff(K, J) = conj(coeff(J, K))` for every pair.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HermitianForm {
    inner: MixedSeries,
}

impl HermitianForm {
    pub fn new(
        nvars: usize,
        precision: u32,
        terms: impl IntoIterator<Item = (Multidegree, Multidegree, GaussRat)>,
    ) -> Result<Self> {
        HermitianForm::from_mixed(MixedSeries::from_terms(nvars, precision, terms)?)
    }

    /// Validate the reality condition.
    pub fn from_mixed(m: MixedSeries) -> Result<Self> {
        for ((j, k), c) in m.coeffs.iter() {
            if m.coeff(k, j) != c.conj() {
                return Err(Error::NotRealValued {
                    j: j.clone(),
                    k: k.clone(),
                });
            }
        }
        Ok(HermitianForm { inner: m })
    }

    pub fn zero(nvars: usize, precision: u32) -> Self {
        HermitianForm {
            inner: MixedSeries::zero(nvars, precision),
        }
    }

    pub fn as_mixed(&self) -> &MixedSeries {
        &self.inner
    }

    pub fn nvars(&self) -> usize {
        self.inner.nvars
    }

    pub fn precision(&self) -> u32 {
        self.inner.precision
    }

    pub fn coeff(&self, j: &Multidegree, k: &Multidegree) -> GaussRat {
        self.inner.coeff(j, k)
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Multidegree, &Multidegree, &GaussRat)> {
        self.inner.terms()
    }

    /// Canonical half: pairs with `J <= K`, plus the pure holomorphic pairs `(J, 0)`.
    pub fn canonical_terms(&self) -> impl Iterator<Item = (&Multidegree, &Multidegree, &GaussRat)> {
        self.inner
            .terms()
            .filter(|(j, k, _)| j <= k || k.is_zero())
    }

    pub fn is_zero(&self) -> bool {
        self.inner.is_zero()
    }

    pub fn jet(&self, k: u32) -> Result<Self> {
        Ok(HermitianForm {
            inner: self.inner.jet(k)?,
        })
    }

    /// `2 Re h` for holomorphic `h`.
    pub fn twice_real_part(h: &TruncSeries) -> Self {
        let z0 = Multidegree::zero(h.nvars());
        let mut m = MixedSeries::zero(h.nvars(), h.precision());
        for (j, c) in h.terms() {
            m.add_term(j.clone(), z0.clone(), c.clone());
            m.add_term(z0.clone(), j.clone(), c.conj());
        }
        HermitianForm { inner: m }
    }

    pub fn checked_add(&self, o: &Self) -> Result<Self> {
        Ok(HermitianForm {
            inner: self.inner.checked_add(&o.inner)?,
        })
    }

    pub fn checked_sub(&self, o: &Self) -> Result<Self> {
        Ok(HermitianForm {
            inner: self.inner.checked_sub(&o.inner)?,
        })
    }

    /// Multiply by a real scalar.
    pub fn scale_real(&self, c: &num_rational::BigRational) -> Self {
        HermitianForm {
            inner: self.inner.scale(&GaussRat::real(c.clone())),
        }
    }

    /// Translate a polynomial form so that the point `p` becomes the origin:
    /// `r(z + p, zbar + conj(p))`. The stored terms are treated as exact.
    pub fn translate(&self, p: &[GaussRat]) -> Result<Self> {
        let n = self.nvars();
        if p.len() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                found: p.len(),
            });
        }
        let prec = self.precision();
        let mut out = MixedSeries::zero(n, prec);
        for ((j, k), c) in self.inner.coeffs.iter() {
            // expand prod (z_i + p_i)^{J_i} (zbar_i + conj p_i)^{K_i}
            let mut acc: Vec<(Multidegree, Multidegree, GaussRat)> =
                alloc::vec![(Multidegree::zero(n), Multidegree::zero(n), c.clone())];
            for i in 0..n {
                for (bar, e) in [(false, j.0[i]), (true, k.0[i])] {
                    if e == 0 {
                        continue;
                    }
                    let base = if bar { p[i].conj() } else { p[i].clone() };
                    let mut next = Vec::new();
                    for (a, b, x) in acc.iter() {
                        for m in 0..=e {
                            let coeff = &(x * &GaussRat::from_int(binom(e, m) as i64))
                                * &base.pow(e - m);
                            let (mut a2, mut b2) = (a.clone(), b.clone());
                            if bar {
                                b2.0[i] += m;
                            } else {
                                a2.0[i] += m;
                            }
                            next.push((a2, b2, coeff));
                        }
                    }
                    acc = next;
                }
            }
            for (a, b, x) in acc {
                out.add_term(a, b, x);
            }
        }
        HermitianForm::from_mixed(out)
    }

    /// Treat the stored terms as an exact polynomial known to `precision`.
    pub fn as_polynomial_to(&self, precision: u32) -> Self {
        HermitianForm {
            inner: self.inner.as_polynomial_to(precision),
        }
    }

    /// `r o zeta` as a real series in `(t, tbar)`.
    pub fn pullback(&self, curve: &FormalCurve) -> Result<HermitianForm> {
        Ok(HermitianForm {
            inner: self.inner.pullback(curve)?,
        })
    }
}

fn binom(n: u32, k: u32) -> u64 {
    let mut acc: u64 = 1;
    for i in 0..k as u64 {
        acc = acc * (n as u64 - i) / (i + 1);
    }
    acc
}
