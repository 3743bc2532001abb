//! Formal curves through the origin and pullbacks along them.

use alloc::collections::BTreeMap;
use alloc::vec::Vec;

use num_traits::{One, Zero};

use crate::coef::GaussRat;
use crate::error::{Error, Result};
use crate::multidegree::Multidegree;
use crate::series::{TruncSeries, VanishingOrder};
use crate::uni::{Series1, UniSeries};

/// `t -> (zeta_1(t), ..., zeta_n(t))` with `zeta(0) = 0`, every component known to `precision`.
#[derive(Clone, Debug, PartialEq)]
pub struct FormalCurve {
    components: Vec<UniSeries>,
    precision: u32,
}

impl FormalCurve {
    /// Components are cut (or, for exact polynomials, labelled) to `precision`.
    pub fn new(components: Vec<UniSeries>, precision: u32) -> Result<Self> {
        let mut out = Vec::with_capacity(components.len());
        for (i, c) in components.into_iter().enumerate() {
            if c.precision() < precision {
                return Err(Error::InsufficientPrecision {
                    needed: precision,
                    available: c.precision(),
                });
            }
            if !c.coeff(0).is_zero() {
                return Err(Error::InvalidArgument(alloc::format!(
                    "component {} does not vanish at t = 0",
                    i + 1
                )));
            }
            out.push(c.with_precision(precision));
        }
        Ok(FormalCurve {
            components: out,
            precision,
        })
    }

    /// Curve with monomial-plus-correction components given as coefficient lists
    /// `comps[i][e]` for `t^e`.
    pub fn from_coefficients(comps: Vec<Vec<GaussRat>>, precision: u32) -> Result<Self> {
        FormalCurve::new(
            comps
                .into_iter()
                .map(|v| Series1::new(v, crate::uni::EXACT))
                .collect(),
            precision,
        )
    }

    pub fn dim(&self) -> usize {
        self.components.len()
    }

    pub fn precision(&self) -> u32 {
        self.precision
    }

    pub fn components(&self) -> &[UniSeries] {
        &self.components
    }

    pub fn component(&self, i: usize) -> &UniSeries {
        &self.components[i]
    }

    /// `nu(zeta)`: the smallest order among the components.
    pub fn vanishing_order(&self) -> VanishingOrder {
        self.components
            .iter()
            .filter_map(|c| c.order().exact())
            .min()
            .map_or(
                VanishingOrder::AtLeast(self.precision.saturating_add(1)),
                VanishingOrder::Exact,
            )
    }

    /// `nu(zeta)` for a curve that must be nonconstant.
    pub fn nu(&self) -> Result<u32> {
        self.vanishing_order()
            .exact()
            .ok_or(Error::ConstantCurve(self.precision))
    }

    /// Substitute `t -> t^m`.
    pub fn reparametrize(&self, m: u32) -> Result<Self> {
        if m == 0 {
            return Err(Error::InvalidArgument("reparametrization power must be >= 1".into()));
        }
        Ok(FormalCurve {
            components: self.components.iter().map(|c| c.compose_power(m)).collect(),
            precision: self.precision.saturating_mul(m),
        })
    }

    pub fn truncate(&self, precision: u32) -> Result<Self> {
        if precision > self.precision {
            return Err(Error::InsufficientPrecision {
                needed: precision,
                available: self.precision,
            });
        }
        FormalCurve::new(self.components.clone(), precision)
    }

    /// Known range of `s o zeta` for a series known to `series_precision`.
    pub fn pullback_precision(&self, series_precision: u32) -> Result<u32> {
        let nu = self.nu()?;
        Ok(series_precision.saturating_mul(nu).min(self.precision))
    }

    /// Products `zeta^J`, cached, each cut at `prec`.
    pub(crate) fn monomial_cache(&self, prec: u32) -> MonomialCache {
        MonomialCache {
            prec,
            powers: self
                .components
                .iter()
                .map(|c| {
                    let base = c.clone().with_precision(prec);
                    alloc::vec![Series1::constant(GaussRat::one(), prec), base]
                })
                .collect(),
            products: BTreeMap::new(),
        }
    }

    /// `(s o zeta)(t)`, known up to `min(N_s * nu, N_zeta)`.
    pub fn pullback(&self, s: &TruncSeries) -> Result<UniSeries> {
        if s.nvars() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                found: s.nvars(),
            });
        }
        let nu = self.nu()?;
        let prec = self.pullback_precision(s.precision())?;
        let mut cache = self.monomial_cache(prec);
        let mut acc = Series1::zero(prec);
        for (j, c) in s.terms() {
            if (j.total() as u64) * (nu as u64) > prec as u64 {
                break;
            }
            let m = cache.get(j);
            acc = acc.add(&m.scale(c));
        }
        Ok(acc.with_precision(prec))
    }
}

pub(crate) struct MonomialCache {
    prec: u32,
    powers: Vec<Vec<UniSeries>>,
    products: BTreeMap<Multidegree, UniSeries>,
}

impl MonomialCache {
    pub(crate) fn get(&mut self, j: &Multidegree) -> UniSeries {
        if let Some(s) = self.products.get(j) {
            return s.clone();
        }
        let mut acc = Series1::constant(GaussRat::one(), self.prec);
        for (i, &e) in j.0.iter().enumerate() {
            if e == 0 {
                continue;
            }
            let pw = &mut self.powers[i];
            while pw.len() <= e as usize {
                let next = pw[pw.len() - 1].mul(&pw[1]).with_precision(self.prec);
                pw.push(next);
            }
            acc = acc.mul(&pw[e as usize]).with_precision(self.prec);
        }
        self.products.insert(j.clone(), acc.clone());
        acc
    }
}
