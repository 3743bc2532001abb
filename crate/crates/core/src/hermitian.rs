//! Splitting a real form into `2 Re h + sum |f_J|^2 - sum |g_J|^2`.

use alloc::collections::BTreeMap;
use alloc::vec::Vec;

use num_traits::Zero;

use crate::coef::GaussRat;
use crate::error::{Error, Result};
use crate::mixed::{HermitianForm, MixedSeries};
use crate::multidegree::Multidegree;
use crate::series::TruncSeries;

/// Holomorphic part `h` and the families `f_J`, `g_J`, all cut at `precision`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Decomposition {
    nvars: usize,
    precision: u32,
    h: TruncSeries,
    /// `a_JK` for `J <= K`, grouped by `J`.
    families: BTreeMap<Multidegree, BTreeMap<Multidegree, GaussRat>>,
    fs: Vec<(Multidegree, TruncSeries)>,
    gs: Vec<(Multidegree, TruncSeries)>,
}

impl Decomposition {
    /// Assemble from `h` and the coefficients `a_JK` (`J <= K`, `J != 0`).
    pub fn from_parts(
        h: TruncSeries,
        coefficients: impl IntoIterator<Item = (Multidegree, Multidegree, GaussRat)>,
    ) -> Result<Self> {
        let nvars = h.nvars();
        let precision = h.precision();
        let mut families: BTreeMap<Multidegree, BTreeMap<Multidegree, GaussRat>> = BTreeMap::new();
        for (j, k, a) in coefficients {
            if j.nvars() != nvars || k.nvars() != nvars {
                return Err(Error::DimensionMismatch {
                    expected: nvars,
                    found: j.nvars().max(k.nvars()),
                });
            }
            if j.is_zero() || k < j {
                return Err(Error::InvalidArgument(alloc::format!(
                    "coefficient index ({j}, {k}) is not a family pair"
                )));
            }
            if j == k && !a.is_real() {
                return Err(Error::NotRealValued { j, k });
            }
            if a.is_zero() || j.total() + k.total() > precision {
                continue;
            }
            families.entry(j).or_default().insert(k, a);
        }
        let mut fs = Vec::new();
        let mut gs = Vec::new();
        for (j, row) in families.iter() {
            let mut plus = TruncSeries::monomial(j.clone(), GaussRat::from_int(1), precision);
            let mut minus = plus.clone();
            for (k, a) in row {
                let c = a.conj();
                plus.add_term(k.clone(), c.clone());
                minus.add_term(k.clone(), -c);
            }
            fs.push((j.clone(), plus));
            gs.push((j.clone(), minus));
        }
        Ok(Decomposition {
            nvars,
            precision,
            h,
            families,
            fs,
            gs,
        })
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn precision(&self) -> u32 {
        self.precision
    }

    pub fn h(&self) -> &TruncSeries {
        &self.h
    }

    pub fn fs(&self) -> &[(Multidegree, TruncSeries)] {
        &self.fs
    }

    pub fn gs(&self) -> &[(Multidegree, TruncSeries)] {
        &self.gs
    }

    /// Family indices `J`, ascending.
    pub fn family_indices(&self) -> Vec<Multidegree> {
        self.families.keys().cloned().collect()
    }

    pub fn num_families(&self) -> usize {
        self.families.len()
    }

    /// `a_JK` for `J <= K`.
    pub fn coefficient(&self, j: &Multidegree, k: &Multidegree) -> GaussRat {
        self.families
            .get(j)
            .and_then(|row| row.get(k))
            .cloned()
            .unwrap_or_else(GaussRat::zero)
    }

    pub fn coefficients(&self) -> impl Iterator<Item = (&Multidegree, &Multidegree, &GaussRat)> {
        self.families
            .iter()
            .flat_map(|(j, row)| row.iter().map(move |(k, a)| (j, k, a)))
    }
}

/// Decompose `jet_k(r)`.
pub fn decompose(r: &HermitianForm, k: u32) -> Result<Decomposition> {
    let r = r.jet(k)?;
    let n = r.nvars();
    let mut h = TruncSeries::zero(n, k);
    let mut coefficients = Vec::new();
    for (j, kk, c) in r.terms() {
        if kk.is_zero() {
            // pure holomorphic part; the constant is split between h and conj(h)
            let v = if j.is_zero() {
                if !c.is_real() {
                    return Err(Error::NotRealValued { j: j.clone(), k: kk.clone() });
                }
                c * &GaussRat::from_ratio(1, 2)
            } else {
                c.clone()
            };
            h.add_term(j.clone(), v);
        } else if j.is_zero() || j > kk {
            continue;
        } else if j == kk {
            if !c.is_real() {
                return Err(Error::NotRealValued { j: j.clone(), k: kk.clone() });
            }
            coefficients.push((j.clone(), kk.clone(), c * &GaussRat::from_ratio(1, 4)));
        } else {
            coefficients.push((j.clone(), kk.clone(), c * &GaussRat::from_ratio(1, 2)));
        }
    }
    Decomposition::from_parts(h, coefficients)
}

/// Expand `2 Re h + sum |f_J|^2 - sum |g_J|^2` up to total degree `k`.
pub fn reconstruct(d: &Decomposition, k: u32) -> Result<HermitianForm> {
    if k > d.precision {
        return Err(Error::InsufficientPrecision {
            needed: k,
            available: d.precision,
        });
    }
    let mut acc = HermitianForm::twice_real_part(&d.h.jet(k)?).as_mixed().clone();
    for ((_, f), (_, g)) in d.fs.iter().zip(d.gs.iter()) {
        let pf = MixedSeries::norm_sqr(&f.jet(k)?, k);
        let pg = MixedSeries::norm_sqr(&g.jet(k)?, k);
        acc = acc.checked_add(&pf)?.checked_sub(&pg)?;
    }
    HermitianForm::from_mixed(acc)
}
