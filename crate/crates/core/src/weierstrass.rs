//! Weierstrass polynomials: division, preparation, discriminants and generic
//! restriction to a line.
//!
//! Inputs are treated as exact polynomial representatives of their jets: every
//! stored term is used and results are cut at the requested total degree `N`.
//! The division and preparation identities then hold exactly to degree `N`.

use alloc::collections::BTreeMap;
use alloc::vec;
use alloc::vec::Vec;

use num_traits::{One, Zero};

use crate::coef::GaussRat;
use crate::curve::FormalCurve;
use crate::error::{Error, Result};
use crate::multidegree::Multidegree;
use crate::series::TruncSeries;
use crate::uni::{Series1, UniSeries, EXACT};

/// `w^l + sum_{j<l} b_j(z_1..z_k) w^j` with `b_j(0) = 0`; `w` is variable `k` (last).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WeierstrassPoly {
    base_vars: usize,
    precision: u32,
    coeffs: Vec<TruncSeries>,
}

impl WeierstrassPoly {
    pub fn new(base_vars: usize, coeffs: Vec<TruncSeries>, precision: u32) -> Result<Self> {
        let mut out = Vec::with_capacity(coeffs.len());
        for (j, b) in coeffs.into_iter().enumerate() {
            if b.nvars() != base_vars {
                return Err(Error::DimensionMismatch {
                    expected: base_vars,
                    found: b.nvars(),
                });
            }
            if !b.constant_term().is_zero() {
                return Err(Error::InvalidArgument(alloc::format!(
                    "coefficient b_{j} does not vanish at the origin"
                )));
            }
            if b.precision() < precision {
                return Err(Error::InsufficientPrecision {
                    needed: precision,
                    available: b.precision(),
                });
            }
            out.push(b.jet(precision)?);
        }
        Ok(WeierstrassPoly {
            base_vars,
            precision,
            coeffs: out,
        })
    }

    /// Read a series in `k + 1` variables, monic in the last one.
    pub fn from_series(f: &TruncSeries) -> Result<Self> {
        let k = f.nvars().checked_sub(1).ok_or(Error::DimensionMismatch {
            expected: 1,
            found: 0,
        })?;
        let mut parts = f.coefficients_in(k);
        let lead = parts.pop().ok_or_else(|| {
            Error::InvalidArgument("zero series is not a Weierstrass polynomial".into())
        })?;
        let one = TruncSeries::constant(k, GaussRat::one(), f.precision());
        if lead != one {
            return Err(Error::InvalidArgument(
                "leading coefficient in the distinguished variable is not 1".into(),
            ));
        }
        WeierstrassPoly::new(k, parts, f.precision())
    }

    pub fn base_vars(&self) -> usize {
        self.base_vars
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len()
    }

    pub fn precision(&self) -> u32 {
        self.precision
    }

    /// `b_0, ..., b_{l-1}`.
    pub fn coeffs(&self) -> &[TruncSeries] {
        &self.coeffs
    }

    /// As a series in `(z_1, ..., z_k, w)`.
    pub fn to_series(&self) -> TruncSeries {
        let k = self.base_vars;
        let mut terms = Vec::new();
        let mut lead = vec![0; k + 1];
        lead[k] = self.degree() as u32;
        terms.push((Multidegree(lead), GaussRat::one()));
        for (j, b) in self.coeffs.iter().enumerate() {
            for (a, c) in b.terms() {
                let mut e = a.0.clone();
                e.push(j as u32);
                terms.push((Multidegree(e), c.clone()));
            }
        }
        TruncSeries::from_terms(k + 1, self.precision, terms).expect("dimensions agree")
    }
}

/// Polynomial in `w` with coefficients in the base variables, ascending.
type WPoly = Vec<TruncSeries>;

fn add_into(acc: &mut TruncSeries, s: &TruncSeries) {
    for (j, c) in s.terms() {
        acc.add_term(j.clone(), c.clone());
    }
}

/// Reduce `f = sum f_j w^j` modulo `P`, recording the quotient; every coefficient
/// is cut at total base degree `n` (the base degree never decreases).
fn long_divide(mut f: WPoly, p: &WeierstrassPoly, n: u32) -> (WPoly, WPoly) {
    let l = p.degree();
    let k = p.base_vars;
    let zero = TruncSeries::zero(k, n);
    let mut q: WPoly = vec![zero.clone(); f.len().saturating_sub(l)];
    for j in (l..f.len()).rev() {
        let c = core::mem::replace(&mut f[j], zero.clone());
        if c.is_zero() {
            continue;
        }
        add_into(&mut q[j - l], &c);
        for (i, b) in p.coeffs.iter().enumerate() {
            if b.is_zero() {
                continue;
            }
            let prod = c.checked_mul(b).expect("same base");
            f[j - l + i] = f[j - l + i].checked_sub(&prod).expect("same base");
        }
    }
    f.truncate(l);
    while f.len() < l {
        f.push(zero.clone());
    }
    (q, f)
}

fn split_in_w(f: &TruncSeries, k: usize, n: u32) -> WPoly {
    f.coefficients_in(k)
        .into_iter()
        .map(|c| c.as_polynomial_to(n))
        .collect()
}

fn join_in_w(parts: &[TruncSeries], k: usize, n: u32) -> TruncSeries {
    let mut terms = Vec::new();
    for (e, c) in parts.iter().enumerate() {
        for (a, x) in c.terms() {
            let mut d = a.0.clone();
            d.push(e as u32);
            terms.push((Multidegree(d), x.clone()));
        }
    }
    TruncSeries::from_terms(k + 1, n, terms).expect("dimensions agree")
}

/// `f = q P + r` with `deg_w r < l`, exact to total degree `n`.
///
/// The remainder is returned by its coefficients `r_0, ..., r_{l-1}` in the base variables.
pub fn weierstrass_divide(
    f: &TruncSeries,
    p: &WeierstrassPoly,
    n: u32,
) -> Result<(TruncSeries, Vec<TruncSeries>)> {
    let k = p.base_vars;
    if f.nvars() != k + 1 {
        return Err(Error::DimensionMismatch {
            expected: k + 1,
            found: f.nvars(),
        });
    }
    let avail = f.precision().min(p.precision);
    if n > avail {
        return Err(Error::InsufficientPrecision {
            needed: n,
            available: avail,
        });
    }
    let (q, r) = long_divide(split_in_w(&f.jet(n)?, k, n), p, n);
    let q = join_in_w(&q, k, n);
    let r = r
        .into_iter()
        .enumerate()
        .map(|(i, c)| c.jet(n.saturating_sub(i as u32)).expect("within precision").as_polynomial_to(n))
        .collect();
    Ok((q, r))
}

/// `f = u P` with `u(0) != 0` and `P` a Weierstrass polynomial in the last variable,
/// exact to total degree `n`.
pub fn weierstrass_prepare(f: &TruncSeries, n: u32) -> Result<(TruncSeries, WeierstrassPoly)> {
    let k = f.nvars().checked_sub(1).ok_or(Error::DimensionMismatch {
        expected: 1,
        found: 0,
    })?;
    let f = f.jet(n)?;
    // group by base multidegree: f = sum_alpha f_alpha(w) z^alpha
    let mut groups: BTreeMap<Multidegree, Vec<GaussRat>> = BTreeMap::new();
    for (j, c) in f.terms() {
        let w = j.0[k] as usize;
        let alpha = Multidegree(j.0[..k].to_vec());
        let v = groups.entry(alpha).or_default();
        if v.len() <= w {
            v.resize(w + 1, GaussRat::zero());
        }
        v[w] = c.clone();
    }
    let z0 = Multidegree::zero(k);
    let f0 = Series1::new(groups.get(&z0).cloned().unwrap_or_default(), EXACT);
    let l = f0.order().exact().ok_or(Error::NotRegular(n))?;
    if l == 0 {
        return Err(Error::InvalidArgument(
            "series is a unit; its Weierstrass polynomial is 1".into(),
        ));
    }
    let wprec = n + l;
    let e0 = f0.shift_down(l)?;
    let e0inv = e0.clone().with_precision(wprec).inverse()?;
    let mut units: BTreeMap<Multidegree, UniSeries> = BTreeMap::new();
    let mut polys: BTreeMap<Multidegree, UniSeries> = BTreeMap::new();
    units.insert(z0.clone(), e0.clone().with_precision(n - l.min(n)));
    for d in 1..=n {
        for alpha in Multidegree::all_of_degree(k, d) {
            let cap = n - d + l;
            let mut h = Series1::new(groups.get(&alpha).cloned().unwrap_or_default(), EXACT)
                .with_precision(cap);
            for (beta, u) in units.iter() {
                if beta.is_zero() || !beta.divides(&alpha) {
                    continue;
                }
                let gamma = alpha.checked_sub(beta).expect("divides");
                if let Some(pg) = polys.get(&gamma) {
                    h = h.sub(&u.mul(pg).with_precision(cap));
                }
            }
            if h.is_zero() {
                continue;
            }
            let pa = Series1::new(h.mul(&e0inv).coeffs().iter().take(l as usize).cloned().collect(), EXACT);
            let ua = h
                .sub(&e0.mul(&pa).with_precision(cap))
                .shift_down(l)?
                .with_precision(n - d);
            if !pa.is_zero() {
                polys.insert(alpha.clone(), pa);
            }
            if !ua.is_zero() {
                units.insert(alpha, ua);
            }
        }
    }
    let mut unit_terms = Vec::new();
    for (alpha, u) in units.iter() {
        for (w, c) in u.coeffs().iter().enumerate() {
            let mut e = alpha.0.clone();
            e.push(w as u32);
            unit_terms.push((Multidegree(e), c.clone()));
        }
    }
    let unit = TruncSeries::from_terms(k + 1, n, unit_terms)?;
    let mut bs: Vec<Vec<(Multidegree, GaussRat)>> = vec![Vec::new(); l as usize];
    for (alpha, p) in polys.iter() {
        for (w, c) in p.coeffs().iter().enumerate() {
            bs[w].push((alpha.clone(), c.clone()));
        }
    }
    let coeffs = bs
        .into_iter()
        .map(|t| TruncSeries::from_terms(k, n, t))
        .collect::<Result<Vec<_>>>()?;
    Ok((unit, WeierstrassPoly::new(k, coeffs, n)?))
}

/// `(-1)^{l(l-1)/2} Res(P, dP/dw)`, the determinant of multiplication by `P'` modulo `P`.
pub fn discriminant(p: &WeierstrassPoly) -> Result<TruncSeries> {
    let l = p.degree();
    let k = p.base_vars;
    let n = p.precision;
    if l == 0 {
        return Err(Error::InvalidArgument("degree zero polynomial".into()));
    }
    let one = TruncSeries::constant(k, GaussRat::one(), n);
    // P' as a w-polynomial
    let mut dp: WPoly = Vec::with_capacity(l);
    for j in 1..l {
        dp.push(p.coeffs[j].scale(&GaussRat::from_int(j as i64)));
    }
    dp.push(one.scale(&GaussRat::from_int(l as i64)));
    // columns w^i P' mod P
    let mut a: Vec<Vec<TruncSeries>> = vec![vec![TruncSeries::zero(k, n); l]; l];
    for i in 0..l {
        let mut f = vec![TruncSeries::zero(k, n); i];
        f.extend(dp.iter().cloned());
        let (_, r) = long_divide(f, p, n);
        for (row, c) in r.into_iter().enumerate() {
            a[row][i] = c;
        }
    }
    let det = determinant(&a, k, n);
    let sign = if (l * (l - 1) / 2) % 2 == 0 { 1 } else { -1 };
    Ok(det.scale(&GaussRat::from_int(sign)))
}

/// Division-free up to integer divisions: Faddeev-LeVerrier.
fn determinant(a: &[Vec<TruncSeries>], k: usize, n: u32) -> TruncSeries {
    let l = a.len();
    let zero = TruncSeries::zero(k, n);
    let matmul = |x: &[Vec<TruncSeries>], y: &[Vec<TruncSeries>]| -> Vec<Vec<TruncSeries>> {
        let mut out = vec![vec![zero.clone(); l]; l];
        for i in 0..l {
            for j in 0..l {
                let mut s = zero.clone();
                for t in 0..l {
                    if x[i][t].is_zero() || y[t][j].is_zero() {
                        continue;
                    }
                    s = &s + &(&x[i][t] * &y[t][j]);
                }
                out[i][j] = s;
            }
        }
        out
    };
    let mut m = vec![vec![zero.clone(); l]; l];
    let mut c = TruncSeries::constant(k, GaussRat::one(), n);
    let mut last = zero.clone();
    for step in 1..=l {
        for (i, row) in m.iter_mut().enumerate() {
            row[i] = &row[i] + &c;
        }
        let am = matmul(a, &m);
        let mut tr = zero.clone();
        for (i, row) in am.iter().enumerate() {
            tr = &tr + &row[i];
        }
        c = tr.scale(&GaussRat::from_ratio(-1, step as i64));
        m = am;
        last = c.clone();
    }
    // characteristic polynomial constant term is (-1)^l det
    if l % 2 == 0 {
        last
    } else {
        last.scale(&GaussRat::from_int(-1))
    }
}

/// `P` restricted to the line `z = s v` in the base variables.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GenericRestriction {
    pub direction: Vec<i64>,
    /// Order in `s` of the discriminant restricted to the line.
    pub s_order: u32,
    /// Bivariate Weierstrass polynomial in `(s, w)`.
    pub restricted: WeierstrassPoly,
}

impl GenericRestriction {
    /// The curve `tau -> (v tau^d, w(tau))` in the original `k + 1` variables.
    pub fn curve(&self, ramification: u32, w: &UniSeries, precision: u32) -> Result<FormalCurve> {
        let mut comps: Vec<UniSeries> = self
            .direction
            .iter()
            .map(|&v| Series1::monomial(ramification, GaussRat::from_int(v), EXACT))
            .collect();
        comps.push(w.clone());
        FormalCurve::new(comps, precision)
    }
}

/// Trial directions: `(1,0,..)`, `(1,1,0,..)`, ..., `(1,..,1)`, `(1,2,3,..)`, then `(1,j,j^2,..)`.
pub fn trial_directions(k: usize) -> Vec<Vec<i64>> {
    let mut out: Vec<Vec<i64>> = Vec::new();
    let mut push = |v: Vec<i64>| {
        if !out.contains(&v) {
            out.push(v);
        }
    };
    for ones in 1..=k {
        push((0..k).map(|i| i64::from(i < ones)).collect());
    }
    push((1..=k as i64).collect());
    for j in 2..=5i64 {
        push((0..k as u32).map(|i| j.pow(i)).collect());
    }
    out
}

/// Find a line along which the discriminant does not vanish and restrict `P` to it.
pub fn generic_restrict(p: &WeierstrassPoly) -> Result<GenericRestriction> {
    let d = discriminant(p)?;
    if d.is_zero() {
        return Err(Error::DegenerateDiscriminant(d.precision()));
    }
    let k = p.base_vars;
    for v in trial_directions(k) {
        let phis: Vec<TruncSeries> = v
            .iter()
            .map(|&c| TruncSeries::monomial(Multidegree(vec![1]), GaussRat::from_int(c), p.precision))
            .collect();
        let dl = d.compose(&phis)?;
        let Some(s) = dl.order().exact() else {
            continue;
        };
        let coeffs = p
            .coeffs
            .iter()
            .map(|b| b.compose(&phis))
            .collect::<Result<Vec<_>>>()?;
        return Ok(GenericRestriction {
            direction: v,
            s_order: s,
            restricted: WeierstrassPoly::new(1, coeffs, p.precision)?,
        });
    }
    Err(Error::NoGenericDirection)
}
