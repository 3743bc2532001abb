//! Newton-Puiseux expansion of the roots of a bivariate Weierstrass polynomial.
//!
//! Every branch is reported as `tau -> (tau^d, w(tau))` with `w` a power series.
//! Characteristic roots outside `Q(i)` move the remainder of that branch to
//! floating arithmetic.

use alloc::vec;
use alloc::vec::Vec;

use num_complex::Complex64;
use num_integer::Integer;

use crate::coef::{Field, GaussRat};
use crate::error::{Error, Result};
use crate::series::VanishingOrder;
use crate::uni::{Series1, UniSeries, EXACT};
use crate::weierstrass::WeierstrassPoly;

/// Largest magnitude accepted for a floating residual coefficient.
pub const FLOAT_TOLERANCE: f64 = 1e-9;

const MAX_DEPTH: u32 = 64;

#[derive(Clone, Debug, PartialEq)]
pub enum BranchSeries {
    Exact(UniSeries),
    Floating { series: Series1<Complex64>, tolerance: f64 },
}

impl BranchSeries {
    pub fn is_exact(&self) -> bool {
        matches!(self, BranchSeries::Exact(_))
    }

    pub fn exact(&self) -> Option<&UniSeries> {
        match self {
            BranchSeries::Exact(s) => Some(s),
            BranchSeries::Floating { .. } => None,
        }
    }

    pub fn to_complex(&self) -> Series1<Complex64> {
        match self {
            BranchSeries::Exact(s) => s.map(|c| c.to_c64()),
            BranchSeries::Floating { series, .. } => series.clone(),
        }
    }
}

/// How well the branch annihilates the polynomial.
#[derive(Clone, Debug, PartialEq)]
pub enum Residual {
    /// Order of `P(tau^d, w(tau))`, computed exactly.
    Exact(VanishingOrder),
    /// Largest residual coefficient below the target order.
    Floating(f64),
}

#[derive(Clone, Debug, PartialEq)]
pub struct PuiseuxBranch {
    pub ramification: u32,
    /// Multiplicity as a root; the branch accounts for `ramification * multiplicity` roots.
    pub multiplicity: u32,
    pub series: BranchSeries,
    pub residual: Residual,
}

impl PuiseuxBranch {
    /// Whether the residual meets order `n` (exact) or the floating tolerance.
    pub fn certified(&self, n: u32) -> bool {
        match &self.residual {
            Residual::Exact(o) => o.value() >= n,
            Residual::Floating(m) => *m <= FLOAT_TOLERANCE,
        }
    }
}

struct Stage<C> {
    /// `a_j(x)`, exact polynomials.
    poly: Vec<Series1<C>>,
    /// Number of roots of positive order still to be found.
    m: usize,
    ramification: u32,
    /// `w = prefix(x) + x^e y`.
    e: u32,
    prefix: Series1<C>,
}

struct Raw {
    ramification: u32,
    multiplicity: u32,
    series: BranchSeries,
}

fn convert<C: Field>(s: &Series1<C>) -> Series1<Complex64> {
    s.map(|c| c.to_complex())
}

fn emit<C: Field>(w: Series1<C>, ramification: u32, multiplicity: u32, out: &mut Vec<Raw>) {
    let series = if C::EXACT {
        BranchSeries::Exact(w.map(|c| c.to_exact().expect("exact field")))
    } else {
        BranchSeries::Floating {
            series: convert(&w),
            tolerance: FLOAT_TOLERANCE,
        }
    };
    out.push(Raw {
        ramification,
        multiplicity,
        series,
    });
}

fn binomial(n: usize, k: usize) -> i64 {
    let mut acc: i64 = 1;
    for i in 0..k {
        acc = acc * (n - i) as i64 / (i + 1) as i64;
    }
    acc
}

/// Root `y(x)` with `y(0) = 0` of a polynomial whose `a_1(0) != 0`, known to `target`.
fn newton_root<C: Field>(poly: &[Series1<C>], target: u32) -> Result<Series1<C>> {
    let deriv: Vec<Series1<C>> = poly
        .iter()
        .enumerate()
        .skip(1)
        .map(|(j, a)| a.scale(&C::from_i64(j as i64)))
        .collect();
    let mut y = Series1::zero(0);
    let mut prec = 0u32;
    while prec < target {
        prec = prec.saturating_mul(2).saturating_add(1).min(target);
        let cut = |v: &[Series1<C>]| -> Vec<Series1<C>> {
            v.iter().map(|a| a.clone().with_precision(prec)).collect()
        };
        let yp = y.clone().with_precision(prec);
        let f = Series1::eval_poly(&cut(poly), &yp).with_precision(prec);
        let fp = Series1::eval_poly(&cut(&deriv), &yp).with_precision(prec);
        y = yp.sub(&f.divide(&fp)?).with_precision(prec);
    }
    Ok(y.with_precision(target))
}

fn solve<C: Field>(st: Stage<C>, n: u32, depth: u32, out: &mut Vec<Raw>) -> Result<()> {
    if depth > MAX_DEPTH {
        return Err(Error::InvalidArgument(
            "Newton-Puiseux iteration did not separate the roots".into(),
        ));
    }
    let Stage {
        mut poly,
        mut m,
        ramification,
        e,
        prefix,
    } = st;
    // y = 0 as a root of multiplicity r0
    let r0 = (0..=m).find(|&j| !poly[j].is_zero()).unwrap_or(m);
    if r0 > 0 {
        emit(prefix.clone().with_precision(n), ramification, r0 as u32, out);
        poly.drain(..r0);
        m -= r0;
        if m == 0 {
            return Ok(());
        }
    }
    if m == 1 {
        let target = n.saturating_sub(e);
        let w = if target == 0 {
            prefix.with_precision(n)
        } else {
            let y = newton_root(&poly, target)?;
            prefix.add(&y.shift_up(e)).with_precision(n)
        };
        emit(w, ramification, 1, out);
        return Ok(());
    }
    // Newton polygon over j = 0..=m
    let orders: Vec<Option<u32>> = (0..=m).map(|j| poly[j].order().exact()).collect();
    let pts: Vec<(usize, u32)> = orders
        .iter()
        .enumerate()
        .filter_map(|(j, o)| o.map(|o| (j, o)))
        .collect();
    let mut hull: Vec<(usize, u32)> = Vec::new();
    for &p in pts.iter() {
        while hull.len() >= 2 {
            let (a, b) = (hull[hull.len() - 2], hull[hull.len() - 1]);
            // drop b if it lies on or above segment a-p
            let lhs = (b.1 as i64 - a.1 as i64) * (p.0 as i64 - a.0 as i64);
            let rhs = (p.1 as i64 - a.1 as i64) * (b.0 as i64 - a.0 as i64);
            if lhs >= rhs {
                hull.pop();
            } else {
                break;
            }
        }
        hull.push(p);
    }
    for w in hull.windows(2) {
        let ((j1, o1), (j2, o2)) = (w[0], w[1]);
        if o2 >= o1 {
            continue;
        }
        let num = (o1 - o2) as u64;
        let den = (j2 - j1) as u64;
        let g = num.gcd(&den);
        let (p, q) = ((num / g) as u32, (den / g) as u32);
        let big_m = q * o1 + p * j1 as u32;
        let len = (j2 - j1) / q as usize;
        let mut psi = vec![C::zero(); len + 1];
        for &(j, o) in pts.iter() {
            if j < j1 || j > j2 {
                continue;
            }
            if (q * o + p * j as u32) == big_m {
                psi[(j - j1) / q as usize] = poly[j].coeff(o as usize);
            }
        }
        let split = C::split_roots(&psi);
        for (u, r) in split.roots {
            match u.root_of(q) {
                Some(c) => descend(&poly, c, p, q, big_m, r as usize, ramification, e, &prefix, n, depth, out)?,
                None => float_descend(&poly, u.to_complex(), p, q, big_m, r as usize, ramification, e, &prefix, n, depth, out)?,
            }
        }
        if split.rest.len() > 1 {
            let rest: Vec<Complex64> = split.rest.iter().map(|c| c.to_complex()).collect();
            for (u, r) in crate::roots::clustered_roots(&rest) {
                float_descend(&poly, u, p, q, big_m, r as usize, ramification, e, &prefix, n, depth, out)?;
            }
        }
    }
    Ok(())
}

#[allow(clippy::too_many_arguments)]
fn float_descend<C: Field>(
    poly: &[Series1<C>],
    u: Complex64,
    p: u32,
    q: u32,
    big_m: u32,
    r: usize,
    ramification: u32,
    e: u32,
    prefix: &Series1<C>,
    n: u32,
    depth: u32,
    out: &mut Vec<Raw>,
) -> Result<()> {
    let poly: Vec<Series1<Complex64>> = poly.iter().map(convert).collect();
    let c = u.powf(1.0 / q as f64);
    descend(&poly, c, p, q, big_m, r, ramification, e, &convert(prefix), n, depth, out)
}

/// Substitute `x = x1^q`, `y = x1^p (c + y1)`, divide by `x1^M` and recurse.
#[allow(clippy::too_many_arguments)]
fn descend<C: Field>(
    poly: &[Series1<C>],
    c: C,
    p: u32,
    q: u32,
    big_m: u32,
    r: usize,
    ramification: u32,
    e: u32,
    prefix: &Series1<C>,
    n: u32,
    depth: u32,
    out: &mut Vec<Raw>,
) -> Result<()> {
    let deg = poly.len() - 1;
    let mut cpow = vec![C::one()];
    for _ in 0..deg {
        let last = cpow[cpow.len() - 1].clone();
        cpow.push(last * c.clone());
    }
    let mut next: Vec<Series1<C>> = vec![Series1::zero(EXACT); deg + 1];
    for (j, a) in poly.iter().enumerate() {
        if a.is_zero() {
            continue;
        }
        let t = a.compose_power(q).shift_up(p * j as u32);
        for i in 0..=j {
            let k = C::from_i64(binomial(j, i)) * cpow[j - i].clone();
            next[i] = next[i].add(&t.scale(&k));
        }
    }
    let next = next
        .into_iter()
        .map(|b| b.shift_down(big_m))
        .collect::<Result<Vec<_>>>()?;
    let e1 = q * e + p;
    let prefix1 = prefix
        .compose_power(q)
        .add(&Series1::monomial(e1, c, EXACT));
    solve(
        Stage {
            poly: next,
            m: r,
            ramification: ramification * q,
            e: e1,
            prefix: prefix1,
        },
        n,
        depth + 1,
        out,
    )
}

/// All branches of a bivariate Weierstrass polynomial `P(s, w)`, with `w(tau)` to order `n`.
///
/// The coefficients are used as exact polynomials. The ramification-weighted
/// multiplicities always add up to the degree; with `exact_only`, floating
/// branches are dropped after that check.
pub fn newton_puiseux(p: &WeierstrassPoly, n: u32, exact_only: bool) -> Result<Vec<PuiseuxBranch>> {
    if p.base_vars() != 1 {
        return Err(Error::DimensionMismatch {
            expected: 1,
            found: p.base_vars(),
        });
    }
    let l = p.degree();
    let mut poly: Vec<UniSeries> = p
        .coeffs()
        .iter()
        .map(|b| {
            let mut v = vec![GaussRat::default(); b.max_degree() as usize + 1];
            for (j, c) in b.terms() {
                v[j.0[0] as usize] = c.clone();
            }
            Series1::new(v, EXACT)
        })
        .collect();
    poly.push(Series1::constant(GaussRat::from_int(1), EXACT));
    let mut raw = Vec::new();
    solve(
        Stage {
            poly: poly.clone(),
            m: l,
            ramification: 1,
            e: 0,
            prefix: Series1::zero(EXACT),
        },
        n,
        0,
        &mut raw,
    )?;
    let count: u32 = raw.iter().map(|b| b.ramification * b.multiplicity).sum();
    if count as usize != l {
        return Err(Error::InvalidArgument(alloc::format!(
            "branches account for {count} roots of a degree {l} polynomial"
        )));
    }
    let mut out = Vec::new();
    for b in raw {
        if exact_only && !b.series.is_exact() {
            continue;
        }
        let residual = residual(&poly, b.ramification, &b.series, n);
        out.push(PuiseuxBranch {
            ramification: b.ramification,
            multiplicity: b.multiplicity,
            series: b.series,
            residual,
        });
    }
    Ok(out)
}

/// `P(tau^d, w(tau))` read against order `n`.
pub fn residual(poly: &[UniSeries], d: u32, w: &BranchSeries, n: u32) -> Residual {
    match w {
        BranchSeries::Exact(w) => {
            let a: Vec<UniSeries> = poly.iter().map(|a| a.compose_power(d)).collect();
            let r = Series1::eval_poly(&a, w);
            Residual::Exact(r.order())
        }
        BranchSeries::Floating { series, .. } => {
            let a: Vec<Series1<Complex64>> = poly
                .iter()
                .map(|a| convert(a).compose_power(d).with_precision(n))
                .collect();
            let r = Series1::eval_poly(&a, &series.clone().with_precision(n));
            Residual::Floating(r.max_magnitude_below(n as usize))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::multidegree::Multidegree;
    use crate::series::TruncSeries;

    fn wp(b: &[&[(u32, i64)]]) -> WeierstrassPoly {
        let coeffs = b
            .iter()
            .map(|t| {
                TruncSeries::from_terms(
                    1,
                    60,
                    t.iter().map(|&(e, c)| (Multidegree(vec![e]), GaussRat::from_int(c))),
                )
                .unwrap()
            })
            .collect();
        WeierstrassPoly::new(1, coeffs, 60).unwrap()
    }

    #[test]
    fn cusp_has_one_ramified_branch() {
        let br = newton_puiseux(&wp(&[&[(3, -1)], &[]]), 40, false).unwrap();
        assert_eq!(br.len(), 1);
        assert_eq!(br[0].ramification, 2);
        let w = br[0].series.exact().unwrap();
        assert_eq!(w.order(), VanishingOrder::Exact(3));
        assert!(w.coeffs().iter().skip(4).all(|c| *c == GaussRat::default()));
        assert!(br[0].certified(40));
    }

    #[test]
    fn node_with_unit_factor() {
        // w^2 - s^2 (1 + s)
        let br = newton_puiseux(&wp(&[&[(2, -1), (3, -1)], &[]]), 20, false).unwrap();
        assert_eq!(br.len(), 2);
        for b in &br {
            assert_eq!(b.ramification, 1);
            assert!(b.certified(20));
            let w = b.series.exact().unwrap();
            // +-(t + t^2/2 - t^3/8 + ...)
            let s = w.coeff(1);
            assert_eq!(w.coeff(2), &s * &GaussRat::from_ratio(1, 2));
            assert_eq!(w.coeff(3), &s * &GaussRat::from_ratio(-1, 8));
            assert_eq!(w.coeff(4), &s * &GaussRat::from_ratio(1, 16));
        }
    }

    #[test]
    fn split_linear_factors() {
        let br = newton_puiseux(&wp(&[&[(2, 2)], &[(1, -3)]]), 20, false).unwrap();
        let mut lead: Vec<_> = br.iter().map(|b| b.series.exact().unwrap().coeff(1)).collect();
        lead.sort_by_key(|c| c.to_string_key());
        assert_eq!(lead, vec![GaussRat::from_int(1), GaussRat::from_int(2)]);
    }

    #[test]
    fn irrational_roots_go_floating() {
        // w^2 - 2 s^2
        let br = newton_puiseux(&wp(&[&[(2, -2)], &[]]), 40, false).unwrap();
        assert_eq!(br.len(), 2);
        assert!(br.iter().all(|b| !b.series.is_exact() && b.certified(40)));
        assert!(newton_puiseux(&wp(&[&[(2, -2)], &[]]), 40, true).unwrap().is_empty());
    }

    trait Key {
        fn to_string_key(&self) -> alloc::string::String;
    }
    impl Key for GaussRat {
        fn to_string_key(&self) -> alloc::string::String {
            alloc::format!("{self}")
        }
    }
}
