//! Lower bounds for the type by searching curves `zeta_i = t^{a_i} (1 + ...)`.
//!
//! For each exponent tuple the correction coefficients are adjusted one at a
//! time, each step solving the linearized condition that removes one lowest
//! term of `zeta* r`, and keeping the best candidate.

use alloc::vec;
use alloc::vec::Vec;
use core::cmp::Ordering;

use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::coef::GaussRat;
use crate::curve::FormalCurve;
use crate::error::Result;
use crate::mixed::{HermitianForm, MixedSeries};
use crate::multidegree::Multidegree;
use crate::ratio::{dangelo_ratio, TypeRatio};
use crate::series::VanishingOrder;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SearchParams {
    /// `A`: largest exponent `a_i`.
    pub max_exponent: u32,
    /// `d`: correction terms `t^{a_i + 1} .. t^{a_i + d}`.
    pub max_coeff_degree: u32,
    /// Working precision of curves and of `r`.
    pub precision: u32,
    /// Cap on accepted corrections per tuple.
    pub max_steps: usize,
}

impl Default for SearchParams {
    fn default() -> Self {
        SearchParams {
            max_exponent: 3,
            max_coeff_degree: 2,
            precision: 24,
            max_steps: 12,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SearchHit {
    pub exponents: Vec<u32>,
    pub curve: FormalCurve,
    pub ratio: TypeRatio,
}

/// Tuples in `{0..=A}^n`, not all zero, whose nonzero entries have gcd 1.
pub fn exponent_tuples(n: usize, max_exponent: u32) -> Vec<Vec<u32>> {
    let mut out = Vec::new();
    let mut cur = vec![0u32; n];
    loop {
        let g = cur.iter().fold(0u32, |g, &a| g.gcd(&a));
        if g == 1 {
            out.push(cur.clone());
        }
        let mut i = 0;
        loop {
            if i == n {
                return out;
            }
            if cur[i] < max_exponent {
                cur[i] += 1;
                break;
            }
            cur[i] = 0;
            i += 1;
        }
    }
}

struct Workspace {
    r: MixedSeries,
    dz: Vec<MixedSeries>,
    dzbar: Vec<MixedSeries>,
    precision: u32,
}

#[derive(Clone, Debug, PartialEq, Eq)]
struct Score {
    order: VanishingOrder,
    lowest: usize,
}

impl Score {
    fn key(&self) -> (u32, bool, core::cmp::Reverse<usize>) {
        (self.order.value(), self.order.is_bound(), core::cmp::Reverse(self.lowest))
    }
}

impl Workspace {
    fn new(r: &HermitianForm, precision: u32) -> Self {
        let r = r.as_polynomial_to(precision).as_mixed().clone();
        let n = r.nvars();
        Workspace {
            dz: (0..n).map(|i| r.d_z(i).as_polynomial_to(precision)).collect(),
            dzbar: (0..n).map(|i| r.d_zbar(i).as_polynomial_to(precision)).collect(),
            r,
            precision,
        }
    }

    fn curve(&self, coeffs: &[Vec<GaussRat>]) -> Option<FormalCurve> {
        let c = FormalCurve::from_coefficients(coeffs.to_vec(), self.precision).ok()?;
        c.nu().ok()?;
        Some(c)
    }

    fn evaluate(&self, curve: &FormalCurve) -> Result<(MixedSeries, Score)> {
        let p = self.r.pullback(curve)?;
        let order = p.order();
        let lowest = p.lowest_terms().len();
        Ok((p, Score { order, lowest }))
    }
}

/// Solve `A x + B conj(x) = -C` over the complex numbers, when the real 2x2 system is regular.
fn solve_linearized(a: &GaussRat, b: &GaussRat, c: &GaussRat) -> Option<GaussRat> {
    let p = a + b;
    let q = &(a - b) * &GaussRat::i();
    let det: BigRational = &p.re * &q.im - &q.re * &p.im;
    if det.is_zero() {
        return None;
    }
    let (r0, r1) = (-c.re.clone(), -c.im.clone());
    let x = (&r0 * &q.im - &q.re * &r1) / &det;
    let y = (&p.re * &r1 - &p.im * &r0) / &det;
    Some(GaussRat::new(x, y))
}

fn md1(a: u32) -> Multidegree {
    Multidegree(vec![a])
}

/// Greedy search along one exponent tuple; `None` when the ansatz is constant.
pub fn search_tuple(r: &HermitianForm, exponents: &[u32], params: &SearchParams) -> Result<Option<SearchHit>> {
    let ws = Workspace::new(r, params.precision);
    search_with(&ws, exponents, params)
}

fn search_with(ws: &Workspace, exponents: &[u32], params: &SearchParams) -> Result<Option<SearchHit>> {
    let d = params.max_coeff_degree;
    let mut coeffs: Vec<Vec<GaussRat>> = exponents
        .iter()
        .map(|&a| {
            if a == 0 {
                Vec::new()
            } else {
                let mut v = vec![GaussRat::zero(); (a + d + 1) as usize];
                v[a as usize] = GaussRat::one();
                v
            }
        })
        .collect();
    let Some(mut curve) = ws.curve(&coeffs) else {
        return Ok(None);
    };
    let (mut pulled, mut score) = ws.evaluate(&curve)?;
    for _ in 0..params.max_steps {
        if score.order.is_bound() {
            break;
        }
        let da: Vec<MixedSeries> = ws.dz.iter().map(|s| s.pullback(&curve)).collect::<Result<_>>()?;
        let db: Vec<MixedSeries> = ws.dzbar.iter().map(|s| s.pullback(&curve)).collect::<Result<_>>()?;
        let targets: Vec<(u32, u32, GaussRat)> = pulled
            .lowest_terms()
            .into_iter()
            .map(|(a, b, c)| (a.0[0], b.0[0], c))
            .filter(|(a, b, _)| a >= b)
            .collect();
        let mut best: Option<(Score, Vec<Vec<GaussRat>>, FormalCurve, MixedSeries)> = None;
        for (i, &ai) in exponents.iter().enumerate() {
            if ai == 0 {
                continue;
            }
            for j in 0..=d {
                let e = ai + j;
                for (a, b, c) in targets.iter() {
                    let ca = if *a >= e { da[i].coeff(&md1(a - e), &md1(*b)) } else { GaussRat::zero() };
                    let cb = if *b >= e { db[i].coeff(&md1(*a), &md1(b - e)) } else { GaussRat::zero() };
                    let Some(delta) = solve_linearized(&ca, &cb, c) else { continue };
                    let mut trial = coeffs.clone();
                    let slot = &mut trial[i][e as usize];
                    *slot = &*slot + &delta;
                    let Some(tc) = ws.curve(&trial) else { continue };
                    let (tp, ts) = ws.evaluate(&tc)?;
                    let better = match &best {
                        None => ts.key() > score.key(),
                        Some((bs, ..)) => ts.key() > bs.key(),
                    };
                    if better {
                        best = Some((ts, trial, tc, tp));
                    }
                }
            }
        }
        match best {
            Some((s, c, cv, p)) => {
                score = s;
                coeffs = c;
                curve = cv;
                pulled = p;
            }
            None => break,
        }
    }
    let r = HermitianForm::from_mixed(ws.r.clone())?;
    let ratio = dangelo_ratio(&r, &curve)?;
    Ok(Some(SearchHit {
        exponents: exponents.to_vec(),
        curve,
        ratio,
    }))
}

/// Best ratio first; ties keep tuple order.
pub fn sort_hits(hits: &mut [SearchHit]) {
    hits.sort_by(|a, b| match b.ratio.cmp(&a.ratio) {
        Ordering::Equal => a.exponents.cmp(&b.exponents),
        o => o,
    });
}

/// All tuples, sorted by ratio. The best ratio is a lower bound for the type.
pub fn monomial_curve_search(r: &HermitianForm, params: &SearchParams) -> Result<Vec<SearchHit>> {
    let ws = Workspace::new(r, params.precision);
    let mut hits = Vec::new();
    for t in exponent_tuples(r.nvars(), params.max_exponent) {
        if let Some(h) = search_with(&ws, &t, params)? {
            hits.push(h);
        }
    }
    sort_hits(&mut hits);
    Ok(hits)
}
