//! Ideals of formal power series, decided at jet level.
//!
//! Membership in `I` is replaced by membership in `I + M^{k+1}` (with `M` the
//! maximal ideal), which is finite linear algebra over the monomials of degree
//! `<= k`.

use alloc::collections::BTreeMap;
use alloc::vec;
use alloc::vec::Vec;
use core::ops::Bound;

use num_traits::{One, Zero};

use crate::coef::GaussRat;
use crate::error::{Error, Result};
use crate::multidegree::{monomials_below, Multidegree};
use crate::series::TruncSeries;
use crate::weierstrass::WeierstrassPoly;

/// `q_j = D z_j - Q_j` for one eliminated variable `z_j`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Relation {
    /// Zero-based variable index.
    pub j: usize,
    pub q: TruncSeries,
    pub big_q: TruncSeries,
}

/// Strictly regular presentation of a prime ideal: `p` in `z_{k+1}` over `z_1..z_k`,
/// and one relation for each later variable.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NormalForm {
    k: usize,
    p: WeierstrassPoly,
    relations: Vec<Relation>,
    discriminant: TruncSeries,
}

impl NormalForm {
    /// All series except `p` live in the full `n` variables.
    pub fn new(
        n: usize,
        p: WeierstrassPoly,
        relations: Vec<Relation>,
        discriminant: TruncSeries,
    ) -> Result<Self> {
        let k = p.base_vars();
        if k + 1 > n {
            return Err(Error::InvalidNormalForm(alloc::format!(
                "polynomial in z{} does not fit {n} variables",
                k + 1
            )));
        }
        let bad = |msg: alloc::string::String| Err(Error::InvalidNormalForm(msg));
        if discriminant.nvars() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                found: discriminant.nvars(),
            });
        }
        if discriminant.is_zero() {
            return bad("discriminant is zero".into());
        }
        if (k..n).any(|i| discriminant.involves(i)) {
            return bad(alloc::format!("discriminant must depend on z1..z{k} only"));
        }
        let expected: Vec<usize> = (k + 1..n).collect();
        let got: Vec<usize> = relations.iter().map(|r| r.j).collect();
        if expected != got {
            return bad(alloc::format!(
                "relations must cover z{}..z{n} in order",
                k + 2
            ));
        }
        for r in relations.iter() {
            for s in [&r.q, &r.big_q] {
                if s.nvars() != n {
                    return Err(Error::DimensionMismatch {
                        expected: n,
                        found: s.nvars(),
                    });
                }
            }
            if (k + 1..n).any(|i| r.big_q.involves(i)) {
                return bad(alloc::format!(
                    "Q for z{} must depend on z1..z{} only",
                    r.j + 1,
                    k + 1
                ));
            }
            let zj = TruncSeries::var(n, r.j, r.q.precision());
            let expect = (&(&discriminant * &zj) - &r.big_q).as_polynomial_to(r.q.precision());
            let prec = r.q.precision().min(expect.precision());
            if r.q.jet(prec)? != expect.jet(prec)? {
                return bad(alloc::format!("q for z{} is not D z{} - Q", r.j + 1, r.j + 1));
            }
        }
        Ok(NormalForm {
            k,
            p,
            relations,
            discriminant,
        })
    }

    /// Number of base variables `k`.
    pub fn k(&self) -> usize {
        self.k
    }

    pub fn p(&self) -> &WeierstrassPoly {
        &self.p
    }

    pub fn relations(&self) -> &[Relation] {
        &self.relations
    }

    pub fn discriminant(&self) -> &TruncSeries {
        &self.discriminant
    }

    /// `p` as a series in all `n` variables.
    pub fn p_series(&self, n: usize) -> TruncSeries {
        let slots: Vec<usize> = (0..=self.k).collect();
        self.p.to_series().embed(n, &slots)
    }

    /// The stored terms taken as exact polynomials, relabelled at `precision`.
    pub fn as_polynomial_to(&self, precision: u32) -> Self {
        let coeffs = self.p.coeffs().iter().map(|b| b.as_polynomial_to(precision)).collect();
        NormalForm {
            k: self.k,
            p: WeierstrassPoly::new(self.k, coeffs, precision).expect("coefficients unchanged"),
            relations: self
                .relations
                .iter()
                .map(|r| Relation {
                    j: r.j,
                    q: r.q.as_polynomial_to(precision),
                    big_q: r.big_q.as_polynomial_to(precision),
                })
                .collect(),
            discriminant: self.discriminant.as_polynomial_to(precision),
        }
    }

    /// Generators `p, q_{k+2}, ..., q_n` of the associated ideal.
    pub fn associated_generators(&self, n: usize) -> Vec<TruncSeries> {
        let mut g = vec![self.p_series(n)];
        g.extend(self.relations.iter().map(|r| r.q.clone()));
        g
    }
}

/// Finitely many generators, all vanishing at the origin.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IdealPresentation {
    nvars: usize,
    precision: u32,
    generators: Vec<TruncSeries>,
    normal_form: Option<NormalForm>,
}

impl IdealPresentation {
    /// Zero generators are dropped; a unit generator is an error.
    pub fn new(nvars: usize, generators: Vec<TruncSeries>, precision: u32) -> Result<Self> {
        let mut kept = Vec::new();
        for (i, g) in generators.into_iter().enumerate() {
            if g.nvars() != nvars {
                return Err(Error::DimensionMismatch {
                    expected: nvars,
                    found: g.nvars(),
                });
            }
            if g.precision() < precision {
                return Err(Error::InsufficientPrecision {
                    needed: precision,
                    available: g.precision(),
                });
            }
            if !g.constant_term().is_zero() {
                return Err(Error::ImproperIdeal(i));
            }
            if !g.is_zero() {
                kept.push(g.jet(precision)?);
            }
        }
        Ok(IdealPresentation {
            nvars,
            precision,
            generators: kept,
            normal_form: None,
        })
    }

    /// `M^d`, generated by all monomials of degree `d`.
    pub fn maximal_power(nvars: usize, d: u32, precision: u32) -> Self {
        let gens = Multidegree::all_of_degree(nvars, d)
            .into_iter()
            .map(|m| TruncSeries::monomial(m, GaussRat::one(), precision))
            .collect();
        IdealPresentation::new(nvars, gens, precision).expect("monomials vanish at 0")
    }

    /// Generators (and normal form) taken as exact polynomials, relabelled at `precision`.
    pub fn as_polynomial_to(&self, precision: u32) -> Self {
        IdealPresentation {
            nvars: self.nvars,
            precision,
            generators: self.generators.iter().map(|g| g.as_polynomial_to(precision)).collect(),
            normal_form: self.normal_form.as_ref().map(|nf| nf.as_polynomial_to(precision)),
        }
    }

    pub fn with_normal_form(mut self, nf: NormalForm) -> Self {
        self.normal_form = Some(nf);
        self
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn precision(&self) -> u32 {
        self.precision
    }

    pub fn generators(&self) -> &[TruncSeries] {
        &self.generators
    }

    pub fn normal_form(&self) -> Option<&NormalForm> {
        self.normal_form.as_ref()
    }

    /// Pairwise products of generators.
    pub fn product(&self, other: &IdealPresentation) -> Result<IdealPresentation> {
        let mut gens = Vec::new();
        for a in self.generators.iter() {
            for b in other.generators.iter() {
                gens.push(a.checked_mul(b)?);
            }
        }
        IdealPresentation::new(self.nvars, gens, self.precision.min(other.precision))
    }
}

type Combo = BTreeMap<(usize, Multidegree), GaussRat>;

struct Row {
    terms: BTreeMap<Multidegree, GaussRat>,
    combo: Combo,
}

/// Row echelon form of `{ jet_k(m g) }` with the smallest monomial as pivot.
pub struct Echelon {
    nvars: usize,
    level: u32,
    track: bool,
    pivots: BTreeMap<Multidegree, Row>,
}

fn axpy<K: Ord + Clone>(dst: &mut BTreeMap<K, GaussRat>, c: &GaussRat, src: &BTreeMap<K, GaussRat>) {
    for (k, v) in src.iter() {
        let add = c * v;
        match dst.get_mut(k) {
            Some(x) => {
                *x = &*x + &add;
                if x.is_zero() {
                    dst.remove(k);
                }
            }
            None => {
                if !add.is_zero() {
                    dst.insert(k.clone(), add);
                }
            }
        }
    }
}

impl Echelon {
    /// Rows `jet_k(m g)` for every generator `g` and monomial `m` with `|m| + ord(g) <= k`.
    pub fn build(ideal: &IdealPresentation, k: u32, track: bool) -> Result<Self> {
        if k > ideal.precision {
            return Err(Error::InsufficientPrecision {
                needed: k,
                available: ideal.precision,
            });
        }
        let mut e = Echelon {
            nvars: ideal.nvars,
            level: k,
            track,
            pivots: BTreeMap::new(),
        };
        let mut work: Vec<(u32, usize, Multidegree)> = Vec::new();
        for (i, g) in ideal.generators.iter().enumerate() {
            let Some(o) = g.order().exact() else { continue };
            if o > k {
                continue;
            }
            for m in Multidegree::all_up_to(ideal.nvars, k - o) {
                work.push((m.total() + o, i, m));
            }
        }
        work.sort();
        for (_, i, m) in work {
            let g = &ideal.generators[i];
            let terms: BTreeMap<Multidegree, GaussRat> = g
                .terms()
                .filter(|(j, _)| j.total() + m.total() <= k)
                .map(|(j, c)| (j.add(&m), c.clone()))
                .collect();
            let mut combo = Combo::new();
            if track {
                combo.insert((i, m), GaussRat::one());
            }
            e.insert(Row { terms, combo });
        }
        Ok(e)
    }

    fn insert(&mut self, mut row: Row) {
        while let Some((lead, c)) = row.terms.iter().next().map(|(k, v)| (k.clone(), v.clone())) {
            match self.pivots.get(&lead) {
                Some(p) => {
                    let f = -c;
                    axpy(&mut row.terms, &f, &p.terms);
                    if self.track {
                        axpy(&mut row.combo, &f, &p.combo);
                    }
                }
                None => {
                    let inv = c.inv().expect("nonzero lead");
                    for v in row.terms.values_mut() {
                        *v = &*v * &inv;
                    }
                    for v in row.combo.values_mut() {
                        *v = &*v * &inv;
                    }
                    self.pivots.insert(lead, row);
                    return;
                }
            }
        }
    }

    pub fn level(&self) -> u32 {
        self.level
    }

    pub fn rank(&self) -> usize {
        self.pivots.len()
    }

    /// Number of pivots of total degree `<= d`.
    pub fn rank_up_to(&self, d: u32) -> usize {
        self.pivots.keys().take_while(|m| m.total() <= d).count()
    }

    /// Reduce `jet_k(f)` completely; returns the residue and the combination used.
    fn reduce(&self, f: &TruncSeries) -> (BTreeMap<Multidegree, GaussRat>, Combo) {
        let mut terms: BTreeMap<Multidegree, GaussRat> = f
            .terms()
            .filter(|(j, _)| j.total() <= self.level)
            .map(|(j, c)| (j.clone(), c.clone()))
            .collect();
        let mut combo = Combo::new();
        let mut cursor: Option<Multidegree> = None;
        loop {
            let lower = match &cursor {
                Some(c) => Bound::Excluded(c.clone()),
                None => Bound::Unbounded,
            };
            let next = terms
                .range((lower, Bound::Unbounded))
                .find(|(k, _)| self.pivots.contains_key(*k))
                .map(|(k, v)| (k.clone(), v.clone()));
            let Some((k, c)) = next else { break };
            let p = &self.pivots[&k];
            let f = -c.clone();
            axpy(&mut terms, &f, &p.terms);
            if self.track {
                axpy(&mut combo, &c, &p.combo);
            }
            cursor = Some(k);
        }
        (terms, combo)
    }

    /// Decide `f` in `I + M^{k+1}`.
    pub fn membership(&self, f: &TruncSeries, ideal: &IdealPresentation) -> Membership {
        let (residue, combo) = self.reduce(f);
        if residue.is_empty() {
            let mut cof: Vec<TruncSeries> =
                vec![TruncSeries::zero(self.nvars, self.level); ideal.generators.len()];
            for ((i, m), c) in combo {
                cof[i].add_term(m, c);
            }
            Membership::Member { cofactors: cof }
        } else {
            Membership::NotMember {
                residue: TruncSeries::from_terms(self.nvars, self.level, residue)
                    .expect("dimensions agree"),
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Membership {
    /// `f - sum cofactors[i] g_i` lies in `M^{k+1}`; cofactors are empty unless tracked.
    Member { cofactors: Vec<TruncSeries> },
    /// Normal form of `f` modulo the echelon, nonzero.
    NotMember { residue: TruncSeries },
}

impl Membership {
    pub fn is_member(&self) -> bool {
        matches!(self, Membership::Member { .. })
    }
}

/// Whether `f - sum c_i g_i` vanishes up to degree `k`, by direct expansion.
pub fn verify_combination(
    f: &TruncSeries,
    ideal: &IdealPresentation,
    cofactors: &[TruncSeries],
    k: u32,
) -> Result<bool> {
    if cofactors.len() != ideal.generators.len() {
        return Ok(false);
    }
    let mut acc = f.as_polynomial_to(k).jet(k)?;
    for (c, g) in cofactors.iter().zip(ideal.generators.iter()) {
        let prod = c.as_polynomial_to(k).checked_mul(&g.as_polynomial_to(k))?;
        acc = acc.checked_sub(&prod)?;
    }
    Ok(acc.is_zero())
}

fn check_level(f: &TruncSeries, ideal: &IdealPresentation, k: u32) -> Result<()> {
    let avail = f.precision().min(ideal.precision);
    if k > avail {
        return Err(Error::InsufficientPrecision {
            needed: k,
            available: avail,
        });
    }
    if f.nvars() != ideal.nvars {
        return Err(Error::DimensionMismatch {
            expected: ideal.nvars,
            found: f.nvars(),
        });
    }
    Ok(())
}

/// Decide `f` in `I + M^{k+1}`, with the cofactors on success.
pub fn membership_jet(f: &TruncSeries, ideal: &IdealPresentation, k: u32) -> Result<Membership> {
    check_level(f, ideal, k)?;
    Ok(Echelon::build(ideal, k, true)?.membership(f, ideal))
}

/// `z_j^exponent` in `I + M^{level+1}` with the exhibited cofactors.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PowerCertificate {
    pub variable: usize,
    pub exponent: u32,
    pub level: u32,
    pub cofactors: Vec<TruncSeries>,
}

impl PowerCertificate {
    /// Re-check by expanding `z_j^e - sum c_i g_i`.
    pub fn verify(&self, ideal: &IdealPresentation) -> Result<bool> {
        let mut e = vec![0; ideal.nvars];
        e[self.variable] = self.exponent;
        let f = TruncSeries::monomial(Multidegree(e), GaussRat::one(), self.level);
        verify_combination(&f, ideal, &self.cofactors, self.level)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum CodimVerdict {
    /// `D(I) = value`; dimensions stabilized from `level` on.
    Finite {
        value: usize,
        level: u32,
        certificates: Vec<PowerCertificate>,
    },
    /// Only `D(I) >= lower_bound` is known.
    Unresolved { lower_bound: usize },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CodimReport {
    /// `dims[k-1] = dim O / (I + M^k)` for `k = 1..=bound`.
    pub dims: Vec<usize>,
    pub verdict: CodimVerdict,
}

impl CodimReport {
    pub fn finite_value(&self) -> Option<usize> {
        match self.verdict {
            CodimVerdict::Finite { value, .. } => Some(value),
            CodimVerdict::Unresolved { .. } => None,
        }
    }

    pub fn level(&self) -> Option<u32> {
        match self.verdict {
            CodimVerdict::Finite { level, .. } => Some(level),
            CodimVerdict::Unresolved { .. } => None,
        }
    }
}

/// `dim O / (I + M^k)` for `k <= bound`, and a finiteness verdict.
///
/// Finite requires two equal consecutive dimensions and, for every variable,
/// a verified membership `z_j^l` in `I + M^{L+1}`. The exponent is `D(I)` when
/// the precision allows and the stabilization level otherwise.
pub fn codimension(ideal: &IdealPresentation, bound: u32) -> Result<CodimReport> {
    if bound > ideal.precision {
        return Err(Error::InsufficientPrecision {
            needed: bound,
            available: ideal.precision,
        });
    }
    for (i, g) in ideal.generators.iter().enumerate() {
        if !g.constant_term().is_zero() {
            return Err(Error::ImproperIdeal(i));
        }
    }
    let n = ideal.nvars;
    let ech = Echelon::build(ideal, bound, false)?;
    let dims: Vec<usize> = (1..=bound)
        .map(|k| monomials_below(n, k) - ech.rank_up_to(k - 1))
        .collect();
    let stable = (1..bound).find(|&k| dims[k as usize - 1] == dims[k as usize]);
    let Some(level) = stable else {
        return Ok(CodimReport {
            verdict: CodimVerdict::Unresolved {
                lower_bound: dims.last().copied().unwrap_or(0),
            },
            dims,
        });
    };
    let value = dims[level as usize - 1];
    let exponent = if value as u32 <= ideal.precision {
        value as u32
    } else {
        level
    };
    let cert_level = exponent.max(bound).min(ideal.precision);
    let cert_ech = Echelon::build(ideal, cert_level, true)?;
    let mut certificates = Vec::new();
    for j in 0..n {
        let mut e = vec![0; n];
        e[j] = exponent;
        let f = TruncSeries::monomial(Multidegree(e), GaussRat::one(), cert_level);
        match cert_ech.membership(&f, ideal) {
            Membership::Member { cofactors } => certificates.push(PowerCertificate {
                variable: j,
                exponent,
                level: cert_level,
                cofactors,
            }),
            Membership::NotMember { .. } => {
                return Ok(CodimReport {
                    verdict: CodimVerdict::Unresolved {
                        lower_bound: dims.last().copied().unwrap_or(0),
                    },
                    dims,
                })
            }
        }
    }
    Ok(CodimReport {
        dims,
        verdict: CodimVerdict::Finite {
            value,
            level,
            certificates,
        },
    })
}

/// Every monomial of degree `l` lies in `I + M^{k+1}`.
pub fn max_power_subset(ideal: &IdealPresentation, l: u32, k: u32) -> Result<bool> {
    if l >= k {
        return Err(Error::InvalidArgument(alloc::format!(
            "power {l} must be below the level {k}"
        )));
    }
    let ech = Echelon::build(ideal, k, false)?;
    Ok(Multidegree::all_of_degree(ideal.nvars, l).into_iter().all(|m| {
        let f = TruncSeries::monomial(m, GaussRat::one(), k);
        ech.membership(&f, ideal).is_member()
    }))
}

/// Smallest `p <= maxpow` with `f^p` in `I + M^{k+1}`, with its cofactors.
pub fn radical_membership(
    f: &TruncSeries,
    ideal: &IdealPresentation,
    maxpow: u32,
    k: u32,
) -> Result<Option<(u32, Vec<TruncSeries>)>> {
    check_level(f, ideal, k)?;
    if let Some(o) = f.order().exact() {
        let needed = maxpow.saturating_mul(o);
        if needed > k {
            return Err(Error::InsufficientPrecision {
                needed,
                available: k,
            });
        }
    }
    let ech = Echelon::build(ideal, k, true)?;
    let f = f.jet(k)?;
    let mut fp = TruncSeries::constant(ideal.nvars, GaussRat::one(), k);
    for p in 1..=maxpow {
        fp = fp.checked_mul(&f)?;
        if let Membership::Member { cofactors } = ech.membership(&fp, ideal) {
            return Ok(Some((p, cofactors)));
        }
    }
    Ok(None)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IntersectionReport {
    pub first: CodimReport,
    pub second: CodimReport,
    /// Report for the product ideal, which sits inside the intersection.
    pub product: CodimReport,
    /// When both are finite: `(l, M^l` in both ideals up to the bound`)`.
    pub common_power: Option<(u32, bool)>,
}

impl IntersectionReport {
    /// Both finite implies a verified common power of `M`.
    pub fn consistent(&self) -> bool {
        match (self.first.level(), self.second.level()) {
            (Some(_), Some(_)) => matches!(self.common_power, Some((_, true))),
            _ => true,
        }
    }
}

pub fn intersection_diagnostic(
    a: &IdealPresentation,
    b: &IdealPresentation,
    bound: u32,
) -> Result<IntersectionReport> {
    let first = codimension(a, bound)?;
    let second = codimension(b, bound)?;
    let prod = a.product(b)?;
    let product = codimension(&prod, bound)?;
    let common_power = match (first.level(), second.level()) {
        (Some(k1), Some(k2)) => {
            let l = k1.max(k2);
            let ok = l < bound && max_power_subset(a, l, bound)? && max_power_subset(b, l, bound)?;
            Some((l, ok))
        }
        _ => None,
    };
    Ok(IntersectionReport {
        first,
        second,
        product,
        common_power,
    })
}
