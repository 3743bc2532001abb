//! Unitary blocks matching jet vectors, the ideal `(h, f - Ug, U* f - g)`, and
//! the jet-level equivalence chain.

use alloc::vec;
use alloc::vec::Vec;

use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::coef::GaussRat;
use crate::curve::FormalCurve;
use crate::error::{Error, Result};
use crate::hermitian::Decomposition;
use crate::ideal::IdealPresentation;
use crate::series::TruncSeries;

/// Tolerance for floating blocks: residual and unitarity defect.
pub const UNITARY_TOLERANCE: f64 = 1e-10;

/// A `k x k` unitary block, extended by the identity.
#[derive(Clone, Debug, PartialEq)]
pub enum UnitaryBlock {
    Exact(Vec<Vec<GaussRat>>),
    /// `residual = max_m |U G_m - F_m|`, `defect = |U U* - I|` (Frobenius).
    Floating {
        entries: Vec<Vec<Complex64>>,
        residual: f64,
        defect: f64,
    },
}

/// `<x, y> = sum x_i conj(y_i)`.
pub fn inner(x: &[GaussRat], y: &[GaussRat]) -> GaussRat {
    x.iter()
        .zip(y.iter())
        .fold(GaussRat::zero(), |acc, (a, b)| acc + (a * &b.conj()))
}

fn inner_c(x: &[Complex64], y: &[Complex64]) -> Complex64 {
    x.iter().zip(y.iter()).map(|(a, b)| a * b.conj()).sum()
}

fn norm_c(x: &[Complex64]) -> f64 {
    inner_c(x, x).re.max(0.0).sqrt()
}

fn to_c(x: &[GaussRat]) -> Vec<Complex64> {
    x.iter().map(GaussRat::to_c64).collect()
}

fn rational_sqrt(q: &BigRational) -> Option<BigRational> {
    if q.is_negative() {
        return None;
    }
    let (n, d) = (q.numer(), q.denom());
    let (sn, sd) = (n.sqrt(), d.sqrt());
    (&sn * &sn == *n && &sd * &sd == *d).then(|| BigRational::new(sn, sd))
}

fn mat_vec(m: &[Vec<GaussRat>], x: &[GaussRat]) -> Vec<GaussRat> {
    m.iter().map(|row| row.iter().zip(x).fold(GaussRat::zero(), |a, (u, v)| a + (u * v))).collect()
}

fn mat_mul(a: &[Vec<GaussRat>], b: &[Vec<GaussRat>]) -> Vec<Vec<GaussRat>> {
    let n = b.first().map_or(0, Vec::len);
    a.iter()
        .map(|row| {
            (0..n)
                .map(|j| {
                    row.iter()
                        .zip(b.iter())
                        .fold(GaussRat::zero(), |acc, (x, brow)| acc + (x * &brow[j]))
                })
                .collect()
        })
        .collect()
}

fn identity(k: usize) -> Vec<Vec<GaussRat>> {
    (0..k)
        .map(|i| (0..k).map(|j| if i == j { GaussRat::one() } else { GaussRat::zero() }).collect())
        .collect()
}

fn adjoint_exact(m: &[Vec<GaussRat>]) -> Vec<Vec<GaussRat>> {
    let k = m.len();
    (0..k).map(|i| (0..k).map(|j| m[j][i].conj()).collect()).collect()
}

/// `I - c v v*` with `c` a scalar.
fn rank_one_update(v: &[GaussRat], c: &GaussRat) -> Vec<Vec<GaussRat>> {
    let k = v.len();
    let mut m = identity(k);
    for i in 0..k {
        for j in 0..k {
            m[i][j] = &m[i][j] - &(c * &(&v[i] * &v[j].conj()));
        }
    }
    m
}

fn frobenius_defect(m: &[Vec<Complex64>]) -> f64 {
    let k = m.len();
    let mut acc = 0.0;
    for i in 0..k {
        for j in 0..k {
            let s: Complex64 = (0..k).map(|l| m[i][l] * m[j][l].conj()).sum();
            let d = s - if i == j { Complex64::new(1.0, 0.0) } else { Complex64::new(0.0, 0.0) };
            acc += d.norm_sqr();
        }
    }
    acc.sqrt()
}

impl UnitaryBlock {
    pub fn identity(k: usize) -> Self {
        UnitaryBlock::Exact(identity(k))
    }

    /// Exact block; rejected unless `U U* = I` exactly.
    pub fn from_exact(rows: Vec<Vec<GaussRat>>) -> Result<Self> {
        let k = rows.len();
        if let Some(r) = rows.iter().find(|r| r.len() != k) {
            return Err(Error::DimensionMismatch {
                expected: k,
                found: r.len(),
            });
        }
        if mat_mul(&rows, &adjoint_exact(&rows)) != identity(k) {
            return Err(Error::InvalidArgument("block is not unitary".into()));
        }
        Ok(UnitaryBlock::Exact(rows))
    }

    /// Floating block; the defect is measured, the residual recorded as given.
    pub fn from_floating(entries: Vec<Vec<Complex64>>, residual: f64) -> Result<Self> {
        let k = entries.len();
        if let Some(r) = entries.iter().find(|r| r.len() != k) {
            return Err(Error::DimensionMismatch {
                expected: k,
                found: r.len(),
            });
        }
        let defect = frobenius_defect(&entries);
        Ok(UnitaryBlock::Floating {
            entries,
            residual,
            defect,
        })
    }

    pub fn size(&self) -> usize {
        match self {
            UnitaryBlock::Exact(m) => m.len(),
            UnitaryBlock::Floating { entries, .. } => entries.len(),
        }
    }

    pub fn is_exact(&self) -> bool {
        matches!(self, UnitaryBlock::Exact(_))
    }

    pub fn exact_rows(&self) -> Option<&[Vec<GaussRat>]> {
        match self {
            UnitaryBlock::Exact(m) => Some(m),
            UnitaryBlock::Floating { .. } => None,
        }
    }

    pub fn entry(&self, i: usize, j: usize) -> Complex64 {
        match self {
            UnitaryBlock::Exact(m) => m[i][j].to_c64(),
            UnitaryBlock::Floating { entries, .. } => entries[i][j],
        }
    }

    /// `|U U* - I|`; zero for exact blocks.
    pub fn defect(&self) -> f64 {
        match self {
            UnitaryBlock::Exact(_) => 0.0,
            UnitaryBlock::Floating { defect, .. } => *defect,
        }
    }

    pub fn adjoint(&self) -> Self {
        match self {
            UnitaryBlock::Exact(m) => UnitaryBlock::Exact(adjoint_exact(m)),
            UnitaryBlock::Floating {
                entries,
                residual,
                defect,
            } => {
                let k = entries.len();
                UnitaryBlock::Floating {
                    entries: (0..k).map(|i| (0..k).map(|j| entries[j][i].conj()).collect()).collect(),
                    residual: *residual,
                    defect: *defect,
                }
            }
        }
    }

    /// `U x` exactly; `None` for floating blocks. Coordinates past the block pass through.
    pub fn apply_exact(&self, x: &[GaussRat]) -> Option<Vec<GaussRat>> {
        let m = self.exact_rows()?;
        let k = m.len().min(x.len());
        let mut out = x.to_vec();
        for (i, row) in m.iter().enumerate().take(k) {
            out[i] = row.iter().zip(x).fold(GaussRat::zero(), |a, (u, v)| a + (u * v));
        }
        Some(out)
    }

    pub fn apply(&self, x: &[Complex64]) -> Vec<Complex64> {
        let k = self.size().min(x.len());
        let mut out = x.to_vec();
        for (i, o) in out.iter_mut().enumerate().take(k) {
            *o = (0..k).map(|j| self.entry(i, j) * x[j]).sum();
        }
        out
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum MatchOutcome {
    Matched(UnitaryBlock),
    /// `<F_m, F_l> = f_value` but `<G_m, G_l> = g_value`.
    NoMatch {
        m: usize,
        l: usize,
        f_value: GaussRat,
        g_value: GaussRat,
    },
}

/// First `(m, l)`, `m <= l`, where the Gram matrices of `f` and `g` differ.
pub fn gram_discrepancy(f: &[Vec<GaussRat>], g: &[Vec<GaussRat>]) -> Option<(usize, usize, GaussRat, GaussRat)> {
    for m in 0..f.len() {
        for l in m..f.len() {
            let a = inner(&f[m], &f[l]);
            let b = inner(&g[m], &g[l]);
            if a != b {
                return Some((m, l, a, b));
            }
        }
    }
    None
}

/// Find `U` with `U G_m = F_m` for every `m`, given equal Gram matrices.
pub fn match_unitary(f: &[Vec<GaussRat>], g: &[Vec<GaussRat>]) -> Result<MatchOutcome> {
    if f.len() != g.len() {
        return Err(Error::DimensionMismatch {
            expected: f.len(),
            found: g.len(),
        });
    }
    let k = f.first().map_or(0, Vec::len);
    for v in f.iter().chain(g.iter()) {
        if v.len() != k {
            return Err(Error::DimensionMismatch {
                expected: k,
                found: v.len(),
            });
        }
    }
    if let Some((m, l, f_value, g_value)) = gram_discrepancy(f, g) {
        return Ok(MatchOutcome::NoMatch {
            m,
            l,
            f_value,
            g_value,
        });
    }
    // orthogonal bases v_b of span(G) and w_b of span(F) built with the same combinations
    let mut basis: Vec<(Vec<GaussRat>, Vec<GaussRat>, BigRational)> = Vec::new();
    for (gm, fm) in g.iter().zip(f.iter()) {
        let mut v = gm.clone();
        let mut w = fm.clone();
        for (bv, bw, n2) in basis.iter() {
            let c = &inner(gm, bv) * &GaussRat::real(n2.recip());
            for i in 0..k {
                v[i] = &v[i] - &(&c * &bv[i]);
                w[i] = &w[i] - &(&c * &bw[i]);
            }
        }
        let n2 = inner(&v, &v).re;
        if !n2.is_zero() {
            basis.push((v, w, n2));
        }
    }
    if let Some(u) = exact_map(&basis, k) {
        if f.iter().zip(g.iter()).all(|(fm, gm)| mat_vec(&u, gm) == *fm) {
            return Ok(MatchOutcome::Matched(UnitaryBlock::Exact(u)));
        }
    }
    Ok(MatchOutcome::Matched(floating_map(&basis, k, f, g)))
}

/// Compose reflections and phase maps sending each `v_b` to `w_b`.
fn exact_map(basis: &[(Vec<GaussRat>, Vec<GaussRat>, BigRational)], k: usize) -> Option<Vec<Vec<GaussRat>>> {
    let mut u = identity(k);
    for (v, w, n2) in basis {
        let mut x = mat_vec(&u, v);
        if x == *w {
            continue;
        }
        let s = inner(w, &x);
        if !s.is_real() {
            let s2 = s.norm_sqr();
            let abs = if s2 == n2 * n2 {
                n2.clone()
            } else {
                rational_sqrt(&s2)?
            };
            // x -> lambda x with lambda s real and positive
            let lambda = &s * &GaussRat::real(abs.recip());
            let c = &(&GaussRat::one() - &lambda) * &GaussRat::real(n2.recip());
            let p = rank_one_update(&x, &c);
            u = mat_mul(&p, &u);
            x = mat_vec(&u, v);
            if x == *w {
                continue;
            }
        }
        let d: Vec<GaussRat> = x.iter().zip(w).map(|(a, b)| a - b).collect();
        let dn = inner(&d, &d).re;
        let c = GaussRat::real(BigRational::from_integer(BigInt::from(2)) / dn);
        let h = rank_one_update(&d, &c);
        u = mat_mul(&h, &u);
    }
    Some(u)
}

fn orthonormal_completion(vs: Vec<Vec<Complex64>>, k: usize) -> Vec<Vec<Complex64>> {
    let mut out: Vec<Vec<Complex64>> = Vec::new();
    let candidates = vs.into_iter().chain((0..k).map(|i| {
        let mut e = vec![Complex64::new(0.0, 0.0); k];
        e[i] = Complex64::new(1.0, 0.0);
        e
    }));
    for mut v in candidates {
        for _ in 0..2 {
            for b in out.iter() {
                let c = inner_c(&v, b);
                for i in 0..k {
                    v[i] -= c * b[i];
                }
            }
        }
        let n = norm_c(&v);
        if n > 1e-8 && out.len() < k {
            out.push(v.into_iter().map(|x| x / n).collect());
        }
    }
    out
}

fn floating_map(
    basis: &[(Vec<GaussRat>, Vec<GaussRat>, BigRational)],
    k: usize,
    f: &[Vec<GaussRat>],
    g: &[Vec<GaussRat>],
) -> UnitaryBlock {
    let es = orthonormal_completion(basis.iter().map(|(v, _, _)| to_c(v)).collect(), k);
    let fs = orthonormal_completion(basis.iter().map(|(_, w, _)| to_c(w)).collect(), k);
    let mut entries = vec![vec![Complex64::new(0.0, 0.0); k]; k];
    for (e, fv) in es.iter().zip(fs.iter()) {
        for i in 0..k {
            for j in 0..k {
                entries[i][j] += fv[i] * e[j].conj();
            }
        }
    }
    let residual = f
        .iter()
        .zip(g.iter())
        .map(|(fm, gm)| {
            let ug: Vec<Complex64> = (0..k)
                .map(|i| (0..k).map(|j| entries[i][j] * gm[j].to_c64()).sum())
                .collect();
            let d: Vec<Complex64> = ug.iter().zip(fm).map(|(a, b)| a - b.to_c64()).collect();
            norm_c(&d)
        })
        .fold(0.0, f64::max);
    UnitaryBlock::from_floating(entries, residual).expect("square")
}

/// `F_m[J]`, `G_m[J]`: coefficient of `t^m` in `zeta* f_J`, `zeta* g_J`, for `m = 0..=k`.
pub fn jet_vectors(
    d: &Decomposition,
    zeta: &FormalCurve,
    k: u32,
) -> Result<(Vec<Vec<GaussRat>>, Vec<Vec<GaussRat>>)> {
    let fam = d.num_families();
    let mut fv = vec![vec![GaussRat::zero(); fam]; k as usize + 1];
    let mut gv = fv.clone();
    for (idx, ((_, f), (_, g))) in d.fs().iter().zip(d.gs().iter()).enumerate() {
        for (s, out) in [(f, &mut fv), (g, &mut gv)] {
            let p = zeta.pullback(s)?;
            if p.precision() < k {
                return Err(Error::InsufficientPrecision {
                    needed: k,
                    available: p.precision(),
                });
            }
            for (m, row) in out.iter_mut().enumerate() {
                row[idx] = p.coeff(m);
            }
        }
    }
    Ok((fv, gv))
}

/// Generators `h`, `f - U g` and `U* f - g` (zero ones dropped).
pub fn build_ideal(d: &Decomposition, u: &UnitaryBlock) -> Result<IdealPresentation> {
    let rows = u.exact_rows().ok_or(Error::InexactBlock)?;
    let fam = d.num_families();
    let size = rows.len();
    if size < fam {
        return Err(Error::BlockTooSmall { needed: fam, size });
    }
    let n = d.nvars();
    let prec = d.precision();
    let zero = TruncSeries::zero(n, prec);
    let pad = |v: &[(crate::multidegree::Multidegree, TruncSeries)]| -> Vec<TruncSeries> {
        let mut out: Vec<TruncSeries> = v.iter().map(|(_, s)| s.clone()).collect();
        out.resize(size, zero.clone());
        out
    };
    let fs = pad(d.fs());
    let gs = pad(d.gs());
    let mut gens = vec![d.h().clone()];
    for i in 0..size {
        let mut a = fs[i].clone();
        let mut b = gs[i].scale(&GaussRat::from_int(-1));
        for j in 0..size {
            if !rows[i][j].is_zero() {
                a = a.checked_sub(&gs[j].scale(&rows[i][j]))?;
            }
            if !rows[j][i].is_zero() {
                b = b.checked_add(&fs[j].scale(&rows[j][i].conj()))?;
            }
        }
        gens.push(a);
        gens.push(b);
    }
    IdealPresentation::new(n, gens, prec)
}

#[derive(Clone, Debug, PartialEq)]
pub struct EquivalenceReport {
    pub level: u32,
    /// `jet_N(zeta* h) = 0`.
    pub h_vanishes: bool,
    /// `<F_m, F_l> = <U G_m, U G_l>` for `m + l <= N`.
    pub forward: bool,
    /// `<G_m, G_l> = <U* F_m, U* F_l>` for `m + l <= N`.
    pub backward: bool,
    pub unitary: bool,
}

impl EquivalenceReport {
    pub fn holds(&self) -> bool {
        self.h_vanishes && self.forward && self.backward && self.unitary
    }
}

fn gram_agrees(a: &[Vec<GaussRat>], b: &[Vec<GaussRat>], n: usize) -> bool {
    (0..a.len()).all(|m| (m..a.len()).filter(|l| m + l <= n).all(|l| inner(&a[m], &a[l]) == inner(&b[m], &b[l])))
}

fn gram_agrees_c(a: &[Vec<GaussRat>], b: &[Vec<Complex64>], n: usize) -> bool {
    (0..a.len()).all(|m| {
        (m..a.len()).filter(|l| m + l <= n).all(|l| {
            (inner(&a[m], &a[l]).to_c64() - inner_c(&b[m], &b[l])).norm() <= UNITARY_TOLERANCE
        })
    })
}

/// The chain `zeta* h = 0`, `|j(zeta* f)| = |j(U zeta* g)|`, and the reverse via `U*`, at jet level `n`.
pub fn equivalence_check(
    d: &Decomposition,
    u: &UnitaryBlock,
    zeta: &FormalCurve,
    n: u32,
) -> Result<EquivalenceReport> {
    let fam = d.num_families();
    if u.size() < fam {
        return Err(Error::BlockTooSmall {
            needed: fam,
            size: u.size(),
        });
    }
    let ph = zeta.pullback(d.h())?;
    if ph.precision() < n {
        return Err(Error::InsufficientPrecision {
            needed: n,
            available: ph.precision(),
        });
    }
    let h_vanishes = ph.jet(n)?.is_zero();
    let (mut fv, mut gv) = jet_vectors(d, zeta, n)?;
    for v in fv.iter_mut().chain(gv.iter_mut()) {
        v.resize(u.size(), GaussRat::zero());
    }
    let adj = u.adjoint();
    let (forward, backward) = match u {
        UnitaryBlock::Exact(_) => {
            let ug: Vec<_> = gv.iter().map(|x| u.apply_exact(x).expect("exact")).collect();
            let uf: Vec<_> = fv.iter().map(|x| adj.apply_exact(x).expect("exact")).collect();
            (gram_agrees(&fv, &ug, n as usize), gram_agrees(&gv, &uf, n as usize))
        }
        UnitaryBlock::Floating { .. } => {
            let ug: Vec<_> = gv.iter().map(|x| u.apply(&to_c(x))).collect();
            let uf: Vec<_> = fv.iter().map(|x| adj.apply(&to_c(x))).collect();
            (gram_agrees_c(&fv, &ug, n as usize), gram_agrees_c(&gv, &uf, n as usize))
        }
    };
    Ok(EquivalenceReport {
        level: n,
        h_vanishes,
        forward,
        backward,
        unitary: u.defect() <= UNITARY_TOLERANCE,
    })
}
