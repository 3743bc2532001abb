//! Text formats: series, Hermitian forms, curves, ideals and unitary blocks.
//!
//! Every printer produces text its parser reads back to an equal value.

use std::fmt::Write;

use germforge_core::ideal::{IdealPresentation, NormalForm, Relation};
use germforge_core::weierstrass::WeierstrassPoly;
use germforge_core::{Decomposition, FormalCurve, GaussRat, HermitianForm, Multidegree, TruncSeries, UniSeries};
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, Zero};

use crate::parse::{ParseError, ParseResult, Parser, Pos, Term, Vars};

fn rational(q: &BigRational) -> String {
    if q.is_integer() {
        q.numer().to_string()
    } else {
        format!("{}/{}", q.numer(), q.denom())
    }
}

/// A coefficient that reads back on its own, sign included.
pub fn coefficient(c: &GaussRat) -> String {
    if c.im.is_zero() {
        rational(&c.re)
    } else if c.re.is_zero() {
        format!("({}i)", rational(&c.im))
    } else {
        let sign = if c.im.is_negative() { '-' } else { '+' };
        format!("({}{}{}i)", rational(&c.re), sign, rational(&c.im.abs()))
    }
}

/// Sign and magnitude for use inside a sum.
fn signed(c: &GaussRat) -> (char, String) {
    if c.im.is_zero() {
        (if c.re.is_negative() { '-' } else { '+' }, rational(&c.re.abs()))
    } else if c.re.is_zero() {
        (if c.im.is_negative() { '-' } else { '+' }, format!("({}i)", rational(&c.im.abs())))
    } else {
        ('+', coefficient(c))
    }
}

fn monomial(out: &mut String, name: &str, e: &[u32]) {
    for (i, &k) in e.iter().enumerate() {
        match k {
            0 => {}
            1 => write!(out, " {name}{}", i + 1).unwrap(),
            _ => write!(out, " {name}{}^{k}", i + 1).unwrap(),
        }
    }
}

fn sum<'a>(terms: impl Iterator<Item = (&'a [u32], Option<&'a [u32]>, &'a GaussRat)>) -> String {
    let mut out = String::new();
    for (z, zbar, c) in terms {
        let (s, m) = signed(c);
        if !out.is_empty() {
            out.push(' ');
        }
        write!(out, "{s} {m}").unwrap();
        monomial(&mut out, "z", z);
        if let Some(b) = zbar {
            monomial(&mut out, "zbar", b);
        }
    }
    if out.is_empty() {
        out.push('0');
    }
    out
}

/// A holomorphic series as a signed sum.
pub fn series_terms(s: &TruncSeries) -> String {
    sum(s.terms().map(|(j, c)| (j.0.as_slice(), None, c)))
}

fn uni_terms(s: &UniSeries) -> String {
    let mut out = String::new();
    for (e, c) in s.coeffs().iter().enumerate() {
        if c.is_zero() {
            continue;
        }
        let (sg, m) = signed(c);
        if !out.is_empty() {
            out.push(' ');
        }
        match e {
            0 => write!(out, "{sg} {m}"),
            1 => write!(out, "{sg} {m} t"),
            _ => write!(out, "{sg} {m} t^{e}"),
        }
        .unwrap();
    }
    if out.is_empty() {
        out.push('0');
    }
    out
}

fn degree_check(t: &Term, n: u32) -> ParseResult<()> {
    let d: u32 = t.z.iter().chain(t.zbar.iter()).sum();
    if d > n {
        return Err(ParseError::new(t.pos, format!("term of degree {d} exceeds N={n}")));
    }
    Ok(())
}

fn finish(p: &Parser) -> ParseResult<()> {
    if p.at_end() {
        Ok(())
    } else {
        p.error("unexpected trailing input")
    }
}

fn core_error<T>(pos: Pos, e: germforge_core::Error) -> ParseResult<T> {
    Err(ParseError::new(pos, e.to_string()))
}

/// `vars n; N=k;`
fn header(p: &mut Parser, keyword: &str) -> ParseResult<(usize, u32)> {
    let pos = p.pos();
    p.expect_ident(keyword)?;
    let n = p.uint()? as usize;
    if n == 0 {
        return Err(ParseError::new(pos, "need at least one variable"));
    }
    p.expect_sym(';')?;
    let prec = p.setting("N")?;
    if prec == 0 {
        return p.error("precision must be at least 1");
    }
    Ok((n, prec))
}

fn holomorphic(p: &mut Parser, n: usize, prec: u32) -> ParseResult<TruncSeries> {
    let terms = p.terms(Vars::Holomorphic(n))?;
    for t in &terms {
        degree_check(t, prec)?;
    }
    Ok(TruncSeries::from_terms(n, prec, terms.into_iter().map(|t| (Multidegree(t.z), t.coeff)))
        .expect("sizes match"))
}

/// `vars n; N=k;` followed by a sum in `z1..zn`.
pub fn parse_series(text: &str) -> ParseResult<TruncSeries> {
    let mut p = Parser::new(text)?;
    let (n, prec) = header(&mut p, "vars")?;
    let s = holomorphic(&mut p, n, prec)?;
    finish(&p)?;
    Ok(s)
}

pub fn print_series(s: &TruncSeries) -> String {
    format!("vars {}; N={};\n{}\n", s.nvars(), s.precision(), series_terms(s))
}

/// A real-valued form and the point it is centred at.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Hypersurface {
    pub form: HermitianForm,
    pub base_point: Option<Vec<GaussRat>>,
}

impl Hypersurface {
    pub fn new(form: HermitianForm) -> Self {
        Hypersurface { form, base_point: None }
    }

    /// The form with the base point moved to the origin.
    pub fn at_origin(&self) -> germforge_core::Result<HermitianForm> {
        match &self.base_point {
            Some(p) if p.iter().any(|c| !c.is_zero()) => self.form.translate(p),
            _ => Ok(self.form.clone()),
        }
    }
}

/// `vars n; N=k;`, an optional `at c1, .., cn;`, then terms in `z` and `zbar`.
pub fn parse_hermitian(text: &str) -> ParseResult<Hypersurface> {
    let mut p = Parser::new(text)?;
    let (n, prec) = header(&mut p, "vars")?;
    let mut base_point = None;
    if p.is_ident("at") {
        let pos = p.pos();
        p.expect_ident("at")?;
        let mut pt = vec![p.signed_coefficient()?];
        while p.eat_sym(',') {
            pt.push(p.signed_coefficient()?);
        }
        p.expect_sym(';')?;
        if pt.len() != n {
            return Err(ParseError::new(pos, format!("base point has {} coordinates, expected {n}", pt.len())));
        }
        base_point = Some(pt);
    }
    let terms = p.terms(Vars::Mixed(n))?;
    finish(&p)?;
    let mut first_seen = std::collections::BTreeMap::new();
    for t in &terms {
        degree_check(t, prec)?;
        first_seen.entry((t.z.clone(), t.zbar.clone())).or_insert(t.pos);
    }
    let form = HermitianForm::new(
        n,
        prec,
        terms.into_iter().map(|t| (Multidegree(t.z), Multidegree(t.zbar), t.coeff)),
    );
    match form {
        Ok(form) => Ok(Hypersurface { form, base_point }),
        Err(germforge_core::Error::NotRealValued { j, k }) => {
            let pos = first_seen
                .get(&(j.0.clone(), k.0.clone()))
                .or_else(|| first_seen.get(&(k.0.clone(), j.0.clone())))
                .copied()
                .unwrap_or_default();
            Err(ParseError::new(
                pos,
                format!("not real-valued: the coefficient of (J, K) = ({j}, {k}) has no conjugate partner"),
            ))
        }
        Err(e) => core_error(Pos::default(), e),
    }
}

pub fn print_hermitian(h: &Hypersurface) -> String {
    let r = &h.form;
    let mut out = format!("vars {}; N={};\n", r.nvars(), r.precision());
    if let Some(p) = &h.base_point {
        let pts: Vec<String> = p.iter().map(coefficient).collect();
        writeln!(out, "at {};", pts.join(", ")).unwrap();
    }
    for (j, k, c) in r.terms() {
        writeln!(out, "{}", sum(std::iter::once((j.0.as_slice(), Some(k.0.as_slice()), c)))).unwrap();
    }
    out
}

/// `curve n; N=k;` then `zi = <sum in t>` for each component, in order.
pub fn parse_curve(text: &str) -> ParseResult<FormalCurve> {
    let mut p = Parser::new(text)?;
    let (n, prec) = header(&mut p, "curve")?;
    let mut comps = Vec::with_capacity(n);
    for i in 1..=n {
        p.expect_ident(&format!("z{i}"))?;
        p.expect_sym('=')?;
        let pos = p.pos();
        let terms = p.terms(Vars::Curve)?;
        let mut coeffs: Vec<GaussRat> = Vec::new();
        for t in terms {
            let e = t.z[0] as usize;
            if e as u32 > prec {
                return Err(ParseError::new(t.pos, format!("term t^{e} exceeds N={prec}")));
            }
            if coeffs.len() <= e {
                coeffs.resize(e + 1, GaussRat::zero());
            }
            coeffs[e] = &coeffs[e] + &t.coeff;
        }
        if coeffs.first().is_some_and(|c| !c.is_zero()) {
            return Err(ParseError::new(pos, format!("component z{i} does not vanish at t = 0")));
        }
        p.eat_sym(';');
        comps.push(UniSeries::new(coeffs, prec));
    }
    finish(&p)?;
    FormalCurve::new(comps, prec).or_else(|e| core_error(Pos::default(), e))
}

pub fn print_curve(c: &FormalCurve) -> String {
    let mut out = format!("curve {}; N={};\n", c.dim(), c.precision());
    for (i, s) in c.components().iter().enumerate() {
        writeln!(out, "z{} = {}", i + 1, uni_terms(s)).unwrap();
    }
    out
}

fn statement(p: &mut Parser, n: usize, prec: u32) -> ParseResult<TruncSeries> {
    p.expect_sym('=')?;
    let s = holomorphic(p, n, prec)?;
    p.expect_sym(';')?;
    Ok(s)
}

/// `ideal n; N=k;`, `gen = <sum>;` lines, and optionally
/// `normal_form k=m;` with `p = ..;`, `q<j> = ..; Q<j> = ..;` pairs and `D = ..;`.
pub fn parse_ideal(text: &str) -> ParseResult<IdealPresentation> {
    let mut p = Parser::new(text)?;
    let (n, prec) = header(&mut p, "ideal")?;
    let mut gens = Vec::new();
    let mut gen_pos = Vec::new();
    while p.is_ident("gen") {
        gen_pos.push(p.pos());
        p.expect_ident("gen")?;
        gens.push(statement(&mut p, n, prec)?);
    }
    let nf = if p.is_ident("normal_form") {
        let pos = p.pos();
        p.expect_ident("normal_form")?;
        let k = p.setting("k")? as usize;
        if k + 1 > n {
            return Err(ParseError::new(pos, format!("k={k} leaves no distinguished variable among {n}")));
        }
        let ppos = p.pos();
        p.expect_ident("p")?;
        let ps = statement(&mut p, n, prec)?;
        let keep: Vec<usize> = (0..=k).collect();
        let poly = ps
            .select_vars(&keep)
            .and_then(|s| WeierstrassPoly::from_series(&s))
            .or_else(|e| core_error(ppos, e))?;
        let mut relations = Vec::new();
        for j in k + 1..n {
            p.expect_ident(&format!("q{}", j + 1))?;
            let q = statement(&mut p, n, prec)?;
            p.expect_ident(&format!("Q{}", j + 1))?;
            let big_q = statement(&mut p, n, prec)?;
            relations.push(Relation { j, q, big_q });
        }
        p.expect_ident("D")?;
        let d = statement(&mut p, n, prec)?;
        Some(NormalForm::new(n, poly, relations, d).or_else(|e| core_error(pos, e))?)
    } else {
        None
    };
    finish(&p)?;
    let ideal = IdealPresentation::new(n, gens, prec).or_else(|e| match e {
        germforge_core::Error::ImproperIdeal(i) => Err(ParseError::new(
            gen_pos[i],
            "generator is a unit, so the ideal is the whole ring",
        )),
        e => core_error(Pos::default(), e),
    })?;
    Ok(match nf {
        Some(nf) => ideal.with_normal_form(nf),
        None => ideal,
    })
}

pub fn print_ideal(ideal: &IdealPresentation) -> String {
    let n = ideal.nvars();
    let mut out = format!("ideal {n}; N={};\n", ideal.precision());
    for g in ideal.generators() {
        writeln!(out, "gen = {};", series_terms(g)).unwrap();
    }
    if let Some(nf) = ideal.normal_form() {
        writeln!(out, "normal_form k={};", nf.k()).unwrap();
        writeln!(out, "p = {};", series_terms(&nf.p_series(n))).unwrap();
        for r in nf.relations() {
            writeln!(out, "q{} = {};", r.j + 1, series_terms(&r.q)).unwrap();
            writeln!(out, "Q{} = {};", r.j + 1, series_terms(&r.big_q)).unwrap();
        }
        writeln!(out, "D = {};", series_terms(nf.discriminant())).unwrap();
    }
    out
}

/// `unitary k;` then `k` lines `row c1 .. ck;`; the block must be exactly unitary.
pub fn parse_unitary(text: &str) -> ParseResult<Vec<Vec<GaussRat>>> {
    let mut p = Parser::new(text)?;
    let pos = p.pos();
    p.expect_ident("unitary")?;
    let k = p.uint()? as usize;
    p.expect_sym(';')?;
    let rows = entries_block(&mut p, "row", k, k)?;
    finish(&p)?;
    germforge_core::unitary::UnitaryBlock::from_exact(rows.clone()).or_else(|e| core_error(pos, e))?;
    Ok(rows)
}

fn entries_block(p: &mut Parser, keyword: &str, count: usize, width: usize) -> ParseResult<Vec<Vec<GaussRat>>> {
    let mut rows = Vec::with_capacity(count);
    for _ in 0..count {
        rows.push(entries(p, keyword, width)?);
    }
    Ok(rows)
}

/// `keyword c1 .. ck;`
fn entries(p: &mut Parser, keyword: &str, k: usize) -> ParseResult<Vec<GaussRat>> {
    let pos = p.pos();
    p.expect_ident(keyword)?;
    let mut row = Vec::with_capacity(k);
    while !p.is_sym(';') {
        row.push(p.signed_coefficient()?);
        p.eat_sym(',');
    }
    p.expect_sym(';')?;
    if row.len() != k {
        return Err(ParseError::new(pos, format!("expected {k} entries, found {}", row.len())));
    }
    Ok(row)
}

fn print_entries(out: &mut String, keyword: &str, row: &[GaussRat]) {
    let cells: Vec<String> = row.iter().map(coefficient).collect();
    writeln!(out, "{keyword} {};", cells.join(" ")).unwrap();
}

pub fn print_unitary(rows: &[Vec<GaussRat>]) -> String {
    let mut out = format!("unitary {};\n", rows.len());
    for r in rows {
        print_entries(&mut out, "row", r);
    }
    out
}

/// Jet coefficient vectors `F_m`, `G_m`, one line each.
pub fn print_jets(f: &[Vec<GaussRat>], g: &[Vec<GaussRat>]) -> String {
    let width = f.first().map_or(0, Vec::len);
    let mut out = format!("jets {} {};\n", f.len(), width);
    for v in f {
        print_entries(&mut out, "F", v);
    }
    for v in g {
        print_entries(&mut out, "G", v);
    }
    out
}

#[allow(clippy::type_complexity)]
pub fn parse_jets(text: &str) -> ParseResult<(Vec<Vec<GaussRat>>, Vec<Vec<GaussRat>>)> {
    let mut p = Parser::new(text)?;
    p.expect_ident("jets")?;
    let m = p.uint()? as usize;
    let w = p.uint()? as usize;
    p.expect_sym(';')?;
    let f = entries_block(&mut p, "F", m, w)?;
    let g = entries_block(&mut p, "G", m, w)?;
    finish(&p)?;
    Ok((f, g))
}

fn md_text(j: &Multidegree) -> String {
    let mut s = String::new();
    monomial(&mut s, "z", &j.0);
    s.trim_start().to_string()
}

/// `vars n; N=k;`, `h = ..;` and one `a <J>, <K> = c;` line per stored coefficient.
pub fn print_decomposition(d: &Decomposition) -> String {
    let mut out = format!("vars {}; N={};\n", d.nvars(), d.precision());
    writeln!(out, "h = {};", series_terms(d.h())).unwrap();
    for (j, k, a) in d.coefficients() {
        writeln!(out, "a {}, {} = {};", md_text(j), md_text(k), coefficient(a)).unwrap();
    }
    out
}

fn single_monomial(p: &mut Parser, n: usize) -> ParseResult<Multidegree> {
    let pos = p.pos();
    let mut t = p.terms(Vars::Holomorphic(n))?;
    if t.len() != 1 || t[0].coeff != GaussRat::from_int(1) {
        return Err(ParseError::new(pos, "expected a single monomial"));
    }
    Ok(Multidegree(t.remove(0).z))
}

pub fn parse_decomposition(text: &str) -> ParseResult<Decomposition> {
    let mut p = Parser::new(text)?;
    let (n, prec) = header(&mut p, "vars")?;
    p.expect_ident("h")?;
    let h = statement(&mut p, n, prec)?;
    let mut coeffs = Vec::new();
    let pos = p.pos();
    while p.eat_ident("a") {
        let j = single_monomial(&mut p, n)?;
        p.expect_sym(',')?;
        let k = single_monomial(&mut p, n)?;
        p.expect_sym('=')?;
        let c = p.signed_coefficient()?;
        p.expect_sym(';')?;
        coeffs.push((j, k, c));
    }
    finish(&p)?;
    Decomposition::from_parts(h, coeffs).or_else(|e| core_error(pos, e))
}

/// A rational as printed by [`coefficient`], for key-value lines.
pub fn parse_rational(text: &str) -> Option<BigRational> {
    let (n, d) = match text.split_once('/') {
        Some((n, d)) => (n.parse::<BigInt>().ok()?, d.parse::<BigInt>().ok()?),
        None => (text.parse::<BigInt>().ok()?, BigInt::from(1)),
    };
    (!d.is_zero()).then(|| BigRational::new(n, d))
}

/// Parse a lone coefficient such as `(3/4-1/2i)`.
pub fn parse_coefficient(text: &str) -> ParseResult<GaussRat> {
    let mut p = Parser::new(text)?;
    let c = p.signed_coefficient()?;
    finish(&p)?;
    Ok(c)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn hermitian_example() {
        let h = parse_hermitian("vars 2; N=8; + 1 z2 + 1 zbar2 + 1 z1 zbar1").unwrap();
        let r = &h.form;
        assert_eq!(r.terms().count(), 3);
        assert_eq!(parse_hermitian(&print_hermitian(&h)).unwrap(), h);
    }

    #[test]
    fn reality_error_names_pair() {
        let e = parse_hermitian("vars 2; N=8;\n+ 1 z1 zbar2").unwrap_err();
        assert_eq!(e.pos.line, 2);
        assert!(e.message.contains("not real-valued"), "{e}");
    }

    #[test]
    fn malformed_exponent() {
        let e = parse_hermitian("vars 2; N=8;\n+ 1 z1^ zbar1").unwrap_err();
        assert_eq!((e.pos.line, e.pos.column), (2, 9));
    }

    #[test]
    fn coefficients_print_and_parse() {
        for c in [
            GaussRat::from_parts(3, 4, -1, 2),
            GaussRat::from_parts(0, 1, -5, 3),
            GaussRat::from_ratio(-7, 2),
            GaussRat::from_parts(-1, 1, 1, 1),
        ] {
            assert_eq!(parse_coefficient(&coefficient(&c)).unwrap(), c);
        }
    }

    #[test]
    fn ideal_with_normal_form() {
        let text = "ideal 3; N=12;\n\
                    gen = + 1 z2^2 - 1 z1^2;\n\
                    gen = + 4 z1^2 z3 - 4 z1^2 z2;\n\
                    normal_form k=1;\n\
                    p = + 1 z2^2 - 1 z1^2;\n\
                    q3 = + 4 z1^2 z3 - 4 z1^2 z2;\n\
                    Q3 = + 4 z1^2 z2;\n\
                    D = + 4 z1^2;\n";
        let i = parse_ideal(text).unwrap();
        assert_eq!(i.generators().len(), 2);
        assert_eq!(i.normal_form().unwrap().k(), 1);
        assert_eq!(parse_ideal(&print_ideal(&i)).unwrap(), i);
        let e = parse_ideal("ideal 2; N=4;\ngen = 1 + z1;").unwrap_err();
        assert_eq!(e.pos.line, 2);
    }

    #[test]
    fn unitary_must_be_unitary() {
        assert!(parse_unitary("unitary 2;\nrow 0 1;\nrow 1 0;").is_ok());
        assert!(parse_unitary("unitary 2;\nrow 1 1;\nrow 1 0;").is_err());
        let e = parse_unitary("unitary 2;\nrow 0 1;\nrow 1;").unwrap_err();
        assert_eq!(e.pos.line, 3);
    }
}
