//! From a hypersurface to a certified formal curve on it.
//!
//! Stages: decompose, choose unitary blocks (given, identity, or matched on
//! search curves), build the ideal, eliminate linear generators, prepare the
//! remaining principal generator, take Newton-Puiseux branches, undo the
//! substitutions and check the pullback. A supplied normal form is tried first
//! through the prime lift.

use std::fmt;

use germforge_core::ideal::{codimension, membership_jet, IdealPresentation, NormalForm};
use germforge_core::prime::prime_curve_lift;
use germforge_core::puiseux::newton_puiseux;
use germforge_core::ratio::{witness_check, TypeRatio, WitnessOutcome};
use germforge_core::search::{SearchHit, SearchParams};
use germforge_core::unitary::{build_ideal, jet_vectors, match_unitary, MatchOutcome, UnitaryBlock};
use germforge_core::weierstrass::{generic_restrict, weierstrass_prepare};
use germforge_core::{
    decompose, Decomposition, Error, FormalCurve, GaussRat, HermitianForm, Multidegree, Series1, TruncSeries,
    UniSeries, VanishingOrder,
};
use num_traits::Zero;

use crate::format::Hypersurface;
use crate::parallel::parallel_search;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Stage {
    Load,
    Decompose,
    Search,
    Match,
    Ideal,
    Eliminate,
    Prepare,
    Puiseux,
    Lift,
    Witness,
}

impl fmt::Display for Stage {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Stage::Load => "load",
            Stage::Decompose => "decompose",
            Stage::Search => "search",
            Stage::Match => "match",
            Stage::Ideal => "ideal",
            Stage::Eliminate => "eliminate",
            Stage::Prepare => "prepare",
            Stage::Puiseux => "puiseux",
            Stage::Lift => "lift",
            Stage::Witness => "witness",
        };
        f.write_str(s)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
#[error("[{stage}] {source}")]
pub struct StageError {
    pub stage: Stage,
    pub source: Error,
}

trait Tag<T> {
    fn at(self, stage: Stage) -> Result<T, StageError>;
}

impl<T> Tag<T> for germforge_core::Result<T> {
    fn at(self, stage: Stage) -> Result<T, StageError> {
        self.map_err(|source| StageError { stage, source })
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PipelineParams {
    /// Order `N` the witness is checked to.
    pub precision: u32,
    pub search: SearchParams,
    /// Bound for the codimension test of the identity block.
    pub codim_bound: u32,
    pub exact_only: bool,
}

impl Default for PipelineParams {
    fn default() -> Self {
        PipelineParams {
            precision: 50,
            search: SearchParams::default(),
            codim_bound: 12,
            exact_only: false,
        }
    }
}

/// Everything the run produced; a certificate is built from this.
#[derive(Clone, Debug)]
pub struct PipelineReport {
    pub hypersurface: Hypersurface,
    pub precision: u32,
    pub decomposition: Decomposition,
    pub unitary: Option<Vec<Vec<GaussRat>>>,
    pub jets: Option<(Vec<Vec<GaussRat>>, Vec<Vec<GaussRat>>)>,
    pub ideal: Option<IdealPresentation>,
    pub curve: Option<FormalCurve>,
    pub witness: Option<WitnessOutcome>,
    /// Best search ratio, a lower bound for the type.
    pub best: Option<(Vec<u32>, TypeRatio)>,
    pub notes: Vec<String>,
}

impl PipelineReport {
    pub fn certified(&self) -> bool {
        self.witness.as_ref().is_some_and(WitnessOutcome::is_certified)
    }

    /// 0 with a certified witness, 2 when none was found at these bounds.
    pub fn exit_code(&self) -> i32 {
        if self.certified() {
            0
        } else {
            2
        }
    }
}

/// The form the whole run works with: centred at the origin, terms taken as exact to `n`.
pub fn working_form(h: &Hypersurface, n: u32) -> germforge_core::Result<HermitianForm> {
    let r = h.at_origin()?;
    Ok(r.as_polynomial_to(n.max(r.precision())))
}

pub fn run_pipeline(
    h: &Hypersurface,
    unitary: Option<&[Vec<GaussRat>]>,
    normal_form: Option<&IdealPresentation>,
    params: &PipelineParams,
) -> Result<PipelineReport, StageError> {
    let n = params.precision;
    let r = working_form(h, n).at(Stage::Load)?;
    if r.is_zero() {
        return Err(StageError {
            stage: Stage::Load,
            source: Error::InvalidArgument("the defining function is identically zero".into()),
        });
    }
    let d = decompose(&r, n).at(Stage::Decompose)?;
    let mut rep = PipelineReport {
        hypersurface: h.clone(),
        precision: n,
        decomposition: d.clone(),
        unitary: None,
        jets: None,
        ideal: None,
        curve: None,
        witness: None,
        best: None,
        notes: Vec::new(),
    };

    if let Some(ideal) = normal_form {
        let ideal = &ideal.as_polynomial_to(n.max(ideal.precision()));
        let nf = ideal.normal_form().ok_or_else(|| StageError {
            stage: Stage::Lift,
            source: Error::InvalidNormalForm("the ideal file has no normal_form block".into()),
        })?;
        for curve in lifted_curves(nf, ideal.nvars(), n, params.exact_only)? {
            if check(&r, &curve, n, &mut rep)? {
                rep.ideal = Some(ideal.clone());
                return Ok(rep);
            }
        }
        rep.notes.push("no lift of the supplied normal form annihilates r".into());
    }

    let fam = d.num_families();
    let mut blocks: Vec<(Vec<Vec<GaussRat>>, Option<(Vec<Vec<GaussRat>>, Vec<Vec<GaussRat>>)>)> = Vec::new();
    let mut hits: Option<Vec<SearchHit>> = None;
    match unitary {
        Some(u) => blocks.push((u.to_vec(), None)),
        None => {
            let id = UnitaryBlock::identity(fam);
            let ideal = build_ideal(&d, &id).at(Stage::Ideal)?;
            let bound = params.codim_bound.min(n);
            let report = codimension(&ideal, bound).at(Stage::Ideal)?;
            match report.finite_value() {
                Some(v) => rep
                    .notes
                    .push(format!("identity block: codimension {v}, so its ideal has no curve")),
                None => blocks.push((identity_rows(fam), None)),
            }
            let found = parallel_search(&r, &params.search).at(Stage::Search)?;
            for hit in found.iter().filter(|h| h.ratio.is_lower_bound()) {
                let k = ((hit.ratio.numerator.value().saturating_sub(1)) / 2).min(hit.curve.precision());
                let (fv, gv) = jet_vectors(&d, &hit.curve, k).at(Stage::Match)?;
                match match_unitary(&fv, &gv).at(Stage::Match)? {
                    MatchOutcome::Matched(UnitaryBlock::Exact(rows)) => {
                        if !blocks.iter().any(|(b, _)| *b == rows) {
                            blocks.push((rows, Some((fv, gv))));
                        }
                    }
                    MatchOutcome::Matched(_) => rep.notes.push(format!(
                        "search curve {:?}: matched block is not exact",
                        hit.exponents
                    )),
                    MatchOutcome::NoMatch { m, l, .. } => rep.notes.push(format!(
                        "search curve {:?}: Gram entry ({m}, {l}) differs",
                        hit.exponents
                    )),
                }
            }
            hits = Some(found);
        }
    }

    for (rows, jets) in blocks {
        let u = UnitaryBlock::from_exact(rows.clone()).at(Stage::Match)?;
        let ideal = build_ideal(&d, &u).at(Stage::Ideal)?;
        let curves = match curves_on(&ideal, n, params.exact_only) {
            Ok(c) => c,
            Err(e) => {
                rep.notes.push(format!("block {}: {e}", block_label(&rows)));
                continue;
            }
        };
        if curves.is_empty() {
            rep.notes.push(format!("block {}: no curve in the ideal's zero set", block_label(&rows)));
        }
        for curve in curves {
            if check(&r, &curve, n, &mut rep)? {
                rep.unitary = Some(rows);
                rep.jets = jets;
                rep.ideal = Some(ideal);
                return Ok(rep);
            }
        }
    }

    let hits = match hits {
        Some(h) => h,
        None => parallel_search(&r, &params.search).at(Stage::Search)?,
    };
    for hit in hits.iter().filter(|h| h.ratio.is_lower_bound()) {
        let curve = relabel(&hit.curve, n).at(Stage::Witness)?;
        if check(&r, &curve, n, &mut rep)? {
            rep.notes.push(format!("witness is the search curve {:?}", hit.exponents));
            return Ok(rep);
        }
    }
    rep.best = hits.first().map(|h| (h.exponents.clone(), h.ratio));
    Ok(rep)
}

fn identity_rows(k: usize) -> Vec<Vec<GaussRat>> {
    match UnitaryBlock::identity(k) {
        UnitaryBlock::Exact(rows) => rows,
        UnitaryBlock::Floating { .. } => unreachable!("identity is exact"),
    }
}

fn block_label(rows: &[Vec<GaussRat>]) -> String {
    if rows == identity_rows(rows.len()).as_slice() {
        format!("I_{}", rows.len())
    } else {
        format!("U_{} (matched)", rows.len())
    }
}

/// Polynomial components of a search curve, relabelled at precision `n`.
fn relabel(c: &FormalCurve, n: u32) -> germforge_core::Result<FormalCurve> {
    FormalCurve::from_coefficients(c.components().iter().map(|s| s.coeffs().to_vec()).collect(), n)
}

/// Record the check; `true` when certified at `n`.
fn check(r: &HermitianForm, curve: &FormalCurve, n: u32, rep: &mut PipelineReport) -> Result<bool, StageError> {
    let available = curve.pullback_precision(r.precision()).at(Stage::Witness)?;
    if available < n {
        rep.notes.push(format!("candidate curve known only to order {available}"));
        return Ok(false);
    }
    let w = witness_check(r, curve, n).at(Stage::Witness)?;
    let ok = w.is_certified();
    if let WitnessOutcome::Violation { order, .. } = &w {
        rep.notes.push(format!("candidate curve fails at order {order}"));
    }
    if ok || rep.witness.is_none() {
        rep.curve = Some(curve.clone());
        rep.witness = Some(w);
    }
    Ok(ok)
}

/// Exact branches of `p`, lifted through the normal form.
fn lifted_curves(nf: &NormalForm, nvars: usize, n: u32, exact_only: bool) -> Result<Vec<FormalCurve>, StageError> {
    if nf.k() == 0 {
        return Err(StageError {
            stage: Stage::Lift,
            source: Error::InvalidNormalForm("k = 0: the zero set is the origin".into()),
        });
    }
    let lift_all = |m: u32| -> Result<Vec<FormalCurve>, StageError> {
        let mut out = Vec::new();
        let nf = nf.as_polynomial_to(m);
        for base in branch_curves(nf.p(), m, exact_only)? {
            match prime_curve_lift(&nf, nvars, &base, m) {
                Ok(l) => out.push(l.curve),
                Err(Error::LiftOrder { .. }) | Err(Error::InvalidArgument(_)) => continue,
                Err(e) => return Err(StageError { stage: Stage::Lift, source: e }),
            }
        }
        Ok(out)
    };
    let first = lift_all(n)?;
    // the division by D costs its order along the branch; redo with that much slack
    let deficit = first.iter().map(|c| n.saturating_sub(c.precision())).max().unwrap_or(0);
    if deficit == 0 {
        return Ok(first);
    }
    lift_all(n + deficit)
}

/// Curves `(v tau^d, w(tau))` from the exact Puiseux branches of `p`.
fn branch_curves(
    p: &germforge_core::weierstrass::WeierstrassPoly,
    n: u32,
    exact_only: bool,
) -> Result<Vec<FormalCurve>, StageError> {
    let restriction = generic_restrict(p).at(Stage::Puiseux)?;
    let branches = newton_puiseux(&restriction.restricted, n, exact_only).at(Stage::Puiseux)?;
    let mut out = Vec::new();
    for b in branches {
        if let Some(w) = b.series.exact() {
            let prec = n.min(w.precision());
            out.push(restriction.curve(b.ramification, w, prec).at(Stage::Puiseux)?);
        }
    }
    Ok(out)
}

struct Elimination {
    /// Original index of the eliminated variable.
    var: usize,
    /// Original indices of the variables `phi` is written in.
    others: Vec<usize>,
    phi: TruncSeries,
}

/// Move variable `v` to the last slot.
fn move_last(g: &TruncSeries, v: usize) -> TruncSeries {
    let n = g.nvars();
    let slots: Vec<usize> = (0..n)
        .map(|i| match i.cmp(&v) {
            std::cmp::Ordering::Less => i,
            std::cmp::Ordering::Equal => n - 1,
            std::cmp::Ordering::Greater => i - 1,
        })
        .collect();
    g.embed(n, &slots)
}

fn linear_variable(g: &TruncSeries) -> Option<usize> {
    let m = g.nvars();
    (0..m).rev().find(|&v| !g.coeff(&Multidegree::unit(m, v)).is_zero())
}

/// Order of `g` restricted to the axis of variable `v`.
fn axis_order(g: &TruncSeries, v: usize) -> Option<u32> {
    g.terms()
        .filter(|(j, _)| j.0.iter().enumerate().all(|(i, &e)| i == v || e == 0))
        .map(|(j, _)| j.0[v])
        .min()
}

/// Curves in the zero set of a principal ideal after linear elimination.
///
/// Returns no curves when the zero set is the origin, and an error when the
/// ideal is not principal after elimination.
pub fn curves_on(ideal: &IdealPresentation, n: u32, exact_only: bool) -> Result<Vec<FormalCurve>, StageError> {
    let nvars = ideal.nvars();
    let mut vars: Vec<usize> = (0..nvars).collect();
    let mut gens: Vec<TruncSeries> = ideal.generators().iter().map(|g| g.as_polynomial_to(n)).collect();
    let mut elims = Vec::new();
    loop {
        gens.retain(|g| !g.is_zero());
        let m = vars.len();
        let Some((gi, v)) = gens.iter().enumerate().find_map(|(i, g)| linear_variable(g).map(|v| (i, v))) else {
            break;
        };
        let (_, p) = weierstrass_prepare(&move_last(&gens[gi], v), n).at(Stage::Eliminate)?;
        let phi = -&p.coeffs()[0];
        let subs: Vec<TruncSeries> = (0..m)
            .map(|i| match i.cmp(&v) {
                std::cmp::Ordering::Less => TruncSeries::var(m - 1, i, n),
                std::cmp::Ordering::Equal => phi.clone(),
                std::cmp::Ordering::Greater => TruncSeries::var(m - 1, i - 1, n),
            })
            .collect();
        let mut next = Vec::new();
        for (i, g) in gens.iter().enumerate() {
            if i != gi {
                next.push(g.compose(&subs).at(Stage::Eliminate)?.as_polynomial_to(n));
            }
        }
        let mut others = vars.clone();
        others.remove(v);
        elims.push(Elimination { var: vars[v], others: others.clone(), phi });
        vars = others;
        gens = next;
        if vars.is_empty() {
            return Ok(Vec::new());
        }
    }
    let m = vars.len();
    let sub_curves: Vec<Vec<UniSeries>> = if gens.is_empty() {
        let mut comps = vec![UniSeries::zero(n); m];
        comps[0] = Series1::monomial(1, GaussRat::from_int(1), n);
        vec![comps]
    } else {
        principal_curves(&gens, n, exact_only)?
    };
    let mut out = Vec::new();
    for sub in sub_curves {
        let mut full: Vec<Option<UniSeries>> = vec![None; nvars];
        for (i, c) in sub.into_iter().enumerate() {
            full[vars[i]] = Some(c);
        }
        for e in elims.iter().rev() {
            let comps: Vec<UniSeries> = e.others.iter().map(|&i| full[i].clone().expect("set")).collect();
            let value = if comps.iter().all(|c| c.is_zero()) {
                UniSeries::zero(comps.iter().map(|c| c.precision()).min().unwrap_or(n).min(n))
            } else {
                let prec = comps.iter().map(|c| c.precision()).min().unwrap_or(n).min(n);
                let c = FormalCurve::new(comps, prec).at(Stage::Eliminate)?;
                c.pullback(&e.phi).at(Stage::Eliminate)?
            };
            full[e.var] = Some(value);
        }
        let comps: Vec<UniSeries> = full.into_iter().map(|c| c.expect("every variable set")).collect();
        let prec = comps.iter().map(|c| c.precision()).min().unwrap_or(n).min(n);
        out.push(FormalCurve::new(comps, prec).at(Stage::Eliminate)?);
    }
    Ok(out)
}

fn not_principal() -> StageError {
    StageError {
        stage: Stage::Prepare,
        source: Error::InvalidArgument("ideal is not principal after elimination".into()),
    }
}

/// Branch curves of `V(g0)` when every generator is a multiple of `g0` at jet level.
fn principal_curves(gens: &[TruncSeries], n: u32, exact_only: bool) -> Result<Vec<Vec<UniSeries>>, StageError> {
    let m = gens[0].nvars();
    let key = |g: &TruncSeries| (g.order().value(), g.num_terms());
    let g0 = gens.iter().min_by_key(|g| key(g)).expect("nonempty").clone();
    let level = n.min(12);
    let principal = IdealPresentation::new(m, vec![g0.clone()], level).at(Stage::Prepare)?;
    for g in gens {
        if !membership_jet(g, &principal, level).at(Stage::Prepare)?.is_member() {
            return Err(not_principal());
        }
    }
    if m == 1 {
        return Ok(Vec::new());
    }
    // old variables written in new ones; the distinguished variable goes last
    let mut change: Option<Vec<TruncSeries>> = None;
    let best = (0..m).filter_map(|v| axis_order(&g0, v).map(|o| (o, v))).min_by_key(|&(o, v)| (o, std::cmp::Reverse(v)));
    if let Some((_, v)) = best {
        change = Some((0..m).map(|i| move_last(&TruncSeries::var(m, i, n), v)).collect());
    } else {
        for c in 1..=4i64 {
            let trial: Vec<TruncSeries> = (0..m)
                .map(|i| {
                    let x = TruncSeries::var(m, i, n);
                    if i + 1 == m {
                        x
                    } else {
                        &x + &TruncSeries::var(m, m - 1, n).scale(&GaussRat::from_int(c))
                    }
                })
                .collect();
            if axis_order(&g0.compose(&trial).at(Stage::Prepare)?, m - 1).is_some() {
                change = Some(trial);
                break;
            }
        }
    }
    let change = change.ok_or(StageError {
        stage: Stage::Prepare,
        source: Error::NotRegular(n),
    })?;
    let f = g0.compose(&change).at(Stage::Prepare)?.as_polynomial_to(n);
    let (_, p) = weierstrass_prepare(&f, n).at(Stage::Prepare)?;
    let mut out = Vec::new();
    for curve in branch_curves(&p, n, exact_only)? {
        let comps = change
            .iter()
            .map(|s| curve.pullback(s))
            .collect::<germforge_core::Result<Vec<_>>>()
            .at(Stage::Prepare)?;
        out.push(comps);
    }
    Ok(out)
}

/// `ord` of the pullback as a printable bound.
pub fn order_text(o: VanishingOrder) -> String {
    match o {
        VanishingOrder::Exact(v) => v.to_string(),
        VanishingOrder::AtLeast(v) => format!(">= {v}"),
    }
}
