//! Curves on prime ideals given in strictly regular coordinates.

use alloc::vec::Vec;

use num_traits::One;

use crate::coef::GaussRat;
use crate::curve::FormalCurve;
use crate::error::{Error, Result};
use crate::ideal::{Echelon, IdealPresentation, Membership, NormalForm};
use crate::series::{TruncSeries, VanishingOrder};
use crate::uni::UniSeries;

#[derive(Clone, Debug, PartialEq)]
pub struct LiftedCurve {
    pub curve: FormalCurve,
    /// `ord(D o zeta')`.
    pub denominator_order: u32,
    /// Vanishing order of `p, q_{k+2}, ..., q_n` along the curve.
    pub generator_orders: Vec<VanishingOrder>,
}

impl LiftedCurve {
    /// Smallest certified vanishing order among the generators.
    pub fn certified_order(&self) -> u32 {
        self.generator_orders
            .iter()
            .map(|o| o.value().saturating_sub(1))
            .min()
            .unwrap_or(self.curve.precision())
    }
}

/// Extend `zeta'` in `z_1..z_{k+1}` by `zeta_j = (Q_j o zeta') / (D o zeta')`.
///
/// The result is cut at `precision` or earlier when the division loses terms.
pub fn prime_curve_lift(
    nf: &NormalForm,
    n: usize,
    base: &FormalCurve,
    precision: u32,
) -> Result<LiftedCurve> {
    let k = nf.k();
    if base.dim() != k + 1 {
        return Err(Error::DimensionMismatch {
            expected: k + 1,
            found: base.dim(),
        });
    }
    let slots: Vec<usize> = (0..=k).collect();
    let on_base = |s: &TruncSeries| base.pullback(&s.select_vars(&slots)?);
    let p_on = base.pullback(&nf.p().to_series())?;
    if let VanishingOrder::Exact(o) = p_on.order() {
        return Err(Error::InvalidArgument(alloc::format!(
            "base curve does not annihilate p: order {o}"
        )));
    }
    let d_on = on_base(nf.discriminant())?;
    let dord = d_on.order().exact().ok_or_else(|| {
        Error::InvalidArgument("discriminant vanishes on the base curve to its precision".into())
    })?;
    let mut comps: Vec<UniSeries> = base.components().to_vec();
    let mut prec = precision.min(base.precision());
    for rel in nf.relations() {
        let num = on_base(&rel.big_q)?;
        let quotient = match num.order() {
            VanishingOrder::AtLeast(_) if num.precision() >= dord => {
                crate::uni::Series1::zero(num.precision() - dord)
            }
            VanishingOrder::Exact(o) if o > dord => num.divide(&d_on)?,
            o => {
                return Err(Error::LiftOrder {
                    variable: rel.j,
                    numerator: o.value(),
                    denominator: dord,
                })
            }
        };
        prec = prec.min(quotient.precision());
        comps.push(quotient);
    }
    let curve = FormalCurve::new(comps, prec)?;
    let generator_orders = nf
        .associated_generators(n)
        .iter()
        .map(|g| curve.pullback(g).map(|s| s.order()))
        .collect::<Result<Vec<_>>>()?;
    Ok(LiftedCurve {
        curve,
        denominator_order: dord,
        generator_orders,
    })
}

/// Smallest `nu <= maxnu` with `D^nu f` in `(p, q_{k+2}, ..., q_n) + M^{N+1}`, and its cofactors.
pub fn associated_membership(
    f: &TruncSeries,
    nf: &NormalForm,
    maxnu: u32,
    level: u32,
) -> Result<Option<(u32, Vec<TruncSeries>)>> {
    let n = f.nvars();
    let dord = nf.discriminant().order().value();
    let needed = maxnu.saturating_mul(dord);
    if needed > level {
        return Err(Error::InsufficientPrecision {
            needed,
            available: level,
        });
    }
    if f.precision() < level {
        return Err(Error::InsufficientPrecision {
            needed: level,
            available: f.precision(),
        });
    }
    let ideal = IdealPresentation::new(n, nf.associated_generators(n), level)?;
    let ech = Echelon::build(&ideal, level, true)?;
    let d = nf.discriminant().as_polynomial_to(level);
    let mut g = f.jet(level)?;
    let mut dpow = TruncSeries::constant(n, GaussRat::one(), level);
    for nu in 0..=maxnu {
        if nu > 0 {
            dpow = dpow.checked_mul(&d)?;
            g = f.jet(level)?.checked_mul(&dpow)?;
        }
        if let Membership::Member { cofactors } = ech.membership(&g, &ideal) {
            return Ok(Some((nu, cofactors)));
        }
    }
    Ok(None)
}
