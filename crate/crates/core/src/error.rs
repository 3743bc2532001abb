use alloc::string::String;

use crate::multidegree::Multidegree;

pub type Result<T> = core::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("insufficient precision: need order {needed}, only {available} is known")]
    InsufficientPrecision { needed: u32, available: u32 },

    #[error("curve is constant to precision {0}")]
    ConstantCurve(u32),

    #[error("form is not real-valued: coefficient of z^{j} zbar^{k} is not the conjugate of its partner")]
    NotRealValued { j: Multidegree, k: Multidegree },

    #[error("series is not regular in the distinguished variable up to order {0}")]
    NotRegular(u32),

    #[error("ideal is improper: generator {0} is a unit")]
    ImproperIdeal(usize),

    #[error("unitary block of size {size} does not cover {needed} active families")]
    BlockTooSmall { needed: usize, size: usize },

    #[error("operation needs an exact unitary block")]
    InexactBlock,

    #[error("discriminant vanishes identically to precision {0}; the polynomial is not reduced")]
    DegenerateDiscriminant(u32),

    #[error("no direction in the trial sequence keeps the discriminant nonzero")]
    NoGenericDirection,

    #[error("lift failed for z{variable}: numerator order {numerator} does not exceed denominator order {denominator}")]
    LiftOrder { variable: usize, numerator: u32, denominator: u32 },

    #[error("invalid normal form: {0}")]
    InvalidNormalForm(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}
