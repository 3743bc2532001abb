//! Exact formal power series kernels for finite type computations on real
//! hypersurfaces: truncated series, Hermitian decompositions, ideal
//! computations on jets and Weierstrass/Newton-Puiseux machinery.
#![no_std]

extern crate alloc;

pub mod coef;
pub mod curve;
pub mod error;
pub mod hermitian;
pub mod ideal;
pub mod mixed;
pub mod multidegree;
pub mod prime;
pub mod puiseux;
pub mod ratio;
pub mod roots;
pub mod search;
pub mod series;
pub mod uni;
pub mod unitary;
pub mod weierstrass;

pub use coef::{Field, GaussRat};
pub use curve::FormalCurve;
pub use error::{Error, Result};
pub use hermitian::{decompose, reconstruct, Decomposition};
pub use mixed::{HermitianForm, MixedSeries};
pub use multidegree::Multidegree;
pub use series::{TruncSeries, VanishingOrder};
pub use uni::{Series1, UniSeries, EXACT};
