//! Exact valuations, escape rates and canonical heights.
//!
//! The crate is `no_std` (it needs `alloc`). Everything that touches the
//! filesystem, the command line or random sampling lives in the `critheight`
//! companion crate.
//!
//! Module map:
//!
//! * [`arith`]: rationals, integer factoring, exact log-combinations,
//!   p-adic approximations, outward-rounded intervals, polynomials and
//!   rational functions over `Q`.
//! * [`places`]: absolute values and Weil heights over `Q` and `Q(t)`.
//! * [`polydyn`]: normal-form polynomials, Green's functions, canonical
//!   heights, preperiodicity and dependence heuristics.
//! * [`perlambda`]: the multiplier locus `Per_1(lambda)` and its verifiers.
//! * [`ffdyn`]: the same machinery over the function field `Q(t)`.
//! * [`quadratic`]: quadratic rational maps with a marked fixed point.
#![no_std]

extern crate alloc;

pub mod arith;
pub mod error;
pub mod ffdyn;
pub mod perlambda;
pub mod places;
pub mod polydyn;
pub mod quadratic;

pub use arith::{LogCombination, Poly, Rational, RationalFunction};
pub use error::{Error, Result};
pub use places::{PlaceFF, PlaceQ};
