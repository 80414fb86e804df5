//! Exact calculator for 4-dimensional symplectic embedding problems.
//!
//! The crate decides packings of balls into a ball, computes the
//! ellipsoid-into-ball capacity function `c(a)` through weight expansions,
//! and evaluates ECH capacity sequences of ellipsoids. All arithmetic is
//! exact: rationals are arbitrary precision and irrational quantities such as
//! `sqrt(k)` or `k^(1/3)` are handled through refinable rational enclosures.
//!
//! The crate is `no_std` and only needs `alloc`.
#![cfg_attr(not(test), no_std)]

extern crate alloc;

pub mod numeric;

pub use numeric::{compare, rat, Comparison, NumericError, Rat, Real, RootBound};
pub mod cremona;
pub mod diophantine;
pub mod ech;
pub mod ellipsoid;
pub mod packing;
pub mod weights;
