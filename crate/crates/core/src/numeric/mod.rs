//! Exact rationals and refinable enclosures of square and cube roots.
//!
//! Every decision in the crate goes through [`Rat`] arithmetic or through
//! [`compare`], which separates irrational values by rational bisection of
//! their root enclosures and reports [`Comparison::Undecided`] instead of
//! guessing when the budget runs out.

mod compare;
mod rat;
mod real;

pub use compare::{compare, Comparison, Refiner, DEFAULT_REFINE_BUDGET};
pub use rat::{rat, Rat};
pub use real::{Expr, Radical, Real, RootBound, Surd};

use alloc::string::String;

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub enum NumericError {
    #[error("zero denominator")]
    ZeroDenominator,
    #[error("division by zero")]
    DivisionByZero,
    #[error("square root of a negative number")]
    NegativeRadicand,
    #[error("cannot parse `{0}` as a number")]
    Parse(String),
}
