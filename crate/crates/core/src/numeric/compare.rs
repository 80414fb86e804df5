use alloc::collections::BTreeMap;
use core::cmp::Ordering;

use super::{Rat, Real, Surd};

/// Default maximum bisection depth for root enclosures.
pub const DEFAULT_REFINE_BUDGET: u32 = 256;

/// Depth at which a [`Refiner`] first tries to separate two values.
const START_DEPTH: u32 = 32;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Comparison {
    Less,
    Equal,
    Greater,
    Undecided,
}

impl Comparison {
    pub fn ordering(self) -> Option<Ordering> {
        match self {
            Comparison::Less => Some(Ordering::Less),
            Comparison::Equal => Some(Ordering::Equal),
            Comparison::Greater => Some(Ordering::Greater),
            Comparison::Undecided => None,
        }
    }

    pub fn reverse(self) -> Comparison {
        match self {
            Comparison::Less => Comparison::Greater,
            Comparison::Greater => Comparison::Less,
            other => other,
        }
    }
}

impl From<Ordering> for Comparison {
    fn from(o: Ordering) -> Comparison {
        match o {
            Ordering::Less => Comparison::Less,
            Ordering::Equal => Comparison::Equal,
            Ordering::Greater => Comparison::Greater,
        }
    }
}

/// Compares two reals by interval separation, bisecting root enclosures at
/// most `budget` times.
///
/// `Equal` is only reported when the difference is exactly rational zero,
/// i.e. both sides are equal rationals or the same expression after
/// normalization. Distinct irrational expressions that cannot be separated
/// within the budget give `Undecided`.
pub fn compare(x: &Real, y: &Real, budget: u32) -> Comparison {
    Refiner::new(budget).compare(x, y)
}

/// Comparison context that remembers how far each surd has been refined, so
/// a long run of comparisons over the same few roots (capacity sequences,
/// staircase scans) does not redo the work.
#[derive(Clone, Debug)]
pub struct Refiner {
    budget: u32,
    cache: BTreeMap<Surd, (u32, Rat, Rat)>,
}

impl Refiner {
    pub fn new(budget: u32) -> Refiner {
        Refiner { budget, cache: BTreeMap::new() }
    }

    pub fn budget(&self) -> u32 {
        self.budget
    }

    pub fn compare(&mut self, x: &Real, y: &Real) -> Comparison {
        if let (Real::Exact(a), Real::Exact(b)) = (x, y) {
            return a.cmp(b).into();
        }
        // Cheap test on the enclosures the values already carry.
        if x.hi() < y.lo() {
            return Comparison::Less;
        }
        if x.lo() > y.hi() {
            return Comparison::Greater;
        }
        let diff = x.expr().sub(&y.expr());
        if let Some(r) = diff.as_rational() {
            return r.signum().into();
        }
        let mut depth = START_DEPTH.min(self.budget);
        loop {
            let (lo, hi) = diff.enclosure_with(|s| self.surd_bounds(s, depth));
            if lo.is_positive() {
                return Comparison::Greater;
            }
            if hi.is_negative() {
                return Comparison::Less;
            }
            if depth >= self.budget {
                return Comparison::Undecided;
            }
            depth = depth.saturating_mul(2).min(self.budget).max(depth + 1);
        }
    }

    /// Sign of `x` relative to zero.
    pub fn sign(&mut self, x: &Real) -> Comparison {
        self.compare(x, &Real::Exact(Rat::zero()))
    }

    fn surd_bounds(&mut self, surd: &Surd, depth: u32) -> (Rat, Rat) {
        if let Some((d, lo, hi)) = self.cache.get(surd) {
            if *d >= depth {
                return (lo.clone(), hi.clone());
            }
        }
        let (lo, hi) = surd.enclosure(depth);
        self.cache.insert(surd.clone(), (depth, lo.clone(), hi.clone()));
        (lo, hi)
    }
}

impl Default for Refiner {
    fn default() -> Refiner {
        Refiner::new(DEFAULT_REFINE_BUDGET)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numeric::rat;

    fn int(n: i64) -> Real {
        Real::Exact(Rat::from_int(n))
    }

    #[test]
    fn perfect_square_is_equal() {
        let four = Real::sqrt(&Rat::from_int(4)).unwrap();
        assert_eq!(compare(&int(2), &four, 0), Comparison::Equal);
        assert_eq!(compare(&int(2), &four, 1000), Comparison::Equal);
    }

    #[test]
    fn sqrt_two_below_three_halves() {
        let s = Real::sqrt(&Rat::from_int(2)).unwrap();
        let x = Real::Exact(rat(3, 2).unwrap());
        assert_eq!(compare(&s, &x, 64), Comparison::Less);
        assert_eq!(compare(&x, &s, 64), Comparison::Greater);
    }

    #[test]
    fn cube_root_of_21_above_five_halves() {
        // oracle: 21 > (5/2)^3 = 125/8 compared as integers 168 > 125
        assert!(21 * 8 > 125);
        let c = Real::cbrt(&Rat::from_int(21)).unwrap();
        assert_eq!(compare(&c, &Real::Exact(rat(5, 2).unwrap()), 64), Comparison::Greater);
    }

    #[test]
    fn identical_irrational_expressions_are_equal() {
        let a = Real::sqrt(&Rat::from_int(2)).unwrap().add(&int(1));
        let b = int(1).add(&Real::sqrt(&Rat::from_int(8)).unwrap().scale(&rat(1, 2).unwrap()));
        assert_eq!(compare(&a, &b, 0), Comparison::Equal);
    }

    #[test]
    fn budget_exhaustion_is_undecided() {
        // sqrt(2) vs a rational within 2^-80 of it needs more than 8 steps
        let s = Real::sqrt(&Rat::from_int(2)).unwrap();
        let (lo, _) = s.enclosure(80);
        let close = Real::Exact(lo);
        assert_eq!(compare(&s, &close, 8), Comparison::Undecided);
        assert_eq!(compare(&s, &close, 256), Comparison::Greater);
    }

    #[test]
    fn distinct_roots_separate() {
        let a = Real::cbrt(&Rat::from_int(21)).unwrap();
        let b = Real::sqrt(&Rat::from_int(7)).unwrap();
        // cbrt(21)^6 = 441 > sqrt(7)^6 = 343
        assert_eq!(compare(&a, &b, 256), Comparison::Greater);
    }
}
