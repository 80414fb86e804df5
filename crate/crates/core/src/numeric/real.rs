use alloc::vec::Vec;
use core::cmp::Ordering;
use core::fmt;

use num_bigint::{BigInt, BigUint, Sign};
use num_traits::{One, Zero};

use super::{NumericError, Rat};

/// Trial-division limit used when pulling perfect powers out of a radicand.
const TRIAL_DIVISION_LIMIT: u32 = 1 << 16;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Radical {
    Sqrt,
    Cbrt,
}

impl Radical {
    pub fn index(self) -> u32 {
        match self {
            Radical::Sqrt => 2,
            Radical::Cbrt => 3,
        }
    }

    fn name(self) -> &'static str {
        match self {
            Radical::Sqrt => "sqrt",
            Radical::Cbrt => "cbrt",
        }
    }
}

/// An irrational root `sqrt(r)` or `cbrt(r)` of an integer `r >= 2` with the
/// small perfect powers divided out.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Surd {
    radical: Radical,
    radicand: BigUint,
}

impl Surd {
    pub fn radical(&self) -> Radical {
        self.radical
    }

    pub fn radicand(&self) -> &BigUint {
        &self.radicand
    }

    /// `floor(root * 2^bits)`. The root lies in
    /// `[floor_scaled(bits), floor_scaled(bits) + 1] / 2^bits`, which is the
    /// interval `bits` rational bisection steps reach from the integer bracket.
    pub fn floor_scaled(&self, bits: u32) -> BigUint {
        let n = self.radical.index();
        let scaled = &self.radicand << (n as usize * bits as usize);
        let r = scaled.nth_root(n);
        debug_assert!(num_traits::pow(r.clone(), n as usize) <= scaled);
        debug_assert!(num_traits::pow(&r + 1u32, n as usize) > scaled);
        r
    }

    /// Exact rational enclosure at the given bisection depth.
    pub fn enclosure(&self, bits: u32) -> (Rat, Rat) {
        let lo = BigInt::from_biguint(Sign::Plus, self.floor_scaled(bits));
        let hi = &lo + 1;
        let scale = BigInt::one() << bits as usize;
        (
            Rat::new(lo, scale.clone()).expect("nonzero scale"),
            Rat::new(hi, scale).expect("nonzero scale"),
        )
    }
}

impl fmt::Display for Surd {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}({})", self.radical.name(), self.radicand)
    }
}

/// Splits `root_n(value)` into `outer * root_n(radicand)` where the radicand is
/// an integer with its perfect `n`-th power factors removed (as far as trial
/// division up to [`TRIAL_DIVISION_LIMIT`] and a final perfect-power test find
/// them). A radicand of 1 means the root is the rational `outer`.
fn canonical_root(radical: Radical, value: &Rat) -> Result<(Rat, BigUint), NumericError> {
    let n = radical.index();
    if value.is_zero() {
        return Ok((Rat::zero(), BigUint::one()));
    }
    let negative = value.is_negative();
    if negative && radical == Radical::Sqrt {
        return Err(NumericError::NegativeRadicand);
    }
    // root_n(p/q) = root_n(p * q^(n-1)) / q
    let p = value.numer().magnitude().clone();
    let q = value.denom().magnitude().clone();
    let mut radicand = p * num_traits::pow(q.clone(), (n - 1) as usize);
    let mut outer = BigUint::one();
    let mut prime = 2u32;
    while prime < TRIAL_DIVISION_LIMIT {
        let power = BigUint::from(prime).pow(n);
        if power > radicand {
            break;
        }
        while (&radicand % &power).is_zero() {
            radicand /= &power;
            outer *= prime;
        }
        prime += if prime == 2 { 1 } else { 2 };
    }
    let root = radicand.nth_root(n);
    if root.pow(n) == radicand {
        outer *= root;
        radicand = BigUint::one();
    }
    let sign = if negative { Sign::Minus } else { Sign::Plus };
    let outer = Rat::new(BigInt::from_biguint(sign, outer), BigInt::from_biguint(Sign::Plus, q))?;
    Ok((outer, radicand))
}

/// A rational linear combination `c + sum(c_i * surd_i)` with distinct surds
/// and nonzero coefficients, kept sorted by surd so that structural equality
/// is syntactic identity.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Expr {
    constant: Rat,
    terms: Vec<(Surd, Rat)>,
}

impl Expr {
    pub fn rational(value: Rat) -> Expr {
        Expr { constant: value, terms: Vec::new() }
    }

    pub fn root(radical: Radical, value: &Rat) -> Result<Expr, NumericError> {
        let (outer, radicand) = canonical_root(radical, value)?;
        if radicand.is_one() || outer.is_zero() {
            return Ok(Expr::rational(outer));
        }
        Ok(Expr { constant: Rat::zero(), terms: alloc::vec![(Surd { radical, radicand }, outer)] })
    }

    pub fn constant(&self) -> &Rat {
        &self.constant
    }

    pub fn terms(&self) -> &[(Surd, Rat)] {
        &self.terms
    }

    pub fn as_rational(&self) -> Option<&Rat> {
        if self.terms.is_empty() {
            Some(&self.constant)
        } else {
            None
        }
    }

    pub fn add(&self, other: &Expr) -> Expr {
        self.combine(other, &Rat::one())
    }

    pub fn sub(&self, other: &Expr) -> Expr {
        self.combine(other, &Rat::from_int(-1))
    }

    pub fn scale(&self, factor: &Rat) -> Expr {
        if factor.is_zero() {
            return Expr::rational(Rat::zero());
        }
        Expr {
            constant: &self.constant * factor,
            terms: self.terms.iter().map(|(s, c)| (s.clone(), c * factor)).collect(),
        }
    }

    /// `self + factor * other`, merging the sorted term lists.
    pub fn combine(&self, other: &Expr, factor: &Rat) -> Expr {
        let constant = &self.constant + &(&other.constant * factor);
        let mut terms = Vec::with_capacity(self.terms.len() + other.terms.len());
        let (mut i, mut j) = (0, 0);
        while i < self.terms.len() || j < other.terms.len() {
            let ord = match (self.terms.get(i), other.terms.get(j)) {
                (Some((a, _)), Some((b, _))) => a.cmp(b),
                (Some(_), None) => Ordering::Less,
                _ => Ordering::Greater,
            };
            match ord {
                Ordering::Less => {
                    terms.push(self.terms[i].clone());
                    i += 1;
                }
                Ordering::Greater => {
                    let (s, c) = &other.terms[j];
                    terms.push((s.clone(), c * factor));
                    j += 1;
                }
                Ordering::Equal => {
                    let c = &self.terms[i].1 + &(&other.terms[j].1 * factor);
                    if !c.is_zero() {
                        terms.push((self.terms[i].0.clone(), c));
                    }
                    i += 1;
                    j += 1;
                }
            }
        }
        terms.retain(|(_, c)| !c.is_zero());
        Expr { constant, terms }
    }

    /// Exact rational enclosure with every surd taken at `bits` bisection steps.
    pub fn enclosure(&self, bits: u32) -> (Rat, Rat) {
        self.enclosure_with(|s| s.enclosure(bits))
    }

    pub(crate) fn enclosure_with(&self, mut surd_bounds: impl FnMut(&Surd) -> (Rat, Rat)) -> (Rat, Rat) {
        let mut lo = self.constant.clone();
        let mut hi = self.constant.clone();
        for (surd, coeff) in &self.terms {
            let (s_lo, s_hi) = surd_bounds(surd);
            if coeff.is_positive() {
                lo += &(coeff * &s_lo);
                hi += &(coeff * &s_hi);
            } else {
                lo += &(coeff * &s_hi);
                hi += &(coeff * &s_lo);
            }
        }
        (lo, hi)
    }
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        if !self.constant.is_zero() || self.terms.is_empty() {
            write!(f, "{}", self.constant)?;
            first = false;
        }
        for (surd, coeff) in &self.terms {
            let magnitude = coeff.abs();
            if first {
                if coeff.is_negative() {
                    f.write_str("-")?;
                }
            } else {
                f.write_str(if coeff.is_negative() { " - " } else { " + " })?;
            }
            if magnitude != Rat::one() {
                write!(f, "{}*", magnitude)?;
            }
            write!(f, "{}", surd)?;
            first = false;
        }
        Ok(())
    }
}

impl fmt::Debug for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Expr({})", self)
    }
}

/// A real number given by an [`Expr`] together with a rational enclosure
/// `lo <= value <= hi`. Refinement bisects every surd once, halving the width.
#[derive(Clone, PartialEq, Eq)]
pub struct RootBound {
    expr: Expr,
    depth: u32,
    lo: Rat,
    hi: Rat,
}

impl RootBound {
    pub fn new(expr: Expr) -> RootBound {
        RootBound::at_depth(expr, 0)
    }

    pub fn at_depth(expr: Expr, depth: u32) -> RootBound {
        let (lo, hi) = expr.enclosure(depth);
        RootBound { expr, depth, lo, hi }
    }

    pub fn sqrt(q: &Rat) -> Result<RootBound, NumericError> {
        Ok(RootBound::new(Expr::root(Radical::Sqrt, q)?))
    }

    pub fn cbrt(q: &Rat) -> Result<RootBound, NumericError> {
        Ok(RootBound::new(Expr::root(Radical::Cbrt, q)?))
    }

    pub fn refine(&self) -> RootBound {
        RootBound::at_depth(self.expr.clone(), self.depth + 1)
    }

    pub fn expr(&self) -> &Expr {
        &self.expr
    }

    pub fn depth(&self) -> u32 {
        self.depth
    }

    pub fn lo(&self) -> &Rat {
        &self.lo
    }

    pub fn hi(&self) -> &Rat {
        &self.hi
    }

    pub fn width(&self) -> Rat {
        &self.hi - &self.lo
    }
}

impl fmt::Debug for RootBound {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} in [{}, {}]", self.expr, self.lo, self.hi)
    }
}

/// A scalar that is either an exact rational or an irrational expression
/// known through a refinable enclosure.
#[derive(Clone, PartialEq, Eq)]
pub enum Real {
    Exact(Rat),
    Bounded(RootBound),
}

impl Real {
    pub fn from_expr(expr: Expr) -> Real {
        match expr.as_rational() {
            Some(r) => Real::Exact(r.clone()),
            None => Real::Bounded(RootBound::new(expr)),
        }
    }

    pub fn sqrt(q: &Rat) -> Result<Real, NumericError> {
        Ok(Real::from_expr(Expr::root(Radical::Sqrt, q)?))
    }

    pub fn cbrt(q: &Rat) -> Result<Real, NumericError> {
        Ok(Real::from_expr(Expr::root(Radical::Cbrt, q)?))
    }

    pub fn expr(&self) -> Expr {
        match self {
            Real::Exact(r) => Expr::rational(r.clone()),
            Real::Bounded(b) => b.expr.clone(),
        }
    }

    pub fn as_rat(&self) -> Option<&Rat> {
        match self {
            Real::Exact(r) => Some(r),
            Real::Bounded(_) => None,
        }
    }

    pub fn is_exact(&self) -> bool {
        matches!(self, Real::Exact(_))
    }

    pub fn lo(&self) -> &Rat {
        match self {
            Real::Exact(r) => r,
            Real::Bounded(b) => &b.lo,
        }
    }

    pub fn hi(&self) -> &Rat {
        match self {
            Real::Exact(r) => r,
            Real::Bounded(b) => &b.hi,
        }
    }

    pub fn add(&self, other: &Real) -> Real {
        match (self, other) {
            (Real::Exact(a), Real::Exact(b)) => Real::Exact(a + b),
            _ => Real::from_expr(self.expr().add(&other.expr())),
        }
    }

    pub fn sub(&self, other: &Real) -> Real {
        match (self, other) {
            (Real::Exact(a), Real::Exact(b)) => Real::Exact(a - b),
            _ => Real::from_expr(self.expr().sub(&other.expr())),
        }
    }

    pub fn scale(&self, factor: &Rat) -> Real {
        match self {
            Real::Exact(a) => Real::Exact(a * factor),
            Real::Bounded(b) => Real::from_expr(b.expr.scale(factor)),
        }
    }

    /// `m * self + n * other` for the lattice sums of capacity sequences.
    pub fn lattice_sum(&self, m: u64, other: &Real, n: u64) -> Real {
        let (m, n) = (Rat::from_int(m), Rat::from_int(n));
        match (self, other) {
            (Real::Exact(a), Real::Exact(b)) => Real::Exact(a * &m + b * &n),
            _ => Real::from_expr(self.expr().scale(&m).combine(&other.expr(), &n)),
        }
    }

    /// Interval at a given bisection depth (exact values give a point).
    pub fn enclosure(&self, depth: u32) -> (Rat, Rat) {
        match self {
            Real::Exact(r) => (r.clone(), r.clone()),
            Real::Bounded(b) => b.expr.enclosure(depth),
        }
    }
}

impl From<Rat> for Real {
    fn from(r: Rat) -> Real {
        Real::Exact(r)
    }
}

impl fmt::Display for Real {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Real::Exact(r) => write!(f, "{}", r),
            Real::Bounded(b) => write!(f, "{}", b.expr),
        }
    }
}

impl fmt::Debug for Real {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Real::Exact(r) => write!(f, "{}", r),
            Real::Bounded(b) => write!(f, "{:?}", b),
        }
    }
}
