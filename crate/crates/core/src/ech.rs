//! ECH capacities of ellipsoids: `N_k(a, b)` is the `k`-th smallest element
//! (from `k = 0`, with multiplicity) of `{ m a + n b : m, n >= 0 }`, and
//! `E(a, b)` embeds into `E(c, d)` exactly when `N_k(a, b) <= N_k(c, d)` for
//! every `k`.

use alloc::collections::BTreeSet;
use alloc::vec::Vec;
use core::fmt;

use crate::numeric::{Comparison, Expr, Radical, Rat, Real, Refiner};

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub enum EchError {
    #[error("ellipsoid parameters must be positive")]
    NonPositive,
    #[error("could not order the sequence at index {0} within the refinement budget")]
    Undecided(usize),
    #[error("the tolerance must be positive")]
    BadTolerance,
    #[error("a must be at least 1, got {0}")]
    BelowOne(Rat),
    #[error("k must be at least 2, got {0}")]
    BadStabilityIndex(u64),
}

/// The first `len()` terms of `N(a, b)` with the lattice point behind each.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EchSequence {
    a: Real,
    b: Real,
    values: Vec<Real>,
    points: Vec<(u64, u64)>,
}

impl EchSequence {
    pub fn a(&self) -> &Real {
        &self.a
    }

    pub fn b(&self) -> &Real {
        &self.b
    }

    pub fn values(&self) -> &[Real] {
        &self.values
    }

    /// `(m, n)` with `N_k = m a + n b`.
    pub fn points(&self) -> &[(u64, u64)] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }
}

fn check_positive(x: &Real, refiner: &mut Refiner) -> Result<(), EchError> {
    match refiner.sign(x) {
        Comparison::Greater => Ok(()),
        _ => Err(EchError::NonPositive),
    }
}

/// `N_0, ..., N_K` by best-first expansion from `(0, 0)`: the frontier is kept
/// sorted, and taking a point adds `(m + 1, n)` and `(m, n + 1)`.
pub fn ech_capacities(a: &Real, b: &Real, k_max: usize, refiner: &mut Refiner) -> Result<EchSequence, EchError> {
    check_positive(a, refiner)?;
    check_positive(b, refiner)?;
    let mut values = Vec::with_capacity(k_max + 1);
    let mut points = Vec::with_capacity(k_max + 1);
    // sorted decreasingly so the minimum pops off the end
    let mut frontier: Vec<(Real, (u64, u64))> = alloc::vec![(Real::Exact(Rat::zero()), (0, 0))];
    let mut seen: BTreeSet<(u64, u64)> = BTreeSet::new();
    seen.insert((0, 0));
    while values.len() <= k_max {
        let (value, (m, n)) = frontier.pop().expect("the frontier never empties");
        values.push(value);
        points.push((m, n));
        if values.len() > k_max {
            break;
        }
        for next in [(m + 1, n), (m, n + 1)] {
            if seen.insert(next) {
                let v = a.lattice_sum(next.0, b, next.1);
                // entries from index values.len() on are no longer ordered
                let pos = insertion_point(&frontier, &v, refiner).ok_or(EchError::Undecided(values.len()))?;
                frontier.insert(pos, (v, next));
            }
        }
    }
    Ok(EchSequence { a: a.clone(), b: b.clone(), values, points })
}

/// Index keeping `frontier` non-increasing with `v` placed after equal values.
fn insertion_point(frontier: &[(Real, (u64, u64))], v: &Real, refiner: &mut Refiner) -> Option<usize> {
    let (mut lo, mut hi) = (0, frontier.len());
    while lo < hi {
        let mid = (lo + hi) / 2;
        match refiner.compare(&frontier[mid].0, v) {
            Comparison::Greater | Comparison::Equal => lo = mid + 1,
            Comparison::Less => hi = mid,
            Comparison::Undecided => return None,
        }
    }
    Some(lo)
}

/// Rational-parameter convenience wrapper.
pub fn ech_capacities_rat(a: &Rat, b: &Rat, k_max: usize) -> Result<Vec<Rat>, EchError> {
    let seq = ech_capacities(&a.clone().into(), &b.clone().into(), k_max, &mut Refiner::default())?;
    Ok(seq.values.into_iter().map(|v| v.as_rat().cloned().expect("rational inputs")).collect())
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum EchDecision {
    /// `N_k(src) <= N_k(tgt)` for `k <= certified_up_to`. With
    /// `fully_certified` the lattice-count bound covers every larger `k`.
    Embeds { certified_up_to: usize, separation_index: Option<u64>, fully_certified: bool },
    /// First `k` with `N_k(src) > N_k(tgt)`.
    Obstructed(usize),
    /// Comparison or ordering at this index stayed open at the budget.
    Undecided(usize),
}

impl fmt::Display for EchDecision {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            EchDecision::Embeds { certified_up_to, fully_certified, .. } => {
                write!(f, "embeds (checked to k={}{})", certified_up_to, if *fully_certified { ", all k" } else { "" })
            }
            EchDecision::Obstructed(k) => write!(f, "obstructed at k={}", k),
            EchDecision::Undecided(k) => write!(f, "undecided at k={}", k),
        }
    }
}

/// Termwise comparison of two sequences of equal length.
fn first_violation(src: &EchSequence, tgt: &EchSequence, refiner: &mut Refiner) -> Option<EchDecision> {
    for (k, (x, y)) in src.values.iter().zip(&tgt.values).enumerate() {
        match refiner.compare(x, y) {
            Comparison::Greater => return Some(EchDecision::Obstructed(k)),
            Comparison::Undecided => return Some(EchDecision::Undecided(k)),
            _ => {}
        }
    }
    None
}

/// Smallest `k` with `sqrt(2ab k) + (a + b) <= sqrt(2cd k) - (c + d)`, for
/// rational parameters with `cd > ab`. The lattice points under
/// `x a + y b <= L` number between `L^2 / 2ab` and `(L + a + b)^2 / 2ab`, so
/// `N_k(a, b) <= sqrt(2ab (k + 1))` and `N_k(c, d) >= sqrt(2cd (k + 1)) - (c + d)`;
/// from this index on the source sequence stays below the target.
pub fn separation_index(src: (&Rat, &Rat), tgt: (&Rat, &Rat)) -> Option<u64> {
    let two = Rat::from_int(2);
    let ab = &two * &(src.0 * src.1);
    let cd = &two * &(tgt.0 * tgt.1);
    if cd <= ab || !ab.is_positive() {
        return None;
    }
    let slack = src.0 + src.1 + tgt.0 + tgt.1;
    let mut refiner = Refiner::default();
    // holds(k): sqrt(cd k) - sqrt(ab k) - slack >= 0, monotone in k
    let mut holds = |k: u64| {
        let kk = Rat::from_int(k);
        let lhs = Expr::root(Radical::Sqrt, &(&cd * &kk))
            .expect("non-negative")
            .sub(&Expr::root(Radical::Sqrt, &(&ab * &kk)).expect("non-negative"));
        matches!(
            refiner.compare(&Real::from_expr(lhs), &Real::Exact(slack.clone())),
            Comparison::Greater | Comparison::Equal
        )
    };
    let mut hi = 1u64;
    while !holds(hi) {
        hi = hi.checked_mul(2)?;
    }
    let mut lo = 0u64;
    while hi - lo > 1 {
        let mid = lo + (hi - lo) / 2;
        if holds(mid) {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Some(if holds(lo) { lo } else { hi })
}

/// Compares `N_k(src)` and `N_k(tgt)` for `k = 0..=k_max`.
pub fn ech_decide(
    src: (&Real, &Real),
    tgt: (&Real, &Real),
    k_max: usize,
    refiner: &mut Refiner,
) -> Result<EchDecision, EchError> {
    let s = match ech_capacities(src.0, src.1, k_max, refiner) {
        Ok(s) => s,
        Err(EchError::Undecided(k)) => return Ok(EchDecision::Undecided(k)),
        Err(e) => return Err(e),
    };
    let t = match ech_capacities(tgt.0, tgt.1, k_max, refiner) {
        Ok(t) => t,
        Err(EchError::Undecided(k)) => return Ok(EchDecision::Undecided(k)),
        Err(e) => return Err(e),
    };
    if let Some(verdict) = first_violation(&s, &t, refiner) {
        return Ok(verdict);
    }
    let separation = match (src.0.as_rat(), src.1.as_rat(), tgt.0.as_rat(), tgt.1.as_rat()) {
        (Some(a), Some(b), Some(c), Some(d)) => separation_index((a, b), (c, d)),
        _ => None,
    };
    let fully_certified = separation.is_some_and(|k0| k0 <= k_max as u64 + 1);
    Ok(EchDecision::Embeds { certified_up_to: k_max, separation_index: separation, fully_certified })
}

/// Bisection bracket `[lo, hi]`, `hi - lo <= tol`, for the ball capacity of
/// `E(1, a)` as seen by the first `k_max + 1` ECH capacities: `E(1, a)`
/// embeds into `B(hi)` and is obstructed in `B(lo)` up to that index.
pub fn ech_ball_capacity(a: &Rat, k_max: usize, tol: &Rat) -> Result<(Rat, Rat), EchError> {
    if *a < Rat::one() {
        return Err(EchError::BelowOne(a.clone()));
    }
    if !tol.is_positive() {
        return Err(EchError::BadTolerance);
    }
    if *a == Rat::one() {
        return Ok((Rat::one(), Rat::one()));
    }
    let src = ech_capacities_rat(&Rat::one(), a, k_max)?;
    // N(c, c) = c N(1, 1)
    let ball = ech_capacities_rat(&Rat::one(), &Rat::one(), k_max)?;
    let embeds = |c: &Rat| src.iter().zip(&ball).all(|(x, y)| *x <= c * y);
    let (mut lo, mut hi) = (Rat::one(), a.clone());
    let two = Rat::from_int(2);
    while &hi - &lo > *tol {
        let mid = (&lo + &hi) / &two;
        if embeds(&mid) {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok((lo, hi))
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum StabilityResult {
    /// Both steps hold termwise for `k <= certified_up_to`.
    Holds { certified_up_to: usize },
    /// Step 1 is `E(1, k) -> E(k^(1/3), k^(2/3))`, step 2 is
    /// `E(1, k^(2/3)) -> B(k^(1/3))`.
    FailsAt { step: u8, index: usize },
    Undecided { step: u8, index: usize },
}

impl fmt::Display for StabilityResult {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            StabilityResult::Holds { certified_up_to } => write!(f, "holds (checked to k={})", certified_up_to),
            StabilityResult::FailsAt { step, index } => write!(f, "fails at step {} index {}", step, index),
            StabilityResult::Undecided { step, index } => write!(f, "undecided at step {} index {}", step, index),
        }
    }
}

/// The two four-dimensional embeddings behind cutting `B^6(k^(1/3))` into
/// `k` balls, checked through ECH capacities up to `k_max`.
pub fn stability_chain_check(k: u64, k_max: usize, refiner: &mut Refiner) -> Result<StabilityResult, EchError> {
    if k < 2 {
        return Err(EchError::BadStabilityIndex(k));
    }
    let kk = Rat::from_int(k);
    let one = Real::Exact(Rat::one());
    let cbrt_k = Real::cbrt(&kk).expect("positive");
    let cbrt_k2 = Real::cbrt(&kk.square()).expect("positive");
    let steps = [
        ((one.clone(), Real::Exact(kk.clone())), (cbrt_k.clone(), cbrt_k2.clone())),
        ((one, cbrt_k2), (cbrt_k.clone(), cbrt_k)),
    ];
    for (i, (src, tgt)) in steps.iter().enumerate() {
        let step = i as u8 + 1;
        match ech_decide((&src.0, &src.1), (&tgt.0, &tgt.1), k_max, refiner)? {
            EchDecision::Embeds { .. } => {}
            EchDecision::Obstructed(index) => return Ok(StabilityResult::FailsAt { step, index }),
            EchDecision::Undecided(index) => return Ok(StabilityResult::Undecided { step, index }),
        }
    }
    Ok(StabilityResult::Holds { certified_up_to: k_max })
}
