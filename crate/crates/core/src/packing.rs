//! Ball packings `B(a_1) + ... + B(a_k) -> B(A)`: the volume constraint, the
//! constraints from exceptional classes, capacities and packing numbers.
//!
//! A class `E = (d; m)` obstructs every target with `A <= <m, a> / d` (entries
//! paired largest with largest). For a target above the volume bound only
//! classes with `<m, a> >= sqrt(S) d`, `S = sum(a_i^2)`, matter, and those
//! satisfy `|m - d a / sqrt(S)| <= 1` because `|m|^2 = d^2 + 1`. The
//! [`NearVolumeSearch`] enumerates exactly that unit ball around `d a / sqrt(S)`
//! degree by degree, which keeps capacity computations cheap for any number
//! of weights. A [`Catalog`] gives an independent route to the same values.

use alloc::vec::Vec;
use core::fmt;

use num_bigint::BigInt;
use num_integer::{Integer, Roots};
use num_traits::{One, ToPrimitive};

use crate::cremona::{is_exceptional_candidate, ClassVector};
use crate::diophantine::{max_degree_for_length, Catalog};
use crate::numeric::{Rat, Real};

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub enum PackingError {
    #[error("no weights given")]
    Empty,
    #[error("weights must be positive, got {0}")]
    NonPositiveWeight(Rat),
    #[error("degree bound must be at least 1, got {0}")]
    BadDegree(i64),
    #[error("weights too large for the class search (numerators and common denominator must stay below 2^32)")]
    TooLarge,
}

/// Largest degree the class search accepts.
pub const MAX_SEARCH_DEGREE: i64 = 1 << 20;

/// Bits of precision for the target point `d a / sqrt(S)`.
const TARGET_BITS: u32 = 20;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PackingProblem {
    weights: Vec<Rat>,
    target: Rat,
}

impl PackingProblem {
    /// Sorts the weights non-increasingly (relabeling balls only permutes the
    /// class entries).
    pub fn new(weights: Vec<Rat>, target: Rat) -> Result<PackingProblem, PackingError> {
        Ok(PackingProblem { weights: sorted_weights(&weights)?, target })
    }

    pub fn weights(&self) -> &[Rat] {
        &self.weights
    }

    pub fn target(&self) -> &Rat {
        &self.target
    }
}

fn sorted_weights(a: &[Rat]) -> Result<Vec<Rat>, PackingError> {
    if a.is_empty() {
        return Err(PackingError::Empty);
    }
    if let Some(bad) = a.iter().find(|x| !x.is_positive()) {
        return Err(PackingError::NonPositiveWeight(bad.clone()));
    }
    let mut a = a.to_vec();
    a.sort_by(|x, y| y.cmp(x));
    Ok(a)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Witness {
    VolumeBound,
    Class(ClassVector),
}

/// Why a capacity is known to be final.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Certificate {
    /// At most eight weights: every relevant class has degree at most
    /// `max_degree_for_length(k)` and all of them were searched.
    FiniteLength,
    /// `(D + 1)^2 (v^2 - S) >= S` for the searched degree `D`: any class of
    /// higher degree satisfies `<m, a>^2 / d^2 <= S (1 + 1/d^2) <= v^2`.
    CauchySchwarz,
    /// `9 a_1^2 <= S`: any class has `<m, a> / d <= a_1 (3d - 1) / d < 3 a_1 <= sqrt(S)`.
    VolumeDominance,
}

impl fmt::Display for Certificate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Certificate::FiniteLength => "finite-length",
            Certificate::CauchySchwarz => "cauchy-schwarz",
            Certificate::VolumeDominance => "volume-dominance",
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CapacityResult {
    /// `max(sqrt(S), <m, a>/d over classes)`.
    pub value: Real,
    /// `value^2`, always rational.
    pub value_squared: Rat,
    pub witness: Witness,
    pub certificate: Option<Certificate>,
    /// Highest degree searched.
    pub d_max_used: i64,
}

impl CapacityResult {
    pub fn certified(&self) -> bool {
        self.certificate.is_some()
    }
}

/// `<m, a> / d` with the sorted entries of `E` paired with the sorted weights;
/// the shorter list is padded with zeros.
pub fn constraint_value(e: &ClassVector, a: &[Rat]) -> Rat {
    let dot: Rat = e
        .multiplicities()
        .iter()
        .zip(a)
        .map(|(&m, w)| w * &Rat::from_int(m))
        .sum();
    dot / Rat::from_int(e.degree())
}

fn sum_of_squares(a: &[Rat]) -> Rat {
    a.iter().map(Rat::square).sum()
}

/// Whether classes of degree above `searched` cannot exceed `value`, given
/// `value^2 > S`.
fn cauchy_schwarz_cutoff(searched: i64, value_squared: &Rat, s: &Rat) -> bool {
    let gap = value_squared - s;
    gap.is_positive() && Rat::from_int(searched + 1).square() * gap >= *s
}

/// Enumerates the exceptional classes with at most `k` parts whose constraint
/// reaches the volume bound of a fixed weight vector, one degree at a time.
#[derive(Clone, Debug)]
pub struct NearVolumeSearch {
    weights: Vec<Rat>,
    /// `a_i * q` for the common denominator `q`.
    scaled: Vec<i128>,
    denom: BigInt,
    /// `sum(scaled^2)`.
    norm_sq: i128,
    /// `floor(sqrt(norm_sq) * 2^TARGET_BITS)`.
    norm_floor: i128,
}

impl NearVolumeSearch {
    pub fn new(a: &[Rat]) -> Result<NearVolumeSearch, PackingError> {
        let weights = sorted_weights(a)?;
        let denom = weights.iter().fold(BigInt::one(), |acc, w| acc.lcm(w.denom()));
        let limit = BigInt::one() << 32usize;
        if denom >= limit || weights.len() > (1 << 16) {
            return Err(PackingError::TooLarge);
        }
        let scaled: Vec<i128> = weights
            .iter()
            .map(|w| {
                let v = w.numer() * (&denom / w.denom());
                if v >= limit {
                    None
                } else {
                    v.to_i128()
                }
            })
            .collect::<Option<_>>()
            .ok_or(PackingError::TooLarge)?;
        let norm_sq: i128 = scaled.iter().map(|x| x * x).sum();
        let norm_floor = (norm_sq << (2 * TARGET_BITS)).sqrt();
        Ok(NearVolumeSearch { weights, scaled, denom, norm_sq, norm_floor })
    }

    pub fn weights(&self) -> &[Rat] {
        &self.weights
    }

    /// All exceptional classes of degree `d` with at most `k` nonzero entries
    /// and `<m, a> >= sqrt(S) d`, each with its constraint value.
    pub fn classes_at_degree(&self, d: i64) -> Vec<(ClassVector, Rat)> {
        let mut out = Vec::new();
        if d < 1 || d > MAX_SEARCH_DEGREE {
            return out;
        }
        let unit: i128 = 1 << TARGET_BITS;
        let budget: i128 = unit * unit;
        let d128 = d as i128;
        // d a_i / sqrt(S) scaled by 2^TARGET_BITS lies in [lo, hi]
        let targets: Vec<(i128, i128)> = self
            .scaled
            .iter()
            .map(|&x| {
                let num = d128 * x * budget;
                (Integer::div_floor(&num, &(self.norm_floor + 1)), Integer::div_ceil(&num, &self.norm_floor))
            })
            .collect();
        let mut state = SearchState {
            targets: &targets,
            unit,
            budget,
            sum_target: 3 * d128 - 1,
            square_target: d128 * d128 + 1,
            prefix: Vec::with_capacity(self.scaled.len()),
            hits: Vec::new(),
        };
        state.descend(0, d128, 0, 0, 0);
        for m in state.hits {
            let dot: i128 = m.iter().zip(&self.scaled).map(|(&mi, &x)| mi * x).sum();
            if dot <= 0 || BigInt::from(dot) * BigInt::from(dot) < BigInt::from(self.norm_sq) * BigInt::from(d128 * d128) {
                continue;
            }
            let class = ClassVector::new(d, m.iter().map(|&x| x as i64).collect::<Vec<_>>());
            if !is_exceptional_candidate(&class) {
                continue;
            }
            let value = Rat::new(BigInt::from(dot), &self.denom * BigInt::from(d)).expect("d >= 1");
            out.push((class, value));
        }
        out
    }
}

struct SearchState<'a> {
    targets: &'a [(i128, i128)],
    unit: i128,
    budget: i128,
    sum_target: i128,
    square_target: i128,
    prefix: Vec<i128>,
    hits: Vec<Vec<i128>>,
}

impl SearchState<'_> {
    /// Assigns entry `i` given the previous entry, the partial sums and the
    /// squared distance already used (in units of `2^-2 TARGET_BITS`).
    fn descend(&mut self, i: usize, prev: i128, sum: i128, squares: i128, used: i128) {
        let k = self.targets.len();
        if i == k {
            if sum == self.sum_target && squares == self.square_target {
                self.hits.push(self.prefix.clone());
            }
            return;
        }
        let (lo, hi) = self.targets[i];
        let slack = (self.budget - used).sqrt() + 1;
        let m_min = Integer::div_ceil(&(lo - slack), &self.unit).max(0);
        let m_max = Integer::div_floor(&(hi + slack), &self.unit).min(prev);
        let mut m = m_max;
        while m >= m_min {
            let x = m * self.unit;
            let dev = if x < lo {
                lo - x
            } else if x > hi {
                x - hi
            } else {
                0
            };
            let used_next = used + dev * dev;
            let sum_next = sum + m;
            let squares_next = squares + m * m;
            let rest = (k - i - 1) as i128;
            if used_next <= self.budget
                && sum_next <= self.sum_target
                && squares_next <= self.square_target
                && self.sum_target - sum_next <= rest * m
            {
                self.prefix.push(m);
                self.descend(i + 1, m, sum_next, squares_next, used_next);
                self.prefix.pop();
            }
            m -= 1;
        }
    }
}

/// `inf { A : the balls embed into B(A) }`, searching classes up to `d_max`
/// (stopping early once the Cauchy-Schwarz cutoff or the finite-length bound
/// makes further degrees irrelevant).
pub fn capacity(a: &[Rat], d_max: i64) -> Result<CapacityResult, PackingError> {
    if d_max < 1 {
        return Err(PackingError::BadDegree(d_max));
    }
    let search = NearVolumeSearch::new(a)?;
    let a = search.weights();
    let s = sum_of_squares(a);
    let finite_bound = max_degree_for_length(a.len()).ok();
    let mut best: Option<(Rat, ClassVector)> = None;
    let mut searched = 0;
    let mut complete = false;
    for d in 1..=d_max.min(MAX_SEARCH_DEGREE) {
        if finite_bound.is_some_and(|b| d > b) {
            complete = true;
            break;
        }
        if let Some((v, _)) = &best {
            if cauchy_schwarz_cutoff(d - 1, &v.square(), &s) {
                break;
            }
        }
        for (class, value) in search.classes_at_degree(d) {
            // ties keep the lower-degree class
            if best.as_ref().is_none_or(|(v, _)| value > *v) {
                best = Some((value, class));
            }
        }
        searched = d;
    }
    if finite_bound.is_some_and(|b| searched >= b) {
        complete = true;
    }

    let nine_a1_sq = Rat::from_int(9) * a[0].square();
    let (value, value_squared, witness) = match best {
        Some((v, class)) => {
            let sq = v.square();
            (Real::Exact(v), sq, Witness::Class(class))
        }
        None => (Real::sqrt(&s).expect("S > 0"), s.clone(), Witness::VolumeBound),
    };
    let certificate = if complete {
        Some(Certificate::FiniteLength)
    } else if cauchy_schwarz_cutoff(searched, &value_squared, &s) {
        Some(Certificate::CauchySchwarz)
    } else if value_squared == s && nine_a1_sq <= s {
        Some(Certificate::VolumeDominance)
    } else {
        None
    };
    Ok(CapacityResult { value, value_squared, witness, certificate, d_max_used: searched })
}

/// The same maximum computed from an explicit catalog: volume bound versus
/// every catalog class with at most `k` parts. Independent of
/// [`NearVolumeSearch`].
pub fn catalog_capacity(a: &[Rat], catalog: &Catalog) -> Result<(Real, Rat, Witness), PackingError> {
    let a = sorted_weights(a)?;
    let s = sum_of_squares(&a);
    let best = catalog
        .classes()
        .iter()
        .filter(|c| c.parts() <= a.len())
        .map(|c| (constraint_value(c, &a), c))
        .filter(|(v, _)| v.square() >= s)
        .fold(None::<(Rat, &ClassVector)>, |acc, (v, c)| match acc {
            Some((bv, bc)) if bv >= v => Some((bv, bc)),
            _ => Some((v, c)),
        });
    Ok(match best {
        Some((v, c)) => {
            let sq = v.square();
            (Real::Exact(v), sq, Witness::Class(c.clone()))
        }
        None => (Real::sqrt(&s).expect("S > 0"), s, Witness::VolumeBound),
    })
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum PackDecision {
    Yes { certified: bool },
    No(Witness),
}

/// Decides whether the balls embed into the open target ball, using the
/// strict inequalities `A^2 > S` and `A > <m, a>/d`.
pub fn pack_decide(p: &PackingProblem, d_max: i64) -> Result<PackDecision, PackingError> {
    let s = sum_of_squares(&p.weights);
    if p.target.square() <= s || !p.target.is_positive() {
        return Ok(PackDecision::No(Witness::VolumeBound));
    }
    let cap = capacity(&p.weights, d_max)?;
    if let Witness::Class(class) = &cap.witness {
        if cap.value_squared >= p.target.square() {
            return Ok(PackDecision::No(Witness::Class(class.clone())));
        }
    }
    let certified = cap.certified() || cauchy_schwarz_cutoff(cap.d_max_used, &p.target.square(), &s);
    Ok(PackDecision::Yes { certified })
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PackingNumber {
    pub k: u64,
    pub capacity: CapacityResult,
    /// `k / c_k^2`.
    pub value: Rat,
}

pub fn packing_number(k: u64, d_max: i64) -> Result<PackingNumber, PackingError> {
    if k == 0 {
        return Err(PackingError::Empty);
    }
    let ones = alloc::vec![Rat::one(); k as usize];
    let capacity = capacity(&ones, d_max)?;
    let value = Rat::from_int(k) / &capacity.value_squared;
    Ok(PackingNumber { k, capacity, value })
}

/// `constraint_value(E, a)^2 <= (1 + 1/d^2) S`.
pub fn cauchy_schwarz_holds(e: &ClassVector, a: &[Rat]) -> bool {
    let d = Rat::from_int(e.degree());
    let bound = (Rat::one() + Rat::one() / d.square()) * sum_of_squares(a);
    constraint_value(e, a).square() <= bound
}

impl Witness {
    pub fn class(&self) -> Option<&ClassVector> {
        match self {
            Witness::Class(c) => Some(c),
            Witness::VolumeBound => None,
        }
    }
}

impl fmt::Display for Witness {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Witness::VolumeBound => f.write_str("volume"),
            Witness::Class(c) => write!(f, "{}", c),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numeric::rat;
    use alloc::vec;

    fn r(p: i64, q: i64) -> Rat {
        rat(p, q).unwrap()
    }

    fn ones(k: usize) -> Vec<Rat> {
        vec![Rat::one(); k]
    }

    fn cv(d: i64, m: &[i64]) -> ClassVector {
        ClassVector::new(d, m.to_vec())
    }

    #[test]
    fn constraint_values() {
        assert_eq!(constraint_value(&cv(6, &[3, 2, 2, 2, 2, 2, 2, 2]), &ones(8)), r(17, 6));
        assert_eq!(constraint_value(&cv(1, &[1, 1]), &ones(2)), r(2, 1));
        // w(13/2) = (1^6, 1/2, 1/2): (2*6 + 1/2 + 1/2) / 5
        let w = [ones(6), vec![r(1, 2), r(1, 2)]].concat();
        assert_eq!(constraint_value(&cv(5, &[2, 2, 2, 2, 2, 2, 1, 1]), &w), r(13, 5));
        // shorter weight list pads with zeros
        assert_eq!(constraint_value(&cv(1, &[1, 1]), &ones(1)), r(1, 1));
    }

    #[test]
    fn capacities_of_equal_balls() {
        let c8 = capacity(&ones(8), 100).unwrap();
        assert_eq!(c8.value, Real::Exact(r(17, 6)));
        assert_eq!(c8.witness, Witness::Class(cv(6, &[3, 2, 2, 2, 2, 2, 2, 2])));
        assert_eq!(c8.certificate, Some(Certificate::FiniteLength));

        let c5 = capacity(&ones(5), 100).unwrap();
        assert_eq!(c5.value, Real::Exact(r(5, 2)));
        assert_eq!(c5.witness, Witness::Class(cv(2, &[1, 1, 1, 1, 1])));

        let c1 = capacity(&ones(1), 100).unwrap();
        assert_eq!(c1.value, Real::Exact(Rat::one()));
        assert_eq!(c1.witness, Witness::VolumeBound);
        assert!(c1.certified());
    }

    #[test]
    fn volume_dominance_from_nine_balls() {
        for k in 9..=12 {
            let c = capacity(&ones(k), 100).unwrap();
            assert_eq!(c.witness, Witness::VolumeBound);
            assert_eq!(c.value_squared, Rat::from_int(k as i64));
            assert_eq!(c.certificate, Some(Certificate::VolumeDominance));
        }
    }

    #[test]
    fn decisions() {
        let eps = r(1, 1000);
        let p = PackingProblem::new(ones(2), r(2, 1) + eps).unwrap();
        assert_eq!(pack_decide(&p, 1).unwrap(), PackDecision::Yes { certified: true });

        let p = PackingProblem::new(ones(8), r(17, 6)).unwrap();
        assert_eq!(
            pack_decide(&p, 7).unwrap(),
            PackDecision::No(Witness::Class(cv(6, &[3, 2, 2, 2, 2, 2, 2, 2])))
        );

        let p = PackingProblem::new(ones(2), r(3, 2)).unwrap();
        assert_eq!(pack_decide(&p, 1).unwrap(), PackDecision::No(Witness::Class(cv(1, &[1, 1]))));

        let p = PackingProblem::new(ones(4), r(2, 1)).unwrap();
        assert!(matches!(pack_decide(&p, 10).unwrap(), PackDecision::No(_)));
        let p = PackingProblem::new(ones(10), r(3, 1)).unwrap();
        assert_eq!(pack_decide(&p, 10).unwrap(), PackDecision::No(Witness::VolumeBound));
    }

    #[test]
    fn packing_numbers() {
        assert_eq!(packing_number(6, 100).unwrap().value, r(24, 25));
        assert_eq!(packing_number(9, 100).unwrap().value, Rat::one());
        assert_eq!(packing_number(2, 100).unwrap().value, r(1, 2));
    }

    #[test]
    fn input_errors() {
        assert_eq!(capacity(&[], 10), Err(PackingError::Empty));
        assert!(matches!(capacity(&[Rat::zero()], 10), Err(PackingError::NonPositiveWeight(_))));
        assert_eq!(capacity(&ones(2), 0), Err(PackingError::BadDegree(0)));
        let huge = Rat::new(BigInt::one(), BigInt::one() << 40usize).unwrap();
        assert_eq!(capacity(&[Rat::one(), huge], 10), Err(PackingError::TooLarge));
    }
}
