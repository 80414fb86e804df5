//! Enumeration of the Diophantine system
//! `sum(m_i) = 3d - 1`, `sum(m_i^2) = d^2 + 1` and catalogs of the solutions
//! that pass the Cremona test.

use alloc::vec::Vec;

use crate::cremona::{is_exceptional_candidate, ClassVector};

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub enum DiophantineError {
    #[error("length must be at least 1")]
    EmptyLength,
    #[error("no degree bound for vectors of length {0} >= 9")]
    Unbounded(usize),
    #[error("degree must be at least 1, got {0}")]
    BadDegree(i64),
    #[error("class {0} does not belong in this catalog: {1}")]
    InvalidClass(ClassVector, &'static str),
}

/// All non-increasing positive vectors `m` solving the system for degree `d`
/// (zeros trimmed). No Cremona filter.
pub fn solve_de(d: i64) -> Vec<ClassVector> {
    solve_de_bounded(d, None)
}

/// As [`solve_de`], keeping only vectors with at most `max_parts` nonzero
/// entries.
pub fn solve_de_bounded(d: i64, max_parts: Option<usize>) -> Vec<ClassVector> {
    let mut out = Vec::new();
    if d < 1 {
        return out;
    }
    let mut prefix = Vec::new();
    descend(d, 3 * d - 1, d * d + 1, d, max_parts, &mut prefix, &mut out);
    out
}

/// Chooses the next part `m <= bound` given the remaining sum and sum of
/// squares still to be placed and the number of parts still allowed.
fn descend(
    d: i64,
    sum_left: i64,
    squares_left: i64,
    bound: i64,
    parts_left: Option<usize>,
    prefix: &mut Vec<i64>,
    out: &mut Vec<ClassVector>,
) {
    if sum_left == 0 {
        if squares_left == 0 {
            out.push(ClassVector::new(d, prefix.clone()));
        }
        return;
    }
    // every part m satisfies m <= m^2 <= bound * m, and m^2 - m is even
    if squares_left < sum_left || squares_left > bound * sum_left || (squares_left - sum_left) % 2 != 0 {
        return;
    }
    if let Some(n) = parts_left {
        let n = n as i64;
        // Cauchy-Schwarz over the remaining parts
        if n == 0 || sum_left * sum_left > n * squares_left || sum_left > n * bound {
            return;
        }
    }
    let mut m = bound.min(sum_left).min(isqrt(squares_left));
    while m >= 1 {
        // the rest uses parts <= m, so its square sum is at most m * (sum left)
        if m * sum_left < squares_left {
            break;
        }
        prefix.push(m);
        descend(d, sum_left - m, squares_left - m * m, m, parts_left.map(|n| n - 1), prefix, out);
        prefix.pop();
        m -= 1;
    }
}

fn isqrt(n: i64) -> i64 {
    if n <= 0 {
        0
    } else {
        num_integer::Roots::sqrt(&n)
    }
}

/// Largest `d` with `(9 - k) d^2 - 6d + (1 - k) <= 0`: every solution with at
/// most `k` nonzero parts has degree at most this.
pub fn max_degree_for_length(k: usize) -> Result<i64, DiophantineError> {
    if k == 0 {
        return Err(DiophantineError::EmptyLength);
    }
    if k >= 9 {
        return Err(DiophantineError::Unbounded(k));
    }
    let k = k as i64;
    let holds = |d: i64| (9 - k) * d * d - 6 * d + (1 - k) <= 0;
    let mut d = 0;
    while holds(d + 1) {
        d += 1;
    }
    Ok(d)
}

/// Solutions of degree `d` split into those that pass the Cremona test and
/// those that do not.
pub fn classify_degree(d: i64, max_parts: Option<usize>) -> (Vec<ClassVector>, Vec<ClassVector>) {
    solve_de_bounded(d, max_parts).into_iter().partition(is_exceptional_candidate)
}

/// Exceptional classes up to a degree bound, sorted by degree and then
/// lexicographically, together with the solutions the Cremona test rejected.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Catalog {
    d_max: i64,
    max_parts: Option<usize>,
    classes: Vec<ClassVector>,
    rejected: Vec<ClassVector>,
}

pub fn build_catalog(d_max: i64, max_parts: Option<usize>) -> Result<Catalog, DiophantineError> {
    if d_max < 1 {
        return Err(DiophantineError::BadDegree(d_max));
    }
    let per_degree = (1..=d_max).map(|d| classify_degree(d, max_parts));
    Ok(Catalog::from_degrees(d_max, max_parts, per_degree))
}

impl Catalog {
    /// Merges per-degree results (in any order) into a catalog.
    pub fn from_degrees(
        d_max: i64,
        max_parts: Option<usize>,
        per_degree: impl IntoIterator<Item = (Vec<ClassVector>, Vec<ClassVector>)>,
    ) -> Catalog {
        let mut classes = Vec::new();
        let mut rejected = Vec::new();
        for (acc, rej) in per_degree {
            classes.extend(acc);
            rejected.extend(rej);
        }
        classes.sort();
        classes.dedup();
        rejected.sort();
        rejected.dedup();
        Catalog { d_max, max_parts, classes, rejected }
    }

    /// Rebuilds a catalog from stored data, re-checking every class.
    pub fn from_parts(
        d_max: i64,
        max_parts: Option<usize>,
        classes: Vec<ClassVector>,
        rejected: Vec<ClassVector>,
    ) -> Result<Catalog, DiophantineError> {
        for c in &classes {
            if c.degree() > d_max || max_parts.is_some_and(|k| c.parts() > k) {
                return Err(DiophantineError::InvalidClass(c.clone(), "outside the catalog bounds"));
            }
            if !is_exceptional_candidate(c) {
                return Err(DiophantineError::InvalidClass(c.clone(), "not an exceptional class"));
            }
        }
        for c in &rejected {
            if !c.solves_de() || is_exceptional_candidate(c) {
                return Err(DiophantineError::InvalidClass(c.clone(), "not a rejected solution"));
            }
        }
        Ok(Catalog::from_degrees(d_max, max_parts, [(classes, rejected)]))
    }

    pub fn d_max(&self) -> i64 {
        self.d_max
    }

    pub fn max_parts(&self) -> Option<usize> {
        self.max_parts
    }

    pub fn classes(&self) -> &[ClassVector] {
        &self.classes
    }

    /// Solutions of the system that failed the Cremona test.
    pub fn rejected(&self) -> &[ClassVector] {
        &self.rejected
    }

    pub fn len(&self) -> usize {
        self.classes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.classes.is_empty()
    }

    pub fn of_degree(&self, d: i64) -> impl Iterator<Item = &ClassVector> {
        self.classes.iter().filter(move |c| c.degree() == d)
    }
}
