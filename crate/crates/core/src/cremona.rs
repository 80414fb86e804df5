//! Homology classes `dL - sum(m_i E_i)` in blow-ups of the projective plane
//! and the Cremona reduction that certifies them as exceptional.

use alloc::vec::Vec;
use core::fmt;

/// `(d; m_1, ..., m_k)`, stored with the `m_i` sorted non-increasing and all
/// zero entries dropped (a zero coefficient carries no information, and the
/// number of blown-up points is implicit).
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ClassVector {
    d: i64,
    m: Vec<i64>,
}

impl ClassVector {
    pub fn new(d: i64, m: impl Into<Vec<i64>>) -> ClassVector {
        let mut m = m.into();
        m.retain(|&x| x != 0);
        m.sort_unstable_by(|a, b| b.cmp(a));
        ClassVector { d, m }
    }

    /// The reduction target `(0; -1)`.
    pub fn zero_class() -> ClassVector {
        ClassVector { d: 0, m: alloc::vec![-1] }
    }

    pub fn degree(&self) -> i64 {
        self.d
    }

    pub fn multiplicities(&self) -> &[i64] {
        &self.m
    }

    /// Number of nonzero entries.
    pub fn parts(&self) -> usize {
        self.m.len()
    }

    pub fn is_zero_class(&self) -> bool {
        self.d == 0 && self.m == [-1]
    }

    /// `sum(m) - (3d - 1)`: zero for solutions of the first equation.
    pub fn linear_defect(&self) -> i64 {
        self.m.iter().sum::<i64>() - (3 * self.d - 1)
    }

    /// `sum(m^2) - (d^2 + 1)`: zero for solutions of the second equation.
    pub fn quadratic_defect(&self) -> i64 {
        self.m.iter().map(|x| x * x).sum::<i64>() - (self.d * self.d + 1)
    }

    pub fn solves_de(&self) -> bool {
        self.linear_defect() == 0 && self.quadratic_defect() == 0
    }

    /// The three largest entries of the infinite vector `m, 0, 0, ...`.
    fn top_three(&self) -> [i64; 3] {
        let mut top = [0i64; 3];
        for (slot, &x) in top.iter_mut().zip(self.m.iter().filter(|&&x| x > 0)) {
            *slot = x;
        }
        top
    }

    /// `d - (m1 + m2 + m3)` for the move that would be applied next.
    pub fn cremona_delta(&self) -> i64 {
        self.d - self.top_three().iter().sum::<i64>()
    }

    /// Compact rendering with exponents for repeated entries, e.g.
    /// `(6; 3, 2^7)`.
    pub fn compact(&self) -> alloc::string::String {
        use core::fmt::Write;
        let mut out = alloc::string::String::new();
        let _ = write!(out, "({};", self.d);
        let mut i = 0;
        let mut first = true;
        while i < self.m.len() {
            let mut j = i;
            while j < self.m.len() && self.m[j] == self.m[i] {
                j += 1;
            }
            let _ = write!(out, "{}{}", if first { " " } else { ", " }, self.m[i]);
            if j - i > 1 {
                let _ = write!(out, "^{}", j - i);
            }
            first = false;
            i = j;
        }
        out.push(')');
        out
    }
}

impl fmt::Display for ClassVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({};", self.d)?;
        for (i, x) in self.m.iter().enumerate() {
            write!(f, "{}{}", if i == 0 { " " } else { "," }, x)?;
        }
        f.write_str(")")
    }
}

impl fmt::Debug for ClassVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

/// `(d; m) -> (d + delta; m1 + delta, m2 + delta, m3 + delta, m4, ...)` with
/// `delta = d - (m1 + m2 + m3)`, then re-sorted. Fewer than three nonzero
/// entries are padded with zeros.
pub fn cremona_move(v: &ClassVector) -> ClassVector {
    let delta = v.cremona_delta();
    let positives = v.m.iter().filter(|&&x| x > 0).count();
    let mut m = Vec::with_capacity(v.m.len() + 3);
    m.extend(v.m[..positives].iter().copied());
    m.resize(positives.max(3), 0);
    for x in &mut m[..3] {
        *x += delta;
    }
    m.extend(v.m[positives..].iter().copied());
    ClassVector::new(v.d + delta, m)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ReduceOutcome {
    /// Reached `(0; -1)` after this many moves.
    ReducesToZero(usize),
    /// A fixed point of the move (`delta = 0`) or a negative degree.
    Stuck(ClassVector),
    BudgetExhausted,
}

/// Outcome together with every iterate, starting with the input.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Reduction {
    pub outcome: ReduceOutcome,
    pub iterates: Vec<ClassVector>,
}

pub fn default_max_steps(v: &ClassVector) -> usize {
    10 * (v.d.max(0) as usize + v.parts()) + 64
}

pub fn reduce(v: &ClassVector, max_steps: usize) -> ReduceOutcome {
    reduce_trace(v, max_steps).outcome
}

pub fn reduce_trace(v: &ClassVector, max_steps: usize) -> Reduction {
    let mut iterates = alloc::vec![v.clone()];
    let mut current = v.clone();
    if current.is_zero_class() {
        return Reduction { outcome: ReduceOutcome::ReducesToZero(0), iterates };
    }
    for step in 1..=max_steps {
        if current.d < 0 || current.cremona_delta() == 0 {
            return Reduction { outcome: ReduceOutcome::Stuck(current), iterates };
        }
        current = cremona_move(&current);
        iterates.push(current.clone());
        if current.is_zero_class() {
            return Reduction { outcome: ReduceOutcome::ReducesToZero(step), iterates };
        }
    }
    Reduction { outcome: ReduceOutcome::BudgetExhausted, iterates }
}

/// True for `d >= 1`, non-negative entries, both equations of the
/// Diophantine system, and a Cremona reduction to `(0; -1)`.
pub fn is_exceptional_candidate(v: &ClassVector) -> bool {
    if v.d < 1 || v.m.iter().any(|&x| x < 0) || !v.solves_de() {
        return false;
    }
    matches!(reduce(v, default_max_steps(v)), ReduceOutcome::ReducesToZero(_))
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    fn cv(d: i64, m: &[i64]) -> ClassVector {
        ClassVector::new(d, m.to_vec())
    }

    #[test]
    fn moves() {
        assert_eq!(cremona_move(&cv(2, &[1, 1, 1, 1, 1])), cv(1, &[1, 1]));
        assert_eq!(cremona_move(&cv(1, &[1, 1])), ClassVector::zero_class());
        // delta = 6 - 7 = -1: (3,2,2) -> (2,1,1), five 2s untouched
        let moved = cremona_move(&cv(6, &[3, 2, 2, 2, 2, 2, 2, 2]));
        assert_eq!(moved, cv(5, &[2, 2, 2, 2, 2, 2, 1, 1]));
        assert!(moved.solves_de());
    }

    #[test]
    fn zero_padding_goes_between_positive_and_negative_entries() {
        // (2; 1, -1) has top three (1, 0, 0), delta = 1
        let v = ClassVector::new(2, vec![1, -1]);
        assert_eq!(v.cremona_delta(), 1);
        assert_eq!(cremona_move(&v), ClassVector::new(3, vec![2, 1, 1, -1]));
    }

    #[test]
    fn reductions() {
        assert_eq!(reduce(&cv(2, &[1, 1, 1, 1, 1]), 10), ReduceOutcome::ReducesToZero(2));
        assert_eq!(reduce(&ClassVector::zero_class(), 1), ReduceOutcome::ReducesToZero(0));
        assert_eq!(reduce(&cv(1, &[1]), 10), ReduceOutcome::Stuck(cv(1, &[1])));
        assert_eq!(reduce(&cv(-1, &[1]), 10), ReduceOutcome::Stuck(cv(-1, &[1])));
    }

    #[test]
    fn budget_is_respected() {
        let v = cv(6, &[3, 2, 2, 2, 2, 2, 2, 2]);
        assert_eq!(reduce(&v, 1), ReduceOutcome::BudgetExhausted);
        let trace = reduce_trace(&v, 64);
        assert!(matches!(trace.outcome, ReduceOutcome::ReducesToZero(n) if n == trace.iterates.len() - 1));
        assert_eq!(trace.iterates.first(), Some(&v));
        assert_eq!(trace.iterates.last(), Some(&ClassVector::zero_class()));
    }

    #[test]
    fn exceptional_candidates() {
        assert!(is_exceptional_candidate(&cv(6, &[3, 2, 2, 2, 2, 2, 2, 2])));
        assert!(is_exceptional_candidate(&cv(1, &[1, 1])));
        assert!(!is_exceptional_candidate(&cv(2, &[2, 1])));
        assert!(!is_exceptional_candidate(&ClassVector::zero_class()));
    }

    #[test]
    fn compact_form() {
        assert_eq!(cv(6, &[3, 2, 2, 2, 2, 2, 2, 2]).compact(), "(6; 3, 2^7)");
        assert_eq!(cv(1, &[1, 1]).compact(), "(1; 1^2)");
        assert_eq!(cv(1, &[1, 1]).to_string(), "(1; 1,1)");
    }
}
