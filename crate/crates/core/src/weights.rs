//! Weight expansions: the ball sizes whose packing problem is equivalent to
//! embedding the ellipsoid `E(1, a)` into a ball.

use alloc::vec::Vec;
use core::fmt;

use num_traits::ToPrimitive;

use crate::numeric::Rat;

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub enum WeightError {
    #[error("weight expansion needs a >= 1, got {0}")]
    BelowOne(Rat),
    #[error("multiplicity does not fit in 64 bits")]
    Overflow,
}

/// A run of `multiplicity` equal weights.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WeightBlock {
    pub value: Rat,
    pub multiplicity: u64,
}

/// `w(a) = (1 x l0, w1 x l1, ..., wN x lN)` with `1 > w1 > ... > wN > 0`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WeightExpansion {
    source: Rat,
    blocks: Vec<WeightBlock>,
}

/// Expands `a >= 1` by the subtraction form of the Euclidean algorithm on the
/// pair `(a, 1)`: each step records how many copies of the smaller number fit
/// into the larger one and continues with the remainder.
pub fn weight_expansion(a: &Rat) -> Result<WeightExpansion, WeightError> {
    if *a < Rat::one() {
        return Err(WeightError::BelowOne(a.clone()));
    }
    let mut blocks = Vec::new();
    let mut larger = a.clone();
    let mut smaller = Rat::one();
    while !smaller.is_zero() {
        let count = (&larger / &smaller).floor();
        let remainder = &larger - &(&smaller * &Rat::from_int(count.clone()));
        let multiplicity = count.to_u64().ok_or(WeightError::Overflow)?;
        blocks.push(WeightBlock { value: smaller.clone(), multiplicity });
        larger = smaller;
        smaller = remainder;
    }
    Ok(WeightExpansion { source: a.clone(), blocks })
}

impl WeightExpansion {
    pub fn source(&self) -> &Rat {
        &self.source
    }

    pub fn blocks(&self) -> &[WeightBlock] {
        &self.blocks
    }

    /// Continued-fraction digits of the source value.
    pub fn multiplicities(&self) -> Vec<u64> {
        self.blocks.iter().map(|b| b.multiplicity).collect()
    }

    /// Number of weights counted with multiplicity.
    pub fn len(&self) -> u64 {
        self.blocks.iter().map(|b| b.multiplicity).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.blocks.is_empty()
    }

    /// The non-increasing list `(a_1, ..., a_k)`.
    pub fn flat(&self) -> Vec<Rat> {
        self.blocks
            .iter()
            .flat_map(|b| core::iter::repeat(b.value.clone()).take(b.multiplicity as usize))
            .collect()
    }

    pub fn sum_of_squares(&self) -> Rat {
        self.blocks.iter().map(|b| b.value.square() * Rat::from_int(b.multiplicity)).sum()
    }

    pub fn sum(&self) -> Rat {
        self.blocks.iter().map(|b| &b.value * &Rat::from_int(b.multiplicity)).sum()
    }
}

/// `multiplicities(w)` as a free function.
pub fn multiplicities(w: &WeightExpansion) -> Vec<u64> {
    w.multiplicities()
}

impl fmt::Display for WeightExpansion {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for b in &self.blocks {
            for _ in 0..b.multiplicity {
                if !first {
                    f.write_str(",")?;
                }
                write!(f, "{}", b.value)?;
                first = false;
            }
        }
        Ok(())
    }
}
