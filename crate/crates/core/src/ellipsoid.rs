//! The ellipsoid capacity `c(a) = inf { A : E(1, a) -> B(A) }` through weight
//! expansions, the closed form of its Fibonacci stairs on `[1, tau^4]`, and
//! staircase scans over rational grids.

use alloc::vec::Vec;

use num_bigint::BigInt;
use num_integer::Integer;

use crate::numeric::{Comparison, Expr, Radical, Rat, Real, Refiner};
use crate::packing::{capacity, CapacityResult, PackingError, Witness};
use crate::weights::{weight_expansion, WeightError};

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub enum EllipsoidError {
    #[error(transparent)]
    Weights(#[from] WeightError),
    #[error(transparent)]
    Packing(#[from] PackingError),
    #[error("{0} lies outside [1, tau^4]")]
    OutOfRange(Rat),
    #[error("could not compare {0} with tau^4 within the refinement budget")]
    Undecided(Rat),
    #[error("empty scan range [{0}, {1}]")]
    BadRange(Rat, Rat),
    #[error("denominator bound must be at least 1")]
    BadDenominator,
}

/// `tau^4 = 7/2 + (3/2) sqrt(5)` for the golden ratio `tau`.
pub fn tau_fourth() -> Real {
    let half = |n: i64| Rat::new(n, 2).expect("nonzero");
    let root5 = Expr::root(Radical::Sqrt, &Rat::from_int(5)).expect("positive");
    Real::from_expr(Expr::rational(half(7)).add(&root5.scale(&half(3))))
}

/// `(17/6)^2`, from where on `c` is the volume bound.
pub fn volume_threshold() -> Rat {
    Rat::new(289, 36).expect("nonzero")
}

/// Data of the `n`-th Fibonacci step.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FibData {
    pub n: u32,
    pub g_n: BigInt,
    /// `g_{n+1} / g_n`, the height of the step.
    pub gamma_n: Rat,
    /// `gamma_n^2`, where the step touches the volume curve.
    pub a_n: Rat,
    /// `g_{n+2} / g_n`, the end of the slanted edge.
    pub b_n: Rat,
}

/// `g_0, g_1, ...` = 1, 1, 2, 5, 13, 34, ...: every other Fibonacci number,
/// via `g_{n+1} = 3 g_n - g_{n-1}`.
pub fn odd_fibonacci(count: usize) -> Vec<BigInt> {
    let mut g: Vec<BigInt> = Vec::with_capacity(count.max(2));
    g.push(BigInt::from(1));
    g.push(BigInt::from(1));
    while g.len() < count {
        let n = g.len();
        let next = BigInt::from(3) * &g[n - 1] - &g[n - 2];
        g.push(next);
    }
    g.truncate(count);
    g
}

pub fn fib_data(n: u32) -> FibData {
    let g = odd_fibonacci(n as usize + 3);
    let i = n as usize;
    let ratio = |p: &BigInt, q: &BigInt| Rat::new(p.clone(), q.clone()).expect("g_n > 0");
    let gamma_n = ratio(&g[i + 1], &g[i]);
    FibData {
        n,
        g_n: g[i].clone(),
        a_n: gamma_n.square(),
        b_n: ratio(&g[i + 2], &g[i]),
        gamma_n,
    }
}

fn compare_tau_fourth(a: &Rat, refiner: &mut Refiner) -> Comparison {
    refiner.compare(&Real::Exact(a.clone()), &tau_fourth())
}

/// Closed form of `c` on `[1, tau^4]`: on `[a_n, a_{n+1}]` it follows the
/// line `a / gamma_n` through the origin up to `b_n` and is the constant
/// `gamma_{n+1}` after that.
pub fn fib_oracle(a: &Rat, refiner: &mut Refiner) -> Result<Rat, EllipsoidError> {
    if *a < Rat::one() {
        return Err(EllipsoidError::OutOfRange(a.clone()));
    }
    match compare_tau_fourth(a, refiner) {
        Comparison::Less => {}
        Comparison::Undecided => return Err(EllipsoidError::Undecided(a.clone())),
        _ => return Err(EllipsoidError::OutOfRange(a.clone())),
    }
    let mut n = 0;
    loop {
        let step = fib_data(n);
        let next = fib_data(n + 1);
        if *a <= next.a_n {
            return Ok(if *a <= step.b_n { a / &step.gamma_n } else { next.gamma_n });
        }
        n += 1;
    }
}

/// `c(a)` as the capacity of the weight expansion `w(a)`.
pub fn c_of_a(a: &Rat, d_max: i64) -> Result<CapacityResult, EllipsoidError> {
    let w = weight_expansion(a)?;
    Ok(capacity(&w.flat(), d_max)?)
}

/// Reduced fractions `p/q` in `[lo, hi]` with `q <= q_max`, increasing.
pub fn farey_grid(lo: &Rat, hi: &Rat, q_max: u64) -> Result<Vec<Rat>, EllipsoidError> {
    if q_max == 0 {
        return Err(EllipsoidError::BadDenominator);
    }
    if lo > hi {
        return Err(EllipsoidError::BadRange(lo.clone(), hi.clone()));
    }
    let mut grid = Vec::new();
    for q in 1..=q_max {
        let qq = Rat::from_int(q);
        let mut p = (lo * &qq).ceil();
        let last = (hi * &qq).floor();
        let q_big = BigInt::from(q);
        while p <= last {
            if p.gcd(&q_big) == BigInt::from(1) {
                grid.push(Rat::new(p.clone(), q_big.clone()).expect("q >= 1"));
            }
            p += 1;
        }
    }
    grid.sort();
    Ok(grid)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ScanRow {
    pub a: Rat,
    pub capacity: CapacityResult,
    /// The closed form, present when `a < tau^4` was established.
    pub oracle: Option<Rat>,
}

pub fn scan_row(a: &Rat, d_max: i64, refiner: &mut Refiner) -> Result<ScanRow, EllipsoidError> {
    let capacity = c_of_a(a, d_max)?;
    let oracle = match compare_tau_fourth(a, refiner) {
        Comparison::Less => Some(fib_oracle(a, refiner)?),
        _ => None,
    };
    Ok(ScanRow { a: a.clone(), capacity, oracle })
}

/// One row per grid point of [`farey_grid`], in increasing `a`.
pub fn staircase_scan(
    lo: &Rat,
    hi: &Rat,
    denom_max: u64,
    d_max: i64,
    refiner: &mut Refiner,
) -> Result<Vec<ScanRow>, EllipsoidError> {
    if *lo < Rat::one() {
        return Err(EllipsoidError::OutOfRange(lo.clone()));
    }
    farey_grid(lo, hi, denom_max)?.iter().map(|a| scan_row(a, d_max, refiner)).collect()
}

/// A maximal run of consecutive scan rows sharing one class witness and one
/// value strictly above the volume bound.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Plateau {
    pub start: Rat,
    pub end: Rat,
    pub value: Rat,
}

/// Horizontal pieces of the sampled graph: runs of at least two rows with
/// equal exact value above `sqrt(a)`.
pub fn plateaus(rows: &[ScanRow]) -> Vec<Plateau> {
    let mut out: Vec<Plateau> = Vec::new();
    let mut run: Option<(usize, usize)> = None;
    let flat_value = |row: &ScanRow| match (&row.capacity.witness, row.capacity.value.as_rat()) {
        (Witness::Class(_), Some(v)) if row.capacity.value_squared > row.a => Some(v.clone()),
        _ => None,
    };
    let close = |run: Option<(usize, usize)>, out: &mut Vec<Plateau>| {
        if let Some((i, j)) = run {
            if j > i {
                let value = flat_value(&rows[i]).expect("run rows carry a value");
                out.push(Plateau { start: rows[i].a.clone(), end: rows[j].a.clone(), value });
            }
        }
    };
    for (idx, row) in rows.iter().enumerate() {
        let v = flat_value(row);
        run = match (run, v) {
            (Some((i, j)), Some(v)) if flat_value(&rows[j]).as_ref() == Some(&v) => Some((i, idx)),
            (prev, Some(_)) => {
                close(prev, &mut out);
                Some((idx, idx))
            }
            (prev, None) => {
                close(prev, &mut out);
                None
            }
        };
    }
    close(run, &mut out);
    out
}
