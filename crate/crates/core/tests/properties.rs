use num_bigint::BigInt;
use proptest::prelude::*;

use symcap_core::cremona::{cremona_move, ClassVector};
use symcap_core::ech::ech_capacities_rat;
use symcap_core::numeric::{compare, Comparison, Rat, Real, RootBound};
use symcap_core::packing::{capacity, constraint_value};
use symcap_core::weights::weight_expansion;

fn r(p: i64, q: i64) -> Rat {
    Rat::new(p, q).unwrap()
}

fn rational(max_num: i64, max_den: i64) -> impl Strategy<Value = Rat> {
    (-max_num..=max_num, 1..=max_den).prop_map(|(p, q)| r(p, q))
}

fn positive(max_num: i64, max_den: i64) -> impl Strategy<Value = Rat> {
    (1..=max_num, 1..=max_den).prop_map(|(p, q)| r(p, q))
}

/// Continued-fraction digits by integer division on (p, q).
fn euclid_digits(mut p: BigInt, mut q: BigInt) -> Vec<u64> {
    let mut out = Vec::new();
    while q != BigInt::from(0) {
        let digit = &p / &q;
        let rem = &p % &q;
        out.push(u64::try_from(digit).unwrap());
        p = q;
        q = rem;
    }
    out
}

fn permutations(v: &[i64]) -> Vec<Vec<i64>> {
    if v.len() <= 1 {
        return vec![v.to_vec()];
    }
    let mut out = Vec::new();
    for i in 0..v.len() {
        let mut rest = v.to_vec();
        let x = rest.remove(i);
        for mut p in permutations(&rest) {
            p.insert(0, x);
            out.push(p);
        }
    }
    out
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn cremona_moves_preserve_defects(d in -20i64..60, m in prop::collection::vec(-5i64..30, 0..12)) {
        let v = ClassVector::new(d, m);
        let w = cremona_move(&v);
        prop_assert_eq!(v.linear_defect(), w.linear_defect());
        prop_assert_eq!(v.quadratic_defect(), w.quadratic_defect());
        prop_assert!(w.multiplicities().windows(2).all(|p| p[0] >= p[1]));
    }

    #[test]
    fn weight_sums(p in 1i64..=5000, q in 1i64..=50) {
        prop_assume!(p >= q);
        let a = r(p, q);
        let w = weight_expansion(&a).unwrap();
        prop_assert_eq!(w.sum_of_squares(), a.clone());
        let flat = w.flat();
        let sum: Rat = flat.iter().sum();
        prop_assert_eq!(sum, &a + &Rat::one() - Rat::one() / Rat::from_int(a.denom().clone()));
        prop_assert!(flat.windows(2).all(|x| x[0] >= x[1]));
        prop_assert!(flat.iter().all(Rat::is_positive));
    }

    #[test]
    fn multiplicities_are_continued_fraction_digits(p in 1i64..=100_000, q in 1i64..=1000) {
        prop_assume!(p >= q);
        let a = r(p, q);
        let w = weight_expansion(&a).unwrap();
        prop_assert_eq!(w.multiplicities(), euclid_digits(a.numer().clone(), a.denom().clone()));
    }

    #[test]
    fn compare_matches_cross_multiplication(x in rational(1000, 1000), y in rational(1000, 1000)) {
        let expected = (x.numer() * y.denom()).cmp(&(y.numer() * x.denom()));
        prop_assert_eq!(compare(&Real::Exact(x), &Real::Exact(y), 0), Comparison::from(expected));
    }

    #[test]
    fn sqrt_enclosures_bracket(q in positive(10_000, 100), steps in 0usize..40) {
        let mut b = RootBound::sqrt(&q).unwrap();
        let width = b.width();
        for _ in 0..steps {
            b = b.refine();
        }
        prop_assert!(b.lo() <= b.hi());
        prop_assert!(b.lo().is_negative() || b.lo().square() <= q);
        prop_assert!(b.hi().square() >= q);
        prop_assert!(b.width() * Rat::from_int(1i64 << steps) <= width);
    }

    #[test]
    fn sqrt_comparison_agrees_with_squares(q in positive(10_000, 100), x in positive(200, 20)) {
        // x > 0: sqrt(q) vs x has the order of q vs x^2
        let got = compare(&Real::sqrt(&q).unwrap(), &Real::Exact(x.clone()), 256);
        prop_assert_eq!(got, Comparison::from(q.cmp(&x.square())));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(500))]

    #[test]
    fn sorted_pairing_is_maximal(
        d in 1i64..20,
        m in prop::collection::vec(0i64..10, 1..=6),
        a in prop::collection::vec(positive(20, 8), 1..=6),
    ) {
        let e = ClassVector::new(d, m);
        let mut a = a;
        a.sort_by(|x, y| y.cmp(x));
        let got = constraint_value(&e, &a);
        let mut padded = e.multiplicities().to_vec();
        padded.resize(padded.len().max(a.len()), 0);
        let best = permutations(&padded)
            .into_iter()
            .map(|p| p.iter().zip(&a).map(|(&mi, ai)| ai * &Rat::from_int(mi)).sum::<Rat>() / Rat::from_int(d))
            .max()
            .unwrap();
        prop_assert_eq!(got, best);
    }

    #[test]
    fn ech_symmetry_and_scaling(a in positive(30, 6), b in positive(30, 6), lambda in positive(12, 5)) {
        let k = 300;
        let ab = ech_capacities_rat(&a, &b, k).unwrap();
        prop_assert_eq!(&ab, &ech_capacities_rat(&b, &a, k).unwrap());
        let scaled = ech_capacities_rat(&(&a * &lambda), &(&b * &lambda), k).unwrap();
        let expected: Vec<Rat> = ab.iter().map(|v| v * &lambda).collect();
        prop_assert_eq!(scaled, expected);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(40))]

    #[test]
    fn capacity_is_monotone(
        a in prop::collection::vec(positive(12, 4), 1..=6),
        i in 0usize..6,
        bump in positive(4, 4),
    ) {
        let i = i % a.len();
        let mut bigger = a.clone();
        bigger[i] = &bigger[i] + &bump;
        let small = capacity(&a, 30).unwrap();
        let large = capacity(&bigger, 30).unwrap();
        prop_assert!(small.value_squared <= large.value_squared);
    }
}
