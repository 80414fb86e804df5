//! Acceptance checks, one line per criterion. Runs without the test harness
//! so the lines always show up in `cargo test` output; any failing criterion
//! makes the process exit non-zero.

use std::time::{Duration, Instant};

use proptest::prelude::*;
use proptest::test_runner::{Config, RngAlgorithm, TestCaseError, TestError, TestRng, TestRunner};
use serde_json::Value;

use symcap::cli;
use symcap_core::cremona::{cremona_move, reduce_trace, ClassVector, ReduceOutcome};
use symcap_core::diophantine::{build_catalog, solve_de_bounded};
use symcap_core::ech::{ech_ball_capacity, ech_capacities_rat, stability_chain_check, StabilityResult};
use symcap_core::ellipsoid::{c_of_a, farey_grid, fib_data, fib_oracle};
use symcap_core::numeric::{Rat, Refiner};
use symcap_core::packing::{constraint_value, Certificate, Witness};
use symcap_core::weights::weight_expansion;

type Outcome = Result<String, String>;

fn r(s: &str) -> Rat {
    s.parse().unwrap()
}

fn check(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn cli_json(args: &[&str]) -> Result<Value, String> {
    let mut out = Vec::new();
    let mut err = Vec::new();
    let argv = std::iter::once("symcap").chain(args.iter().copied()).chain(["--format", "json"]);
    let code = cli::run(argv, &mut out, &mut err);
    if code != 0 {
        return Err(format!("exit {}: {}", code, String::from_utf8_lossy(&err)));
    }
    serde_json::from_slice(&out).map_err(|e| e.to_string())
}

fn table_reproduction() -> Outcome {
    let json = cli_json(&["table2", "--upto", "12"])?;
    let rows = json["rows"].as_array().ok_or("no rows")?;
    let c = ["1", "2", "2", "2", "5/2", "5/2", "8/3", "17/6"];
    let p = ["1", "1/2", "3/4", "1", "20/25", "24/25", "63/64", "288/289"];
    for (i, row) in rows.iter().enumerate().take(8) {
        let got_c = row["c_k"].as_str().ok_or("c_k is not exact")?;
        let got_p = row["p_k"].as_str().ok_or("p_k missing")?;
        check(r(got_c) == r(c[i]) && r(got_p) == r(p[i]), || format!("k={}: c={} p={}", i + 1, got_c, got_p))?;
    }
    for row in &rows[8..12] {
        check(row["p_k"] == "1" && row["certified"] == true, || format!("k={}: {}", row["k"], row))?;
    }
    Ok("c_k and p_k exact for k=1..8, p_k=1 certified for k=9..12".into())
}

fn census() -> Outcome {
    let expected = [
        ClassVector::new(1, vec![1, 1]),
        ClassVector::new(2, vec![1; 5]),
        ClassVector::new(3, [vec![2], vec![1; 6]].concat()),
        ClassVector::new(4, [vec![2; 3], vec![1; 5]].concat()),
        ClassVector::new(5, [vec![2; 6], vec![1; 2]].concat()),
        ClassVector::new(6, [vec![3], vec![2; 7]].concat()),
    ];
    let catalog = build_catalog(7, Some(8)).map_err(|e| e.to_string())?;
    check(catalog.classes() == expected, || format!("catalog {:?}", catalog.classes()))?;
    check(catalog.rejected().is_empty(), || format!("rejected {:?}", catalog.rejected()))?;
    let union: usize = (1..=7).map(|d| solve_de_bounded(d, Some(8)).len()).sum();
    check(union == 6, || format!("{} solutions of the system", union))?;
    let mut moves = Vec::new();
    for class in &expected {
        let trace = reduce_trace(class, 64);
        check(
            matches!(trace.outcome, ReduceOutcome::ReducesToZero(_)) && trace.iterates.last().unwrap().is_zero_class(),
            || format!("{} does not reduce: {:?}", class, trace.outcome),
        )?;
        moves.push((trace.iterates.len() - 1).to_string());
    }
    Ok(format!("six classes, reductions of length {}", moves.join(",")))
}

fn staircase() -> Outcome {
    let mut refiner = Refiner::default();
    let grid = farey_grid(&r("1"), &r("27/4"), 8).map_err(|e| e.to_string())?;
    for a in &grid {
        let c = c_of_a(a, 100).map_err(|e| e.to_string())?;
        let oracle = fib_oracle(a, &mut refiner).map_err(|e| e.to_string())?;
        check(c.value.as_rat() == Some(&oracle), || format!("a={}: c={} oracle={}", a, c.value, oracle))?;
    }
    let gammas = ["1", "2", "5/2", "13/5"];
    for n in 0..=3u32 {
        let step = fib_data(n);
        check(step.gamma_n == r(gammas[n as usize]), || format!("gamma_{} = {}", n, step.gamma_n))?;
        let at_vertex = c_of_a(&step.a_n, 100).map_err(|e| e.to_string())?;
        check(at_vertex.value.as_rat() == Some(&step.gamma_n), || format!("c(a_{}) = {}", n, at_vertex.value))?;
        let next = fib_data(n + 1);
        let at_end = c_of_a(&step.b_n, 100).map_err(|e| e.to_string())?;
        check(at_end.value.as_rat() == Some(&next.gamma_n), || format!("c(b_{}) = {}", n, at_end.value))?;
    }
    Ok(format!("{} grid points match the closed form; vertices for n<=3 present", grid.len()))
}

fn transition_vertices() -> Outcome {
    for (a, v) in [("7", "8/3"), ("8", "17/6")] {
        let c = c_of_a(&r(a), 100).map_err(|e| e.to_string())?;
        check(c.value.as_rat() == Some(&r(v)) && c.certified(), || format!("c({}) = {} certified={}", a, c.value, c.certified()))?;
    }
    Ok("c(7)=8/3 and c(8)=17/6, both certified".into())
}

fn volume_regime() -> Outcome {
    let small = build_catalog(12, None).map_err(|e| e.to_string())?;
    let mut notes = Vec::new();
    for a in ["9", "10", "23/2", "12"] {
        let a = r(a);
        let c = c_of_a(&a, 100).map_err(|e| e.to_string())?;
        check(
            c.witness == Witness::VolumeBound && c.value_squared == a && c.d_max_used == 100,
            || format!("a={}: {} witness {} searched {}", a, c.value, c.witness, c.d_max_used),
        )?;
        check(c.certified(), || format!("a={} not certified", a))?;
        // independent route: every enumerated class stays below sqrt(a)
        let w = weight_expansion(&a).unwrap().flat();
        for class in small.classes().iter().filter(|e| e.parts() <= w.len()) {
            check(constraint_value(class, &w).square() < a, || format!("a={}: {} reaches the volume", a, class))?;
        }
        notes.push(format!("{}:{}", a, c.certificate.map_or("none".into(), |x: Certificate| x.to_string())));
    }
    Ok(format!("volume bound certified ({})", notes.join(" ")))
}

fn ech_cross_validation() -> Outcome {
    let tol = r("1/1000");
    for a in ["2", "4", "5", "13/2", "7", "8"] {
        let a = r(a);
        let (lo, hi) = ech_ball_capacity(&a, 2000, &tol).map_err(|e| e.to_string())?;
        let c = c_of_a(&a, 100).map_err(|e| e.to_string())?;
        let c = c.value.as_rat().cloned().ok_or("irrational capacity")?;
        let mid = (&lo + &hi) / Rat::from_int(2);
        check(lo <= c && c <= hi && (&mid - &c).abs() <= tol, || format!("a={}: [{}, {}] vs {}", a, lo, hi, c))?;
    }
    Ok("brackets contain c(a) within 1/1000 for a in {2,4,5,13/2,7,8}".into())
}

fn stability_chain() -> Outcome {
    let mut refiner = Refiner::default();
    for k in [21, 22, 25, 27] {
        let s = stability_chain_check(k, 5000, &mut refiner).map_err(|e| e.to_string())?;
        check(s == StabilityResult::Holds { certified_up_to: 5000 }, || format!("k={}: {}", k, s))?;
    }
    let mut failures = Vec::new();
    for k in [2, 3] {
        let s = stability_chain_check(k, 5000, &mut refiner).map_err(|e| e.to_string())?;
        check(matches!(s, StabilityResult::FailsAt { .. }), || format!("k={}: {}", k, s))?;
        failures.push(format!("k={}: {}", k, s));
    }
    Ok(format!("holds to index 5000 for k=21,22,25,27; {}", failures.join("; ")))
}

fn runner(cases: u32) -> TestRunner {
    let config = Config { cases, failure_persistence: None, ..Config::default() };
    TestRunner::new_with_rng(config, TestRng::deterministic_rng(RngAlgorithm::ChaCha))
}

fn positive(max_num: i64, max_den: i64) -> impl Strategy<Value = Rat> {
    (1..=max_num, 1..=max_den).prop_map(|(p, q)| Rat::new(p, q).unwrap())
}

fn brute_force(a: &Rat, b: &Rat, k: usize) -> Vec<Rat> {
    let area = Rat::from_int(2) * a * b * Rat::from_int(k as i64 + 1);
    let bound = Rat::from_int(area.to_f64().sqrt().ceil() as i64 + 1);
    let mut values = Vec::new();
    let mut x = Rat::zero();
    while x <= bound {
        let mut v = x.clone();
        while v <= bound {
            values.push(v.clone());
            v = v + b;
        }
        x = x + a;
    }
    values.sort();
    values.truncate(k + 1);
    values
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

fn suite<T: std::fmt::Debug>(name: &str, result: Result<(), TestError<T>>) -> Result<(), String> {
    result.map_err(|e| format!("{}: {}", name, e))
}

fn property_suites() -> Outcome {
    let cases = 500;
    let mut names = Vec::new();

    let strategy = (-20i64..60, prop::collection::vec(-5i64..30, 0..12));
    suite(
        "cremona defects",
        runner(cases).run(&strategy, |(d, m)| {
            let v = ClassVector::new(d, m);
            let w = cremona_move(&v);
            prop_assert_eq!(v.linear_defect(), w.linear_defect());
            prop_assert_eq!(v.quadratic_defect(), w.quadratic_defect());
            Ok(())
        }),
    )?;
    names.push("cremona defects");

    let strategy = (1i64..=100, 1i64..=50).prop_map(|(n, q)| Rat::new(n * q, q).unwrap() + Rat::new(n % q, q).unwrap());
    suite(
        "weight sums",
        runner(cases).run(&strategy, |a| {
            prop_assume!(a >= Rat::one());
            let w = weight_expansion(&a).map_err(|e| TestCaseError::fail(e.to_string()))?;
            prop_assert_eq!(w.sum_of_squares(), a.clone());
            let q = Rat::from_int(a.denom().clone());
            prop_assert_eq!(w.sum(), &a + &Rat::one() - Rat::one() / q);
            Ok(())
        }),
    )?;
    names.push("weight sums");

    let strategy = (positive(30, 6), positive(30, 6), positive(12, 5));
    suite(
        "ech symmetry and scaling",
        runner(cases).run(&strategy, |(a, b, lambda)| {
            let k = 200;
            let ab = ech_capacities_rat(&a, &b, k).unwrap();
            prop_assert_eq!(&ab, &ech_capacities_rat(&b, &a, k).unwrap());
            let scaled = ech_capacities_rat(&(&a * &lambda), &(&b * &lambda), k).unwrap();
            prop_assert_eq!(scaled, ab.iter().map(|v| v * &lambda).collect::<Vec<_>>());
            Ok(())
        }),
    )?;
    names.push("ech symmetry/scaling");

    let strategy = (positive(40, 8), positive(40, 8), 0usize..=10_000);
    suite(
        "frontier vs brute force",
        runner(cases).run(&strategy, |(a, b, k)| {
            prop_assert_eq!(ech_capacities_rat(&a, &b, k).unwrap(), brute_force(&a, &b, k));
            Ok(())
        }),
    )?;
    names.push("frontier vs brute force (K<=10^4)");

    let strategy =
        (1i64..20, prop::collection::vec(0i64..10, 1..=6), prop::collection::vec(positive(20, 8), 1..=6));
    suite(
        "sorted pairing",
        runner(cases).run(&strategy, |(d, m, mut a)| {
            let e = ClassVector::new(d, m);
            a.sort_by(|x, y| y.cmp(x));
            let mut padded = e.multiplicities().to_vec();
            padded.resize(padded.len().max(a.len()), 0);
            let best = permutations(&padded)
                .into_iter()
                .map(|p| p.iter().zip(&a).map(|(&mi, ai)| ai * &Rat::from_int(mi)).sum::<Rat>() / Rat::from_int(d))
                .max()
                .unwrap();
            prop_assert_eq!(constraint_value(&e, &a), best);
            Ok(())
        }),
    )?;
    names.push("sorted-pairing maximality");

    Ok(format!("{} cases each: {}", cases, names.join(", ")))
}

fn main() {
    let criteria: [(&str, fn() -> Outcome, Duration); 8] = [
        ("1 table reproduction", table_reproduction, Duration::from_secs(10)),
        ("2 (DE) census", census, Duration::from_secs(1)),
        ("3 Fibonacci staircase", staircase, Duration::from_secs(300)),
        ("4 transition vertices", transition_vertices, Duration::from_secs(60)),
        ("5 volume regime", volume_regime, Duration::from_secs(60)),
        ("6 ECH cross-validation", ech_cross_validation, Duration::from_secs(120)),
        ("7 packing-stability chain", stability_chain, Duration::from_secs(300)),
        ("8 property suites", property_suites, Duration::from_secs(300)),
    ];
    let mut failed = 0;
    for (name, run, limit) in criteria {
        let start = Instant::now();
        let outcome = run();
        let elapsed = start.elapsed();
        let (status, detail) = match outcome {
            Ok(d) if elapsed <= limit => ("PASS", d),
            Ok(d) => ("FAIL", format!("{} but took {:.2?} (limit {:?})", d, elapsed, limit)),
            Err(e) => ("FAIL", e),
        };
        if status == "FAIL" {
            failed += 1;
        }
        println!("criterion {}: {} [{:.2?}] {}", name, status, elapsed, detail);
    }
    if failed > 0 {
        println!("{} acceptance criteria failed", failed);
        std::process::exit(1);
    }
    println!("all acceptance criteria passed");
}
