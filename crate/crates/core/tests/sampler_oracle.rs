use std::collections::BTreeMap;

use arithstat::density::SplittingProfile;
use arithstat::limits::Limits;
use arithstat::sampler::{
    count_coprime_tuples, count_irreducible, enumerate_representatives, mc_sample, run_exhaustive,
    run_exhaustive_logged, run_montecarlo, AccumulateConfig, EnumSpec, Mode, StatAccumulator,
};
use num_integer::Integer;
use proptest::prelude::*;

fn spec(n: u32, h: u64) -> EnumSpec {
    EnumSpec {
        degree: n,
        height: h,
        mode: Mode::Exhaustive,
        monic_only: false,
    }
}

/// Primitive quadratics with no rational root, found by trying every `p/q`.
fn brute_quadratic_count(h: i64) -> usize {
    let mut count = 0;
    for a in 1..=h {
        for b in -h..=h {
            for c in -h..=h {
                if a.gcd(&b).gcd(&c) != 1 {
                    continue;
                }
                let mut root = c == 0;
                'search: for p in 1..=c.abs().max(1) {
                    for q in 1..=a {
                        for s in [p, -p] {
                            if a * s * s + b * s * q + c * q * q == 0 {
                                root = true;
                                break 'search;
                            }
                        }
                    }
                }
                if !root {
                    count += 1;
                }
            }
        }
    }
    count
}

#[test]
fn quadratic_enumeration_matches_brute_force() {
    let got = enumerate_representatives(&spec(2, 10), &Limits::default()).unwrap().count();
    assert_eq!(got, brute_quadratic_count(10));
}

#[test]
fn monic_enumeration() {
    let s = EnumSpec {
        monic_only: true,
        ..spec(2, 3)
    };
    let reps: Vec<_> = enumerate_representatives(&s, &Limits::default()).unwrap().collect();
    assert!(reps.iter().all(|r| r.poly.leading() == &num_bigint::BigInt::from(1)));
    // x^2 + bx + c, |b|, |c| <= 3, non-square discriminant.
    let want = (-3i64..=3)
        .flat_map(|b| (-3i64..=3).map(move |c| b * b - 4 * c))
        .filter(|&d| d < 0 || (d as f64).sqrt().fract() != 0.0)
        .count();
    assert_eq!(reps.len(), want);
}

#[test]
fn counts_are_bounded_and_match_mobius() {
    let limits = Limits::default();
    for (n, h) in [(1u32, 5u64), (2, 6), (3, 3)] {
        let r = count_irreducible(n, h, &limits).unwrap();
        assert!(r.count <= (2 * h as u128 + 1).pow(n + 1));
    }
    for (k, h) in [(2u32, 7u64), (3, 5), (4, 3)] {
        let c = count_coprime_tuples(k, h, &limits).unwrap();
        let oracle = arithstat::acceptance::coprime_count_oracle(k, h);
        assert_eq!(num_bigint::BigInt::from(c.count), oracle);
        assert!(c.count < (2 * h as u128 + 1).pow(k));
    }
}

fn config() -> AccumulateConfig {
    AccumulateConfig {
        profiles: vec![SplittingProfile::rational(), SplittingProfile::quadratic(-3).unwrap()],
        disc_classes: vec![-3, 2],
        split_primes: vec![5],
    }
}

#[test]
fn block_counts_do_not_change_results() {
    let limits = Limits::default();
    let s = spec(3, 4);
    let base = run_exhaustive(&s, &config(), 1, &limits).unwrap();
    for blocks in [2, 3, 7, 8, 50, 500] {
        assert_eq!(run_exhaustive(&s, &config(), blocks, &limits).unwrap(), base, "blocks = {blocks}");
    }
    assert_eq!(base.attempts as u128, s.tuple_count());
}

#[test]
fn run_log_resumes() {
    let dir = tempfile::tempdir().unwrap();
    let log = dir.path().join("run.jsonl");
    let limits = Limits::default();
    let s = spec(2, 12);
    let full = run_exhaustive(&s, &config(), 6, &limits).unwrap();
    let first = run_exhaustive_logged(&s, &config(), 6, &limits, &log).unwrap();
    assert_eq!(first, full);
    let lines = std::fs::read_to_string(&log).unwrap();
    assert_eq!(lines.lines().count(), 6);
    // Drop two blocks and append a torn line; the rerun recomputes only those.
    let kept: Vec<&str> = lines.lines().take(4).collect();
    std::fs::write(&log, format!("{}\n{{\"key\":", kept.join("\n"))).unwrap();
    let resumed = run_exhaustive_logged(&s, &config(), 6, &limits, &log).unwrap();
    assert_eq!(resumed, full);
}

#[test]
fn mc_replay_and_seed_sensitivity() {
    let mk = |seed| EnumSpec {
        degree: 3,
        height: 50,
        mode: Mode::MonteCarlo { samples: 2000, seed },
        monic_only: false,
    };
    let a = run_montecarlo(&mk(1), &config()).unwrap();
    assert_eq!(a, run_montecarlo(&mk(1), &config()).unwrap());
    assert_ne!(a, run_montecarlo(&mk(2), &config()).unwrap());
    assert_eq!(a.total_weight, 2000);
    let stream: Vec<_> = mc_sample(&mk(1)).unwrap().collect();
    assert!(stream.iter().all(|r| r.poly.degree() == 3 && r.poly.is_primitive()));
}

fn arb_acc() -> impl Strategy<Value = StatAccumulator> {
    (
        0u64..1000,
        prop::collection::btree_map(1u64..20, 0u64..100, 0..6),
        prop::collection::btree_map(0u32..5, 0u64..100, 0..4),
        prop::collection::btree_map(0u32..3, 0u64..100, 0..3),
    )
        .prop_map(|(w, e, x, s)| StatAccumulator {
            total_weight: w,
            attempts: 2 * w,
            e_histogram: e,
            xsize_histograms: BTreeMap::from([("rational".to_string(), x)]),
            disc_squareclass_counts: BTreeMap::from([(-3, w / 3)]),
            exceptional_counts: BTreeMap::from([("rational".to_string(), w % 7)]),
            splitting_histogram: BTreeMap::from([(5, s)]),
        })
}

proptest! {
    #[test]
    fn merge_is_associative_and_commutative(a in arb_acc(), b in arb_acc(), c in arb_acc()) {
        let ab_c = StatAccumulator::merged([&StatAccumulator::merged([&a, &b]), &c]);
        let a_bc = StatAccumulator::merged([&a, &StatAccumulator::merged([&b, &c])]);
        let cba = StatAccumulator::merged([&c, &b, &a]);
        prop_assert_eq!(&ab_c, &a_bc);
        prop_assert_eq!(&ab_c, &cba);
        prop_assert_eq!(ab_c.total_weight, a.total_weight + b.total_weight + c.total_weight);
    }
}
