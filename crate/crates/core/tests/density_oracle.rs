use arithstat::density::{
    b_table_exact, coefficient_table, coefficient_table_at, dp_via_lambda, expectation_variance_at, lambda0_set,
    lambda_set, make_profile, moment, monotonicity_scan, prob_e, truncated_dp_exact, Comparison,
};
use arithstat::exact::{local_factors, rat, PrimeSieve, Rational};
use arithstat::limits::Limits;
use num_traits::{One, Zero};
use proptest::prelude::*;

const PROFILES: [&str; 6] = ["rational", "quadratic:-7", "quadratic:-4", "quadratic:5", "cyclotomic:5", "table:3:0:2=3,3=2,*=1"];

#[test]
fn dp_matches_subset_sums() {
    for spec in PROFILES {
        let prof = make_profile(spec).unwrap();
        for cutoff in [3u64, 8, 13] {
            let primes: Vec<u64> = PrimeSieve::new().primes_below(cutoff).to_vec();
            let t_max = 12;
            let mut brute = vec![Rational::zero(); t_max + 1];
            for mask in 0u32..(1 << primes.len()) {
                let mut t = 0usize;
                let mut w = Rational::one();
                for (i, &p) in primes.iter().enumerate() {
                    if mask >> i & 1 == 1 {
                        t += prof.r(p).unwrap() as usize;
                        w *= local_factors(p, 3).unwrap().1;
                    }
                }
                if t <= t_max {
                    brute[t] += w;
                }
            }
            assert_eq!(truncated_dp_exact(&prof, 3, cutoff, t_max).unwrap(), brute, "{spec} N={cutoff}");
            // sum_t dp(t) = prod (1 + beta) once t_max covers every subset.
            let all = truncated_dp_exact(&prof, 3, cutoff, 64).unwrap();
            let prod: Rational = primes.iter().map(|&p| Rational::one() + local_factors(p, 3).unwrap().1).product();
            assert_eq!(all.iter().sum::<Rational>(), prod);
        }
    }
}

#[test]
fn lambda_grouping_matches_dp() {
    for spec in PROFILES {
        let prof = make_profile(spec).unwrap();
        let dp = truncated_dp_exact(&prof, 2, 60, 10).unwrap();
        for t in 0..=10 {
            assert_eq!(dp_via_lambda(&prof, 2, 60, t).unwrap(), dp[t], "{spec} t={t}");
        }
    }
}

#[test]
fn lambda_set_sizes() {
    // |Lambda(2, t)| = floor(t/2) + 1; |Lambda(3, 6)| = 7.
    for t in 0..20 {
        assert_eq!(lambda_set(2, t).unwrap().len(), t / 2 + 1);
    }
    assert_eq!(lambda_set(3, 6).unwrap().len(), 7);
    for l in lambda0_set(6, 12).unwrap() {
        assert!(l[3] == 0 && l[4] == 0);
        assert_eq!(l.iter().enumerate().map(|(j, &x)| (j + 1) * x).sum::<usize>(), 12);
    }
}

#[test]
fn b_tables_are_submultiplicative() {
    for spec in ["rational", "quadratic:-7"] {
        let prof = make_profile(spec).unwrap();
        for j in 1..=prof.degree {
            let b = b_table_exact(&prof, 2, 200, j, 10).unwrap();
            assert!(b[0].is_one());
            for s in 0..=5 {
                for t in 0..=5 {
                    assert!(b[s + t] <= &b[s] * &b[t], "{spec} j={j} s={s} t={t}");
                }
            }
        }
    }
}

#[test]
fn coefficient_intervals_bracket_and_tighten() {
    let prof = make_profile("quadratic:-7").unwrap();
    let tol = rat(1, 1000);
    let cutoffs = [50u64, 200, 800, 3200];
    let tables: Vec<_> = cutoffs.iter().map(|&c| coefficient_table_at(&prof, 2, 8, c, &tol).unwrap()).collect();
    for w in tables.windows(2) {
        for t in 0..=8 {
            let (a, b) = (&w[0].intervals[t], &w[1].intervals[t]);
            assert!(a.lo() <= b.lo(), "lower bound moved down at t={t}");
            assert!(a.intersects(b));
            assert!(b.width() <= a.width(), "t={t} widened from N={} to N={}", w[0].cutoff, w[1].cutoff);
        }
    }
    // Total probability: sum of lower ends <= 1 <= sum of upper ends plus the unlisted mass.
    let last = tables.last().unwrap();
    let lo: Rational = last.intervals.iter().map(|i| i.lo().clone()).sum();
    assert!(lo <= Rational::one());
    // a_0 = zeta ratio exactly (X empty iff e = 1).
    let c = prob_e(1, 2, &rat(1, 100_000)).unwrap();
    let table = coefficient_table(&prof, 2, 4, &rat(1, 100_000), &Limits::default()).unwrap();
    assert!(table.intervals[0].intersects(&c));
    assert!(table.max_width() <= rat(1, 100_000));
}

#[test]
fn doubled_profile_doubles_expectation() {
    let ones = make_profile("table:2:0:*=1").unwrap();
    let twos = make_profile("table:2:0:*=2").unwrap();
    let a = expectation_variance_at(&ones, 2, 500).unwrap();
    let b = expectation_variance_at(&twos, 2, 500).unwrap();
    // Same truncation: the truncated sums double exactly and the tail allowance is d eps_N for both.
    assert_eq!(b.expectation.lo(), &(a.expectation.lo() * rat(2, 1)));
    assert_eq!(b.variance.lo(), &(a.variance.lo() * rat(4, 1)));
}

#[test]
fn moments_agree_across_methods() {
    let limits = Limits::default();
    for spec in ["rational", "quadratic:5", "cyclotomic:5"] {
        let prof = make_profile(spec).unwrap();
        for s in 1..=3 {
            let m = moment(&prof, 2, s, &rat(1, 1000), &limits).unwrap();
            assert!(m.series.intersects(&m.combinatorial), "{spec} s={s}");
        }
    }
}

#[test]
fn monotonicity_matches_predictions() {
    let limits = Limits::default();
    let rat_scan = monotonicity_scan(&make_profile("rational").unwrap(), 2, 10, &rat(1, 100_000), &limits).unwrap();
    assert!(rat_scan.rows.iter().all(|r| r.vs_next == Comparison::Greater));
    let q = monotonicity_scan(&make_profile("quadratic:-7").unwrap(), 2, 10, &rat(1, 100_000), &limits).unwrap();
    assert_eq!(q.rows[1].vs_next, Comparison::Less);
    assert!(q.rows.iter().all(|r| r.vs_degree == Some(Comparison::Greater)));
    assert!(q.decay.iter().all(|&(_, v)| v.is_finite() && v > 0.0));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn quadratic_r_values_in_range(d in -3000i64..3000, p_idx in 0usize..200) {
        prop_assume!(arithstat::quadfield::is_fundamental_discriminant(d));
        let prof = make_profile(&format!("quadratic:{d}")).unwrap();
        let p = PrimeSieve::new().nth(p_idx);
        let r = prof.r(p).unwrap();
        prop_assert!((1..=2).contains(&r));
    }
}
