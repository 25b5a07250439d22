use arithstat::exact::is_prime;
use arithstat::limits::Limits;
use arithstat::quadfield::{
    compose, fundamental_discriminant, is_fundamental_discriminant, kronecker, prime_class_order, reduced_forms,
    splitting_type, PrimeClass, QuadraticForm, SplitType,
};
use proptest::prelude::*;

/// `h(d) = -(w / (2|d|)) sum_{k=1}^{|d|} chi(k) k` for `d < 0`.
fn class_number_formula(d: i64) -> i64 {
    let m = d.unsigned_abs();
    let s: i64 = (1..m).map(|k| kronecker(d, k) as i64 * k as i64).sum();
    let w = match d {
        -3 => 6,
        -4 => 4,
        _ => 2,
    };
    -(w * s) / (2 * m as i64)
}

#[test]
fn class_numbers_match_analytic_formula() {
    let limits = Limits::default();
    for d in (-3000i64..=-3).filter(|&d| is_fundamental_discriminant(d)) {
        let h = reduced_forms(d, &limits).unwrap().h() as i64;
        assert_eq!(h, class_number_formula(d), "d = {d}");
    }
}

/// Roots of `x^2 - d` mod odd `p`, counted directly.
fn root_count(d: i64, p: u64) -> usize {
    (0..p).filter(|&x| ((x * x) as i64 - d).rem_euclid(p as i64) == 0).count()
}

#[test]
fn splitting_by_root_counting() {
    let mut state = 12345u64;
    let mut next = move || {
        state = state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
        state >> 33
    };
    let mut checked = 0;
    while checked < 50 {
        let d = -((next() % 100_000) as i64) - 3;
        let d = if next() % 2 == 0 { d } else { -d };
        if !is_fundamental_discriminant(d) {
            continue;
        }
        checked += 1;
        for p in (3..200u64).filter(|&p| is_prime(p)) {
            let want = match root_count(d, p) {
                0 => SplitType::Inert,
                1 => SplitType::Ramified,
                _ => SplitType::Split,
            };
            assert_eq!(splitting_type(d, p).unwrap(), want, "d = {d}, p = {p}");
        }
        let want2 = if d % 2 == 0 {
            SplitType::Ramified
        } else if d.rem_euclid(8) == 1 {
            SplitType::Split
        } else {
            SplitType::Inert
        };
        assert_eq!(splitting_type(d, 2).unwrap(), want2, "d = {d}, p = 2");
    }
}

#[test]
fn prime_orders_divide_h() {
    let limits = Limits::default();
    for d in [-23i64, -47, -71, -84, -164, -260, -399, -971] {
        let table = reduced_forms(d, &limits).unwrap();
        for p in (2..60u64).filter(|&p| is_prime(p)) {
            if let PrimeClass::Order(k) = prime_class_order(d, p, &table).unwrap() {
                assert_eq!(table.h() as u64 % k, 0, "d = {d}, p = {p}");
            }
        }
    }
}

#[test]
fn fundamental_discriminants() {
    assert_eq!(fundamental_discriminant(-1).unwrap(), -4);
    assert_eq!(fundamental_discriminant(5).unwrap(), 5);
    assert_eq!(fundamental_discriminant(3).unwrap(), 12);
    assert!(fundamental_discriminant(4).is_err());
    let count = (-100i64..0).filter(|&d| is_fundamental_discriminant(d)).count();
    assert_eq!(count, 31);
}

proptest! {
    #[test]
    fn kronecker_multiplicative_in_top(a in -500i64..500, b in -500i64..500, m in 1u64..500) {
        prop_assert_eq!(kronecker(a * b, m), kronecker(a, m) * kronecker(b, m));
    }

    #[test]
    fn kronecker_periodic_for_fundamental(d in -2000i64..2000, k in 1u64..5000) {
        prop_assume!(is_fundamental_discriminant(d));
        let m = d.unsigned_abs();
        prop_assert_eq!(kronecker(d, k), kronecker(d, k + m));
    }

    #[test]
    fn composition_preserves_discriminant(i in 0usize..40, j in 0usize..40) {
        let d = -3299i64; // h = 27
        let table = reduced_forms(d, &Limits::default()).unwrap();
        let f = &table.forms[i % table.h()];
        let g = &table.forms[j % table.h()];
        let fg = compose(f, g).unwrap();
        prop_assert_eq!(fg.discriminant(), num_bigint::BigInt::from(d));
        prop_assert!(fg.is_reduced());
        prop_assert_eq!(compose(&fg, &g.inverse()).unwrap(), f.reduced());
        let _ = QuadraticForm::principal(d);
    }
}
