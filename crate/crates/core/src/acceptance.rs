//! The acceptance checks, each against an oracle that does not share code
//! with the routine under test. Used by `arithstat verify` and the
//! `acceptance` test target.

use std::collections::HashSet;
use std::fmt;
use std::time::Instant;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Zero};

use crate::density::{self, Comparison, SplittingProfile};
use crate::error::Result;
use crate::exact::{
    is_prime, local_factors, mobius, rat, rat_int, rational_to_f64, stirling_density_row, zeta_ratio, CertifiedInterval,
    Rational,
};
use crate::factorstats;
use crate::limits::Limits;
use crate::polyint::{self, IntPolynomial};
use crate::quadfield::{self, is_fundamental_discriminant, kronecker};
use crate::sampler::{self, AccumulateConfig, EnumSpec, Mode};

/// Seed for the Monte-Carlo checks.
pub const SEED: u64 = 20_240_601;

pub const CRITERIA: [(u32, &str); 17] = [
    (1, "local_factor_identities"),
    (2, "zeta_ratio_vs_series"),
    (3, "e_distribution_normalizes"),
    (4, "e_distribution_empirical"),
    (5, "irreducible_and_coprime_counts"),
    (6, "rational_coefficients_decrease"),
    (7, "quadratic_coefficient_comparisons"),
    (8, "moments_cross_validate"),
    (9, "containment_independence"),
    (10, "class_groups"),
    (11, "torsion_violators_case_analysis"),
    (12, "torsion_density_near_character_product"),
    (13, "finite_field_census_formulas"),
    (14, "limit_density_and_census"),
    (15, "splitting_sample"),
    (16, "discriminant_identities"),
    (17, "block_merge_determinism"),
];

#[derive(Clone, Debug)]
pub struct Outcome {
    pub id: u32,
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
    pub seconds: f64,
}

impl fmt::Display for Outcome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{} {:>2} {} ({:.1} s): {}",
            if self.passed { "PASS" } else { "FAIL" },
            self.id,
            self.name,
            self.seconds,
            self.detail
        )
    }
}

pub fn run(id: u32) -> Outcome {
    let name = CRITERIA
        .iter()
        .find(|(i, _)| *i == id)
        .map(|(_, n)| *n)
        .unwrap_or("unknown");
    let start = Instant::now();
    let res = match id {
        1 => local_factor_identities(),
        2 => zeta_ratio_vs_series(),
        3 => e_distribution_normalizes(),
        4 => e_distribution_empirical(),
        5 => irreducible_and_coprime_counts(),
        6 => rational_coefficients_decrease(),
        7 => quadratic_coefficient_comparisons(),
        8 => moments_cross_validate(),
        9 => containment_independence(),
        10 => class_groups(),
        11 => torsion_violators_case_analysis(),
        12 => torsion_density_near_character_product(),
        13 => finite_field_census_formulas(),
        14 => limit_density_and_census(),
        15 => splitting_sample(),
        16 => discriminant_identities(),
        17 => block_merge_determinism(),
        _ => Ok((false, format!("no criterion {id}"))),
    };
    let seconds = start.elapsed().as_secs_f64();
    let (passed, detail) = res.unwrap_or_else(|e| (false, format!("error: {e}")));
    Outcome {
        id,
        name,
        passed,
        detail,
        seconds,
    }
}

pub fn run_all() -> Vec<Outcome> {
    CRITERIA.iter().map(|(id, _)| run(*id)).collect()
}

fn within_time(start: Instant, secs: f64, what: &str, detail: &mut String) -> bool {
    let t = start.elapsed().as_secs_f64();
    detail.push_str(&format!("; {what} {t:.1}s (limit {secs}s)"));
    t <= secs
}

type Check = Result<(bool, String)>;

fn local_factor_identities() -> Check {
    let start = Instant::now();
    let mut checked = 0;
    for p in (2..=1000u64).filter(|&p| is_prime(p)) {
        for n in 2..=6u32 {
            let (alpha, beta) = local_factors(p, n)?;
            // Straight from the definitions: alpha = (1 - p^-n)/(1 - p^-(n+1)),
            // beta = p^-n (1 - 1/p) / (1 - p^-n).
            let inv = rat(1, p as i64);
            let pn = pow(&inv, n);
            let one = Rational::one();
            let alpha_def = (&one - &pn) / (&one - &pn * &inv);
            let beta_def = &pn * (&one - &inv) / (&one - &pn);
            let ok = alpha == alpha_def
                && beta == beta_def
                && &alpha * (&one + &beta) == one
                && &pn / rat_int(2) < beta
                && beta < pn;
            if !ok {
                return Ok((false, format!("identity fails at p = {p}, n = {n}")));
            }
            checked += 1;
        }
    }
    let mut detail = format!("{checked} (p, n) pairs exact");
    let ok = within_time(start, 5.0, "runtime", &mut detail);
    Ok((ok, detail))
}

fn pow(x: &Rational, e: u32) -> Rational {
    (0..e).fold(Rational::one(), |acc, _| acc * x)
}

/// `zeta(s)` bracketed by a partial sum plus the integral remainder bounds
/// `1/((s-1)(M+1)^(s-1)) <= sum_{k>M} k^-s <= 1/((s-1) M^(s-1))`, in
/// fixed point with directed rounding.
pub fn zeta_series_oracle(s: u32, terms: u64) -> CertifiedInterval {
    let bits: u32 = 160;
    let mut lo = BigInt::zero();
    let mut hi = BigInt::zero();
    for k in 1..=terms {
        let den = BigInt::from(k).pow(s);
        let (q, r): (BigInt, BigInt) = (BigInt::one() << bits).div_rem(&den);
        hi += if r.is_zero() { q.clone() } else { &q + 1 };
        lo += q;
    }
    let scale = Rational::from_integer(BigInt::one() << bits);
    let head_lo = Rational::from_integer(lo) / &scale;
    let head_hi = Rational::from_integer(hi) / &scale;
    let s1 = BigInt::from(s - 1);
    let rem_lo = Rational::new(BigInt::one(), &s1 * BigInt::from(terms + 1).pow(s - 1));
    let rem_hi = Rational::new(BigInt::one(), &s1 * BigInt::from(terms).pow(s - 1));
    CertifiedInterval::new(head_lo + rem_lo, head_hi + rem_hi).expect("ordered")
}

fn zeta_ratio_oracle(n: u32) -> Result<CertifiedInterval> {
    zeta_series_oracle(n + 1, 200_000).div(&zeta_series_oracle(n, 200_000))
}

fn zeta_ratio_vs_series() -> Check {
    let start = Instant::now();
    let tol = rat(1, 1_000_000);
    let z2 = zeta_ratio(2, &tol)?;
    let o2 = zeta_ratio_oracle(2)?;
    let z3 = zeta_ratio(3, &tol)?;
    let o3 = zeta_ratio_oracle(3)?;
    let dec = rat(7_307_629, 10_000_000);
    let ok = z2.contains(&dec) && z2.intersects(&o2) && z3.intersects(&o3) && z2.width() <= tol && z3.width() <= tol;
    let mut detail = format!(
        "n=2 [{}, {}] vs series [{}, {}]; n=3 [{}, {}] vs series [{}, {}]",
        z2.decimal_lo(10),
        z2.decimal_hi(10),
        o2.decimal_lo(10),
        o2.decimal_hi(10),
        z3.decimal_lo(10),
        z3.decimal_hi(10),
        o3.decimal_lo(10),
        o3.decimal_hi(10)
    );
    let ok = within_time(start, 5.0, "runtime", &mut detail) && ok;
    Ok((ok, detail))
}

fn e_distribution_normalizes() -> Check {
    let total = density::prob_e_total(2, 1000, &rat(1, 1_000_000))?;
    let ok = total.contains(&Rational::one()) && total.width() <= rat(1, 10_000);
    Ok((
        ok,
        format!(
            "sum_(k<=1000) prob_e(k, 2) + tail in [{}, {}], width {:.3e}",
            total.decimal_lo(9),
            total.decimal_hi(9),
            rational_to_f64(&total.width())
        ),
    ))
}

fn e_distribution_empirical() -> Check {
    let tol = rat(1, 1_000_000);
    let p1 = density::prob_e(1, 2, &tol)?.mid_f64();
    let p2 = density::prob_e(2, 2, &tol)?.mid_f64();
    let start = Instant::now();
    let spec = EnumSpec {
        degree: 2,
        height: 300,
        mode: Mode::Exhaustive,
        monic_only: false,
    };
    let acc = sampler::run_exhaustive(&spec, &AccumulateConfig::default(), 64, &Limits::default())?;
    let (h1, h2) = (acc.e_fraction(1), acc.e_fraction(2));
    let mut detail = format!(
        "exhaustive H=300: P[e=1] {h1:.5} vs {p1:.5}, P[e=2] {h2:.5} vs {p2:.5}"
    );
    let mut ok = (h1 - p1).abs() <= 0.02 && (h2 - p2).abs() <= 0.01;
    ok &= within_time(start, 600.0, "exhaustive", &mut detail);
    let start = Instant::now();
    let spec = EnumSpec {
        degree: 2,
        height: 100_000,
        mode: Mode::MonteCarlo {
            samples: 1_000_000,
            seed: SEED,
        },
        monic_only: false,
    };
    let acc = sampler::run_montecarlo(&spec, &AccumulateConfig::default())?;
    let m1 = acc.e_fraction(1);
    detail.push_str(&format!("; Monte-Carlo H=1e5, 1e6 samples: P[e=1] {m1:.5} vs 0.7308"));
    ok &= (m1 - 0.7308).abs() <= 0.005;
    ok &= within_time(start, 120.0, "Monte-Carlo", &mut detail);
    Ok((ok, detail))
}

/// `#{x in [-H, H]^k : gcd(x) = 1} = sum_d mu(d) ((2 floor(H/d) + 1)^k - 1)`.
pub fn coprime_count_oracle(k: u32, h: u64) -> BigInt {
    let mut total = BigInt::zero();
    for d in 1..=h {
        let mu = mobius(d);
        if mu == 0 {
            continue;
        }
        let term = BigInt::from(2 * (h / d) + 1).pow(k) - 1;
        total += term * mu;
    }
    total
}

fn irreducible_and_coprime_counts() -> Check {
    let limits = Limits::default();
    let irr = sampler::count_irreducible(2, 50, &limits)?;
    let cop = sampler::count_coprime_tuples(2, 100, &limits)?;
    let oracle = coprime_count_oracle(2, 100);
    let (di, dc) = (irr.relative_deviation(), cop.relative_deviation());
    let ok = di <= 0.05 && dc <= 0.02 && BigInt::from(cop.count) == oracle;
    Ok((
        ok,
        format!(
            "irreducible(2, 50) = {} vs {:.1} (dev {:.4}); coprime(2, 100) = {} (Mobius oracle {}) vs {:.1} (dev {:.4})",
            irr.count,
            irr.predicted.mid_f64(),
            di,
            cop.count,
            oracle,
            cop.predicted.mid_f64(),
            dc
        ),
    ))
}

fn rational_coefficients_decrease() -> Check {
    let start = Instant::now();
    let table = density::coefficient_table(&SplittingProfile::rational(), 2, 15, &rat(1, 100_000), &Limits::default())?;
    let iv = &table.intervals;
    let bad: Vec<usize> = (0..15).filter(|&t| !iv[t + 1].strictly_below(&iv[t])).collect();
    let mut detail = format!(
        "N = {}, a_0 in [{}, {}], a_15 mid {:.3e}; undecided pairs {:?}",
        table.cutoff,
        iv[0].decimal_lo(8),
        iv[0].decimal_hi(8),
        iv[15].mid_f64(),
        bad
    );
    let ok = within_time(start, 60.0, "runtime", &mut detail) && bad.is_empty();
    Ok((ok, detail))
}

fn quadratic_coefficient_comparisons() -> Check {
    let limits = Limits::default();
    let tol = rat(1, 100_000);
    let q7 = SplittingProfile::quadratic(-7)?;
    let table = density::coefficient_table(&q7, 2, 14, &tol, &limits)?;
    let a = &table.intervals;
    let mut ok = a[1].strictly_below(&a[2]);
    let mut detail = format!(
        "d=-7: a_1 in [{}, {}] < a_2 in [{}, {}]",
        a[1].decimal_lo(6),
        a[1].decimal_hi(6),
        a[2].decimal_lo(6),
        a[2].decimal_hi(6)
    );
    for d in [-4, -7, -23] {
        let prof = SplittingProfile::quadratic(d)?;
        let table = density::coefficient_table(&prof, 2, 14, &tol, &limits)?;
        let a = &table.intervals;
        let bad: Vec<usize> = (0..=12)
            .filter(|&t| density::compare(&a[t], &a[t + 2]) != Comparison::Greater)
            .collect();
        ok &= bad.is_empty();
        detail.push_str(&format!("; d={d}: a_t > a_(t+2) for t<=12, failures {bad:?}"));
    }
    Ok((ok, detail))
}

fn moments_cross_validate() -> Check {
    let limits = Limits::default();
    let tol = rat(1, 10_000);
    let mut ok = true;
    let mut detail = Vec::new();
    for prof in [SplittingProfile::rational(), SplittingProfile::quadratic(-7)?] {
        let mv = density::expectation_variance(&prof, 2, &tol, &limits)?;
        let m1 = density::moment(&prof, 2, 1, &tol, &limits)?;
        let m2 = density::moment(&prof, 2, 2, &tol, &limits)?;
        let s1 = &m1.series;
        let s2 = &m2.series;
        let var_series = CertifiedInterval::new(
            s2.lo() - s1.hi() * s1.hi(),
            s2.hi() - s1.lo() * s1.lo(),
        )?;
        let good = mv.expectation.intersects(s1)
            && mv.variance.intersects(&var_series)
            && m2.combinatorial.intersects(s2)
            && mv.expectation.width() <= tol
            && mv.variance.width() <= tol;
        ok &= good;
        detail.push(format!(
            "{}: E {:.6} (series {:.6}), Var {:.6} (series {:.6}), m2 comb {:.6} series {:.6}",
            prof.id,
            mv.expectation.mid_f64(),
            s1.mid_f64(),
            mv.variance.mid_f64(),
            var_series.mid_f64(),
            m2.combinatorial.mid_f64(),
            s2.mid_f64()
        ));
    }
    Ok((ok, detail.join("; ")))
}

fn containment_independence() -> Check {
    let p2 = density::prob_x_contains(&[2], 2)?;
    let p3 = density::prob_x_contains(&[3], 2)?;
    let p23 = density::prob_x_contains(&[2, 3], 2)?;
    let ok = p2 == rat(1, 7) && p23 == &p2 * &p3;
    Ok((ok, format!("P[2 in X] = {p2}, P[3 in X] = {p3}, P[2,3 in X] = {p23}")))
}

/// Class number by an independent scan: every primitive form `(a, b, c)` with
/// `a <= sqrt(|d|)`, `|b| <= a`, reduced by its own loop and deduplicated.
pub fn class_number_oracle(d: i64) -> usize {
    let mut seen = HashSet::new();
    let mut a = 1i64;
    while a * a <= -d {
        for b in -a..=a {
            let num = b * b - d;
            if num % (4 * a) != 0 {
                continue;
            }
            let c = num / (4 * a);
            if a.gcd(&b).gcd(&c) != 1 {
                continue;
            }
            seen.insert(reduce_i64(a, b, c));
        }
        a += 1;
    }
    seen.len()
}

fn reduce_i64(mut a: i64, mut b: i64, mut c: i64) -> (i64, i64, i64) {
    loop {
        // b into (-a, a]
        if b > a || b <= -a {
            let k = (a - b).div_euclid(2 * a);
            c += k * b + k * k * a;
            b += 2 * k * a;
        }
        if a > c {
            std::mem::swap(&mut a, &mut c);
            b = -b;
            continue;
        }
        if a == c && b < 0 {
            b = -b;
        }
        return (a, b, c);
    }
}

fn class_groups() -> Check {
    let limits = Limits::default();
    let h = |d| quadfield::reduced_forms(d, &limits).map(|t| t.h());
    let mut ok = h(-23)? == 3 && h(-4)? == 1 && h(-163)? == 1;
    let mut mismatches = Vec::new();
    let mut checked = 0;
    let mut groups = 0;
    for d in (-10_000i64..=-3).filter(|&d| is_fundamental_discriminant(d)) {
        let table = quadfield::reduced_forms(d, &limits)?;
        checked += 1;
        if table.h() != class_number_oracle(d) {
            mismatches.push(d);
        }
        if table.h() <= 16 {
            groups += 1;
            if !group_axioms(&table) {
                ok = false;
                mismatches.push(d);
            }
        }
    }
    ok &= mismatches.is_empty();
    Ok((
        ok,
        format!(
            "h(-23)=3, h(-4)=1, h(-163)=1; {checked} discriminants vs reduction oracle, {groups} groups with h<=16 checked; mismatches {mismatches:?}"
        ),
    ))
}

fn group_axioms(table: &quadfield::ClassGroupTable) -> bool {
    let h = table.h();
    let m = table.composition_table();
    let e = table.principal_index();
    for i in 0..h {
        if m[e][i] != i || m[i][e] != i {
            return false;
        }
        if m[i][table.inverse_idx(i)] != e {
            return false;
        }
        for j in 0..h {
            if m[i][j] != m[j][i] {
                return false;
            }
            for k in 0..h {
                if m[m[i][j]][k] != m[i][m[j][k]] {
                    return false;
                }
            }
        }
    }
    true
}

/// The first `count` negative fundamental discriminants below `bound`.
fn fundamental_below(bound: i64, count: usize) -> Vec<i64> {
    (1..)
        .map(|k| bound - k)
        .filter(|&d| is_fundamental_discriminant(d))
        .take(count)
        .collect()
}

fn torsion_violators_case_analysis() -> Check {
    let limits = Limits::default();
    let mut ok = true;
    let mut bad = Vec::new();
    for t in 1..=3u32 {
        for d in fundamental_below(-4 * 10i64.pow(t), 20) {
            let table = quadfield::reduced_forms(d, &limits)?;
            let got = quadfield::t_torsion_violators(d, t as u64, 10, &table)?;
            let expect: Vec<u64> = [2u64, 3, 5, 7]
                .into_iter()
                .filter(|&p| {
                    let chi = kronecker(d, p);
                    if t % 2 == 1 {
                        chi >= 0
                    } else {
                        chi == 1
                    }
                })
                .collect();
            if got != expect {
                ok = false;
                bad.push((t, d, got, expect));
            }
        }
    }
    Ok((ok, format!("60 (t, d_K) cases, mismatches {bad:?}")))
}

fn torsion_density_near_character_product() -> Check {
    let limits = Limits::default();
    let tol = rat(1, 10_000);
    let mut ok = true;
    let mut lo = f64::INFINITY;
    let mut hi = 0f64;
    let ds: Vec<i64> = (-1000..=-41i64).rev().filter(|&d| is_fundamental_discriminant(d)).collect();
    // 20 evenly spread discriminants.
    let picks: Vec<i64> = (0..20).map(|i| ds[i * (ds.len() - 1) / 19]).collect();
    for &d in &picks {
        let td = quadfield::torsion_density(d, 1, 2, &tol, &limits)?.interval;
        let f = quadfield::f_n(d, 2, &tol, &limits)?.interval;
        let ratio = td.div(&f)?;
        ok &= ratio.lo() >= &rat(9, 10) && ratio.hi() <= &rat(11, 10);
        lo = lo.min(rational_to_f64(ratio.lo()));
        hi = hi.max(rational_to_f64(ratio.hi()));
    }
    Ok((
        ok,
        format!("20 d_K in [{}, {}]: ratio intervals within [{lo:.5}, {hi:.5}]", picks[19], picks[0]),
    ))
}

fn finite_field_census_formulas() -> Check {
    let limits = Limits::default();
    let census = factorstats::exact_factor_census(3, 7, &limits)?;
    let mut ok = true;
    let mut detail = String::new();
    for i in 1..=3 {
        let got = BigInt::from(census.squarefree_by_distinct.get(&i).copied().unwrap_or(0));
        let want = factorstats::squarefree_count_formula(3, i, 7)?;
        ok &= got == want;
        detail.push_str(&format!("i={i}: {got} vs formula {want}; "));
    }
    for (m, p) in [(2u32, 5u64), (3, 7), (3, 11)] {
        let c = factorstats::exact_factor_census(m, p, &limits)?;
        let want = Rational::one() - rat(1, p as i64);
        ok &= c.squarefree_fraction() == want;
        let irr = BigInt::from(c.squarefree_by_shape.get(&vec![m]).copied().unwrap_or(0));
        ok &= irr == factorstats::irreducible_count(m, p)?;
        detail.push_str(&format!("({m},{p}): squarefree {} irreducible {irr}; ", c.squarefree_fraction()));
    }
    Ok((ok, detail.trim_end_matches("; ").to_string()))
}

fn limit_density_and_census() -> Check {
    let mut ok = true;
    for m in 1..=12u32 {
        let row = stirling_density_row(m)?;
        for i in 1..=m {
            let want = row.get(&i).cloned().unwrap_or_else(Rational::zero);
            ok &= factorstats::limit_density(m, i)? == want;
        }
    }
    let start = Instant::now();
    let census = factorstats::exact_factor_census(3, 101, &Limits::default())?;
    let f = census.fraction(2);
    let ff = rational_to_f64(&f);
    ok &= (ff - 0.5).abs() <= 0.03;
    let mut detail = format!("limit_density rows m<=12 exact; f(3,2,101) = {f} = {ff:.5}");
    ok &= within_time(start, 60.0, "census", &mut detail);
    Ok((ok, detail))
}

fn splitting_sample() -> Check {
    let (m, p) = (2u32, 11u64);
    let sample = factorstats::empirical_splitting(m, p, 100, 100_000, SEED)?;
    let census = factorstats::exact_factor_census(m, p, &Limits::default())?;
    let mut ok = true;
    let mut detail = String::new();
    for i in 1..=2 {
        let exact = rational_to_f64(&census.fraction(i));
        let got = sample.fraction(i);
        ok &= (got - exact).abs() <= 0.1;
        detail.push_str(&format!("i={i}: {got:.4} vs f = {exact:.4}; "));
    }
    let skip = sample.skip_fraction();
    ok &= skip <= m as f64 / p as f64 + 0.05;
    detail.push_str(&format!("skipped {skip:.4} (bound {:.4})", m as f64 / p as f64 + 0.05));
    Ok((ok, detail))
}

fn discriminant_identities() -> Check {
    let mut ok = true;
    let mut detail = String::new();
    for n in 2..=4usize {
        let c = polyint::disc_monomial_coefficient(n)?;
        let want = BigInt::from(n as i64 - 1).pow(n as u32 - 1);
        ok &= c.magnitude() == want.magnitude();
        detail.push_str(&format!("n={n}: {c}; "));
    }
    let d = polyint::discriminant(&IntPolynomial::from_i64(&[1, 1, 0, 1])?)?;
    ok &= d == BigInt::from(-31);
    detail.push_str(&format!("Disc(x^3 + x + 1) = {d}"));
    Ok((ok, detail))
}

fn block_merge_determinism() -> Check {
    let limits = Limits::default();
    let config = AccumulateConfig {
        profiles: vec![
            SplittingProfile::rational(),
            SplittingProfile::quadratic(-7)?,
            SplittingProfile::quadratic(5)?,
        ],
        disc_classes: vec![-1, 5, -7],
        split_primes: vec![3, 11],
    };
    let mut ok = true;
    let mut detail = String::new();
    for (n, h) in [(2u32, 40u64), (3, 6)] {
        let spec = EnumSpec {
            degree: n,
            height: h,
            mode: Mode::Exhaustive,
            monic_only: false,
        };
        let whole = serde_json::to_string(&sampler::run_exhaustive(&spec, &config, 1, &limits)?)?;
        let split = serde_json::to_string(&sampler::run_exhaustive(&spec, &config, 8, &limits)?)?;
        let parts: Vec<_> = (0..8)
            .map(|b| sampler::run_exhaustive_block(&spec, &config, 8, b, &limits))
            .collect::<Result<_>>()?;
        // Merge in reverse order as well.
        let reversed = serde_json::to_string(&sampler::StatAccumulator::merged(parts.iter().rev()))?;
        ok &= whole == split && whole == reversed;
        detail.push_str(&format!("n={n}, H={h}: {} bytes, identical = {}; ", whole.len(), whole == split && whole == reversed));
    }
    Ok((ok, detail.trim_end_matches("; ").to_string()))
}
