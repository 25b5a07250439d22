//! Quadratic fields: Kronecker symbols, splitting of rational primes, class
//! groups of imaginary quadratic fields via reduced binary quadratic forms,
//! and the torsion densities built from them.

use std::collections::HashMap;
use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{domain, Result};
use crate::exact::{
    alpha_parts, certified_product, certified_product_at, is_prime, is_squarefree, CertifiedInterval,
    EulerProduct, Rational, sqrt_mod,
};
use crate::limits::Limits;

/// Kronecker symbol `(a / m)` for `m >= 1`: multiplicative in `m`, Legendre
/// at odd primes, and at 2 equal to 0 for even `a`, 1 for `a ≡ ±1 (mod 8)`,
/// -1 for `a ≡ ±3 (mod 8)`.
pub fn kronecker(a: i64, m: u64) -> i8 {
    if m == 0 {
        return if a.unsigned_abs() == 1 { 1 } else { 0 };
    }
    let mut m = m;
    let mut result: i8 = 1;
    let twos = m.trailing_zeros();
    if twos > 0 {
        if a % 2 == 0 {
            return 0;
        }
        m >>= twos;
        if twos % 2 == 1 && matches!(a.rem_euclid(8), 3 | 5) {
            result = -result;
        }
    }
    // Jacobi symbol (a / m) for odd m.
    let mut a = a.rem_euclid(m as i64) as u64;
    while a != 0 {
        let tz = a.trailing_zeros();
        a >>= tz;
        if tz % 2 == 1 && matches!(m % 8, 3 | 5) {
            result = -result;
        }
        if a % 4 == 3 && m % 4 == 3 {
            result = -result;
        }
        std::mem::swap(&mut a, &mut m);
        a %= m;
    }
    if m == 1 {
        result
    } else {
        0
    }
}

/// Discriminant of `Q(sqrt(m))`: `m` if `m ≡ 1 (mod 4)`, else `4m`.
pub fn fundamental_discriminant(m: i64) -> Result<i64> {
    if m == 0 || m == 1 || !is_squarefree(m.unsigned_abs()) {
        return domain(format!("{m} is not a squarefree integer other than 0, 1"));
    }
    Ok(if m.rem_euclid(4) == 1 { m } else { 4 * m })
}

pub fn is_fundamental_discriminant(d: i64) -> bool {
    if d == 0 || d == 1 {
        return false;
    }
    match d.rem_euclid(4) {
        1 => is_squarefree(d.unsigned_abs()),
        0 => {
            let m = d / 4;
            matches!(m.rem_euclid(4), 2 | 3) && is_squarefree(m.unsigned_abs())
        }
        _ => false,
    }
}

/// Squarefree `m` with `Q(sqrt(m))` of discriminant `d`.
pub fn radicand(d: i64) -> i64 {
    if d.rem_euclid(4) == 0 {
        d / 4
    } else {
        d
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum SplitType {
    Split,
    Inert,
    Ramified,
}

impl SplitType {
    /// Number of primes of `O_K` above `p`.
    pub fn r(self) -> u32 {
        match self {
            SplitType::Split => 2,
            _ => 1,
        }
    }
}

pub fn splitting_type(d: i64, p: u64) -> Result<SplitType> {
    if !is_fundamental_discriminant(d) {
        return domain(format!("{d} is not a fundamental discriminant"));
    }
    if !is_prime(p) {
        return domain(format!("{p} is not prime"));
    }
    Ok(match kronecker(d, p) {
        1 => SplitType::Split,
        0 => SplitType::Ramified,
        _ => SplitType::Inert,
    })
}

/// Positive definite binary quadratic form `a x^2 + b xy + c y^2`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct QuadraticForm {
    pub a: BigInt,
    pub b: BigInt,
    pub c: BigInt,
}

impl fmt::Display for QuadraticForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {}, {})", self.a, self.b, self.c)
    }
}

impl QuadraticForm {
    pub fn new(a: impl Into<BigInt>, b: impl Into<BigInt>, c: impl Into<BigInt>) -> Self {
        QuadraticForm {
            a: a.into(),
            b: b.into(),
            c: c.into(),
        }
    }

    pub fn discriminant(&self) -> BigInt {
        &self.b * &self.b - BigInt::from(4) * &self.a * &self.c
    }

    pub fn is_reduced(&self) -> bool {
        let ab = self.b.abs();
        self.a.is_positive()
            && ab <= self.a
            && self.a <= self.c
            && (!(ab == self.a || self.a == self.c) || !self.b.is_negative())
    }

    /// Move `b` into `(-a, a]` by `x -> x + r y`.
    fn normalize(&mut self) {
        let two_a = BigInt::from(2) * &self.a;
        let r = (&self.a - &self.b).div_floor(&two_a);
        let b_new = &self.b + &two_a * &r;
        self.c = &self.a * &r * &r + &self.b * &r + &self.c;
        self.b = b_new;
    }

    /// The reduced form equivalent to `self` (positive definite input).
    pub fn reduced(&self) -> QuadraticForm {
        let mut f = self.clone();
        f.normalize();
        while f.a > f.c {
            std::mem::swap(&mut f.a, &mut f.c);
            f.b = -f.b;
            f.normalize();
        }
        if f.a == f.c && f.b.is_negative() {
            f.b = -f.b;
        }
        f
    }

    pub fn inverse(&self) -> QuadraticForm {
        QuadraticForm::new(self.a.clone(), -self.b.clone(), self.c.clone()).reduced()
    }

    pub fn principal(d: i64) -> QuadraticForm {
        let b = d.rem_euclid(2);
        QuadraticForm::new(1, b, (b * b - d) / 4)
    }
}

fn ext_gcd(a: &BigInt, b: &BigInt) -> (BigInt, BigInt, BigInt) {
    let e = a.extended_gcd(b);
    (e.gcd, e.x, e.y)
}

/// Dirichlet composition of two forms of the same discriminant, reduced.
pub fn compose(f: &QuadraticForm, g: &QuadraticForm) -> Result<QuadraticForm> {
    let d = f.discriminant();
    if d != g.discriminant() {
        return domain(format!("discriminant mismatch: {f} and {g}"));
    }
    let two = BigInt::from(2);
    let s = (&f.b + &g.b) / &two;
    let (g1, x1, y1) = ext_gcd(&f.a, &g.a);
    let (e, x2, y2) = ext_gcd(&g1, &s);
    // u a1 + v a2 + w s = e
    let (u, v, w) = (&x2 * &x1, &x2 * &y1, y2);
    let a = &f.a * &g.a / (&e * &e);
    let num = &u * &f.a * &g.b + &v * &g.a * &f.b + &w * (&f.b * &g.b + &d) / &two;
    let b = (num / &e).mod_floor(&(&two * &a));
    let c_num = &b * &b - &d;
    let four_a = BigInt::from(4) * &a;
    debug_assert!((&c_num % &four_a).is_zero(), "composition produced non-integral c");
    let c = c_num / four_a;
    Ok(QuadraticForm { a, b, c }.reduced())
}

/// Reduced forms of a negative fundamental discriminant with lazy composition.
#[derive(Clone, Debug)]
pub struct ClassGroupTable {
    pub d: i64,
    pub forms: Vec<QuadraticForm>,
    index: HashMap<(BigInt, BigInt), usize>,
}

impl ClassGroupTable {
    pub fn h(&self) -> usize {
        self.forms.len()
    }

    pub fn index_of(&self, f: &QuadraticForm) -> Option<usize> {
        let r = f.reduced();
        self.index.get(&(r.a, r.b)).copied()
    }

    pub fn principal_index(&self) -> usize {
        0
    }

    pub fn compose_idx(&self, i: usize, j: usize) -> usize {
        let f = compose(&self.forms[i], &self.forms[j]).expect("same discriminant");
        self.index_of(&f).expect("composition of reduced forms stays in the table")
    }

    pub fn inverse_idx(&self, i: usize) -> usize {
        self.index_of(&self.forms[i].inverse()).unwrap()
    }

    /// Full `h x h` composition table.
    pub fn composition_table(&self) -> Vec<Vec<usize>> {
        (0..self.h())
            .map(|i| (0..self.h()).map(|j| self.compose_idx(i, j)).collect())
            .collect()
    }

    pub fn order(&self, i: usize) -> u64 {
        let mut k = 1;
        let mut cur = i;
        while cur != self.principal_index() {
            cur = self.compose_idx(cur, i);
            k += 1;
        }
        k
    }
}

/// All reduced forms of discriminant `d < 0` (fundamental): scan
/// `a <= sqrt(|d|/3)`, `|b| <= a`, `b ≡ d (mod 2)`.
pub fn reduced_forms(d: i64, limits: &Limits) -> Result<ClassGroupTable> {
    if d >= 0 || !is_fundamental_discriminant(d) {
        return domain(format!("{d} is not a negative fundamental discriminant"));
    }
    limits.check_disc(d)?;
    let mut forms = Vec::new();
    let mut a: i64 = 1;
    while 3 * a * a <= -d {
        for b in -a..=a {
            if (b - d).rem_euclid(2) != 0 {
                continue;
            }
            let num = b * b - d;
            if num % (4 * a) != 0 {
                continue;
            }
            let c = num / (4 * a);
            let f = QuadraticForm::new(a, b, c);
            if f.is_reduced() {
                forms.push(f);
            }
        }
        a += 1;
    }
    // Principal form first, then by (a, b).
    forms.sort();
    let index = forms
        .iter()
        .enumerate()
        .map(|(i, f)| ((f.a.clone(), f.b.clone()), i))
        .collect();
    Ok(ClassGroupTable { d, forms, index })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum PrimeClass {
    /// `p` stays prime in `O_K`; the ideal `(p)` is principal.
    Inert,
    /// Order of the class of a prime above `p`.
    Order(u64),
}

/// Order of `[p]` for a prime `p` above the rational prime, via the form
/// `(p, b, (b^2 - d)/(4p))` with `b^2 ≡ d (mod 4p)`.
pub fn prime_class_order(d: i64, p: u64, table: &ClassGroupTable) -> Result<PrimeClass> {
    if table.d != d {
        return domain("class group table belongs to another discriminant");
    }
    if !is_prime(p) {
        return domain(format!("{p} is not prime"));
    }
    if kronecker(d, p) == -1 {
        return Ok(PrimeClass::Inert);
    }
    let four_p = 4 * p as i128;
    let d128 = d as i128;
    // b^2 ≡ d (mod 4p): b ≡ ±sqrt(d) (mod p) with the parity of d.
    let b = if p == 2 {
        (0..4)
            .find(|&b| (b * b - d128).rem_euclid(four_p) == 0)
            .expect("a square root of d mod 8 exists for split and ramified 2")
    } else {
        let s = sqrt_mod(d.rem_euclid(p as i64) as u64, p).expect("d is a square mod p") as i128;
        if (s - d128).rem_euclid(2) == 0 {
            s
        } else {
            s + p as i128
        }
    };
    let c = (b * b - d128) / four_p;
    let form = QuadraticForm::new(p, BigInt::from(b), BigInt::from(c));
    let idx = table.index_of(&form).expect("form of discriminant d");
    Ok(PrimeClass::Order(table.order(idx)))
}

/// Primes `p < N` with a prime above them whose `t`-th power is not principal.
pub fn t_torsion_violators(d: i64, t: u64, cutoff: u64, table: &ClassGroupTable) -> Result<Vec<u64>> {
    if t == 0 {
        return domain("t must be at least 1");
    }
    let mut out = Vec::new();
    for p in 2..cutoff {
        if is_prime(p) && violates(d, p, t, table)? {
            out.push(p);
        }
    }
    Ok(out)
}

fn violates(d: i64, p: u64, t: u64, table: &ClassGroupTable) -> Result<bool> {
    Ok(match prime_class_order(d, p, table)? {
        PrimeClass::Inert => false,
        PrimeClass::Order(k) => t % k != 0,
    })
}

/// Certified `prod_{p in Y'} alpha_{p,n}`, `Y'` the `t`-torsion violators:
/// exact over `p < N`, tail factors bracketed by `(1 - eps_N, 1]`.
pub fn torsion_density(d: i64, t: u64, n: u32, tol: &Rational, limits: &Limits) -> Result<EulerProduct> {
    if t == 0 {
        return domain("t must be at least 1");
    }
    let table = reduced_forms(d, limits)?;
    certified_product(n, tol, limits, |p| {
        Ok(violates(d, p, t, &table)?.then(|| alpha_parts(p, n)))
    })
}

/// `f_n(d) = prod_{chi_p(d) in {0,1}} alpha_{p,n}` and
/// `g_n(d) = prod_{chi_p(d) = 1} alpha_{p,n}`, truncated at `N` with tail intervals.
pub fn character_products(d: i64, n: u32, cutoff: u64) -> Result<(CertifiedInterval, CertifiedInterval)> {
    let f = certified_product_at(n, cutoff, |p| Ok((kronecker(d, p) >= 0).then(|| alpha_parts(p, n))))?;
    let g = certified_product_at(n, cutoff, |p| Ok((kronecker(d, p) == 1).then(|| alpha_parts(p, n))))?;
    Ok((f, g))
}

/// `f_n(d)` to width `<= tol`.
pub fn f_n(d: i64, n: u32, tol: &Rational, limits: &Limits) -> Result<EulerProduct> {
    certified_product(n, tol, limits, |p| Ok((kronecker(d, p) >= 0).then(|| alpha_parts(p, n))))
}

/// `g_n(d)` to width `<= tol`.
pub fn g_n(d: i64, n: u32, tol: &Rational, limits: &Limits) -> Result<EulerProduct> {
    certified_product(n, tol, limits, |p| Ok((kronecker(d, p) == 1).then(|| alpha_parts(p, n))))
}

/// One CSV row per reduced form: `d_K, h, form, order`.
pub fn class_group_csv(table: &ClassGroupTable) -> String {
    let mut out = String::from("d_K,h,a,b,c,order\n");
    for (i, f) in table.forms.iter().enumerate() {
        out.push_str(&format!(
            "{},{},{},{},{},{}\n",
            table.d,
            table.h(),
            f.a,
            f.b,
            f.c,
            table.order(i)
        ));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn kronecker_examples() {
        assert_eq!(kronecker(-7, 2), 1);
        assert_eq!(kronecker(-7, 7), 0);
        assert_eq!(kronecker(2, 7), 1);
        assert_eq!(kronecker(5, 2), -1);
        assert_eq!(kronecker(-7, 3), -1);
        assert_eq!(kronecker(-4, 2), 0);
        // Legendre symbol by Euler's criterion for odd primes.
        for p in [3u64, 5, 7, 11, 13, 101] {
            for a in -30i64..30 {
                let r = a.rem_euclid(p as i64) as u64;
                let euler = if r == 0 {
                    0
                } else if crate::factorstats::gf::pow_mod(r, (p - 1) / 2, p) == 1 {
                    1
                } else {
                    -1
                };
                assert_eq!(kronecker(a, p), euler, "a = {a}, p = {p}");
            }
        }
        // Multiplicative in the bottom argument.
        for a in [-23i64, -7, -4, 5, 8, 12] {
            for m in 1..40u64 {
                for k in 1..10u64 {
                    assert_eq!(kronecker(a, m * k), kronecker(a, m) * kronecker(a, k));
                }
            }
        }
    }

    #[test]
    fn discriminants() {
        assert_eq!(fundamental_discriminant(-7).unwrap(), -7);
        assert_eq!(fundamental_discriminant(-1).unwrap(), -4);
        assert_eq!(fundamental_discriminant(-5).unwrap(), -20);
        assert_eq!(fundamental_discriminant(5).unwrap(), 5);
        assert!(fundamental_discriminant(-4).is_err());
        assert!(fundamental_discriminant(1).is_err());
        assert!(is_fundamental_discriminant(-23));
        assert!(is_fundamental_discriminant(-8));
        assert!(!is_fundamental_discriminant(-16));
        assert!(!is_fundamental_discriminant(-12));
        assert_eq!(radicand(-20), -5);
    }

    #[test]
    fn splitting_examples() {
        assert_eq!(splitting_type(-7, 2).unwrap(), SplitType::Split);
        assert_eq!(splitting_type(-7, 7).unwrap(), SplitType::Ramified);
        assert_eq!(splitting_type(-7, 3).unwrap(), SplitType::Inert);
        assert_eq!(splitting_type(5, 2).unwrap(), SplitType::Inert);
        assert!(splitting_type(-16, 3).is_err());
    }

    #[test]
    fn class_groups() {
        let l = Limits::default();
        let t = reduced_forms(-23, &l).unwrap();
        assert_eq!(
            t.forms,
            vec![
                QuadraticForm::new(1, 1, 6),
                QuadraticForm::new(2, -1, 3),
                QuadraticForm::new(2, 1, 3)
            ]
        );
        assert_eq!(reduced_forms(-4, &l).unwrap().h(), 1);
        assert_eq!(reduced_forms(-163, &l).unwrap().h(), 1);
        assert_eq!(reduced_forms(-20, &l).unwrap().h(), 2);
        let f = QuadraticForm::new(2, 1, 3);
        let sq = compose(&f, &f).unwrap();
        assert_eq!(sq, QuadraticForm::new(2, -1, 3));
        assert_eq!(compose(&sq, &f).unwrap(), QuadraticForm::principal(-23));
        assert_eq!(compose(&QuadraticForm::principal(-23), &f).unwrap(), f);
        assert!(compose(&f, &QuadraticForm::principal(-7)).is_err());
        assert!(reduced_forms(-16, &l).is_err());
    }

    #[test]
    fn prime_orders() {
        let l = Limits::default();
        let t = reduced_forms(-23, &l).unwrap();
        assert_eq!(prime_class_order(-23, 2, &t).unwrap(), PrimeClass::Order(3));
        assert_eq!(prime_class_order(-23, 5, &t).unwrap(), PrimeClass::Inert);
        match prime_class_order(-23, 23, &t).unwrap() {
            PrimeClass::Order(k) => assert!(k <= 2),
            PrimeClass::Inert => panic!("23 ramifies"),
        }
        let t4 = reduced_forms(-4, &l).unwrap();
        assert_eq!(prime_class_order(-4, 5, &t4).unwrap(), PrimeClass::Order(1));
        assert!(t_torsion_violators(-4, 1, 100, &t4).unwrap().is_empty());
        // -23, t = 3: 2 has order 3, so it is not a violator.
        let v = t_torsion_violators(-23, 3, 30, &t).unwrap();
        assert!(!v.contains(&2));
    }
}
