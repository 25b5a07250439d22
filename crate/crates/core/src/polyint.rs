//! Integer polynomials: normalization to primitive representatives, e(gamma),
//! discriminants through the Sylvester matrix, irreducibility over Z and the
//! square class of a discriminant.

use std::fmt;

use num_bigint::{BigInt, Sign};
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};
use crate::exact::{binomial, divisors, is_prime, Rational};
use crate::factorstats::gf;

/// `a_0 + a_1 x + ... + a_n x^n`, stored low-to-high with `a_n != 0`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct IntPolynomial {
    pub(crate) coeffs: Vec<BigInt>,
}

impl IntPolynomial {
    pub fn new(coeffs: Vec<BigInt>) -> Result<Self> {
        match coeffs.last() {
            None => domain("empty coefficient list"),
            Some(c) if c.is_zero() => domain("leading coefficient is zero"),
            _ => Ok(IntPolynomial { coeffs }),
        }
    }

    pub fn from_i64(coeffs: &[i64]) -> Result<Self> {
        Self::new(coeffs.iter().map(|&c| BigInt::from(c)).collect())
    }

    pub fn coeffs(&self) -> &[BigInt] {
        &self.coeffs
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn leading(&self) -> &BigInt {
        self.coeffs.last().unwrap()
    }

    pub fn height(&self) -> BigInt {
        self.coeffs.iter().map(|c| c.abs()).max().unwrap()
    }

    pub fn content(&self) -> BigInt {
        self.coeffs.iter().fold(BigInt::zero(), |g, c| g.gcd(c))
    }

    pub fn is_primitive(&self) -> bool {
        self.content().is_one()
    }

    pub fn eval(&self, x: &BigInt) -> BigInt {
        self.coeffs
            .iter()
            .rev()
            .fold(BigInt::zero(), |acc, c| acc * x + c)
    }

    pub fn derivative(&self) -> Option<IntPolynomial> {
        if self.degree() == 0 {
            return None;
        }
        let d = self
            .coeffs
            .iter()
            .enumerate()
            .skip(1)
            .map(|(i, c)| c * i)
            .collect();
        Some(IntPolynomial { coeffs: d })
    }

    pub fn mul(&self, other: &IntPolynomial) -> IntPolynomial {
        let mut out = vec![BigInt::zero(); self.coeffs.len() + other.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            for (j, b) in other.coeffs.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        IntPolynomial { coeffs: out }
    }

    /// `self / other` when the quotient has integer coefficients and the
    /// remainder is zero.
    pub fn div_exact(&self, other: &IntPolynomial) -> Option<IntPolynomial> {
        let n = self.degree();
        let k = other.degree();
        if k > n {
            return None;
        }
        let mut r = self.coeffs.clone();
        let lc = other.leading();
        let mut q = vec![BigInt::zero(); n - k + 1];
        for i in (0..=n - k).rev() {
            let (c, rem) = r[i + k].div_rem(lc);
            if !rem.is_zero() {
                return None;
            }
            for (j, b) in other.coeffs.iter().enumerate() {
                r[i + j] -= &c * b;
            }
            q[i] = c;
        }
        r.iter().all(Zero::is_zero).then(|| IntPolynomial { coeffs: q })
    }

    /// Residues mod `p`, low-to-high (leading residue may be zero).
    pub(crate) fn residues(&self, p: u64) -> Vec<u64> {
        let pb = BigInt::from(p);
        self.coeffs
            .iter()
            .map(|c| c.mod_floor(&pb).to_u64().unwrap())
            .collect()
    }
}

impl fmt::Display for IntPolynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (i, c) in self.coeffs.iter().enumerate().rev() {
            if c.is_zero() {
                continue;
            }
            let neg = c.is_negative();
            let a = c.abs();
            if first {
                if neg {
                    write!(f, "-")?;
                }
            } else {
                write!(f, " {} ", if neg { '-' } else { '+' })?;
            }
            first = false;
            let coeff_shown = !a.is_one() || i == 0;
            if coeff_shown {
                write!(f, "{a}")?;
            }
            match i {
                0 => {}
                1 => write!(f, "x")?,
                _ => write!(f, "x^{i}")?,
            }
        }
        if first {
            write!(f, "0")?;
        }
        Ok(())
    }
}

/// A primitive irreducible polynomial with positive leading coefficient,
/// standing for its `weight = degree` roots.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct NormalizedRep {
    pub poly: IntPolynomial,
    pub weight: u32,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Rejection {
    Zero,
    /// The last entry of the coefficient list (the declared leading term) is zero.
    DegreeMismatch,
    /// Nonzero constant: not the minimal polynomial of anything.
    Constant,
    Reducible,
}

/// Divide out the content, make the leading coefficient positive, and keep
/// the result only when it is irreducible.
pub fn normalize(coeffs: &[BigInt]) -> std::result::Result<NormalizedRep, Rejection> {
    if coeffs.iter().all(Zero::is_zero) {
        return Err(Rejection::Zero);
    }
    if coeffs.last().unwrap().is_zero() {
        return Err(Rejection::DegreeMismatch);
    }
    if coeffs.len() == 1 {
        return Err(Rejection::Constant);
    }
    let content = coeffs.iter().fold(BigInt::zero(), |g, c| g.gcd(c));
    let sign = if coeffs.last().unwrap().is_negative() {
        -BigInt::one()
    } else {
        BigInt::one()
    };
    let unit = content * sign;
    let poly = IntPolynomial {
        coeffs: coeffs.iter().map(|c| c / &unit).collect(),
    };
    match is_irreducible(&poly) {
        Ok(true) => Ok(NormalizedRep {
            weight: poly.degree() as u32,
            poly,
        }),
        _ => Err(Rejection::Reducible),
    }
}

/// `e(gamma) = gcd(a_1, ..., a_n)`.
pub fn e_invariant(rep: &NormalizedRep) -> BigInt {
    rep.poly.coeffs[1..]
        .iter()
        .fold(BigInt::zero(), |g, c| g.gcd(c))
}

/// Determinant by fraction-free (Bareiss) elimination.
pub fn bareiss_determinant(mut m: Vec<Vec<BigInt>>) -> BigInt {
    let n = m.len();
    if n == 0 {
        return BigInt::one();
    }
    let mut sign = BigInt::one();
    let mut prev = BigInt::one();
    for k in 0..n - 1 {
        if m[k][k].is_zero() {
            match (k + 1..n).find(|&i| !m[i][k].is_zero()) {
                Some(i) => {
                    m.swap(i, k);
                    sign = -sign;
                }
                None => return BigInt::zero(),
            }
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let v = &m[i][j] * &m[k][k] - &m[i][k] * &m[k][j];
                m[i][j] = v / &prev;
            }
        }
        prev = m[k][k].clone();
    }
    sign * &m[n - 1][n - 1]
}

/// Sylvester matrix of `f` and `g` with coefficients written leading-first.
pub fn sylvester_matrix(f: &IntPolynomial, g: &IntPolynomial) -> Vec<Vec<BigInt>> {
    let n = f.degree();
    let m = g.degree();
    let size = n + m;
    let mut rows = Vec::with_capacity(size);
    for (poly, shifts) in [(f, m), (g, n)] {
        let lead_first: Vec<&BigInt> = poly.coeffs.iter().rev().collect();
        for s in 0..shifts {
            let mut row = vec![BigInt::zero(); size];
            for (j, c) in lead_first.iter().enumerate() {
                row[s + j] = (*c).clone();
            }
            rows.push(row);
        }
    }
    rows
}

/// `Disc(f) = (-1)^{n(n-1)/2} / a_n * det S(f, f')`.
pub fn discriminant(poly: &IntPolynomial) -> Result<BigInt> {
    let n = poly.degree();
    if n < 2 {
        return domain("discriminant needs degree >= 2");
    }
    let df = poly.derivative().unwrap();
    let det = bareiss_determinant(sylvester_matrix(poly, &df));
    let (q, r) = det.div_rem(poly.leading());
    if !r.is_zero() {
        return Err(Error::Consistency(format!(
            "Sylvester determinant {det} not divisible by leading coefficient of {poly}"
        )));
    }
    Ok(if (n * (n - 1) / 2) % 2 == 1 { -q } else { q })
}

/// Coefficient of `A_{n-1}^n A_0^{n-2}` in `Disc(A_0 x^n + ... + A_n)`
/// (`A_0` leading, `A_{n-1}` the coefficient of `x`).
///
/// Along the line `x^n + s x` every other coefficient vanishes and `A_0 = 1`,
/// so `Disc` restricts to a polynomial in `s` of degree `<= 2n - 2` whose
/// `s^n` coefficient, by homogeneity of degree `2n - 2`, is exactly the target.
/// It is recovered by Newton interpolation on `s = 0..=2n-2`.
pub fn disc_monomial_coefficient(n: usize) -> Result<BigInt> {
    if !(2..=6).contains(&n) {
        return domain(format!("disc_monomial_coefficient supports 2 <= n <= 6, got {n}"));
    }
    let points: Vec<i64> = (0..=(2 * n as i64 - 2)).collect();
    let mut values = Vec::with_capacity(points.len());
    for &s in &points {
        let mut c = vec![BigInt::zero(); n + 1];
        c[n] = BigInt::one();
        c[1] = BigInt::from(s);
        values.push(Rational::from_integer(discriminant(&IntPolynomial::new(c)?)?));
    }
    let coeffs = interpolate(&points, &values);
    let target = coeffs[n].clone();
    if !target.is_integer() {
        return Err(Error::Consistency("non-integral interpolated coefficient".into()));
    }
    Ok(target.to_integer())
}

/// Monomial coefficients of the interpolating polynomial through `(x_i, y_i)`.
fn interpolate(xs: &[i64], ys: &[Rational]) -> Vec<Rational> {
    let k = xs.len();
    let mut dd: Vec<Rational> = ys.to_vec();
    for level in 1..k {
        for i in (level..k).rev() {
            dd[i] = (&dd[i] - &dd[i - 1]) / Rational::from_integer(BigInt::from(xs[i] - xs[i - level]));
        }
    }
    // Horner on the Newton form.
    let mut poly = vec![Rational::zero(); k];
    for i in (0..k).rev() {
        // poly = poly * (x - xs[i]) + dd[i]
        let mut next = vec![Rational::zero(); k];
        for j in 0..k {
            if poly[j].is_zero() {
                continue;
            }
            if j + 1 < k {
                next[j + 1] += &poly[j];
            }
            next[j] -= &poly[j] * Rational::from_integer(BigInt::from(xs[i]));
        }
        next[0] += &dd[i];
        poly = next;
    }
    poly
}

fn abs_divisors(n: &BigInt) -> Vec<BigInt> {
    let a = n.abs();
    if let Some(v) = a.to_u64() {
        return divisors(v).into_iter().map(BigInt::from).collect();
    }
    let mut small = Vec::new();
    let mut large = Vec::new();
    let mut d = BigInt::one();
    while &d * &d <= a {
        if (&a % &d).is_zero() {
            let q = &a / &d;
            if q != d {
                large.push(q);
            }
            small.push(d.clone());
        }
        d += 1;
    }
    small.extend(large.into_iter().rev());
    small
}

/// Whether `f` has a rational root `p/q` (`p | a_0`, `q | a_n`).
pub fn has_rational_root(f: &IntPolynomial) -> bool {
    let c = &f.coeffs;
    if c[0].is_zero() {
        return true;
    }
    let ps = abs_divisors(&c[0]);
    let qs = abs_divisors(f.leading());
    for q in &qs {
        for p in &ps {
            if !p.gcd(q).is_one() {
                continue;
            }
            for num in [p.clone(), -p] {
                if homogeneous_eval(c, &num, q).is_zero() {
                    return true;
                }
            }
        }
    }
    false
}

/// `sum_i a_i num^i q^(n-i)`.
fn homogeneous_eval(c: &[BigInt], num: &BigInt, q: &BigInt) -> BigInt {
    let n = c.len() - 1;
    let mut acc = BigInt::zero();
    let mut qpow = BigInt::one();
    // Horner from the top: acc = acc * num + a_i q^(n-i)
    for i in (0..=n).rev() {
        acc = acc * num + &c[i] * &qpow;
        qpow *= q;
    }
    acc
}

const CERTIFICATE_PRIMES: usize = 24;

/// Possible degrees of a nontrivial factor over Z, intersected across the
/// factorizations of `f mod p` for small primes where `f mod p` keeps its
/// degree and is squarefree. Entry `k` is true when degree `k` is still possible.
fn possible_factor_degrees(f: &IntPolynomial) -> Vec<bool> {
    let n = f.degree();
    let mut allowed = vec![true; n + 1];
    let mut used = 0;
    let mut p = 2u64;
    while used < CERTIFICATE_PRIMES && p < 2000 {
        if is_prime(p) {
            let r = f.residues(p);
            if r[n] != 0 {
                if let Some(degs) = gf::squarefree_factor_degrees(&r, p) {
                    used += 1;
                    let mut sums = vec![false; n + 1];
                    sums[0] = true;
                    for d in degs {
                        for s in (d as usize..=n).rev() {
                            if sums[s - d as usize] {
                                sums[s] = true;
                            }
                        }
                    }
                    for k in 0..=n {
                        allowed[k] &= sums[k];
                    }
                    if (1..n).all(|k| !allowed[k]) {
                        break;
                    }
                }
            }
        }
        p += 1;
    }
    allowed
}

/// Search for an integer factor of degree `k` whose coefficients obey the
/// Mignotte bound `|b_j| <= C(k, j) ||f||_2`.
fn find_factor_of_degree(f: &IntPolynomial, k: usize) -> Option<IntPolynomial> {
    let norm2: BigInt = f.coeffs.iter().map(|c| c * c).sum();
    let norm = norm2.sqrt() + 1;
    let bounds: Vec<BigInt> = (0..=k).map(|j| binomial(k as u64, j as u64) * &norm).collect();
    let checks: Vec<(BigInt, BigInt)> = [1i64, -1, 2, -2]
        .iter()
        .map(|&x| {
            let x = BigInt::from(x);
            let v = f.eval(&x);
            (x, v)
        })
        .filter(|(_, v)| !v.is_zero())
        .collect();
    let leads = abs_divisors(f.leading());
    let consts: Vec<BigInt> = abs_divisors(&f.coeffs[0])
        .into_iter()
        .flat_map(|d| [d.clone(), -d])
        .collect();
    let mut g = vec![BigInt::zero(); k + 1];
    for lead in &leads {
        g[k] = lead.clone();
        for c0 in &consts {
            g[0] = c0.clone();
            if let Some(h) = search_middle(f, &mut g, 1, &bounds, &checks) {
                return Some(h);
            }
        }
    }
    None
}

fn search_middle(
    f: &IntPolynomial,
    g: &mut Vec<BigInt>,
    j: usize,
    bounds: &[BigInt],
    checks: &[(BigInt, BigInt)],
) -> Option<IntPolynomial> {
    let k = g.len() - 1;
    if j == k {
        let cand = IntPolynomial { coeffs: g.clone() };
        for (x, v) in checks {
            let gv = cand.eval(x);
            if gv.is_zero() || !(v % &gv).is_zero() {
                return None;
            }
        }
        return f.div_exact(&cand).map(|_| cand);
    }
    let b = &bounds[j];
    let mut c = -b.clone();
    while &c <= b {
        g[j] = c.clone();
        if let Some(h) = search_middle(f, g, j + 1, bounds, checks) {
            return Some(h);
        }
        c += 1;
    }
    None
}

/// Irreducibility over Z of a primitive polynomial of degree >= 1.
///
/// Pipeline: degree 1; zero constant term; rational roots; degree <= 3 needs
/// nothing more; factor degrees modulo small primes; exhaustive factor search
/// in the degrees that survive.
pub fn is_irreducible(poly: &IntPolynomial) -> Result<bool> {
    if !poly.is_primitive() {
        return domain(format!("{poly} is not primitive"));
    }
    let n = poly.degree();
    if n == 0 {
        return domain("constant polynomial");
    }
    if n == 1 {
        return Ok(true);
    }
    if has_rational_root(poly) {
        return Ok(false);
    }
    if n <= 3 {
        return Ok(true);
    }
    let allowed = possible_factor_degrees(poly);
    for k in 2..=n / 2 {
        if allowed[k] && find_factor_of_degree(poly, k).is_some() {
            return Ok(false);
        }
    }
    Ok(true)
}

/// `D = m y^2` with `m` squarefree carrying the sign and `y > 0`.
pub fn square_class(d: &BigInt) -> Result<(BigInt, BigInt)> {
    if d.is_zero() {
        return domain("square_class of 0");
    }
    let mut m = if d.sign() == Sign::Minus {
        -BigInt::one()
    } else {
        BigInt::one()
    };
    let mut y = BigInt::one();
    let mut c = d.abs();
    let mut p = BigInt::from(2u32);
    // After removing every prime below p, a cofactor c < p^3 has at most two
    // prime factors, so it is squarefree unless it is a perfect square.
    while &p * &p * &p <= c {
        let mut e = 0u32;
        while (&c % &p).is_zero() {
            c /= &p;
            e += 1;
        }
        y *= p.pow(e / 2);
        if e % 2 == 1 {
            m *= &p;
        }
        p += if p == BigInt::from(2u32) { 1 } else { 2 };
    }
    let r = c.sqrt();
    if &r * &r == c && !c.is_one() {
        y *= r;
    } else {
        m *= c;
    }
    Ok((m, y))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn poly(c: &[i64]) -> IntPolynomial {
        IntPolynomial::from_i64(c).unwrap()
    }

    fn big(c: &[i64]) -> Vec<BigInt> {
        c.iter().map(|&x| BigInt::from(x)).collect()
    }

    #[test]
    fn normalize_examples() {
        let r = normalize(&big(&[6, 4, 2])).unwrap();
        assert_eq!(r.poly, poly(&[3, 2, 1]));
        assert_eq!(r.weight, 2);
        assert_eq!(normalize(&big(&[1, 0, -1])), Err(Rejection::Reducible));
        assert_eq!(normalize(&big(&[3, 4, 2])).unwrap().poly, poly(&[3, 4, 2]));
        assert_eq!(normalize(&big(&[0, 0])), Err(Rejection::Zero));
        assert_eq!(normalize(&big(&[1, 0])), Err(Rejection::DegreeMismatch));
        assert_eq!(normalize(&big(&[5])), Err(Rejection::Constant));
        assert_eq!(normalize(&big(&[-2, 0, -1])).unwrap().poly, poly(&[2, 0, 1]));
    }

    #[test]
    fn e_examples() {
        assert_eq!(e_invariant(&normalize(&big(&[3, 4, 2])).unwrap()), BigInt::from(2));
        assert_eq!(e_invariant(&normalize(&big(&[7, 4, 1])).unwrap()), BigInt::one());
        // 6x^3 + 9x^2 + 3x + 2: no rational root among ±{1,2}/{1,2,3,6}.
        let r = normalize(&big(&[2, 3, 9, 6])).unwrap();
        assert_eq!(e_invariant(&r), BigInt::from(3));
    }

    #[test]
    fn discriminant_examples() {
        assert_eq!(discriminant(&poly(&[1, 1, 0, 1])).unwrap(), BigInt::from(-31));
        assert_eq!(discriminant(&poly(&[-2, 0, 1])).unwrap(), BigInt::from(8));
        for (a, b, c) in [(3, 5, 7), (-2, 1, 4), (1, 0, 0), (5, -9, 2)] {
            assert_eq!(
                discriminant(&poly(&[c, b, a])).unwrap(),
                BigInt::from(b * b - 4 * a * c)
            );
        }
        assert!(discriminant(&poly(&[1, 1])).is_err());
    }

    #[test]
    fn monomial_coefficients() {
        assert_eq!(disc_monomial_coefficient(2).unwrap(), BigInt::from(1));
        assert_eq!(disc_monomial_coefficient(3).unwrap(), BigInt::from(-4));
        assert_eq!(disc_monomial_coefficient(4).unwrap(), BigInt::from(-27));
        assert_eq!(disc_monomial_coefficient(5).unwrap(), BigInt::from(256));
        assert_eq!(disc_monomial_coefficient(6).unwrap().abs(), BigInt::from(3125));
        assert!(disc_monomial_coefficient(7).is_err());
    }

    #[test]
    fn irreducibility_examples() {
        assert!(is_irreducible(&poly(&[-2, 0, 1])).unwrap());
        assert!(!is_irreducible(&poly(&[4, 0, 0, 0, 1])).unwrap());
        assert!(is_irreducible(&poly(&[3, 4, 2])).unwrap());
        // x^4 + 1 is irreducible over Q yet reducible mod every prime.
        assert!(is_irreducible(&poly(&[1, 0, 0, 0, 1])).unwrap());
        assert!(!is_irreducible(&poly(&[1, 0, 2, 0, 1])).unwrap());
        // (x^2 + x + 1)(x^3 - x + 3)
        let f = poly(&[1, 1, 1]).mul(&poly(&[3, -1, 0, 1]));
        assert!(!is_irreducible(&f).unwrap());
        assert!(is_irreducible(&poly(&[-1, -1, 0, 0, 0, 1])).unwrap());
        assert!(is_irreducible(&poly(&[2, 4, 6])).is_err());
    }

    #[test]
    fn square_class_examples() {
        let sc = |d: i64| {
            let (m, y) = square_class(&BigInt::from(d)).unwrap();
            (m.to_i64().unwrap(), y.to_i64().unwrap())
        };
        assert_eq!(sc(18), (2, 3));
        assert_eq!(sc(-8), (-2, 2));
        assert_eq!(sc(-31), (-31, 1));
        assert_eq!(sc(1), (1, 1));
        assert_eq!(sc(49 * 11 * 11), (1, 77));
        assert_eq!(sc(-4 * 1_000_003 * 1_000_003), (-1, 2_000_006));
        assert!(square_class(&BigInt::zero()).is_err());
    }

    #[test]
    fn display() {
        assert_eq!(poly(&[3, -4, 0, 1]).to_string(), "x^3 - 4x + 3");
        assert_eq!(poly(&[-1, 1]).to_string(), "x - 1");
        assert_eq!(poly(&[0, 0, -2]).to_string(), "-2x^2");
    }
}
