//! Dense polynomials over F_p on `Vec<u64>`, low-to-high, no trailing zeros.
//! The zero polynomial is the empty vector. Requires p < 2^32.

pub(crate) type Poly = Vec<u64>;

pub(crate) fn trim(mut a: Poly) -> Poly {
    while a.last() == Some(&0) {
        a.pop();
    }
    a
}

pub(crate) fn pow_mod(mut b: u64, mut e: u64, p: u64) -> u64 {
    let mut r = 1 % p;
    b %= p;
    while e > 0 {
        if e & 1 == 1 {
            r = r * b % p;
        }
        b = b * b % p;
        e >>= 1;
    }
    r
}

pub(crate) fn inv(a: u64, p: u64) -> u64 {
    debug_assert!(a % p != 0);
    pow_mod(a, p - 2, p)
}

pub(crate) fn sub(a: &[u64], b: &[u64], p: u64) -> Poly {
    let n = a.len().max(b.len());
    let mut out = vec![0; n];
    for (i, o) in out.iter_mut().enumerate() {
        let x = a.get(i).copied().unwrap_or(0);
        let y = b.get(i).copied().unwrap_or(0);
        *o = (x + p - y) % p;
    }
    trim(out)
}

pub(crate) fn mul(a: &[u64], b: &[u64], p: u64) -> Poly {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let mut out = vec![0u64; a.len() + b.len() - 1];
    for (i, &x) in a.iter().enumerate() {
        if x == 0 {
            continue;
        }
        for (j, &y) in b.iter().enumerate() {
            out[i + j] = (out[i + j] + x * y) % p;
        }
    }
    trim(out)
}

pub(crate) fn monic(a: &[u64], p: u64) -> Poly {
    match a.last() {
        None => Vec::new(),
        Some(&lc) => {
            let k = inv(lc, p);
            a.iter().map(|&x| x * k % p).collect()
        }
    }
}

/// Quotient and remainder; `b` must be nonzero.
pub(crate) fn divrem(a: &[u64], b: &[u64], p: u64) -> (Poly, Poly) {
    let db = b.len() - 1;
    let k = inv(b[db], p);
    let mut r = a.to_vec();
    if r.len() <= db {
        return (Vec::new(), trim(r));
    }
    let mut q = vec![0u64; r.len() - db];
    for i in (db..r.len()).rev() {
        let c = r[i] * k % p;
        if c == 0 {
            continue;
        }
        q[i - db] = c;
        for (j, &bj) in b.iter().enumerate() {
            let idx = i - db + j;
            r[idx] = (r[idx] + p - c * bj % p) % p;
        }
    }
    r.truncate(db);
    (trim(q), trim(r))
}

pub(crate) fn rem(a: &[u64], b: &[u64], p: u64) -> Poly {
    divrem(a, b, p).1
}

/// Exact quotient (asserted in debug builds).
pub(crate) fn div_exact(a: &[u64], b: &[u64], p: u64) -> Poly {
    let (q, r) = divrem(a, b, p);
    debug_assert!(r.is_empty(), "inexact division over F_p");
    q
}

/// Monic gcd.
pub(crate) fn gcd(a: &[u64], b: &[u64], p: u64) -> Poly {
    let mut x = trim(a.to_vec());
    let mut y = trim(b.to_vec());
    while !y.is_empty() {
        let r = rem(&x, &y, p);
        x = y;
        y = r;
    }
    monic(&x, p)
}

pub(crate) fn derivative(a: &[u64], p: u64) -> Poly {
    trim(
        a.iter()
            .enumerate()
            .skip(1)
            .map(|(i, &c)| (i as u64 % p) * c % p)
            .collect(),
    )
}

pub(crate) fn mulmod(a: &[u64], b: &[u64], m: &[u64], p: u64) -> Poly {
    rem(&mul(a, b, p), m, p)
}

/// `base^e mod m`.
pub(crate) fn powmod(base: &[u64], mut e: u64, m: &[u64], p: u64) -> Poly {
    let mut result = rem(&[1], m, p);
    let mut b = rem(base, m, p);
    while e > 0 {
        if e & 1 == 1 {
            result = mulmod(&result, &b, m, p);
        }
        b = mulmod(&b, &b, m, p);
        e >>= 1;
    }
    result
}

/// Yun's squarefree decomposition of a monic polynomial of degree < p:
/// pairs (i, a_i) where a_i is the product of the irreducible factors of
/// multiplicity exactly i. Only nonconstant a_i are returned.
pub(crate) fn squarefree_decomposition(f: &[u64], p: u64) -> Vec<(u32, Poly)> {
    let df = derivative(f, p);
    let a0 = gcd(f, &df, p);
    let mut b = div_exact(f, &a0, p);
    let mut c = div_exact(&df, &a0, p);
    let mut d = sub(&c, &derivative(&b, p), p);
    let mut out = Vec::new();
    let mut i = 1;
    while b.len() > 1 {
        let a = gcd(&b, &d, p);
        if a.len() > 1 {
            out.push((i, a.clone()));
        }
        b = div_exact(&b, &a, p);
        c = div_exact(&d, &a, p);
        d = sub(&c, &derivative(&b, p), p);
        i += 1;
    }
    out
}

/// Distinct-degree factorization of a monic squarefree polynomial:
/// pairs (d, product of all its irreducible factors of degree d).
pub(crate) fn distinct_degree(g: &[u64], p: u64) -> Vec<(u32, Poly)> {
    let mut out = Vec::new();
    let mut rest = g.to_vec();
    let x = vec![0, 1];
    let mut h = rem(&x, &rest, p);
    let mut d = 1usize;
    while rest.len() > 2 * d {
        h = powmod(&h, p, &rest, p);
        let t = gcd(&rest, &sub(&h, &x, p), p);
        if t.len() > 1 {
            rest = div_exact(&rest, &t, p);
            h = rem(&h, &rest, p);
            out.push((d as u32, t));
        }
        d += 1;
    }
    if rest.len() > 1 {
        out.push(((rest.len() - 1) as u32, rest));
    }
    out
}

/// Degrees of the irreducible factors of `f` (any nonzero leading
/// coefficient) when `f` is squarefree over F_p; `None` otherwise.
pub(crate) fn squarefree_factor_degrees(f: &[u64], p: u64) -> Option<Vec<u32>> {
    let f = monic(&trim(f.to_vec()), p);
    if f.len() <= 1 {
        return Some(Vec::new());
    }
    let df = derivative(&f, p);
    if df.is_empty() || gcd(&f, &df, p).len() > 1 {
        return None;
    }
    let mut degs = Vec::new();
    for (d, prod) in distinct_degree(&f, p) {
        let count = (prod.len() as u32 - 1) / d;
        degs.extend(std::iter::repeat_n(d, count as usize));
    }
    Some(degs)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn division_and_gcd() {
        let p = 7;
        let a = mul(&[1, 1], &[2, 0, 1], p); // (x+1)(x^2+2)
        let (q, r) = divrem(&a, &[1, 1], p);
        assert_eq!(q, vec![2, 0, 1]);
        assert!(r.is_empty());
        assert_eq!(gcd(&a, &mul(&[1, 1], &[3, 1], p), p), vec![1, 1]);
        assert_eq!(derivative(&[5, 3, 0, 1], p), vec![3, 0, 3]);
    }

    #[test]
    fn decompositions() {
        let p = 11;
        let f = mul(&mul(&[0, 0, 1], &mul(&[1, 1], &mul(&[1, 1], &[1, 1], p), p), p), &[1, 0, 1], p);
        let sq = squarefree_decomposition(&f, p);
        assert_eq!(sq, vec![(1, vec![1, 0, 1]), (2, vec![0, 1]), (3, vec![1, 1])]);
        // x^2 + 1 is irreducible mod 11 (11 = 3 mod 4).
        assert_eq!(squarefree_factor_degrees(&[1, 0, 1], 11), Some(vec![2]));
        assert_eq!(squarefree_factor_degrees(&[1, 0, 1], 5), Some(vec![1, 1]));
        assert_eq!(squarefree_factor_degrees(&[0, 0, 1], 5), None);
    }
}
