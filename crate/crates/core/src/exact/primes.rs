//! Deterministic prime generation and small multiplicative functions.

/// Incremental sieve of Eratosthenes. Primes are produced in increasing order
/// and the sieved range grows segment by segment on demand.
#[derive(Clone, Debug)]
pub struct PrimeSieve {
    primes: Vec<u64>,
    sieved_to: u64,
}

const SEGMENT: u64 = 1 << 18;

impl Default for PrimeSieve {
    fn default() -> Self {
        Self::new()
    }
}

impl PrimeSieve {
    pub fn new() -> Self {
        PrimeSieve {
            primes: Vec::new(),
            sieved_to: 1,
        }
    }

    /// Sieve so that every prime `<= bound` is known.
    pub fn extend_to(&mut self, bound: u64) {
        while self.sieved_to < bound {
            let lo = self.sieved_to + 1;
            let hi = (lo + SEGMENT - 1).min(bound.max(lo + 1023));
            self.sieve_segment(lo, hi);
            self.sieved_to = hi;
        }
    }

    fn sieve_segment(&mut self, lo: u64, hi: u64) {
        let mut composite = vec![false; (hi - lo + 1) as usize];
        let root = isqrt_u64(hi);
        // Only the first segment can outrun its own base primes.
        if root > self.sieved_to {
            let mut inner = PrimeSieve::new();
            inner.extend_simple(root);
            self.mark(&inner.primes, lo, hi, &mut composite);
        } else {
            let base: Vec<u64> = self.primes.iter().copied().take_while(|&p| p <= root).collect();
            self.mark(&base, lo, hi, &mut composite);
        }
        for (i, &c) in composite.iter().enumerate() {
            let v = lo + i as u64;
            if !c && v >= 2 {
                self.primes.push(v);
            }
        }
    }

    fn mark(&self, base: &[u64], lo: u64, hi: u64, composite: &mut [bool]) {
        for &p in base {
            let start = (p * p).max(lo.div_ceil(p) * p);
            let mut m = start;
            while m <= hi {
                composite[(m - lo) as usize] = true;
                m += p;
            }
        }
    }

    fn extend_simple(&mut self, bound: u64) {
        let n = bound as usize;
        let mut composite = vec![false; n + 1];
        for i in 2..=n {
            if !composite[i] {
                self.primes.push(i as u64);
                let mut j = i * i;
                while j <= n {
                    composite[j] = true;
                    j += i;
                }
            }
        }
        self.sieved_to = bound;
    }

    /// All primes `< bound`, in increasing order.
    pub fn primes_below(&mut self, bound: u64) -> &[u64] {
        if bound > 0 {
            self.extend_to(bound - 1);
        }
        let k = self.primes.partition_point(|&p| p < bound);
        &self.primes[..k]
    }

    /// The `i`-th prime (0-based).
    pub fn nth(&mut self, i: usize) -> u64 {
        while self.primes.len() <= i {
            let next = (self.sieved_to * 2).max(64);
            self.extend_to(next);
        }
        self.primes[i]
    }
}

pub fn isqrt_u64(n: u64) -> u64 {
    let mut r = (n as f64).sqrt() as u64;
    while r.checked_mul(r).is_none_or(|s| s > n) {
        r -= 1;
    }
    while (r + 1).checked_mul(r + 1).is_some_and(|s| s <= n) {
        r += 1;
    }
    r
}

pub fn isqrt_u128(n: u128) -> u128 {
    if n == 0 {
        return 0;
    }
    let mut r = (n as f64).sqrt() as u128;
    while r.checked_mul(r).is_none_or(|s| s > n) {
        r -= 1;
    }
    while (r + 1).checked_mul(r + 1).is_some_and(|s| s <= n) {
        r += 1;
    }
    r
}

fn mul_mod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

fn pow_mod(mut b: u64, mut e: u64, m: u64) -> u64 {
    let mut r = 1 % m;
    b %= m;
    while e > 0 {
        if e & 1 == 1 {
            r = mul_mod(r, b, m);
        }
        b = mul_mod(b, b, m);
        e >>= 1;
    }
    r
}

/// A square root of `a` modulo an odd prime `p` (Tonelli-Shanks), if one exists.
pub(crate) fn sqrt_mod(a: u64, p: u64) -> Option<u64> {
    let a = a % p;
    if a == 0 {
        return Some(0);
    }
    if pow_mod(a, (p - 1) / 2, p) != 1 {
        return None;
    }
    let (mut q, mut s) = (p - 1, 0u32);
    while q % 2 == 0 {
        q /= 2;
        s += 1;
    }
    let z = (2..p).find(|&z| pow_mod(z, (p - 1) / 2, p) == p - 1)?;
    let (mut m, mut c, mut t, mut r) = (s, pow_mod(z, q, p), pow_mod(a, q, p), pow_mod(a, q.div_ceil(2), p));
    while t != 1 {
        let mut i = 0;
        let mut t2 = t;
        while t2 != 1 {
            t2 = mul_mod(t2, t2, p);
            i += 1;
        }
        let b = pow_mod(c, 1 << (m - i - 1), p);
        m = i;
        c = mul_mod(b, b, p);
        t = mul_mod(t, c, p);
        r = mul_mod(r, b, p);
    }
    Some(r)
}

/// Deterministic Miller-Rabin for 64-bit integers.
pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    for p in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        if n % p == 0 {
            return n == p;
        }
    }
    let mut d = n - 1;
    let mut s = 0;
    while d % 2 == 0 {
        d /= 2;
        s += 1;
    }
    'witness: for a in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        let mut x = pow_mod(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mul_mod(x, x, n);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

/// Prime factorization by trial division, as (prime, exponent) pairs.
pub fn factorize(mut n: u64) -> Vec<(u64, u32)> {
    let mut out = Vec::new();
    let mut p = 2u64;
    while p.saturating_mul(p) <= n {
        if n % p == 0 {
            let mut e = 0;
            while n % p == 0 {
                n /= p;
                e += 1;
            }
            out.push((p, e));
        }
        p += if p == 2 { 1 } else { 2 };
    }
    if n > 1 {
        out.push((n, 1));
    }
    out
}

pub fn totient(n: u64) -> u64 {
    factorize(n)
        .iter()
        .fold(n, |acc, &(p, _)| acc / p * (p - 1))
}

pub fn mobius(n: u64) -> i32 {
    let f = factorize(n);
    if f.iter().any(|&(_, e)| e > 1) {
        0
    } else if f.len() % 2 == 0 {
        1
    } else {
        -1
    }
}

/// Möbius function on `0..=n` by a linear sieve (index 0 is unused).
pub fn mobius_table(n: usize) -> Vec<i8> {
    let mut mu = vec![1i8; n + 1];
    let mut composite = vec![false; n + 1];
    let mut primes = Vec::new();
    if n >= 1 {
        mu[0] = 0;
    }
    for i in 2..=n {
        if !composite[i] {
            primes.push(i);
            mu[i] = -1;
        }
        for &p in &primes {
            if i * p > n {
                break;
            }
            composite[i * p] = true;
            if i % p == 0 {
                mu[i * p] = 0;
                break;
            }
            mu[i * p] = -mu[i];
        }
    }
    mu
}

pub fn divisors(n: u64) -> Vec<u64> {
    let mut ds = vec![1u64];
    for (p, e) in factorize(n) {
        let len = ds.len();
        let mut pk = 1;
        for _ in 0..e {
            pk *= p;
            for i in 0..len {
                ds.push(ds[i] * pk);
            }
        }
    }
    ds.sort_unstable();
    ds
}

pub fn is_squarefree(n: u64) -> bool {
    n != 0 && factorize(n).iter().all(|&(_, e)| e == 1)
}

/// Multiplicative order of `a` modulo `m` (requires gcd(a, m) = 1, m >= 1).
pub fn multiplicative_order(a: u64, m: u64) -> u64 {
    if m == 1 {
        return 1;
    }
    let phi = totient(m);
    let mut order = phi;
    for (p, _) in factorize(phi) {
        while order % p == 0 && pow_mod(a, order / p, m) == 1 {
            order /= p;
        }
    }
    order
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sieve_matches_trial_division() {
        let mut s = PrimeSieve::new();
        let ps = s.primes_below(20_000).to_vec();
        let trial: Vec<u64> = (2..20_000u64)
            .filter(|&n| (2..n).take_while(|d| d * d <= n).all(|d| n % d != 0))
            .collect();
        assert_eq!(ps, trial);
        // Growing in steps gives the same list.
        let mut t = PrimeSieve::new();
        t.primes_below(100);
        t.primes_below(5000);
        assert_eq!(t.primes_below(20_000), &ps[..]);
        assert_eq!(t.nth(0), 2);
        assert_eq!(t.nth(999), 7919);
    }

    #[test]
    fn miller_rabin_agrees_with_sieve() {
        let mut s = PrimeSieve::new();
        let ps = s.primes_below(100_000).to_vec();
        let from_mr: Vec<u64> = (0..100_000).filter(|&n| is_prime(n)).collect();
        assert_eq!(ps, from_mr);
        assert!(is_prime(18_446_744_073_709_551_557));
        assert!(!is_prime(3_215_031_751));
    }

    #[test]
    fn multiplicative_functions() {
        assert_eq!(totient(1), 1);
        assert_eq!(totient(36), 12);
        assert_eq!(mobius(30), -1);
        assert_eq!(mobius(12), 0);
        let table = mobius_table(1000);
        for n in 1..=1000u64 {
            assert_eq!(table[n as usize] as i32, mobius(n), "n = {n}");
        }
        assert_eq!(divisors(12), vec![1, 2, 3, 4, 6, 12]);
        assert_eq!(multiplicative_order(2, 7), 3);
        assert_eq!(multiplicative_order(3, 7), 6);
        assert_eq!(isqrt_u64(u64::MAX), 4_294_967_295);
        assert_eq!(isqrt_u128(99), 9);
    }

    #[test]
    fn square_roots_mod_p() {
        for p in [3u64, 5, 7, 13, 17, 41, 97, 1_000_003] {
            for a in 0..60 {
                match sqrt_mod(a, p) {
                    Some(r) => assert_eq!(mul_mod(r, r, p), a % p),
                    None => assert_eq!(pow_mod(a, (p - 1) / 2, p), p - 1),
                }
            }
        }
    }
}
