//! Local Euler factors and certified evaluation of products over all primes.

use num_bigint::BigInt;
use num_traits::{One, Signed};

use super::interval::{Fixed, Rational};
use super::primes::{is_prime, PrimeSieve};
use super::CertifiedInterval;
use crate::error::{domain, Error, Result};
use crate::limits::Limits;

/// Working precision for long products; fixed so that equal cutoffs give
/// identical intervals regardless of the requested tolerance.
pub(crate) const PRODUCT_BITS: u32 = 256;

fn check_pn(p: u64, n: u32) -> Result<()> {
    if n < 2 {
        return domain(format!("n must be at least 2, got {n}"));
    }
    if !is_prime(p) {
        return domain(format!("{p} is not prime"));
    }
    Ok(())
}

fn pow(p: u64, e: u32) -> BigInt {
    BigInt::from(p).pow(e)
}

/// `alpha = p(p^n - 1) / (p^(n+1) - 1)` as (numerator, denominator).
pub(crate) fn alpha_parts(p: u64, n: u32) -> (BigInt, BigInt) {
    let pn = pow(p, n);
    (BigInt::from(p) * (&pn - 1), pn * p - 1)
}

/// `beta = (p - 1) / (p (p^n - 1))` as (numerator, denominator).
pub(crate) fn beta_parts(p: u64, n: u32) -> (BigInt, BigInt) {
    (BigInt::from(p - 1), BigInt::from(p) * (pow(p, n) - 1))
}

/// `alpha * beta = (p - 1) / (p^(n+1) - 1)`.
pub(crate) fn alpha_beta_parts(p: u64, n: u32) -> (BigInt, BigInt) {
    (BigInt::from(p - 1), pow(p, n + 1) - 1)
}

/// Local factors `(alpha_{p,n}, beta_{p,n})`.
///
/// alpha = (1 - p^-n) / (1 - p^-(n+1)) and beta = p^-n (1 - 1/p) / (1 - p^-n),
/// so that alpha (1 + beta) = 1.
pub fn local_factors(p: u64, n: u32) -> Result<(Rational, Rational)> {
    check_pn(p, n)?;
    let (an, ad) = alpha_parts(p, n);
    let (bn, bd) = beta_parts(p, n);
    Ok((Rational::new(an, ad), Rational::new(bn, bd)))
}

/// `1 / ((n-1)(N-1)^(n-1))`: bounds both `1 - prod_{p>=N} alpha_{p,n}` and
/// `sum_{m>=N} m^-n`.
pub fn tail_epsilon(cutoff: u64, n: u32) -> Rational {
    Rational::new(
        BigInt::one(),
        BigInt::from(n - 1) * BigInt::from(cutoff - 1).pow(n - 1),
    )
}

/// Interval `[1 - 1/((n-1)(N-1)^(n-1)), 1]` bracketing `prod_{p>=N} alpha_{p,n}`.
pub fn tail_factor(cutoff: u64, n: u32) -> Result<CertifiedInterval> {
    if cutoff < 2 || n < 2 {
        return domain(format!("tail_factor needs N >= 2 and n >= 2, got N = {cutoff}, n = {n}"));
    }
    CertifiedInterval::new(Rational::one() - tail_epsilon(cutoff, n), Rational::one())
}

/// A certified infinite product together with the prime cutoff used.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EulerProduct {
    pub interval: CertifiedInterval,
    pub cutoff: u64,
}

/// Running lower/upper fixed-point product of the factors of primes `< cutoff`.
struct Walk {
    fx: Fixed,
    lo: BigInt,
    hi: BigInt,
}

impl Walk {
    fn new() -> Self {
        let fx = Fixed { bits: PRODUCT_BITS };
        Walk {
            lo: fx.one(),
            hi: fx.one(),
            fx,
        }
    }

    fn include(&mut self, num: &BigInt, den: &BigInt) {
        self.lo = self.fx.mul_ratio_floor(&self.lo, num, den);
        self.hi = self.fx.mul_ratio_ceil(&self.hi, num, den);
    }

    /// Lower end after multiplying by the worst case of the tail.
    fn lower_with_tail(&self, cutoff: u64, n: u32) -> BigInt {
        let d = BigInt::from(n - 1) * BigInt::from(cutoff - 1).pow(n - 1);
        self.fx.mul_ratio_floor(&self.lo, &(&d - 1), &d)
    }

    fn interval(&self, cutoff: u64, n: u32) -> CertifiedInterval {
        CertifiedInterval::new(
            self.fx.to_rational(&self.lower_with_tail(cutoff, n)),
            self.fx.to_rational(&self.hi),
        )
        .expect("lower end never exceeds upper end")
    }

    fn width_ok(&self, cutoff: u64, n: u32, tol: &Rational) -> bool {
        let w = &self.hi - self.lower_with_tail(cutoff, n);
        w * tol.denom() <= tol.numer() << self.fx.bits
    }
}

pub(crate) fn check_tol(tol: &Rational) -> Result<()> {
    if !tol.is_positive() {
        return domain(format!("tolerance must be positive, got {tol}"));
    }
    Ok(())
}

/// Certified `prod_p f(p)` for factors `f(p) in [alpha_{p,n}, 1]` (`None`
/// meaning 1), with the tail over `p >= N` bracketed by [`tail_factor`].
/// Returns the smallest cutoff `N >= 3` whose interval width is `<= tol`.
pub(crate) fn certified_product<F>(n: u32, tol: &Rational, limits: &Limits, mut factor: F) -> Result<EulerProduct>
where
    F: FnMut(u64) -> Result<Option<(BigInt, BigInt)>>,
{
    check_tol(tol)?;
    if n < 2 {
        return domain(format!("n must be at least 2, got {n}"));
    }
    let mut sieve = PrimeSieve::new();
    let mut walk = Walk::new();
    let mut last_included = 1u64;
    let mut idx = 0usize;
    loop {
        let q = sieve.nth(idx);
        let lower = (last_included + 1).max(3);
        if lower <= q && walk.width_ok(q, n, tol) {
            // Width shrinks with N inside a prime gap; find the first N that fits.
            let (mut a, mut b) = (lower, q);
            while a < b {
                let mid = a + (b - a) / 2;
                if walk.width_ok(mid, n, tol) {
                    b = mid;
                } else {
                    a = mid + 1;
                }
            }
            return Ok(EulerProduct {
                interval: walk.interval(a, n),
                cutoff: a,
            });
        }
        if q >= limits.max_prime_cutoff {
            let w = walk.interval(q.max(3), n).width();
            return Err(Error::ToleranceUnreachable {
                cutoff: q,
                achieved: super::interval::decimal_ceil(&w, 12),
            });
        }
        if let Some((num, den)) = factor(q)? {
            walk.include(&num, &den);
        }
        last_included = q;
        idx += 1;
    }
}

/// Same product evaluated at a fixed cutoff `N >= 2`.
pub(crate) fn certified_product_at<F>(n: u32, cutoff: u64, mut factor: F) -> Result<CertifiedInterval>
where
    F: FnMut(u64) -> Result<Option<(BigInt, BigInt)>>,
{
    if n < 2 || cutoff < 2 {
        return domain(format!("need n >= 2 and N >= 2, got n = {n}, N = {cutoff}"));
    }
    let mut sieve = PrimeSieve::new();
    let mut walk = Walk::new();
    for &p in sieve.primes_below(cutoff) {
        if let Some((num, den)) = factor(p)? {
            walk.include(&num, &den);
        }
    }
    Ok(walk.interval(cutoff, n))
}

/// Certified `zeta(n+1)/zeta(n) = prod_p alpha_{p,n}`, width `<= tol`.
pub fn zeta_ratio(n: u32, tol: &Rational) -> Result<CertifiedInterval> {
    Ok(zeta_ratio_detailed(n, tol, &Limits::default())?.interval)
}

pub fn zeta_ratio_detailed(n: u32, tol: &Rational, limits: &Limits) -> Result<EulerProduct> {
    certified_product(n, tol, limits, |p| Ok(Some(alpha_parts(p, n))))
}

/// Certified `1/zeta(s) = prod_p (1 - p^-s)` for `s >= 2`. The tail satisfies
/// `prod_{p>=N}(1 - p^-s) >= 1 - sum_{m>=N} m^-s`, so the same tail interval applies.
pub fn inv_zeta(s: u32, tol: &Rational) -> Result<CertifiedInterval> {
    Ok(certified_product(s, tol, &Limits::default(), |p| {
        let ps = pow(p, s);
        Ok(Some((&ps - 1, ps)))
    })?
    .interval)
}

#[cfg(test)]
fn zeta_ratio_at(n: u32, cutoff: u64) -> Result<CertifiedInterval> {
    certified_product_at(n, cutoff, |p| Ok(Some(alpha_parts(p, n))))
}

#[cfg(test)]
mod tests {
    use super::super::interval::rat;
    use super::*;

    #[test]
    fn local_factor_examples() {
        assert_eq!(local_factors(2, 2).unwrap(), (rat(6, 7), rat(1, 6)));
        assert_eq!(local_factors(3, 2).unwrap(), (rat(12, 13), rat(1, 12)));
        assert!(local_factors(4, 2).is_err());
        assert!(local_factors(2, 1).is_err());
        // For n = 2 the general formula simplifies to 1/(p^2 + p).
        let mut s = PrimeSieve::new();
        for &p in s.primes_below(100) {
            let (_, b) = local_factors(p, 2).unwrap();
            assert_eq!(b, Rational::new(1.into(), BigInt::from(p * p + p)));
        }
    }

    #[test]
    fn tail_factor_examples() {
        let t = tail_factor(11, 2).unwrap();
        assert_eq!((t.lo(), t.hi()), (&rat(9, 10), &rat(1, 1)));
        let t = tail_factor(101, 3).unwrap();
        assert_eq!(t.lo(), &(rat(1, 1) - rat(1, 20_000)));
        assert!(tail_factor(1, 2).is_err());
    }

    #[test]
    fn huge_tolerance_uses_smallest_cutoff() {
        let r = zeta_ratio_detailed(2, &rat(10, 1), &Limits::default()).unwrap();
        assert_eq!(r.cutoff, 3);
        let a2 = rat(6, 7);
        // Product over p < 3 is 6/7, tail factor (1/2, 1]; ends are rounded outward at 2^-256.
        let ulp = Rational::new(BigInt::one(), BigInt::one() << PRODUCT_BITS);
        assert!(r.interval.hi() >= &a2 && r.interval.hi() - &a2 < ulp);
        let lo = &a2 * rat(1, 2);
        assert!(r.interval.lo() <= &lo && &lo - r.interval.lo() < ulp * rat(2, 1));
        assert!(zeta_ratio(2, &rat(0, 1)).is_err());
    }

    #[test]
    fn cutoff_is_minimal() {
        let tol = rat(1, 1000);
        let r = zeta_ratio_detailed(2, &tol, &Limits::default()).unwrap();
        let prev = zeta_ratio_at(2, r.cutoff - 1).unwrap();
        assert!(prev.width() > tol);
        assert!(r.interval.width() <= tol);
        assert_eq!(zeta_ratio_at(2, r.cutoff).unwrap(), r.interval);
    }

    #[test]
    fn budget_refusal() {
        let limits = Limits {
            max_prime_cutoff: 100,
            ..Limits::default()
        };
        let e = zeta_ratio_detailed(2, &rat(1, 1_000_000), &limits).unwrap_err();
        assert!(matches!(e, Error::ToleranceUnreachable { .. }));
    }
}
