//! Certified densities for `e(gamma)`, the ring `O_K[gamma] ∩ K`, and the
//! size of the prime set `X(K, gamma)`: generating-function coefficients,
//! moments, and monotonicity comparisons.
//!
//! With `C = zeta(n+1)/zeta(n)` and independent events `p in X` of probability
//! `alpha_p beta_p`, the distribution of `|X(K, gamma)|` has generating
//! function `C prod_p (1 + z^{r(p)} beta_p)`.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};
use crate::exact::{
    alpha_beta_parts, alpha_parts, beta_parts, binomial, check_tol, decimal_ceil, is_prime, mobius_table,
    multiplicative_order, rat_int, rational_to_f64, stirling_second_row, tail_epsilon, totient,
    zeta_ratio_detailed, CertifiedInterval, Fixed, PrimeSieve, Rational,
};
use crate::limits::Limits;
use crate::quadfield::{is_fundamental_discriminant, kronecker};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum ProfileKind {
    Rational,
    Quadratic { disc: i64 },
    Cyclotomic { m: u64 },
    /// Explicit values; primes not listed use `default` or are an error.
    Table {
        entries: BTreeMap<u64, u32>,
        default: Option<u32>,
    },
}

/// The map `p -> r_K(p)` (number of primes of `O_K` above `p`) with the
/// degree and Galois flag of `K`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SplittingProfile {
    pub id: String,
    pub degree: u32,
    pub galois: bool,
    pub kind: ProfileKind,
}

impl SplittingProfile {
    pub fn rational() -> Self {
        SplittingProfile {
            id: "rational".into(),
            degree: 1,
            galois: true,
            kind: ProfileKind::Rational,
        }
    }

    pub fn quadratic(disc: i64) -> Result<Self> {
        if !is_fundamental_discriminant(disc) {
            return domain(format!("{disc} is not a fundamental discriminant"));
        }
        Ok(SplittingProfile {
            id: format!("quadratic:{disc}"),
            degree: 2,
            galois: true,
            kind: ProfileKind::Quadratic { disc },
        })
    }

    pub fn cyclotomic(m: u64) -> Result<Self> {
        if m < 3 {
            return domain(format!("cyclotomic profile needs m >= 3, got {m}"));
        }
        Ok(SplittingProfile {
            id: format!("cyclotomic:{m}"),
            degree: totient(m) as u32,
            galois: true,
            kind: ProfileKind::Cyclotomic { m },
        })
    }

    pub fn table(degree: u32, galois: bool, entries: BTreeMap<u64, u32>, default: Option<u32>) -> Result<Self> {
        if degree == 0 {
            return domain("table profile needs degree >= 1");
        }
        for (&p, &r) in &entries {
            if !is_prime(p) {
                return domain(format!("table key {p} is not prime"));
            }
            if r == 0 || r > degree {
                return domain(format!("r({p}) = {r} outside [1, {degree}]"));
            }
        }
        if let Some(r) = default {
            if r == 0 || r > degree {
                return domain(format!("default r = {r} outside [1, {degree}]"));
            }
        }
        let mut id = format!("table:{degree}:{}:", u8::from(galois));
        let mut parts: Vec<String> = entries.iter().map(|(p, r)| format!("{p}={r}")).collect();
        if let Some(r) = default {
            parts.push(format!("*={r}"));
        }
        id.push_str(&parts.join(","));
        Ok(SplittingProfile {
            id,
            degree,
            galois,
            kind: ProfileKind::Table { entries, default },
        })
    }

    /// Parse `rational`, `quadratic:<d_K>`, `cyclotomic:<m>`, or
    /// `table:<degree>:<galois 0|1>:<p>=<r>,...[,*=<r>]`.
    pub fn parse(spec: &str) -> Result<Self> {
        let spec = spec.trim();
        let bad = || Error::Domain(format!("unrecognized profile {spec:?}"));
        if spec == "rational" {
            return Ok(Self::rational());
        }
        let (kind, rest) = spec.split_once(':').ok_or_else(bad)?;
        match kind {
            "quadratic" => Self::quadratic(rest.parse().map_err(|_| bad())?),
            "cyclotomic" => Self::cyclotomic(rest.parse().map_err(|_| bad())?),
            "table" => {
                let mut it = rest.splitn(3, ':');
                let degree: u32 = it.next().ok_or_else(bad)?.parse().map_err(|_| bad())?;
                let galois = match it.next().ok_or_else(bad)? {
                    "1" | "true" => true,
                    "0" | "false" => false,
                    _ => return Err(bad()),
                };
                let mut entries = BTreeMap::new();
                let mut default = None;
                for item in it.next().unwrap_or("").split(',').filter(|s| !s.is_empty()) {
                    let (k, v) = item.split_once('=').ok_or_else(bad)?;
                    let r: u32 = v.trim().parse().map_err(|_| bad())?;
                    if k.trim() == "*" {
                        default = Some(r);
                    } else {
                        entries.insert(k.trim().parse().map_err(|_| bad())?, r);
                    }
                }
                Self::table(degree, galois, entries, default)
            }
            _ => Err(bad()),
        }
    }

    /// `r_K(p)` for a prime `p`.
    pub fn r(&self, p: u64) -> Result<u32> {
        match &self.kind {
            ProfileKind::Rational => Ok(1),
            ProfileKind::Quadratic { disc } => Ok(if kronecker(*disc, p) == 1 { 2 } else { 1 }),
            ProfileKind::Cyclotomic { m } => {
                let mut mp = *m;
                while mp % p == 0 {
                    mp /= p;
                }
                Ok((totient(mp) / multiplicative_order(p % mp, mp)) as u32)
            }
            ProfileKind::Table { entries, default } => entries
                .get(&p)
                .copied()
                .or(*default)
                .ok_or_else(|| Error::Domain(format!("profile {} has no entry for p = {p}", self.id))),
        }
    }
}

/// Profile from its textual spec (see [`SplittingProfile::parse`]).
pub fn make_profile(spec: &str) -> Result<SplittingProfile> {
    SplittingProfile::parse(spec)
}

fn check_n(n: u32) -> Result<()> {
    if n < 2 {
        return domain(format!("n must be at least 2, got {n}"));
    }
    Ok(())
}

/// `P[e(gamma) = k] = zeta(n+1)/zeta(n) * phi(k) / k^(n+1)`.
pub fn prob_e(k: u64, n: u32, tol: &Rational) -> Result<CertifiedInterval> {
    check_n(n)?;
    if k == 0 {
        return domain("k must be positive");
    }
    let c = zeta_ratio_detailed(n, tol, &Limits::default())?.interval;
    Ok(c.scale(&Rational::new(
        BigInt::from(totient(k)),
        BigInt::from(k).pow(n + 1),
    )))
}

/// `P[O_K[gamma] ∩ K = O_K[1/k]-type ring] = zeta(n+1)/zeta(n) * prod_{p | k} beta_p`.
pub fn prob_ring_equals(k: u64, n: u32, tol: &Rational) -> Result<CertifiedInterval> {
    check_n(n)?;
    if k == 0 {
        return domain("k must be positive");
    }
    let c = zeta_ratio_detailed(n, tol, &Limits::default())?.interval;
    let mut prod = Rational::one();
    for (p, _) in crate::exact::factorize(k) {
        let (bn, bd) = beta_parts(p, n);
        prod *= Rational::new(bn, bd);
    }
    Ok(c.scale(&prod))
}

/// `P[Y ⊆ primes under X] = prod_{p in Y} alpha_p beta_p`, exactly.
pub fn prob_x_contains(primes: &[u64], n: u32) -> Result<Rational> {
    check_n(n)?;
    let mut seen = std::collections::BTreeSet::new();
    let mut prod = Rational::one();
    for &p in primes {
        if !is_prime(p) {
            return domain(format!("{p} is not prime"));
        }
        if !seen.insert(p) {
            return domain(format!("prime {p} listed twice"));
        }
        let (num, den) = alpha_beta_parts(p, n);
        prod *= Rational::new(num, den);
    }
    Ok(prod)
}

/// Bracket for `sum_{k > K} phi(k) / k^(n+1)`.
///
/// Uses `phi(k)/k = sum_{d | k} mu(d)/d`, so the tail is
/// `sum_d mu(d) d^-(n+1) sum_{j > K/d} j^-n`. For `d <= K` the inner tail
/// from `J = floor(K/d) + 1` lies between the trapezoid bound
/// `1/((n-1)J^(n-1)) + 1/(2J^n)` and the midpoint bound
/// `1/((n-1)(J-1/2)^(n-1))` (both valid for the convex `x^-n`); the terms with
/// `d > K` are bounded in absolute value by `zeta(n) / (n K^n) <= 2/(n K^n)`.
pub fn totient_series_tail(n: u32, k_max: u64) -> Result<CertifiedInterval> {
    check_n(n)?;
    if k_max == 0 {
        return domain("K must be positive");
    }
    let fx = Fixed { bits: 192 };
    let mu = mobius_table(k_max as usize);
    let mut lo = BigInt::zero();
    let mut hi = BigInt::zero();
    let nn = BigInt::from(n - 1);
    for d in 1..=k_max {
        let m = mu[d as usize];
        if m == 0 {
            continue;
        }
        let j = BigInt::from(k_max / d + 1);
        let dpow = BigInt::from(d).pow(n + 1);
        // lower: (2J + (n-1)) / (2 (n-1) J^n)
        let l_num = BigInt::from(2) * &j + &nn;
        let l_den = BigInt::from(2) * &nn * j.pow(n) * &dpow;
        // upper: 1/((n-1)(J-1/2)^(n-1)) = 2^(n-1) / ((n-1)(2J-1)^(n-1))
        let u_num = BigInt::from(2).pow(n - 1);
        let u_den = &nn * (BigInt::from(2) * &j - BigInt::one()).pow(n - 1) * &dpow;
        if m > 0 {
            lo += (&l_num << fx.bits).div_floor(&l_den);
            hi += (&u_num << fx.bits).div_ceil(&u_den);
        } else {
            lo -= (&u_num << fx.bits).div_ceil(&u_den);
            hi -= (&l_num << fx.bits).div_floor(&l_den);
        }
    }
    let rest = Rational::new(BigInt::from(2), BigInt::from(n) * BigInt::from(k_max).pow(n));
    let lo = (fx.to_rational(&lo) - &rest).max(Rational::zero());
    let hi = fx.to_rational(&hi) + &rest;
    CertifiedInterval::new(lo, hi)
}

/// `sum_{k <= K} P[e = k]` plus the certified tail: an interval for the total
/// probability, which must contain 1.
pub fn prob_e_total(n: u32, k_max: u64, tol: &Rational) -> Result<CertifiedInterval> {
    check_n(n)?;
    let fx = Fixed { bits: 192 };
    let mut lo = BigInt::zero();
    let mut hi = BigInt::zero();
    for k in 1..=k_max {
        let num = BigInt::from(totient(k)) << fx.bits;
        let den = BigInt::from(k).pow(n + 1);
        lo += num.div_floor(&den);
        hi += num.div_ceil(&den);
    }
    let head = CertifiedInterval::new(fx.to_rational(&lo), fx.to_rational(&hi))?;
    let series = head.add(&totient_series_tail(n, k_max)?);
    let c = zeta_ratio_detailed(n, tol, &Limits::default())?.interval;
    Ok(c.mul(&series))
}

/// Certified coefficients `a_{K,n,t} = P[|X(K, gamma)| = t]`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CoefficientTable {
    pub n: u32,
    pub profile_id: String,
    pub cutoff: u64,
    /// Bracket of the truncated subset sum over primes `< cutoff` (fixed-point).
    pub dp: Vec<CertifiedInterval>,
    pub intervals: Vec<CertifiedInterval>,
    /// `zeta(n+1)/zeta(n)` at the same truncation.
    pub zeta_ratio: CertifiedInterval,
}

impl CoefficientTable {
    pub fn max_width(&self) -> Rational {
        self.intervals
            .iter()
            .map(|i| i.width())
            .max()
            .unwrap_or_else(Rational::zero)
    }
}

/// Fixed-point truncated generating function over primes `< cutoff`.
struct TruncatedGf {
    fx: Fixed,
    dp_lo: Vec<BigInt>,
    dp_hi: Vec<BigInt>,
    /// `prod_{p<N} alpha_p`, rounded down and up.
    p_lo: BigInt,
    p_hi: BigInt,
    /// `prod_{p<N} (1 + 2^{r(p)} beta_p)`, rounded up.
    f2_hi: BigInt,
}

fn precision_bits(n: u32, t_max: usize, tol: &Rational) -> u32 {
    // a_t can be as small as prod of beta over the t smallest primes, and
    // beta_p > 1/(2 p^n); keep ~160 bits beyond that and beyond tol.
    let mut sieve = PrimeSieve::new();
    let mut bits = 160.0;
    for i in 0..t_max {
        let p = sieve.nth(i) as f64;
        bits += 1.0 + n as f64 * p.log2();
    }
    let tol_bits = (tol.denom().bits() as f64) - (tol.numer().bits() as f64) + 1.0;
    (bits + tol_bits.max(0.0)).ceil() as u32
}

fn truncated_gf(profile: &SplittingProfile, n: u32, t_max: usize, cutoff: u64, bits: u32) -> Result<TruncatedGf> {
    let fx = Fixed { bits };
    let mut dp_lo = vec![BigInt::zero(); t_max + 1];
    let mut dp_hi = vec![BigInt::zero(); t_max + 1];
    dp_lo[0] = fx.one();
    dp_hi[0] = fx.one();
    let mut p_lo = fx.one();
    let mut p_hi = fx.one();
    let mut f2_hi = fx.one();
    let mut sieve = PrimeSieve::new();
    for &p in sieve.primes_below(cutoff) {
        let r = profile.r(p)? as usize;
        let (bn, bd) = beta_parts(p, n);
        for t in (r..=t_max).rev() {
            let add_lo = fx.mul_ratio_floor(&dp_lo[t - r], &bn, &bd);
            let add_hi = fx.mul_ratio_ceil(&dp_hi[t - r], &bn, &bd);
            dp_lo[t] += add_lo;
            dp_hi[t] += add_hi;
        }
        let (an, ad) = alpha_parts(p, n);
        p_lo = fx.mul_ratio_floor(&p_lo, &an, &ad);
        p_hi = fx.mul_ratio_ceil(&p_hi, &an, &ad);
        let num2 = &bd + (&bn << r);
        f2_hi = fx.mul_ratio_ceil(&f2_hi, &num2, &bd);
    }
    Ok(TruncatedGf {
        fx,
        dp_lo,
        dp_hi,
        p_lo,
        p_hi,
        f2_hi,
    })
}

/// Coefficients of `exp(eps (z + ... + z^d))` up to `z^t_max`, rounded up:
/// `s E_s = eps sum_{k=1}^{d} k E_{s-k}`.
fn exp_tail_coefficients(fx: Fixed, eps: &Rational, d: usize, t_max: usize) -> Vec<BigInt> {
    let mut e = vec![fx.one()];
    for s in 1..=t_max {
        let mut acc = BigInt::zero();
        for k in 1..=d.min(s) {
            acc += &e[s - k] * k;
        }
        let v = fx.mul_ratio_ceil(&acc, eps.numer(), &(eps.denom() * s));
        e.push(v);
    }
    e
}

/// Coefficient intervals at a fixed prime cutoff `N >= 3`.
///
/// Lower end `C_lo dp_lo(t)`. Upper end is the smaller of the total-mass bound
/// `C_hi dp_hi(t) + eps_N` and the per-`t` bound
/// `C_hi sum_s dp_hi(t-s) E_s`, where `E` are the coefficients of
/// `exp(eps_N (z + ... + z^d))`, which dominate the tail product
/// `prod_{p>=N} (1 + z^{r(p)} beta_p)` coefficientwise because
/// `sum_{p>=N} beta_p <= eps_N`.
pub fn coefficient_table_at(profile: &SplittingProfile, n: u32, t_max: usize, cutoff: u64, tol_hint: &Rational) -> Result<CoefficientTable> {
    check_n(n)?;
    if cutoff < 3 {
        return domain("prime cutoff must be at least 3");
    }
    let bits = precision_bits(n, t_max, tol_hint);
    let g = truncated_gf(profile, n, t_max, cutoff, bits)?;
    let fx = g.fx;
    let eps = tail_epsilon(cutoff, n);
    let c_lo = fx.mul_ratio_floor(&g.p_lo, &(eps.denom() - eps.numer()), eps.denom());
    let c_hi = g.p_hi.clone();
    let eps_hi = fx.from_rational_ceil(&eps);
    let tail = exp_tail_coefficients(fx, &eps, profile.degree as usize, t_max);
    let mut intervals = Vec::with_capacity(t_max + 1);
    let mut dp = Vec::with_capacity(t_max + 1);
    for t in 0..=t_max {
        let lo = fx.mul_floor(&c_lo, &g.dp_lo[t]);
        let mass = fx.mul_ceil(&c_hi, &g.dp_hi[t]) + &eps_hi;
        let mut conv = BigInt::zero();
        for s in 0..=t {
            conv += fx.mul_ceil(&g.dp_hi[t - s], &tail[s]);
        }
        let per_t = fx.mul_ceil(&c_hi, &conv);
        let hi = mass.min(per_t);
        intervals.push(CertifiedInterval::new(fx.to_rational(&lo), fx.to_rational(&hi))?);
        dp.push(CertifiedInterval::new(
            fx.to_rational(&g.dp_lo[t]),
            fx.to_rational(&g.dp_hi[t]),
        )?);
    }
    Ok(CoefficientTable {
        n,
        profile_id: profile.id.clone(),
        cutoff,
        dp,
        intervals,
        zeta_ratio: CertifiedInterval::new(fx.to_rational(&c_lo), fx.to_rational(&c_hi))?,
    })
}

/// Smallest `N >= 3` with `eps_N <= target`.
fn cutoff_for_eps(n: u32, target: &Rational) -> u64 {
    let t = rational_to_f64(target).max(1e-300);
    let est = 1.0 + (1.0 / (t * (n - 1) as f64)).powf(1.0 / (n - 1) as f64);
    let mut cutoff = if est.is_finite() && est < 1e18 { est as u64 } else { u64::MAX / 4 };
    cutoff = cutoff.max(3);
    while cutoff > 3 && &tail_epsilon(cutoff - 1, n) <= target {
        cutoff -= 1;
    }
    while &tail_epsilon(cutoff, n) > target {
        cutoff += 1;
    }
    cutoff
}

/// Grow the cutoff from `start`, doubling, until `ok` accepts or the prime
/// budget is exhausted.
fn grow_cutoff<T>(
    start: u64,
    limits: &Limits,
    mut eval: impl FnMut(u64) -> Result<T>,
    mut width: impl FnMut(&T) -> Rational,
    tol: &Rational,
) -> Result<T> {
    let mut cutoff = start.max(3);
    loop {
        let capped = cutoff.min(limits.max_prime_cutoff);
        let v = eval(capped)?;
        let w = width(&v);
        if &w <= tol {
            return Ok(v);
        }
        if capped >= limits.max_prime_cutoff {
            return Err(Error::ToleranceUnreachable {
                cutoff: capped,
                achieved: decimal_ceil(&w, 12),
            });
        }
        cutoff = cutoff.saturating_mul(2);
    }
}

/// Coefficient table with every interval of width `<= tol`.
pub fn coefficient_table(profile: &SplittingProfile, n: u32, t_max: usize, tol: &Rational, limits: &Limits) -> Result<CoefficientTable> {
    check_n(n)?;
    check_tol(tol)?;
    let start = cutoff_for_eps(n, &(tol / rat_int(2)));
    grow_cutoff(
        start,
        limits,
        |c| coefficient_table_at(profile, n, t_max, c, tol),
        |t| t.max_width(),
        tol,
    )
}

/// Exact truncated subset sums `sum_{Y ⊆ primes<N, sum r = t} prod beta`.
pub fn truncated_dp_exact(profile: &SplittingProfile, n: u32, cutoff: u64, t_max: usize) -> Result<Vec<Rational>> {
    check_n(n)?;
    let mut dp = vec![Rational::zero(); t_max + 1];
    dp[0] = Rational::one();
    let mut sieve = PrimeSieve::new();
    for &p in sieve.primes_below(cutoff) {
        let r = profile.r(p)? as usize;
        let (bn, bd) = beta_parts(p, n);
        let b = Rational::new(bn, bd);
        for t in (r..=t_max).rev() {
            let add = &dp[t - r] * &b;
            dp[t] += add;
        }
    }
    Ok(dp)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MeanVariance {
    pub expectation: CertifiedInterval,
    pub variance: CertifiedInterval,
    pub cutoff: u64,
}

/// Closed forms `E = sum_p alpha beta r(p)` and
/// `Var = sum_p alpha beta (1 - alpha beta) r(p)^2` at a fixed cutoff, with
/// tails in `[0, d eps_N]` and `[0, d^2 eps_N]`.
pub fn expectation_variance_at(profile: &SplittingProfile, n: u32, cutoff: u64) -> Result<MeanVariance> {
    check_n(n)?;
    if cutoff < 3 {
        return domain("prime cutoff must be at least 3");
    }
    let fx = Fixed { bits: 256 };
    let mut e = (BigInt::zero(), BigInt::zero());
    let mut v = (BigInt::zero(), BigInt::zero());
    let mut sieve = PrimeSieve::new();
    for &p in sieve.primes_below(cutoff) {
        let r = profile.r(p)?;
        let (qn, qd) = alpha_beta_parts(p, n);
        // q (1 - q) = qn (qd - qn) / qd^2
        let vn = &qn * (&qd - &qn);
        let vd = &qd * &qd;
        let one = fx.one();
        e.0 += fx.mul_ratio_floor(&one, &qn, &qd) * r;
        e.1 += fx.mul_ratio_ceil(&one, &qn, &qd) * r;
        v.0 += fx.mul_ratio_floor(&one, &vn, &vd) * (r * r);
        v.1 += fx.mul_ratio_ceil(&one, &vn, &vd) * (r * r);
    }
    let eps = tail_epsilon(cutoff, n);
    let d = rat_int(profile.degree);
    let expectation = CertifiedInterval::new(fx.to_rational(&e.0), fx.to_rational(&e.1) + &d * &eps)?;
    let variance = CertifiedInterval::new(fx.to_rational(&v.0), fx.to_rational(&v.1) + &d * &d * &eps)?;
    Ok(MeanVariance {
        expectation,
        variance,
        cutoff,
    })
}

pub fn expectation_variance(profile: &SplittingProfile, n: u32, tol: &Rational, limits: &Limits) -> Result<MeanVariance> {
    check_n(n)?;
    check_tol(tol)?;
    let d2 = rat_int(profile.degree * profile.degree);
    let start = cutoff_for_eps(n, &(tol / (d2 * rat_int(2))));
    grow_cutoff(
        start,
        limits,
        |c| expectation_variance_at(profile, n, c),
        |m| m.expectation.width().max(m.variance.width()),
        tol,
    )
}

/// Series evaluation `sum_t t^s a_t` at a fixed cutoff. Terms `t <= T` use the
/// coefficient intervals; the rest is bounded by `a_t <= F(2) 2^-t` with
/// `F(2) = C prod_p (1 + 2^{r(p)} beta_p)`, where the factors over `p >= N`
/// are at most `1 / (1 - 2^d eps_N)`.
pub fn moment_series_at(profile: &SplittingProfile, n: u32, s: u32, cutoff: u64, tol: &Rational) -> Result<CertifiedInterval> {
    check_n(n)?;
    let d = profile.degree;
    let eps = tail_epsilon(cutoff, n);
    let two_d_eps = rat_int(BigInt::one() << d) * &eps;
    if two_d_eps >= Rational::one() {
        return domain("prime cutoff too small for the series tail bound");
    }
    // Pick T with the tail below tol/4 using a crude F(2) <= 2^d estimate first.
    let f2_guess = rat_int(BigInt::one() << (d + 2));
    let mut t_cut: u32 = 6;
    while &f2_guess * series_tail_factor(s, t_cut) > tol / rat_int(4) {
        t_cut += 1;
    }
    let table = coefficient_table_at(profile, n, t_cut as usize, cutoff, tol)?;
    let g = truncated_gf(profile, n, 0, cutoff, 256)?;
    let f2 = g.fx.to_rational(&g.f2_hi) / (Rational::one() - two_d_eps);
    let tail = f2 * series_tail_factor(s, t_cut);
    let mut acc = CertifiedInterval::point(Rational::zero());
    for (t, iv) in table.intervals.iter().enumerate() {
        acc = acc.add(&iv.scale(&rat_int(BigInt::from(t).pow(s))));
    }
    acc.add(&CertifiedInterval::new(Rational::zero(), tail)?)
        .round_outward(200)
        .pipe(Ok)
}

/// `sum_{t > T} t^s 2^-t <= (T+1)^s 2^-(T+1) / (1 - q)` with
/// `q = ((T+2)/(T+1))^s / 2` bounding consecutive term ratios (`q < 1` for `T >= 6`, `s <= 4`).
fn series_tail_factor(s: u32, t_cut: u32) -> Rational {
    let t1 = BigInt::from(t_cut + 1);
    let first = Rational::new(t1.pow(s), BigInt::one() << (t_cut + 1));
    let q = Rational::new(BigInt::from(t_cut + 2).pow(s), t1.pow(s) * 2);
    first / (Rational::one() - q)
}

trait Pipe: Sized {
    fn pipe<T>(self, f: impl FnOnce(Self) -> T) -> T {
        f(self)
    }
}
impl<T> Pipe for T {}

/// Combinatorial evaluation at a fixed cutoff, treating `|X| = sum_p r(p) I_p`
/// with independent `I_p ~ Bernoulli(alpha_p beta_p)`:
/// `E[S^s] = sum_{|Y| <= s} prod_{p in Y} alpha_p beta_p * sum_{A ⊆ Y} (-1)^{|Y|-|A|} (sum_{p in A} r(p))^s`.
/// Primes `< N` are grouped by `r`; the inner sum depends only on the
/// multiset of `r` values, and the outer sum over `Y` factors into elementary
/// symmetric sums per class. Primes `>= N` contribute at most
/// `sum_k C(s,k) m_{s-k} d^k T_k(eps_N)` (Touchard polynomials).
pub fn moment_combinatorial_at(profile: &SplittingProfile, n: u32, s: u32, cutoff: u64) -> Result<CertifiedInterval> {
    check_n(n)?;
    let d = profile.degree as usize;
    let s_us = s as usize;
    let fx = Fixed { bits: 256 };
    // e[j][c]: elementary symmetric sums of q_p over primes with r(p) = j.
    let mut e_lo = vec![vec![BigInt::zero(); s_us + 1]; d + 1];
    let mut e_hi = e_lo.clone();
    for j in 0..=d {
        e_lo[j][0] = fx.one();
        e_hi[j][0] = fx.one();
    }
    let mut sieve = PrimeSieve::new();
    for &p in sieve.primes_below(cutoff) {
        let j = profile.r(p)? as usize;
        let (qn, qd) = alpha_beta_parts(p, n);
        for c in (1..=s_us).rev() {
            let lo = fx.mul_ratio_floor(&e_lo[j][c - 1], &qn, &qd);
            let hi = fx.mul_ratio_ceil(&e_hi[j][c - 1], &qn, &qd);
            e_lo[j][c] += lo;
            e_hi[j][c] += hi;
        }
    }
    let to_r = |x: &BigInt| fx.to_rational(x);
    // m_k for k = 0..=s on the truncated primes.
    let mut m_lo = Vec::with_capacity(s_us + 1);
    let mut m_hi = Vec::with_capacity(s_us + 1);
    for k in 0..=s {
        let mut lo = Rational::zero();
        let mut hi = Rational::zero();
        for counts in class_counts(d, k as usize) {
            let g = surjection_weight(&counts, k);
            if g.is_zero() {
                continue;
            }
            let mut plo = Rational::one();
            let mut phi = Rational::one();
            for (j, &c) in counts.iter().enumerate() {
                plo *= to_r(&e_lo[j + 1][c]);
                phi *= to_r(&e_hi[j + 1][c]);
            }
            lo += &plo * &g;
            hi += &phi * &g;
        }
        m_lo.push(lo);
        m_hi.push(hi);
    }
    let eps = tail_epsilon(cutoff, n);
    let mut upper = Rational::zero();
    for k in 0..=s {
        let touchard = if k == 0 {
            Rational::one()
        } else {
            stirling_second_row(k)
                .into_iter()
                .enumerate()
                .skip(1)
                .map(|(j, c)| rat_int(c) * pow_r(&eps, j as u32))
                .sum()
        };
        upper += rat_int(binomial(s as u64, k as u64))
            * &m_hi[(s - k) as usize]
            * rat_int(BigInt::from(d).pow(k))
            * touchard;
    }
    Ok(CertifiedInterval::new(m_lo[s_us].clone(), upper)?.round_outward(200))
}

fn pow_r(x: &Rational, e: u32) -> Rational {
    (0..e).fold(Rational::one(), |acc, _| acc * x)
}

/// All `(c_1, ..., c_d)` with `c_j >= 0` and `sum c_j <= k`.
fn class_counts(d: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur = vec![0usize; d];
    fn rec(j: usize, left: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if j == cur.len() {
            out.push(cur.clone());
            return;
        }
        for c in 0..=left {
            cur[j] = c;
            rec(j + 1, left - c, cur, out);
        }
        cur[j] = 0;
    }
    rec(0, k, &mut cur, &mut out);
    out
}

/// `sum_{A ⊆ Y} (-1)^{|Y|-|A|} (sum_{p in A} r(p))^s` for a set `Y` holding
/// `counts[j-1]` primes with `r = j`, evaluated on a representative multiset.
fn surjection_weight(counts: &[usize], s: u32) -> Rational {
    let rs: Vec<u64> = counts
        .iter()
        .enumerate()
        .flat_map(|(j, &c)| std::iter::repeat_n(j as u64 + 1, c))
        .collect();
    let size = rs.len();
    let mut total = BigInt::zero();
    for mask in 0u32..(1 << size) {
        let sum: u64 = (0..size).filter(|&i| mask >> i & 1 == 1).map(|i| rs[i]).sum();
        let term = BigInt::from(sum).pow(s);
        if (size - mask.count_ones() as usize) % 2 == 0 {
            total += term;
        } else {
            total -= term;
        }
    }
    rat_int(total)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MomentReport {
    pub s: u32,
    pub series: CertifiedInterval,
    pub combinatorial: CertifiedInterval,
    pub cutoff: u64,
}

/// The `s`-th moment of `|X(K, gamma)|` by two independent methods, which must agree.
pub fn moment(profile: &SplittingProfile, n: u32, s: u32, tol: &Rational, limits: &Limits) -> Result<MomentReport> {
    check_n(n)?;
    check_tol(tol)?;
    if !(1..=4).contains(&s) {
        return domain(format!("moment order must be in [1, 4], got {s}"));
    }
    // Both tails are roughly s d m_{s-1} eps_N; start there and let the width check grow N.
    let start = cutoff_for_eps(n, &(tol / rat_int(8 * s * profile.degree)));
    let (series, combinatorial, cutoff) = grow_cutoff(
        start,
        limits,
        |c| {
            Ok((
                moment_series_at(profile, n, s, c, tol)?,
                moment_combinatorial_at(profile, n, s, c)?,
                c,
            ))
        },
        |(a, b, _)| a.width().max(b.width()),
        tol,
    )?;
    if !series.intersects(&combinatorial) {
        return Err(Error::Consistency(format!(
            "moment {s} of {}: series {series} and combinatorial {combinatorial} are disjoint",
            profile.id
        )));
    }
    Ok(MomentReport {
        s,
        series,
        combinatorial,
        cutoff,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Comparison {
    Greater,
    Less,
    Undecided,
}

pub fn compare(a: &CertifiedInterval, b: &CertifiedInterval) -> Comparison {
    if b.strictly_below(a) {
        Comparison::Greater
    } else if a.strictly_below(b) {
        Comparison::Less
    } else {
        Comparison::Undecided
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MonotonicityRow {
    pub t: usize,
    pub a_t: CertifiedInterval,
    /// `a_t` against `a_{t+1}`.
    pub vs_next: Comparison,
    /// `a_t` against `a_{t+d_1}`, `d_1 = lcm(1..=d)`.
    pub vs_lcm: Comparison,
    /// `a_t` against `a_{t+d}` (Galois profiles only).
    pub vs_degree: Option<Comparison>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MonotonicityReport {
    pub profile_id: String,
    pub n: u32,
    pub degree: u32,
    pub lcm: u64,
    /// `a_t > a_{t+d_1}` is predicted for `t >= (d-1) d_1 - d(d+1)/2 + 1`.
    pub general_threshold: i64,
    /// `a_t > a_{t+d}` is predicted for `t >= d(tau(d)-1) - sigma(d) + 1` when Galois.
    pub galois_threshold: Option<i64>,
    pub rows: Vec<MonotonicityRow>,
    /// Exploratory `-ln a_t / (t ln t)` from interval midpoints; not certified.
    pub decay: Vec<(usize, f64)>,
}

fn lcm_upto(d: u32) -> u64 {
    (1..=d as u64).fold(1, |acc, j| acc.lcm(&j))
}

pub fn prediction_thresholds(d: u32, galois: bool) -> (i64, Option<i64>) {
    let d = d as i64;
    let d1 = lcm_upto(d as u32) as i64;
    let general = ((d - 1) * d1 - d * (d + 1) / 2 + 1).max(0);
    let galois = galois.then(|| {
        let divs: Vec<i64> = (1..=d).filter(|j| d % j == 0).collect();
        let tau = divs.len() as i64;
        let sigma: i64 = divs.iter().sum();
        (d * (tau - 1) - sigma + 1).max(0)
    });
    (general, galois)
}

pub fn monotonicity_scan(profile: &SplittingProfile, n: u32, t_max: usize, tol: &Rational, limits: &Limits) -> Result<MonotonicityReport> {
    let d = profile.degree;
    let d1 = lcm_upto(d);
    let reach = t_max + (d1 as usize).max(d as usize).max(1);
    let table = coefficient_table(profile, n, reach, tol, limits)?;
    let iv = &table.intervals;
    let rows = (0..=t_max)
        .map(|t| MonotonicityRow {
            t,
            a_t: iv[t].clone(),
            vs_next: compare(&iv[t], &iv[t + 1]),
            vs_lcm: compare(&iv[t], &iv[t + d1 as usize]),
            vs_degree: profile.galois.then(|| compare(&iv[t], &iv[t + d as usize])),
        })
        .collect();
    let (general_threshold, galois_threshold) = prediction_thresholds(d, profile.galois);
    Ok(MonotonicityReport {
        profile_id: profile.id.clone(),
        n,
        degree: d,
        lcm: d1,
        general_threshold,
        galois_threshold,
        rows,
        decay: decay_table(&table),
    })
}

/// `-ln a_t / (t ln t)` for `t >= 2` from interval midpoints (exploratory).
pub fn decay_table(table: &CoefficientTable) -> Vec<(usize, f64)> {
    table
        .intervals
        .iter()
        .enumerate()
        .skip(2)
        .filter_map(|(t, iv)| {
            let m = iv.mid_f64();
            (m > 0.0).then(|| (t, -m.ln() / (t as f64 * (t as f64).ln())))
        })
        .collect()
}

const LAMBDA_MAX_T: usize = 64;
const LAMBDA_MAX_D: usize = 8;

/// `Lambda(d, t)`: tuples `(l_1, ..., l_d)` with `sum_j j l_j = t`.
pub fn lambda_set(d: usize, t: usize) -> Result<Vec<Vec<usize>>> {
    if d == 0 || d > LAMBDA_MAX_D || t > LAMBDA_MAX_T {
        return domain(format!("Lambda(d, t) is materialized for 1 <= d <= {LAMBDA_MAX_D}, t <= {LAMBDA_MAX_T}"));
    }
    let mut out = Vec::new();
    let mut cur = vec![0usize; d];
    fn rec(j: usize, left: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if j == 0 {
            if left == 0 {
                out.push(cur.clone());
            }
            return;
        }
        // j is the 1-based part size for coordinate j - 1.
        for l in 0..=left / j {
            cur[j - 1] = l;
            rec(j - 1, left - l * j, cur, out);
        }
        cur[j - 1] = 0;
    }
    rec(d, t, &mut cur, &mut out);
    out.sort();
    Ok(out)
}

/// `Lambda^0(d, t)`: the members of `Lambda(d, t)` supported on divisors of `d`.
pub fn lambda0_set(d: usize, t: usize) -> Result<Vec<Vec<usize>>> {
    Ok(lambda_set(d, t)?
        .into_iter()
        .filter(|l| l.iter().enumerate().all(|(j, &x)| x == 0 || d % (j + 1) == 0))
        .collect())
}

/// `b_{K,n,j,t}` truncated to primes `< N`: the elementary symmetric sum of
/// degree `t` in the `beta_p` with `r(p) = j`, for `t = 0..=t_max`.
pub fn b_table_exact(profile: &SplittingProfile, n: u32, cutoff: u64, j: u32, t_max: usize) -> Result<Vec<Rational>> {
    let mut e = vec![Rational::zero(); t_max + 1];
    e[0] = Rational::one();
    let mut sieve = PrimeSieve::new();
    for &p in sieve.primes_below(cutoff) {
        if profile.r(p)? != j {
            continue;
        }
        let (bn, bd) = beta_parts(p, n);
        let b = Rational::new(bn, bd);
        for c in (1..=t_max).rev() {
            let add = &e[c - 1] * &b;
            e[c] += add;
        }
    }
    Ok(e)
}

/// Truncated subset sum rebuilt from the `Lambda(d, t)` grouping:
/// `sum_{lambda} prod_{lambda_j != 0} b_{j, lambda_j}`.
pub fn dp_via_lambda(profile: &SplittingProfile, n: u32, cutoff: u64, t: usize) -> Result<Rational> {
    let d = profile.degree as usize;
    let tables: Vec<Vec<Rational>> = (1..=d as u32)
        .map(|j| b_table_exact(profile, n, cutoff, j, t))
        .collect::<Result<_>>()?;
    let set = if profile.galois { lambda0_set(d, t)? } else { lambda_set(d, t)? };
    let mut total = Rational::zero();
    for lambda in set {
        let mut term = Rational::one();
        for (j, &l) in lambda.iter().enumerate() {
            if l != 0 {
                term *= &tables[j][l];
            }
        }
        total += term;
    }
    Ok(total)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::rat;

    #[test]
    fn profiles() {
        let q = make_profile("quadratic:-7").unwrap();
        assert_eq!((q.r(2).unwrap(), q.r(3).unwrap(), q.r(7).unwrap()), (2, 1, 1));
        assert_eq!(q.r(11).unwrap(), 2);
        let r = make_profile("rational").unwrap();
        assert!((2..50).filter(|&p| is_prime(p)).all(|p| r.r(p).unwrap() == 1));
        assert!(make_profile("quadratic:-16").is_err());
        let c = make_profile("cyclotomic:5").unwrap();
        assert_eq!(c.degree, 4);
        // p ≡ 1 mod 5 splits completely; 4 ≡ -1 has order 2; 2 has order 4; 5 ramifies.
        assert_eq!(c.r(11).unwrap(), 4);
        assert_eq!(c.r(19).unwrap(), 2);
        assert_eq!(c.r(2).unwrap(), 1);
        assert_eq!(c.r(5).unwrap(), 1);
        let t = make_profile("table:2:1:2=2,3=1").unwrap();
        assert_eq!(t.r(2).unwrap(), 2);
        assert!(t.r(5).is_err());
        let t = make_profile("table:3:0:2=3,*=1").unwrap();
        assert_eq!(t.r(5).unwrap(), 1);
        assert!(make_profile("table:2:1:2=3").is_err());
        assert_eq!(make_profile(&t.id).unwrap(), t);
    }

    #[test]
    fn point_densities() {
        let tol = rat(1, 1_000_000);
        let c = prob_e(1, 2, &tol).unwrap();
        assert!(c.lo() > &rat(73075, 100_000) && c.hi() < &rat(73077, 100_000));
        // phi(2)/2^3 = 1/8
        assert_eq!(prob_e(2, 2, &tol).unwrap(), c.scale(&rat(1, 8)));
        let r2 = prob_ring_equals(2, 2, &tol).unwrap();
        assert_eq!(r2, c.scale(&rat(1, 6)));
        assert_eq!(prob_ring_equals(12, 2, &tol).unwrap(), prob_ring_equals(6, 2, &tol).unwrap());
        assert_eq!(prob_ring_equals(1, 3, &tol).unwrap(), prob_e(1, 3, &tol).unwrap());
        assert_eq!(prob_x_contains(&[2], 2).unwrap(), rat(1, 7));
        assert_eq!(prob_x_contains(&[], 2).unwrap(), rat(1, 1));
        assert_eq!(prob_x_contains(&[2, 3], 2).unwrap(), rat(1, 91));
        assert!(prob_x_contains(&[2, 2], 2).is_err());
        assert!(prob_x_contains(&[4], 2).is_err());
    }

    #[test]
    fn totient_tail_brackets_direct_sum() {
        // sum_{K < k <= 20000} phi(k)/k^3 is a lower bound for the tail at K = 100.
        let iv = totient_series_tail(2, 100).unwrap();
        let direct: f64 = (101..20_000u64).map(|k| totient(k) as f64 / (k as f64).powi(3)).sum();
        let (lo, hi) = (rational_to_f64(iv.lo()), rational_to_f64(iv.hi()));
        assert!(lo <= direct && direct <= hi + 1e-15, "{lo} {direct} {hi}");
        // The |d| > K remainder alone contributes 2/(n K^n) = 1e-4 of width here.
        assert!(hi - direct < 3e-4);
    }

    #[test]
    fn dp_matches_subset_enumeration() {
        for spec in ["rational", "quadratic:-7", "quadratic:5", "cyclotomic:5"] {
            let prof = make_profile(spec).unwrap();
            let primes = [2u64, 3, 5, 7, 11];
            let dp = truncated_dp_exact(&prof, 2, 13, 12).unwrap();
            let mut brute = vec![Rational::zero(); 13];
            for mask in 0u32..32 {
                let mut t = 0;
                let mut w = Rational::one();
                for (i, &p) in primes.iter().enumerate() {
                    if mask >> i & 1 == 1 {
                        t += prof.r(p).unwrap() as usize;
                        w *= crate::exact::local_factors(p, 2).unwrap().1;
                    }
                }
                if t <= 12 {
                    brute[t] += w;
                }
            }
            assert_eq!(dp, brute, "{spec}");
        }
    }

    #[test]
    fn lambda_sets() {
        assert_eq!(lambda_set(2, 3).unwrap(), vec![vec![1, 1], vec![3, 0]]);
        assert_eq!(lambda_set(1, 5).unwrap(), vec![vec![5]]);
        assert_eq!(lambda0_set(4, 3).unwrap(), vec![vec![1, 1, 0, 0], vec![3, 0, 0, 0]]);
        assert!(lambda0_set(3, 3).unwrap().iter().all(|l| l[1] == 0));
        assert!(lambda_set(9, 2).is_err());
        assert!(lambda_set(2, 65).is_err());
    }

    #[test]
    fn thresholds() {
        assert_eq!(prediction_thresholds(1, true), (0, Some(0)));
        assert_eq!(prediction_thresholds(2, true), (0, Some(0)));
        // d = 3: d_1 = 6, 2*6 - 6 + 1 = 7; Galois: 3*(2-1) - 4 + 1 = 0.
        assert_eq!(prediction_thresholds(3, true), (7, Some(0)));
        // d = 4: d_1 = 12, 3*12 - 10 + 1 = 27; Galois: 4*2 - 7 + 1 = 2.
        assert_eq!(prediction_thresholds(4, false), (27, None));
        assert_eq!(prediction_thresholds(4, true).1, Some(2));
    }

    #[test]
    fn surjection_weights() {
        // One prime with r = 2: (2)^s - 0^s.
        assert_eq!(surjection_weight(&[0, 1], 3), rat(8, 1));
        // Two primes with r = 1, s = 2: 2^2 - 1 - 1 + 0 = 2 (ordered surjections).
        assert_eq!(surjection_weight(&[2], 2), rat(2, 1));
        assert_eq!(surjection_weight(&[3], 2), rat(0, 1));
        assert_eq!(class_counts(2, 2).len(), 6);
    }
}
