//! Factorization censuses of monic polynomials over F_p: number of distinct
//! irreducible factors, Möbius counts of irreducibles, the partition limit
//! law, and Dedekind-Kummer splitting of sampled algebraic integers.

pub(crate) mod gf;

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_traits::{One, Zero};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};
use crate::exact::{
    divisors, factorial, is_prime, mobius, partitions_with_parts, stirling_density_row,
    Rational,
};
use crate::limits::Limits;
use crate::sampler::{self, AccumulateConfig, EnumSpec, Mode};

/// Monic polynomial over F_p, coefficients low-to-high.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct ModPPoly {
    p: u64,
    coeffs: Vec<u64>,
}

impl ModPPoly {
    pub fn new(p: u64, coeffs: Vec<u64>) -> Result<Self> {
        if !is_prime(p) || p >= 1 << 32 {
            return domain(format!("modulus {p} must be a prime below 2^32"));
        }
        let coeffs: Vec<u64> = coeffs.into_iter().map(|c| c % p).collect();
        if coeffs.last() != Some(&1) {
            return domain("polynomial must be monic");
        }
        Ok(ModPPoly { p, coeffs })
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    pub fn coeffs(&self) -> &[u64] {
        &self.coeffs
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn mul(&self, other: &ModPPoly) -> ModPPoly {
        ModPPoly {
            p: self.p,
            coeffs: gf::mul(&self.coeffs, &other.coeffs, self.p),
        }
    }

    pub fn pow(&self, e: u32) -> ModPPoly {
        let mut acc = ModPPoly {
            p: self.p,
            coeffs: vec![1],
        };
        for _ in 0..e {
            acc = acc.mul(self);
        }
        acc
    }
}

/// Degrees and multiplicities of the distinct irreducible factors.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FactorProfile {
    pub distinct_count: u32,
    /// One `(degree, multiplicity)` entry per distinct irreducible factor, sorted.
    pub factors: Vec<(u32, u32)>,
    pub squarefree: bool,
}

impl FactorProfile {
    /// Sorted degrees of the distinct irreducible factors.
    pub fn degrees(&self) -> Vec<u32> {
        self.factors.iter().map(|&(d, _)| d).collect()
    }
}

/// Product of all irreducible factors of one degree and one multiplicity.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DdfComponent {
    pub multiplicity: u32,
    pub degree: u32,
    pub product: ModPPoly,
}

fn check_char(f: &ModPPoly) -> Result<()> {
    let m = f.degree() as u64;
    if m == 0 {
        return domain("polynomial must have degree >= 1");
    }
    if f.p <= m {
        return domain(format!("need p > m, got p = {}, m = {m}", f.p));
    }
    Ok(())
}

/// Squarefree decomposition followed by distinct-degree factorization.
pub fn distinct_degree_decomposition(f: &ModPPoly) -> Result<Vec<DdfComponent>> {
    check_char(f)?;
    let p = f.p;
    let mut out = Vec::new();
    for (mult, a) in gf::squarefree_decomposition(&f.coeffs, p) {
        for (d, prod) in gf::distinct_degree(&a, p) {
            out.push(DdfComponent {
                multiplicity: mult,
                degree: d,
                product: ModPPoly { p, coeffs: prod },
            });
        }
    }
    Ok(out)
}

/// Number of distinct irreducible factors: each distinct-degree component of
/// degree `D` built from irreducibles of degree `e` holds `D / e` of them.
pub fn factor_profile(f: &ModPPoly) -> Result<FactorProfile> {
    let mut factors = Vec::new();
    for c in distinct_degree_decomposition(f)? {
        let count = c.product.degree() as u32 / c.degree;
        factors.extend(std::iter::repeat_n((c.degree, c.multiplicity), count as usize));
    }
    factors.sort_unstable();
    Ok(FactorProfile {
        distinct_count: factors.len() as u32,
        squarefree: factors.iter().all(|&(_, m)| m == 1),
        factors,
    })
}

/// `a_m(p) = (1/m) sum_{d | m} mu(m/d) p^d`.
pub fn irreducible_count(m: u32, p: u64) -> Result<BigInt> {
    if m == 0 || !is_prime(p) {
        return domain(format!("need m >= 1 and p prime, got m = {m}, p = {p}"));
    }
    let total: BigInt = divisors(m as u64)
        .into_iter()
        .map(|d| BigInt::from(mobius(m as u64 / d)) * BigInt::from(p).pow(d as u32))
        .sum();
    Ok(total / m)
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct CensusReport {
    pub m: u32,
    pub p: u64,
    pub total: u64,
    /// `i -> number of monic polynomials with exactly i distinct irreducible factors`.
    pub by_distinct: BTreeMap<u32, u64>,
    pub squarefree_by_distinct: BTreeMap<u32, u64>,
    /// Squarefree polynomials by sorted factor-degree list.
    pub squarefree_by_shape: BTreeMap<Vec<u32>, u64>,
    pub non_squarefree: u64,
}

impl CensusReport {
    fn merge(&mut self, other: CensusReport) {
        self.total += other.total;
        self.non_squarefree += other.non_squarefree;
        for (k, v) in other.by_distinct {
            *self.by_distinct.entry(k).or_default() += v;
        }
        for (k, v) in other.squarefree_by_distinct {
            *self.squarefree_by_distinct.entry(k).or_default() += v;
        }
        for (k, v) in other.squarefree_by_shape {
            *self.squarefree_by_shape.entry(k).or_default() += v;
        }
    }

    /// `f(m, i, p) = #{i distinct factors} / p^m`.
    pub fn fraction(&self, i: u32) -> Rational {
        Rational::new(
            BigInt::from(self.by_distinct.get(&i).copied().unwrap_or(0)),
            BigInt::from(self.total),
        )
    }

    pub fn squarefree_fraction(&self) -> Rational {
        Rational::new(
            BigInt::from(self.total - self.non_squarefree),
            BigInt::from(self.total),
        )
    }
}

/// Exhaustive census over all `p^m` monic polynomials of degree `m`.
pub fn exact_factor_census(m: u32, p: u64, limits: &Limits) -> Result<CensusReport> {
    if m == 0 || !is_prime(p) || p <= m as u64 {
        return domain(format!("census needs m >= 1 and prime p > m, got m = {m}, p = {p}"));
    }
    let size = (p as u128).checked_pow(m).unwrap_or(u128::MAX);
    limits.check_census(size)?;
    // Blocks by the coefficient of x^(m-1); inner odometer over the rest.
    let reports: Vec<CensusReport> = (0..p)
        .into_par_iter()
        .map(|top| census_block(m, p, top))
        .collect();
    let mut out = CensusReport {
        m,
        p,
        ..Default::default()
    };
    for r in reports {
        out.merge(r);
    }
    Ok(out)
}

fn census_block(m: u32, p: u64, top: u64) -> CensusReport {
    let m = m as usize;
    let mut coeffs = vec![0u64; m + 1];
    coeffs[m] = 1;
    coeffs[m - 1] = top;
    let mut rep = CensusReport::default();
    loop {
        let f = ModPPoly {
            p,
            coeffs: coeffs.clone(),
        };
        let prof = factor_profile(&f).expect("p > m checked by caller");
        rep.total += 1;
        *rep.by_distinct.entry(prof.distinct_count).or_default() += 1;
        if prof.squarefree {
            *rep.squarefree_by_distinct.entry(prof.distinct_count).or_default() += 1;
            *rep.squarefree_by_shape.entry(prof.degrees()).or_default() += 1;
        } else {
            rep.non_squarefree += 1;
        }
        // Odometer over coefficients 0..m-1 (exclusive of the block coefficient).
        let mut i = 0;
        loop {
            if i + 1 >= m {
                return rep;
            }
            coeffs[i] += 1;
            if coeffs[i] < p {
                break;
            }
            coeffs[i] = 0;
            i += 1;
        }
    }
}

/// `sum_{lambda in P(m, i)} prod_n C(a_n(p), b_n(lambda))`: the number of
/// squarefree monic polynomials of degree m with exactly i irreducible factors.
pub fn squarefree_count_formula(m: u32, i: u32, p: u64) -> Result<BigInt> {
    let mut total = BigInt::zero();
    for lambda in partitions_with_parts(m, i)? {
        let mut term = BigInt::one();
        for (n, b) in lambda.multiplicities() {
            let a = irreducible_count(n, p)?;
            term *= binom_big(&a, b);
        }
        total += term;
    }
    Ok(total)
}

fn binom_big(n: &BigInt, k: u32) -> BigInt {
    let mut acc = BigInt::one();
    for j in 0..k {
        acc = acc * (n - j) / (j + 1);
    }
    if n < &BigInt::from(k) {
        BigInt::zero()
    } else {
        acc
    }
}

/// `sum_{lambda in P(m, i)} prod_n 1 / (n^{b_n} b_n!)`, checked against the
/// coefficient of `y^i` in `y (y+1) ... (y+m-1) / m!`.
pub fn limit_density(m: u32, i: u32) -> Result<Rational> {
    if !(1..=12).contains(&m) || i == 0 || i > m {
        return domain(format!("limit_density needs 1 <= i <= m <= 12, got m = {m}, i = {i}"));
    }
    let mut total = Rational::zero();
    for lambda in partitions_with_parts(m, i)? {
        let mut den = BigInt::one();
        for (n, b) in lambda.multiplicities() {
            den *= BigInt::from(n).pow(b) * factorial(b as u64);
        }
        total += Rational::new(BigInt::one(), den);
    }
    let row = stirling_density_row(m)?;
    if row[&i] != total {
        return Err(Error::Consistency(format!(
            "partition sum {total} differs from Stirling coefficient {} at m = {m}, i = {i}",
            row[&i]
        )));
    }
    Ok(total)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SplittingSample {
    pub m: u32,
    pub p: u64,
    pub samples: u64,
    /// `i -> count` over samples with `p` not dividing the discriminant.
    pub counts: BTreeMap<u32, u64>,
    pub skipped: u64,
}

impl SplittingSample {
    /// Fraction of non-skipped samples where `p` splits into `i` primes.
    pub fn fraction(&self, i: u32) -> f64 {
        let used = self.samples - self.skipped;
        if used == 0 {
            return 0.0;
        }
        self.counts.get(&i).copied().unwrap_or(0) as f64 / used as f64
    }

    pub fn skip_fraction(&self) -> f64 {
        self.skipped as f64 / self.samples.max(1) as f64
    }
}

/// Monte-Carlo sample of monic irreducible integer polynomials of degree `m`
/// and height `<= H`. When `p` does not divide the discriminant, the number of
/// distinct factors mod `p` is the number of primes above `p` in `Q(alpha)`.
pub fn empirical_splitting(m: u32, p: u64, height: u64, samples: u64, seed: u64) -> Result<SplittingSample> {
    if !is_prime(p) || p <= m as u64 {
        return domain(format!("need prime p > m, got p = {p}, m = {m}"));
    }
    let spec = EnumSpec {
        degree: m,
        height,
        mode: Mode::MonteCarlo { samples, seed },
        monic_only: true,
    };
    let config = AccumulateConfig {
        split_primes: vec![p],
        ..Default::default()
    };
    let acc = sampler::run_montecarlo(&spec, &config)?;
    let hist = acc.splitting_histogram.get(&p).cloned().unwrap_or_default();
    let skipped = hist.get(&0).copied().unwrap_or(0);
    let counts = hist.into_iter().filter(|&(i, _)| i > 0).collect();
    Ok(SplittingSample {
        m,
        p,
        samples: acc.total_weight,
        counts,
        skipped,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::{binomial, rat};

    fn mp(p: u64, c: &[u64]) -> ModPPoly {
        ModPPoly::new(p, c.to_vec()).unwrap()
    }

    #[test]
    fn profile_examples() {
        assert_eq!(factor_profile(&mp(3, &[1, 0, 1])).unwrap().distinct_count, 1);
        let sq = factor_profile(&mp(5, &[0, 0, 1])).unwrap();
        assert_eq!(sq.distinct_count, 1);
        assert!(!sq.squarefree);
        let f = mp(5, &[0, 1]).mul(&mp(5, &[1, 1])).mul(&mp(5, &[2, 0, 1]));
        let prof = factor_profile(&f).unwrap();
        assert_eq!(prof.distinct_count, 3);
        assert_eq!(prof.factors, vec![(1, 1), (1, 1), (2, 1)]);
        assert!(factor_profile(&mp(3, &[0, 0, 0, 1])).is_err());
        assert!(ModPPoly::new(4, vec![1, 1]).is_err());
        assert!(ModPPoly::new(5, vec![1, 2]).is_err());
    }

    #[test]
    fn irreducible_counts() {
        for p in [2u64, 3, 5, 7] {
            assert_eq!(irreducible_count(1, p).unwrap(), BigInt::from(p));
        }
        assert_eq!(irreducible_count(2, 3).unwrap(), BigInt::from(3));
        assert_eq!(irreducible_count(3, 2).unwrap(), BigInt::from(2));
        assert_eq!(irreducible_count(6, 2).unwrap(), BigInt::from(9));
    }

    #[test]
    fn census_small() {
        let c = exact_factor_census(2, 3, &Limits::default()).unwrap();
        assert_eq!(c.total, 9);
        // Irreducible monic quadratics mod 3: x^2+1, x^2+x+2, x^2+2x+2.
        assert_eq!(c.squarefree_by_shape[&vec![2]], 3);
        assert_eq!(c.non_squarefree, 3);
        assert_eq!(c.squarefree_fraction(), rat(2, 3));
        let limits = Limits {
            max_census: 10,
            ..Limits::default()
        };
        assert!(matches!(
            exact_factor_census(3, 5, &limits),
            Err(Error::Budget { .. })
        ));
    }

    #[test]
    fn limit_examples() {
        assert_eq!(limit_density(3, 2).unwrap(), rat(1, 2));
        for m in 1..=12 {
            assert_eq!(
                limit_density(m, m).unwrap(),
                Rational::new(BigInt::one(), factorial(m as u64))
            );
            let total: Rational = (1..=m).map(|i| limit_density(m, i).unwrap()).sum();
            assert_eq!(total, rat(1, 1));
        }
        assert!(limit_density(13, 2).is_err());
    }

    #[test]
    fn binomial_helper() {
        assert_eq!(binom_big(&BigInt::from(7), 3), binomial(7, 3));
        assert_eq!(binom_big(&BigInt::from(2), 3), BigInt::zero());
    }
}
