//! Exact constants: local Euler factors, the certified zeta ratio, and the
//! combinatorial tables used by the density and census code.

mod combinat;
mod euler;
mod interval;
mod primes;

pub use combinat::{
    binomial, factorial, partitions_with_parts, stirling_density_row, stirling_first_row,
    stirling_second_row, Partition,
};
pub use euler::{
    inv_zeta, local_factors, tail_epsilon, tail_factor, zeta_ratio, zeta_ratio_detailed,
    EulerProduct,
};
pub(crate) use euler::{
    alpha_beta_parts, alpha_parts, beta_parts, certified_product, certified_product_at,
    check_tol,
};
pub use interval::{
    decimal_ceil, decimal_floor, parse_rational, rat, rat_int, rational_to_f64, CertifiedInterval,
    Rational,
};
pub(crate) use interval::Fixed;
pub(crate) use primes::sqrt_mod;
pub use primes::{
    divisors, factorize, is_prime, is_squarefree, isqrt_u128, isqrt_u64, mobius, mobius_table,
    multiplicative_order, totient, PrimeSieve,
};
