//! Integer partitions, binomials and Stirling numbers.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use super::interval::Rational;
use crate::error::{domain, Result};

/// A partition of `total()` into positive parts, stored non-increasing.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Partition {
    pub parts: Vec<u32>,
}

impl Partition {
    pub fn total(&self) -> u32 {
        self.parts.iter().sum()
    }

    /// `b_j(lambda)`: how many times `j` occurs as a part.
    pub fn multiplicity(&self, j: u32) -> u32 {
        self.parts.iter().filter(|&&x| x == j).count() as u32
    }

    /// Map `j -> b_j(lambda)` over the parts that occur.
    pub fn multiplicities(&self) -> BTreeMap<u32, u32> {
        let mut b = BTreeMap::new();
        for &x in &self.parts {
            *b.entry(x).or_insert(0) += 1;
        }
        b
    }
}

/// All partitions of `m` into exactly `i` parts, in decreasing lexicographic order.
pub fn partitions_with_parts(m: u32, i: u32) -> Result<Vec<Partition>> {
    if m == 0 || i == 0 || i > m {
        return domain(format!("need 1 <= i <= m, got m = {m}, i = {i}"));
    }
    let mut out = Vec::new();
    let mut cur = Vec::with_capacity(i as usize);
    fill(m, i, m, &mut cur, &mut out);
    Ok(out)
}

fn fill(rest: u32, slots: u32, cap: u32, cur: &mut Vec<u32>, out: &mut Vec<Partition>) {
    if slots == 0 {
        if rest == 0 {
            out.push(Partition { parts: cur.clone() });
        }
        return;
    }
    // The remaining slots - 1 parts need at least one each.
    let hi = cap.min(rest + 1 - slots);
    let lo = rest.div_ceil(slots);
    for x in (lo..=hi).rev() {
        cur.push(x);
        fill(rest - x, slots - 1, x, cur, out);
        cur.pop();
    }
}

pub fn binomial(n: u64, k: u64) -> BigInt {
    if k > n {
        return BigInt::zero();
    }
    let k = k.min(n - k);
    let mut acc = BigInt::one();
    for j in 0..k {
        acc = acc * (n - j) / (j + 1);
    }
    acc
}

pub fn factorial(n: u64) -> BigInt {
    (1..=n).fold(BigInt::one(), |acc, j| acc * j)
}

/// Unsigned Stirling numbers of the first kind `c(m, i)` for `0 <= i <= m`:
/// the coefficients of `y (y+1) ... (y+m-1)`.
pub fn stirling_first_row(m: u32) -> Vec<BigInt> {
    let mut row = vec![BigInt::one()];
    for j in 0..m {
        // multiply by (y + j)
        let mut next = vec![BigInt::zero(); row.len() + 1];
        for (k, c) in row.iter().enumerate() {
            next[k + 1] += c;
            next[k] += c * j;
        }
        row = next;
    }
    row
}

/// Stirling numbers of the second kind `S(k, j)` for `0 <= j <= k`.
pub fn stirling_second_row(k: u32) -> Vec<BigInt> {
    let mut row = vec![BigInt::one()];
    for _ in 0..k {
        let mut next = vec![BigInt::zero(); row.len() + 1];
        for (j, c) in row.iter().enumerate() {
            next[j + 1] += c;
            next[j] += c * j;
        }
        row = next;
    }
    row
}

/// Coefficients of `y^i`, `1 <= i <= m`, in `y (y+1) ... (y+m-1) / m!`.
pub fn stirling_density_row(m: u32) -> Result<BTreeMap<u32, Rational>> {
    if m == 0 {
        return domain("stirling_density_row needs m >= 1");
    }
    let f = factorial(m as u64);
    Ok(stirling_first_row(m)
        .into_iter()
        .enumerate()
        .skip(1)
        .map(|(i, c)| (i as u32, Rational::new(c, f.clone())))
        .collect())
}
