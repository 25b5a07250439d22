//! Exhaustive and Monte-Carlo enumeration of primitive irreducible integer
//! polynomials of bounded height, with mergeable statistics.
//!
//! Representatives are polynomials rather than roots: every statistic here
//! depends only on the minimal polynomial, so the constant weight `n` cancels
//! in all ratios.

use std::collections::BTreeMap;
use std::fs::OpenOptions;
use std::io::{BufRead, BufReader, Write};
use std::path::Path;
use std::sync::Mutex;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{Signed, ToPrimitive, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::density::{ProfileKind, SplittingProfile};
use crate::error::{domain, Error, Result};
use crate::exact::{inv_zeta, isqrt_u128, rat, rat_int, CertifiedInterval, PrimeSieve};
use crate::factorstats::gf;
use crate::limits::Limits;
use crate::polyint::{self, IntPolynomial, NormalizedRep};
use crate::quadfield::radicand;

/// Largest height accepted; keeps every coefficient product inside i128.
pub const MAX_HEIGHT: u64 = 1_000_000_000;
/// Monte-Carlo runs are split into this many independently seeded blocks.
pub const MC_BLOCKS: u64 = 64;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Mode {
    Exhaustive,
    MonteCarlo { samples: u64, seed: u64 },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct EnumSpec {
    pub degree: u32,
    pub height: u64,
    pub mode: Mode,
    /// Only `a_n = 1` (algebraic integers).
    pub monic_only: bool,
}

impl EnumSpec {
    fn validate(&self) -> Result<()> {
        if self.degree == 0 {
            return domain("degree must be at least 1");
        }
        if self.height == 0 || self.height > MAX_HEIGHT {
            return domain(format!("height must be in [1, {MAX_HEIGHT}], got {}", self.height));
        }
        if let Mode::MonteCarlo { samples: 0, .. } = self.mode {
            return domain("Monte-Carlo needs at least one sample");
        }
        Ok(())
    }

    fn outer_len(&self) -> u64 {
        let w = 2 * self.height + 1;
        if self.monic_only {
            w
        } else {
            self.height * w
        }
    }

    /// Coefficient tuples an exhaustive run visits.
    pub fn tuple_count(&self) -> u128 {
        let w = (2 * self.height + 1) as u128;
        let lead = if self.monic_only { 1 } else { self.height as u128 };
        (0..self.degree).fold(lead, |acc, _| acc.saturating_mul(w))
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct AccumulateConfig {
    pub profiles: Vec<SplittingProfile>,
    /// Squarefree `m`; counts representatives with `Disc / m` a positive square.
    pub disc_classes: Vec<i64>,
    /// Primes at which the factorization pattern of `f mod p` is recorded.
    pub split_primes: Vec<u64>,
}

/// Mergeable counters. Merging is a coordinatewise sum, so any partition of
/// a run merges to the same value.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct StatAccumulator {
    /// Number of representatives recorded.
    pub total_weight: u64,
    /// Coefficient tuples drawn or visited, accepted or not.
    pub attempts: u64,
    pub e_histogram: BTreeMap<u64, u64>,
    /// Profile id to `|X(K, gamma)|` histogram (exceptional representatives left out).
    pub xsize_histograms: BTreeMap<String, BTreeMap<u32, u64>>,
    pub disc_squareclass_counts: BTreeMap<i64, u64>,
    /// Degree-2 representatives generating the profile's own field.
    pub exceptional_counts: BTreeMap<String, u64>,
    /// Prime to (number of distinct factors mod p, or 0 when skipped) to count.
    pub splitting_histogram: BTreeMap<u64, BTreeMap<u32, u64>>,
}

fn add_map<K: Ord + Clone>(into: &mut BTreeMap<K, u64>, from: &BTreeMap<K, u64>) {
    for (k, v) in from {
        *into.entry(k.clone()).or_insert(0) += v;
    }
}

impl StatAccumulator {
    pub fn merge(&mut self, other: &StatAccumulator) {
        self.total_weight += other.total_weight;
        self.attempts += other.attempts;
        add_map(&mut self.e_histogram, &other.e_histogram);
        for (id, h) in &other.xsize_histograms {
            add_map(self.xsize_histograms.entry(id.clone()).or_default(), h);
        }
        add_map(&mut self.disc_squareclass_counts, &other.disc_squareclass_counts);
        add_map(&mut self.exceptional_counts, &other.exceptional_counts);
        for (p, h) in &other.splitting_histogram {
            add_map(self.splitting_histogram.entry(*p).or_default(), h);
        }
    }

    pub fn merged<'a>(parts: impl IntoIterator<Item = &'a StatAccumulator>) -> StatAccumulator {
        let mut acc = StatAccumulator::default();
        for p in parts {
            acc.merge(p);
        }
        acc
    }

    /// Empirical `P[e = k]`.
    pub fn e_fraction(&self, k: u64) -> f64 {
        if self.total_weight == 0 {
            return 0.0;
        }
        *self.e_histogram.get(&k).unwrap_or(&0) as f64 / self.total_weight as f64
    }

    /// Empirical `P[|X| = t]` among the non-exceptional representatives.
    pub fn xsize_fraction(&self, profile_id: &str, t: u32) -> f64 {
        let Some(h) = self.xsize_histograms.get(profile_id) else {
            return 0.0;
        };
        let total: u64 = h.values().sum();
        if total == 0 {
            return 0.0;
        }
        *h.get(&t).unwrap_or(&0) as f64 / total as f64
    }
}

/// Primitive-irreducible test on small coefficient tuples (low-to-high, `c[n] > 0`).
struct Acceptor {
    degree: usize,
    divisors: Vec<Vec<i64>>,
}

impl Acceptor {
    fn new(degree: usize, height: u64) -> Self {
        // Divisor lists feed the cubic rational-root test.
        let divisors = if degree == 3 && height <= 2_000_000 {
            let h = height as usize;
            let mut d = vec![Vec::new(); h + 1];
            for k in 1..=h {
                for m in (k..=h).step_by(k) {
                    d[m].push(k as i64);
                }
            }
            d
        } else {
            Vec::new()
        };
        Acceptor { degree, divisors }
    }

    fn divisors_of(&self, x: i64) -> Vec<i64> {
        let x = x.unsigned_abs();
        if let Some(d) = self.divisors.get(x as usize) {
            return d.clone();
        }
        crate::exact::divisors(x).into_iter().map(|d| d as i64).collect()
    }

    fn primitive(c: &[i64]) -> bool {
        let mut g = 0i64;
        for &x in c.iter().rev() {
            g = g.gcd(&x);
            if g == 1 {
                return true;
            }
        }
        g == 1
    }

    fn accept(&self, c: &[i64]) -> bool {
        if !Self::primitive(c) {
            return false;
        }
        match self.degree {
            1 => true,
            2 => !is_square_i128(disc2(c)),
            3 => c[0] != 0 && !self.cubic_has_root(c),
            _ => {
                let poly = IntPolynomial {
                    coeffs: c.iter().map(|&x| BigInt::from(x)).collect(),
                };
                polyint::is_irreducible(&poly).unwrap_or(false)
            }
        }
    }

    fn cubic_has_root(&self, c: &[i64]) -> bool {
        let (a0, a1, a2, a3) = (c[0] as i128, c[1] as i128, c[2] as i128, c[3] as i128);
        let ps = self.divisors_of(c[0]);
        let qs = self.divisors_of(c[3]);
        for &q in &qs {
            let q = q as i128;
            for &p in &ps {
                let p = p as i128;
                if p.gcd(&q) != 1 {
                    continue;
                }
                for p in [p, -p] {
                    if ((a3 * p + a2 * q) * p + a1 * q * q) * p + a0 * q * q * q == 0 {
                        return true;
                    }
                }
            }
        }
        false
    }
}

fn disc2(c: &[i64]) -> i128 {
    let (a, b, cc) = (c[2] as i128, c[1] as i128, c[0] as i128);
    b * b - 4 * a * cc
}

fn is_square_i128(x: i128) -> bool {
    if x < 0 {
        return false;
    }
    let r = isqrt_u128(x as u128);
    r * r == x as u128
}

fn is_square_big(x: &BigInt) -> bool {
    if x.is_negative() {
        return false;
    }
    let r = x.sqrt();
    &r * &r == *x
}

/// Walks the coefficient tuples of an outer index range. The outer index
/// fixes `(a_n, a_{n-1})` (only `a_{n-1}` when monic); an odometer runs over
/// `a_{n-2}, ..., a_0`.
struct TupleWalk {
    n: usize,
    h: i64,
    monic: bool,
    outer: u64,
    end: u64,
    c: Vec<i64>,
    started: bool,
}

impl TupleWalk {
    fn new(spec: &EnumSpec, start: u64, end: u64) -> Self {
        let n = spec.degree as usize;
        TupleWalk {
            n,
            h: spec.height as i64,
            monic: spec.monic_only,
            outer: start,
            end,
            c: vec![0; n + 1],
            started: false,
        }
    }

    fn load_outer(&mut self) {
        let w = 2 * self.h as u64 + 1;
        let n = self.n;
        if self.monic {
            self.c[n] = 1;
            self.c[n - 1] = -self.h + self.outer as i64;
        } else {
            self.c[n] = 1 + (self.outer / w) as i64;
            self.c[n - 1] = -self.h + (self.outer % w) as i64;
        }
        for x in &mut self.c[..n - 1] {
            *x = -self.h;
        }
    }

    /// Step to the next tuple; `false` once the range is exhausted.
    fn advance(&mut self) -> bool {
        if !self.started {
            self.started = true;
            if self.outer >= self.end {
                return false;
            }
            self.load_outer();
            return true;
        }
        for i in 0..self.n - 1 {
            if self.c[i] < self.h {
                self.c[i] += 1;
                return true;
            }
            self.c[i] = -self.h;
        }
        self.outer += 1;
        if self.outer >= self.end {
            return false;
        }
        self.load_outer();
        true
    }

    fn current(&self) -> &[i64] {
        &self.c
    }
}

/// Draws for one Monte-Carlo block: `ChaCha8` seeded by the master seed, on
/// stream `block`.
struct McBlock {
    rng: ChaCha8Rng,
    n: usize,
    h: i64,
    monic: bool,
    remaining: u64,
    c: Vec<i64>,
}

fn block_quota(samples: u64, block: u64) -> u64 {
    samples / MC_BLOCKS + u64::from(block < samples % MC_BLOCKS)
}

impl McBlock {
    fn new(spec: &EnumSpec, samples: u64, seed: u64, block: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(block);
        let n = spec.degree as usize;
        McBlock {
            rng,
            n,
            h: spec.height as i64,
            monic: spec.monic_only,
            remaining: block_quota(samples, block),
            c: vec![0; n + 1],
        }
    }

    /// Next accepted tuple; `attempts` counts every full draw.
    fn next_accepted(&mut self, acceptor: &Acceptor, attempts: &mut u64) -> bool {
        if self.remaining == 0 {
            return false;
        }
        let h = self.h;
        loop {
            let lead = if self.monic {
                1
            } else {
                loop {
                    let a = self.rng.gen_range(-h..=h);
                    if a != 0 {
                        break a;
                    }
                }
            };
            self.c[self.n] = lead;
            for i in 0..self.n {
                self.c[i] = self.rng.gen_range(-h..=h);
            }
            if lead < 0 {
                for x in &mut self.c {
                    *x = -*x;
                }
            }
            *attempts += 1;
            if acceptor.accept(&self.c) {
                self.remaining -= 1;
                return true;
            }
        }
    }
}

fn to_rep(c: &[i64]) -> NormalizedRep {
    NormalizedRep {
        poly: IntPolynomial {
            coeffs: c.iter().map(|&x| BigInt::from(x)).collect(),
        },
        weight: (c.len() - 1) as u32,
    }
}

/// Every primitive irreducible polynomial of the given degree and height with
/// positive leading coefficient, exactly once.
pub fn enumerate_representatives(spec: &EnumSpec, limits: &Limits) -> Result<impl Iterator<Item = NormalizedRep>> {
    spec.validate()?;
    if spec.mode != Mode::Exhaustive {
        return domain("enumerate_representatives needs exhaustive mode");
    }
    limits.check_tuples("exhaustive enumeration", spec.tuple_count())?;
    let acceptor = Acceptor::new(spec.degree as usize, spec.height);
    let mut walk = TupleWalk::new(spec, 0, spec.outer_len());
    Ok(std::iter::from_fn(move || {
        while walk.advance() {
            if acceptor.accept(walk.current()) {
                return Some(to_rep(walk.current()));
            }
        }
        None
    }))
}

/// Uniform draws from the primitive irreducible tuples in `[-H, H]^(n+1)`;
/// deterministic given the seed. Blocks are concatenated in order.
pub fn mc_sample(spec: &EnumSpec) -> Result<impl Iterator<Item = NormalizedRep>> {
    spec.validate()?;
    let Mode::MonteCarlo { samples, seed } = spec.mode else {
        return domain("mc_sample needs Monte-Carlo mode");
    };
    let acceptor = Acceptor::new(spec.degree as usize, spec.height);
    let spec = spec.clone();
    let mut block = 0;
    let mut cur = McBlock::new(&spec, samples, seed, 0);
    let mut attempts = 0;
    Ok(std::iter::from_fn(move || loop {
        if cur.next_accepted(&acceptor, &mut attempts) {
            return Some(to_rep(&cur.c));
        }
        block += 1;
        if block >= MC_BLOCKS {
            return None;
        }
        cur = McBlock::new(&spec, samples, seed, block);
    }))
}

struct ProfileCtx {
    id: String,
    /// `t(e) = sum_{p | e} r(p)` for `e <= table.len() - 1`.
    t_by_e: Vec<u32>,
    profile: SplittingProfile,
    /// Radicand of the field for quadratic profiles.
    radicand: Option<i64>,
}

/// Precomputed per-run context.
struct Ctx {
    degree: usize,
    profiles: Vec<ProfileCtx>,
    disc_classes: Vec<i64>,
    split_primes: Vec<u64>,
}

const T_TABLE_MAX: u64 = 1 << 20;

impl Ctx {
    fn new(config: &AccumulateConfig, degree: u32, height: u64) -> Result<Self> {
        for &m in &config.disc_classes {
            if m == 0 || m == 1 || !crate::exact::is_squarefree(m.unsigned_abs()) {
                return domain(format!("disc class {m} must be squarefree and not 0 or 1"));
            }
        }
        for &p in &config.split_primes {
            if !crate::exact::is_prime(p) {
                return domain(format!("split prime {p} is not prime"));
            }
        }
        let size = height.min(T_TABLE_MAX);
        let mut sieve = PrimeSieve::new();
        let primes = sieve.primes_below(size + 1).to_vec();
        let mut profiles = Vec::new();
        for prof in &config.profiles {
            let radicand = match prof.kind {
                ProfileKind::Rational => None,
                ProfileKind::Quadratic { disc } => Some(radicand(disc)),
                _ => {
                    return domain(format!(
                        "accumulate supports rational and quadratic profiles, got {}",
                        prof.id
                    ))
                }
            };
            let mut t_by_e = vec![0u32; size as usize + 1];
            for &p in &primes {
                let r = prof.r(p)?;
                for m in (p..=size).step_by(p as usize) {
                    t_by_e[m as usize] += r;
                }
            }
            profiles.push(ProfileCtx {
                id: prof.id.clone(),
                t_by_e,
                profile: prof.clone(),
                radicand,
            });
        }
        Ok(Ctx {
            degree: degree as usize,
            profiles,
            disc_classes: config.disc_classes.clone(),
            split_primes: config.split_primes.clone(),
        })
    }
}

/// Dense counters for one block, turned into a [`StatAccumulator`] at the end.
struct Recorder<'a> {
    ctx: &'a Ctx,
    total: u64,
    attempts: u64,
    e_dense: Vec<u64>,
    e_sparse: BTreeMap<u64, u64>,
    xsize: Vec<Vec<u64>>,
    exceptional: Vec<u64>,
    disc: Vec<u64>,
    split: Vec<Vec<u64>>,
}

impl<'a> Recorder<'a> {
    fn new(ctx: &'a Ctx) -> Self {
        Recorder {
            ctx,
            total: 0,
            attempts: 0,
            e_dense: vec![0; 1024],
            e_sparse: BTreeMap::new(),
            xsize: vec![Vec::new(); ctx.profiles.len()],
            exceptional: vec![0; ctx.profiles.len()],
            disc: vec![0; ctx.disc_classes.len()],
            split: vec![vec![0; ctx.degree + 1]; ctx.split_primes.len()],
        }
    }

    fn t_of(&self, pc: &ProfileCtx, e: u64) -> Result<u32> {
        if let Some(&t) = pc.t_by_e.get(e as usize) {
            return Ok(t);
        }
        let mut t = 0;
        for (p, _) in crate::exact::factorize(e) {
            t += pc.profile.r(p)?;
        }
        Ok(t)
    }

    /// Record one accepted tuple (low-to-high, primitive, irreducible, `c[n] > 0`).
    fn record(&mut self, c: &[i64]) -> Result<()> {
        self.total += 1;
        let e = c[1..].iter().fold(0i64, |g, x| g.gcd(x)) as u64;
        match self.e_dense.get_mut(e as usize) {
            Some(slot) => *slot += 1,
            None => *self.e_sparse.entry(e).or_insert(0) += 1,
        }
        let n = self.ctx.degree;
        let need_disc = !self.ctx.disc_classes.is_empty() || (n == 2 && self.ctx.profiles.iter().any(|p| p.radicand.is_some()));
        let disc: Option<BigInt> = if !need_disc {
            None
        } else if n == 2 {
            Some(BigInt::from(disc2(c)))
        } else {
            let poly = IntPolynomial {
                coeffs: c.iter().map(|&x| BigInt::from(x)).collect(),
            };
            Some(polyint::discriminant(&poly)?)
        };
        for (i, pc) in self.ctx.profiles.iter().enumerate() {
            let exceptional = n == 2
                && match (pc.radicand, &disc) {
                    (Some(m), Some(d)) => square_over(d, m),
                    _ => false,
                };
            if exceptional {
                self.exceptional[i] += 1;
                continue;
            }
            let t = self.t_of(pc, e)? as usize;
            let h = &mut self.xsize[i];
            if h.len() <= t {
                h.resize(t + 1, 0);
            }
            h[t] += 1;
        }
        if let Some(d) = &disc {
            for (i, &m) in self.ctx.disc_classes.iter().enumerate() {
                if square_over(d, m) {
                    self.disc[i] += 1;
                }
            }
        }
        for (i, &p) in self.ctx.split_primes.iter().enumerate() {
            let lead = c[n].rem_euclid(p as i64) as u64;
            let idx = if lead == 0 {
                0
            } else {
                let red: Vec<u64> = c.iter().map(|&x| x.rem_euclid(p as i64) as u64).collect();
                gf::squarefree_factor_degrees(&red, p).map_or(0, |d| d.len())
            };
            self.split[i][idx] += 1;
        }
        Ok(())
    }

    fn finish(self) -> StatAccumulator {
        let mut acc = StatAccumulator {
            total_weight: self.total,
            attempts: self.attempts,
            e_histogram: self.e_sparse,
            ..Default::default()
        };
        for (e, &v) in self.e_dense.iter().enumerate() {
            if v > 0 {
                acc.e_histogram.insert(e as u64, v);
            }
        }
        for (i, pc) in self.ctx.profiles.iter().enumerate() {
            let h = acc.xsize_histograms.entry(pc.id.clone()).or_default();
            for (t, &v) in self.xsize[i].iter().enumerate() {
                if v > 0 {
                    *h.entry(t as u32).or_insert(0) += v;
                }
            }
            *acc.exceptional_counts.entry(pc.id.clone()).or_insert(0) += self.exceptional[i];
        }
        for (i, &m) in self.ctx.disc_classes.iter().enumerate() {
            *acc.disc_squareclass_counts.entry(m).or_insert(0) += self.disc[i];
        }
        for (i, &p) in self.ctx.split_primes.iter().enumerate() {
            let h = acc.splitting_histogram.entry(p).or_default();
            for (k, &v) in self.split[i].iter().enumerate() {
                if v > 0 {
                    *h.entry(k as u32).or_insert(0) += v;
                }
            }
        }
        acc
    }
}

/// `d / m` is a positive perfect square.
fn square_over(d: &BigInt, m: i64) -> bool {
    let m = BigInt::from(m);
    let (q, r) = d.div_rem(&m);
    r.is_zero() && q.is_positive() && is_square_big(&q)
}

/// Statistics of an arbitrary stream of representatives. Profiles must be
/// rational or quadratic.
pub fn accumulate(stream: impl IntoIterator<Item = NormalizedRep>, config: &AccumulateConfig) -> Result<StatAccumulator> {
    let mut stream = stream.into_iter().peekable();
    let Some(first) = stream.peek() else {
        return Ok(Recorder::new(&Ctx::new(config, 1, 1)?).finish());
    };
    let degree = first.poly.degree() as u32;
    // Coefficient sizes are unknown up front; t(e) falls back to factoring past the table.
    let ctx = Ctx::new(config, degree, 1 << 16)?;
    let mut rec = Recorder::new(&ctx);
    let mut small = Vec::new();
    for rep in stream {
        if rep.poly.degree() as u32 != degree {
            return domain("stream mixes degrees");
        }
        small.clear();
        for c in rep.poly.coeffs() {
            let v = c
                .to_i64()
                .filter(|v| v.unsigned_abs() <= MAX_HEIGHT)
                .ok_or_else(|| Error::Domain(format!("coefficient {c} exceeds height {MAX_HEIGHT}")))?;
            small.push(v);
        }
        rec.attempts += 1;
        rec.record(&small)?;
    }
    Ok(rec.finish())
}

/// Outer-index ranges of `blocks` contiguous pieces.
pub fn block_ranges(spec: &EnumSpec, blocks: u64) -> Vec<(u64, u64)> {
    let total = spec.outer_len();
    let blocks = blocks.max(1);
    (0..blocks)
        .map(|b| {
            let lo = (total as u128 * b as u128 / blocks as u128) as u64;
            let hi = (total as u128 * (b + 1) as u128 / blocks as u128) as u64;
            (lo, hi)
        })
        .collect()
}

fn exhaustive_range(spec: &EnumSpec, ctx: &Ctx, acceptor: &Acceptor, range: (u64, u64)) -> Result<StatAccumulator> {
    let mut rec = Recorder::new(ctx);
    let mut walk = TupleWalk::new(spec, range.0, range.1);
    while walk.advance() {
        rec.attempts += 1;
        if acceptor.accept(walk.current()) {
            rec.record(walk.current())?;
        }
    }
    Ok(rec.finish())
}

fn check_exhaustive(spec: &EnumSpec, limits: &Limits) -> Result<()> {
    spec.validate()?;
    if spec.mode != Mode::Exhaustive {
        return domain("exhaustive run needs exhaustive mode");
    }
    limits.check_tuples("exhaustive enumeration", spec.tuple_count())
}

/// One block of an exhaustive run split into `blocks` pieces.
pub fn run_exhaustive_block(spec: &EnumSpec, config: &AccumulateConfig, blocks: u64, block: u64, limits: &Limits) -> Result<StatAccumulator> {
    check_exhaustive(spec, limits)?;
    let ranges = block_ranges(spec, blocks);
    let range = *ranges
        .get(block as usize)
        .ok_or_else(|| Error::Domain(format!("block {block} out of {blocks}")))?;
    let ctx = Ctx::new(config, spec.degree, spec.height)?;
    exhaustive_range(spec, &ctx, &Acceptor::new(spec.degree as usize, spec.height), range)
}

/// Exhaustive run, blocks processed in parallel and merged in block order.
pub fn run_exhaustive(spec: &EnumSpec, config: &AccumulateConfig, blocks: u64, limits: &Limits) -> Result<StatAccumulator> {
    check_exhaustive(spec, limits)?;
    let ctx = Ctx::new(config, spec.degree, spec.height)?;
    let acceptor = Acceptor::new(spec.degree as usize, spec.height);
    let parts: Vec<StatAccumulator> = block_ranges(spec, blocks)
        .into_par_iter()
        .map(|r| exhaustive_range(spec, &ctx, &acceptor, r))
        .collect::<Result<_>>()?;
    Ok(StatAccumulator::merged(&parts))
}

/// Monte-Carlo run over [`MC_BLOCKS`] independently seeded blocks.
pub fn run_montecarlo(spec: &EnumSpec, config: &AccumulateConfig) -> Result<StatAccumulator> {
    spec.validate()?;
    let Mode::MonteCarlo { samples, seed } = spec.mode else {
        return domain("Monte-Carlo run needs Monte-Carlo mode");
    };
    let ctx = Ctx::new(config, spec.degree, spec.height)?;
    let acceptor = Acceptor::new(spec.degree as usize, spec.height);
    let parts: Vec<StatAccumulator> = (0..MC_BLOCKS)
        .into_par_iter()
        .map(|b| {
            let mut rec = Recorder::new(&ctx);
            let mut block = McBlock::new(spec, samples, seed, b);
            let mut attempts = 0;
            while block.next_accepted(&acceptor, &mut attempts) {
                rec.record(&block.c)?;
            }
            rec.attempts = attempts;
            Ok(rec.finish())
        })
        .collect::<Result<_>>()?;
    Ok(StatAccumulator::merged(&parts))
}

/// One line of the run log.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct LogRecord {
    /// Identifies the run (spec, config, block count); records with another key are ignored.
    pub key: String,
    pub block: u64,
    pub range: (u64, u64),
    pub acc: StatAccumulator,
}

/// Exhaustive run that appends one JSON line per finished block to `log` and
/// skips blocks already recorded there for the same run.
pub fn run_exhaustive_logged(spec: &EnumSpec, config: &AccumulateConfig, blocks: u64, limits: &Limits, log: &Path) -> Result<StatAccumulator> {
    check_exhaustive(spec, limits)?;
    let key = serde_json::to_string(&(spec, config, blocks))?;
    let ranges = block_ranges(spec, blocks);
    let mut done: BTreeMap<u64, StatAccumulator> = BTreeMap::new();
    if log.exists() {
        for line in BufReader::new(std::fs::File::open(log)?).lines() {
            let line = line?;
            if line.trim().is_empty() {
                continue;
            }
            // A torn final line from an interrupted run is skipped.
            let Ok(rec) = serde_json::from_str::<LogRecord>(&line) else {
                continue;
            };
            if rec.key == key && ranges.get(rec.block as usize) == Some(&rec.range) {
                done.insert(rec.block, rec.acc);
            }
        }
    }
    let ctx = Ctx::new(config, spec.degree, spec.height)?;
    let acceptor = Acceptor::new(spec.degree as usize, spec.height);
    let file = Mutex::new(OpenOptions::new().create(true).append(true).open(log)?);
    let fresh: Vec<(u64, StatAccumulator)> = ranges
        .par_iter()
        .enumerate()
        .filter(|(b, _)| !done.contains_key(&(*b as u64)))
        .map(|(b, &range)| {
            let acc = exhaustive_range(spec, &ctx, &acceptor, range)?;
            let rec = LogRecord {
                key: key.clone(),
                block: b as u64,
                range,
                acc,
            };
            let line = serde_json::to_string(&rec)?;
            let mut f = file.lock().expect("run log lock");
            writeln!(f, "{line}")?;
            f.flush()?;
            Ok((b as u64, rec.acc))
        })
        .collect::<Result<_>>()?;
    done.extend(fresh);
    Ok(StatAccumulator::merged(done.values()))
}

/// Exact count and main-term prediction.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CountReport {
    pub count: u128,
    pub predicted: CertifiedInterval,
}

impl CountReport {
    /// `|count - mid(predicted)| / mid(predicted)`.
    pub fn relative_deviation(&self) -> f64 {
        let mid = self.predicted.mid_f64();
        (self.count as f64 - mid).abs() / mid
    }
}

/// Irreducible primitive polynomials of degree `n` and height `<= H`, both
/// signs of the leading coefficient, against `(2H)^(n+1) / zeta(n+1)`.
pub fn count_irreducible(n: u32, height: u64, limits: &Limits) -> Result<CountReport> {
    let spec = EnumSpec {
        degree: n,
        height,
        mode: Mode::Exhaustive,
        monic_only: false,
    };
    let acc = run_exhaustive(&spec, &AccumulateConfig::default(), 16, limits)?;
    let scale = rat_int(BigInt::from(2 * height).pow(n + 1));
    let predicted = inv_zeta(n + 1, &rat(1, 1_000_000))?.scale(&scale);
    Ok(CountReport {
        count: 2 * acc.total_weight as u128,
        predicted,
    })
}

/// Tuples in `[-H, H]^k` with gcd 1, against `(2H)^k / zeta(k)`.
pub fn count_coprime_tuples(k: u32, height: u64, limits: &Limits) -> Result<CountReport> {
    if k < 2 {
        return domain("tuple length must be at least 2");
    }
    if height == 0 || height > MAX_HEIGHT {
        return domain(format!("height must be in [1, {MAX_HEIGHT}]"));
    }
    let w = 2 * height + 1;
    let total = (0..k).fold(1u128, |a, _| a.saturating_mul(w as u128));
    limits.check_tuples("coprime tuple count", total)?;
    let h = height as i64;
    // First coordinate in parallel, odometer over the rest.
    let count: u128 = (-h..=h)
        .into_par_iter()
        .map(|first| {
            let mut c = vec![-h; k as usize - 1];
            let mut count = 0u128;
            loop {
                let g = c.iter().fold(first.abs(), |g, x| g.gcd(x));
                if g == 1 {
                    count += 1;
                }
                let mut i = 0;
                while i < c.len() && c[i] == h {
                    c[i] = -h;
                    i += 1;
                }
                if i == c.len() {
                    break;
                }
                c[i] += 1;
            }
            count
        })
        .sum();
    let predicted = inv_zeta(k, &rat(1, 1_000_000))?.scale(&rat_int(BigInt::from(2 * height).pow(k)));
    Ok(CountReport { count, predicted })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn exhaustive(n: u32, h: u64, monic: bool) -> EnumSpec {
        EnumSpec {
            degree: n,
            height: h,
            mode: Mode::Exhaustive,
            monic_only: monic,
        }
    }

    #[test]
    fn degree_one_height_one() {
        let reps: Vec<String> = enumerate_representatives(&exhaustive(1, 1, false), &Limits::default())
            .unwrap()
            .map(|r| r.poly.to_string())
            .collect();
        assert_eq!(reps, vec!["x - 1", "x", "x + 1"]);
    }

    #[test]
    fn quadratics_height_one() {
        let reps: Vec<String> = enumerate_representatives(&exhaustive(2, 1, false), &Limits::default())
            .unwrap()
            .map(|r| r.poly.to_string())
            .collect();
        assert!(reps.contains(&"x^2 + x + 1".to_string()));
        assert!(!reps.contains(&"x^2 - 1".to_string()));
        assert!(!reps.contains(&"x^2".to_string()));
    }

    #[test]
    fn acceptor_matches_polyint() {
        for n in 1..=4u32 {
            let spec = exhaustive(n, 2, false);
            let acc = Acceptor::new(n as usize, 2);
            let mut walk = TupleWalk::new(&spec, 0, spec.outer_len());
            let mut seen = 0;
            while walk.advance() {
                seen += 1;
                let c = walk.current();
                let big: Vec<BigInt> = c.iter().map(|&x| BigInt::from(x)).collect();
                let poly = IntPolynomial { coeffs: big };
                let expect = poly.is_primitive() && polyint::is_irreducible(&poly).unwrap();
                assert_eq!(acc.accept(c), expect, "{poly}");
            }
            assert_eq!(seen as u128, spec.tuple_count());
        }
    }

    #[test]
    fn small_counts() {
        let r = count_irreducible(1, 1, &Limits::default()).unwrap();
        assert_eq!(r.count, 6);
        let c = count_coprime_tuples(2, 1, &Limits::default()).unwrap();
        assert_eq!(c.count, 8);
        assert!(count_coprime_tuples(1, 3, &Limits::default()).is_err());
    }

    #[test]
    fn budget_refusal_reports_requirement() {
        let limits = Limits {
            max_tuples: 1000,
            ..Limits::default()
        };
        match run_exhaustive(&exhaustive(2, 10, false), &AccumulateConfig::default(), 4, &limits) {
            Err(Error::Budget { required, .. }) => assert_eq!(required, (10 * 21 * 21).to_string()),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn xsize_stable_lift() {
        let config = AccumulateConfig {
            profiles: vec![
                SplittingProfile::rational(),
                SplittingProfile::quadratic(-7).unwrap(),
                SplittingProfile::quadratic(5).unwrap(),
            ],
            ..Default::default()
        };
        // 2x^2 + 2x + 1... e = gcd(2, 2) = 2 for 1 + 2x + 2x^2 (disc 4 - 8 = -4).
        let rep = polyint::normalize(&[1, 2, 2].map(BigInt::from)).unwrap();
        let acc = accumulate([rep], &config).unwrap();
        assert_eq!(acc.e_histogram, BTreeMap::from([(2, 1)]));
        assert_eq!(acc.xsize_histograms["rational"], BTreeMap::from([(1, 1)]));
        assert_eq!(acc.xsize_histograms["quadratic:-7"], BTreeMap::from([(2, 1)]));
        assert_eq!(acc.xsize_histograms["quadratic:5"], BTreeMap::from([(1, 1)]));
        // x^2 + x + 2 generates Q(sqrt(-7)): exceptional for that profile only.
        let rep = polyint::normalize(&[2, 1, 1].map(BigInt::from)).unwrap();
        let acc = accumulate([rep], &config).unwrap();
        assert_eq!(acc.exceptional_counts["quadratic:-7"], 1);
        assert_eq!(acc.exceptional_counts["quadratic:5"], 0);
        assert!(acc.xsize_histograms["quadratic:-7"].is_empty());
        assert_eq!(acc.xsize_histograms["rational"], BTreeMap::from([(0, 1)]));
        let bad = AccumulateConfig {
            profiles: vec![SplittingProfile::cyclotomic(5).unwrap()],
            ..Default::default()
        };
        assert!(accumulate(std::iter::empty(), &bad).is_err());
    }

    #[test]
    fn mc_is_deterministic() {
        let spec = EnumSpec {
            degree: 2,
            height: 1000,
            mode: Mode::MonteCarlo { samples: 500, seed: 7 },
            monic_only: false,
        };
        let a: Vec<_> = mc_sample(&spec).unwrap().collect();
        let b: Vec<_> = mc_sample(&spec).unwrap().collect();
        assert_eq!(a.len(), 500);
        assert_eq!(a, b);
        let config = AccumulateConfig::default();
        let run = run_montecarlo(&spec, &config).unwrap();
        assert_eq!(run.total_weight, 500);
        let streamed = accumulate(a, &config).unwrap();
        assert_eq!(run.e_histogram, streamed.e_histogram);
        assert!(run.attempts >= 500);
    }
}
