use std::path::PathBuf;
use std::time::Instant;

use arithstat::density::{self, Comparison, SplittingProfile};
use arithstat::exact::{self, parse_rational, rat};
use arithstat::factorstats;
use arithstat::quadfield::{self, PrimeClass};
use arithstat::sampler::{self, AccumulateConfig, EnumSpec, Mode, StatAccumulator};
use arithstat::{acceptance, Error, Limits, Rational, Result};
use clap::{Args, ValueEnum};
use serde::Serialize;
use serde_json::Value;

use crate::report::{put_interval, rational, row, Report};
use crate::{Command, Global};

const DEFAULT_TOL: &str = "1e-8";

fn tol(s: &str) -> Result<Rational> {
    let t = parse_rational(s)?;
    if t <= rat(0, 1) {
        return Err(Error::Domain(format!("tolerance must be positive, got {s}")));
    }
    Ok(t)
}

#[derive(Args, Debug, Serialize)]
pub struct ConstantsArgs {
    /// Degree n >= 2.
    #[arg(long)]
    n: u32,
    /// Primes whose local factors are listed (repeat or comma-separate).
    #[arg(long, value_delimiter = ',', default_values_t = vec![2u64, 3, 5, 7])]
    p: Vec<u64>,
    /// Width bound for the certified zeta ratio.
    #[arg(long, default_value = DEFAULT_TOL)]
    tol: String,
}

#[derive(Args, Debug, Serialize)]
pub struct DensityArgs {
    #[arg(long)]
    n: u32,
    /// Rows k = 1..=K.
    #[arg(long, default_value_t = 10)]
    k: u64,
    #[arg(long, default_value = DEFAULT_TOL)]
    tol: String,
}

#[derive(Args, Debug, Serialize)]
pub struct XsizeArgs {
    /// rational | quadratic:<d> | cyclotomic:<m> | table:<deg>:<galois 0|1>:p=r,...,*=r
    #[arg(long, default_value = "rational")]
    profile: String,
    #[arg(long)]
    n: u32,
    /// Rows t = 0..=tmax.
    #[arg(long, default_value_t = 6)]
    tmax: usize,
    #[arg(long, default_value = DEFAULT_TOL)]
    tol: String,
    /// Fixed prime cutoff instead of growing it until the tolerance is met.
    #[arg(long)]
    cutoff: Option<u64>,
}

#[derive(Args, Debug, Serialize)]
pub struct MomentsArgs {
    #[arg(long, default_value = "rational")]
    profile: String,
    #[arg(long)]
    n: u32,
    /// Highest moment, at most 4.
    #[arg(long, default_value_t = 4)]
    s: u32,
    #[arg(long, default_value = "1e-6")]
    tol: String,
}

#[derive(Args, Debug, Serialize)]
pub struct MonotonicityArgs {
    #[arg(long, default_value = "rational")]
    profile: String,
    #[arg(long)]
    n: u32,
    #[arg(long, default_value_t = 10)]
    tmax: usize,
    #[arg(long, default_value = "1e-6")]
    tol: String,
}

#[derive(Args, Debug, Serialize)]
pub struct EnumerateArgs {
    /// Degree of the minimal polynomials.
    #[arg(long)]
    n: u32,
    /// Coefficient height bound H.
    #[arg(long)]
    height: u64,
    /// Only monic polynomials (algebraic integers).
    #[arg(long)]
    monic: bool,
    /// Monte-Carlo sample count; exhaustive when absent.
    #[arg(long, requires = "seed")]
    samples: Option<u64>,
    /// Seed for Monte-Carlo sampling.
    #[arg(long)]
    seed: Option<u64>,
    /// Splitting profiles for |X(K, gamma)| histograms (rational or quadratic).
    #[arg(long, value_delimiter = ',')]
    profiles: Vec<String>,
    /// Squarefree m; counts discriminants equal to m times a square.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    disc_classes: Vec<i64>,
    /// Primes at which the number of distinct factors mod p is recorded.
    #[arg(long, value_delimiter = ',')]
    split_primes: Vec<u64>,
    /// Work blocks of an exhaustive run.
    #[arg(long, default_value_t = 64)]
    blocks: u64,
    /// Append-only run log; finished blocks are skipped when the run is repeated.
    #[arg(long)]
    log: Option<PathBuf>,
    /// Tolerance of the limiting densities listed next to the empirical fractions.
    #[arg(long, default_value = "1e-6")]
    tol: String,
}

#[derive(ValueEnum, Debug, Clone, Copy, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum CountKind {
    Irreducible,
    Coprime,
}

#[derive(Args, Debug, Serialize)]
pub struct CountsArgs {
    #[arg(long, value_enum)]
    kind: CountKind,
    /// Degree for irreducible counts, tuple length for coprime counts.
    #[arg(long)]
    n: u32,
    /// Heights to count at (repeat or comma-separate).
    #[arg(long, value_delimiter = ',', required = true)]
    height: Vec<u64>,
}

#[derive(Args, Debug, Serialize)]
pub struct QuadClassArgs {
    /// Negative fundamental discriminant.
    #[arg(long, allow_hyphen_values = true)]
    d: i64,
}

#[derive(Args, Debug, Serialize)]
pub struct QuadTorsionArgs {
    #[arg(long, allow_hyphen_values = true)]
    d: i64,
    /// Torsion exponent t >= 1.
    #[arg(long, default_value_t = 1)]
    t: u64,
    /// List violating primes below this bound.
    #[arg(long, default_value_t = 100)]
    cutoff: u64,
    /// Degree n >= 2 for the density.
    #[arg(long, default_value_t = 2)]
    n: u32,
    #[arg(long, default_value = "1e-6")]
    tol: String,
}

#[derive(Args, Debug, Serialize)]
pub struct QuadProductsArgs {
    #[arg(long, allow_hyphen_values = true)]
    d: i64,
    #[arg(long, default_value_t = 2)]
    n: u32,
    #[arg(long, default_value = "1e-6")]
    tol: String,
}

#[derive(Args, Debug, Serialize)]
pub struct FactorCensusArgs {
    /// Degree m.
    #[arg(long)]
    m: u32,
    /// Prime p > m.
    #[arg(long)]
    p: u64,
}

#[derive(Args, Debug, Serialize)]
pub struct FactorLimitArgs {
    #[arg(long)]
    m: u32,
}

#[derive(Args, Debug, Serialize)]
pub struct SplitSampleArgs {
    #[arg(long)]
    m: u32,
    #[arg(long)]
    p: u64,
    #[arg(long)]
    height: u64,
    #[arg(long)]
    samples: u64,
    #[arg(long)]
    seed: u64,
}

#[derive(Args, Debug, Serialize)]
pub struct VerifyArgs {
    /// Fail when the whole run takes longer than this.
    #[arg(long, default_value_t = 30.0)]
    budget_minutes: f64,
    /// Run only these check ids (repeat or comma-separate).
    #[arg(long, value_delimiter = ',')]
    only: Vec<u32>,
}

/// Runs a command; the flag is true when the command itself reports failure.
pub fn execute(cmd: &Command, g: &Global, config: Value) -> Result<(Report, bool)> {
    let limits = g.limits();
    let name = config
        .get("command")
        .and_then(|c| c.as_object())
        .and_then(|o| o.keys().next().cloned())
        .unwrap_or_default();
    let mut rep = Report::new(&name, config);
    let failed = match cmd {
        Command::Constants(a) => constants(a, &limits, &mut rep)?,
        Command::DensityE(a) => density_e(a, false, &mut rep)?,
        Command::DensityRing(a) => density_e(a, true, &mut rep)?,
        Command::DensityXsize(a) => density_xsize(a, &limits, &mut rep)?,
        Command::Moments(a) => moments(a, &limits, &mut rep)?,
        Command::Monotonicity(a) => monotonicity(a, &limits, &mut rep)?,
        Command::Enumerate(a) => enumerate(a, &limits, &mut rep)?,
        Command::Counts(a) => counts(a, &limits, &mut rep)?,
        Command::QuadClass(a) => quad_class(a, &limits, &mut rep)?,
        Command::QuadTorsion(a) => quad_torsion(a, &limits, &mut rep)?,
        Command::QuadProducts(a) => quad_products(a, &limits, &mut rep)?,
        Command::FactorCensus(a) => factor_census(a, &limits, &mut rep)?,
        Command::FactorLimit(a) => factor_limit(a, &mut rep)?,
        Command::SplitSample(a) => split_sample(a, &mut rep)?,
        Command::Verify(a) => verify(a, &mut rep),
    };
    Ok((rep, failed))
}

fn constants(a: &ConstantsArgs, limits: &Limits, rep: &mut Report) -> Result<bool> {
    for &p in &a.p {
        if !exact::is_prime(p) {
            return Err(Error::Domain(format!("{p} is not prime")));
        }
        let (alpha, beta) = exact::local_factors(p, a.n)?;
        let mut r = row();
        r.insert("quantity".into(), "local_factors".into());
        r.insert("p".into(), p.into());
        r.insert("alpha".into(), rational(&alpha));
        r.insert("beta".into(), rational(&beta));
        r.insert("alpha_times_one_plus_beta".into(), rational(&(&alpha * (Rational::from_integer(1.into()) + &beta))));
        rep.rows.push(r);
    }
    let z = exact::zeta_ratio_detailed(a.n, &tol(&a.tol)?, limits)?;
    let mut r = row();
    r.insert("quantity".into(), "zeta_ratio".into());
    r.insert("cutoff".into(), z.cutoff.into());
    put_interval(&mut r, "value", &z.interval);
    rep.rows.push(r);
    Ok(false)
}

fn density_e(a: &DensityArgs, ring: bool, rep: &mut Report) -> Result<bool> {
    let t = tol(&a.tol)?;
    if a.k == 0 {
        return Err(Error::Domain("k must be at least 1".into()));
    }
    let mut total = None::<arithstat::CertifiedInterval>;
    for k in 1..=a.k {
        let iv = if ring {
            density::prob_ring_equals(k, a.n, &t)?
        } else {
            density::prob_e(k, a.n, &t)?
        };
        total = Some(match total {
            None => iv.clone(),
            Some(s) => s.add(&iv),
        });
        let mut r = row();
        r.insert("k".into(), k.into());
        put_interval(&mut r, "density", &iv);
        rep.rows.push(r);
    }
    if !ring {
        let rest = density::totient_series_tail(a.n, a.k)?;
        let mut r = row();
        r.insert("k".into(), format!("> {}", a.k).into());
        put_interval(&mut r, "density", &rest);
        rep.rows.push(r);
        let sum = total.expect("k >= 1").add(&rest);
        if !sum.contains(&rat(1, 1)) {
            rep.warnings.push(format!(
                "enclosure of the total mass [{}, {}] misses 1",
                sum.decimal_lo(12),
                sum.decimal_hi(12)
            ));
        }
    }
    Ok(false)
}

fn density_xsize(a: &XsizeArgs, limits: &Limits, rep: &mut Report) -> Result<bool> {
    let profile = SplittingProfile::parse(&a.profile)?;
    let t = tol(&a.tol)?;
    let table = match a.cutoff {
        Some(c) => {
            if c > limits.max_prime_cutoff {
                return Err(Error::Budget {
                    what: "prime cutoff".into(),
                    required: c.to_string(),
                    limit: limits.max_prime_cutoff.to_string(),
                });
            }
            density::coefficient_table_at(&profile, a.n, a.tmax, c, &t)?
        }
        None => density::coefficient_table(&profile, a.n, a.tmax, &t, limits)?,
    };
    if table.max_width() > t {
        rep.warnings.push(format!(
            "cutoff {} leaves interval width {} above the tolerance",
            table.cutoff,
            exact::decimal_ceil(&table.max_width(), 3)
        ));
    }
    for (i, iv) in table.intervals.iter().enumerate() {
        let mut r = row();
        r.insert("profile".into(), profile.id.clone().into());
        r.insert("t".into(), i.into());
        r.insert("cutoff".into(), table.cutoff.into());
        put_interval(&mut r, "a", iv);
        rep.rows.push(r);
    }
    Ok(false)
}

fn moments(a: &MomentsArgs, limits: &Limits, rep: &mut Report) -> Result<bool> {
    let profile = SplittingProfile::parse(&a.profile)?;
    let t = tol(&a.tol)?;
    if !(1..=4).contains(&a.s) {
        return Err(Error::Domain(format!("moment order must be in 1..=4, got {}", a.s)));
    }
    let mv = density::expectation_variance(&profile, a.n, &t, limits)?;
    for (name, iv) in [("expectation", &mv.expectation), ("variance", &mv.variance)] {
        let mut r = row();
        r.insert("quantity".into(), name.into());
        r.insert("method".into(), "closed_form".into());
        r.insert("cutoff".into(), mv.cutoff.into());
        put_interval(&mut r, "value", iv);
        rep.rows.push(r);
    }
    for s in 1..=a.s {
        let m = density::moment(&profile, a.n, s, &t, limits)?;
        for (method, iv) in [("series", &m.series), ("combinatorial", &m.combinatorial)] {
            let mut r = row();
            r.insert("quantity".into(), format!("moment_{s}").into());
            r.insert("method".into(), method.into());
            r.insert("cutoff".into(), m.cutoff.into());
            put_interval(&mut r, "value", iv);
            rep.rows.push(r);
        }
    }
    Ok(false)
}

fn cmp_name(c: Comparison) -> &'static str {
    match c {
        Comparison::Greater => ">",
        Comparison::Less => "<",
        Comparison::Undecided => "?",
    }
}

fn monotonicity(a: &MonotonicityArgs, limits: &Limits, rep: &mut Report) -> Result<bool> {
    let profile = SplittingProfile::parse(&a.profile)?;
    let m = density::monotonicity_scan(&profile, a.n, a.tmax, &tol(&a.tol)?, limits)?;
    let decay: std::collections::BTreeMap<usize, f64> = m.decay.iter().copied().collect();
    for r0 in &m.rows {
        let mut r = row();
        r.insert("t".into(), r0.t.into());
        put_interval(&mut r, "a", &r0.a_t);
        r.insert("vs_next".into(), cmp_name(r0.vs_next).into());
        r.insert("vs_lcm".into(), cmp_name(r0.vs_lcm).into());
        r.insert("lcm_predicted".into(), (r0.t as i64 >= m.general_threshold).into());
        r.insert("vs_degree".into(), r0.vs_degree.map(cmp_name).into());
        r.insert(
            "degree_predicted".into(),
            m.galois_threshold.map(|g| r0.t as i64 >= g).into(),
        );
        r.insert("decay_exponent".into(), decay.get(&r0.t).copied().into());
        rep.rows.push(r);
        if r0.vs_lcm == Comparison::Less && r0.t as i64 >= m.general_threshold {
            rep.warnings.push(format!("a_{} < a_{{{}+{}}} beyond the predicted threshold", r0.t, r0.t, m.lcm));
        }
    }
    Ok(false)
}

fn enumerate(a: &EnumerateArgs, limits: &Limits, rep: &mut Report) -> Result<bool> {
    let mode = match a.samples {
        Some(samples) => Mode::MonteCarlo {
            samples,
            seed: a.seed.ok_or_else(|| Error::Domain("--samples needs --seed".into()))?,
        },
        None => Mode::Exhaustive,
    };
    let spec = EnumSpec {
        degree: a.n,
        height: a.height,
        mode,
        monic_only: a.monic,
    };
    let profiles = a
        .profiles
        .iter()
        .map(|s| SplittingProfile::parse(s))
        .collect::<Result<Vec<_>>>()?;
    let config = AccumulateConfig {
        profiles: profiles.clone(),
        disc_classes: a.disc_classes.clone(),
        split_primes: a.split_primes.clone(),
    };
    let acc = match (mode, &a.log) {
        (Mode::Exhaustive, Some(log)) => sampler::run_exhaustive_logged(&spec, &config, a.blocks, limits, log)?,
        (Mode::Exhaustive, None) => sampler::run_exhaustive(&spec, &config, a.blocks, limits)?,
        (Mode::MonteCarlo { .. }, _) => sampler::run_montecarlo(&spec, &config)?,
    };
    enumerate_rows(a, &profiles, &acc, limits, rep)?;
    Ok(false)
}

fn enumerate_rows(a: &EnumerateArgs, profiles: &[SplittingProfile], acc: &StatAccumulator, limits: &Limits, rep: &mut Report) -> Result<()> {
    let t = tol(&a.tol)?;
    let predict = a.n >= 2 && !a.monic;
    let mut r = row();
    r.insert("statistic".into(), "total".into());
    r.insert("count".into(), acc.total_weight.into());
    r.insert("attempts".into(), acc.attempts.into());
    rep.rows.push(r);
    for (&k, &c) in &acc.e_histogram {
        let mut r = row();
        r.insert("statistic".into(), "e".into());
        r.insert("key".into(), k.to_string().into());
        r.insert("count".into(), c.into());
        r.insert("fraction".into(), acc.e_fraction(k).into());
        if predict {
            put_interval(&mut r, "limit", &density::prob_e(k, a.n, &t)?);
        }
        rep.rows.push(r);
    }
    for p in profiles {
        let hist = acc.xsize_histograms.get(&p.id).cloned().unwrap_or_default();
        let t_top = hist.keys().max().copied().unwrap_or(0) as usize;
        let table = if predict {
            Some(density::coefficient_table(p, a.n, t_top, &t, limits)?)
        } else {
            None
        };
        for (&x, &c) in &hist {
            let mut r = row();
            r.insert("statistic".into(), format!("xsize:{}", p.id).into());
            r.insert("key".into(), x.to_string().into());
            r.insert("count".into(), c.into());
            r.insert("fraction".into(), acc.xsize_fraction(&p.id, x).into());
            if let Some(tb) = &table {
                put_interval(&mut r, "limit", &tb.intervals[x as usize]);
            }
            rep.rows.push(r);
        }
        if let Some(&c) = acc.exceptional_counts.get(&p.id) {
            let mut r = row();
            r.insert("statistic".into(), format!("exceptional:{}", p.id).into());
            r.insert("count".into(), c.into());
            rep.rows.push(r);
        }
    }
    for (&m, &c) in &acc.disc_squareclass_counts {
        let mut r = row();
        r.insert("statistic".into(), "disc_class".into());
        r.insert("key".into(), m.to_string().into());
        r.insert("count".into(), c.into());
        r.insert("fraction".into(), (c as f64 / acc.total_weight.max(1) as f64).into());
        rep.rows.push(r);
    }
    for (&p, h) in &acc.splitting_histogram {
        for (&i, &c) in h {
            let mut r = row();
            r.insert("statistic".into(), format!("split:{p}").into());
            r.insert("key".into(), i.to_string().into());
            r.insert("count".into(), c.into());
            r.insert("fraction".into(), (c as f64 / acc.total_weight.max(1) as f64).into());
            rep.rows.push(r);
        }
    }
    Ok(())
}

fn counts(a: &CountsArgs, limits: &Limits, rep: &mut Report) -> Result<bool> {
    for &h in &a.height {
        let c = match a.kind {
            CountKind::Irreducible => sampler::count_irreducible(a.n, h, limits)?,
            CountKind::Coprime => sampler::count_coprime_tuples(a.n, h, limits)?,
        };
        let mut r = row();
        r.insert("height".into(), h.into());
        r.insert("count".into(), c.count.to_string().into());
        put_interval(&mut r, "main_term", &c.predicted);
        r.insert("relative_deviation".into(), c.relative_deviation().into());
        rep.rows.push(r);
    }
    Ok(false)
}

fn quad_class(a: &QuadClassArgs, limits: &Limits, rep: &mut Report) -> Result<bool> {
    let table = quadfield::reduced_forms(a.d, limits)?;
    for (i, f) in table.forms.iter().enumerate() {
        let mut r = row();
        r.insert("d".into(), a.d.into());
        r.insert("h".into(), table.h().into());
        r.insert("a".into(), f.a.to_string().into());
        r.insert("b".into(), f.b.to_string().into());
        r.insert("c".into(), f.c.to_string().into());
        r.insert("order".into(), table.order(i).into());
        rep.rows.push(r);
    }
    Ok(false)
}

fn quad_torsion(a: &QuadTorsionArgs, limits: &Limits, rep: &mut Report) -> Result<bool> {
    let table = quadfield::reduced_forms(a.d, limits)?;
    let violators = quadfield::t_torsion_violators(a.d, a.t, a.cutoff, &table)?;
    for &p in &violators {
        let order = match quadfield::prime_class_order(a.d, p, &table)? {
            PrimeClass::Inert => 1,
            PrimeClass::Order(k) => k,
        };
        let mut r = row();
        r.insert("quantity".into(), "violator".into());
        r.insert("p".into(), p.into());
        r.insert("class_order".into(), order.into());
        rep.rows.push(r);
    }
    let dens = quadfield::torsion_density(a.d, a.t, a.n, &tol(&a.tol)?, limits)?;
    let mut r = row();
    r.insert("quantity".into(), "density".into());
    r.insert("cutoff".into(), dens.cutoff.into());
    put_interval(&mut r, "value", &dens.interval);
    rep.rows.push(r);
    Ok(false)
}

fn quad_products(a: &QuadProductsArgs, limits: &Limits, rep: &mut Report) -> Result<bool> {
    let t = tol(&a.tol)?;
    let f = quadfield::f_n(a.d, a.n, &t, limits)?;
    let g = quadfield::g_n(a.d, a.n, &t, limits)?;
    let t1 = quadfield::torsion_density(a.d, 1, a.n, &t, limits)?;
    let t2 = quadfield::torsion_density(a.d, 2, a.n, &t, limits)?;
    for (name, e) in [("f_n", &f), ("g_n", &g), ("torsion_t1", &t1), ("torsion_t2", &t2)] {
        let mut r = row();
        r.insert("quantity".into(), name.into());
        r.insert("cutoff".into(), e.cutoff.into());
        put_interval(&mut r, "value", &e.interval);
        rep.rows.push(r);
    }
    Ok(false)
}

fn factor_census(a: &FactorCensusArgs, limits: &Limits, rep: &mut Report) -> Result<bool> {
    let c = factorstats::exact_factor_census(a.m, a.p, limits)?;
    for i in 1..=a.m {
        let mut r = row();
        r.insert("i".into(), i.into());
        r.insert("count".into(), c.by_distinct.get(&i).copied().unwrap_or(0).into());
        r.insert("squarefree_count".into(), c.squarefree_by_distinct.get(&i).copied().unwrap_or(0).into());
        r.insert(
            "squarefree_formula".into(),
            factorstats::squarefree_count_formula(a.m, i, a.p)?.to_string().into(),
        );
        r.insert("fraction".into(), rational(&c.fraction(i)));
        r.insert("limit".into(), rational(&factorstats::limit_density(a.m, i)?));
        rep.rows.push(r);
    }
    rep.warnings.extend(
        (1..=a.m)
            .filter(|&i| {
                factorstats::squarefree_count_formula(a.m, i, a.p)
                    .map(|f| f != c.squarefree_by_distinct.get(&i).copied().unwrap_or(0).into())
                    .unwrap_or(true)
            })
            .map(|i| format!("squarefree count for i = {i} disagrees with the closed form")),
    );
    Ok(false)
}

fn factor_limit(a: &FactorLimitArgs, rep: &mut Report) -> Result<bool> {
    for i in 1..=a.m {
        let d = factorstats::limit_density(a.m, i)?;
        let mut r = row();
        r.insert("i".into(), i.into());
        r.insert("limit".into(), rational(&d));
        r.insert("limit_dec".into(), exact::rational_to_f64(&d).into());
        rep.rows.push(r);
    }
    Ok(false)
}

fn split_sample(a: &SplitSampleArgs, rep: &mut Report) -> Result<bool> {
    let s = factorstats::empirical_splitting(a.m, a.p, a.height, a.samples, a.seed)?;
    for i in 1..=a.m {
        let mut r = row();
        r.insert("i".into(), i.into());
        r.insert("count".into(), s.counts.get(&i).copied().unwrap_or(0).into());
        r.insert("fraction".into(), s.fraction(i).into());
        r.insert("limit".into(), rational(&factorstats::limit_density(a.m, i)?));
        rep.rows.push(r);
    }
    if s.skipped > 0 {
        rep.warnings.push(format!(
            "{} of {} samples skipped because p divides the discriminant",
            s.skipped, s.samples
        ));
    }
    Ok(false)
}

fn verify(a: &VerifyArgs, rep: &mut Report) -> bool {
    let start = Instant::now();
    let ids: Vec<u32> = if a.only.is_empty() {
        acceptance::CRITERIA.iter().map(|(i, _)| *i).collect()
    } else {
        a.only.clone()
    };
    let mut failed = false;
    for id in ids {
        let o = acceptance::run(id);
        eprintln!("{o}");
        failed |= !o.passed;
        let mut r = row();
        r.insert("id".into(), o.id.into());
        r.insert("name".into(), o.name.into());
        r.insert("passed".into(), o.passed.into());
        r.insert("detail".into(), o.detail.into());
        rep.rows.push(r);
    }
    let minutes = start.elapsed().as_secs_f64() / 60.0;
    if minutes > a.budget_minutes {
        rep.warnings.push(format!("run took {minutes:.1} min, over the {} min budget", a.budget_minutes));
        failed = true;
    }
    failed
}
