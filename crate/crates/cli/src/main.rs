mod commands;
mod report;

use std::process::ExitCode;
use std::time::Instant;

use arithstat::{Error, Limits};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

#[derive(Parser, Debug, Serialize)]
#[command(name = "arithstat", version, about = "Certified densities and empirical checks for bounded-height algebraic numbers")]
struct Cli {
    #[command(flatten)]
    global: Global,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug, Serialize, Clone)]
pub struct Global {
    /// Output format.
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    format: Format,
    /// Worker threads for enumeration and censuses.
    #[arg(long, global = true, env = "ARITHSTAT_THREADS")]
    threads: Option<usize>,
    /// Include wall-clock timings (reports are otherwise byte-identical across runs).
    #[arg(long, global = true)]
    timings: bool,
    /// Budget: coefficient tuples an exhaustive enumeration may visit.
    #[arg(long, global = true)]
    max_tuples: Option<u128>,
    /// Budget: largest prime cutoff for certified products.
    #[arg(long, global = true)]
    max_prime_cutoff: Option<u64>,
    /// Budget: polynomials a finite-field census may visit.
    #[arg(long, global = true)]
    max_census: Option<u128>,
    /// Budget: largest |d_K| for class-group construction.
    #[arg(long, global = true)]
    max_abs_disc: Option<u64>,
}

impl Global {
    pub fn limits(&self) -> Limits {
        let d = Limits::default();
        Limits {
            max_tuples: self.max_tuples.unwrap_or(d.max_tuples),
            max_prime_cutoff: self.max_prime_cutoff.unwrap_or(d.max_prime_cutoff),
            max_census: self.max_census.unwrap_or(d.max_census),
            max_abs_disc: self.max_abs_disc.unwrap_or(d.max_abs_disc),
        }
    }
}

#[derive(ValueEnum, Debug, Clone, Copy, Serialize, PartialEq, Eq)]
#[serde(rename_all = "lowercase")]
enum Format {
    Json,
    Csv,
}

#[derive(Subcommand, Debug, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Command {
    /// Local factors alpha_p, beta_p and the ratio zeta(n+1)/zeta(n).
    Constants(commands::ConstantsArgs),
    /// Density of e(gamma) = k (gcd of the non-constant coefficients).
    DensityE(commands::DensityArgs),
    /// Density of the ring O_K[gamma] ∩ K being determined by k.
    DensityRing(commands::DensityArgs),
    /// Certified coefficients a_t = P[|X(K, gamma)| = t] of the splitting generating function.
    DensityXsize(commands::XsizeArgs),
    /// Mean, variance and moments of |X(K, gamma)|, each by two methods.
    Moments(commands::MomentsArgs),
    /// Certified comparisons a_t vs a_{t+1}, a_{t+lcm(1..d)}, a_{t+d} with predicted thresholds.
    Monotonicity(commands::MonotonicityArgs),
    /// Exhaustive or Monte-Carlo enumeration with empirical statistics.
    Enumerate(commands::EnumerateArgs),
    /// Exact counts of irreducible polynomials or coprime tuples against their main terms.
    Counts(commands::CountsArgs),
    /// Reduced forms and class group of a negative fundamental discriminant.
    QuadClass(commands::QuadClassArgs),
    /// Primes below N whose prime ideals fail to be t-torsion, and the resulting density.
    QuadTorsion(commands::QuadTorsionArgs),
    /// Character products f_n, g_n and torsion densities for t = 1, 2.
    QuadProducts(commands::QuadProductsArgs),
    /// Exact census of monic polynomials of degree m over F_p by factorization pattern.
    FactorCensus(commands::FactorCensusArgs),
    /// Limiting proportion with i distinct irreducible factors as p grows.
    FactorLimit(commands::FactorLimitArgs),
    /// Splitting of p in Q(alpha) for sampled monic integer polynomials, read off mod p.
    SplitSample(commands::SplitSampleArgs),
    /// Run every acceptance check; exit 1 on any failure.
    Verify(commands::VerifyArgs),
}

fn exit_code(e: &Error) -> u8 {
    match e {
        Error::Budget { .. } | Error::ToleranceUnreachable { .. } => 3,
        Error::Consistency(_) => 1,
        Error::Domain(_) | Error::Io(_) | Error::Json(_) => 2,
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let start = Instant::now();
    let pool = match rayon::ThreadPoolBuilder::new()
        .num_threads(cli.global.threads.unwrap_or(0))
        .build()
    {
        Ok(p) => p,
        Err(e) => {
            eprintln!("error: thread pool: {e}");
            return ExitCode::from(2);
        }
    };
    let config = serde_json::to_value(&cli).expect("config serializes");
    let result = pool.install(|| commands::execute(&cli.command, &cli.global, config));
    match result {
        Ok((mut report, failed)) => {
            if cli.global.timings {
                report.timings = Some(start.elapsed().as_secs_f64());
            }
            for w in &report.warnings {
                eprintln!("warning: {w}");
            }
            let out = match cli.global.format {
                Format::Json => report.to_json(),
                Format::Csv => report.to_csv(),
            };
            print!("{out}");
            if failed {
                ExitCode::from(1)
            } else {
                ExitCode::SUCCESS
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}
