use crate::error::{Error, Result};

/// Up-front resource caps. Refusals report the value that would have succeeded.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Limits {
    /// Coefficient tuples visited by an exhaustive enumeration.
    pub max_tuples: u128,
    /// Largest prime cutoff N any certified product may use.
    pub max_prime_cutoff: u64,
    /// Polynomials visited by an exact finite-field census.
    pub max_census: u128,
    /// Largest |d_K| for class-group construction.
    pub max_abs_disc: u64,
}

impl Default for Limits {
    fn default() -> Self {
        Limits {
            max_tuples: 2_000_000_000,
            max_prime_cutoff: 1 << 27,
            max_census: 50_000_000,
            max_abs_disc: 100_000_000,
        }
    }
}

impl Limits {
    pub(crate) fn check_tuples(&self, what: &str, required: u128) -> Result<()> {
        if required > self.max_tuples {
            return Err(Error::Budget {
                what: what.to_string(),
                required: required.to_string(),
                limit: self.max_tuples.to_string(),
            });
        }
        Ok(())
    }

    pub(crate) fn check_census(&self, required: u128) -> Result<()> {
        if required > self.max_census {
            return Err(Error::Budget {
                what: "finite-field census".into(),
                required: required.to_string(),
                limit: self.max_census.to_string(),
            });
        }
        Ok(())
    }

    pub(crate) fn check_disc(&self, d: i64) -> Result<()> {
        if d.unsigned_abs() > self.max_abs_disc {
            return Err(Error::Budget {
                what: "class group |d_K|".into(),
                required: d.unsigned_abs().to_string(),
                limit: self.max_abs_disc.to_string(),
            });
        }
        Ok(())
    }
}
