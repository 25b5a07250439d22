//! Certified densities and empirical censuses for the rings `O_K[gamma] ∩ K`
//! attached to random algebraic numbers of bounded height.
//!
//! Closed forms are evaluated as [`exact::CertifiedInterval`]s of exact
//! rationals; every one of them has an empirical counterpart (exhaustive or
//! Monte-Carlo enumeration, class-group scans, finite-field censuses).

pub mod acceptance;
pub mod density;
pub mod error;
pub mod exact;
pub mod factorstats;
pub mod limits;
pub mod polyint;
pub mod quadfield;
pub mod sampler;

pub use error::{Error, Result};
pub use exact::{CertifiedInterval, Rational};
pub use limits::Limits;
