//! Single-server private linear transformation with individual privacy.
//!
//! A client wants `L` independent linear combinations of `D` out of `K`
//! messages held by a server, and requires that the server's posterior
//! probability of any single message being involved stays at `D/K`. This crate
//! builds the client's query, computes the server's answer, recovers the
//! demand, audits the privacy and decodability structure of queries, and
//! evaluates the capacity bounds of the setting.

pub mod audit;
pub mod bounds;
pub mod error;
pub mod field;
pub mod fixtures;
pub mod matrix;
pub mod protocol;
pub mod rng;
pub mod wire;

pub use error::{Error, Result};
pub use field::{FieldElement, PrimeField};
pub use matrix::FqMatrix;

/// Exact rational used for every rate and probability.
pub type Rational = num_rational::Ratio<i64>;
