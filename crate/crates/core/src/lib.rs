//! Non-malleable codes against bit-tampering and split-state adversaries.
//!
//! The crate builds the probabilistic inner code, a Reed–Solomon based linear
//! error-correcting secret sharing scheme, seeded permutations, the
//! concatenated bit-tampering code, and seedless non-malleable extractor
//! tables, together with exact and Monte-Carlo verifiers for each of them.

pub mod bits;
pub mod cli;
pub mod concat;
pub mod dist;
pub mod error;
pub mod inner;
pub mod lecss;
pub mod nmext;
pub mod perm;
pub mod report;
pub mod rng;
pub mod scheme;
pub mod simulator;
pub mod symbol;
pub mod tamper;

pub use bits::{hamming_distance, BitWord};
pub use dist::{confidence_radius, empirical_dist, statistical_distance, FiniteDist};
pub use error::{Error, Result};
pub use report::PropertyReport;
pub use rng::RngSeed;
pub use symbol::{copy_symbol, Symbol};
