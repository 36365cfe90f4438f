//! Verification harness for the equivalence of ℓp- and ℓ0-minimization below
//! the analytic threshold `p*(A)`.
//!
//! The crate builds Vandermonde matrices and their augmented variants, computes
//! spark and Gram spectra exactly at desk scale, and checks the threshold
//! claims with exhaustive oracles and seeded kernel sampling.
//!
//! Subset enumeration runs on rayon when the `parallel` feature is enabled
//! (the default); all reductions are ordered so results are identical with or
//! without it.

pub mod analysis;
pub mod config;
pub mod error;
pub mod linalg;
pub mod matgen;
pub mod matrix;
pub mod rng;
pub mod solvers;
pub mod spark;
pub mod spectral;
pub mod subsets;
pub mod suite;

pub use error::{Error, Result};
pub use matrix::DenseMatrix;
pub use subsets::Budget;
