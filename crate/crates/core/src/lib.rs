//! Devariation-adjusted RV association testing for two high-dimensional data
//! views, with GEE-style comparators, a JIVE-model simulator, asymptotic power
//! formulas and a Monte Carlo harness.

pub mod assoc;
pub mod bench;
pub mod error;
pub mod matrix;
pub mod preprocess;
pub mod seeding;
pub mod simgen;
pub mod spectral;
pub mod theory;

pub use error::{DevarError, Result};
pub use matrix::{CovariateMatrix, DataMatrix};
