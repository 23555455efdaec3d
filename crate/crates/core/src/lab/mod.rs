//! Empirical verification of the quantitative claims about duality maps,
//! moduli, conjugates and envelopes.

pub mod checks;
pub mod fit;
pub mod sampling;
pub mod suite;

pub use checks::*;
pub use fit::PowerFit;
pub use suite::{all_passed, available_checks, run_suite, SuiteConfig, GROUPS};
