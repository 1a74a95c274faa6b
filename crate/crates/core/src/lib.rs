//! Exact spectra, rearrangement remainders and bijection probes for the
//! half-space graph on the hypercube `{-1, 1}^n`.

pub mod combinatorics;
pub mod error;
pub mod exact;
pub mod oracle;
pub mod remainder;
pub mod report;
pub mod spectrum;
pub mod tensor;
pub mod verify;

pub use error::{Error, Result};
