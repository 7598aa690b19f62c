//! Fractional repetition (FR) codes: construction, validation, repair
//! analysis, distance bounds, an MDS outer code and a repair simulator.

pub mod bounds;
pub mod code;
pub mod constructions;
pub mod error;
pub mod export;
pub mod field;
pub mod flow;
pub mod mds;
pub mod metrics;
pub mod recovery;
pub mod sim;
pub mod subsets;

pub use code::{validate, DssParams, FrCode, ValidationReport, Violation};
pub use error::{Error, Result};
pub use subsets::Budget;
