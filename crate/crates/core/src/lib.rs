//! Integer-shadow verification of the arithmetic behind the Hodge groups of
//! superelliptic Jacobians `y^q = f(x)`, `q = p^r`.
//!
//! - [`unit_group`]: `(Z/qZ)^*`, the subgroups `<±a>`, `b_max`, coprime ranges.
//! - [`hodge_data`]: multiplicities `n_a`, the step function `H = 4h`, dimensions.
//! - [`criteria`]: the hypotheses (A), (B), (C) and coprime witnesses.
//! - [`lemma_engine`]: decision procedure and certificates for the even-function
//!   rigidity lemma, with an independent threshold oracle.
//! - [`galois_orbits`]: pair orbits, good pairs, CM types.
//! - [`report`]: the JSON/CSV report model shared with the CLI.

pub mod cli;
pub mod criteria;
pub mod error;
pub mod galois_orbits;
pub mod hodge_data;
pub mod lemma_engine;
pub mod report;
pub mod unit_group;

pub use error::{Error, Result};
pub use hodge_data::{dimension_set, DimensionSet, HodgeProfile};
pub use lemma_engine::{decide_even_lemma, LemmaCertificate, StepTag, Verdict};
pub use report::VerificationReport;
pub use unit_group::{HalfRange, Unit, UnitGroup};
