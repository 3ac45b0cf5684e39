//! Static analysis for AJML, a small AspectJ-like language: parsing,
//! name resolution, pointcut matching, advice flow analysis, and an
//! invasiveness-pattern classifier, plus a weaving interpreter that
//! serves as a dynamic oracle for the static results.

pub mod classifier;
pub mod flowanalysis;
pub mod model;
pub mod oracle;
pub mod pointcuts;
pub mod span;
pub mod syntax;

#[cfg(feature = "testing")]
pub mod testing;

pub use classifier::{analyze_model, Analysis, ClassificationReport, InvasivenessPattern};
pub use model::{build_model, ProgramModel};
pub use syntax::parse_source;
