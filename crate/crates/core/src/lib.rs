//! Contribution annotations: parsing, validation, triples, storage and
//! cross-paper analytics.

pub mod analytics;
pub mod diagnostics;
pub mod error;
pub mod export;
pub mod ingest;
pub mod model;
pub mod store;
pub mod triplify;
pub mod validate;

pub use analytics::{compare, stats, ComparisonTable, StatsOptions, StatsReport};
pub use diagnostics::{Code, Diagnostic, Severity};
pub use error::{Error, Result};
pub use export::{export, Format};
pub use ingest::{parse_document, parse_lenient};
pub use model::{AnnotationDocument, InfoUnit, InfoUnitKind, SequenceNode, Triple, UnitKind};
pub use store::{ContributionGraph, Filter};
pub use triplify::{flatten, flatten_with, unflatten};
pub use validate::{validate, validate_with, Profile};
