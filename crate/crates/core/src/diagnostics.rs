//! Diagnostics emitted while parsing and validating documents.

use std::fmt;

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum Severity {
    Error,
    Warning,
}

impl fmt::Display for Severity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Severity::Error => "ERROR",
            Severity::Warning => "WARNING",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Code {
    /// The input is not a JSON object.
    MalformedJson,
    /// V1
    MissingMandatoryUnit,
    /// V2
    UnknownUnit,
    /// V3
    MalformedSequence,
    /// V4
    NoncanonicalInferredPredicate,
    /// V5
    ResultsPrecedence,
    /// V6
    EmptyUnit,
    /// V7
    BadEvidence,
    /// V8
    BadCodeUrl,
    /// V9
    DanglingPredicate,
    /// Two unit keys canonicalize to the same kind; the later one is kept.
    DuplicateUnit,
}

impl Code {
    pub fn name(self) -> &'static str {
        match self {
            Code::MalformedJson => "MALFORMED_JSON",
            Code::MissingMandatoryUnit => "MISSING_MANDATORY_UNIT",
            Code::UnknownUnit => "UNKNOWN_UNIT",
            Code::MalformedSequence => "MALFORMED_SEQUENCE",
            Code::NoncanonicalInferredPredicate => "NONCANONICAL_INFERRED_PREDICATE",
            Code::ResultsPrecedence => "RESULTS_PRECEDENCE",
            Code::EmptyUnit => "EMPTY_UNIT",
            Code::BadEvidence => "BAD_EVIDENCE",
            Code::BadCodeUrl => "BAD_CODE_URL",
            Code::DanglingPredicate => "DANGLING_PREDICATE",
            Code::DuplicateUnit => "DUPLICATE_UNIT",
        }
    }

    pub fn severity(self) -> Severity {
        match self {
            Code::NoncanonicalInferredPredicate
            | Code::ResultsPrecedence
            | Code::EmptyUnit
            | Code::BadCodeUrl
            | Code::DuplicateUnit => Severity::Warning,
            _ => Severity::Error,
        }
    }
}

impl fmt::Display for Code {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Diagnostic {
    pub code: Code,
    pub severity: Severity,
    /// JSON Pointer into the annotation file.
    pub path: String,
    pub message: String,
}

impl Diagnostic {
    pub fn new(code: Code, path: impl Into<String>, message: impl Into<String>) -> Self {
        Diagnostic {
            code,
            severity: code.severity(),
            path: path.into(),
            message: message.into(),
        }
    }

    pub fn is_error(&self) -> bool {
        self.severity == Severity::Error
    }
}

impl fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} {} {}: {}", self.severity, self.code, self.path, self.message)
    }
}

pub fn has_errors(diagnostics: &[Diagnostic]) -> bool {
    diagnostics.iter().any(Diagnostic::is_error)
}

/// Builds JSON Pointer strings (RFC 6901) one segment at a time.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Pointer(String);

impl Pointer {
    pub fn root() -> Self {
        Pointer(String::new())
    }

    pub fn key(&self, segment: &str) -> Pointer {
        let escaped = segment.replace('~', "~0").replace('/', "~1");
        Pointer(format!("{}/{}", self.0, escaped))
    }

    pub fn index(&self, i: usize) -> Pointer {
        Pointer(format!("{}/{}", self.0, i))
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for Pointer {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}
