//! Byte-deterministic serializations of triple lists.

use std::fmt::Write as _;
use std::str::FromStr;

use percent_encoding::{utf8_percent_encode, AsciiSet, NON_ALPHANUMERIC};

use crate::error::{Error, Result};
use crate::model::Triple;

pub const DEFAULT_BASE_IRI: &str = "https://example.org/nlpcontrib";

/// Objects longer than this that contain whitespace become literals.
pub const LITERAL_THRESHOLD: usize = 80;

/// Everything but the RFC 3986 unreserved characters.
const SEGMENT: &AsciiSet = &NON_ALPHANUMERIC.remove(b'-').remove(b'.').remove(b'_').remove(b'~');

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    NTriples,
    Csv,
    Jsonl,
}

impl Format {
    pub fn extension(self) -> &'static str {
        match self {
            Format::NTriples => "nt",
            Format::Csv => "csv",
            Format::Jsonl => "jsonl",
        }
    }
}

impl FromStr for Format {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "ntriples" | "n-triples" | "nt" => Ok(Format::NTriples),
            "csv" => Ok(Format::Csv),
            "jsonl" | "ndjson" => Ok(Format::Jsonl),
            _ => Err(Error::UnsupportedFormat(s.to_string())),
        }
    }
}

pub fn export(triples: &[Triple], format: Format) -> Result<Vec<u8>> {
    export_with_base(triples, format, DEFAULT_BASE_IRI)
}

pub fn export_with_base(triples: &[Triple], format: Format, base: &str) -> Result<Vec<u8>> {
    match format {
        Format::NTriples => Ok(to_ntriples(triples, base).into_bytes()),
        Format::Csv => to_csv(triples),
        Format::Jsonl => to_jsonl(triples),
    }
}

pub fn pct_encode(segment: &str) -> String {
    utf8_percent_encode(segment, SEGMENT).to_string()
}

pub fn entity_iri(base: &str, paper_id: &str, label: &str) -> String {
    format!(
        "{}/paper/{}/e/{}",
        base.trim_end_matches('/'),
        pct_encode(paper_id),
        pct_encode(label)
    )
}

pub fn predicate_iri(base: &str, predicate: &str) -> String {
    format!("{}/p/{}", base.trim_end_matches('/'), pct_encode(predicate))
}

/// Clausal objects (long text with whitespace) stay literals.
pub fn is_clausal(object: &str) -> bool {
    object.chars().count() > LITERAL_THRESHOLD && object.contains(char::is_whitespace)
}

pub fn to_ntriples(triples: &[Triple], base: &str) -> String {
    let mut out = String::new();
    for t in triples {
        let object = if is_clausal(&t.object) {
            literal(&t.object)
        } else {
            format!("<{}>", entity_iri(base, &t.paper_id, &t.object))
        };
        let _ = writeln!(
            out,
            "<{}> <{}> {} .",
            entity_iri(base, &t.paper_id, &t.subject),
            predicate_iri(base, &t.predicate),
            object
        );
    }
    out
}

fn literal(text: &str) -> String {
    let mut out = String::with_capacity(text.len() + 2);
    out.push('"');
    for c in text.chars() {
        match c {
            '"' => out.push_str("\\\""),
            '\\' => out.push_str("\\\\"),
            '\n' => out.push_str("\\n"),
            '\r' => out.push_str("\\r"),
            '\t' => out.push_str("\\t"),
            c if (c as u32) < 0x20 || c as u32 == 0x7f => {
                let _ = write!(out, "\\u{:04X}", c as u32);
            }
            c => out.push(c),
        }
    }
    out.push('"');
    out
}

pub const CSV_HEADER: [&str; 5] = ["paper_id", "unit", "subject", "predicate", "object"];

pub fn to_csv(triples: &[Triple]) -> Result<Vec<u8>> {
    let mut writer = csv::Writer::from_writer(Vec::new());
    writer.write_record(CSV_HEADER)?;
    for t in triples {
        writer.write_record([
            t.paper_id.as_str(),
            t.unit.canonical.name(),
            &t.subject,
            &t.predicate,
            &t.object,
        ])?;
    }
    writer
        .into_inner()
        .map_err(|e| Error::Csv(e.into_error().into()))
}

pub fn to_jsonl(triples: &[Triple]) -> Result<Vec<u8>> {
    let mut out = Vec::new();
    for t in triples {
        serde_json::to_writer(&mut out, t)?;
        out.push(b'\n');
    }
    Ok(out)
}

/// Reads triples back from JSONL. Blank lines are skipped.
pub fn read_jsonl(text: &str) -> Result<Vec<Triple>> {
    text.lines()
        .filter(|l| !l.trim().is_empty())
        .map(|l| serde_json::from_str(l).map_err(Error::from))
        .collect()
}
