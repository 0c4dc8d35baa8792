//! Multi-paper contribution graph with a file-backed snapshot format.
//!
//! A store directory holds `manifest.json` (format tag + paper records in
//! ingest order) and `triples.jsonl` (one triple per line, ingest order).

use std::collections::HashMap;
use std::fs;
use std::io::Write;
use std::path::Path;

use indexmap::IndexMap;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::export::{read_jsonl, to_jsonl};
use crate::model::{AnnotationDocument, PaperRecord, Triple, UnitKind};
use crate::triplify::flatten_with;
use crate::validate::Profile;

pub const FORMAT_TAG: &str = "contribkit-store/1";
pub const MANIFEST_FILE: &str = "manifest.json";
pub const TRIPLES_FILE: &str = "triples.jsonl";

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Manifest {
    pub format: String,
    pub papers: Vec<PaperRecord>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct IngestReport {
    pub paper_id: String,
    pub triples: usize,
    /// True when an earlier version of the paper was replaced.
    pub replaced: bool,
}

/// Conjunctive exact-match filter; unset fields match everything.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Filter {
    pub paper_id: Option<String>,
    pub unit: Option<UnitKind>,
    pub predicate: Option<String>,
    pub subject: Option<String>,
}

impl Filter {
    pub fn matches(&self, t: &Triple) -> bool {
        self.paper_id.as_ref().is_none_or(|p| *p == t.paper_id)
            && self.unit.is_none_or(|u| u == t.unit.canonical)
            && self.predicate.as_ref().is_none_or(|p| *p == t.predicate)
            && self.subject.as_ref().is_none_or(|s| *s == t.subject)
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
struct Indexes {
    by_paper: HashMap<String, Vec<usize>>,
    by_unit: HashMap<UnitKind, Vec<usize>>,
    by_predicate: HashMap<String, Vec<usize>>,
    by_subject: HashMap<String, Vec<usize>>,
}

impl Indexes {
    fn add(&mut self, i: usize, t: &Triple) {
        self.by_paper.entry(t.paper_id.clone()).or_default().push(i);
        self.by_unit.entry(t.unit.canonical).or_default().push(i);
        self.by_predicate.entry(t.predicate.clone()).or_default().push(i);
        self.by_subject.entry(t.subject.clone()).or_default().push(i);
    }
}

#[derive(Debug, Clone, Default)]
pub struct ContributionGraph {
    papers: IndexMap<String, PaperRecord>,
    triples: Vec<Triple>,
    indexes: Indexes,
}

impl PartialEq for ContributionGraph {
    fn eq(&self, other: &Self) -> bool {
        // IndexMap equality ignores order; ingest order is observable here.
        self.papers.iter().eq(other.papers.iter()) && self.triples == other.triples
    }
}

impl ContributionGraph {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn papers(&self) -> impl Iterator<Item = &PaperRecord> {
        self.papers.values()
    }

    pub fn paper(&self, paper_id: &str) -> Option<&PaperRecord> {
        self.papers.get(paper_id)
    }

    pub fn triples(&self) -> &[Triple] {
        &self.triples
    }

    pub fn paper_count(&self) -> usize {
        self.papers.len()
    }

    pub fn is_empty(&self) -> bool {
        self.papers.is_empty()
    }

    pub fn ingest(&mut self, doc: &AnnotationDocument) -> Result<IngestReport> {
        self.ingest_with(doc, Profile::Complete)
    }

    /// Flattens and stores `doc`. A paper already in the graph is replaced
    /// as a whole; on any error the graph is left untouched.
    pub fn ingest_with(&mut self, doc: &AnnotationDocument, profile: Profile) -> Result<IngestReport> {
        if doc.paper.paper_id.trim().is_empty() {
            return Err(Error::MissingPaperId);
        }
        let triples = flatten_with(doc, profile)?;
        let paper_id = doc.paper.paper_id.clone();
        let replaced = self.papers.shift_remove(&paper_id).is_some();
        if replaced {
            self.triples.retain(|t| t.paper_id != paper_id);
        }
        let count = triples.len();
        self.papers.insert(paper_id.clone(), doc.paper.clone());
        self.triples.extend(triples);
        if replaced {
            self.reindex();
        } else {
            let start = self.triples.len() - count;
            for i in start..self.triples.len() {
                self.indexes.add(i, &self.triples[i]);
            }
        }
        Ok(IngestReport {
            paper_id,
            triples: count,
            replaced,
        })
    }

    pub fn remove(&mut self, paper_id: &str) -> bool {
        if self.papers.shift_remove(paper_id).is_none() {
            return false;
        }
        self.triples.retain(|t| t.paper_id != paper_id);
        self.reindex();
        true
    }

    fn reindex(&mut self) {
        self.indexes = Indexes::default();
        for (i, t) in self.triples.iter().enumerate() {
            self.indexes.add(i, t);
        }
    }

    /// Triples matching `filter`, in ingest order.
    pub fn query(&self, filter: &Filter) -> Vec<&Triple> {
        let candidates = [
            filter.paper_id.as_ref().map(|p| self.indexes.by_paper.get(p)),
            filter.unit.map(|u| self.indexes.by_unit.get(&u)),
            filter.predicate.as_ref().map(|p| self.indexes.by_predicate.get(p)),
            filter.subject.as_ref().map(|s| self.indexes.by_subject.get(s)),
        ];
        let mut narrowest: Option<&[usize]> = None;
        for hit in candidates.into_iter().flatten() {
            let ids = hit.map(Vec::as_slice).unwrap_or(&[]);
            if narrowest.is_none_or(|n| ids.len() < n.len()) {
                narrowest = Some(ids);
            }
        }
        match narrowest {
            Some(ids) => ids
                .iter()
                .map(|&i| &self.triples[i])
                .filter(|t| filter.matches(t))
                .collect(),
            None => self.triples.iter().collect(),
        }
    }

    /// Triples of one paper in their original order.
    pub fn paper_triples(&self, paper_id: &str) -> Vec<&Triple> {
        self.query(&Filter {
            paper_id: Some(paper_id.to_string()),
            ..Default::default()
        })
    }

    /// The papers accepted by `keep`, with their triples.
    pub fn subgraph(&self, keep: impl Fn(&PaperRecord) -> bool) -> ContributionGraph {
        let mut graph = Self::default();
        for (id, paper) in &self.papers {
            if keep(paper) {
                graph.papers.insert(id.clone(), paper.clone());
            }
        }
        graph.triples = self
            .triples
            .iter()
            .filter(|t| graph.papers.contains_key(&t.paper_id))
            .cloned()
            .collect();
        graph.reindex();
        graph
    }

    pub fn save(&self, dir: impl AsRef<Path>) -> Result<()> {
        let dir = dir.as_ref();
        fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
        let manifest = Manifest {
            format: FORMAT_TAG.to_string(),
            papers: self.papers.values().cloned().collect(),
        };
        let mut manifest_bytes = serde_json::to_vec_pretty(&manifest)?;
        manifest_bytes.push(b'\n');
        // triples first so a crash never leaves a manifest pointing at stale data
        write_atomic(dir, TRIPLES_FILE, &to_jsonl(&self.triples)?)?;
        write_atomic(dir, MANIFEST_FILE, &manifest_bytes)?;
        Ok(())
    }

    /// Loads a store directory. A missing or empty directory is an empty
    /// graph.
    pub fn load(dir: impl AsRef<Path>) -> Result<Self> {
        let dir = dir.as_ref();
        let manifest_path = dir.join(MANIFEST_FILE);
        if !manifest_path.exists() {
            return Ok(Self::default());
        }
        let manifest_text = fs::read_to_string(&manifest_path).map_err(|e| Error::io(&manifest_path, e))?;
        let manifest = read_manifest(&manifest_text)?;
        let triples_path = dir.join(TRIPLES_FILE);
        let triples_text = match fs::read_to_string(&triples_path) {
            Ok(text) => text,
            Err(e) if e.kind() == std::io::ErrorKind::NotFound => String::new(),
            Err(e) => return Err(Error::io(&triples_path, e)),
        };
        Self::from_parts(manifest, read_jsonl(&triples_text)?)
    }

    pub fn from_parts(manifest: Manifest, triples: Vec<Triple>) -> Result<Self> {
        let mut graph = Self::default();
        for paper in manifest.papers {
            if paper.paper_id.is_empty() {
                return Err(Error::MissingPaperId);
            }
            let id = paper.paper_id.clone();
            if graph.papers.insert(id.clone(), paper).is_some() {
                return Err(Error::CorruptStore(format!("paper {id:?} listed twice")));
            }
        }
        for t in &triples {
            if !graph.papers.contains_key(&t.paper_id) {
                return Err(Error::CorruptStore(format!(
                    "triple for unlisted paper {:?}",
                    t.paper_id
                )));
            }
        }
        graph.triples = triples;
        graph.reindex();
        Ok(graph)
    }
}

/// Parses and version-checks a manifest.
pub fn read_manifest(text: &str) -> Result<Manifest> {
    #[derive(Deserialize)]
    struct Tag {
        format: Option<String>,
    }
    let tag: Tag = serde_json::from_str(text)?;
    let found = tag.format.unwrap_or_default();
    if found != FORMAT_TAG {
        return Err(Error::FormatVersionMismatch {
            found,
            expected: FORMAT_TAG.to_string(),
        });
    }
    Ok(serde_json::from_str(text)?)
}

fn write_atomic(dir: &Path, name: &str, bytes: &[u8]) -> Result<()> {
    let target = dir.join(name);
    let mut tmp = tempfile::NamedTempFile::new_in(dir).map_err(|e| Error::io(dir, e))?;
    tmp.write_all(bytes).map_err(|e| Error::io(tmp.path(), e))?;
    tmp.persist(&target).map_err(|e| Error::io(&target, e.error))?;
    Ok(())
}
