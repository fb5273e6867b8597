//! Dataset parsing, validation and serialization.
//!
//! Corpus formats:
//!
//! - records: one JSON object per line with `id`, `title`, `year`,
//!   `authors`, `cites`, `tags`. Only `id` is required.
//! - papers+edges: a papers CSV with header `id,title,year,authors,tags`
//!   (authors and tags `;`-joined) and an edges CSV with header
//!   `citing_id,cited_id`.
//!
//! Author fixtures are CSV with header `author_id,display_name,k,h,tags`.
//! Extra columns are ignored, so per-author report exports load as fixtures.
//!
//! Ids are trimmed and tags trimmed and lowercased on the way in. Readers
//! stream: one record is materialized at a time (the papers+edges format
//! additionally holds the edge table, keyed by citing paper).

use std::collections::{BTreeSet, HashMap, HashSet};
use std::fmt;
use std::fs::File;
use std::io::{self, BufRead, BufReader, Read, Write};
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::graph::PaperRecord;
use crate::indices::IndexReport;
use crate::ranking::AuthorIndices;

pub const FIXTURE_HEADER: [&str; 5] = ["author_id", "display_name", "k", "h", "tags"];
pub const REPORT_HEADER: [&str; 8] = [
    "author_id",
    "display_name",
    "k",
    "h",
    "tags",
    "k_no_self",
    "citing_articles",
    "papers",
];

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum CorpusFormat {
    RecordsJsonl,
    PapersEdgesCsv { edges_path: PathBuf },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DatasetManifest {
    pub papers_path: PathBuf,
    pub format: CorpusFormat,
    #[serde(default)]
    pub fixture_path: Option<PathBuf>,
    #[serde(default)]
    pub declared_count: Option<u64>,
}

impl DatasetManifest {
    pub fn records(path: impl Into<PathBuf>) -> Self {
        DatasetManifest {
            papers_path: path.into(),
            format: CorpusFormat::RecordsJsonl,
            fixture_path: None,
            declared_count: None,
        }
    }

    pub fn papers_and_edges(papers: impl Into<PathBuf>, edges: impl Into<PathBuf>) -> Self {
        DatasetManifest {
            papers_path: papers.into(),
            format: CorpusFormat::PapersEdgesCsv {
                edges_path: edges.into(),
            },
            fixture_path: None,
            declared_count: None,
        }
    }

    pub fn with_declared_count(mut self, count: u64) -> Self {
        self.declared_count = Some(count);
        self
    }
}

/// A line (JSON) or row (CSV) within a file. Lines are 1-based.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct Location {
    pub path: PathBuf,
    pub line: u64,
}

impl fmt::Display for Location {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.path.display(), self.line)
    }
}

#[derive(Debug, Error)]
pub enum IngestError {
    #[error("{}: {source}", path.display())]
    Io { path: PathBuf, source: io::Error },
    #[error("{at}: {message}")]
    Parse { at: Location, message: String },
    #[error("{at}: '{id}': {message}")]
    Dataset { at: Location, id: String, message: String },
    #[error("conflicting fixture rows for author '{0}'")]
    ConflictingRows(String),
}

impl IngestError {
    fn io(path: &Path, source: io::Error) -> Self {
        IngestError::Io {
            path: path.to_path_buf(),
            source,
        }
    }
}

fn open(path: &Path) -> Result<File, IngestError> {
    File::open(path).map_err(|e| IngestError::io(path, e))
}

fn split_list(s: &str) -> impl Iterator<Item = &str> {
    s.split(';').map(str::trim).filter(|t| !t.is_empty())
}

fn normalize(mut rec: PaperRecord) -> PaperRecord {
    rec.paper_id = rec.paper_id.trim().to_string();
    for a in &mut rec.author_ids {
        *a = a.trim().to_string();
    }
    for c in &mut rec.cites {
        *c = c.trim().to_string();
    }
    rec.tags = rec.tags.iter().map(|t| t.trim().to_lowercase()).collect();
    rec
}

type Located = Result<(Location, PaperRecord), IngestError>;

/// Streams records from a line-delimited JSON source. Blank lines are
/// skipped. Only syntax errors are reported here; invariant checks are left
/// to the caller.
pub struct RecordLines<R> {
    path: PathBuf,
    lines: io::Lines<R>,
    line: u64,
}

impl<R: BufRead> RecordLines<R> {
    pub fn new(reader: R, path: impl Into<PathBuf>) -> Self {
        RecordLines {
            path: path.into(),
            lines: reader.lines(),
            line: 0,
        }
    }
}

impl<R: BufRead> Iterator for RecordLines<R> {
    type Item = Located;

    fn next(&mut self) -> Option<Located> {
        loop {
            let text = match self.lines.next()? {
                Ok(t) => t,
                Err(e) => return Some(Err(IngestError::io(&self.path, e))),
            };
            self.line += 1;
            if text.trim().is_empty() {
                continue;
            }
            let at = Location {
                path: self.path.clone(),
                line: self.line,
            };
            return Some(match serde_json::from_str::<PaperRecord>(&text) {
                Ok(rec) => Ok((at, normalize(rec))),
                Err(e) => Err(IngestError::Parse {
                    at,
                    message: e.to_string(),
                }),
            });
        }
    }
}

struct PendingEdge {
    cited: String,
    at: Location,
}

/// Streams records from a papers CSV, attaching outgoing citations from a
/// preloaded edge table. Edges whose citing paper never appears are reported
/// after the last paper row.
struct CsvCorpus {
    papers_path: PathBuf,
    rows: csv::StringRecordsIntoIter<File>,
    columns: PaperColumns,
    edges: HashMap<String, Vec<PendingEdge>>,
    orphans: Option<std::vec::IntoIter<Located>>,
}

struct PaperColumns {
    id: usize,
    title: Option<usize>,
    year: Option<usize>,
    authors: Option<usize>,
    tags: Option<usize>,
}

fn column(headers: &csv::StringRecord, name: &str) -> Option<usize> {
    headers.iter().position(|h| h.trim() == name)
}

fn csv_line(pos: Option<&csv::Position>) -> u64 {
    pos.map_or(0, csv::Position::line)
}

fn load_edges(path: &Path) -> Result<HashMap<String, Vec<PendingEdge>>, IngestError> {
    let mut reader = csv::ReaderBuilder::new().flexible(true).from_reader(open(path)?);
    let headers = reader.headers().map_err(|e| csv_error(path, e))?.clone();
    let (Some(citing), Some(cited)) = (column(&headers, "citing_id"), column(&headers, "cited_id")) else {
        return Err(IngestError::Parse {
            at: Location {
                path: path.to_path_buf(),
                line: 1,
            },
            message: "edges header must contain citing_id and cited_id".into(),
        });
    };
    let mut edges: HashMap<String, Vec<PendingEdge>> = HashMap::new();
    for row in reader.records() {
        let row = row.map_err(|e| csv_error(path, e))?;
        let at = Location {
            path: path.to_path_buf(),
            line: csv_line(row.position()),
        };
        let (Some(src), Some(dst)) = (row.get(citing), row.get(cited)) else {
            return Err(IngestError::Parse {
                at,
                message: "edge row is missing a column".into(),
            });
        };
        edges.entry(src.trim().to_string()).or_default().push(PendingEdge {
            cited: dst.trim().to_string(),
            at,
        });
    }
    Ok(edges)
}

fn csv_error(path: &Path, e: csv::Error) -> IngestError {
    match e.kind() {
        csv::ErrorKind::Io(_) => IngestError::io(path, io::Error::other(e.to_string())),
        _ => IngestError::Parse {
            at: Location {
                path: path.to_path_buf(),
                line: csv_line(e.position()),
            },
            message: e.to_string(),
        },
    }
}

impl CsvCorpus {
    fn open(papers_path: &Path, edges_path: &Path) -> Result<Self, IngestError> {
        let edges = load_edges(edges_path)?;
        let mut reader = csv::ReaderBuilder::new().flexible(true).from_reader(open(papers_path)?);
        let headers = reader.headers().map_err(|e| csv_error(papers_path, e))?.clone();
        let Some(id) = column(&headers, "id") else {
            return Err(IngestError::Parse {
                at: Location {
                    path: papers_path.to_path_buf(),
                    line: 1,
                },
                message: "papers header must contain id".into(),
            });
        };
        let columns = PaperColumns {
            id,
            title: column(&headers, "title"),
            year: column(&headers, "year"),
            authors: column(&headers, "authors"),
            tags: column(&headers, "tags"),
        };
        Ok(CsvCorpus {
            papers_path: papers_path.to_path_buf(),
            rows: reader.into_records(),
            columns,
            edges,
            orphans: None,
        })
    }

    fn record(&mut self, row: csv::StringRecord) -> Located {
        let at = Location {
            path: self.papers_path.clone(),
            line: csv_line(row.position()),
        };
        let field = |i: Option<usize>| i.and_then(|i| row.get(i)).map(str::trim).unwrap_or("");
        let id = field(Some(self.columns.id)).to_string();
        let title = Some(field(self.columns.title))
            .filter(|t| !t.is_empty())
            .map(str::to_string);
        let year = match field(self.columns.year) {
            "" => None,
            y => match y.parse::<i32>() {
                Ok(y) => Some(y),
                Err(_) => {
                    return Err(IngestError::Parse {
                        at,
                        message: format!("year '{y}' is not an integer"),
                    })
                }
            },
        };
        let mut rec = PaperRecord::new(id)
            .with_authors(split_list(field(self.columns.authors)))
            .with_tags(split_list(field(self.columns.tags)));
        rec.title = title;
        rec.year = year;
        if let Some(out) = self.edges.remove(&rec.paper_id) {
            rec.cites = out.into_iter().map(|e| e.cited).collect();
        }
        Ok((at, normalize(rec)))
    }

    fn take_orphans(&mut self) -> std::vec::IntoIter<Located> {
        let mut left: Vec<(String, Location)> = self
            .edges
            .drain()
            .flat_map(|(src, out)| out.into_iter().map(move |e| (src.clone(), e.at)))
            .collect();
        left.sort_by(|a, b| a.1.cmp(&b.1));
        left.into_iter()
            .map(|(id, at)| {
                Err(IngestError::Dataset {
                    at,
                    id,
                    message: "citing paper is not declared in the papers table".into(),
                })
            })
            .collect::<Vec<_>>()
            .into_iter()
    }
}

impl Iterator for CsvCorpus {
    type Item = Located;

    fn next(&mut self) -> Option<Located> {
        if self.orphans.is_none() {
            match self.rows.next() {
                Some(Ok(row)) => return Some(self.record(row)),
                Some(Err(e)) => return Some(Err(csv_error(&self.papers_path, e))),
                None => self.orphans = Some(self.take_orphans()),
            }
        }
        self.orphans.as_mut().and_then(Iterator::next)
    }
}

/// Opens the corpus named by `manifest` as a stream of located records.
pub fn open_corpus(manifest: &DatasetManifest) -> Result<Box<dyn Iterator<Item = Located>>, IngestError> {
    match &manifest.format {
        CorpusFormat::RecordsJsonl => {
            let file = open(&manifest.papers_path)?;
            Ok(Box::new(RecordLines::new(BufReader::new(file), &manifest.papers_path)))
        }
        CorpusFormat::PapersEdgesCsv { edges_path } => {
            Ok(Box::new(CsvCorpus::open(&manifest.papers_path, edges_path)?))
        }
    }
}

/// Parses a whole corpus, stopping at the first syntax error or broken
/// record invariant.
pub fn parse_corpus(manifest: &DatasetManifest) -> Result<Vec<PaperRecord>, IngestError> {
    collect_checked(open_corpus(manifest)?)
}

/// Parses records from any line-delimited JSON reader, with the same checks
/// as [`parse_corpus`].
pub fn read_records<R: BufRead>(reader: R, label: impl Into<PathBuf>) -> Result<Vec<PaperRecord>, IngestError> {
    collect_checked(RecordLines::new(reader, label))
}

fn collect_checked(items: impl Iterator<Item = Located>) -> Result<Vec<PaperRecord>, IngestError> {
    let mut seen = HashSet::new();
    let mut out = Vec::new();
    for item in items {
        let (at, rec) = item?;
        let problem = match rec.violations().into_iter().next() {
            Some(v) => Some(v.to_string()),
            None if !seen.insert(rec.paper_id.clone()) => Some("duplicate paper id".to_string()),
            None => None,
        };
        if let Some(message) = problem {
            return Err(IngestError::Dataset {
                at,
                id: rec.paper_id,
                message,
            });
        }
        out.push(rec);
    }
    Ok(out)
}

/// Writes records in the line-delimited JSON format.
pub fn write_records<'a, W, I>(mut w: W, records: I) -> io::Result<()>
where
    W: Write,
    I: IntoIterator<Item = &'a PaperRecord>,
{
    for rec in records {
        serde_json::to_writer(&mut w, rec)?;
        w.write_all(b"\n")?;
    }
    w.flush()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Severity {
    Warning,
    Fatal,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Violation {
    pub severity: Severity,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub location: Option<String>,
    pub message: String,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let tag = match self.severity {
            Severity::Warning => "warning",
            Severity::Fatal => "error",
        };
        match &self.location {
            Some(at) => write!(f, "{tag}: {at}: {}", self.message),
            None => write!(f, "{tag}: {}", self.message),
        }
    }
}

/// Overall outcome of a validation run.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum ValidationStatus {
    Clean,
    Warnings,
    Fatal,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ValidationReport {
    pub records: u64,
    pub edges: u64,
    pub dangling_citations: u64,
    pub dangling_targets: u64,
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn status(&self) -> ValidationStatus {
        match self.violations.iter().map(|v| v.severity).max() {
            Some(Severity::Fatal) => ValidationStatus::Fatal,
            Some(Severity::Warning) => ValidationStatus::Warnings,
            None => ValidationStatus::Clean,
        }
    }

    pub fn fatal_count(&self) -> usize {
        self.violations.iter().filter(|v| v.severity == Severity::Fatal).count()
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for v in &self.violations {
            writeln!(f, "{v}")?;
        }
        write!(
            f,
            "{} records, {} citation edges, {} dangling citations to {} undeclared papers; {} fatal, {} warnings",
            self.records,
            self.edges,
            self.dangling_citations,
            self.dangling_targets,
            self.fatal_count(),
            self.violations.len() - self.fatal_count()
        )
    }
}

/// Checks a corpus without building a graph. Every problem is listed;
/// only an unreadable file aborts the run.
pub fn validate_dataset(manifest: &DatasetManifest) -> Result<ValidationReport, IngestError> {
    let mut violations = Vec::new();
    let mut fatal = |at: Option<&Location>, message: String| {
        violations.push(Violation {
            severity: Severity::Fatal,
            location: at.map(ToString::to_string),
            message,
        })
    };

    let mut declared: HashSet<String> = HashSet::new();
    let mut cited: HashMap<String, u64> = HashMap::new();
    let (mut records, mut edges) = (0u64, 0u64);

    for item in open_corpus(manifest)? {
        let (at, rec) = match item {
            Ok(x) => x,
            Err(IngestError::Parse { at, message }) => {
                fatal(Some(&at), message);
                continue;
            }
            Err(IngestError::Dataset { at, id, message }) => {
                fatal(Some(&at), format!("'{id}': {message}"));
                continue;
            }
            Err(e) => return Err(e),
        };
        records += 1;
        for v in rec.violations() {
            fatal(Some(&at), format!("'{}': {v}", rec.paper_id));
        }
        if !declared.insert(rec.paper_id.clone()) {
            fatal(Some(&at), format!("'{}': duplicate paper id", rec.paper_id));
        }
        for c in rec.cites {
            edges += 1;
            *cited.entry(c).or_default() += 1;
        }
    }

    let mut dangling_citations = 0;
    let mut dangling_targets = 0;
    for (id, n) in &cited {
        if !declared.contains(id) {
            dangling_targets += 1;
            dangling_citations += n;
        }
    }
    if dangling_citations > 0 {
        violations.push(Violation {
            severity: Severity::Warning,
            location: None,
            message: format!(
                "{dangling_citations} dangling citations to {dangling_targets} undeclared papers (kept as stubs)"
            ),
        });
    }
    if let Some(expected) = manifest.declared_count {
        if expected != records {
            violations.push(Violation {
                severity: Severity::Warning,
                location: None,
                message: format!("declared {expected} records, found {records}"),
            });
        }
    }

    Ok(ValidationReport {
        records,
        edges,
        dangling_citations,
        dangling_targets,
        violations,
    })
}

/// One author row of a published-values table.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AuthorFixtureRow {
    pub author_id: String,
    pub display_name: String,
    pub k: u64,
    pub h: u64,
    pub tags: BTreeSet<String>,
}

impl AuthorIndices for AuthorFixtureRow {
    fn author_id(&self) -> &str {
        &self.author_id
    }
    fn display_name(&self) -> Option<&str> {
        Some(self.display_name.as_str()).filter(|s| !s.is_empty())
    }
    fn k(&self) -> u64 {
        self.k
    }
    fn h(&self) -> u64 {
        self.h
    }
    fn tags(&self) -> &BTreeSet<String> {
        &self.tags
    }
}

impl From<&IndexReport> for AuthorFixtureRow {
    fn from(r: &IndexReport) -> Self {
        AuthorFixtureRow {
            author_id: r.author_id.clone(),
            display_name: String::new(),
            k: r.k,
            h: r.h,
            tags: r.tags.clone(),
        }
    }
}

pub fn parse_fixture(path: &Path) -> Result<Vec<AuthorFixtureRow>, IngestError> {
    read_fixture(open(path)?, path)
}

pub fn read_fixture<R: Read>(reader: R, label: &Path) -> Result<Vec<AuthorFixtureRow>, IngestError> {
    let mut reader = csv::ReaderBuilder::new().flexible(true).from_reader(reader);
    let headers = reader.headers().map_err(|e| csv_error(label, e))?.clone();
    if headers.is_empty() {
        return Ok(Vec::new());
    }
    let mut idx = [0usize; 5];
    for (slot, name) in idx.iter_mut().zip(FIXTURE_HEADER) {
        *slot = column(&headers, name).ok_or_else(|| IngestError::Parse {
            at: Location {
                path: label.to_path_buf(),
                line: 1,
            },
            message: format!("fixture header is missing column '{name}'"),
        })?;
    }
    let [id_col, name_col, k_col, h_col, tags_col] = idx;

    let mut rows = Vec::new();
    for row in reader.records() {
        let row = row.map_err(|e| csv_error(label, e))?;
        let at = Location {
            path: label.to_path_buf(),
            line: csv_line(row.position()),
        };
        let get = |i: usize| row.get(i).map(str::trim).unwrap_or("");
        let author_id = get(id_col).to_string();
        if author_id.is_empty() {
            return Err(IngestError::Dataset {
                at,
                id: author_id,
                message: "empty author id".into(),
            });
        }
        let index = |col: usize, name: &str| -> Result<u64, IngestError> {
            let raw = get(col);
            let v: i64 = raw.parse().map_err(|_| IngestError::Parse {
                at: at.clone(),
                message: format!("{name} value '{raw}' is not an integer"),
            })?;
            u64::try_from(v).map_err(|_| IngestError::Dataset {
                at: at.clone(),
                id: author_id.clone(),
                message: format!("negative {name} value {v}"),
            })
        };
        let k = index(k_col, "k")?;
        let h = index(h_col, "h")?;
        rows.push(AuthorFixtureRow {
            display_name: get(name_col).to_string(),
            k,
            h,
            tags: split_list(get(tags_col)).map(str::to_lowercase).collect(),
            author_id,
        });
    }
    Ok(rows)
}

pub fn write_fixture<'a, W, I>(w: W, rows: I) -> io::Result<()>
where
    W: Write,
    I: IntoIterator<Item = &'a AuthorFixtureRow>,
{
    let mut out = csv::Writer::from_writer(w);
    out.write_record(FIXTURE_HEADER)?;
    for r in rows {
        let tags = join_tags(&r.tags);
        out.write_record([
            r.author_id.as_str(),
            r.display_name.as_str(),
            &r.k.to_string(),
            &r.h.to_string(),
            &tags,
        ])?;
    }
    out.flush()
}

/// Index reports as CSV. The first five columns follow the fixture layout,
/// so the output can be read back with [`parse_fixture`].
pub fn write_reports_csv<'a, W, I>(w: W, reports: I) -> io::Result<()>
where
    W: Write,
    I: IntoIterator<Item = &'a IndexReport>,
{
    let mut out = csv::Writer::from_writer(w);
    out.write_record(REPORT_HEADER)?;
    for r in reports {
        out.write_record([
            r.author_id.clone(),
            String::new(),
            r.k.to_string(),
            r.h.to_string(),
            join_tags(&r.tags),
            r.k_no_self.to_string(),
            r.citing_article_count.to_string(),
            r.paper_count.to_string(),
        ])?;
    }
    out.flush()
}

fn join_tags(tags: &BTreeSet<String>) -> String {
    tags.iter().map(String::as_str).collect::<Vec<_>>().join(";")
}

/// Concatenates fixture tables, keeping the first occurrence of each author.
/// Repeated authors must carry identical rows.
pub fn merge_fixture_rows<I>(rows: I) -> Result<Vec<AuthorFixtureRow>, IngestError>
where
    I: IntoIterator<Item = AuthorFixtureRow>,
{
    let mut out: Vec<AuthorFixtureRow> = Vec::new();
    let mut by_id: HashMap<String, usize> = HashMap::new();
    for row in rows {
        match by_id.get(&row.author_id) {
            Some(&i) if out[i] == row => {}
            Some(_) => return Err(IngestError::ConflictingRows(row.author_id)),
            None => {
                by_id.insert(row.author_id.clone(), out.len());
                out.push(row);
            }
        }
    }
    Ok(out)
}
