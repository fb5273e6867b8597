//! Citation corpus model.
//!
//! A [`CitationGraph`] is built once from a set of [`PaperRecord`]s and is
//! read-only afterwards. Papers and authors are interned into dense indices
//! assigned in lexicographic id order, so the built graph does not depend on
//! the order records were supplied in. Both directions of the citation
//! relation are stored as compressed row adjacency:
//!
//!   cites(p)    = papers p references       (forward)
//!   cited_by(p) = papers that reference p   (reverse, the transpose)
//!
//! Ids that are cited but never declared become stub papers: no authors, no
//! outgoing references, no tags, but their in-degree is tracked.

use std::collections::{BTreeSet, HashMap, HashSet};
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// One publication as it appears in a dataset.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PaperRecord {
    #[serde(rename = "id")]
    pub paper_id: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub title: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub year: Option<i32>,
    #[serde(rename = "authors", default)]
    pub author_ids: Vec<String>,
    #[serde(default)]
    pub cites: Vec<String>,
    #[serde(default)]
    pub tags: BTreeSet<String>,
}

impl PaperRecord {
    pub fn new(paper_id: impl Into<String>) -> Self {
        PaperRecord {
            paper_id: paper_id.into(),
            title: None,
            year: None,
            author_ids: Vec::new(),
            cites: Vec::new(),
            tags: BTreeSet::new(),
        }
    }

    pub fn with_authors<I, S>(mut self, authors: I) -> Self
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        self.author_ids = authors.into_iter().map(Into::into).collect();
        self
    }

    pub fn with_cites<I, S>(mut self, cites: I) -> Self
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        self.cites = cites.into_iter().map(Into::into).collect();
        self
    }

    pub fn with_tags<I, S>(mut self, tags: I) -> Self
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        self.tags = tags.into_iter().map(Into::into).collect();
        self
    }

    /// Lists every invariant this record breaks, in a fixed order.
    pub fn violations(&self) -> Vec<RecordViolation> {
        let mut out = Vec::new();
        if self.paper_id.is_empty() {
            out.push(RecordViolation::EmptyPaperId);
        }
        let mut seen = HashSet::with_capacity(self.cites.len());
        for cited in &self.cites {
            if cited.is_empty() {
                out.push(RecordViolation::EmptyCitedId);
            } else if *cited == self.paper_id {
                out.push(RecordViolation::SelfCitation);
            } else if !seen.insert(cited.as_str()) {
                out.push(RecordViolation::DuplicateCitation(cited.clone()));
            }
        }
        let mut seen = HashSet::with_capacity(self.author_ids.len());
        for author in &self.author_ids {
            if author.is_empty() {
                out.push(RecordViolation::EmptyAuthorId);
            } else if !seen.insert(author.as_str()) {
                out.push(RecordViolation::DuplicateAuthor(author.clone()));
            }
        }
        for tag in &self.tags {
            if tag.is_empty() || tag.chars().any(char::is_uppercase) {
                out.push(RecordViolation::BadTag(tag.clone()));
            }
        }
        out
    }
}

/// A broken [`PaperRecord`] invariant.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum RecordViolation {
    #[error("empty paper id")]
    EmptyPaperId,
    #[error("paper cites itself")]
    SelfCitation,
    #[error("empty id in cites")]
    EmptyCitedId,
    #[error("duplicate cites entry '{0}'")]
    DuplicateCitation(String),
    #[error("empty author id")]
    EmptyAuthorId,
    #[error("duplicate author '{0}'")]
    DuplicateAuthor(String),
    #[error("tag '{0}' must be non-empty and lowercase")]
    BadTag(String),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GraphError {
    #[error("duplicate paper id '{0}'")]
    DuplicatePaper(String),
    #[error("paper '{0}' cites itself")]
    SelfCitation(String),
    #[error("invalid record '{id}': {violation}")]
    InvalidRecord { id: String, violation: RecordViolation },
    #[error("unknown paper id '{0}'")]
    UnknownPaper(String),
}

/// Dense index of a paper inside one [`CitationGraph`].
#[derive(Debug, Default, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct PaperIdx(pub u32);

/// Dense index of an author inside one [`CitationGraph`].
#[derive(Debug, Default, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct AuthorIdx(pub u32);

impl PaperIdx {
    #[inline]
    pub fn get(self) -> usize {
        self.0 as usize
    }
}

impl AuthorIdx {
    #[inline]
    pub fn get(self) -> usize {
        self.0 as usize
    }
}

/// Compressed row storage: row `i` is `targets[offsets[i]..offsets[i + 1]]`.
#[derive(Clone, PartialEq, Eq)]
struct Adjacency<T> {
    offsets: Vec<usize>,
    targets: Vec<T>,
}

impl<T: Copy + Ord> Adjacency<T> {
    fn from_rows(rows: Vec<Vec<T>>) -> Self {
        let mut offsets = Vec::with_capacity(rows.len() + 1);
        let total = rows.iter().map(Vec::len).sum();
        let mut targets = Vec::with_capacity(total);
        offsets.push(0);
        for mut row in rows {
            row.sort_unstable();
            targets.extend_from_slice(&row);
            offsets.push(targets.len());
        }
        Adjacency { offsets, targets }
    }

    #[inline]
    fn row(&self, i: usize) -> &[T] {
        &self.targets[self.offsets[i]..self.offsets[i + 1]]
    }

    fn rows(&self) -> usize {
        self.offsets.len() - 1
    }

    fn len(&self) -> usize {
        self.targets.len()
    }

    /// Transposes rows indexed by `S` into `cols` rows of `S` values.
    /// Rows come out sorted because sources are visited in ascending order.
    fn transpose<S>(&self, cols: usize, to_source: impl Fn(usize) -> S, to_col: impl Fn(T) -> usize) -> Adjacency<S>
    where
        S: Copy + Default,
    {
        let mut offsets = vec![0usize; cols + 1];
        for &t in &self.targets {
            offsets[to_col(t) + 1] += 1;
        }
        for i in 0..cols {
            offsets[i + 1] += offsets[i];
        }
        let mut cursor = offsets.clone();
        let mut targets = vec![S::default(); self.targets.len()];
        for src in 0..self.rows() {
            for &t in self.row(src) {
                let c = to_col(t);
                targets[cursor[c]] = to_source(src);
                cursor[c] += 1;
            }
        }
        Adjacency { offsets, targets }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
struct PaperMeta {
    title: Option<String>,
    year: Option<i32>,
    tags: BTreeSet<String>,
    stub: bool,
}

/// Immutable citation corpus with forward and reverse adjacency.
#[derive(Clone, PartialEq, Eq)]
pub struct CitationGraph {
    paper_ids: Vec<String>,
    paper_lookup: HashMap<String, PaperIdx>,
    meta: Vec<PaperMeta>,
    cites: Adjacency<PaperIdx>,
    cited_by: Adjacency<PaperIdx>,
    author_ids: Vec<String>,
    author_lookup: HashMap<String, AuthorIdx>,
    paper_authors: Adjacency<AuthorIdx>,
    author_papers: Adjacency<PaperIdx>,
}

impl fmt::Debug for CitationGraph {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("CitationGraph")
            .field("papers", &self.paper_count())
            .field("stubs", &self.stub_count())
            .field("edges", &self.edge_count())
            .field("authors", &self.author_count())
            .finish()
    }
}

/// Builds a graph from records. Cited ids without a record become stubs.
pub fn build_graph<I>(records: I) -> Result<CitationGraph, GraphError>
where
    I: IntoIterator<Item = PaperRecord>,
{
    let records: Vec<PaperRecord> = records.into_iter().collect();

    let mut declared: HashSet<&str> = HashSet::with_capacity(records.len());
    for rec in &records {
        if let Some(v) = rec.violations().into_iter().next() {
            return Err(match v {
                RecordViolation::SelfCitation => GraphError::SelfCitation(rec.paper_id.clone()),
                violation => GraphError::InvalidRecord {
                    id: rec.paper_id.clone(),
                    violation,
                },
            });
        }
        if !declared.insert(rec.paper_id.as_str()) {
            return Err(GraphError::DuplicatePaper(rec.paper_id.clone()));
        }
    }

    let mut all_ids: Vec<&str> = declared.iter().copied().collect();
    for rec in &records {
        for cited in &rec.cites {
            if !declared.contains(cited.as_str()) {
                all_ids.push(cited.as_str());
            }
        }
    }
    all_ids.sort_unstable();
    all_ids.dedup();

    let paper_ids: Vec<String> = all_ids.iter().map(|s| s.to_string()).collect();
    let paper_lookup: HashMap<String, PaperIdx> = paper_ids
        .iter()
        .enumerate()
        .map(|(i, id)| (id.clone(), PaperIdx(i as u32)))
        .collect();
    let n = paper_ids.len();

    let mut author_names: Vec<&str> = records
        .iter()
        .flat_map(|r| r.author_ids.iter().map(String::as_str))
        .collect();
    author_names.sort_unstable();
    author_names.dedup();
    let author_ids: Vec<String> = author_names.iter().map(|s| s.to_string()).collect();
    let author_lookup: HashMap<String, AuthorIdx> = author_ids
        .iter()
        .enumerate()
        .map(|(i, id)| (id.clone(), AuthorIdx(i as u32)))
        .collect();

    let mut meta: Vec<PaperMeta> = (0..n)
        .map(|_| PaperMeta {
            title: None,
            year: None,
            tags: BTreeSet::new(),
            stub: true,
        })
        .collect();
    let mut cite_rows: Vec<Vec<PaperIdx>> = vec![Vec::new(); n];
    let mut author_rows: Vec<Vec<AuthorIdx>> = vec![Vec::new(); n];

    for rec in records {
        let p = paper_lookup[&rec.paper_id];
        cite_rows[p.get()] = rec.cites.iter().map(|c| paper_lookup[c]).collect();
        author_rows[p.get()] = rec.author_ids.iter().map(|a| author_lookup[a]).collect();
        meta[p.get()] = PaperMeta {
            title: rec.title,
            year: rec.year,
            tags: rec.tags,
            stub: false,
        };
    }

    let cites = Adjacency::from_rows(cite_rows);
    let cited_by = cites.transpose(n, |s| PaperIdx(s as u32), PaperIdx::get);
    let paper_authors = Adjacency::from_rows(author_rows);
    let author_papers = paper_authors.transpose(author_ids.len(), |s| PaperIdx(s as u32), AuthorIdx::get);

    Ok(CitationGraph {
        paper_ids,
        paper_lookup,
        meta,
        cites,
        cited_by,
        author_ids,
        author_lookup,
        paper_authors,
        author_papers,
    })
}

impl CitationGraph {
    /// Number of papers, stubs included.
    pub fn paper_count(&self) -> usize {
        self.paper_ids.len()
    }

    pub fn stub_count(&self) -> usize {
        self.meta.iter().filter(|m| m.stub).count()
    }

    pub fn edge_count(&self) -> usize {
        self.cites.len()
    }

    pub fn author_count(&self) -> usize {
        self.author_ids.len()
    }

    pub fn contains(&self, paper: &str) -> bool {
        self.paper_lookup.contains_key(paper)
    }

    pub fn is_stub(&self, paper: &str) -> Result<bool, GraphError> {
        self.require(paper).map(|p| self.meta[p.get()].stub)
    }

    /// Number of papers in the corpus citing `paper`.
    pub fn citation_count(&self, paper: &str) -> Result<usize, GraphError> {
        self.require(paper).map(|p| self.in_degree(p))
    }

    /// Ids of papers citing `paper`, ascending.
    pub fn cited_by(&self, paper: &str) -> Result<BTreeSet<&str>, GraphError> {
        let p = self.require(paper)?;
        Ok(self.citers(p).iter().map(|&q| self.paper_id(q)).collect())
    }

    /// Ids `paper` references, ascending.
    pub fn cites(&self, paper: &str) -> Result<BTreeSet<&str>, GraphError> {
        let p = self.require(paper)?;
        Ok(self.references(p).iter().map(|&q| self.paper_id(q)).collect())
    }

    /// The author's production set; empty for an unknown author.
    pub fn papers_of(&self, author: &str) -> BTreeSet<&str> {
        match self.author_index(author) {
            Some(a) => self.papers_by(a).iter().map(|&p| self.paper_id(p)).collect(),
            None => BTreeSet::new(),
        }
    }

    pub fn title(&self, paper: &str) -> Result<Option<&str>, GraphError> {
        self.require(paper).map(|p| self.meta[p.get()].title.as_deref())
    }

    pub fn year(&self, paper: &str) -> Result<Option<i32>, GraphError> {
        self.require(paper).map(|p| self.meta[p.get()].year)
    }

    /// Author ids in ascending order.
    pub fn author_ids(&self) -> impl ExactSizeIterator<Item = &str> {
        self.author_ids.iter().map(String::as_str)
    }

    /// Paper ids (stubs included) in ascending order.
    pub fn paper_ids(&self) -> impl ExactSizeIterator<Item = &str> {
        self.paper_ids.iter().map(String::as_str)
    }

    fn require(&self, paper: &str) -> Result<PaperIdx, GraphError> {
        self.paper_index(paper)
            .ok_or_else(|| GraphError::UnknownPaper(paper.to_string()))
    }

    // Index-level access, used by the index computations.

    pub fn paper_index(&self, paper: &str) -> Option<PaperIdx> {
        self.paper_lookup.get(paper).copied()
    }

    pub fn author_index(&self, author: &str) -> Option<AuthorIdx> {
        self.author_lookup.get(author).copied()
    }

    pub fn paper_id(&self, p: PaperIdx) -> &str {
        &self.paper_ids[p.get()]
    }

    pub fn author_id(&self, a: AuthorIdx) -> &str {
        &self.author_ids[a.get()]
    }

    #[inline]
    pub fn in_degree(&self, p: PaperIdx) -> usize {
        self.cited_by.row(p.get()).len()
    }

    #[inline]
    pub fn citers(&self, p: PaperIdx) -> &[PaperIdx] {
        self.cited_by.row(p.get())
    }

    #[inline]
    pub fn references(&self, p: PaperIdx) -> &[PaperIdx] {
        self.cites.row(p.get())
    }

    #[inline]
    pub fn papers_by(&self, a: AuthorIdx) -> &[PaperIdx] {
        self.author_papers.row(a.get())
    }

    /// Authors of `p` in ascending index order.
    #[inline]
    pub fn authors_on(&self, p: PaperIdx) -> &[AuthorIdx] {
        self.paper_authors.row(p.get())
    }

    pub fn paper_tags(&self, p: PaperIdx) -> &BTreeSet<String> {
        &self.meta[p.get()].tags
    }
}
