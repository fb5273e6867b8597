//! Crossing-point indices over a citation graph.
//!
//! Both indices reduce to the same step. Given a list of citation counts
//! sorted from most to least cited, c(1) >= c(2) >= ..., the crossing point
//! is the largest rank r with c(r) >= r.
//!
//! - h-index: counts are the author's own papers' citation counts.
//! - K-index: counts are those of the distinct articles citing the author.

use std::collections::BTreeSet;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::graph::{AuthorIdx, CitationGraph, PaperIdx};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum IndexError {
    #[error("citation counts must be non-increasing, but rank {rank} is below its successor")]
    Unsorted { rank: usize },
}

/// Citation counts ranked from most to least cited.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct CitationCountProfile(Vec<u64>);

impl CitationCountProfile {
    /// Accepts counts already in non-increasing order.
    pub fn from_sorted(counts: Vec<u64>) -> Result<Self, IndexError> {
        if let Some(i) = counts.windows(2).position(|w| w[0] < w[1]) {
            return Err(IndexError::Unsorted { rank: i + 1 });
        }
        Ok(CitationCountProfile(counts))
    }

    /// Sorts arbitrary counts into a profile.
    pub fn from_counts<I: IntoIterator<Item = u64>>(counts: I) -> Self {
        let mut counts: Vec<u64> = counts.into_iter().collect();
        counts.sort_unstable_by(|a, b| b.cmp(a));
        CitationCountProfile(counts)
    }

    pub fn counts(&self) -> &[u64] {
        &self.0
    }

    /// c(r) for a 1-based rank.
    pub fn at_rank(&self, rank: usize) -> Option<u64> {
        rank.checked_sub(1).and_then(|i| self.0.get(i).copied())
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

/// Largest rank r with c(r) >= r, or 0 when there is none.
pub fn crossing_index(profile: &CitationCountProfile) -> u64 {
    let counts = profile.counts();
    // c(r) >= r holds for a prefix of ranks, so binary search the boundary.
    let (mut lo, mut hi) = (0usize, counts.len());
    while lo < hi {
        let mid = lo + (hi - lo).div_ceil(2);
        if counts[mid - 1] >= mid as u64 {
            lo = mid;
        } else {
            hi = mid - 1;
        }
    }
    lo as u64
}

/// [`crossing_index`] over a slice that must already be non-increasing.
pub fn crossing_index_sorted(counts: &[u64]) -> Result<u64, IndexError> {
    CitationCountProfile::from_sorted(counts.to_vec()).map(|p| crossing_index(&p))
}

/// Per-author index summary.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct IndexReport {
    pub author_id: String,
    pub k: u64,
    pub k_no_self: u64,
    pub h: u64,
    pub citing_article_count: u64,
    pub paper_count: u64,
    pub tags: BTreeSet<String>,
}

impl IndexReport {
    pub fn empty(author_id: impl Into<String>) -> Self {
        IndexReport {
            author_id: author_id.into(),
            k: 0,
            k_no_self: 0,
            h: 0,
            citing_article_count: 0,
            paper_count: 0,
            tags: BTreeSet::new(),
        }
    }

    /// The same report with `k` replaced by the self-citation-free value.
    pub fn excluding_self_citations(mut self) -> Self {
        self.k = self.k_no_self;
        self
    }
}

pub fn h_index(graph: &CitationGraph, author: &str) -> u64 {
    graph.author_index(author).map_or(0, |a| h_of(graph, a))
}

/// Distinct papers citing any of the author's papers. With `exclude_self`,
/// papers listing the author among their own authors are dropped.
pub fn citing_articles<'g>(graph: &'g CitationGraph, author: &str, exclude_self: bool) -> BTreeSet<&'g str> {
    match graph.author_index(author) {
        Some(a) => citing_set(graph, a, exclude_self)
            .into_iter()
            .map(|q| graph.paper_id(q))
            .collect(),
        None => BTreeSet::new(),
    }
}

pub fn k_index(graph: &CitationGraph, author: &str, exclude_self: bool) -> u64 {
    graph.author_index(author).map_or(0, |a| {
        let citing = citing_set(graph, a, exclude_self);
        k_over(graph, &citing)
    })
}

pub fn index_report(graph: &CitationGraph, author: &str) -> IndexReport {
    match graph.author_index(author) {
        Some(a) => report_for(graph, a),
        None => IndexReport::empty(author),
    }
}

/// Reports for every author in the graph, ascending by author id.
pub fn all_reports(graph: &CitationGraph) -> Vec<IndexReport> {
    (0..graph.author_count() as u32)
        .into_par_iter()
        .map(|a| report_for(graph, AuthorIdx(a)))
        .collect()
}

fn h_of(graph: &CitationGraph, a: AuthorIdx) -> u64 {
    let counts = graph.papers_by(a).iter().map(|&p| graph.in_degree(p) as u64);
    crossing_index(&CitationCountProfile::from_counts(counts))
}

fn k_over(graph: &CitationGraph, citing: &[PaperIdx]) -> u64 {
    let counts = citing.iter().map(|&q| graph.in_degree(q) as u64);
    crossing_index(&CitationCountProfile::from_counts(counts))
}

fn citing_set(graph: &CitationGraph, a: AuthorIdx, exclude_self: bool) -> Vec<PaperIdx> {
    let mut citing: Vec<PaperIdx> = graph
        .papers_by(a)
        .iter()
        .flat_map(|&p| graph.citers(p).iter().copied())
        .collect();
    citing.sort_unstable();
    citing.dedup();
    if exclude_self {
        citing.retain(|&q| !is_coauthored(graph, q, a));
    }
    citing
}

fn is_coauthored(graph: &CitationGraph, q: PaperIdx, a: AuthorIdx) -> bool {
    graph.authors_on(q).binary_search(&a).is_ok()
}

fn report_for(graph: &CitationGraph, a: AuthorIdx) -> IndexReport {
    let citing = citing_set(graph, a, false);
    let without_self: Vec<PaperIdx> = citing
        .iter()
        .copied()
        .filter(|&q| !is_coauthored(graph, q, a))
        .collect();
    let papers = graph.papers_by(a);
    let tags = papers
        .iter()
        .flat_map(|&p| graph.paper_tags(p).iter().cloned())
        .collect();
    IndexReport {
        author_id: graph.author_id(a).to_string(),
        k: k_over(graph, &citing),
        k_no_self: k_over(graph, &without_self),
        h: h_of(graph, a),
        citing_article_count: citing.len() as u64,
        paper_count: papers.len() as u64,
        tags,
    }
}
