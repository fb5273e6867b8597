//! K-index and h-index computation over citation networks.
//!
//! An author's h-index is the largest h such that h of their papers have at
//! least h citations each. The K-index is the largest K such that K distinct
//! articles citing the author have at least K citations each, so it weighs
//! who cites an author and not only how often.
//!
//! The crate is organized bottom-up:
//!
//! - [`graph`]: paper records and the immutable citation graph.
//! - [`indices`]: the crossing-point computation and per-author reports.
//! - [`ranking`]: cohort rankings, tag filters, shortlists, statistics.
//! - [`scatter`]: K versus h tables and figures.
//! - [`ingest`]: corpus and fixture file formats, dataset validation.
//! - [`synthgen`]: deterministic synthetic corpora.

pub mod graph;
pub mod indices;
pub mod ingest;
pub mod ranking;
pub mod scatter;
pub mod synthgen;

pub use graph::{build_graph, CitationGraph, GraphError, PaperRecord};
pub use indices::{
    all_reports, citing_articles, crossing_index, h_index, index_report, k_index, CitationCountProfile, IndexReport,
};
pub use ingest::{AuthorFixtureRow, DatasetManifest, IngestError};
pub use ranking::{
    cohort_stats, filter_tags, ordinal_rank, rank_by, shortlist, AuthorIndices, CohortStats, RankKey, Ranking,
    RankingEntry,
};
pub use scatter::{scatter_export, ScatterTable};
pub use synthgen::{generate, SynthParams};
