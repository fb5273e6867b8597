//! Reference computations that work directly on records, without the graph.

#![allow(dead_code)]

use std::collections::{BTreeMap, BTreeSet, HashMap};

use kindex_core::PaperRecord;
use proptest::prelude::*;

/// max{ r : r-th largest count >= r }, checking every rank.
pub fn brute_crossing(counts: &[u64]) -> u64 {
    let mut sorted = counts.to_vec();
    sorted.sort_unstable_by(|a, b| b.cmp(a));
    let mut best = 0;
    for r in 1..=sorted.len() {
        if sorted[r - 1] >= r as u64 {
            best = r as u64;
        }
    }
    best
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OracleReport {
    pub k: u64,
    pub k_no_self: u64,
    pub h: u64,
    pub citing: u64,
    pub papers: u64,
}

/// Per-author indices from raw records, using maps and sets only.
pub fn oracle_reports(records: &[PaperRecord]) -> BTreeMap<String, OracleReport> {
    let mut in_degree: HashMap<&str, u64> = HashMap::new();
    let mut citers: HashMap<&str, Vec<&PaperRecord>> = HashMap::new();
    for r in records {
        for c in &r.cites {
            *in_degree.entry(c.as_str()).or_default() += 1;
            citers.entry(c.as_str()).or_default().push(r);
        }
    }
    let mut by_author: BTreeMap<&str, Vec<&PaperRecord>> = BTreeMap::new();
    for r in records {
        for a in &r.author_ids {
            by_author.entry(a.as_str()).or_default().push(r);
        }
    }
    let count = |id: &str| in_degree.get(id).copied().unwrap_or(0);
    by_author
        .into_iter()
        .map(|(author, papers)| {
            let h = brute_crossing(&papers.iter().map(|p| count(&p.paper_id)).collect::<Vec<_>>());
            let mut citing: BTreeMap<&str, &PaperRecord> = BTreeMap::new();
            for p in &papers {
                for q in citers.get(p.paper_id.as_str()).into_iter().flatten() {
                    citing.insert(q.paper_id.as_str(), q);
                }
            }
            let all: Vec<u64> = citing.keys().map(|q| count(q)).collect();
            let foreign: Vec<u64> = citing
                .iter()
                .filter(|(_, q)| !q.author_ids.iter().any(|a| a == author))
                .map(|(id, _)| count(id))
                .collect();
            (
                author.to_string(),
                OracleReport {
                    k: brute_crossing(&all),
                    k_no_self: brute_crossing(&foreign),
                    h,
                    citing: citing.len() as u64,
                    papers: papers.len() as u64,
                },
            )
        })
        .collect()
}

/// Small random corpora: up to `max_papers` papers named P0.., authors from a
/// pool of six, arbitrary (possibly cyclic) citations, and a few citations to
/// undeclared ids.
pub fn small_corpus(max_papers: usize) -> impl Strategy<Value = Vec<PaperRecord>> {
    (1..=max_papers).prop_flat_map(|n| {
        prop::collection::vec(
            (
                prop::collection::btree_set(0..6usize, 0..=3),
                prop::collection::btree_set(0..n + 3, 0..=6),
                any::<bool>(),
            ),
            n,
        )
        .prop_map(move |rows| {
            rows.into_iter()
                .enumerate()
                .map(|(i, (authors, cites, tagged))| {
                    let cites: BTreeSet<usize> = cites.into_iter().filter(|&c| c != i).collect();
                    let rec = PaperRecord::new(format!("P{i}"))
                        .with_authors(authors.into_iter().map(|a| format!("a{a}")))
                        .with_cites(
                            cites
                                .into_iter()
                                .map(|c| if c < n { format!("P{c}") } else { format!("X{c}") }),
                        );
                    if tagged {
                        rec.with_tags(["graphene"])
                    } else {
                        rec
                    }
                })
                .collect()
        })
    })
}
