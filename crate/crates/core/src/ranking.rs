//! Cohort rankings, tag filtering, shortlists and summary statistics.

use std::cmp::Ordering;
use std::collections::{BTreeSet, HashSet};
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::indices::IndexReport;

/// Anything that carries an author's K and h, whether computed from a
/// corpus or transcribed from a published table.
pub trait AuthorIndices {
    fn author_id(&self) -> &str;
    fn display_name(&self) -> Option<&str> {
        None
    }
    fn k(&self) -> u64;
    fn h(&self) -> u64;
    fn tags(&self) -> &BTreeSet<String>;
}

impl AuthorIndices for IndexReport {
    fn author_id(&self) -> &str {
        &self.author_id
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

impl<T: AuthorIndices + ?Sized> AuthorIndices for &T {
    fn author_id(&self) -> &str {
        (**self).author_id()
    }
    fn display_name(&self) -> Option<&str> {
        (**self).display_name()
    }
    fn k(&self) -> u64 {
        (**self).k()
    }
    fn h(&self) -> u64 {
        (**self).h()
    }
    fn tags(&self) -> &BTreeSet<String> {
        (**self).tags()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum RankKey {
    K,
    H,
}

impl RankKey {
    fn of<T: AuthorIndices>(self, r: &T) -> u64 {
        match self {
            RankKey::K => r.k(),
            RankKey::H => r.h(),
        }
    }

    fn other(self) -> RankKey {
        match self {
            RankKey::K => RankKey::H,
            RankKey::H => RankKey::K,
        }
    }
}

impl fmt::Display for RankKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            RankKey::K => "K",
            RankKey::H => "h",
        })
    }
}

impl FromStr for RankKey {
    type Err = RankingError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "k" | "K" => Ok(RankKey::K),
            "h" | "H" => Ok(RankKey::H),
            other => Err(RankingError::UnknownKey(other.to_string())),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum RankingError {
    #[error("cannot rank an empty cohort")]
    EmptyCohort,
    #[error("author '{0}' appears more than once in the cohort")]
    DuplicateAuthor(String),
    #[error("author '{0}' is not in the cohort")]
    AuthorNotFound(String),
    #[error("unknown ranking key '{0}' (expected k or h)")]
    UnknownKey(String),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RankingEntry {
    pub rank: usize,
    pub author_id: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub display_name: Option<String>,
    pub k: u64,
    pub h: u64,
}

impl RankingEntry {
    /// Display name when known, author id otherwise.
    pub fn name(&self) -> &str {
        self.display_name.as_deref().unwrap_or(&self.author_id)
    }
}

/// An ordered slice of a cohort. `cohort_size` remembers how many authors
/// were ranked before any shortlisting.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Ranking {
    pub key: RankKey,
    pub cohort_size: usize,
    pub entries: Vec<RankingEntry>,
}

impl Ranking {
    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Share of the ranked cohort kept in this ranking.
    pub fn cohort_fraction(&self) -> f64 {
        if self.cohort_size == 0 {
            0.0
        } else {
            self.entries.len() as f64 / self.cohort_size as f64
        }
    }

    pub fn position_of(&self, author: &str) -> Option<usize> {
        self.entries.iter().find(|e| e.author_id == author).map(|e| e.rank)
    }
}

/// Key descending, then the other index descending, then author id ascending.
fn ranking_order<T: AuthorIndices>(key: RankKey) -> impl Fn(&T, &T) -> Ordering {
    move |a, b| {
        key.of(b)
            .cmp(&key.of(a))
            .then_with(|| key.other().of(b).cmp(&key.other().of(a)))
            .then_with(|| a.author_id().cmp(b.author_id()))
    }
}

pub fn rank_by<T: AuthorIndices>(reports: &[T], key: RankKey) -> Result<Ranking, RankingError> {
    if reports.is_empty() {
        return Err(RankingError::EmptyCohort);
    }
    let mut seen = HashSet::with_capacity(reports.len());
    for r in reports {
        if !seen.insert(r.author_id()) {
            return Err(RankingError::DuplicateAuthor(r.author_id().to_string()));
        }
    }
    let mut order: Vec<&T> = reports.iter().collect();
    let cmp = ranking_order::<T>(key);
    order.sort_by(|a, b| cmp(a, b));
    let entries = order
        .into_iter()
        .enumerate()
        .map(|(i, r)| RankingEntry {
            rank: i + 1,
            author_id: r.author_id().to_string(),
            display_name: r.display_name().map(str::to_string),
            k: r.k(),
            h: r.h(),
        })
        .collect();
    Ok(Ranking {
        key,
        cohort_size: reports.len(),
        entries,
    })
}

/// Drops every report sharing a tag with `excluded`. Order is preserved.
pub fn filter_tags<T: AuthorIndices + Clone>(reports: &[T], excluded: &BTreeSet<String>) -> Vec<T> {
    reports
        .iter()
        .filter(|r| r.tags().is_disjoint(excluded))
        .cloned()
        .collect()
}

/// The first `n` entries, ranks unchanged.
pub fn shortlist(ranking: &Ranking, n: usize) -> Ranking {
    Ranking {
        key: ranking.key,
        cohort_size: ranking.cohort_size,
        entries: ranking.entries.iter().take(n).cloned().collect(),
    }
}

/// 1-based position of `author` when the cohort is ranked by `key`.
pub fn ordinal_rank<T: AuthorIndices>(reports: &[T], author: &str, key: RankKey) -> Result<usize, RankingError> {
    if !reports.iter().any(|r| r.author_id() == author) {
        return Err(RankingError::AuthorNotFound(author.to_string()));
    }
    let ranking = rank_by(reports, key)?;
    ranking
        .position_of(author)
        .ok_or_else(|| RankingError::AuthorNotFound(author.to_string()))
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum StatsError {
    #[error("cohort is empty")]
    EmptyCohort,
    #[error("mean {0} is zero, coefficient of variation is undefined")]
    ZeroMean(RankKey),
}

/// Population mean, standard deviation and coefficient of variation of K
/// and h over a cohort.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CohortStats {
    pub cohort_size: usize,
    pub mean_k: f64,
    pub std_k: f64,
    pub cv_k: f64,
    pub mean_h: f64,
    pub std_h: f64,
    pub cv_h: f64,
}

impl fmt::Display for CohortStats {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "n = {}", self.cohort_size)?;
        writeln!(
            f,
            "K = {:.0} ± {:.0}  (CV_K = {:.2})",
            self.mean_k, self.std_k, self.cv_k
        )?;
        write!(
            f,
            "h = {:.0} ± {:.0}  (CV_h = {:.2})",
            self.mean_h, self.std_h, self.cv_h
        )
    }
}

fn mean_and_std(values: &[f64]) -> (f64, f64) {
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / n;
    (mean, var.sqrt())
}

pub fn cohort_stats<T: AuthorIndices>(reports: &[T]) -> Result<CohortStats, StatsError> {
    if reports.is_empty() {
        return Err(StatsError::EmptyCohort);
    }
    let ks: Vec<f64> = reports.iter().map(|r| r.k() as f64).collect();
    let hs: Vec<f64> = reports.iter().map(|r| r.h() as f64).collect();
    let (mean_k, std_k) = mean_and_std(&ks);
    let (mean_h, std_h) = mean_and_std(&hs);
    if mean_k == 0.0 {
        return Err(StatsError::ZeroMean(RankKey::K));
    }
    if mean_h == 0.0 {
        return Err(StatsError::ZeroMean(RankKey::H));
    }
    Ok(CohortStats {
        cohort_size: reports.len(),
        mean_k,
        std_k,
        cv_k: std_k / mean_k,
        mean_h,
        std_h,
        cv_h: std_h / mean_h,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rep(id: &str, k: u64, h: u64) -> IndexReport {
        IndexReport {
            k,
            h,
            ..IndexReport::empty(id)
        }
    }

    fn tagged(id: &str, k: u64, h: u64, tags: &[&str]) -> IndexReport {
        IndexReport {
            tags: tags.iter().map(|t| t.to_string()).collect(),
            ..rep(id, k, h)
        }
    }

    fn order(r: &Ranking) -> Vec<&str> {
        r.entries.iter().map(|e| e.author_id.as_str()).collect()
    }

    #[test]
    fn empty_cohort_cannot_be_ranked() {
        let none: [IndexReport; 0] = [];
        assert_eq!(rank_by(&none, RankKey::K), Err(RankingError::EmptyCohort));
    }

    #[test]
    fn single_report_ranks_first() {
        let r = rank_by(&[rep("a", 3, 2)], RankKey::K).unwrap();
        assert_eq!(r.entries[0].rank, 1);
        assert_eq!(r.cohort_size, 1);
    }

    #[test]
    fn ties_break_on_other_index_then_id() {
        let cohort = [rep("lo", 50, 40), rep("hi", 50, 90), rep("b", 10, 5), rep("a", 10, 5)];
        let r = rank_by(&cohort, RankKey::K).unwrap();
        assert_eq!(order(&r), vec!["hi", "lo", "a", "b"]);
        let ranks: Vec<_> = r.entries.iter().map(|e| e.rank).collect();
        assert_eq!(ranks, vec![1, 2, 3, 4]);
    }

    #[test]
    fn rank_by_h_uses_k_as_tie_break() {
        let cohort = [rep("x", 10, 7), rep("y", 30, 7), rep("z", 1, 9)];
        let r = rank_by(&cohort, RankKey::H).unwrap();
        assert_eq!(order(&r), vec!["z", "y", "x"]);
    }

    #[test]
    fn duplicate_author_is_rejected() {
        let cohort = [rep("a", 1, 1), rep("a", 2, 2)];
        assert_eq!(
            rank_by(&cohort, RankKey::K),
            Err(RankingError::DuplicateAuthor("a".into()))
        );
    }

    #[test]
    fn filter_tags_behaviour() {
        let cohort = [
            tagged("a", 5, 1, &["graphene", "optics"]),
            tagged("b", 4, 1, &[]),
            tagged("c", 3, 1, &["optics"]),
        ];
        let ex: BTreeSet<String> = ["graphene".to_string()].into();
        let kept = filter_tags(&cohort, &ex);
        assert_eq!(
            kept.iter().map(|r| r.author_id.as_str()).collect::<Vec<_>>(),
            vec!["b", "c"]
        );
        assert_eq!(filter_tags(&cohort, &BTreeSet::new()), cohort.to_vec());
        let nothing: BTreeSet<String> = ["astro".to_string()].into();
        assert_eq!(filter_tags(&cohort, &nothing), cohort.to_vec());
    }

    #[test]
    fn shortlist_is_a_prefix() {
        let cohort: Vec<_> = (0..20).map(|i| rep(&format!("a{i:02}"), i, i)).collect();
        let r = rank_by(&cohort, RankKey::K).unwrap();
        let top = shortlist(&r, 12);
        assert_eq!(top.len(), 12);
        assert_eq!(top.entries[..], r.entries[..12]);
        assert_eq!(top.cohort_size, 20);
        assert_eq!(shortlist(&r, 100), r);
        assert_eq!(shortlist(&r, 1).entries, vec![r.entries[0].clone()]);
    }

    #[test]
    fn ordinal_rank_examples() {
        let cohort = [rep("low", 10, 1), rep("mid", 20, 1), rep("top", 30, 1)];
        assert_eq!(ordinal_rank(&cohort, "mid", RankKey::K), Ok(2));
        assert_eq!(ordinal_rank(&cohort[..1], "low", RankKey::K), Ok(1));
        assert_eq!(
            ordinal_rank(&cohort, "nobody", RankKey::K),
            Err(RankingError::AuthorNotFound("nobody".into()))
        );
    }

    #[test]
    fn stats_of_identical_cohort() {
        let s = cohort_stats(&[rep("a", 7, 3), rep("b", 7, 3), rep("c", 7, 3)]).unwrap();
        assert_eq!((s.mean_k, s.std_k, s.cv_k), (7.0, 0.0, 0.0));
        assert_eq!((s.mean_h, s.std_h, s.cv_h), (3.0, 0.0, 0.0));
    }

    #[test]
    fn stats_use_population_deviation() {
        // k: 2, 4, 4, 4, 5, 5, 7, 9 has mean 5 and population std 2.
        let ks = [2, 4, 4, 4, 5, 5, 7, 9];
        let cohort: Vec<_> = ks
            .iter()
            .enumerate()
            .map(|(i, &k)| rep(&format!("a{i}"), k, 1))
            .collect();
        let s = cohort_stats(&cohort).unwrap();
        assert_eq!(s.mean_k, 5.0);
        assert_eq!(s.std_k, 2.0);
        assert_eq!(s.cv_k, 0.4);
    }

    #[test]
    fn stats_errors() {
        let none: [IndexReport; 0] = [];
        assert_eq!(cohort_stats(&none), Err(StatsError::EmptyCohort));
        assert_eq!(cohort_stats(&[rep("a", 0, 3)]), Err(StatsError::ZeroMean(RankKey::K)));
        assert_eq!(cohort_stats(&[rep("a", 3, 0)]), Err(StatsError::ZeroMean(RankKey::H)));
    }

    #[test]
    fn stats_display_rounds() {
        let s = cohort_stats(&[rep("a", 183, 38), rep("b", 391, 104)]).unwrap();
        let text = s.to_string();
        assert!(text.contains("K = 287 ± 104  (CV_K = 0.36)"), "{text}");
        assert!(text.contains("h = 71 ± 33  (CV_h = 0.46)"), "{text}");
    }

    #[test]
    fn rank_key_parsing() {
        assert_eq!("k".parse::<RankKey>(), Ok(RankKey::K));
        assert_eq!("H".parse::<RankKey>(), Ok(RankKey::H));
        assert!("g".parse::<RankKey>().is_err());
    }
}
