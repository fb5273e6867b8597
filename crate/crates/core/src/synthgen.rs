//! Seeded synthetic citation corpora.
//!
//! Papers are created one at a time. Paper i cites a random number of
//! distinct earlier papers, each drawn with probability proportional to
//! (in-degree + 1)^exponent, so the corpus is acyclic by construction.
//! Authors are drawn uniformly from a fixed pool; each tag in the pool is
//! attached independently with its own probability.

use std::ops::RangeInclusive;

use rand::seq::index;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::graph::PaperRecord;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SynthParams {
    pub paper_count: usize,
    pub author_count: usize,
    pub authors_per_paper: RangeInclusive<usize>,
    pub references_per_paper: RangeInclusive<usize>,
    pub preferential_exponent: f64,
    pub tag_pool: Vec<(String, f64)>,
    pub seed: u64,
}

impl Default for SynthParams {
    fn default() -> Self {
        SynthParams {
            paper_count: 1000,
            author_count: 100,
            authors_per_paper: 1..=4,
            references_per_paper: 0..=10,
            preferential_exponent: 1.0,
            tag_pool: Vec::new(),
            seed: 0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SynthError {
    #[error("paper_count must be at least 1")]
    NoPapers,
    #[error("author_count must be at least 1")]
    NoAuthors,
    #[error("{0} range is empty")]
    EmptyRange(&'static str),
    #[error("preferential exponent must be finite and non-negative, got {0}")]
    BadExponent(f64),
    #[error("tag '{tag}' has probability {p}, expected a value in [0, 1]")]
    BadProbability { tag: String, p: f64 },
    #[error("tag '{0}' must be non-empty and lowercase")]
    BadTag(String),
}

impl SynthParams {
    pub fn validate(&self) -> Result<(), SynthError> {
        if self.paper_count == 0 {
            return Err(SynthError::NoPapers);
        }
        if self.author_count == 0 {
            return Err(SynthError::NoAuthors);
        }
        if self.authors_per_paper.is_empty() {
            return Err(SynthError::EmptyRange("authors_per_paper"));
        }
        if self.references_per_paper.is_empty() {
            return Err(SynthError::EmptyRange("references_per_paper"));
        }
        if !self.preferential_exponent.is_finite() || self.preferential_exponent < 0.0 {
            return Err(SynthError::BadExponent(self.preferential_exponent));
        }
        for (tag, p) in &self.tag_pool {
            if tag.is_empty() || tag.chars().any(char::is_uppercase) {
                return Err(SynthError::BadTag(tag.clone()));
            }
            if !(0.0..=1.0).contains(p) {
                return Err(SynthError::BadProbability {
                    tag: tag.clone(),
                    p: *p,
                });
            }
        }
        Ok(())
    }
}

/// Fenwick tree over non-negative weights, supporting point updates and
/// sampling an index by cumulative weight.
struct WeightTree {
    tree: Vec<f64>,
    weights: Vec<f64>,
}

impl WeightTree {
    fn new(capacity: usize) -> Self {
        WeightTree {
            tree: vec![0.0; capacity + 1],
            weights: vec![0.0; capacity],
        }
    }

    fn set(&mut self, i: usize, w: f64) {
        let delta = w - self.weights[i];
        self.weights[i] = w;
        let mut j = i + 1;
        while j < self.tree.len() {
            self.tree[j] += delta;
            j += j & j.wrapping_neg();
        }
    }

    /// Sum of weights over `0..len`.
    fn prefix(&self, len: usize) -> f64 {
        let mut j = len;
        let mut s = 0.0;
        while j > 0 {
            s += self.tree[j];
            j &= j - 1;
        }
        s
    }

    /// Smallest index i with prefix(i + 1) > target.
    fn find(&self, mut target: f64) -> usize {
        let n = self.tree.len() - 1;
        let mut pos = 0;
        let mut step = n.next_power_of_two();
        while step > 0 {
            let next = pos + step;
            if next <= n && self.tree[next] <= target {
                pos = next;
                target -= self.tree[next];
            }
            step >>= 1;
        }
        pos.min(n - 1)
    }
}

fn width(n: usize) -> usize {
    n.saturating_sub(1).to_string().len()
}

/// Generates a corpus. Identical parameters give identical output.
pub fn generate(params: &SynthParams) -> Result<Vec<PaperRecord>, SynthError> {
    params.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(params.seed);
    let n = params.paper_count;
    let (pw, aw) = (width(n), width(params.author_count));
    let ids: Vec<String> = (0..n).map(|i| format!("p{i:0pw$}")).collect();
    let exponent = params.preferential_exponent;
    let weight = |indeg: u32| (indeg as f64 + 1.0).powf(exponent);

    let mut in_degree = vec![0u32; n];
    let mut tree = WeightTree::new(n);
    let mut out = Vec::with_capacity(n);

    for i in 0..n {
        let want = rng.random_range(params.references_per_paper.clone()).min(i);
        let mut chosen: Vec<usize> = Vec::with_capacity(want);
        if want == i {
            chosen.extend(0..i);
        } else if exponent == 0.0 {
            chosen.extend(index::sample(&mut rng, i, want).iter());
        } else {
            // Draw without replacement by zeroing picked weights, then restore.
            while chosen.len() < want {
                let total = tree.prefix(i);
                let pick = tree.find(rng.random::<f64>() * total).min(i - 1);
                if tree.weights[pick] > 0.0 {
                    tree.set(pick, 0.0);
                    chosen.push(pick);
                }
            }
            for &c in &chosen {
                tree.set(c, weight(in_degree[c]));
            }
        }
        chosen.sort_unstable();
        for &c in &chosen {
            in_degree[c] += 1;
            if exponent != 0.0 {
                tree.set(c, weight(in_degree[c]));
            }
        }
        if exponent != 0.0 {
            tree.set(i, weight(0));
        }

        let n_auth = rng
            .random_range(params.authors_per_paper.clone())
            .min(params.author_count);
        let mut authors: Vec<usize> = index::sample(&mut rng, params.author_count, n_auth).into_vec();
        authors.sort_unstable();

        let tags: Vec<&str> = params
            .tag_pool
            .iter()
            .filter(|(_, p)| rng.random_bool(*p))
            .map(|(t, _)| t.as_str())
            .collect();

        out.push(
            PaperRecord::new(ids[i].clone())
                .with_authors(authors.iter().map(|a| format!("a{a:0aw$}")))
                .with_cites(chosen.iter().map(|&c| ids[c].clone()))
                .with_tags(tags),
        );
    }
    Ok(out)
}
