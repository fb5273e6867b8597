use std::collections::BTreeSet;
use std::ffi::OsString;
use std::ops::RangeInclusive;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use kindex_core::synthgen::SynthParams;
use kindex_core::RankKey;

use crate::CliError;

#[derive(Debug, Parser)]
#[command(
    name = "kindex",
    version,
    about = "K-index and h-index analytics for citation networks"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Check a corpus for structural problems without building the graph.
    Validate {
        #[command(flatten)]
        corpus: CorpusArgs,
        /// Expected number of paper records.
        #[arg(long)]
        declared_count: Option<u64>,
        #[command(flatten)]
        out: OutputArgs,
    },
    /// Compute per-author indices for every author in a corpus.
    Index {
        #[command(flatten)]
        corpus: CorpusArgs,
        #[command(flatten)]
        filter: CitationArgs,
        #[command(flatten)]
        out: OutputArgs,
    },
    /// Rank a cohort and print the shortlist.
    Rank {
        #[command(flatten)]
        cohort: CohortArgs,
        /// Number of entries to keep.
        #[arg(long = "top", default_value_t = 12, value_parser = clap::value_parser!(u64).range(1..))]
        top: u64,
        /// Ranking key.
        #[arg(long = "by", value_enum, default_value_t = KeyArg::K)]
        by: KeyArg,
        #[command(flatten)]
        out: OutputArgs,
    },
    /// Mean, standard deviation and coefficient of variation of K and h.
    Stats {
        #[command(flatten)]
        cohort: CohortArgs,
        #[command(flatten)]
        out: OutputArgs,
    },
    /// Export the K versus h scatter table, optionally as an SVG figure.
    Scatter {
        #[command(flatten)]
        cohort: CohortArgs,
        /// Author id to highlight (repeatable).
        #[arg(long = "highlight")]
        highlight: Vec<String>,
        /// Fixture whose rows join the cohort highlighted (repeatable).
        #[arg(long = "highlight-fixture")]
        highlight_fixtures: Vec<PathBuf>,
        /// Also render the scatter as SVG to this path.
        #[arg(long)]
        svg: Option<PathBuf>,
        #[command(flatten)]
        out: OutputArgs,
    },
    /// Generate a synthetic corpus in the records format.
    Generate {
        /// Number of papers.
        #[arg(long, default_value_t = 1000, value_parser = clap::value_parser!(u64).range(1..))]
        papers: u64,
        /// Size of the author pool (default: papers / 10).
        #[arg(long)]
        authors: Option<u64>,
        /// Authors per paper, as N or MIN-MAX.
        #[arg(long, default_value = "1-4")]
        authors_per_paper: String,
        /// References per paper, as N or MIN-MAX.
        #[arg(long, default_value = "0-10")]
        refs: String,
        /// Attachment exponent; 0 is uniform.
        #[arg(long, default_value_t = 1.0)]
        exponent: f64,
        /// Tag attached with a probability, as NAME=P (repeatable).
        #[arg(long = "tag")]
        tags: Vec<String>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Write to this path instead of standard output.
        #[arg(long)]
        output: Option<PathBuf>,
    },
}

#[derive(Debug, Args)]
pub struct CorpusArgs {
    /// Corpus file: line-delimited JSON records, or a papers CSV with --edges.
    pub corpus: PathBuf,
    /// Edges CSV (citing_id,cited_id); switches the corpus to CSV format.
    #[arg(long)]
    pub edges: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct CitationArgs {
    /// Report K computed without self-citations.
    #[arg(long = "exclude-self-citations")]
    pub exclude_self: bool,
}

#[derive(Debug, Args)]
pub struct CohortArgs {
    /// Corpus to compute the cohort from.
    pub corpus: Option<PathBuf>,
    #[arg(long, requires = "corpus")]
    pub edges: Option<PathBuf>,
    /// Author fixture CSV (repeatable); rows join the cohort.
    #[arg(long = "fixture")]
    pub fixtures: Vec<PathBuf>,
    /// Drop authors carrying this tag (repeatable).
    #[arg(long = "exclude-tag")]
    pub exclude_tags: Vec<String>,
    #[command(flatten)]
    pub citations: CitationArgs,
}

#[derive(Debug, Args)]
pub struct OutputArgs {
    #[arg(long, value_enum, default_value_t = Format::Table)]
    pub format: Format,
    /// Write to this path instead of standard output.
    #[arg(long)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Table,
    Csv,
    Jsonl,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum KeyArg {
    K,
    H,
}

impl From<KeyArg> for RankKey {
    fn from(k: KeyArg) -> Self {
        match k {
            KeyArg::K => RankKey::K,
            KeyArg::H => RankKey::H,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SubcommandKind {
    Validate,
    Index,
    Rank,
    Stats,
    Scatter,
    Generate,
}

/// Where a run reads its data from.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Inputs {
    pub corpus: Option<PathBuf>,
    pub edges: Option<PathBuf>,
    pub fixtures: Vec<PathBuf>,
    pub highlight_fixtures: Vec<PathBuf>,
}

/// A fully validated invocation.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub subcommand: SubcommandKind,
    pub inputs: Inputs,
    pub exclude_self: bool,
    pub exclude_tags: BTreeSet<String>,
    pub top_n: usize,
    pub key: RankKey,
    pub format: Format,
    pub output: Option<PathBuf>,
    pub highlight: BTreeSet<String>,
    pub svg: Option<PathBuf>,
    pub declared_count: Option<u64>,
    pub synth: Option<SynthParams>,
}

impl RunConfig {
    fn base(subcommand: SubcommandKind) -> Self {
        RunConfig {
            subcommand,
            inputs: Inputs::default(),
            exclude_self: false,
            exclude_tags: BTreeSet::new(),
            top_n: 12,
            key: RankKey::K,
            format: Format::Table,
            output: None,
            highlight: BTreeSet::new(),
            svg: None,
            declared_count: None,
            synth: None,
        }
    }

    pub fn parse_from<I, T>(argv: I) -> Result<Self, clap::Error>
    where
        I: IntoIterator<Item = T>,
        T: Into<OsString> + Clone,
    {
        Cli::try_parse_from(argv).map(|cli| cli.command.into())
    }

    /// Cross-flag checks that clap cannot express. Runs before any I/O.
    pub fn validate(self) -> Result<Self, CliError> {
        let has_cohort = self.inputs.corpus.is_some() || !self.inputs.fixtures.is_empty();
        if matches!(
            self.subcommand,
            SubcommandKind::Rank | SubcommandKind::Stats | SubcommandKind::Scatter
        ) && !has_cohort
            && self.inputs.highlight_fixtures.is_empty()
        {
            return Err(CliError::Usage("provide a corpus or at least one --fixture".into()));
        }
        if let Some(p) = &self.synth {
            p.validate()?;
        }
        Ok(self)
    }
}

impl From<Command> for RunConfig {
    fn from(cmd: Command) -> Self {
        fn cohort(cfg: &mut RunConfig, c: CohortArgs) {
            cfg.inputs.corpus = c.corpus;
            cfg.inputs.edges = c.edges;
            cfg.inputs.fixtures = c.fixtures;
            cfg.exclude_tags = c.exclude_tags.iter().map(|t| t.trim().to_lowercase()).collect();
            cfg.exclude_self = c.citations.exclude_self;
        }
        fn output(cfg: &mut RunConfig, o: OutputArgs) {
            cfg.format = o.format;
            cfg.output = o.output;
        }
        match cmd {
            Command::Validate {
                corpus,
                declared_count,
                out,
            } => {
                let mut cfg = RunConfig::base(SubcommandKind::Validate);
                cfg.inputs.corpus = Some(corpus.corpus);
                cfg.inputs.edges = corpus.edges;
                cfg.declared_count = declared_count;
                output(&mut cfg, out);
                cfg
            }
            Command::Index { corpus, filter, out } => {
                let mut cfg = RunConfig::base(SubcommandKind::Index);
                cfg.inputs.corpus = Some(corpus.corpus);
                cfg.inputs.edges = corpus.edges;
                cfg.exclude_self = filter.exclude_self;
                output(&mut cfg, out);
                cfg
            }
            Command::Rank {
                cohort: c,
                top,
                by,
                out,
            } => {
                let mut cfg = RunConfig::base(SubcommandKind::Rank);
                cohort(&mut cfg, c);
                cfg.top_n = usize::try_from(top).unwrap_or(usize::MAX);
                cfg.key = by.into();
                output(&mut cfg, out);
                cfg
            }
            Command::Stats { cohort: c, out } => {
                let mut cfg = RunConfig::base(SubcommandKind::Stats);
                cohort(&mut cfg, c);
                output(&mut cfg, out);
                cfg
            }
            Command::Scatter {
                cohort: c,
                highlight,
                highlight_fixtures,
                svg,
                out,
            } => {
                let mut cfg = RunConfig::base(SubcommandKind::Scatter);
                cohort(&mut cfg, c);
                cfg.highlight = highlight.into_iter().collect();
                cfg.inputs.highlight_fixtures = highlight_fixtures;
                cfg.svg = svg;
                output(&mut cfg, out);
                cfg
            }
            Command::Generate {
                papers,
                authors,
                authors_per_paper,
                refs,
                exponent,
                tags,
                seed,
                output,
            } => {
                let mut cfg = RunConfig::base(SubcommandKind::Generate);
                cfg.output = output;
                let papers = papers as usize;
                cfg.synth = Some(SynthParams {
                    paper_count: papers,
                    author_count: authors.map_or((papers / 10).max(1), |a| a as usize),
                    authors_per_paper: parse_range(&authors_per_paper).unwrap_or(RangeInclusive::new(1, 0)),
                    references_per_paper: parse_range(&refs).unwrap_or(RangeInclusive::new(1, 0)),
                    preferential_exponent: exponent,
                    tag_pool: tags.iter().map(|t| parse_tag(t)).collect(),
                    seed,
                });
                cfg
            }
        }
    }
}

/// "N" or "MIN-MAX". Malformed input yields None, which becomes an empty
/// range and is rejected by parameter validation.
fn parse_range(s: &str) -> Option<RangeInclusive<usize>> {
    match s.split_once('-') {
        Some((lo, hi)) => Some(lo.trim().parse().ok()?..=hi.trim().parse().ok()?),
        None => {
            let n = s.trim().parse().ok()?;
            Some(n..=n)
        }
    }
}

/// "name=p"; a bare name gets probability 1. Unparsable probabilities map to
/// NaN and fail validation.
fn parse_tag(s: &str) -> (String, f64) {
    match s.split_once('=') {
        Some((name, p)) => (name.trim().to_string(), p.trim().parse().unwrap_or(f64::NAN)),
        None => (s.trim().to_string(), 1.0),
    }
}
