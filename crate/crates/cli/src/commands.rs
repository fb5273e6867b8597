use std::collections::BTreeSet;
use std::fs;
use std::io::Write;

use kindex_core::ingest::{
    merge_fixture_rows, parse_corpus, parse_fixture, validate_dataset, write_records, write_reports_csv,
    DatasetManifest, Severity, ValidationStatus,
};
use kindex_core::{
    all_reports, build_graph, cohort_stats, filter_tags, rank_by, scatter_export, shortlist, AuthorFixtureRow,
    CitationGraph, IndexReport,
};
use serde::Serialize;

use crate::args::{Format, Inputs, RunConfig};
use crate::table::{Align, TextTable};
use crate::{CliError, Outcome, Status};

fn manifest(inputs: &Inputs) -> Result<DatasetManifest, CliError> {
    let corpus = inputs
        .corpus
        .as_ref()
        .ok_or_else(|| CliError::Usage("a corpus path is required".into()))?;
    Ok(match &inputs.edges {
        Some(edges) => DatasetManifest::papers_and_edges(corpus, edges),
        None => DatasetManifest::records(corpus),
    })
}

fn load_graph(inputs: &Inputs) -> Result<CitationGraph, CliError> {
    let records = parse_corpus(&manifest(inputs)?)?;
    Ok(build_graph(records)?)
}

/// Reports for every author with at least one paper, sorted by author id.
fn corpus_reports(cfg: &RunConfig) -> Result<Vec<IndexReport>, CliError> {
    let graph = load_graph(&cfg.inputs)?;
    let reports = all_reports(&graph);
    Ok(if cfg.exclude_self {
        reports.into_iter().map(IndexReport::excluding_self_citations).collect()
    } else {
        reports
    })
}

/// The cohort: corpus-derived reports first, then fixture rows.
fn load_cohort(cfg: &RunConfig) -> Result<Vec<AuthorFixtureRow>, CliError> {
    let mut rows = Vec::new();
    if cfg.inputs.corpus.is_some() {
        rows.extend(corpus_reports(cfg)?.iter().map(AuthorFixtureRow::from));
    }
    for path in &cfg.inputs.fixtures {
        rows.extend(parse_fixture(path)?);
    }
    Ok(merge_fixture_rows(rows)?)
}

fn jsonl<T: Serialize>(items: impl IntoIterator<Item = T>) -> Result<Vec<u8>, CliError> {
    let mut out = Vec::new();
    for item in items {
        serde_json::to_writer(&mut out, &item).map_err(std::io::Error::from)?;
        out.push(b'\n');
    }
    Ok(out)
}

fn csv_rows<I, R>(header: &[&str], rows: I) -> Result<Vec<u8>, CliError>
where
    I: IntoIterator<Item = R>,
    R: IntoIterator,
    R::Item: AsRef<[u8]>,
{
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(header).map_err(std::io::Error::from)?;
    for r in rows {
        w.write_record(r).map_err(std::io::Error::from)?;
    }
    w.into_inner().map_err(|e| CliError::Io(e.into_error()))
}

fn join_tags(tags: &BTreeSet<String>) -> String {
    tags.iter().map(String::as_str).collect::<Vec<_>>().join(";")
}

pub fn cmd_validate(cfg: &RunConfig) -> Result<Outcome, CliError> {
    let mut manifest = manifest(&cfg.inputs)?;
    manifest.declared_count = cfg.declared_count;
    let report = validate_dataset(&manifest)?;
    let status = match report.status() {
        ValidationStatus::Clean => Status::Success,
        ValidationStatus::Warnings => Status::Warnings,
        ValidationStatus::Fatal => Status::Fatal,
    };
    let data = match cfg.format {
        Format::Table => format!("{report}\n").into_bytes(),
        Format::Jsonl => jsonl([&report])?,
        Format::Csv => csv_rows(
            &["severity", "location", "message"],
            report.violations.iter().map(|v| {
                [
                    match v.severity {
                        Severity::Warning => "warning",
                        Severity::Fatal => "fatal",
                    },
                    v.location.as_deref().unwrap_or(""),
                    v.message.as_str(),
                ]
            }),
        )?,
    };
    Ok(Outcome {
        status,
        data,
        diagnostics: Vec::new(),
    })
}

pub fn cmd_index(cfg: &RunConfig) -> Result<Outcome, CliError> {
    let reports = corpus_reports(cfg)?;
    let data = match cfg.format {
        Format::Csv => {
            let mut buf = Vec::new();
            write_reports_csv(&mut buf, &reports)?;
            buf
        }
        Format::Jsonl => jsonl(&reports)?,
        Format::Table => {
            let mut t = TextTable::new([
                ("author_id", Align::Left),
                ("K", Align::Right),
                ("K_no_self", Align::Right),
                ("h", Align::Right),
                ("CA", Align::Right),
                ("N", Align::Right),
                ("tags", Align::Left),
            ]);
            for r in &reports {
                t.row(vec![
                    r.author_id.clone(),
                    r.k.to_string(),
                    r.k_no_self.to_string(),
                    r.h.to_string(),
                    r.citing_article_count.to_string(),
                    r.paper_count.to_string(),
                    join_tags(&r.tags),
                ]);
            }
            t.render().into_bytes()
        }
    };
    Ok(Outcome {
        data,
        ..Outcome::default()
    })
}

pub fn cmd_rank(cfg: &RunConfig) -> Result<Outcome, CliError> {
    let cohort = filter_tags(&load_cohort(cfg)?, &cfg.exclude_tags);
    let ranking = rank_by(&cohort, cfg.key)?;
    let top = shortlist(&ranking, cfg.top_n);
    let data = match cfg.format {
        Format::Jsonl => jsonl(&top.entries)?,
        Format::Csv => csv_rows(
            &["rank", "author_id", "name", "k", "h"],
            top.entries.iter().map(|e| {
                [
                    e.rank.to_string(),
                    e.author_id.clone(),
                    e.name().to_string(),
                    e.k.to_string(),
                    e.h.to_string(),
                ]
            }),
        )?,
        Format::Table => {
            let mut t = TextTable::new([
                ("Rank", Align::Right),
                ("Name", Align::Left),
                ("K", Align::Right),
                ("h", Align::Right),
            ]);
            for e in &top.entries {
                t.row(vec![
                    e.rank.to_string(),
                    e.name().to_string(),
                    e.k.to_string(),
                    e.h.to_string(),
                ]);
            }
            let mut s = t.render();
            s.push_str(&format!(
                "\n{} of {} authors ranked by {} ({:.1}%)\n",
                top.len(),
                top.cohort_size,
                top.key,
                100.0 * top.cohort_fraction()
            ));
            s.into_bytes()
        }
    };
    Ok(Outcome {
        data,
        ..Outcome::default()
    })
}

pub fn cmd_stats(cfg: &RunConfig) -> Result<Outcome, CliError> {
    let cohort = filter_tags(&load_cohort(cfg)?, &cfg.exclude_tags);
    let stats = cohort_stats(&cohort)?;
    let data = match cfg.format {
        Format::Table => format!("{stats}\n").into_bytes(),
        Format::Jsonl => jsonl([&stats])?,
        Format::Csv => csv_rows(
            &["cohort_size", "mean_k", "std_k", "cv_k", "mean_h", "std_h", "cv_h"],
            [[
                stats.cohort_size.to_string(),
                stats.mean_k.to_string(),
                stats.std_k.to_string(),
                stats.cv_k.to_string(),
                stats.mean_h.to_string(),
                stats.std_h.to_string(),
                stats.cv_h.to_string(),
            ]],
        )?,
    };
    Ok(Outcome {
        data,
        ..Outcome::default()
    })
}

pub fn cmd_scatter(cfg: &RunConfig) -> Result<Outcome, CliError> {
    let mut rows = load_cohort(cfg)?;
    let mut highlight = cfg.highlight.clone();
    for path in &cfg.inputs.highlight_fixtures {
        let extra = parse_fixture(path)?;
        highlight.extend(extra.iter().map(|r| r.author_id.clone()));
        rows.extend(extra);
    }
    let cohort = filter_tags(&merge_fixture_rows(rows)?, &cfg.exclude_tags);
    let table = scatter_export(&cohort, &highlight);

    let present: BTreeSet<&str> = table.rows.iter().map(|r| r.author_id.as_str()).collect();
    let diagnostics = highlight
        .iter()
        .filter(|id| !present.contains(id.as_str()))
        .map(|id| format!("warning: highlighted author '{id}' is not in the cohort"))
        .collect();

    if let Some(svg) = &cfg.svg {
        fs::write(svg, table.to_svg()).map_err(|source| CliError::Output {
            path: svg.display().to_string(),
            source,
        })?;
    }
    let data = match cfg.format {
        Format::Csv => table.to_csv().into_bytes(),
        Format::Jsonl => jsonl(&table.rows)?,
        Format::Table => {
            let mut t = TextTable::new([
                ("author_id", Align::Left),
                ("h", Align::Right),
                ("k", Align::Right),
                ("group", Align::Left),
            ]);
            for r in &table.rows {
                t.row(vec![
                    r.author_id.clone(),
                    r.h.to_string(),
                    r.k.to_string(),
                    r.group.as_str().to_string(),
                ]);
            }
            t.render().into_bytes()
        }
    };
    Ok(Outcome {
        data,
        diagnostics,
        ..Outcome::default()
    })
}

pub fn cmd_generate(cfg: &RunConfig) -> Result<Outcome, CliError> {
    let params = cfg
        .synth
        .as_ref()
        .ok_or_else(|| CliError::Usage("generate needs synthesis parameters".into()))?;
    let records = kindex_core::generate(params)?;
    let mut data = Vec::new();
    write_records(&mut data, &records)?;
    data.flush()?;
    let edges: usize = records.iter().map(|r| r.cites.len()).sum();
    Ok(Outcome {
        data,
        diagnostics: vec![format!("generated {} papers with {edges} citations", records.len())],
        ..Outcome::default()
    })
}
