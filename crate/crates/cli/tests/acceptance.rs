//! Acceptance checks. Prints one PASS/FAIL line per criterion and exits
//! nonzero if any fails.

use std::collections::BTreeSet;
use std::fs;
use std::panic;
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::{Duration, Instant};

use kindex_core::ingest::{merge_fixture_rows, parse_fixture, write_records};
use kindex_core::{
    all_reports, build_graph, cohort_stats, crossing_index, filter_tags, generate, ordinal_rank, rank_by, shortlist,
    AuthorFixtureRow, CitationCountProfile, CohortStats, RankKey, SynthParams,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use tempfile::TempDir;

type Check = fn() -> Result<String, String>;

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn fixture(name: &str) -> Vec<AuthorFixtureRow> {
    let path = PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("../../fixtures")
        .join(name);
    parse_fixture(&path).unwrap_or_else(|e| panic!("{e}"))
}

fn row(id: &str, k: u64, h: u64) -> AuthorFixtureRow {
    AuthorFixtureRow {
        author_id: id.into(),
        display_name: String::new(),
        k,
        h,
        tags: BTreeSet::new(),
    }
}

fn brute_crossing(counts: &[u64]) -> u64 {
    let mut sorted = counts.to_vec();
    sorted.sort_unstable_by(|a, b| b.cmp(a));
    (1..=sorted.len())
        .filter(|&r| sorted[r - 1] >= r as u64)
        .max()
        .unwrap_or(0) as u64
}

fn crossing_oracle() -> Result<String, String> {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let cases: Vec<Vec<u64>> = (0..10_000)
        .map(|_| {
            let len = rng.random_range(0..=500);
            // Mix wide and narrow count ranges so crossings land at all depths.
            let hi = if rng.random_bool(0.5) {
                10_000
            } else {
                rng.random_range(0..=600)
            };
            (0..len).map(|_| rng.random_range(0..=hi)).collect()
        })
        .collect();
    let start = Instant::now();
    let got: Vec<u64> = cases
        .iter()
        .map(|c| crossing_index(&CitationCountProfile::from_counts(c.iter().copied())))
        .collect();
    let elapsed = start.elapsed();
    for (c, g) in cases.iter().zip(&got) {
        let want = brute_crossing(c);
        ensure(*g == want, || format!("len {} gave {g}, brute force {want}", c.len()))?;
    }
    ensure(elapsed < Duration::from_secs(2), || format!("took {elapsed:?}"))?;
    Ok(format!("10000 multisets exact, {elapsed:.2?}"))
}

const TABLE1: [(&str, u64, u64); 12] = [
    ("alivisatos", 617, 149),
    ("graetzel", 611, 204),
    ("morozov", 559, 38),
    ("xia", 542, 190),
    ("kim", 519, 84),
    ("wang", 515, 195),
    ("cui", 495, 124),
    ("katsnelson", 489, 89),
    ("yang", 471, 118),
    ("avouris", 465, 122),
    ("zettl", 460, 104),
    ("hone", 440, 72),
];

const TABLE2: [(&str, u64, u64); 12] = [
    ("alivisatos", 617, 149),
    ("graetzel", 611, 204),
    ("xia", 542, 190),
    ("wang", 515, 195),
    ("yang", 471, 118),
    ("nazeeruddin", 436, 126),
    ("halas", 427, 122),
    ("bao", 412, 104),
    ("rogers", 405, 127),
    ("nozik", 386, 77),
    ("peebles", 380, 73),
    ("zoller", 379, 117),
];

fn table1() -> Result<String, String> {
    let ranking = rank_by(&fixture("table1.csv"), RankKey::K).map_err(|e| e.to_string())?;
    let got: Vec<_> = ranking
        .entries
        .iter()
        .map(|e| (e.author_id.as_str(), e.k, e.h))
        .collect();
    ensure(got == TABLE1, || format!("got {got:?}"))?;
    let ranks: Vec<usize> = ranking.entries.iter().map(|e| e.rank).collect();
    ensure(ranks == (1..=12).collect::<Vec<_>>(), || format!("ranks {ranks:?}"))?;
    Ok("12 rows in published order".into())
}

fn table2() -> Result<String, String> {
    let cohort = merge_fixture_rows(fixture("table1.csv").into_iter().chain(fixture("table2.csv")))
        .map_err(|e| e.to_string())?;
    let survivors = filter_tags(&cohort, &["graphene".to_string()].into());
    let top = shortlist(&rank_by(&survivors, RankKey::K).map_err(|e| e.to_string())?, 12);
    let got: Vec<_> = top.entries.iter().map(|e| (e.author_id.as_str(), e.k, e.h)).collect();
    ensure(got == TABLE2, || format!("got {got:?}"))?;
    let peebles = ordinal_rank(&survivors, "peebles", RankKey::K).map_err(|e| e.to_string())?;
    ensure(peebles == 11, || format!("peebles at {peebles}"))?;
    Ok(format!(
        "{} of {} survive the filter; peebles ordinal 11",
        survivors.len(),
        cohort.len()
    ))
}

/// Pairs at mean ± std have exactly that population mean and std, whatever
/// the number of pairs.
fn cv_cohort(n_pairs: usize, (mk, sk): (u64, u64), (mh, sh): (u64, u64)) -> Vec<AuthorFixtureRow> {
    (0..n_pairs)
        .flat_map(|i| {
            [
                row(&format!("lo{i}"), mk - sk, mh - sh),
                row(&format!("hi{i}"), mk + sk, mh + sh),
            ]
        })
        .collect()
}

fn coefficient_of_variation() -> Result<String, String> {
    let mut last = None;
    for pairs in [1, 5, 68] {
        let s: CohortStats = cohort_stats(&cv_cohort(pairs, (287, 104), (71, 33))).map_err(|e| e.to_string())?;
        ensure(
            (s.mean_k, s.std_k, s.mean_h, s.std_h) == (287.0, 104.0, 71.0, 33.0),
            || format!("moments {s:?}"),
        )?;
        ensure((s.cv_k - 0.36).abs() <= 0.005, || format!("cv_k {}", s.cv_k))?;
        ensure((s.cv_h - 0.46).abs() <= 0.005, || format!("cv_h {}", s.cv_h))?;
        last = Some(s);
    }
    let s = last.unwrap();
    Ok(format!("cv_k {:.4}, cv_h {:.4}", s.cv_k, s.cv_h))
}

fn shortlist_ratio() -> Result<String, String> {
    let mut rng = ChaCha8Rng::seed_from_u64(136);
    let cohort: Vec<AuthorFixtureRow> = (0..136)
        .map(|i| {
            row(
                &format!("a{i:03}"),
                rng.random_range(100..700),
                rng.random_range(20..200),
            )
        })
        .collect();
    let top = shortlist(&rank_by(&cohort, RankKey::K).map_err(|e| e.to_string())?, 12);
    let f = top.cohort_fraction();
    ensure(top.len() == 12 && top.cohort_size == 136, || {
        format!("{} of {}", top.len(), top.cohort_size)
    })?;
    ensure((f - 0.088).abs() <= 0.001, || format!("fraction {f}"))?;
    Ok(format!("12/136 = {f:.4}"))
}

fn laureate_ordinals() -> Result<String, String> {
    let cohort = merge_fixture_rows(
        fixture("table1.csv")
            .into_iter()
            .chain(fixture("table2.csv"))
            .chain(fixture("laureates_2019.csv")),
    )
    .map_err(|e| e.to_string())?;
    let at = |a: &str, key| ordinal_rank(&cohort, a, key).map_err(|e| e.to_string());
    let k = [
        at("peebles", RankKey::K)?,
        at("mayor", RankKey::K)?,
        at("queloz", RankKey::K)?,
    ];
    let h = [
        at("peebles", RankKey::H)?,
        at("mayor", RankKey::H)?,
        at("queloz", RankKey::H)?,
    ];
    ensure(k[0] < k[1] && k[1] < k[2], || format!("K ordinals {k:?}"))?;
    ensure(h[2] < h[0] && h[0] < h[1], || format!("h ordinals {h:?}"))?;
    Ok(format!("K ordinals (P,M,Q) {k:?}, h ordinals {h:?}"))
}

fn monotonicity() -> Result<String, String> {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut added = 0;
    for seed in 0..1000u64 {
        let params = SynthParams {
            paper_count: rng.random_range(2..=200),
            author_count: rng.random_range(1..=30),
            authors_per_paper: 1..=3,
            references_per_paper: 0..=rng.random_range(0..=12),
            preferential_exponent: rng.random_range(0.0..2.0),
            tag_pool: Vec::new(),
            seed,
        };
        let mut records = generate(&params).map_err(|e| e.to_string())?;
        let before = all_reports(&build_graph(records.clone()).map_err(|e| e.to_string())?);
        for r in &before {
            ensure(r.k_no_self <= r.k, || {
                format!("seed {seed}: {} k_no_self > k", r.author_id)
            })?;
        }
        // A new backward edge between papers not already linked.
        let candidates: Vec<(usize, usize)> = (1..records.len())
            .flat_map(|i| (0..i).map(move |j| (i, j)))
            .filter(|&(i, j)| !records[i].cites.contains(&records[j].paper_id))
            .collect();
        if candidates.is_empty() {
            continue;
        }
        let (i, j) = candidates[rng.random_range(0..candidates.len())];
        let cited = records[j].paper_id.clone();
        records[i].cites.push(cited);
        added += 1;
        let after = all_reports(&build_graph(records).map_err(|e| e.to_string())?);
        ensure(before.len() == after.len(), || {
            format!("seed {seed}: author set changed")
        })?;
        for (b, a) in before.iter().zip(&after) {
            ensure(a.k >= b.k && a.h >= b.h, || {
                format!(
                    "seed {seed}: {} went from K={} h={} to K={} h={}",
                    b.author_id, b.k, b.h, a.k, a.h
                )
            })?;
        }
    }
    Ok(format!("1000 corpora, {added} edges added, zero violations"))
}

fn run_cli(args: &[&str]) -> Result<Vec<u8>, String> {
    let (mut out, mut err) = (Vec::new(), Vec::new());
    let code = kindex_cli::run(
        std::iter::once("kindex").chain(args.iter().copied()),
        &mut out,
        &mut err,
    );
    ensure(code == 0, || {
        format!("{args:?} exited {code}: {}", String::from_utf8_lossy(&err))
    })?;
    Ok(out)
}

fn pipeline_consistency() -> Result<String, String> {
    let dir = TempDir::new().map_err(|e| e.to_string())?;
    let corpus = dir.path().join("corpus.jsonl");
    let reports_csv = dir.path().join("reports.csv");
    let (corpus_s, reports_s) = (corpus.to_str().unwrap(), reports_csv.to_str().unwrap());
    let mut runs = 0;
    for seed in 0..20u64 {
        let params = SynthParams {
            paper_count: 300 + 50 * seed as usize,
            author_count: 40,
            preferential_exponent: 0.1 * seed as f64,
            seed,
            ..SynthParams::default()
        };
        let records = generate(&params).map_err(|e| e.to_string())?;
        write_records(fs::File::create(&corpus).map_err(|e| e.to_string())?, &records).map_err(|e| e.to_string())?;
        let reports = all_reports(&build_graph(records).map_err(|e| e.to_string())?);
        for exclude_self in [false, true] {
            let cohort: Vec<_> = reports
                .iter()
                .cloned()
                .map(|r| if exclude_self { r.excluding_self_citations() } else { r })
                .collect();
            let direct = cohort_stats(&cohort).map_err(|e| e.to_string())?;

            let mut index = vec!["index", corpus_s, "--format", "csv", "--output", reports_s];
            if exclude_self {
                index.push("--exclude-self-citations");
            }
            run_cli(&index)?;
            let out = run_cli(&["stats", "--fixture", reports_s, "--format", "jsonl"])?;
            let via: CohortStats = serde_json::from_slice(&out).map_err(|e| e.to_string())?;
            ensure(via == direct, || format!("seed {seed}: {via:?} != {direct:?}"))?;

            // Same thing without the intermediate file.
            let mut stats = vec!["stats", corpus_s, "--format", "jsonl"];
            if exclude_self {
                stats.push("--exclude-self-citations");
            }
            let once: CohortStats = serde_json::from_slice(&run_cli(&stats)?).map_err(|e| e.to_string())?;
            ensure(once == direct, || format!("seed {seed}: {once:?} != {direct:?}"))?;
            runs += 1;
        }
    }
    Ok(format!("{runs} corpus/flag combinations agree exactly"))
}

fn peak_rss_bytes() -> Option<u64> {
    let status = fs::read_to_string("/proc/self/status").ok()?;
    let line = status.lines().find(|l| l.starts_with("VmHWM:"))?;
    let kb: u64 = line.split_whitespace().nth(1)?.parse().ok()?;
    Some(kb * 1024)
}

fn performance() -> Result<String, String> {
    let params = SynthParams {
        paper_count: 100_000,
        author_count: 20_000,
        authors_per_paper: 1..=4,
        references_per_paper: 0..=20,
        preferential_exponent: 1.0,
        tag_pool: vec![("graphene".into(), 0.05)],
        seed: 2019,
    };
    let start = Instant::now();
    let records = generate(&params).map_err(|e| e.to_string())?;
    let generated = start.elapsed();
    let graph = build_graph(records).map_err(|e| e.to_string())?;
    let built = start.elapsed();
    let reports = all_reports(&graph);
    let total = start.elapsed();
    let edges = graph.edge_count();
    ensure((900_000..=1_100_000).contains(&edges), || format!("{edges} edges"))?;
    ensure(!reports.is_empty(), || "no reports".into())?;
    ensure(total < Duration::from_secs(30), || format!("took {total:?}"))?;
    let rss = peak_rss_bytes();
    if let Some(rss) = rss {
        ensure(rss < 2 << 30, || format!("peak RSS {} MiB", rss >> 20))?;
    }
    Ok(format!(
        "{} papers, {edges} edges, {} authors: generate {generated:.2?}, build {:.2?}, reports {:.2?}, total {total:.2?}, peak RSS {}",
        graph.paper_count(),
        reports.len(),
        built - generated,
        total - built,
        rss.map_or("unavailable".into(), |b| format!("{} MiB", b >> 20))
    ))
}

fn main() -> ExitCode {
    let checks: [(&str, Check); 9] = [
        ("crossing index matches brute force", crossing_oracle),
        ("ranking by K reproduces table 1", table1),
        ("graphene-filtered ranking reproduces table 2", table2),
        ("coefficient of variation", coefficient_of_variation),
        ("shortlist cohort fraction", shortlist_ratio),
        ("laureate K/h ordinal inversion", laureate_ordinals),
        ("monotonicity under added citations", monotonicity),
        ("index export to stats pipeline consistency", pipeline_consistency),
        ("100k-paper corpus time and memory", performance),
    ];
    // Panics are reported on the FAIL line instead.
    panic::set_hook(Box::new(|_| {}));
    let mut failed = 0;
    for (i, (name, check)) in checks.iter().enumerate() {
        let result = panic::catch_unwind(check).unwrap_or_else(|p| {
            let msg = p
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_default();
            Err(format!("panicked: {msg}"))
        });
        match result {
            Ok(detail) => println!("PASS [{}] {name}: {detail}", i + 1),
            Err(detail) => {
                failed += 1;
                println!("FAIL [{}] {name}: {detail}", i + 1);
            }
        }
    }
    println!("acceptance: {} passed, {failed} failed", checks.len() - failed);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
