//! Store-wide analysis: every comparison, the per-trajectory summaries and
//! the prompt-level statistics, written as plot-ready CSV files.

use std::collections::BTreeMap;
use std::fs;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use reftrace_core::diff::{ChangeRecord, ChangeType, ComparisonKey, ComparisonRecord};
use reftrace_core::prompts::PromptId;
use reftrace_core::stats::{bonferroni, descriptive_stats, kruskal_wallis, mann_whitney_u};
use reftrace_core::trajectory::{
    convergence_series, cross_variant_series, detect_back_and_forth, horizontal_analysis, similarity_matrix,
    vertical_analysis, CellMode, ConvergenceRow, CrossVariantRow, OscillationFlag, SimilarityMatrix,
};
use reftrace_core::variantgen::VariantId;
use serde::Serialize;

use crate::output::{csv_writer, fmt_f64, fmt_opt, fmt_p};
use crate::store::{SnapshotStore, StoreError};

#[derive(Debug, thiserror::Error)]
pub enum AnalyzeError {
    #[error("store {0} holds no snapshots")]
    EmptyStore(PathBuf),
    #[error("no complete trajectory (v0..v{0}) in the store")]
    NothingComplete(u32),
    #[error(transparent)]
    Store(#[from] StoreError),
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error(transparent)]
    Csv(#[from] csv::Error),
}

#[derive(Debug, Clone)]
pub struct AnalyzeSettings {
    pub iterations: u32,
    pub prompts: Vec<PromptId>,
    pub matrix_mode: CellMode,
    pub bonferroni: bool,
    pub jobs: usize,
}

/// One trajectory: snippet, variant, prompt.
pub type TrajectoryId = (String, VariantId, PromptId);

/// Comparison metric a statistical test runs on.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum Metric {
    Unchanged,
    Type(ChangeType),
    Insertions,
    Deletions,
}

impl Metric {
    pub fn all() -> Vec<Metric> {
        let mut out = vec![Metric::Unchanged];
        out.extend(ChangeType::ALL.map(Metric::Type));
        out.extend([Metric::Insertions, Metric::Deletions]);
        out
    }

    pub fn name(self) -> &'static str {
        match self {
            Metric::Unchanged => "Unchanged",
            Metric::Type(t) => t.as_str(),
            Metric::Insertions => "Insertion",
            Metric::Deletions => "Deletion",
        }
    }

    fn of(self, r: &ComparisonRecord) -> Option<f64> {
        let p = r.proportions()?;
        Some(match self {
            Metric::Unchanged => p.unchanged,
            Metric::Type(t) => p.by_type[t.index()],
            Metric::Insertions => p.insertions,
            Metric::Deletions => p.deletions,
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct StatsRow {
    pub metric: Metric,
    pub variant: VariantId,
    pub comparison: String,
    pub statistic: f64,
    pub p_value: f64,
    pub method: &'static str,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DescriptiveRow {
    pub metric: Metric,
    pub variant: VariantId,
    pub prompt: PromptId,
    pub n: usize,
    pub mean: f64,
    pub sd: f64,
}

/// Everything the reports are built from.
#[derive(Debug, Default)]
pub struct Analysis {
    pub iterations: u32,
    pub snippets: Vec<String>,
    pub complete: Vec<TrajectoryId>,
    pub incomplete: Vec<TrajectoryId>,
    /// Horizontal then vertical comparisons, sorted by key.
    pub comparisons: Vec<(ComparisonRecord, Vec<ChangeRecord>)>,
    pub heatmaps: BTreeMap<(VariantId, PromptId), SimilarityMatrix>,
    pub convergence: BTreeMap<(VariantId, PromptId), Vec<ConvergenceRow>>,
    pub cross_variant: BTreeMap<PromptId, Vec<CrossVariantRow>>,
    pub oscillations: Vec<OscillationFlag>,
    pub stats: Vec<StatsRow>,
    pub descriptive: Vec<DescriptiveRow>,
}

fn is_horizontal(k: &ComparisonKey) -> bool {
    k.variant_a == k.variant_b
}

pub fn analyze_store(store: &SnapshotStore, settings: &AnalyzeSettings) -> Result<Analysis, AnalyzeError> {
    let snippets = store.snippets()?;
    if snippets.is_empty() {
        return Err(AnalyzeError::EmptyStore(store.root().to_path_buf()));
    }
    let k = settings.iterations;
    let mut complete = Vec::new();
    let mut incomplete = Vec::new();
    for s in &snippets {
        for v in VariantId::ALL {
            for &p in &settings.prompts {
                let versions = store.versions(s, v, p);
                if (0..=k).all(|i| versions.binary_search(&i).is_ok()) {
                    complete.push((s.clone(), v, p));
                } else {
                    log::warn!("{s}/{v}/{p}: incomplete trajectory (have {versions:?}), left out of the analysis");
                    incomplete.push((s.clone(), v, p));
                }
            }
        }
    }
    if complete.is_empty() {
        return Err(AnalyzeError::NothingComplete(k));
    }

    // Vertical comparisons need all three variants of a (snippet, prompt).
    let complete_set: std::collections::BTreeSet<&TrajectoryId> = complete.iter().collect();
    let mut vertical_tasks = Vec::new();
    for s in &snippets {
        for &p in &settings.prompts {
            if VariantId::ALL.iter().all(|&v| complete_set.contains(&(s.clone(), v, p))) {
                vertical_tasks.push((s.clone(), p));
            }
        }
    }

    let pool = rayon::ThreadPoolBuilder::new().num_threads(settings.jobs.max(1)).build().expect("thread pool");
    let (horizontal, vertical) = pool.install(|| -> Result<_, AnalyzeError> {
        let horizontal: Vec<Vec<(ComparisonRecord, Vec<ChangeRecord>)>> = complete
            .par_iter()
            .map(|(s, v, p)| {
                let texts = store.trajectory(s, *v, *p, k)?;
                Ok(horizontal_analysis(s, *v, *p, &texts))
            })
            .collect::<Result<_, StoreError>>()?;
        let vertical: Vec<Vec<(ComparisonRecord, Vec<ChangeRecord>)>> = vertical_tasks
            .par_iter()
            .map(|(s, p)| {
                let mut out = Vec::new();
                let texts: Vec<Vec<String>> =
                    VariantId::ALL.iter().map(|&v| store.trajectory(s, v, *p, k)).collect::<Result<_, _>>()?;
                for version in 0..=k {
                    let text = |v: VariantId| texts[v as usize][version as usize].as_str();
                    out.extend(vertical_analysis(s, *p, version, text));
                }
                Ok(out)
            })
            .collect::<Result<_, StoreError>>()?;
        Ok((horizontal, vertical))
    })?;

    let mut oscillations: Vec<OscillationFlag> = horizontal
        .iter()
        .flat_map(|t| {
            let recs: Vec<ComparisonRecord> = t.iter().map(|(r, _)| r.clone()).collect();
            detect_back_and_forth(&recs)
        })
        .collect();
    oscillations.sort_by(|a, b| {
        (&a.snippet, a.variant, a.prompt, a.triple_start).cmp(&(&b.snippet, b.variant, b.prompt, b.triple_start))
    });

    let mut comparisons: Vec<_> = horizontal.into_iter().flatten().chain(vertical.into_iter().flatten()).collect();
    comparisons.sort_by(|a, b| a.0.key.cmp(&b.0.key));

    let mut heatmaps = BTreeMap::new();
    let mut convergence = BTreeMap::new();
    for v in VariantId::ALL {
        for &p in &settings.prompts {
            let recs: Vec<&ComparisonRecord> = comparisons
                .iter()
                .map(|(r, _)| r)
                .filter(|r| is_horizontal(&r.key) && r.key.variant_a == v && r.key.prompt == p)
                .collect();
            if recs.is_empty() {
                continue;
            }
            heatmaps.insert((v, p), similarity_matrix(recs.iter().copied(), k as usize + 1, settings.matrix_mode));
            convergence.insert((v, p), convergence_series(recs.iter().copied()));
        }
    }
    let mut cross_variant = BTreeMap::new();
    for &p in &settings.prompts {
        let rows = cross_variant_series(comparisons.iter().map(|(r, _)| r).filter(|r| r.key.prompt == p));
        if !rows.is_empty() {
            cross_variant.insert(p, rows);
        }
    }

    let (stats, descriptive) = prompt_statistics(&comparisons, &settings.prompts, settings.bonferroni);

    Ok(Analysis {
        iterations: k,
        snippets,
        complete,
        incomplete,
        comparisons,
        heatmaps,
        convergence,
        cross_variant,
        oscillations,
        stats,
        descriptive,
    })
}

/// Observations are consecutive horizontal comparisons, one value per
/// transition per trajectory, grouped by prompt.
fn prompt_statistics(
    comparisons: &[(ComparisonRecord, Vec<ChangeRecord>)],
    prompts: &[PromptId],
    use_bonferroni: bool,
) -> (Vec<StatsRow>, Vec<DescriptiveRow>) {
    let mut stats = Vec::new();
    let mut descriptive = Vec::new();
    let pairs: Vec<(PromptId, PromptId)> =
        prompts.iter().enumerate().flat_map(|(i, &a)| prompts[i + 1..].iter().map(move |&b| (a, b))).collect();
    for v in VariantId::ALL {
        let consecutive: Vec<&ComparisonRecord> = comparisons
            .iter()
            .map(|(r, _)| r)
            .filter(|r| is_horizontal(&r.key) && r.key.variant_a == v && r.key.version_b == r.key.version_a + 1)
            .collect();
        if consecutive.is_empty() {
            continue;
        }
        for metric in Metric::all() {
            let groups: BTreeMap<PromptId, Vec<f64>> = prompts
                .iter()
                .map(|&p| (p, consecutive.iter().filter(|r| r.key.prompt == p).filter_map(|r| metric.of(r)).collect()))
                .collect();
            for (&p, g) in &groups {
                if let Ok((mean, sd)) = descriptive_stats(g) {
                    descriptive.push(DescriptiveRow { metric, variant: v, prompt: p, n: g.len(), mean, sd });
                }
            }
            let filled: Vec<(PromptId, &[f64])> =
                groups.iter().filter(|(_, g)| !g.is_empty()).map(|(&p, g)| (p, g.as_slice())).collect();
            if filled.len() >= 2 {
                let slices: Vec<&[f64]> = filled.iter().map(|(_, g)| *g).collect();
                if let Ok(t) = kruskal_wallis(&slices) {
                    stats.push(StatsRow {
                        metric,
                        variant: v,
                        comparison: filled.iter().map(|(p, _)| p.as_str()).collect::<Vec<_>>().join("/"),
                        statistic: t.statistic,
                        p_value: t.p_value,
                        method: t.method.as_str(),
                    });
                }
            }
            for &(a, b) in &pairs {
                let (ga, gb) = (&groups[&a], &groups[&b]);
                if let Ok(t) = mann_whitney_u(ga, gb) {
                    let p_value = if use_bonferroni { bonferroni(t.p_value, pairs.len()) } else { t.p_value };
                    stats.push(StatsRow {
                        metric,
                        variant: v,
                        comparison: format!("{a} vs {b}"),
                        statistic: t.statistic,
                        p_value,
                        method: t.method.as_str(),
                    });
                }
            }
        }
    }
    (stats, descriptive)
}

pub const COMPARISON_HEADER: &[&str] = &[
    "snippet",
    "variantA",
    "variantB",
    "versionA",
    "versionB",
    "prompt",
    "unchanged",
    "Rename",
    "SyntaxOnly",
    "CommentChange",
    "MixedChange",
    "AccessChange",
    "CallChange",
    "ControlChange",
    "LiteralChange",
    "OperatorChange",
    "OtherStructuralChange",
    "ins_code",
    "ins_comment",
    "ins_blank",
    "del_code",
    "del_comment",
    "del_blank",
    "avg_sim",
    "d_total",
    "d_code",
    "d_comment",
    "d_inline",
    "d_empty",
    "d_methods",
];

#[derive(Serialize)]
struct ChangeLine<'a> {
    #[serde(flatten)]
    key: &'a ComparisonKey,
    #[serde(flatten)]
    change: &'a ChangeRecord,
}

fn io_err(path: &Path) -> impl FnOnce(std::io::Error) -> AnalyzeError + '_ {
    move |source| AnalyzeError::Io { path: path.to_path_buf(), source }
}

/// Write every analysis artifact under `out`; returns the files written,
/// sorted.
pub fn write_outputs(a: &Analysis, out: &Path) -> Result<Vec<PathBuf>, AnalyzeError> {
    fs::create_dir_all(out).map_err(io_err(out))?;
    let mut written = Vec::new();

    let path = out.join("comparisons.csv");
    let mut w = csv_writer(&path)?;
    w.write_record(COMPARISON_HEADER)?;
    for (r, _) in &a.comparisons {
        let k = &r.key;
        let mut row = vec![
            k.snippet.clone(),
            k.variant_a.to_string(),
            k.variant_b.to_string(),
            k.version_a.to_string(),
            k.version_b.to_string(),
            k.prompt.to_string(),
            r.unchanged.to_string(),
        ];
        row.extend(r.change_counts.iter().map(|c| c.to_string()));
        for kc in [&r.insertions, &r.deletions] {
            row.extend([kc.code, kc.comment, kc.blank].map(|c| c.to_string()));
        }
        row.push(fmt_opt(r.average_similarity));
        row.extend(r.relative_deltas.as_array().map(|d| d.to_string()));
        w.write_record(&row)?;
    }
    w.flush().map_err(io_err(&path))?;
    written.push(path);

    let path = out.join("changes.jsonl");
    let file = fs::File::create(&path).map_err(io_err(&path))?;
    let mut jw = BufWriter::new(file);
    for (r, changes) in &a.comparisons {
        for c in changes {
            serde_json::to_writer(&mut jw, &ChangeLine { key: &r.key, change: c })
                .map_err(|e| AnalyzeError::Io { path: path.clone(), source: e.into() })?;
            jw.write_all(b"\n").map_err(io_err(&path))?;
        }
    }
    jw.flush().map_err(io_err(&path))?;
    written.push(path);

    let size = a.iterations + 1;
    for ((v, p), m) in &a.heatmaps {
        let path = out.join(format!("heatmap_{v}_{p}.csv"));
        let mut w = csv_writer(&path)?;
        w.write_record(["i", "j", "mean_sim", "n_contributing"])?;
        for i in 0..size {
            for j in i + 1..size {
                let cell = m.cells.get(&(i, j));
                w.write_record([
                    i.to_string(),
                    j.to_string(),
                    fmt_opt(cell.map(|c| c.mean)),
                    cell.map_or(0, |c| c.contributing).to_string(),
                ])?;
            }
        }
        w.flush().map_err(io_err(&path))?;
        written.push(path);
    }

    for ((v, p), rows) in &a.convergence {
        let path = out.join(format!("convergence_{v}_{p}.csv"));
        let mut w = csv_writer(&path)?;
        let mut header = vec!["transition", "unchanged"];
        header.extend(ChangeType::ALL.map(ChangeType::as_str));
        header.extend(["ins", "del"]);
        w.write_record(&header)?;
        for r in rows {
            let mut row = vec![format!("v{}->v{}", r.transition, r.transition + 1), fmt_f64(r.unchanged)];
            row.extend(r.by_type.map(fmt_f64));
            row.extend([fmt_f64(r.insertions), fmt_f64(r.deletions)]);
            w.write_record(&row)?;
        }
        w.flush().map_err(io_err(&path))?;
        written.push(path);
    }

    for (p, rows) in &a.cross_variant {
        let path = out.join(format!("variant_similarity_{p}.csv"));
        let mut w = csv_writer(&path)?;
        w.write_record([
            "version",
            "variantA",
            "variantB",
            "changed_only",
            "n_changed_only",
            "with_unchanged",
            "n_with_unchanged",
        ])?;
        for r in rows {
            w.write_record([
                r.version.to_string(),
                r.variant_a.to_string(),
                r.variant_b.to_string(),
                fmt_opt(r.changed_only),
                r.changed_only_n.to_string(),
                fmt_opt(r.with_unchanged),
                r.with_unchanged_n.to_string(),
            ])?;
        }
        w.flush().map_err(io_err(&path))?;
        written.push(path);
    }

    let path = out.join("oscillations.csv");
    let mut w = csv_writer(&path)?;
    w.write_record(["snippet", "variant", "prompt", "i", "strength"])?;
    for f in &a.oscillations {
        w.write_record([
            f.snippet.clone(),
            f.variant.to_string(),
            f.prompt.to_string(),
            f.triple_start.to_string(),
            fmt_f64(f.strength),
        ])?;
    }
    w.flush().map_err(io_err(&path))?;
    written.push(path);

    let path = out.join("stats_report.csv");
    let mut w = csv_writer(&path)?;
    w.write_record(["change_type", "variant", "comparison", "statistic", "p", "method"])?;
    for s in &a.stats {
        w.write_record([
            s.metric.name().to_string(),
            s.variant.to_string(),
            s.comparison.clone(),
            fmt_f64(s.statistic),
            fmt_p(s.p_value),
            s.method.to_string(),
        ])?;
    }
    w.flush().map_err(io_err(&path))?;
    written.push(path);

    let path = out.join("descriptive_stats.csv");
    let mut w = csv_writer(&path)?;
    w.write_record(["change_type", "variant", "prompt", "n", "mean", "sd"])?;
    for d in &a.descriptive {
        w.write_record([
            d.metric.name().to_string(),
            d.variant.to_string(),
            d.prompt.to_string(),
            d.n.to_string(),
            fmt_f64(d.mean),
            fmt_f64(d.sd),
        ])?;
    }
    w.flush().map_err(io_err(&path))?;
    written.push(path);

    written.sort();
    Ok(written)
}
