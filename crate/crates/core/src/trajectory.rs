//! Comparisons along one refactoring trajectory (horizontal), across
//! variants at one version (vertical), and the corpus-level summaries built
//! on them.

use alloc::collections::BTreeMap;
use alloc::string::String;
use alloc::vec::Vec;

use crate::diff::{compare_detailed, ChangeRecord, ComparisonKey, ComparisonRecord};
use crate::prompts::PromptId;
use crate::variantgen::VariantId;

/// Margin by which `sim(i, i+2)` must beat both neighbouring similarities.
pub const OSCILLATION_DELTA: f64 = 0.02;

/// Default number of refactoring iterations after v0.
pub const DEFAULT_ITERATIONS: u32 = 5;

/// Variant pairs compared vertically, in report order.
pub const VARIANT_PAIRS: [(VariantId, VariantId); 3] = [
    (VariantId::Original, VariantId::Meaningless),
    (VariantId::Original, VariantId::NoComment),
    (VariantId::Meaningless, VariantId::NoComment),
];

/// Every ordered pair `(i, j)`, `i < j`, over `versions`, in `(i, j)` order.
pub fn horizontal_analysis<S: AsRef<str>>(
    snippet: &str,
    variant: VariantId,
    prompt: PromptId,
    versions: &[S],
) -> Vec<(ComparisonRecord, Vec<ChangeRecord>)> {
    let mut out = Vec::with_capacity(versions.len() * versions.len().saturating_sub(1) / 2);
    for i in 0..versions.len() {
        for j in i + 1..versions.len() {
            let key = ComparisonKey {
                snippet: String::from(snippet),
                variant_a: variant,
                variant_b: variant,
                version_a: i as u32,
                version_b: j as u32,
                prompt,
            };
            out.push(compare_detailed(versions[i].as_ref(), versions[j].as_ref(), key));
        }
    }
    out
}

/// The three variant pairs at one version. `source` must return the text of
/// every variant.
pub fn vertical_analysis<'a, F>(
    snippet: &str,
    prompt: PromptId,
    version: u32,
    source: F,
) -> Vec<(ComparisonRecord, Vec<ChangeRecord>)>
where
    F: Fn(VariantId) -> &'a str,
{
    VARIANT_PAIRS
        .iter()
        .map(|&(a, b)| {
            let key = ComparisonKey {
                snippet: String::from(snippet),
                variant_a: a,
                variant_b: b,
                version_a: version,
                version_b: version,
                prompt,
            };
            compare_detailed(source(a), source(b), key)
        })
        .collect()
}

/// How a comparison without changed pairs enters a mean.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum CellMode {
    /// Only comparisons with at least one changed pair contribute.
    #[default]
    ChangedOnly,
    /// Identical file pairs contribute a similarity of 1.
    IdentityAsOne,
}

impl CellMode {
    pub fn similarity(self, r: &ComparisonRecord) -> Option<f64> {
        match self {
            CellMode::ChangedOnly => r.average_similarity,
            CellMode::IdentityAsOne => r.identity_aware_similarity(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MatrixCell {
    pub mean: f64,
    pub contributing: usize,
}

/// Upper-triangular version-by-version mean similarity.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct SimilarityMatrix {
    pub size: usize,
    pub cells: BTreeMap<(u32, u32), MatrixCell>,
}

impl SimilarityMatrix {
    pub fn get(&self, i: u32, j: u32) -> Option<f64> {
        self.cells.get(&(i, j)).map(|c| c.mean)
    }
}

/// Mean similarity per `(version_a, version_b)` over the given horizontal
/// records, which should all share one variant and prompt. Cells nobody
/// contributes to stay absent.
pub fn similarity_matrix<'a, I>(records: I, size: usize, mode: CellMode) -> SimilarityMatrix
where
    I: IntoIterator<Item = &'a ComparisonRecord>,
{
    let mut sums: BTreeMap<(u32, u32), (f64, usize)> = BTreeMap::new();
    for r in records {
        let (i, j) = (r.key.version_a, r.key.version_b);
        if i >= j || j as usize >= size {
            continue;
        }
        if let Some(s) = mode.similarity(r) {
            let e = sums.entry((i, j)).or_insert((0.0, 0));
            e.0 += s;
            e.1 += 1;
        }
    }
    SimilarityMatrix {
        size,
        cells: sums
            .into_iter()
            .map(|(k, (sum, n))| (k, MatrixCell { mean: sum / n as f64, contributing: n }))
            .collect(),
    }
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct OscillationFlag {
    pub snippet: String,
    pub variant: VariantId,
    pub prompt: PromptId,
    pub triple_start: u32,
    pub strength: f64,
}

/// Flag every `i` where `v(i)` and `v(i+2)` are closer than either is to
/// `v(i+1)`. Takes the horizontal records of one trajectory; an identical
/// file pair counts as similarity 1, and a triple with any similarity
/// undefined is skipped.
pub fn detect_back_and_forth(records: &[ComparisonRecord]) -> Vec<OscillationFlag> {
    let sims: BTreeMap<(u32, u32), f64> = records
        .iter()
        .filter_map(|r| r.identity_aware_similarity().map(|s| ((r.key.version_a, r.key.version_b), s)))
        .collect();
    let Some(first) = records.first() else {
        return Vec::new();
    };
    let last = records.iter().map(|r| r.key.version_b).max().unwrap_or(0);
    let mut out = Vec::new();
    for i in 0..last.saturating_sub(1) {
        let (Some(&a), Some(&b), Some(&skip)) =
            (sims.get(&(i, i + 1)), sims.get(&(i + 1, i + 2)), sims.get(&(i, i + 2)))
        else {
            continue;
        };
        let strength = skip - a.max(b);
        if strength > OSCILLATION_DELTA {
            out.push(OscillationFlag {
                snippet: first.key.snippet.clone(),
                variant: first.key.variant_a,
                prompt: first.key.prompt,
                triple_start: i,
                strength,
            });
        }
    }
    out
}

/// Mean event shares for one transition `v(i) -> v(i+1)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConvergenceRow {
    pub transition: u32,
    pub unchanged: f64,
    pub by_type: [f64; 10],
    pub insertions: f64,
    pub deletions: f64,
    pub snippets: usize,
}

/// Per-transition corpus means over the consecutive records among
/// `records`. Transitions with no data are omitted.
pub fn convergence_series<'a, I>(records: I) -> Vec<ConvergenceRow>
where
    I: IntoIterator<Item = &'a ComparisonRecord>,
{
    let mut acc: BTreeMap<u32, ConvergenceRow> = BTreeMap::new();
    for r in records {
        if r.key.version_b != r.key.version_a + 1 {
            continue;
        }
        let Some(p) = r.proportions() else { continue };
        let row = acc.entry(r.key.version_a).or_insert(ConvergenceRow {
            transition: r.key.version_a,
            unchanged: 0.0,
            by_type: [0.0; 10],
            insertions: 0.0,
            deletions: 0.0,
            snippets: 0,
        });
        row.unchanged += p.unchanged;
        for (s, v) in row.by_type.iter_mut().zip(p.by_type) {
            *s += v;
        }
        row.insertions += p.insertions;
        row.deletions += p.deletions;
        row.snippets += 1;
    }
    acc.into_values()
        .map(|mut row| {
            let n = row.snippets as f64;
            row.unchanged /= n;
            row.by_type.iter_mut().for_each(|v| *v /= n);
            row.insertions /= n;
            row.deletions /= n;
            row
        })
        .collect()
}

/// Similarity between two variants at one version, averaged over snippets
/// under both readings: changed lines only, and every non-inserted,
/// non-deleted line with unchanged lines scoring 1.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CrossVariantRow {
    pub version: u32,
    pub variant_a: VariantId,
    pub variant_b: VariantId,
    pub changed_only: Option<f64>,
    pub changed_only_n: usize,
    pub with_unchanged: Option<f64>,
    pub with_unchanged_n: usize,
}

fn with_unchanged(r: &ComparisonRecord) -> Option<f64> {
    let pairs = r.pair_count();
    let denom = r.unchanged + pairs;
    (denom > 0).then(|| (r.unchanged as f64 + r.average_similarity.unwrap_or(0.0) * pairs as f64) / denom as f64)
}

/// Rows ordered by version, then by variant pair.
pub fn cross_variant_series<'a, I>(records: I) -> Vec<CrossVariantRow>
where
    I: IntoIterator<Item = &'a ComparisonRecord>,
{
    // (changed-only sum, count, with-unchanged sum, count)
    type Acc = (f64, usize, f64, usize);
    let mut acc: BTreeMap<(u32, VariantId, VariantId), Acc> = BTreeMap::new();
    for r in records {
        if r.key.variant_a == r.key.variant_b || r.key.version_a != r.key.version_b {
            continue;
        }
        let e = acc.entry((r.key.version_a, r.key.variant_a, r.key.variant_b)).or_insert((0.0, 0, 0.0, 0));
        if let Some(s) = r.average_similarity {
            e.0 += s;
            e.1 += 1;
        }
        if let Some(s) = with_unchanged(r) {
            e.2 += s;
            e.3 += 1;
        }
    }
    acc.into_iter()
        .map(|((version, a, b), (s1, n1, s2, n2))| CrossVariantRow {
            version,
            variant_a: a,
            variant_b: b,
            changed_only: (n1 > 0).then(|| s1 / n1 as f64),
            changed_only_n: n1,
            with_unchanged: (n2 > 0).then(|| s2 / n2 as f64),
            with_unchanged_n: n2,
        })
        .collect()
}
