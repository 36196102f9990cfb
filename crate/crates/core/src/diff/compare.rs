use alloc::collections::BTreeMap;
use alloc::string::String;
use alloc::vec::Vec;

use super::align::align_lines;
use super::classify::{classify_change, ChangeRecord, ChangeType};
use crate::code_model::lexer::{line_start_states, LexState};
use crate::code_model::{line_kinds_of, split_lines, LineKind};
use crate::corpus::{compute_absolute_metrics, MetricDeltas};
use crate::prompts::PromptId;
use crate::variantgen::VariantId;

/// Identity of one comparison: which two instances were diffed.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct ComparisonKey {
    pub snippet: String,
    pub variant_a: VariantId,
    pub variant_b: VariantId,
    pub version_a: u32,
    pub version_b: u32,
    pub prompt: PromptId,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Hash)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct KindCounts {
    pub code: usize,
    pub comment: usize,
    pub blank: usize,
}

impl KindCounts {
    pub fn total(&self) -> usize {
        self.code + self.comment + self.blank
    }

    fn add(&mut self, kind: LineKind) {
        match kind {
            LineKind::Code { .. } => self.code += 1,
            LineKind::CommentOnly => self.comment += 1,
            LineKind::Blank => self.blank += 1,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct ComparisonRecord {
    pub key: ComparisonKey,
    pub unchanged: usize,
    /// Indexed by [`ChangeType::index`].
    pub change_counts: [usize; 10],
    pub insertions: KindCounts,
    pub deletions: KindCounts,
    /// Mean similarity over changed pairs; absent when there are none.
    pub average_similarity: Option<f64>,
    pub relative_deltas: MetricDeltas,
}

/// Shares of every line event in one comparison. All fields sum to 1.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Proportions {
    pub unchanged: f64,
    pub by_type: [f64; 10],
    pub insertions: f64,
    pub deletions: f64,
}

impl ComparisonRecord {
    pub fn count(&self, t: ChangeType) -> usize {
        self.change_counts[t.index()]
    }

    pub fn pair_count(&self) -> usize {
        self.change_counts.iter().sum()
    }

    /// `unchanged + pairs + insertions + deletions`.
    pub fn event_count(&self) -> usize {
        self.unchanged + self.pair_count() + self.insertions.total() + self.deletions.total()
    }

    /// `None` when both files are empty.
    pub fn proportions(&self) -> Option<Proportions> {
        let d = self.event_count();
        if d == 0 {
            return None;
        }
        let d = d as f64;
        let mut by_type = [0.0; 10];
        for (p, &c) in by_type.iter_mut().zip(&self.change_counts) {
            *p = c as f64 / d;
        }
        Some(Proportions {
            unchanged: self.unchanged as f64 / d,
            by_type,
            insertions: self.insertions.total() as f64 / d,
            deletions: self.deletions.total() as f64 / d,
        })
    }

    /// Similarity that treats an identical pair of files as 1 rather than
    /// undefined. Still absent when lines moved but none were paired.
    pub fn identity_aware_similarity(&self) -> Option<f64> {
        match self.average_similarity {
            Some(s) => Some(s),
            None if self.insertions.total() == 0 && self.deletions.total() == 0 => Some(1.0),
            None => None,
        }
    }
}

pub fn compare_snippets(old: &str, new: &str, key: ComparisonKey) -> ComparisonRecord {
    compare_detailed(old, new, key).0
}

/// Comparison plus every classified change pair, in old-line order.
pub fn compare_detailed(old: &str, new: &str, key: ComparisonKey) -> (ComparisonRecord, Vec<ChangeRecord>) {
    let old_lines = split_lines(old);
    let new_lines = split_lines(new);
    let al = align_lines(old, new);
    let old_kinds = line_kinds_of(&old_lines);
    let new_kinds = line_kinds_of(&new_lines);
    let old_states: Vec<LexState> = line_start_states(old_lines.iter().copied());
    let new_states: Vec<LexState> = line_start_states(new_lines.iter().copied());

    let changes: Vec<ChangeRecord> = al
        .pairs
        .iter()
        .map(|&(o, n)| classify_change((o, n), old_lines[o], new_lines[n], (old_states[o], new_states[n])))
        .collect();

    let mut change_counts = [0usize; 10];
    for c in &changes {
        change_counts[c.change_type.index()] += 1;
    }
    let mut insertions = KindCounts::default();
    for &j in &al.insertions {
        insertions.add(new_kinds[j]);
    }
    let mut deletions = KindCounts::default();
    for &i in &al.deletions {
        deletions.add(old_kinds[i]);
    }
    let average_similarity = if changes.is_empty() {
        None
    } else {
        Some(changes.iter().map(|c| c.similarity).sum::<f64>() / changes.len() as f64)
    };
    let relative_deltas = compute_absolute_metrics(old).delta_to(&compute_absolute_metrics(new));

    let record = ComparisonRecord {
        key,
        unchanged: al.unchanged.len(),
        change_counts,
        insertions,
        deletions,
        average_similarity,
        relative_deltas,
    };
    (record, changes)
}

/// Renames merged across the change records of one comparison.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct RenameMap {
    /// Old name to every new name seen for it, with occurrence counts.
    pub targets: BTreeMap<String, BTreeMap<String, usize>>,
}

impl RenameMap {
    /// False when some old name was renamed to two or more new names.
    pub fn is_consistent(&self) -> bool {
        self.targets.values().all(|t| t.len() <= 1)
    }

    pub fn occurrences(&self, old: &str) -> usize {
        self.targets.get(old).map_or(0, |t| t.values().sum())
    }

    pub fn is_empty(&self) -> bool {
        self.targets.is_empty()
    }

    /// The single target of `old`, if it is unambiguous.
    pub fn target(&self, old: &str) -> Option<&str> {
        let t = self.targets.get(old)?;
        (t.len() == 1).then(|| t.keys().next().map(String::as_str)).flatten()
    }
}

pub fn build_rename_map<'a, I>(records: I) -> RenameMap
where
    I: IntoIterator<Item = &'a ChangeRecord>,
{
    let mut map = RenameMap::default();
    for r in records {
        for (old, new) in &r.rename_entries {
            *map.targets.entry(old.clone()).or_default().entry(new.clone()).or_insert(0) += 1;
        }
    }
    map
}
