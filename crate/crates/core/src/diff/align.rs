use alloc::collections::BTreeMap;
use alloc::vec;
use alloc::vec::Vec;

use super::similarity::{dice, dice_upper_bound, normalize_whitespace};
use crate::code_model::split_lines;

/// Minimum similarity for a removed and an added line to count as one
/// changed line rather than a deletion plus an insertion.
pub const PAIRING_THRESHOLD: f64 = 0.5;

/// Line-level correspondence between two versions of a file. All indices
/// are zero-based and every list is sorted ascending.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct LineAlignment {
    pub unchanged: Vec<(usize, usize)>,
    pub pairs: Vec<(usize, usize)>,
    pub deletions: Vec<usize>,
    pub insertions: Vec<usize>,
}

impl LineAlignment {
    /// The same alignment seen from the other side.
    pub fn reversed(&self) -> LineAlignment {
        LineAlignment {
            unchanged: self.unchanged.iter().map(|&(a, b)| (b, a)).collect(),
            pairs: self.pairs.iter().map(|&(a, b)| (b, a)).collect(),
            deletions: self.insertions.clone(),
            insertions: self.deletions.clone(),
        }
    }
}

pub fn align_lines(old: &str, new: &str) -> LineAlignment {
    align_line_slices(&split_lines(old), &split_lines(new))
}

pub fn align_line_slices(old: &[&str], new: &[&str]) -> LineAlignment {
    let mut out = LineAlignment::default();

    let prefix = old.iter().zip(new).take_while(|(a, b)| a == b).count();
    let max_suffix = old.len().min(new.len()) - prefix;
    let suffix = old.iter().rev().zip(new.iter().rev()).take(max_suffix).take_while(|(a, b)| a == b).count();

    out.unchanged.extend((0..prefix).map(|i| (i, i)));

    let old_mid = &old[prefix..old.len() - suffix];
    let new_mid = &new[prefix..new.len() - suffix];
    let matches = lcs_matches(old_mid, new_mid);

    // Walk the anchors; the gap before each one is a replace block.
    let (mut oi, mut ni) = (0usize, 0usize);
    for &(mo, mn) in matches.iter().chain(core::iter::once(&(old_mid.len(), new_mid.len()))) {
        pair_block(old_mid, new_mid, oi..mo, ni..mn, prefix, &mut out);
        if mo < old_mid.len() {
            out.unchanged.push((mo + prefix, mn + prefix));
        }
        oi = mo + 1;
        ni = mn + 1;
    }

    let (os, ns) = (old.len() - suffix, new.len() - suffix);
    out.unchanged.extend((0..suffix).map(|k| (os + k, ns + k)));
    out.pairs.sort_unstable();
    out.deletions.sort_unstable();
    out.insertions.sort_unstable();
    out
}

/// Index pairs of one longest common subsequence of whole lines. Equal heads
/// are matched first, otherwise the old line is skipped on ties.
fn lcs_matches(old: &[&str], new: &[&str]) -> Vec<(usize, usize)> {
    let (n, m) = (old.len(), new.len());
    if n == 0 || m == 0 {
        return Vec::new();
    }
    let w = m + 1;
    let mut table = vec![0u32; (n + 1) * w];
    for i in (0..n).rev() {
        for j in (0..m).rev() {
            table[i * w + j] = if old[i] == new[j] {
                table[(i + 1) * w + j + 1] + 1
            } else {
                table[(i + 1) * w + j].max(table[i * w + j + 1])
            };
        }
    }
    let mut out = Vec::with_capacity(table[0] as usize);
    let (mut i, mut j) = (0, 0);
    while i < n && j < m {
        if old[i] == new[j] {
            out.push((i, j));
            i += 1;
            j += 1;
        } else if table[(i + 1) * w + j] >= table[i * w + j + 1] {
            i += 1;
        } else {
            j += 1;
        }
    }
    out
}

/// Greedy best-first pairing inside one replace block. Candidates are taken
/// by descending similarity, then old index, then new index, and kept only
/// if they do not cross an already accepted pair.
fn pair_block(
    old: &[&str],
    new: &[&str],
    old_range: core::ops::Range<usize>,
    new_range: core::ops::Range<usize>,
    offset: usize,
    out: &mut LineAlignment,
) {
    if old_range.is_empty() || new_range.is_empty() {
        out.deletions.extend(old_range.map(|i| i + offset));
        out.insertions.extend(new_range.map(|j| j + offset));
        return;
    }
    let norm = |l: &str| normalize_whitespace(l).chars().collect::<Vec<char>>();
    let old_chars: Vec<Vec<char>> = old_range.clone().map(|i| norm(old[i])).collect();
    let new_chars: Vec<Vec<char>> = new_range.clone().map(|j| norm(new[j])).collect();

    let mut candidates: Vec<(f64, usize, usize)> = Vec::new();
    for (a, oc) in old_chars.iter().enumerate() {
        for (b, nc) in new_chars.iter().enumerate() {
            if dice_upper_bound(oc.len(), nc.len()) < PAIRING_THRESHOLD {
                continue;
            }
            let s = dice(oc, nc);
            if s >= PAIRING_THRESHOLD {
                candidates.push((s, a, b));
            }
        }
    }
    candidates.sort_by(|x, y| y.0.total_cmp(&x.0).then(x.1.cmp(&y.1)).then(x.2.cmp(&y.2)));

    let mut accepted: BTreeMap<usize, usize> = BTreeMap::new();
    let mut new_used = vec![false; new_chars.len()];
    for (_, a, b) in candidates {
        if accepted.contains_key(&a) || new_used[b] {
            continue;
        }
        let below_ok = accepted.range(..a).next_back().is_none_or(|(_, &nb)| nb < b);
        let above_ok = accepted.range(a + 1..).next().is_none_or(|(_, &nb)| nb > b);
        if below_ok && above_ok {
            accepted.insert(a, b);
            new_used[b] = true;
        }
    }

    let (o0, n0) = (old_range.start, new_range.start);
    for a in 0..old_chars.len() {
        match accepted.get(&a) {
            Some(&b) => out.pairs.push((o0 + a + offset, n0 + b + offset)),
            None => out.deletions.push(o0 + a + offset),
        }
    }
    for (b, used) in new_used.iter().enumerate() {
        if !used {
            out.insertions.push(n0 + b + offset);
        }
    }
}
