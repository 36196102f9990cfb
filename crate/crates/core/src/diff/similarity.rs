use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

/// Collapse every whitespace run to one space and trim both ends.
pub fn normalize_whitespace(s: &str) -> String {
    let mut out = String::with_capacity(s.len());
    for word in s.split_whitespace() {
        if !out.is_empty() {
            out.push(' ');
        }
        out.push_str(word);
    }
    out
}

/// Length of a longest common subsequence, in O(min) memory.
pub fn lcs_len<T: PartialEq>(a: &[T], b: &[T]) -> usize {
    let (long, short) = if a.len() >= b.len() { (a, b) } else { (b, a) };
    if short.is_empty() {
        return 0;
    }
    let mut row = vec![0usize; short.len() + 1];
    for x in long {
        let mut diag = 0usize;
        for (j, y) in short.iter().enumerate() {
            let up = row[j + 1];
            row[j + 1] = if x == y { diag + 1 } else { up.max(row[j]) };
            diag = up;
        }
    }
    row[short.len()]
}

/// Character-level LCS Dice score `2·|LCS| / (|a| + |b|)` of the
/// whitespace-normalized lines. Two empty lines score 1.
pub fn line_similarity(a: &str, b: &str) -> f64 {
    let a: Vec<char> = normalize_whitespace(a).chars().collect();
    let b: Vec<char> = normalize_whitespace(b).chars().collect();
    dice(&a, &b)
}

pub(crate) fn dice(a: &[char], b: &[char]) -> f64 {
    let total = a.len() + b.len();
    if total == 0 {
        return 1.0;
    }
    (2 * lcs_len(a, b)) as f64 / total as f64
}

/// Cheap upper bound on [`dice`]: the LCS can be no longer than the shorter
/// line.
pub(crate) fn dice_upper_bound(a: usize, b: usize) -> f64 {
    if a + b == 0 {
        1.0
    } else {
        (2 * a.min(b)) as f64 / (a + b) as f64
    }
}
