//! Structural metrics per snippet and the sampling filter built on them.

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use crate::code_model::{extract_declarations, line_kinds, LineKind};

/// Structural counts for one snippet instance.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Hash)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct AbsoluteMetrics {
    pub total_lines: usize,
    pub code_lines: usize,
    pub comment_lines: usize,
    pub inline_comments: usize,
    pub empty_lines: usize,
    pub methods: usize,
}

/// Signed per-field differences `new - old`.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Hash)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct MetricDeltas {
    pub total_lines: i64,
    pub code_lines: i64,
    pub comment_lines: i64,
    pub inline_comments: i64,
    pub empty_lines: i64,
    pub methods: i64,
}

impl AbsoluteMetrics {
    pub fn delta_to(&self, new: &AbsoluteMetrics) -> MetricDeltas {
        let d = |a: usize, b: usize| b as i64 - a as i64;
        MetricDeltas {
            total_lines: d(self.total_lines, new.total_lines),
            code_lines: d(self.code_lines, new.code_lines),
            comment_lines: d(self.comment_lines, new.comment_lines),
            inline_comments: d(self.inline_comments, new.inline_comments),
            empty_lines: d(self.empty_lines, new.empty_lines),
            methods: d(self.methods, new.methods),
        }
    }
}

impl MetricDeltas {
    pub fn as_array(&self) -> [i64; 6] {
        [self.total_lines, self.code_lines, self.comment_lines, self.inline_comments, self.empty_lines, self.methods]
    }
}

pub fn metrics_from_kinds(kinds: &[LineKind], methods: usize) -> AbsoluteMetrics {
    let mut m = AbsoluteMetrics { total_lines: kinds.len(), methods, ..Default::default() };
    for k in kinds {
        match k {
            LineKind::Code { has_inline_comment } => {
                m.code_lines += 1;
                if *has_inline_comment {
                    m.inline_comments += 1;
                }
            }
            LineKind::CommentOnly => m.comment_lines += 1,
            LineKind::Blank => m.empty_lines += 1,
        }
    }
    m
}

/// Never fails: unbalanced braces fall back to the partial declaration
/// index, and unlexable lines count as code.
pub fn compute_absolute_metrics(source: &str) -> AbsoluteMetrics {
    let methods = match extract_declarations(source) {
        Ok(idx) => idx.method_count(),
        Err(e) => e.partial.method_count(),
    };
    metrics_from_kinds(&line_kinds(source), methods)
}

#[derive(Debug, Clone, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct CriteriaReport {
    pub loc_ok: bool,
    pub methods_ratio_ok: bool,
    pub code_comments_ratio_ok: bool,
    pub accepted: bool,
    pub reasons: Vec<String>,
}

pub const MIN_LOC: usize = 50;
pub const MAX_LOC: usize = 200;
pub const LINES_PER_BLOCK: usize = 50;
pub const MIN_METHODS_PER_BLOCK: usize = 1;
pub const MAX_METHODS_PER_BLOCK: usize = 3;

/// Allowed method range for a file of `total_lines`: one to three methods
/// per started block of 50 lines.
pub fn methods_range(total_lines: usize) -> (usize, usize) {
    let blocks = total_lines.div_ceil(LINES_PER_BLOCK);
    (MIN_METHODS_PER_BLOCK * blocks, MAX_METHODS_PER_BLOCK * blocks)
}

pub fn check_sampling_criteria(m: &AbsoluteMetrics) -> CriteriaReport {
    let mut reasons = Vec::new();

    let loc_ok = (MIN_LOC..=MAX_LOC).contains(&m.total_lines);
    if m.total_lines < MIN_LOC {
        reasons.push(String::from("LOC < 50"));
    } else if m.total_lines > MAX_LOC {
        reasons.push(String::from("LOC > 200"));
    }

    let (lo, hi) = methods_range(m.total_lines);
    let methods_ratio_ok = m.total_lines > 0 && (lo..=hi).contains(&m.methods);
    if !methods_ratio_ok {
        reasons.push(format!("methods {} outside [{lo}, {hi}]", m.methods));
    }

    // Share of code among non-blank lines: code / (code + comment) >= 0.5.
    let written = m.code_lines + m.comment_lines;
    let code_comments_ratio_ok = written > 0 && 2 * m.code_lines >= written;
    if !code_comments_ratio_ok {
        reasons.push(String::from("code ratio < 50%"));
    }

    CriteriaReport {
        loc_ok,
        methods_ratio_ok,
        code_comments_ratio_ok,
        accepted: loc_ok && methods_ratio_ok && code_comments_ratio_ok,
        reasons,
    }
}

/// Test sources are never sampled: `*Test.java` files and anything under a
/// `test/` directory.
pub fn is_test_file(path: &str) -> bool {
    let normalized = path.replace('\\', "/");
    let file = normalized.rsplit('/').next().unwrap_or("");
    file.ends_with("Test.java") || normalized.starts_with("test/") || normalized.contains("/test/")
}
