//! Line alignment, pair similarity and change classification between two
//! versions of a file.

pub mod align;
pub mod classify;
pub mod compare;
pub mod similarity;

pub use align::{align_line_slices, align_lines, LineAlignment, PAIRING_THRESHOLD};
pub use classify::{classify_change, classify_lines, ChangeRecord, ChangeType, Classification};
pub use compare::{
    build_rename_map, compare_detailed, compare_snippets, ComparisonKey, ComparisonRecord, KindCounts, Proportions,
    RenameMap,
};
pub use similarity::{lcs_len, line_similarity, normalize_whitespace};
