use alloc::vec::Vec;

use super::lexer::{tokenize_line, LexState, TokenKind};

/// Split source text into physical lines.
///
/// Lines are separated by LF; a trailing CR on any line is dropped. A final
/// line without a newline still counts, while a trailing newline does not
/// open an extra empty line.
pub fn split_lines(source: &str) -> Vec<&str> {
    if source.is_empty() {
        return Vec::new();
    }
    let body = source.strip_suffix('\n').unwrap_or(source);
    body.split('\n').map(|l| l.strip_suffix('\r').unwrap_or(l)).collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "kebab-case"))]
pub enum LineKind {
    Code { has_inline_comment: bool },
    CommentOnly,
    Blank,
}

impl LineKind {
    pub fn is_code(self) -> bool {
        matches!(self, LineKind::Code { .. })
    }

    pub fn has_inline_comment(self) -> bool {
        matches!(self, LineKind::Code { has_inline_comment: true })
    }
}

/// Classify one physical line given the state at its start. Returns the
/// kind together with the state for the next line.
pub fn classify_line_kind(line: &str, line_index: usize, state: LexState) -> (LineKind, LexState) {
    if line.trim().is_empty() {
        // A blank line inside a block comment or text block is still blank
        // and leaves the carry state untouched.
        return (LineKind::Blank, state);
    }
    match tokenize_line(line, line_index, state) {
        Ok((tokens, next)) => {
            let first_code = tokens.iter().position(|t| t.kind != TokenKind::CommentText);
            let last_comment = tokens.iter().rposition(|t| t.kind == TokenKind::CommentText);
            let kind = match (first_code, last_comment) {
                (None, _) => LineKind::CommentOnly,
                (Some(code), comment) => LineKind::Code { has_inline_comment: comment.is_some_and(|c| c > code) },
            };
            (kind, next)
        }
        Err(_) => (LineKind::Code { has_inline_comment: false }, LexState::Code),
    }
}

/// Line kinds for every physical line of `source`.
pub fn line_kinds(source: &str) -> Vec<LineKind> {
    line_kinds_of(&split_lines(source))
}

pub fn line_kinds_of(lines: &[&str]) -> Vec<LineKind> {
    let mut state = LexState::Code;
    lines
        .iter()
        .enumerate()
        .map(|(i, l)| {
            let (kind, next) = classify_line_kind(l, i, state);
            state = next;
            kind
        })
        .collect()
}
