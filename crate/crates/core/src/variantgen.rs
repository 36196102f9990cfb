//! Readability-degraded variants of a snippet.
//!
//! *Meaningless* keeps every token kind in place but replaces declared
//! names with `C<n>`/`m<n>`/`v<n>` and every comment with a `c<n>`
//! placeholder of the same height. *NoComment* deletes comments outright.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::fmt;

use crate::code_model::declarations::{DeclKind, DeclarationIndex};
use crate::code_model::lexer::{tokenize_line, LexState, Token, TokenKind};
use crate::code_model::{extract_declarations, StructuralError};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub enum VariantId {
    Original,
    Meaningless,
    NoComment,
}

impl VariantId {
    pub const ALL: [VariantId; 3] = [VariantId::Original, VariantId::Meaningless, VariantId::NoComment];

    pub fn as_str(self) -> &'static str {
        match self {
            VariantId::Original => "Original",
            VariantId::Meaningless => "Meaningless",
            VariantId::NoComment => "NoComment",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|v| v.as_str() == s)
    }
}

impl fmt::Display for VariantId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct RenameEntry {
    pub original: String,
    pub replacement: String,
    pub kind: DeclKind,
}

/// Original to replacement names, one entry per (name, kind).
#[derive(Debug, Clone, Default, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct RenameTable {
    pub entries: Vec<RenameEntry>,
}

impl RenameTable {
    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn get(&self, original: &str, kind: DeclKind) -> Option<&str> {
        self.entries.iter().find(|e| e.original == original && e.kind == kind).map(|e| e.replacement.as_str())
    }

    /// Replacement back to original, across all kinds.
    pub fn inverse(&self) -> BTreeMap<&str, &str> {
        self.entries.iter().map(|e| (e.replacement.as_str(), e.original.as_str())).collect()
    }

    /// Undo the renaming in a Meaningless source: every identifier token
    /// that equals a replacement gets its original name back. Comments and
    /// whitespace are left as they are.
    pub fn restore_identifiers(&self, source: &str) -> String {
        let inverse = self.inverse();
        rewrite_lines(source, |_, tok, _| match tok.kind {
            TokenKind::Identifier => inverse.get(tok.text.as_str()).map(|s| s.to_string()),
            _ => None,
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum VariantError {
    /// A generated name is already used by an identifier that stays
    /// untouched, so the rename would shadow or capture it.
    RenameCollision { identifier: String, original: String },
}

impl fmt::Display for VariantError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            VariantError::RenameCollision { identifier, original } => write!(
                f,
                "rename collision: replacement `{identifier}` for `{original}` already names an untouched identifier"
            ),
        }
    }
}

/// Methods whose names are fixed by the JVM or by the `Object` and
/// `Comparable`/`Iterator` contracts. Anything else keeps its name only when
/// annotated `@Override`.
pub const EXEMPT_METHODS: &[&str] =
    &["main", "toString", "equals", "hashCode", "compareTo", "compare", "clone", "finalize", "iterator", "hasNext"];

fn method_is_exempt(name: &str, overrides: bool) -> bool {
    overrides || EXEMPT_METHODS.contains(&name)
}

fn build_rename_table(idx: &DeclarationIndex) -> RenameTable {
    let overriding: BTreeSet<&str> =
        idx.methods.iter().chain(&idx.abstract_methods).filter(|m| m.overrides).map(|m| m.name.as_str()).collect();

    let mut table = RenameTable::default();
    let (mut classes, mut methods, mut vars) = (0usize, 0usize, 0usize);
    for (_, kind, name) in idx.in_source_order() {
        let table_kind = match kind {
            DeclKind::Parameter => DeclKind::Variable,
            k => k,
        };
        if table.get(name, table_kind).is_some() {
            continue;
        }
        let replacement = match table_kind {
            DeclKind::Class => {
                classes += 1;
                format!("C{classes}")
            }
            DeclKind::Method => {
                if method_is_exempt(name, overriding.contains(name)) {
                    continue;
                }
                methods += 1;
                format!("m{methods}")
            }
            _ => {
                vars += 1;
                format!("v{vars}")
            }
        };
        table.entries.push(RenameEntry { original: name.to_string(), replacement, kind: table_kind });
    }
    table
}

/// Apply `f` to every token of every line, replacing token text where it
/// returns `Some`. Whitespace gaps and line endings are preserved; lines
/// that fail to lex are copied verbatim.
fn rewrite_lines<F>(source: &str, mut f: F) -> String
where
    F: FnMut(usize, &Token, LexState) -> Option<String>,
{
    let mut out = String::with_capacity(source.len());
    let mut state = LexState::Code;
    for (i, (line, ending)) in lines_with_endings(source).into_iter().enumerate() {
        match tokenize_line(line, i, state) {
            Ok((tokens, next)) => {
                let mut chars = line.char_indices().map(|(b, _)| b).collect::<Vec<_>>();
                chars.push(line.len());
                let mut last = 0usize;
                for tok in &tokens {
                    let start = chars[tok.column];
                    out.push_str(&line[last..start]);
                    match f(i, tok, state) {
                        Some(rep) => out.push_str(&rep),
                        None => out.push_str(&tok.text),
                    }
                    last = start + tok.text.len();
                }
                out.push_str(&line[last..]);
                state = next;
            }
            Err(_) => {
                out.push_str(line);
                state = LexState::Code;
            }
        }
        out.push_str(ending);
    }
    out
}

/// Physical lines with their terminators (`"\n"`, `"\r\n"` or `""`).
pub fn lines_with_endings(source: &str) -> Vec<(&str, &str)> {
    source
        .split_inclusive('\n')
        .map(|l| {
            if let Some(body) = l.strip_suffix("\r\n") {
                (body, "\r\n")
            } else if let Some(body) = l.strip_suffix('\n') {
                (body, "\n")
            } else {
                (l, "")
            }
        })
        .collect()
}

/// Decide the replacement for every identifier occurrence, keyed by
/// (line, column).
fn plan_identifier_renames(
    source: &str,
    idx: &DeclarationIndex,
    table: &RenameTable,
) -> BTreeMap<(usize, usize), String> {
    let tokens = crate::code_model::declarations::code_tokens(source);
    let class_names: BTreeSet<&str> = idx.classes.iter().map(|c| c.name.as_str()).collect();
    // Variables whose static type is declared in this file; members accessed
    // through them belong to this file too.
    let local_typed: BTreeSet<&str> = idx
        .variables
        .iter()
        .map(|v| (v.name.as_str(), v.type_name.as_str()))
        .chain(idx.parameters.iter().map(|p| (p.name.as_str(), p.type_name.as_str())))
        .filter(|(_, ty)| class_names.contains(ty))
        .map(|(n, _)| n)
        .collect();

    let mut plan = BTreeMap::new();
    let mut in_header = false;
    for (k, tok) in tokens.iter().enumerate() {
        if tok.kind == TokenKind::Keyword && matches!(tok.text.as_str(), "package" | "import") {
            in_header = true;
        }
        if in_header {
            if tok.is(TokenKind::Separator, ";") {
                in_header = false;
            }
            continue;
        }
        if tok.kind != TokenKind::Identifier {
            continue;
        }
        let prev = k.checked_sub(1).map(|p| &tokens[p]);
        let next = tokens.get(k + 1);
        let called = next.is_some_and(|n| n.is(TokenKind::Separator, "("));
        let name = tok.text.as_str();

        let choice = if prev.is_some_and(|p| p.is(TokenKind::Separator, "@")) {
            None
        } else if prev.is_some_and(|p| p.is(TokenKind::Separator, "::")) {
            table.get(name, DeclKind::Method)
        } else if prev.is_some_and(|p| p.is(TokenKind::Separator, ".")) {
            let qualifier = k.checked_sub(2).map(|q| &tokens[q]);
            let ours = qualifier.is_some_and(|q| {
                (q.kind == TokenKind::Keyword && matches!(q.text.as_str(), "this" | "super"))
                    || (q.kind == TokenKind::Identifier
                        && (class_names.contains(q.text.as_str()) || local_typed.contains(q.text.as_str())))
            });
            if !ours {
                None
            } else if called {
                table.get(name, DeclKind::Method)
            } else {
                table.get(name, DeclKind::Variable).or_else(|| table.get(name, DeclKind::Class))
            }
        } else if called {
            table.get(name, DeclKind::Class).or_else(|| table.get(name, DeclKind::Method))
        } else {
            table.get(name, DeclKind::Variable).or_else(|| table.get(name, DeclKind::Class))
        };
        if let Some(rep) = choice {
            plan.insert((tok.line, tok.column), rep.to_string());
        }
    }
    plan
}

/// Rename every declared class, method, variable and parameter and blank
/// out every comment while keeping line structure and token kinds.
pub fn make_meaningless(source: &str) -> Result<(String, RenameTable), VariantError> {
    let idx = extract_declarations(source).unwrap_or_else(|e: StructuralError| *e.partial);
    let table = build_rename_table(&idx);
    let plan = plan_identifier_renames(source, &idx, &table);

    // Names that survive untouched must not coincide with a replacement.
    let mut untouched = BTreeSet::new();
    rewrite_lines(source, |_, tok, _| {
        if tok.kind == TokenKind::Identifier && !plan.contains_key(&(tok.line, tok.column)) {
            untouched.insert(tok.text.clone());
        }
        None
    });
    if let Some(e) = table.entries.iter().find(|e| untouched.contains(&e.replacement)) {
        return Err(VariantError::RenameCollision { identifier: e.replacement.clone(), original: e.original.clone() });
    }

    let mut comment_no = 0usize;
    let out = rewrite_lines(source, |_, tok, state| match tok.kind {
        TokenKind::Identifier => plan.get(&(tok.line, tok.column)).cloned(),
        TokenKind::CommentText => {
            let continuing = state == LexState::BlockComment && tok.column == first_token_column(tok);
            Some(comment_placeholder(&tok.text, continuing, &mut comment_no))
        }
        _ => None,
    });
    Ok((out, table))
}

// The continuation token of a block comment is always the first token on
// its line; `rewrite_lines` hands us the token alone, so compare against the
// line's first non-whitespace column recorded in the token itself. A
// continuation token never starts with `//` or `/*`.
fn first_token_column(tok: &Token) -> usize {
    if tok.text.starts_with("//") || tok.text.starts_with("/*") {
        usize::MAX
    } else {
        tok.column
    }
}

fn comment_placeholder(text: &str, continuing: bool, counter: &mut usize) -> String {
    if continuing {
        return String::from(if text.ends_with("*/") { "*/" } else { "*" });
    }
    *counter += 1;
    let k = *counter;
    if text.starts_with("//") {
        format!("// c{k}")
    } else {
        let opener = if text.starts_with("/**") && text != "/**/" { "/**" } else { "/*" };
        let closed = text.len() >= 4 && text.ends_with("*/");
        if closed {
            format!("{opener} c{k} */")
        } else {
            format!("{opener} c{k}")
        }
    }
}

/// Remove every comment. Inline comments leave the right-trimmed code
/// part; comment-only lines are dropped, and a dropped run that separated
/// two non-blank lines leaves one empty line behind.
pub fn strip_comments(source: &str) -> String {
    struct Line<'a> {
        kept: Option<String>,
        ending: &'a str,
    }

    let mut lines: Vec<Line<'_>> = Vec::new();
    let mut state = LexState::Code;
    for (i, (text, ending)) in lines_with_endings(source).into_iter().enumerate() {
        let start_state = state;
        let kept = match tokenize_line(text, i, state) {
            Ok((tokens, next)) => {
                state = next;
                if text.trim().is_empty() {
                    // Blank lines inside a block comment belong to it.
                    (start_state != LexState::BlockComment).then(|| String::from(text))
                } else if tokens.iter().all(Token::is_comment) {
                    None
                } else if tokens.iter().any(Token::is_comment) {
                    Some(without_comments(text, &tokens))
                } else {
                    Some(String::from(text))
                }
            }
            Err(_) => {
                state = LexState::Code;
                Some(String::from(text))
            }
        };
        lines.push(Line { kept, ending });
    }

    let mut out = String::with_capacity(source.len());
    let mut i = 0;
    while i < lines.len() {
        if let Some(text) = &lines[i].kept {
            out.push_str(text);
            out.push_str(lines[i].ending);
            i += 1;
            continue;
        }
        let run_start = i;
        while i < lines.len() && lines[i].kept.is_none() {
            i += 1;
        }
        let non_blank = |l: &Line<'_>| l.kept.as_deref().is_some_and(|t| !t.trim().is_empty());
        let before = run_start.checked_sub(1).map(|p| &lines[p]);
        let after = lines.get(i);
        if before.is_some_and(non_blank) && after.is_some_and(non_blank) {
            out.push_str(lines[run_start].ending);
        }
    }
    out
}

fn without_comments(text: &str, tokens: &[Token]) -> String {
    let mut offsets: Vec<usize> = text.char_indices().map(|(b, _)| b).collect();
    offsets.push(text.len());
    let mut out = String::with_capacity(text.len());
    let mut last = 0usize;
    for (i, tok) in tokens.iter().enumerate().filter(|(_, t)| t.is_comment()) {
        let start = offsets[tok.column];
        out.push_str(&text[last..start]);
        last = start + tok.text.len();
        if i == 0 {
            // Leading comment: keep the indentation, drop the gap after it.
            last += text[last..].len() - text[last..].trim_start().len();
        }
    }
    out.push_str(&text[last..]);
    out.truncate(out.trim_end().len());
    out
}
