//! Line-pair change taxonomy.
//!
//! Code tokens of the two lines are aligned by a weighted LCS in which equal
//! tokens score 3 and any two identifiers score 2, so a renamed identifier
//! still lines up with its counterpart. What remains unaligned, together
//! with the aligned-but-renamed identifiers and the comment text, decides
//! the label.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use super::similarity::{line_similarity, normalize_whitespace};
use crate::code_model::lexer::{tokenize_line, LexState, Token, TokenKind};
use crate::code_model::NodeCategory;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub enum ChangeType {
    Rename,
    SyntaxOnly,
    CommentChange,
    MixedChange,
    AccessChange,
    CallChange,
    ControlChange,
    LiteralChange,
    OperatorChange,
    OtherStructuralChange,
}

impl ChangeType {
    pub const ALL: [ChangeType; 10] = [
        ChangeType::Rename,
        ChangeType::SyntaxOnly,
        ChangeType::CommentChange,
        ChangeType::MixedChange,
        ChangeType::AccessChange,
        ChangeType::CallChange,
        ChangeType::ControlChange,
        ChangeType::LiteralChange,
        ChangeType::OperatorChange,
        ChangeType::OtherStructuralChange,
    ];

    pub fn index(self) -> usize {
        self as usize
    }

    pub fn as_str(self) -> &'static str {
        match self {
            ChangeType::Rename => "Rename",
            ChangeType::SyntaxOnly => "SyntaxOnly",
            ChangeType::CommentChange => "CommentChange",
            ChangeType::MixedChange => "MixedChange",
            ChangeType::AccessChange => "AccessChange",
            ChangeType::CallChange => "CallChange",
            ChangeType::ControlChange => "ControlChange",
            ChangeType::LiteralChange => "LiteralChange",
            ChangeType::OperatorChange => "OperatorChange",
            ChangeType::OtherStructuralChange => "OtherStructuralChange",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|t| t.as_str() == s)
    }

    /// Member of the aggregated CodeChange category.
    pub fn is_code_change(self) -> bool {
        matches!(
            self,
            ChangeType::AccessChange
                | ChangeType::CallChange
                | ChangeType::ControlChange
                | ChangeType::LiteralChange
                | ChangeType::OperatorChange
                | ChangeType::OtherStructuralChange
        )
    }
}

impl fmt::Display for ChangeType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// One classified changed line pair.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct ChangeRecord {
    pub old_line: usize,
    pub new_line: usize,
    pub old_text: String,
    pub new_text: String,
    pub change_type: ChangeType,
    pub similarity: f64,
    pub node_categories: Vec<NodeCategory>,
    pub rename_entries: Vec<(String, String)>,
    /// Set when either line failed to lex.
    pub diagnostic: bool,
}

const CONTROL_KEYWORDS: &[&str] = &[
    "if", "else", "for", "while", "do", "switch", "case", "default", "return", "break", "continue", "throw", "try",
    "catch", "finally", "yield",
];

const PAREN_OWNERS: &[&str] = &["if", "while", "for", "switch", "catch", "synchronized", "try"];

const PRIMITIVES: &[&str] = &["int", "long", "short", "byte", "char", "boolean", "float", "double", "void", "var"];

/// Code-difference subtypes, in [`ChangeType`] order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
enum Subtype {
    Access,
    Call,
    Control,
    Literal,
    Operator,
    OtherStructural,
}

impl Subtype {
    fn change_type(self) -> ChangeType {
        match self {
            Subtype::Access => ChangeType::AccessChange,
            Subtype::Call => ChangeType::CallChange,
            Subtype::Control => ChangeType::ControlChange,
            Subtype::Literal => ChangeType::LiteralChange,
            Subtype::Operator => ChangeType::OperatorChange,
            Subtype::OtherStructural => ChangeType::OtherStructuralChange,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Paren {
    Call,
    Control,
    Group,
}

/// Per-token syntactic context for one side of a pair.
struct SideContext {
    /// Kind of each `(` or `)`; `None` for other tokens and for parens whose
    /// partner is on another line.
    paren_kind: Vec<Option<Paren>>,
    /// Index of the innermost enclosing `(`, if any.
    enclosing: Vec<Option<usize>>,
}

fn side_context(toks: &[Token]) -> SideContext {
    let mut paren_kind = vec![None; toks.len()];
    let mut enclosing = vec![None; toks.len()];
    let mut stack: Vec<usize> = Vec::new();
    for (i, t) in toks.iter().enumerate() {
        enclosing[i] = stack.last().copied();
        if t.is(TokenKind::Separator, "(") {
            let prev = i.checked_sub(1).map(|p| &toks[p]);
            let kind = match prev {
                Some(p) if p.kind == TokenKind::Identifier => Paren::Call,
                Some(p) if p.kind == TokenKind::Keyword && matches!(p.text.as_str(), "this" | "super") => Paren::Call,
                Some(p) if p.kind == TokenKind::Keyword && PAREN_OWNERS.contains(&p.text.as_str()) => Paren::Control,
                _ => Paren::Group,
            };
            paren_kind[i] = Some(kind);
            stack.push(i);
        } else if t.is(TokenKind::Separator, ")") {
            if let Some(open) = stack.pop() {
                paren_kind[i] = paren_kind[open];
                enclosing[i] = stack.last().copied();
            }
        }
    }
    // A `(` with no `)` on this line has unknown extent.
    for &open in &stack {
        paren_kind[open] = None;
    }
    SideContext { paren_kind, enclosing }
}

fn token_weight(a: &Token, b: &Token) -> u32 {
    if a.kind == b.kind && a.text == b.text {
        3
    } else if a.kind == TokenKind::Identifier && b.kind == TokenKind::Identifier {
        2
    } else {
        0
    }
}

/// Weighted LCS over two token sequences; returns matched index pairs.
fn align_tokens(a: &[Token], b: &[Token]) -> Vec<(usize, usize)> {
    let (n, m) = (a.len(), b.len());
    let w = m + 1;
    let mut table = vec![0u32; (n + 1) * w];
    for i in (0..n).rev() {
        for j in (0..m).rev() {
            let s = token_weight(&a[i], &b[j]);
            let diag = if s > 0 { table[(i + 1) * w + j + 1] + s } else { 0 };
            table[i * w + j] = diag.max(table[(i + 1) * w + j]).max(table[i * w + j + 1]);
        }
    }
    let mut out = Vec::new();
    let (mut i, mut j) = (0, 0);
    while i < n && j < m {
        let s = token_weight(&a[i], &b[j]);
        if s > 0 && table[i * w + j] == table[(i + 1) * w + j + 1] + s {
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

/// Namespace an identifier occurrence lives in. Java keeps method names
/// apart from variable and type names, and a qualified member is resolved
/// against its qualifier rather than the local scope.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
enum Namespace {
    Value,
    Method,
    Member,
}

fn namespace(toks: &[Token], i: usize) -> Namespace {
    if toks.get(i + 1).is_some_and(|t| t.is(TokenKind::Separator, "(")) {
        Namespace::Method
    } else if i > 0 && toks[i - 1].is(TokenKind::Separator, ".") {
        Namespace::Member
    } else {
        Namespace::Value
    }
}

fn is_declaration_name(toks: &[Token], i: usize) -> bool {
    let Some(prev) = i.checked_sub(1).map(|p| &toks[p]) else {
        return false;
    };
    match prev.kind {
        TokenKind::Identifier => true,
        TokenKind::Keyword => {
            PRIMITIVES.contains(&prev.text.as_str())
                || matches!(prev.text.as_str(), "class" | "interface" | "enum" | "record")
        }
        TokenKind::Operator => prev.text == ">",
        TokenKind::Separator => prev.text == "]",
        _ => false,
    }
}

struct Side<'a> {
    toks: &'a [Token],
    ctx: SideContext,
    matched: Vec<bool>,
}

impl Side<'_> {
    fn is_unmatched_operator(&self, i: usize) -> bool {
        let t = &self.toks[i];
        !self.matched[i] && t.kind == TokenKind::Operator && !matches!(t.text.as_str(), "?" | ":" | "->" | "::")
    }

    /// Call sites on this side whose argument list changed shape.
    fn reshaped_calls(&self) -> BTreeSet<usize> {
        let mut out = BTreeSet::new();
        for (i, t) in self.toks.iter().enumerate() {
            if self.matched[i] {
                continue;
            }
            let call_paren = self.ctx.paren_kind[i] == Some(Paren::Call);
            if call_paren && t.is(TokenKind::Separator, "(") {
                out.insert(i);
            } else if t.is(TokenKind::Separator, ",") {
                if let Some(open) = self.ctx.enclosing[i] {
                    if self.ctx.paren_kind[open] == Some(Paren::Call) {
                        out.insert(open);
                    }
                }
            }
        }
        out
    }
}

/// Subtype for an unmatched code token. `other_has_kind` reports whether the
/// opposite side also has unmatched tokens of the given kind, which decides
/// whether an operand next to a changed operator was replaced or merely
/// added alongside it.
fn subtype_of(
    side: &Side<'_>,
    i: usize,
    reshaped: &BTreeSet<usize>,
    other_has_kind: &dyn Fn(TokenKind) -> bool,
) -> Subtype {
    let toks = side.toks;
    let t = &toks[i];
    let text = t.text.as_str();
    let next = toks.get(i + 1);
    let prev = i.checked_sub(1).map(|p| &toks[p]);

    if t.kind == TokenKind::Keyword && CONTROL_KEYWORDS.contains(&text) {
        return Subtype::Control;
    }
    if t.kind == TokenKind::Operator && matches!(text, "?" | ":") {
        return Subtype::Control;
    }
    if matches!(text, "(" | ")") && t.kind == TokenKind::Separator {
        return match side.ctx.paren_kind[i] {
            Some(Paren::Call) => Subtype::Call,
            Some(Paren::Control) => Subtype::Control,
            Some(Paren::Group) => Subtype::Operator,
            None => Subtype::OtherStructural,
        };
    }
    if side.ctx.enclosing[i].is_some_and(|open| reshaped.contains(&open)) {
        return Subtype::Call;
    }
    if t.is(TokenKind::Separator, ",") {
        return Subtype::OtherStructural;
    }
    let operand = matches!(t.kind, TokenKind::Identifier | TokenKind::Literal);
    let unmatched_is = |k: usize, text: &str| !side.matched[k] && toks[k].text == text;
    if operand && i > 0 && i + 1 < toks.len() && unmatched_is(i - 1, "[") && unmatched_is(i + 1, "]") {
        return Subtype::Access;
    }
    if operand
        && ((i > 0 && (unmatched_is(i - 1, "?") || unmatched_is(i - 1, ":")))
            || (i + 1 < toks.len() && (unmatched_is(i + 1, "?") || unmatched_is(i + 1, ":"))))
    {
        return Subtype::Control;
    }
    if operand && !other_has_kind(t.kind) {
        let beside_operator =
            (i > 0 && side.is_unmatched_operator(i - 1)) || (i + 1 < toks.len() && side.is_unmatched_operator(i + 1));
        if beside_operator {
            return Subtype::Operator;
        }
    }
    match t.kind {
        TokenKind::Literal => Subtype::Literal,
        TokenKind::Operator => match text {
            "->" => Subtype::OtherStructural,
            "::" => Subtype::Call,
            _ => Subtype::Operator,
        },
        TokenKind::Keyword => match text {
            "new" => Subtype::Call,
            "this" | "super" => Subtype::Access,
            _ => Subtype::OtherStructural,
        },
        TokenKind::Separator => match text {
            "[" | "]" => Subtype::Access,
            "." => {
                let calls = next.is_some_and(|n| n.kind == TokenKind::Identifier)
                    && toks.get(i + 2).is_some_and(|n| n.is(TokenKind::Separator, "("));
                if calls {
                    Subtype::Call
                } else {
                    Subtype::Access
                }
            }
            "::" => Subtype::Call,
            _ => Subtype::OtherStructural,
        },
        TokenKind::Identifier => {
            let qualifies_call = next.is_some_and(|n| n.is(TokenKind::Separator, "."))
                && toks.get(i + 2).is_some_and(|n| n.kind == TokenKind::Identifier)
                && toks.get(i + 3).is_some_and(|n| n.is(TokenKind::Separator, "("));
            if qualifies_call
                || next.is_some_and(|n| n.is(TokenKind::Separator, "("))
                || prev.is_some_and(|p| p.is(TokenKind::Keyword, "new"))
            {
                Subtype::Call
            } else if prev.is_some_and(|p| p.is(TokenKind::Separator, "."))
                || next.is_some_and(|n| n.is(TokenKind::Separator, "[") || n.is(TokenKind::Separator, "."))
            {
                Subtype::Access
            } else {
                Subtype::OtherStructural
            }
        }
        TokenKind::CommentText => Subtype::OtherStructural,
    }
}

fn node_category_of(sub: Subtype, t: &Token) -> NodeCategory {
    match sub {
        Subtype::Control => NodeCategory::ControlNode,
        Subtype::Call => NodeCategory::CallNode,
        Subtype::Literal => NodeCategory::LiteralNode,
        Subtype::Operator | Subtype::Access => NodeCategory::ExpressionNode,
        Subtype::OtherStructural => match t.kind {
            TokenKind::Identifier | TokenKind::Keyword => NodeCategory::DeclarationNode,
            _ => NodeCategory::OtherNode,
        },
    }
}

/// Label and attribution for one changed pair, without the index and text
/// bookkeeping of [`ChangeRecord`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Classification {
    pub change_type: ChangeType,
    pub node_categories: Vec<NodeCategory>,
    pub rename_entries: Vec<(String, String)>,
    pub diagnostic: bool,
}

/// Classify one changed line pair. `states` are the lexical states at the
/// start of the old and new line.
pub fn classify_lines(old: &str, new: &str, states: (LexState, LexState)) -> Classification {
    let lexed = (tokenize_line(old, 0, states.0), tokenize_line(new, 0, states.1));
    let (Ok((old_toks, _)), Ok((new_toks, _))) = lexed else {
        return Classification {
            change_type: ChangeType::OtherStructuralChange,
            node_categories: vec![NodeCategory::OtherNode],
            rename_entries: Vec::new(),
            diagnostic: true,
        };
    };

    let comments = |toks: &[Token]| -> Vec<String> {
        toks.iter().filter(|t| t.is_comment()).map(|t| normalize_whitespace(&t.text)).collect()
    };
    let comment_changed = comments(&old_toks) != comments(&new_toks);

    let old_code: Vec<Token> = old_toks.into_iter().filter(|t| !t.is_comment()).collect();
    let new_code: Vec<Token> = new_toks.into_iter().filter(|t| !t.is_comment()).collect();
    let matches = align_tokens(&old_code, &new_code);

    let mut old_side = Side { toks: &old_code, ctx: side_context(&old_code), matched: vec![false; old_code.len()] };
    let mut new_side = Side { toks: &new_code, ctx: side_context(&new_code), matched: vec![false; new_code.len()] };

    let mut substitutions: Vec<(usize, usize)> = Vec::new();
    let mut forward: BTreeMap<(Namespace, &str), &str> = BTreeMap::new();
    let mut backward: BTreeMap<(Namespace, &str), &str> = BTreeMap::new();
    let mut consistent = true;
    for &(i, j) in &matches {
        old_side.matched[i] = true;
        new_side.matched[j] = true;
        let (a, b) = (&old_code[i], &new_code[j]);
        if a.kind != TokenKind::Identifier {
            continue;
        }
        let renamed = a.text != b.text;
        if renamed {
            substitutions.push((i, j));
        }
        let (ns_a, ns_b) = (namespace(&old_code, i), namespace(&new_code, j));
        // Identity matches only constrain local names; two qualified
        // members with one name may belong to different objects.
        if !renamed && ns_a == Namespace::Member {
            continue;
        }
        if ns_a != ns_b && renamed {
            consistent = false;
        }
        if *forward.entry((ns_a, &a.text)).or_insert(&b.text) != b.text.as_str() {
            consistent = false;
        }
        if *backward.entry((ns_b, &b.text)).or_insert(&a.text) != a.text.as_str() {
            consistent = false;
        }
    }

    let mut subtypes: BTreeSet<Subtype> = BTreeSet::new();
    let mut nodes: BTreeSet<NodeCategory> = BTreeSet::new();
    if comment_changed {
        nodes.insert(NodeCategory::CommentNode);
    }

    let rename_fires = !substitutions.is_empty() && consistent;
    let mut rename_entries = Vec::new();
    if rename_fires {
        for &(i, j) in &substitutions {
            rename_entries.push((old_code[i].text.clone(), new_code[j].text.clone()));
            nodes.insert(if is_declaration_name(&old_code, i) {
                NodeCategory::DeclarationNode
            } else {
                NodeCategory::ExpressionNode
            });
        }
    } else {
        // An inconsistent substitution is a real code edit at that spot.
        for &(i, _) in &substitutions {
            old_side.matched[i] = false;
        }
        for &(_, j) in &substitutions {
            new_side.matched[j] = false;
        }
    }

    let unmatched_kinds = |side: &Side<'_>| -> BTreeSet<TokenKind> {
        side.toks.iter().zip(&side.matched).filter(|(_, m)| !**m).map(|(t, _)| t.kind).collect()
    };
    let old_kinds = unmatched_kinds(&old_side);
    let new_kinds = unmatched_kinds(&new_side);
    for (side, other_kinds) in [(&old_side, &new_kinds), (&new_side, &old_kinds)] {
        let reshaped = side.reshaped_calls();
        let other_has = |k: TokenKind| other_kinds.contains(&k);
        for i in (0..side.toks.len()).filter(|&i| !side.matched[i]) {
            let sub = subtype_of(side, i, &reshaped, &other_has);
            subtypes.insert(sub);
            nodes.insert(node_category_of(sub, &side.toks[i]));
        }
    }

    let fired = usize::from(comment_changed) + usize::from(rename_fires) + subtypes.len();
    let change_type = match fired {
        0 => ChangeType::SyntaxOnly,
        1 if comment_changed => ChangeType::CommentChange,
        1 if rename_fires => ChangeType::Rename,
        1 => subtypes.iter().next().map(|s| s.change_type()).unwrap_or(ChangeType::SyntaxOnly),
        _ => ChangeType::MixedChange,
    };
    if change_type == ChangeType::SyntaxOnly {
        nodes.insert(NodeCategory::OtherNode);
    }
    if !rename_fires {
        rename_entries.clear();
    }

    Classification { change_type, node_categories: nodes.into_iter().collect(), rename_entries, diagnostic: false }
}

/// Classify the pair `(old_line, new_line)` and attach its similarity.
pub fn classify_change(pair: (usize, usize), old: &str, new: &str, states: (LexState, LexState)) -> ChangeRecord {
    let c = classify_lines(old, new, states);
    ChangeRecord {
        old_line: pair.0,
        new_line: pair.1,
        old_text: String::from(old),
        new_text: String::from(new),
        change_type: c.change_type,
        similarity: line_similarity(old, new),
        node_categories: c.node_categories,
        rename_entries: c.rename_entries,
        diagnostic: c.diagnostic,
    }
}
