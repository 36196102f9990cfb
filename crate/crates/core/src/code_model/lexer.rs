//! Line-at-a-time Java lexer.
//!
//! The lexer never sees more than one physical line. Constructs that span
//! lines (block comments and text blocks) are carried across calls through
//! [`LexState`].

use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "kebab-case"))]
pub enum TokenKind {
    Identifier,
    Keyword,
    Literal,
    Operator,
    Separator,
    CommentText,
}

#[derive(Debug, Clone, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Token {
    pub kind: TokenKind,
    pub text: String,
    /// Zero-based physical line index.
    pub line: usize,
    /// Zero-based character offset within the line. Tabs are not expanded.
    pub column: usize,
}

impl Token {
    pub fn is(&self, kind: TokenKind, text: &str) -> bool {
        self.kind == kind && self.text == text
    }

    pub fn is_comment(&self) -> bool {
        self.kind == TokenKind::CommentText
    }
}

/// Lexical state carried from the end of one line to the start of the next.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Hash)]
pub enum LexState {
    #[default]
    Code,
    /// Inside an unterminated `/* ... */` comment.
    BlockComment,
    /// Inside an unterminated `""" ... """` text block.
    TextBlock,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LexError {
    pub line: usize,
    pub column: usize,
    pub message: &'static str,
}

impl fmt::Display for LexError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "line {}, column {}: {}", self.line, self.column, self.message)
    }
}

/// Reserved Java words. `true`, `false` and `null` are literals, and
/// contextual words such as `var` or `record` lex as identifiers.
pub const KEYWORDS: &[&str] = &[
    "abstract",
    "assert",
    "boolean",
    "break",
    "byte",
    "case",
    "catch",
    "char",
    "class",
    "const",
    "continue",
    "default",
    "do",
    "double",
    "else",
    "enum",
    "extends",
    "final",
    "finally",
    "float",
    "for",
    "goto",
    "if",
    "implements",
    "import",
    "instanceof",
    "int",
    "interface",
    "long",
    "native",
    "new",
    "package",
    "private",
    "protected",
    "public",
    "return",
    "short",
    "static",
    "strictfp",
    "super",
    "switch",
    "synchronized",
    "this",
    "throw",
    "throws",
    "transient",
    "try",
    "void",
    "volatile",
    "while",
];

pub fn is_keyword(word: &str) -> bool {
    KEYWORDS.contains(&word)
}

/// Whether `word` could be used as a Java identifier.
pub fn is_valid_identifier(word: &str) -> bool {
    let mut chars = word.chars();
    match chars.next() {
        Some(c) if is_ident_start(c) => {}
        _ => return false,
    }
    chars.all(is_ident_part) && !is_keyword(word) && !matches!(word, "true" | "false" | "null")
}

fn is_ident_start(c: char) -> bool {
    c.is_alphabetic() || c == '_' || c == '$'
}

fn is_ident_part(c: char) -> bool {
    c.is_alphanumeric() || c == '_' || c == '$'
}

// Longest first so that greedy matching picks `>>>=` over `>>`.
const OPERATORS: &[&str] = &[
    ">>>=", "<<=", ">>=", ">>>", "...", "->", "::", "++", "--", "&&", "||", "==", "!=", "<=", ">=", "+=", "-=", "*=",
    "/=", "&=", "|=", "^=", "%=", "<<", ">>", "=", ">", "<", "!", "~", "?", ":", "+", "-", "*", "/", "&", "|", "^",
    "%",
];

const SEPARATORS: &[&str] = &["...", "::", "(", ")", "{", "}", "[", "]", ";", ",", ".", "@"];

struct Cursor<'a> {
    chars: Vec<(usize, char)>,
    src: &'a str,
    pos: usize,
}

impl<'a> Cursor<'a> {
    fn new(src: &'a str) -> Self {
        Cursor { chars: src.char_indices().collect(), src, pos: 0 }
    }

    fn peek(&self, ahead: usize) -> Option<char> {
        self.chars.get(self.pos + ahead).map(|&(_, c)| c)
    }

    fn done(&self) -> bool {
        self.pos >= self.chars.len()
    }

    fn byte(&self, char_pos: usize) -> usize {
        self.chars.get(char_pos).map_or(self.src.len(), |&(b, _)| b)
    }

    fn slice(&self, from: usize, to: usize) -> &'a str {
        &self.src[self.byte(from)..self.byte(to)]
    }

    fn starts_with(&self, pat: &str) -> bool {
        self.src[self.byte(self.pos)..].starts_with(pat)
    }

    /// Advance to just past the next occurrence of `pat`, or to the end.
    /// Returns whether `pat` was found.
    fn skip_past(&mut self, pat: &str) -> bool {
        let rest = &self.src[self.byte(self.pos)..];
        match rest.find(pat) {
            Some(off) => {
                let target = self.byte(self.pos) + off + pat.len();
                while self.pos < self.chars.len() && self.byte(self.pos) < target {
                    self.pos += 1;
                }
                true
            }
            None => {
                self.pos = self.chars.len();
                false
            }
        }
    }
}

/// Tokenize one physical line.
///
/// Whitespace is skipped; comments are kept as [`TokenKind::CommentText`]
/// tokens, so the gaps between consecutive tokens are always pure whitespace.
pub fn tokenize_line(line: &str, line_index: usize, state: LexState) -> Result<(Vec<Token>, LexState), LexError> {
    let mut cur = Cursor::new(line);
    let mut tokens = Vec::new();
    let mut state = state;

    let push = |tokens: &mut Vec<Token>, kind, cur: &Cursor<'_>, start: usize| {
        tokens.push(Token { kind, text: String::from(cur.slice(start, cur.pos)), line: line_index, column: start });
    };

    while !cur.done() {
        let c = cur.peek(0).unwrap_or(' ');
        if c.is_whitespace() {
            cur.pos += 1;
            continue;
        }
        let start = cur.pos;
        match state {
            LexState::BlockComment => {
                if cur.skip_past("*/") {
                    state = LexState::Code;
                }
                push(&mut tokens, TokenKind::CommentText, &cur, start);
                continue;
            }
            LexState::TextBlock => {
                if skip_text_block(&mut cur) {
                    state = LexState::Code;
                }
                push(&mut tokens, TokenKind::Literal, &cur, start);
                continue;
            }
            LexState::Code => {}
        }

        if cur.starts_with("//") {
            cur.pos = cur.chars.len();
            push(&mut tokens, TokenKind::CommentText, &cur, start);
        } else if cur.starts_with("/*") {
            cur.pos += 2;
            if !cur.skip_past("*/") {
                state = LexState::BlockComment;
            }
            push(&mut tokens, TokenKind::CommentText, &cur, start);
        } else if cur.starts_with("\"\"\"") {
            cur.pos += 3;
            if !skip_text_block(&mut cur) {
                state = LexState::TextBlock;
            }
            push(&mut tokens, TokenKind::Literal, &cur, start);
        } else if c == '"' || c == '\'' {
            cur.pos += 1;
            if !skip_quoted(&mut cur, c) {
                return Err(LexError {
                    line: line_index,
                    column: start,
                    message: if c == '"' { "unterminated string literal" } else { "unterminated character literal" },
                });
            }
            push(&mut tokens, TokenKind::Literal, &cur, start);
        } else if c.is_ascii_digit() || (c == '.' && cur.peek(1).is_some_and(|d| d.is_ascii_digit())) {
            lex_number(&mut cur);
            push(&mut tokens, TokenKind::Literal, &cur, start);
        } else if is_ident_start(c) {
            while cur.peek(0).is_some_and(is_ident_part) {
                cur.pos += 1;
            }
            let word = cur.slice(start, cur.pos);
            let kind = if is_keyword(word) {
                TokenKind::Keyword
            } else if matches!(word, "true" | "false" | "null") {
                TokenKind::Literal
            } else {
                TokenKind::Identifier
            };
            push(&mut tokens, kind, &cur, start);
        } else if let Some(sep) = SEPARATORS.iter().find(|s| cur.starts_with(s)) {
            cur.pos += sep.chars().count();
            push(&mut tokens, TokenKind::Separator, &cur, start);
        } else if let Some(op) = OPERATORS.iter().find(|s| cur.starts_with(s)) {
            cur.pos += op.chars().count();
            push(&mut tokens, TokenKind::Operator, &cur, start);
        } else {
            // Stray characters (`#`, `\`, ...) are not valid Java but must
            // still round-trip; lex them as single-char operators.
            cur.pos += 1;
            push(&mut tokens, TokenKind::Operator, &cur, start);
        }
    }
    Ok((tokens, state))
}

/// Skip a quoted literal body after the opening quote. Returns false if the
/// line ends before the closing quote.
fn skip_quoted(cur: &mut Cursor<'_>, quote: char) -> bool {
    while let Some(c) = cur.peek(0) {
        cur.pos += 1;
        if c == '\\' {
            cur.pos += 1;
        } else if c == quote {
            return true;
        }
    }
    false
}

fn skip_text_block(cur: &mut Cursor<'_>) -> bool {
    while let Some(c) = cur.peek(0) {
        if c == '\\' {
            cur.pos += 2;
            continue;
        }
        if cur.starts_with("\"\"\"") {
            cur.pos += 3;
            return true;
        }
        cur.pos += 1;
    }
    cur.pos = cur.chars.len();
    false
}

fn lex_number(cur: &mut Cursor<'_>) {
    let hex = cur.peek(0) == Some('0') && matches!(cur.peek(1), Some('x' | 'X'));
    let bin = cur.peek(0) == Some('0') && matches!(cur.peek(1), Some('b' | 'B'));
    if hex || bin {
        cur.pos += 2;
    }
    let exp_chars: &[char] = if hex { &['p', 'P'] } else { &['e', 'E'] };
    while let Some(c) = cur.peek(0) {
        if exp_chars.contains(&c) && !bin {
            cur.pos += 1;
            if matches!(cur.peek(0), Some('+' | '-')) {
                cur.pos += 1;
            }
        } else if c.is_ascii_hexdigit() && (hex || c.is_ascii_digit() || bin) {
            cur.pos += 1;
        } else if c == '_' || c == '.' {
            // `1..2` does not occur in Java; a `.` followed by an identifier
            // start is a member access on a literal, which Java rejects, so
            // always consuming is fine.
            cur.pos += 1;
        } else if matches!(c, 'l' | 'L' | 'f' | 'F' | 'd' | 'D') {
            cur.pos += 1;
            break;
        } else {
            break;
        }
    }
}

/// Tokenize every line of `lines`, threading the carry state. Lines that
/// fail to lex produce an error entry and reset the state to
/// [`LexState::Code`].
pub fn tokenize_lines<'a, I>(lines: I) -> Vec<Result<Vec<Token>, LexError>>
where
    I: IntoIterator<Item = &'a str>,
{
    let mut state = LexState::Code;
    lines
        .into_iter()
        .enumerate()
        .map(|(i, line)| match tokenize_line(line, i, state) {
            Ok((toks, next)) => {
                state = next;
                Ok(toks)
            }
            Err(e) => {
                state = LexState::Code;
                Err(e)
            }
        })
        .collect()
}

/// States in effect at the start of each line.
pub fn line_start_states<'a, I>(lines: I) -> Vec<LexState>
where
    I: IntoIterator<Item = &'a str>,
{
    let mut state = LexState::Code;
    lines
        .into_iter()
        .enumerate()
        .map(|(i, line)| {
            let at_start = state;
            state = tokenize_line(line, i, state).map_or(LexState::Code, |(_, s)| s);
            at_start
        })
        .collect()
}
