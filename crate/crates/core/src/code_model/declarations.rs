//! Declaration discovery by brace-depth tracking over the token stream.
//!
//! This is not a parser. It walks the code tokens once, keeps a stack of
//! brace scopes, and at every position where a declaration may start it
//! tries a small set of signature patterns (type declaration, method or
//! constructor, field or local variable). Lambda parameters and
//! `for`/`catch`/`try` header variables are picked up the same way.

use alloc::boxed::Box;
use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::fmt;

use super::lexer::{tokenize_lines, Token, TokenKind};
use super::lines::split_lines;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "kebab-case"))]
pub enum DeclKind {
    Class,
    Method,
    Variable,
    Parameter,
}

/// Where a declared name first appears.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct SourcePos {
    pub line: usize,
    pub column: usize,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ClassDecl {
    pub name: String,
    pub pos: SourcePos,
    pub is_interface: bool,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MethodDecl {
    pub name: String,
    /// Line holding the method name.
    pub signature_line: usize,
    pub pos: SourcePos,
    pub owner: String,
    pub has_body: bool,
    /// Carries an `@Override` annotation.
    pub overrides: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum VariableKind {
    Field,
    Local,
    Lambda,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VariableDecl {
    pub name: String,
    /// `Class` for fields, `Class.method` for locals.
    pub scope: String,
    pub kind: VariableKind,
    /// Base type name (`Node` for `Node<T>[]`), empty for untyped lambda
    /// parameters and `var`.
    pub type_name: String,
    pub pos: SourcePos,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParameterDecl {
    pub name: String,
    pub method: String,
    pub type_name: String,
    pub pos: SourcePos,
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct DeclarationIndex {
    pub classes: Vec<ClassDecl>,
    /// Methods with a body, constructors excluded.
    pub methods: Vec<MethodDecl>,
    pub constructors: Vec<MethodDecl>,
    /// Bodiless signatures (interface or abstract methods).
    pub abstract_methods: Vec<MethodDecl>,
    pub variables: Vec<VariableDecl>,
    pub parameters: Vec<ParameterDecl>,
}

impl DeclarationIndex {
    pub fn method_count(&self) -> usize {
        self.methods.len()
    }

    pub fn is_empty(&self) -> bool {
        self.classes.is_empty()
            && self.methods.is_empty()
            && self.constructors.is_empty()
            && self.abstract_methods.is_empty()
            && self.variables.is_empty()
            && self.parameters.is_empty()
    }

    /// Every declared name with its kind, in source order. A name declared
    /// several times appears once per declaration.
    pub fn in_source_order(&self) -> Vec<(SourcePos, DeclKind, &str)> {
        let mut all: Vec<(SourcePos, DeclKind, &str)> = Vec::new();
        all.extend(self.classes.iter().map(|c| (c.pos, DeclKind::Class, c.name.as_str())));
        all.extend(
            self.methods.iter().chain(&self.abstract_methods).map(|m| (m.pos, DeclKind::Method, m.name.as_str())),
        );
        all.extend(self.variables.iter().map(|v| (v.pos, DeclKind::Variable, v.name.as_str())));
        all.extend(self.parameters.iter().map(|p| (p.pos, DeclKind::Parameter, p.name.as_str())));
        all.sort_by_key(|&(pos, kind, _)| (pos, kind));
        all
    }
}

/// Brace structure was unbalanced; `partial` holds what was found anyway.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StructuralError {
    pub line: usize,
    pub message: &'static str,
    pub partial: Box<DeclarationIndex>,
}

impl fmt::Display for StructuralError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "line {}: {}", self.line, self.message)
    }
}

const MODIFIERS: &[&str] = &[
    "public",
    "private",
    "protected",
    "static",
    "final",
    "abstract",
    "transient",
    "volatile",
    "synchronized",
    "native",
    "strictfp",
    "default",
];

const PRIMITIVES: &[&str] = &["boolean", "byte", "char", "short", "int", "long", "float", "double", "void"];

#[derive(Debug, Clone)]
enum Scope {
    Type { name: String },
    Method { name: String },
    Block,
}

/// Code tokens of `source` with comments dropped. Lines that fail to lex
/// contribute nothing.
pub fn code_tokens(source: &str) -> Vec<Token> {
    tokenize_lines(split_lines(source))
        .into_iter()
        .filter_map(Result::ok)
        .flatten()
        .filter(|t| !t.is_comment())
        .collect()
}

pub fn extract_declarations(source: &str) -> Result<DeclarationIndex, StructuralError> {
    let tokens = code_tokens(source);
    Scanner::new(&tokens).run()
}

struct Scanner<'t> {
    toks: &'t [Token],
    index: DeclarationIndex,
    scopes: Vec<Scope>,
    /// Scope kind that the next `{` opens, decided when a declaration
    /// header was recognised.
    pending: Option<Scope>,
    error: Option<(usize, &'static str)>,
}

impl<'t> Scanner<'t> {
    fn new(toks: &'t [Token]) -> Self {
        Scanner { toks, index: DeclarationIndex::default(), scopes: Vec::new(), pending: None, error: None }
    }

    fn tok(&self, i: usize) -> Option<&'t Token> {
        self.toks.get(i)
    }

    fn is(&self, i: usize, kind: TokenKind, text: &str) -> bool {
        self.tok(i).is_some_and(|t| t.is(kind, text))
    }

    fn is_sep(&self, i: usize, text: &str) -> bool {
        self.is(i, TokenKind::Separator, text)
    }

    fn is_op(&self, i: usize, text: &str) -> bool {
        self.is(i, TokenKind::Operator, text)
    }

    fn is_ident(&self, i: usize) -> bool {
        self.tok(i).is_some_and(|t| t.kind == TokenKind::Identifier)
    }

    fn pos(&self, i: usize) -> SourcePos {
        let t = &self.toks[i];
        SourcePos { line: t.line, column: t.column }
    }

    fn current_type(&self) -> String {
        self.scopes
            .iter()
            .rev()
            .find_map(|s| match s {
                Scope::Type { name } => Some(name.clone()),
                _ => None,
            })
            .unwrap_or_default()
    }

    fn current_method(&self) -> Option<String> {
        self.scopes
            .iter()
            .rev()
            .find_map(|s| match s {
                Scope::Method { name } => Some(name.clone()),
                Scope::Type { .. } => Some(String::new()),
                Scope::Block => None,
            })
            .filter(|n| !n.is_empty())
    }

    fn at_member_level(&self) -> bool {
        self.scopes.is_empty() || matches!(self.scopes.last(), Some(Scope::Type { .. }))
    }

    fn run(mut self) -> Result<DeclarationIndex, StructuralError> {
        let mut i = 0;
        let mut stmt_start = true;
        while i < self.toks.len() {
            let t = &self.toks[i];
            if stmt_start {
                stmt_start = false;
                if let Some(next) = self.try_declaration(i) {
                    i = next;
                    continue;
                }
            }
            match (t.kind, t.text.as_str()) {
                (TokenKind::Separator, "{") => {
                    let scope = self.pending.take().unwrap_or_else(|| {
                        if self.opens_anonymous_class(i) {
                            Scope::Type { name: self.anonymous_type_name(i) }
                        } else {
                            Scope::Block
                        }
                    });
                    self.scopes.push(scope);
                    stmt_start = true;
                }
                (TokenKind::Separator, "}") => {
                    if self.scopes.pop().is_none() && self.error.is_none() {
                        self.error = Some((t.line, "unbalanced closing brace"));
                    }
                    stmt_start = true;
                }
                (TokenKind::Separator, ";") => stmt_start = true,
                (TokenKind::Operator, ":") => {
                    // `case X:` and `default:` labels start statements.
                    stmt_start = !self.at_member_level();
                }
                (TokenKind::Operator, "->") => self.lambda_params(i),
                (TokenKind::Separator, "(")
                    if i > 0
                        && self.toks[i - 1].kind == TokenKind::Keyword
                        && matches!(self.toks[i - 1].text.as_str(), "for" | "catch" | "try") =>
                {
                    self.header_variables(i + 1);
                }
                _ => {}
            }
            i += 1;
        }
        if self.error.is_none() && !self.scopes.is_empty() {
            let line = self.toks.last().map_or(0, |t| t.line);
            self.error = Some((line, "unclosed brace at end of source"));
        }
        match self.error {
            None => Ok(self.index),
            Some((line, message)) => Err(StructuralError { line, message, partial: Box::new(self.index) }),
        }
    }

    /// Skip annotations (`@Foo`, `@a.B(x = 1)`) starting at `i`.
    fn skip_annotations(&self, mut i: usize) -> (usize, bool) {
        let mut overrides = false;
        while self.is_sep(i, "@") && !self.is(i + 1, TokenKind::Keyword, "interface") {
            i += 1;
            if self.is(i, TokenKind::Identifier, "Override") {
                overrides = true;
            }
            while self.is_ident(i) && self.is_sep(i + 1, ".") {
                i += 2;
            }
            if self.is_ident(i) {
                i += 1;
            }
            if self.is_sep(i, "(") {
                i = self.matching(i, "(", ")").map_or(self.toks.len(), |j| j + 1);
            }
        }
        (i, overrides)
    }

    fn skip_modifiers(&self, mut i: usize) -> (usize, bool) {
        let mut overrides = false;
        loop {
            let (after, ov) = self.skip_annotations(i);
            overrides |= ov;
            i = after;
            match self.tok(i) {
                Some(t) if t.kind == TokenKind::Keyword && MODIFIERS.contains(&t.text.as_str()) => {
                    // `default:` in a switch is a label, not a modifier.
                    if t.text == "default" && self.is_op(i + 1, ":") {
                        return (i, overrides);
                    }
                    i += 1
                }
                Some(t)
                    if t.kind == TokenKind::Identifier
                        && matches!(t.text.as_str(), "sealed" | "non")
                        && self.is_ident(i + 1) =>
                {
                    i += 1
                }
                _ => return (i, overrides),
            }
        }
    }

    /// Index of the separator closing the group opened at `open`.
    fn matching(&self, open: usize, left: &str, right: &str) -> Option<usize> {
        let mut depth = 0usize;
        for j in open..self.toks.len() {
            if self.is_sep(j, left) {
                depth += 1;
            } else if self.is_sep(j, right) {
                depth -= 1;
                if depth == 0 {
                    return Some(j);
                }
            }
        }
        None
    }

    /// Skip a generic argument list starting at `<`. Returns the index after
    /// the closing `>` or `None` if the tokens cannot be type arguments.
    fn skip_type_args(&self, i: usize) -> Option<usize> {
        if !self.is_op(i, "<") {
            return None;
        }
        let mut depth: i32 = 0;
        let mut j = i;
        while let Some(t) = self.tok(j) {
            match (t.kind, t.text.as_str()) {
                (TokenKind::Operator, "<") => depth += 1,
                (TokenKind::Operator, ">") => depth -= 1,
                (TokenKind::Operator, ">>") => depth -= 2,
                (TokenKind::Operator, ">>>") => depth -= 3,
                (TokenKind::Operator, "?" | "&") => {}
                (TokenKind::Separator, "," | "." | "[" | "]" | "@") => {}
                (TokenKind::Identifier, _) => {}
                (TokenKind::Keyword, "extends" | "super") => {}
                (TokenKind::Keyword, k) if PRIMITIVES.contains(&k) => {}
                _ => return None,
            }
            j += 1;
            if depth <= 0 {
                return (depth == 0).then_some(j);
            }
        }
        None
    }

    /// Parse a type starting at `i`; returns (end index, base type name).
    fn parse_type(&self, i: usize) -> Option<(usize, String)> {
        let t = self.tok(i)?;
        let mut j;
        let base;
        match t.kind {
            TokenKind::Keyword if PRIMITIVES.contains(&t.text.as_str()) => {
                base = t.text.clone();
                j = i + 1;
            }
            TokenKind::Identifier => {
                base = t.text.clone();
                j = i + 1;
                loop {
                    if self.is_op(j, "<") {
                        j = self.skip_type_args(j)?;
                    }
                    if self.is_sep(j, ".") && self.is_ident(j + 1) {
                        j += 2;
                    } else {
                        break;
                    }
                }
            }
            _ => return None,
        }
        while self.is_sep(j, "[") && self.is_sep(j + 1, "]") {
            j += 2;
        }
        if self.is_sep(j, "...") {
            j += 1;
        }
        Some((j, base))
    }

    /// Try every declaration pattern at a statement start. Returns the index
    /// to resume scanning from when something was recorded.
    fn try_declaration(&mut self, start: usize) -> Option<usize> {
        let (i, overrides) = self.skip_modifiers(start);
        let t = self.tok(i)?;

        // Type declarations.
        let type_kw = match (t.kind, t.text.as_str()) {
            (TokenKind::Keyword, "class" | "interface" | "enum") => Some(t.text.as_str()),
            (TokenKind::Separator, "@") if self.is(i + 1, TokenKind::Keyword, "interface") => Some("interface"),
            (TokenKind::Identifier, "record") if self.is_ident(i + 1) && !self.is_sep(i + 2, "[") => {
                // `record Point(int x)` vs. a variable of type `record`.
                (self.is_sep(i + 2, "(") || self.is_op(i + 2, "<")).then_some("record")
            }
            _ => None,
        };
        if let Some(kw) = type_kw {
            let name_at = if t.text == "@" { i + 2 } else { i + 1 };
            if self.is_ident(name_at) {
                let name = self.toks[name_at].text.clone();
                self.index.classes.push(ClassDecl {
                    name: name.clone(),
                    pos: self.pos(name_at),
                    is_interface: kw == "interface",
                });
                if kw == "record" {
                    let open = (name_at + 1..self.toks.len()).find(|&j| self.is_sep(j, "("));
                    if let Some(open) = open {
                        self.parameter_list(open, &name);
                    }
                }
                self.pending = Some(Scope::Type { name });
                return Some(name_at + 1);
            }
            return None;
        }

        if self.at_member_level() {
            return self.member_declaration(i, overrides);
        }
        // Inside a method body or block.
        self.variable_declarators(i, VariableKind::Local, false)
    }

    fn member_declaration(&mut self, i: usize, overrides: bool) -> Option<usize> {
        let owner = self.current_type();
        let mut i = i;
        // Generic method type parameters: `<T extends Comparable<T>> T max(`.
        if self.is_op(i, "<") {
            i = self.skip_type_args(i)?;
        }
        // Constructor: `Owner(`.
        if self.is_ident(i) && self.toks[i].text == owner && self.is_sep(i + 1, "(") {
            let name_at = i;
            let close = self.parameter_list(i + 1, &owner)?;
            let has_body = self.body_follows(close + 1);
            let decl = self.method_decl(name_at, &owner, has_body, overrides);
            self.index.constructors.push(decl);
            if has_body {
                self.pending = Some(Scope::Method { name: owner });
            }
            return Some(close + 1);
        }
        let (after_type, _) = self.parse_type(i)?;
        if self.is_ident(after_type) && self.is_sep(after_type + 1, "(") {
            let name_at = after_type;
            let name = self.toks[name_at].text.clone();
            let close = self.parameter_list(name_at + 1, &name)?;
            let has_body = self.body_follows(close + 1);
            let decl = self.method_decl(name_at, &owner, has_body, overrides);
            if has_body {
                self.index.methods.push(decl);
                self.pending = Some(Scope::Method { name });
            } else {
                self.index.abstract_methods.push(decl);
            }
            return Some(close + 1);
        }
        self.variable_declarators(i, VariableKind::Field, false)
    }

    fn method_decl(&self, name_at: usize, owner: &str, has_body: bool, overrides: bool) -> MethodDecl {
        MethodDecl {
            name: self.toks[name_at].text.clone(),
            signature_line: self.toks[name_at].line,
            pos: self.pos(name_at),
            owner: owner.to_string(),
            has_body,
            overrides,
        }
    }

    /// After a parameter list: skip `throws A, B` and report whether a body
    /// `{` follows (as opposed to `;` or `default ...;`).
    fn body_follows(&self, mut j: usize) -> bool {
        if self.is(j, TokenKind::Keyword, "throws") {
            j += 1;
            while let Some(t) = self.tok(j) {
                if t.kind == TokenKind::Identifier || t.is(TokenKind::Separator, ",") || t.is(TokenKind::Separator, ".")
                {
                    j += 1;
                } else if self.is_op(j, "<") {
                    match self.skip_type_args(j) {
                        Some(n) => j = n,
                        None => break,
                    }
                } else {
                    break;
                }
            }
        }
        self.is_sep(j, "{")
    }

    /// Record the parameters between `(` at `open` and its match.
    fn parameter_list(&mut self, open: usize, method: &str) -> Option<usize> {
        let close = self.matching(open, "(", ")")?;
        let mut seg_start = open + 1;
        let mut depth = 0i32;
        for j in open + 1..=close {
            let t = &self.toks[j];
            let boundary = j == close || (depth == 0 && t.is(TokenKind::Separator, ","));
            match (t.kind, t.text.as_str()) {
                (TokenKind::Operator, "<") | (TokenKind::Separator, "(" | "[") => depth += 1,
                (TokenKind::Operator, ">") | (TokenKind::Separator, ")" | "]") if j != close => depth -= 1,
                (TokenKind::Operator, ">>") => depth -= 2,
                (TokenKind::Operator, ">>>") => depth -= 3,
                _ => {}
            }
            if boundary {
                let (first, _) = self.skip_modifiers(seg_start);
                let type_name = self.parse_type(first).map(|(_, b)| b).unwrap_or_default();
                let name_at = (seg_start..j).rev().find(|&k| self.is_ident(k));
                if let Some(k) = name_at {
                    // Skip the receiver parameter `Foo this`.
                    if k > first {
                        self.index.parameters.push(ParameterDecl {
                            name: self.toks[k].text.clone(),
                            method: method.to_string(),
                            type_name,
                            pos: self.pos(k),
                        });
                    }
                }
                seg_start = j + 1;
            }
        }
        Some(close)
    }

    /// Match `Type name [= init] (, name [= init])*` at `i`. Returns the
    /// index after the last declarator name when at least one was found.
    fn variable_declarators(&mut self, i: usize, kind: VariableKind, in_header: bool) -> Option<usize> {
        let (i, _) = self.skip_modifiers(i);
        let (after_type, type_name) = self.parse_type(i)?;
        if !self.is_ident(after_type) {
            return None;
        }
        let follows_ok = |s: &Self, j: usize| {
            s.is_op(j, "=")
                || s.is_sep(j, ";")
                || s.is_sep(j, ",")
                || (s.is_sep(j, "[") && s.is_sep(j + 1, "]"))
                || (in_header && (s.is_op(j, ":") || s.is_sep(j, ")")))
        };
        if !follows_ok(self, after_type + 1) {
            return None;
        }
        let scope = match kind {
            VariableKind::Field => self.current_type(),
            _ => self.local_scope(),
        };
        let type_name = if type_name == "var" { String::new() } else { type_name };
        let mut j = after_type;
        loop {
            self.index.variables.push(VariableDecl {
                name: self.toks[j].text.clone(),
                scope: scope.clone(),
                kind,
                type_name: type_name.clone(),
                pos: self.pos(j),
            });
            j += 1;
            while self.is_sep(j, "[") && self.is_sep(j + 1, "]") {
                j += 2;
            }
            if self.is_op(j, "=") {
                j = self.skip_initializer(j + 1);
            }
            if self.is_sep(j, ",") && self.is_ident(j + 1) && follows_ok(self, j + 2) {
                j += 1;
                continue;
            }
            break;
        }
        // Resume right after the first name so that braces inside the
        // initializers (array literals, anonymous classes, lambdas) are still
        // seen by the scope tracker.
        Some(after_type + 1)
    }

    /// Skip an initializer expression; stops at a depth-0 `,`, `;` or an
    /// unmatched `)`.
    fn skip_initializer(&self, mut j: usize) -> usize {
        let mut depth = 0i32;
        while let Some(t) = self.tok(j) {
            if t.kind == TokenKind::Separator {
                match t.text.as_str() {
                    "(" | "[" | "{" => depth += 1,
                    ")" | "]" | "}" => {
                        if depth == 0 {
                            return j;
                        }
                        depth -= 1;
                    }
                    "," | ";" if depth == 0 => return j,
                    _ => {}
                }
            }
            j += 1;
        }
        j
    }

    /// Variables declared in `for (...)`, `catch (...)` or `try (...)`.
    /// Later `try` resources are picked up as ordinary statements after
    /// their `;`.
    fn header_variables(&mut self, i: usize) {
        let is_catch = i >= 2 && self.is(i - 2, TokenKind::Keyword, "catch");
        if !is_catch {
            self.variable_declarators(i, VariableKind::Local, true);
            return;
        }
        // `catch (A | B e)`: the name sits right before the closing paren.
        let Some(close) = self.matching(i - 1, "(", ")") else { return };
        let (first, _) = self.skip_modifiers(i);
        if close > first + 1 && self.is_ident(close - 1) {
            let scope = self.local_scope();
            self.index.variables.push(VariableDecl {
                name: self.toks[close - 1].text.clone(),
                scope,
                kind: VariableKind::Local,
                type_name: self.tok(first).map(|t| t.text.clone()).unwrap_or_default(),
                pos: self.pos(close - 1),
            });
        }
    }

    fn local_scope(&self) -> String {
        let ty = self.current_type();
        match self.current_method() {
            Some(m) if !ty.is_empty() => alloc::format!("{ty}.{m}"),
            Some(m) => m,
            None => ty,
        }
    }

    fn lambda_params(&mut self, arrow: usize) {
        let Some(prev) = arrow.checked_sub(1) else { return };
        let mut names = Vec::new();
        if self.is_ident(prev) {
            names.push(prev);
        } else if self.is_sep(prev, ")") {
            // Find the opening paren of `(a, b) ->`.
            let mut depth = 0i32;
            let mut open = None;
            for j in (0..=prev).rev() {
                if self.is_sep(j, ")") {
                    depth += 1;
                } else if self.is_sep(j, "(") {
                    depth -= 1;
                    if depth == 0 {
                        open = Some(j);
                        break;
                    }
                }
            }
            let Some(open) = open else { return };
            for j in open + 1..prev {
                if self.is_ident(j) && (self.is_sep(j + 1, ",") || j + 1 == prev) {
                    names.push(j);
                }
            }
        }
        let scope = self.local_scope();
        for j in names {
            self.index.variables.push(VariableDecl {
                name: self.toks[j].text.clone(),
                scope: scope.clone(),
                kind: VariableKind::Lambda,
                type_name: String::new(),
                pos: self.pos(j),
            });
        }
    }

    /// `new Foo<>(...) {` opens an anonymous class body.
    fn opens_anonymous_class(&self, brace: usize) -> bool {
        if brace == 0 || !self.is_sep(brace - 1, ")") {
            return false;
        }
        self.new_expression_start(brace - 1).is_some()
    }

    fn anonymous_type_name(&self, brace: usize) -> String {
        self.new_expression_start(brace - 1).and_then(|n| self.tok(n + 1)).map(|t| t.text.clone()).unwrap_or_default()
    }

    /// For a `)` closing a constructor call, the index of its `new`.
    fn new_expression_start(&self, close: usize) -> Option<usize> {
        let mut depth = 0i32;
        let mut open = None;
        for j in (0..=close).rev() {
            if self.is_sep(j, ")") {
                depth += 1;
            } else if self.is_sep(j, "(") {
                depth -= 1;
                if depth == 0 {
                    open = Some(j);
                    break;
                }
            }
        }
        let mut j = open?.checked_sub(1)?;
        // Walk back over `Foo`, `a.b.Foo`, `Foo<Bar>` and `Foo<>`.
        loop {
            let t = self.tok(j)?;
            match (t.kind, t.text.as_str()) {
                (TokenKind::Keyword, "new") => return Some(j),
                (TokenKind::Identifier, _)
                | (TokenKind::Separator, "." | "," | "[" | "]")
                | (TokenKind::Operator, "<" | ">" | ">>" | "?") => j = j.checked_sub(1)?,
                _ => return None,
            }
        }
    }
}
