//! Java-aware lexical and structural analysis at line granularity.

pub mod declarations;
pub mod lexer;
pub mod lines;

pub use declarations::{
    extract_declarations, DeclKind, DeclarationIndex, MethodDecl, ParameterDecl, SourcePos, StructuralError,
    VariableDecl, VariableKind,
};
pub use lexer::{tokenize_line, LexError, LexState, Token, TokenKind};
pub use lines::{classify_line_kind, line_kinds, line_kinds_of, split_lines, LineKind};

/// Syntax-tree category a changed token is attributed to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub enum NodeCategory {
    ExpressionNode,
    ControlNode,
    CallNode,
    LiteralNode,
    DeclarationNode,
    CommentNode,
    OtherNode,
}

impl NodeCategory {
    pub const ALL: [NodeCategory; 7] = [
        NodeCategory::ExpressionNode,
        NodeCategory::ControlNode,
        NodeCategory::CallNode,
        NodeCategory::LiteralNode,
        NodeCategory::DeclarationNode,
        NodeCategory::CommentNode,
        NodeCategory::OtherNode,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            NodeCategory::ExpressionNode => "ExpressionNode",
            NodeCategory::ControlNode => "ControlNode",
            NodeCategory::CallNode => "CallNode",
            NodeCategory::LiteralNode => "LiteralNode",
            NodeCategory::DeclarationNode => "DeclarationNode",
            NodeCategory::CommentNode => "CommentNode",
            NodeCategory::OtherNode => "OtherNode",
        }
    }
}
