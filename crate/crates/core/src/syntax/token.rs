//! Token definitions for the AJML lexer.

use std::fmt;

use crate::span::Span;

/// Reserved words of the language. Type names other than the primitive
/// keywords (`String`, `Object`, class names) are ordinary identifiers.
#[derive(Clone, Copy, Debug, Eq, PartialEq, Ord, PartialOrd, Hash)]
pub enum Keyword {
    Class,
    Aspect,
    Privileged,
    Pointcut,
    Before,
    After,
    Around,
    Declare,
    Parents,
    Implements,
    Proceed,
    If,
    Else,
    While,
    Return,
    True,
    False,
    Null,
    Private,
    Public,
    Execution,
    Call,
    Args,
    Int,
    Boolean,
    Void,
}

impl Keyword {
    pub fn from_str(s: &str) -> Option<Keyword> {
        use Keyword::*;
        Some(match s {
            "class" => Class,
            "aspect" => Aspect,
            "privileged" => Privileged,
            "pointcut" => Pointcut,
            "before" => Before,
            "after" => After,
            "around" => Around,
            "declare" => Declare,
            "parents" => Parents,
            "implements" => Implements,
            "proceed" => Proceed,
            "if" => If,
            "else" => Else,
            "while" => While,
            "return" => Return,
            "true" => True,
            "false" => False,
            "null" => Null,
            "private" => Private,
            "public" => Public,
            "execution" => Execution,
            "call" => Call,
            "args" => Args,
            "int" => Int,
            "boolean" => Boolean,
            "void" => Void,
            _ => return None,
        })
    }

    pub fn as_str(&self) -> &'static str {
        use Keyword::*;
        match self {
            Class => "class",
            Aspect => "aspect",
            Privileged => "privileged",
            Pointcut => "pointcut",
            Before => "before",
            After => "after",
            Around => "around",
            Declare => "declare",
            Parents => "parents",
            Implements => "implements",
            Proceed => "proceed",
            If => "if",
            Else => "else",
            While => "while",
            Return => "return",
            True => "true",
            False => "false",
            Null => "null",
            Private => "private",
            Public => "public",
            Execution => "execution",
            Call => "call",
            Args => "args",
            Int => "int",
            Boolean => "boolean",
            Void => "void",
        }
    }
}

#[derive(Clone, Copy, Debug, Eq, PartialEq, Ord, PartialOrd, Hash)]
pub enum Punct {
    LBrace,
    RBrace,
    LParen,
    RParen,
    Semi,
    Colon,
    Comma,
    Dot,
    DotDot,
    Assign,
    Eq,
    Ne,
    Lt,
    Le,
    Gt,
    Ge,
    Plus,
    Minus,
    Star,
    Slash,
    Bang,
    AndAnd,
    OrOr,
}

impl Punct {
    pub fn as_str(&self) -> &'static str {
        use Punct::*;
        match self {
            LBrace => "{",
            RBrace => "}",
            LParen => "(",
            RParen => ")",
            Semi => ";",
            Colon => ":",
            Comma => ",",
            Dot => ".",
            DotDot => "..",
            Assign => "=",
            Eq => "==",
            Ne => "!=",
            Lt => "<",
            Le => "<=",
            Gt => ">",
            Ge => ">=",
            Plus => "+",
            Minus => "-",
            Star => "*",
            Slash => "/",
            Bang => "!",
            AndAnd => "&&",
            OrOr => "||",
        }
    }
}

#[derive(Clone, Debug, Eq, PartialEq)]
pub enum TokenKind {
    Keyword(Keyword),
    Ident,
    IntLit,
    StrLit,
    Punct(Punct),
    Eof,
}

/// One lexical token. `offset` is the byte offset of the lexeme in the
/// original source; together with the lexeme it lets callers verify
/// that tokens plus skipped trivia reproduce the input exactly.
#[derive(Clone, Debug, Eq, PartialEq)]
pub struct Token {
    pub kind: TokenKind,
    pub lexeme: String,
    pub span: Span,
    pub offset: usize,
}

impl Token {
    pub fn is_eof(&self) -> bool {
        matches!(self.kind, TokenKind::Eof)
    }

    pub fn keyword(&self) -> Option<Keyword> {
        match self.kind {
            TokenKind::Keyword(k) => Some(k),
            _ => None,
        }
    }

    pub fn punct(&self) -> Option<Punct> {
        match self.kind {
            TokenKind::Punct(p) => Some(p),
            _ => None,
        }
    }

    /// Human-readable description used in parse error messages.
    pub fn describe(&self) -> String {
        match &self.kind {
            TokenKind::Keyword(k) => format!("keyword '{}'", k.as_str()),
            TokenKind::Ident => format!("identifier '{}'", self.lexeme),
            TokenKind::IntLit => format!("integer '{}'", self.lexeme),
            TokenKind::StrLit => "string literal".to_string(),
            TokenKind::Punct(p) => format!("'{}'", p.as_str()),
            TokenKind::Eof => "end of input".to_string(),
        }
    }
}

impl fmt::Display for Token {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.lexeme)
    }
}
