//! Hand-written lexer for AJML source files.

use std::sync::Arc;

use crate::span::{LineCol, Span};
use crate::syntax::token::{Keyword, Punct, Token, TokenKind};
use crate::syntax::SyntaxError;

struct Lexer<'s> {
    src: &'s str,
    bytes: &'s [u8],
    file: Arc<str>,
    pos: usize,
    line: u32,
    column: u32,
}

/// Splits `source` into tokens, ending with a zero-width end-of-input
/// token. Whitespace and comments (`//` and `/* */`) are skipped but
/// advance line/column bookkeeping so spans stay exact.
pub fn tokenize(source: &str, file_name: &str) -> Result<Vec<Token>, SyntaxError> {
    let mut lexer = Lexer {
        src: source,
        bytes: source.as_bytes(),
        file: Arc::from(file_name),
        pos: 0,
        line: 1,
        column: 1,
    };
    let mut tokens = Vec::new();
    loop {
        lexer.skip_trivia()?;
        if lexer.pos >= lexer.bytes.len() {
            let here = lexer.here();
            tokens.push(Token {
                kind: TokenKind::Eof,
                lexeme: String::new(),
                span: Span::new(lexer.file.clone(), here, here),
                offset: lexer.pos,
            });
            return Ok(tokens);
        }
        tokens.push(lexer.next_token()?);
    }
}

impl<'s> Lexer<'s> {
    fn here(&self) -> LineCol {
        LineCol::new(self.line, self.column)
    }

    fn peek(&self) -> Option<u8> {
        self.bytes.get(self.pos).copied()
    }

    fn peek2(&self) -> Option<u8> {
        self.bytes.get(self.pos + 1).copied()
    }

    fn bump(&mut self) -> Option<u8> {
        let b = self.peek()?;
        self.pos += 1;
        if b == b'\n' {
            self.line += 1;
            self.column = 1;
        } else {
            self.column += 1;
        }
        Some(b)
    }

    fn skip_trivia(&mut self) -> Result<(), SyntaxError> {
        loop {
            match self.peek() {
                Some(b' ') | Some(b'\t') | Some(b'\r') | Some(b'\n') => {
                    self.bump();
                }
                Some(b'/') if self.peek2() == Some(b'/') => {
                    while let Some(b) = self.peek() {
                        if b == b'\n' {
                            break;
                        }
                        self.bump();
                    }
                }
                Some(b'/') if self.peek2() == Some(b'*') => {
                    let start = self.here();
                    self.bump();
                    self.bump();
                    let mut closed = false;
                    while let Some(b) = self.peek() {
                        if b == b'*' && self.peek2() == Some(b'/') {
                            self.bump();
                            self.bump();
                            closed = true;
                            break;
                        }
                        self.bump();
                    }
                    if !closed {
                        return Err(SyntaxError::Lex {
                            message: "unterminated block comment".to_string(),
                            span: Span::new(self.file.clone(), start, self.here()),
                        });
                    }
                }
                _ => return Ok(()),
            }
        }
    }

    fn next_token(&mut self) -> Result<Token, SyntaxError> {
        let start = self.here();
        let offset = self.pos;
        let b = self.peek().expect("next_token called at end of input");

        if b.is_ascii_alphabetic() || b == b'_' {
            while matches!(self.peek(), Some(c) if c.is_ascii_alphanumeric() || c == b'_') {
                self.bump();
            }
            let lexeme = &self.src[offset..self.pos];
            let kind = match Keyword::from_str(lexeme) {
                Some(kw) => TokenKind::Keyword(kw),
                None => TokenKind::Ident,
            };
            return Ok(self.finish(kind, offset, start));
        }

        if b.is_ascii_digit() {
            while matches!(self.peek(), Some(c) if c.is_ascii_digit()) {
                self.bump();
            }
            return Ok(self.finish(TokenKind::IntLit, offset, start));
        }

        if b == b'"' {
            self.bump();
            loop {
                match self.peek() {
                    None | Some(b'\n') => {
                        return Err(SyntaxError::Lex {
                            message: "unterminated string literal".to_string(),
                            span: Span::new(self.file.clone(), start, self.here()),
                        });
                    }
                    Some(b'\\') => {
                        self.bump();
                        if self.peek().is_some() {
                            self.bump();
                        }
                    }
                    Some(b'"') => {
                        self.bump();
                        break;
                    }
                    Some(_) => {
                        self.bump();
                    }
                }
            }
            return Ok(self.finish(TokenKind::StrLit, offset, start));
        }

        let punct = match b {
            b'{' => Some(Punct::LBrace),
            b'}' => Some(Punct::RBrace),
            b'(' => Some(Punct::LParen),
            b')' => Some(Punct::RParen),
            b';' => Some(Punct::Semi),
            b':' => Some(Punct::Colon),
            b',' => Some(Punct::Comma),
            b'+' => Some(Punct::Plus),
            b'-' => Some(Punct::Minus),
            b'*' => Some(Punct::Star),
            b'/' => Some(Punct::Slash),
            _ => None,
        };
        if let Some(p) = punct {
            self.bump();
            return Ok(self.finish(TokenKind::Punct(p), offset, start));
        }

        let two = |lexer: &mut Self, second: u8, long: Punct, short: Punct| {
            lexer.bump();
            if lexer.peek() == Some(second) {
                lexer.bump();
                long
            } else {
                short
            }
        };
        let punct = match b {
            b'.' => {
                self.bump();
                if self.peek() == Some(b'.') {
                    self.bump();
                    Some(Punct::DotDot)
                } else {
                    Some(Punct::Dot)
                }
            }
            b'=' => Some(two(self, b'=', Punct::Eq, Punct::Assign)),
            b'!' => Some(two(self, b'=', Punct::Ne, Punct::Bang)),
            b'<' => Some(two(self, b'=', Punct::Le, Punct::Lt)),
            b'>' => Some(two(self, b'=', Punct::Ge, Punct::Gt)),
            b'&' => {
                if self.peek2() == Some(b'&') {
                    self.bump();
                    self.bump();
                    Some(Punct::AndAnd)
                } else {
                    None
                }
            }
            b'|' => {
                if self.peek2() == Some(b'|') {
                    self.bump();
                    self.bump();
                    Some(Punct::OrOr)
                } else {
                    None
                }
            }
            _ => None,
        };
        if let Some(p) = punct {
            return Ok(self.finish(TokenKind::Punct(p), offset, start));
        }

        // Consume one whole character so the error span is sensible for
        // multi-byte input.
        let ch_len = self.src[self.pos..].chars().next().map_or(1, |c| c.len_utf8());
        for _ in 0..ch_len {
            self.bump();
        }
        Err(SyntaxError::Lex {
            message: format!("illegal character {:?}", &self.src[offset..self.pos]),
            span: Span::new(self.file.clone(), start, self.here()),
        })
    }

    fn finish(&self, kind: TokenKind, offset: usize, start: LineCol) -> Token {
        Token {
            kind,
            lexeme: self.src[offset..self.pos].to_string(),
            span: Span::new(self.file.clone(), start, self.here()),
            offset,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn kinds(src: &str) -> Vec<Token> {
        tokenize(src, "test.ajml").expect("lex failure")
    }

    #[test]
    fn keywords_and_punctuation() {
        let toks = kinds("privileged aspect A {}");
        let lexemes: Vec<&str> = toks.iter().map(|t| t.lexeme.as_str()).collect();
        assert_eq!(lexemes, vec!["privileged", "aspect", "A", "{", "}", ""]);
        assert_eq!(toks[0].keyword(), Some(Keyword::Privileged));
        assert_eq!(toks[1].keyword(), Some(Keyword::Aspect));
        assert_eq!(toks[2].kind, TokenKind::Ident);
    }

    #[test]
    fn line_comments_are_skipped() {
        let toks = kinds("int x = 3; // c");
        let lexemes: Vec<&str> = toks.iter().map(|t| t.lexeme.as_str()).collect();
        assert_eq!(lexemes, vec!["int", "x", "=", "3", ";", ""]);
    }

    #[test]
    fn illegal_character_reports_span() {
        let err = tokenize("proceed(\u{0000}", "test.ajml").unwrap_err();
        match err {
            SyntaxError::Lex { span, message } => {
                assert!(message.contains("illegal character"), "{message}");
                assert_eq!(span.start.line, 1);
                assert_eq!(span.start.column, 9);
            }
            other => panic!("expected lex error, got {other:?}"),
        }
    }

    #[test]
    fn unterminated_block_comment() {
        let err = tokenize("aspect A { /* oops", "test.ajml").unwrap_err();
        assert!(matches!(err, SyntaxError::Lex { .. }));
    }

    #[test]
    fn unterminated_string() {
        let err = tokenize("x = \"abc", "test.ajml").unwrap_err();
        assert!(matches!(err, SyntaxError::Lex { .. }));
    }

    #[test]
    fn lexemes_reproduce_source() {
        let src = "class C { /* block */ int x = 1; // tail\n  void m() { x = x + 1; } }\r\n";
        let toks = kinds(src);
        let mut rebuilt = String::new();
        let mut cursor = 0usize;
        for t in &toks {
            let gap = &src[cursor..t.offset];
            assert!(
                gap.chars().all(|c| c.is_whitespace()) || gap.contains("//") || gap.contains("/*"),
                "unexpected gap {gap:?}"
            );
            rebuilt.push_str(gap);
            rebuilt.push_str(&t.lexeme);
            cursor = t.offset + t.lexeme.len();
        }
        rebuilt.push_str(&src[cursor..]);
        assert_eq!(rebuilt, src);
    }

    #[test]
    fn token_spans_are_one_based_and_nonempty() {
        let toks = kinds("aspect\nBig {\n  pointcut p(): call(* C.m(..));\n}");
        for t in &toks {
            if t.is_eof() {
                continue;
            }
            assert!(t.span.start.line >= 1);
            assert!(t.span.start.column >= 1);
            assert!(t.span.width() >= 1, "token {:?} has empty span", t.lexeme);
        }
    }
}
