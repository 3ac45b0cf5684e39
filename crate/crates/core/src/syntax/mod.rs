//! Lexing and parsing of `.ajml` source files.

pub mod ast;
pub mod lexer;
pub mod parser;
pub mod token;
pub mod unparse;

use std::collections::BTreeSet;

use thiserror::Error;

use crate::span::Span;

pub use ast::*;
pub use lexer::tokenize;
pub use parser::parse_program;
pub use token::{Keyword, Punct, Token, TokenKind};
pub use unparse::unparse;

#[derive(Clone, Debug, Error, PartialEq, Eq)]
pub enum SyntaxError {
    #[error("{span}: error: {message}")]
    Lex { message: String, span: Span },
    #[error("{span}: error: expected {}, found {found}", expected_list(.expected))]
    Parse { expected: BTreeSet<String>, found: String, span: Span },
}

impl SyntaxError {
    pub fn span(&self) -> &Span {
        match self {
            SyntaxError::Lex { span, .. } | SyntaxError::Parse { span, .. } => span,
        }
    }
}

fn expected_list(expected: &BTreeSet<String>) -> String {
    expected.iter().cloned().collect::<Vec<_>>().join(" or ")
}

/// Tokenizes and parses one source file.
pub fn parse_source(file_name: &str, source: &str) -> Result<SyntaxTree, SyntaxError> {
    let tokens = tokenize(source, file_name)?;
    parse_program(tokens, file_name)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parse(src: &str) -> SyntaxTree {
        parse_source("test.ajml", src).expect("parse failure")
    }

    #[test]
    fn empty_aspect() {
        let tree = parse("aspect A { }");
        assert_eq!(tree.decls.len(), 1);
        match &tree.decls[0] {
            Decl::Aspect(a) => {
                assert_eq!(a.name.name, "A");
                assert!(!a.privileged);
                assert!(a.members.is_empty());
            }
            other => panic!("expected aspect, got {other:?}"),
        }
    }

    #[test]
    fn proceed_in_class_method_parses() {
        // Legal syntactically; the model rejects it later.
        let tree = parse("class C { void m() { proceed(); } }");
        match &tree.decls[0] {
            Decl::Class(c) => assert_eq!(c.members.len(), 1),
            other => panic!("expected class, got {other:?}"),
        }
    }

    #[test]
    fn advice_forms() {
        let src = r#"
aspect A {
    pointcut adds(Object o): execution(* C.add(..)) && args(o);
    before(Object o): adds(o) {
        print(o);
    }
    after(): execution(* C.clear()) {
        log("cleared");
    }
    Object around(Object o): adds(o) || call(* C.m(int, ..)) {
        return proceed(o);
    }
}
"#;
        let tree = parse(src);
        match &tree.decls[0] {
            Decl::Aspect(a) => {
                assert_eq!(a.members.len(), 4);
                let kinds: Vec<&AdviceNode> = a
                    .members
                    .iter()
                    .filter_map(|m| match m {
                        AspectMember::Advice(adv) => Some(adv),
                        _ => None,
                    })
                    .collect();
                assert_eq!(kinds.len(), 3);
                assert_eq!(kinds[0].kind, AdviceKind::Before);
                assert_eq!(kinds[1].kind, AdviceKind::After);
                assert_eq!(kinds[2].kind, AdviceKind::Around);
                assert_eq!(kinds[2].return_type, Some(TypeName::Named("Object".into())));
            }
            other => panic!("expected aspect, got {other:?}"),
        }
    }

    #[test]
    fn inter_type_declarations() {
        let src = r#"
aspect A {
    declare parents : C implements Comparable;
    public int C.compareTo(Object other) {
        return 0;
    }
    private int C.maxSize = 100;
}
"#;
        let tree = parse(src);
        match &tree.decls[0] {
            Decl::Aspect(a) => {
                assert!(matches!(a.members[0], AspectMember::DeclareParents(_)));
                assert!(matches!(a.members[1], AspectMember::InterTypeMethod(_)));
                assert!(matches!(a.members[2], AspectMember::InterTypeField(_)));
            }
            other => panic!("expected aspect, got {other:?}"),
        }
    }

    #[test]
    fn parse_error_reports_expected_set() {
        let err = parse_source("test.ajml", "class C { void m( { } }").unwrap_err();
        match err {
            SyntaxError::Parse { expected, span, .. } => {
                assert!(!expected.is_empty());
                assert_eq!(span.start.line, 1);
            }
            other => panic!("expected parse error, got {other:?}"),
        }
    }

    #[test]
    fn identical_input_identical_output() {
        let src = "class C { int x = 1; void m() { x = x + 1; } }";
        let a = parse_source("t.ajml", src);
        let b = parse_source("t.ajml", src);
        assert_eq!(a, b);
        let bad = "class C { int x = ; }";
        let ea = parse_source("t.ajml", bad).unwrap_err();
        let eb = parse_source("t.ajml", bad).unwrap_err();
        assert_eq!(ea.to_string(), eb.to_string());
    }

    #[test]
    fn unparse_round_trip() {
        let src = r#"
class C {
    private int count = 0;
    public boolean add(Object item) {
        count = count + 1;
        if (count > 10) {
            return false;
        }
        while (count < 0) {
            count = count + 1;
        }
        return true;
    }
}
privileged aspect A {
    private int seen = 0;
    pointcut adds(Object o): execution(* C.add(..)) && args(o);
    Object around(Object o): adds(o) && !call(* C.other(..)) {
        String s = "x:" + o;
        return proceed(s);
    }
}
"#;
        let t1 = parse(src);
        let printed = unparse(&t1);
        let t2 = parse_source("test.ajml", &printed).expect("unparsed source must reparse");
        assert_eq!(printed, unparse(&t2));
    }

    #[test]
    fn node_spans_nest_within_parents() {
        let src = r#"
class C {
    int x = 0;
    void m(int a) {
        if (a > 0) {
            x = a;
        }
    }
}
aspect A {
    before(): execution(* C.m(..)) {
        print("m");
    }
}
"#;
        let tree = parse(src);
        for decl in &tree.decls {
            match decl {
                Decl::Class(c) => {
                    for m in &c.members {
                        assert!(c.span.contains(m.span()), "member span escapes class span");
                    }
                }
                Decl::Aspect(a) => {
                    for m in &a.members {
                        assert!(a.span.contains(m.span()), "member span escapes aspect span");
                        if let AspectMember::Advice(adv) = m {
                            assert!(adv.span.contains(&adv.body.span));
                            assert!(adv.span.contains(adv.pointcut.span()));
                            for s in &adv.body.stmts {
                                assert!(adv.body.span.contains(s.span()));
                            }
                        }
                    }
                }
            }
        }
    }
}
