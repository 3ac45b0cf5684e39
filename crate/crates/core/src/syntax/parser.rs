//! Recursive descent parser. The first error aborts the parse of the
//! whole file; there is no recovery.

use std::collections::BTreeSet;

use crate::span::Span;
use crate::syntax::ast::*;
use crate::syntax::token::{Keyword, Punct, Token, TokenKind};
use crate::syntax::SyntaxError;

pub fn parse_program(tokens: Vec<Token>, file: &str) -> Result<SyntaxTree, SyntaxError> {
    let mut parser = Parser { tokens, pos: 0 };
    parser.program(file)
}

struct Parser {
    tokens: Vec<Token>,
    pos: usize,
}

impl Parser {
    fn peek(&self) -> &Token {
        &self.tokens[self.pos.min(self.tokens.len() - 1)]
    }

    fn peek_at(&self, n: usize) -> &Token {
        &self.tokens[(self.pos + n).min(self.tokens.len() - 1)]
    }

    fn bump(&mut self) -> Token {
        let tok = self.peek().clone();
        if self.pos + 1 < self.tokens.len() {
            self.pos += 1;
        }
        tok
    }

    fn at_punct(&self, p: Punct) -> bool {
        self.peek().punct() == Some(p)
    }

    fn at_keyword(&self, k: Keyword) -> bool {
        self.peek().keyword() == Some(k)
    }

    fn eat_punct(&mut self, p: Punct) -> bool {
        if self.at_punct(p) {
            self.bump();
            true
        } else {
            false
        }
    }

    fn eat_keyword(&mut self, k: Keyword) -> bool {
        if self.at_keyword(k) {
            self.bump();
            true
        } else {
            false
        }
    }

    fn error<T>(&self, expected: &[&str]) -> Result<T, SyntaxError> {
        let found = self.peek();
        Err(SyntaxError::Parse {
            expected: expected.iter().map(|s| s.to_string()).collect::<BTreeSet<_>>(),
            found: found.describe(),
            span: found.span.clone(),
        })
    }

    fn expect_punct(&mut self, p: Punct) -> Result<Token, SyntaxError> {
        if self.at_punct(p) {
            Ok(self.bump())
        } else {
            self.error(&[&format!("'{}'", p.as_str())])
        }
    }

    fn expect_keyword(&mut self, k: Keyword) -> Result<Token, SyntaxError> {
        if self.at_keyword(k) {
            Ok(self.bump())
        } else {
            self.error(&[&format!("keyword '{}'", k.as_str())])
        }
    }

    fn expect_ident(&mut self) -> Result<Ident, SyntaxError> {
        if matches!(self.peek().kind, TokenKind::Ident) {
            let tok = self.bump();
            Ok(Ident { name: tok.lexeme, span: tok.span })
        } else {
            self.error(&["identifier"])
        }
    }

    fn program(&mut self, file: &str) -> Result<SyntaxTree, SyntaxError> {
        let start = self.peek().span.clone();
        let mut decls = Vec::new();
        while !self.peek().is_eof() {
            if self.at_keyword(Keyword::Class) {
                decls.push(Decl::Class(self.class_decl()?));
            } else if self.at_keyword(Keyword::Aspect) || self.at_keyword(Keyword::Privileged) {
                decls.push(Decl::Aspect(self.aspect_decl()?));
            } else {
                return self.error(&["keyword 'class'", "keyword 'aspect'", "keyword 'privileged'"]);
            }
        }
        let end = self.peek().span.clone();
        let span = if let Some(last) = decls.last() {
            start.merge(last.span())
        } else {
            start.merge(&end)
        };
        Ok(SyntaxTree { file: file.to_string(), decls, span })
    }

    fn class_decl(&mut self) -> Result<ClassNode, SyntaxError> {
        let kw = self.expect_keyword(Keyword::Class)?;
        let name = self.expect_ident()?;
        self.expect_punct(Punct::LBrace)?;
        let mut members = Vec::new();
        while !self.at_punct(Punct::RBrace) {
            members.push(self.class_member()?);
        }
        let close = self.expect_punct(Punct::RBrace)?;
        Ok(ClassNode { name, members, span: kw.span.merge(&close.span) })
    }

    fn visibility(&mut self) -> (Visibility, Option<Span>) {
        if self.at_keyword(Keyword::Private) {
            let tok = self.bump();
            (Visibility::Private, Some(tok.span))
        } else if self.at_keyword(Keyword::Public) {
            let tok = self.bump();
            (Visibility::Public, Some(tok.span))
        } else {
            (Visibility::Public, None)
        }
    }

    fn type_name(&mut self) -> Result<(TypeName, Span), SyntaxError> {
        match self.peek().kind.clone() {
            TokenKind::Keyword(Keyword::Int) => Ok((TypeName::Int, self.bump().span)),
            TokenKind::Keyword(Keyword::Boolean) => Ok((TypeName::Boolean, self.bump().span)),
            TokenKind::Keyword(Keyword::Void) => Ok((TypeName::Void, self.bump().span)),
            TokenKind::Ident => {
                let tok = self.bump();
                Ok((TypeName::Named(tok.lexeme), tok.span))
            }
            _ => self.error(&["type name"]),
        }
    }

    fn class_member(&mut self) -> Result<ClassMember, SyntaxError> {
        let (visibility, vis_span) = self.visibility();
        let (ty, ty_span) = self.type_name()?;
        let start = vis_span.unwrap_or(ty_span);
        let name = self.expect_ident()?;
        if self.at_punct(Punct::LParen) {
            let params = self.param_list()?;
            let body = self.block()?;
            let span = start.merge(&body.span);
            Ok(ClassMember::Method(MethodNode { visibility, return_type: ty, name, params, body, span }))
        } else {
            let init = if self.eat_punct(Punct::Assign) { Some(self.expr()?) } else { None };
            let semi = self.expect_punct(Punct::Semi)?;
            let span = start.merge(&semi.span);
            Ok(ClassMember::Field(FieldNode { visibility, ty, name, init, span }))
        }
    }

    fn aspect_decl(&mut self) -> Result<AspectNode, SyntaxError> {
        let start = self.peek().span.clone();
        let privileged = self.eat_keyword(Keyword::Privileged);
        self.expect_keyword(Keyword::Aspect)?;
        let name = self.expect_ident()?;
        self.expect_punct(Punct::LBrace)?;
        let mut members = Vec::new();
        while !self.at_punct(Punct::RBrace) {
            members.push(self.aspect_member()?);
        }
        let close = self.expect_punct(Punct::RBrace)?;
        Ok(AspectNode { privileged, name, members, span: start.merge(&close.span) })
    }

    fn aspect_member(&mut self) -> Result<AspectMember, SyntaxError> {
        if self.at_keyword(Keyword::Pointcut) {
            return Ok(AspectMember::Pointcut(self.pointcut_decl()?));
        }
        if self.at_keyword(Keyword::Before) || self.at_keyword(Keyword::After) {
            return Ok(AspectMember::Advice(self.before_after_advice()?));
        }
        if self.at_keyword(Keyword::Declare) {
            return Ok(AspectMember::DeclareParents(self.declare_parents()?));
        }
        // Everything else starts with `[visibility] Type ...`.
        let (visibility, vis_span) = self.visibility();
        let (ty, ty_span) = self.type_name()?;
        let start = vis_span.unwrap_or_else(|| ty_span.clone());
        if self.at_keyword(Keyword::Around) {
            if visibility == Visibility::Private {
                return self.error(&["advice declaration without visibility modifier"]);
            }
            return Ok(AspectMember::Advice(self.around_advice(ty, start)?));
        }
        let first = self.expect_ident()?;
        if self.eat_punct(Punct::Dot) {
            // Inter-type declaration: Type Target.name ...
            let name = self.expect_ident()?;
            if self.at_punct(Punct::LParen) {
                let params = self.param_list()?;
                let body = self.block()?;
                let span = start.merge(&body.span);
                return Ok(AspectMember::InterTypeMethod(InterTypeMethodNode {
                    visibility,
                    return_type: ty,
                    target: first,
                    name,
                    params,
                    body,
                    span,
                }));
            }
            let init = if self.eat_punct(Punct::Assign) { Some(self.expr()?) } else { None };
            let semi = self.expect_punct(Punct::Semi)?;
            let span = start.merge(&semi.span);
            return Ok(AspectMember::InterTypeField(InterTypeFieldNode {
                visibility,
                ty,
                target: first,
                name,
                init,
                span,
            }));
        }
        if self.at_punct(Punct::LParen) {
            let params = self.param_list()?;
            let body = self.block()?;
            let span = start.merge(&body.span);
            return Ok(AspectMember::Method(MethodNode {
                visibility,
                return_type: ty,
                name: first,
                params,
                body,
                span,
            }));
        }
        let init = if self.eat_punct(Punct::Assign) { Some(self.expr()?) } else { None };
        let semi = self.expect_punct(Punct::Semi)?;
        let span = start.merge(&semi.span);
        Ok(AspectMember::Field(FieldNode { visibility, ty, name: first, init, span }))
    }

    fn pointcut_decl(&mut self) -> Result<PointcutDeclNode, SyntaxError> {
        let kw = self.expect_keyword(Keyword::Pointcut)?;
        let name = self.expect_ident()?;
        let params = self.param_list()?;
        self.expect_punct(Punct::Colon)?;
        let expr = self.pointcut_expr()?;
        let semi = self.expect_punct(Punct::Semi)?;
        Ok(PointcutDeclNode { name, params, expr, span: kw.span.merge(&semi.span) })
    }

    fn before_after_advice(&mut self) -> Result<AdviceNode, SyntaxError> {
        let kw = self.bump();
        let kind = match kw.keyword() {
            Some(Keyword::Before) => AdviceKind::Before,
            Some(Keyword::After) => AdviceKind::After,
            _ => unreachable!("caller checked for before/after"),
        };
        let params = self.param_list()?;
        self.expect_punct(Punct::Colon)?;
        let pointcut = self.pointcut_expr()?;
        let body = self.block()?;
        let span = kw.span.merge(&body.span);
        Ok(AdviceNode { kind, return_type: None, params, pointcut, body, span })
    }

    fn around_advice(&mut self, return_type: TypeName, start: Span) -> Result<AdviceNode, SyntaxError> {
        self.expect_keyword(Keyword::Around)?;
        let params = self.param_list()?;
        self.expect_punct(Punct::Colon)?;
        let pointcut = self.pointcut_expr()?;
        let body = self.block()?;
        let span = start.merge(&body.span);
        Ok(AdviceNode {
            kind: AdviceKind::Around,
            return_type: Some(return_type),
            params,
            pointcut,
            body,
            span,
        })
    }

    fn declare_parents(&mut self) -> Result<DeclareParentsNode, SyntaxError> {
        let kw = self.expect_keyword(Keyword::Declare)?;
        self.expect_keyword(Keyword::Parents)?;
        self.expect_punct(Punct::Colon)?;
        let target = self.expect_ident()?;
        self.expect_keyword(Keyword::Implements)?;
        let interface = self.expect_ident()?;
        let semi = self.expect_punct(Punct::Semi)?;
        Ok(DeclareParentsNode { target, interface, span: kw.span.merge(&semi.span) })
    }

    fn param_list(&mut self) -> Result<Vec<Param>, SyntaxError> {
        self.expect_punct(Punct::LParen)?;
        let mut params = Vec::new();
        if !self.at_punct(Punct::RParen) {
            loop {
                let (ty, ty_span) = self.type_name()?;
                let name = self.expect_ident()?;
                let span = ty_span.merge(&name.span);
                params.push(Param { ty, name, span });
                if !self.eat_punct(Punct::Comma) {
                    break;
                }
            }
        }
        self.expect_punct(Punct::RParen)?;
        Ok(params)
    }

    // --- pointcut expressions -------------------------------------------

    fn pointcut_expr(&mut self) -> Result<PointcutExprNode, SyntaxError> {
        let mut lhs = self.pointcut_and()?;
        while self.at_punct(Punct::OrOr) {
            self.bump();
            let rhs = self.pointcut_and()?;
            let span = lhs.span().merge(rhs.span());
            lhs = PointcutExprNode::Or(Box::new(lhs), Box::new(rhs), span);
        }
        Ok(lhs)
    }

    fn pointcut_and(&mut self) -> Result<PointcutExprNode, SyntaxError> {
        let mut lhs = self.pointcut_unary()?;
        while self.at_punct(Punct::AndAnd) {
            self.bump();
            let rhs = self.pointcut_unary()?;
            let span = lhs.span().merge(rhs.span());
            lhs = PointcutExprNode::And(Box::new(lhs), Box::new(rhs), span);
        }
        Ok(lhs)
    }

    fn pointcut_unary(&mut self) -> Result<PointcutExprNode, SyntaxError> {
        if self.at_punct(Punct::Bang) {
            let bang = self.bump();
            let inner = self.pointcut_unary()?;
            let span = bang.span.merge(inner.span());
            return Ok(PointcutExprNode::Not(Box::new(inner), span));
        }
        if self.at_punct(Punct::LParen) {
            self.bump();
            let inner = self.pointcut_expr()?;
            self.expect_punct(Punct::RParen)?;
            return Ok(inner);
        }
        if self.at_keyword(Keyword::Execution) || self.at_keyword(Keyword::Call) {
            let kw = self.bump();
            self.expect_punct(Punct::LParen)?;
            let pattern = self.signature_pattern()?;
            let close = self.expect_punct(Punct::RParen)?;
            let span = kw.span.merge(&close.span);
            return Ok(match kw.keyword() {
                Some(Keyword::Execution) => PointcutExprNode::Execution(pattern, span),
                _ => PointcutExprNode::Call(pattern, span),
            });
        }
        if self.at_keyword(Keyword::Args) {
            let kw = self.bump();
            self.expect_punct(Punct::LParen)?;
            let mut idents = Vec::new();
            if !self.at_punct(Punct::RParen) {
                loop {
                    idents.push(self.expect_ident()?);
                    if !self.eat_punct(Punct::Comma) {
                        break;
                    }
                }
            }
            let close = self.expect_punct(Punct::RParen)?;
            return Ok(PointcutExprNode::Args(idents, kw.span.merge(&close.span)));
        }
        if matches!(self.peek().kind, TokenKind::Ident) {
            let name = self.expect_ident()?;
            self.expect_punct(Punct::LParen)?;
            let mut args = Vec::new();
            if !self.at_punct(Punct::RParen) {
                loop {
                    args.push(self.expect_ident()?);
                    if !self.eat_punct(Punct::Comma) {
                        break;
                    }
                }
            }
            let close = self.expect_punct(Punct::RParen)?;
            let span = name.span.merge(&close.span);
            return Ok(PointcutExprNode::Named { name, args, span });
        }
        self.error(&["'execution'", "'call'", "'args'", "'!'", "'('", "pointcut name"])
    }

    fn name_pattern(&mut self) -> Result<NamePattern, SyntaxError> {
        if self.at_punct(Punct::Star) {
            self.bump();
            return Ok(NamePattern::Any);
        }
        match self.peek().kind.clone() {
            TokenKind::Ident => Ok(NamePattern::Exact(self.bump().lexeme)),
            TokenKind::Keyword(Keyword::Int)
            | TokenKind::Keyword(Keyword::Boolean)
            | TokenKind::Keyword(Keyword::Void) => Ok(NamePattern::Exact(self.bump().lexeme)),
            _ => self.error(&["'*'", "name"]),
        }
    }

    fn signature_pattern(&mut self) -> Result<SignaturePattern, SyntaxError> {
        let start = self.peek().span.clone();
        let return_type = self.name_pattern()?;
        let class = self.name_pattern()?;
        self.expect_punct(Punct::Dot)?;
        let name = self.name_pattern()?;
        self.expect_punct(Punct::LParen)?;
        let mut list = Vec::new();
        let mut open_tail = false;
        if !self.at_punct(Punct::RParen) {
            loop {
                if self.at_punct(Punct::DotDot) {
                    self.bump();
                    open_tail = true;
                    break;
                }
                list.push(self.name_pattern()?);
                if !self.eat_punct(Punct::Comma) {
                    break;
                }
            }
        }
        let close = self.expect_punct(Punct::RParen)?;
        let params = if open_tail { ParamsPattern::Prefix(list) } else { ParamsPattern::Exact(list) };
        Ok(SignaturePattern { return_type, class, name, params, span: start.merge(&close.span) })
    }

    // --- statements -------------------------------------------------------

    fn block(&mut self) -> Result<Block, SyntaxError> {
        let open = self.expect_punct(Punct::LBrace)?;
        let mut stmts = Vec::new();
        while !self.at_punct(Punct::RBrace) {
            stmts.push(self.stmt()?);
        }
        let close = self.expect_punct(Punct::RBrace)?;
        Ok(Block { stmts, span: open.span.merge(&close.span) })
    }

    fn stmt(&mut self) -> Result<Stmt, SyntaxError> {
        if self.at_keyword(Keyword::If) {
            let kw = self.bump();
            self.expect_punct(Punct::LParen)?;
            let cond = self.expr()?;
            self.expect_punct(Punct::RParen)?;
            let then_block = self.block()?;
            let (else_block, end) = if self.eat_keyword(Keyword::Else) {
                let b = self.block()?;
                let end = b.span.clone();
                (Some(b), end)
            } else {
                (None, then_block.span.clone())
            };
            let span = kw.span.merge(&end);
            return Ok(Stmt::If { cond, then_block, else_block, span });
        }
        if self.at_keyword(Keyword::While) {
            let kw = self.bump();
            self.expect_punct(Punct::LParen)?;
            let cond = self.expr()?;
            self.expect_punct(Punct::RParen)?;
            let body = self.block()?;
            let span = kw.span.merge(&body.span);
            return Ok(Stmt::While { cond, body, span });
        }
        if self.at_keyword(Keyword::Return) {
            let kw = self.bump();
            let value = if self.at_punct(Punct::Semi) { None } else { Some(self.expr()?) };
            let semi = self.expect_punct(Punct::Semi)?;
            return Ok(Stmt::Return { value, span: kw.span.merge(&semi.span) });
        }

        // Local declaration: `Type name [= expr] ;` where Type is a type
        // keyword, or an identifier directly followed by another identifier.
        let is_type_keyword = matches!(
            self.peek().keyword(),
            Some(Keyword::Int) | Some(Keyword::Boolean) | Some(Keyword::Void)
        );
        let ident_ident = matches!(self.peek().kind, TokenKind::Ident)
            && matches!(self.peek_at(1).kind, TokenKind::Ident);
        if is_type_keyword || ident_ident {
            let (ty, ty_span) = self.type_name()?;
            let name = self.expect_ident()?;
            let init = if self.eat_punct(Punct::Assign) { Some(self.expr()?) } else { None };
            let semi = self.expect_punct(Punct::Semi)?;
            return Ok(Stmt::Local { ty, name, init, span: ty_span.merge(&semi.span) });
        }

        // Assignment or expression statement.
        let expr = self.expr()?;
        if self.at_punct(Punct::Assign) {
            self.bump();
            let target = match expr {
                Expr::Name(id) => AssignTarget::Name(id),
                Expr::Field { recv, name, span } => AssignTarget::Field { recv: *recv, name, span },
                other => {
                    return Err(SyntaxError::Parse {
                        expected: ["assignable place (name or field access)".to_string()]
                            .into_iter()
                            .collect(),
                        found: "expression".to_string(),
                        span: other.span().clone(),
                    })
                }
            };
            let value = self.expr()?;
            let semi = self.expect_punct(Punct::Semi)?;
            let span = target.span().merge(&semi.span);
            return Ok(Stmt::Assign { target, value, span });
        }
        let semi = self.expect_punct(Punct::Semi)?;
        let span = expr.span().merge(&semi.span);
        Ok(Stmt::Expr { expr, span })
    }

    // --- expressions --------------------------------------------------------

    fn expr(&mut self) -> Result<Expr, SyntaxError> {
        self.equality()
    }

    fn equality(&mut self) -> Result<Expr, SyntaxError> {
        let mut lhs = self.relational()?;
        loop {
            let op = match self.peek().punct() {
                Some(Punct::Eq) => BinOp::Eq,
                Some(Punct::Ne) => BinOp::Ne,
                _ => break,
            };
            self.bump();
            let rhs = self.relational()?;
            let span = lhs.span().merge(rhs.span());
            lhs = Expr::Binary { op, lhs: Box::new(lhs), rhs: Box::new(rhs), span };
        }
        Ok(lhs)
    }

    fn relational(&mut self) -> Result<Expr, SyntaxError> {
        let mut lhs = self.additive()?;
        loop {
            let op = match self.peek().punct() {
                Some(Punct::Lt) => BinOp::Lt,
                Some(Punct::Le) => BinOp::Le,
                Some(Punct::Gt) => BinOp::Gt,
                Some(Punct::Ge) => BinOp::Ge,
                _ => break,
            };
            self.bump();
            let rhs = self.additive()?;
            let span = lhs.span().merge(rhs.span());
            lhs = Expr::Binary { op, lhs: Box::new(lhs), rhs: Box::new(rhs), span };
        }
        Ok(lhs)
    }

    fn additive(&mut self) -> Result<Expr, SyntaxError> {
        let mut lhs = self.multiplicative()?;
        loop {
            let op = match self.peek().punct() {
                Some(Punct::Plus) => BinOp::Add,
                Some(Punct::Minus) => BinOp::Sub,
                _ => break,
            };
            self.bump();
            let rhs = self.multiplicative()?;
            let span = lhs.span().merge(rhs.span());
            lhs = Expr::Binary { op, lhs: Box::new(lhs), rhs: Box::new(rhs), span };
        }
        Ok(lhs)
    }

    fn multiplicative(&mut self) -> Result<Expr, SyntaxError> {
        let mut lhs = self.unary()?;
        loop {
            let op = match self.peek().punct() {
                Some(Punct::Star) => BinOp::Mul,
                Some(Punct::Slash) => BinOp::Div,
                _ => break,
            };
            self.bump();
            let rhs = self.unary()?;
            let span = lhs.span().merge(rhs.span());
            lhs = Expr::Binary { op, lhs: Box::new(lhs), rhs: Box::new(rhs), span };
        }
        Ok(lhs)
    }

    fn unary(&mut self) -> Result<Expr, SyntaxError> {
        if self.at_punct(Punct::Bang) {
            let bang = self.bump();
            let operand = self.unary()?;
            let span = bang.span.merge(operand.span());
            return Ok(Expr::Not { operand: Box::new(operand), span });
        }
        self.postfix()
    }

    fn postfix(&mut self) -> Result<Expr, SyntaxError> {
        let mut expr = self.primary()?;
        while self.at_punct(Punct::Dot) {
            self.bump();
            let name = self.expect_ident()?;
            if self.at_punct(Punct::LParen) {
                let (args, close) = self.call_args()?;
                let span = expr.span().merge(&close);
                expr = Expr::Call { recv: Some(Box::new(expr)), name, args, span };
            } else {
                let span = expr.span().merge(&name.span);
                expr = Expr::Field { recv: Box::new(expr), name, span };
            }
        }
        Ok(expr)
    }

    fn call_args(&mut self) -> Result<(Vec<Expr>, Span), SyntaxError> {
        self.expect_punct(Punct::LParen)?;
        let mut args = Vec::new();
        if !self.at_punct(Punct::RParen) {
            loop {
                args.push(self.expr()?);
                if !self.eat_punct(Punct::Comma) {
                    break;
                }
            }
        }
        let close = self.expect_punct(Punct::RParen)?;
        Ok((args, close.span))
    }

    fn primary(&mut self) -> Result<Expr, SyntaxError> {
        match self.peek().kind.clone() {
            TokenKind::IntLit => {
                let tok = self.bump();
                let value: i64 = tok.lexeme.parse().map_err(|_| SyntaxError::Parse {
                    expected: ["integer literal in range".to_string()].into_iter().collect(),
                    found: format!("'{}'", tok.lexeme),
                    span: tok.span.clone(),
                })?;
                Ok(Expr::IntLit { value, span: tok.span })
            }
            TokenKind::StrLit => {
                let tok = self.bump();
                Ok(Expr::StrLit { value: unescape(&tok.lexeme), span: tok.span })
            }
            TokenKind::Keyword(Keyword::True) => {
                let tok = self.bump();
                Ok(Expr::BoolLit { value: true, span: tok.span })
            }
            TokenKind::Keyword(Keyword::False) => {
                let tok = self.bump();
                Ok(Expr::BoolLit { value: false, span: tok.span })
            }
            TokenKind::Keyword(Keyword::Null) => {
                let tok = self.bump();
                Ok(Expr::NullLit { span: tok.span })
            }
            TokenKind::Keyword(Keyword::Proceed) => {
                let tok = self.bump();
                let (args, close) = self.call_args()?;
                let span = tok.span.merge(&close);
                Ok(Expr::Proceed { args, span })
            }
            TokenKind::Ident => {
                let name = self.expect_ident()?;
                if self.at_punct(Punct::LParen) {
                    let (args, close) = self.call_args()?;
                    let span = name.span.merge(&close);
                    Ok(Expr::Call { recv: None, name, args, span })
                } else {
                    Ok(Expr::Name(name))
                }
            }
            TokenKind::Punct(Punct::LParen) => {
                self.bump();
                let inner = self.expr()?;
                self.expect_punct(Punct::RParen)?;
                Ok(inner)
            }
            _ => self.error(&["expression"]),
        }
    }
}

/// Strips the surrounding quotes and decodes the escape sequences the
/// lexer admits (`\"`, `\\`, `\n`, `\t`).
fn unescape(lexeme: &str) -> String {
    let inner = &lexeme[1..lexeme.len() - 1];
    let mut out = String::with_capacity(inner.len());
    let mut chars = inner.chars();
    while let Some(c) = chars.next() {
        if c != '\\' {
            out.push(c);
            continue;
        }
        match chars.next() {
            Some('n') => out.push('\n'),
            Some('t') => out.push('\t'),
            Some(other) => out.push(other),
            None => {}
        }
    }
    out
}
