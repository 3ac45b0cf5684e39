//! Abstract syntax tree produced by the parser. Every node carries the
//! span of the source region it covers.

use std::fmt;

use crate::span::Span;

#[derive(Clone, Debug, Eq, PartialEq)]
pub struct Ident {
    pub name: String,
    pub span: Span,
}

/// A (possibly primitive) type name as written in the source.
#[derive(Clone, Debug, Eq, PartialEq, Ord, PartialOrd, Hash)]
pub enum TypeName {
    Int,
    Boolean,
    Void,
    Named(String),
}

impl TypeName {
    pub fn as_str(&self) -> &str {
        match self {
            TypeName::Int => "int",
            TypeName::Boolean => "boolean",
            TypeName::Void => "void",
            TypeName::Named(n) => n,
        }
    }
}

impl fmt::Display for TypeName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Clone, Copy, Debug, Eq, PartialEq, Ord, PartialOrd)]
pub enum Visibility {
    Public,
    Private,
}

#[derive(Clone, Debug, Eq, PartialEq)]
pub struct Param {
    pub ty: TypeName,
    pub name: Ident,
    pub span: Span,
}

/// Root of a parsed compilation unit.
#[derive(Clone, Debug, Eq, PartialEq)]
pub struct SyntaxTree {
    pub file: String,
    pub decls: Vec<Decl>,
    pub span: Span,
}

#[derive(Clone, Debug, Eq, PartialEq)]
pub enum Decl {
    Class(ClassNode),
    Aspect(AspectNode),
}

impl Decl {
    pub fn span(&self) -> &Span {
        match self {
            Decl::Class(c) => &c.span,
            Decl::Aspect(a) => &a.span,
        }
    }
}

#[derive(Clone, Debug, Eq, PartialEq)]
pub struct ClassNode {
    pub name: Ident,
    pub members: Vec<ClassMember>,
    pub span: Span,
}

#[derive(Clone, Debug, Eq, PartialEq)]
pub enum ClassMember {
    Field(FieldNode),
    Method(MethodNode),
}

impl ClassMember {
    pub fn span(&self) -> &Span {
        match self {
            ClassMember::Field(f) => &f.span,
            ClassMember::Method(m) => &m.span,
        }
    }
}

#[derive(Clone, Debug, Eq, PartialEq)]
pub struct FieldNode {
    pub visibility: Visibility,
    pub ty: TypeName,
    pub name: Ident,
    pub init: Option<Expr>,
    pub span: Span,
}

#[derive(Clone, Debug, Eq, PartialEq)]
pub struct MethodNode {
    pub visibility: Visibility,
    pub return_type: TypeName,
    pub name: Ident,
    pub params: Vec<Param>,
    pub body: Block,
    pub span: Span,
}

#[derive(Clone, Debug, Eq, PartialEq)]
pub struct AspectNode {
    pub privileged: bool,
    pub name: Ident,
    pub members: Vec<AspectMember>,
    pub span: Span,
}

#[derive(Clone, Debug, Eq, PartialEq)]
pub enum AspectMember {
    Pointcut(PointcutDeclNode),
    Advice(AdviceNode),
    InterTypeField(InterTypeFieldNode),
    InterTypeMethod(InterTypeMethodNode),
    DeclareParents(DeclareParentsNode),
    Field(FieldNode),
    Method(MethodNode),
}

impl AspectMember {
    pub fn span(&self) -> &Span {
        match self {
            AspectMember::Pointcut(p) => &p.span,
            AspectMember::Advice(a) => &a.span,
            AspectMember::InterTypeField(f) => &f.span,
            AspectMember::InterTypeMethod(m) => &m.span,
            AspectMember::DeclareParents(d) => &d.span,
            AspectMember::Field(f) => &f.span,
            AspectMember::Method(m) => &m.span,
        }
    }
}

#[derive(Clone, Debug, Eq, PartialEq)]
pub struct PointcutDeclNode {
    pub name: Ident,
    pub params: Vec<Param>,
    pub expr: PointcutExprNode,
    pub span: Span,
}

#[derive(Clone, Copy, Debug, Eq, PartialEq, Ord, PartialOrd, Hash)]
pub enum AdviceKind {
    Before,
    After,
    Around,
}

impl AdviceKind {
    pub fn as_str(&self) -> &'static str {
        match self {
            AdviceKind::Before => "before",
            AdviceKind::After => "after",
            AdviceKind::Around => "around",
        }
    }
}

impl fmt::Display for AdviceKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Clone, Debug, Eq, PartialEq)]
pub struct AdviceNode {
    pub kind: AdviceKind,
    /// Present only for around advice.
    pub return_type: Option<TypeName>,
    pub params: Vec<Param>,
    pub pointcut: PointcutExprNode,
    pub body: Block,
    pub span: Span,
}

/// `Type Target.name [= init];`
#[derive(Clone, Debug, Eq, PartialEq)]
pub struct InterTypeFieldNode {
    pub visibility: Visibility,
    pub ty: TypeName,
    pub target: Ident,
    pub name: Ident,
    pub init: Option<Expr>,
    pub span: Span,
}

/// `Type Target.name(params) { ... }`
#[derive(Clone, Debug, Eq, PartialEq)]
pub struct InterTypeMethodNode {
    pub visibility: Visibility,
    pub return_type: TypeName,
    pub target: Ident,
    pub name: Ident,
    pub params: Vec<Param>,
    pub body: Block,
    pub span: Span,
}

/// `declare parents : Target implements Iface;`
#[derive(Clone, Debug, Eq, PartialEq)]
pub struct DeclareParentsNode {
    pub target: Ident,
    pub interface: Ident,
    pub span: Span,
}

#[derive(Clone, Debug, Eq, PartialEq)]
pub enum PointcutExprNode {
    Execution(SignaturePattern, Span),
    Call(SignaturePattern, Span),
    Args(Vec<Ident>, Span),
    Not(Box<PointcutExprNode>, Span),
    And(Box<PointcutExprNode>, Box<PointcutExprNode>, Span),
    Or(Box<PointcutExprNode>, Box<PointcutExprNode>, Span),
    Named { name: Ident, args: Vec<Ident>, span: Span },
}

impl PointcutExprNode {
    pub fn span(&self) -> &Span {
        match self {
            PointcutExprNode::Execution(_, s)
            | PointcutExprNode::Call(_, s)
            | PointcutExprNode::Args(_, s)
            | PointcutExprNode::Not(_, s)
            | PointcutExprNode::And(_, _, s)
            | PointcutExprNode::Or(_, _, s) => s,
            PointcutExprNode::Named { span, .. } => span,
        }
    }
}

/// One segment of a signature pattern: a literal name or `*`.
#[derive(Clone, Debug, Eq, PartialEq, Ord, PartialOrd, Hash)]
pub enum NamePattern {
    Any,
    Exact(String),
}

impl NamePattern {
    pub fn matches(&self, name: &str) -> bool {
        match self {
            NamePattern::Any => true,
            NamePattern::Exact(s) => s == name,
        }
    }
}

impl fmt::Display for NamePattern {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            NamePattern::Any => f.write_str("*"),
            NamePattern::Exact(s) => f.write_str(s),
        }
    }
}

/// Parameter list pattern: a fixed list, or a fixed prefix followed by
/// `..` matching any tail.
#[derive(Clone, Debug, Eq, PartialEq, Ord, PartialOrd, Hash)]
pub enum ParamsPattern {
    Exact(Vec<NamePattern>),
    Prefix(Vec<NamePattern>),
}

/// `ret Class.name(params)` with `*` wildcards.
#[derive(Clone, Debug, Eq, PartialEq)]
pub struct SignaturePattern {
    pub return_type: NamePattern,
    pub class: NamePattern,
    pub name: NamePattern,
    pub params: ParamsPattern,
    pub span: Span,
}

impl fmt::Display for SignaturePattern {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} {}.{}(", self.return_type, self.class, self.name)?;
        let (list, open) = match &self.params {
            ParamsPattern::Exact(list) => (list, false),
            ParamsPattern::Prefix(list) => (list, true),
        };
        for (i, p) in list.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{p}")?;
        }
        if open {
            if !list.is_empty() {
                write!(f, ", ")?;
            }
            write!(f, "..")?;
        }
        write!(f, ")")
    }
}

#[derive(Clone, Debug, Eq, PartialEq)]
pub struct Block {
    pub stmts: Vec<Stmt>,
    pub span: Span,
}

#[derive(Clone, Debug, Eq, PartialEq)]
pub enum Stmt {
    Local { ty: TypeName, name: Ident, init: Option<Expr>, span: Span },
    Assign { target: AssignTarget, value: Expr, span: Span },
    If { cond: Expr, then_block: Block, else_block: Option<Block>, span: Span },
    While { cond: Expr, body: Block, span: Span },
    Return { value: Option<Expr>, span: Span },
    Expr { expr: Expr, span: Span },
}

impl Stmt {
    pub fn span(&self) -> &Span {
        match self {
            Stmt::Local { span, .. }
            | Stmt::Assign { span, .. }
            | Stmt::If { span, .. }
            | Stmt::While { span, .. }
            | Stmt::Return { span, .. }
            | Stmt::Expr { span, .. } => span,
        }
    }
}

#[derive(Clone, Debug, Eq, PartialEq)]
pub enum AssignTarget {
    Name(Ident),
    Field { recv: Expr, name: Ident, span: Span },
}

impl AssignTarget {
    pub fn span(&self) -> &Span {
        match self {
            AssignTarget::Name(id) => &id.span,
            AssignTarget::Field { span, .. } => span,
        }
    }
}

#[derive(Clone, Copy, Debug, Eq, PartialEq, Ord, PartialOrd, Hash)]
pub enum BinOp {
    Eq,
    Ne,
    Lt,
    Le,
    Gt,
    Ge,
    Add,
    Sub,
    Mul,
    Div,
}

impl BinOp {
    pub fn as_str(&self) -> &'static str {
        match self {
            BinOp::Eq => "==",
            BinOp::Ne => "!=",
            BinOp::Lt => "<",
            BinOp::Le => "<=",
            BinOp::Gt => ">",
            BinOp::Ge => ">=",
            BinOp::Add => "+",
            BinOp::Sub => "-",
            BinOp::Mul => "*",
            BinOp::Div => "/",
        }
    }
}

#[derive(Clone, Debug, Eq, PartialEq)]
pub enum Expr {
    Name(Ident),
    IntLit { value: i64, span: Span },
    StrLit { value: String, span: Span },
    BoolLit { value: bool, span: Span },
    NullLit { span: Span },
    Field { recv: Box<Expr>, name: Ident, span: Span },
    /// `recv.name(args)` or bare `name(args)`.
    Call { recv: Option<Box<Expr>>, name: Ident, args: Vec<Expr>, span: Span },
    Proceed { args: Vec<Expr>, span: Span },
    Binary { op: BinOp, lhs: Box<Expr>, rhs: Box<Expr>, span: Span },
    Not { operand: Box<Expr>, span: Span },
}

impl Expr {
    pub fn span(&self) -> &Span {
        match self {
            Expr::Name(id) => &id.span,
            Expr::IntLit { span, .. }
            | Expr::StrLit { span, .. }
            | Expr::BoolLit { span, .. }
            | Expr::NullLit { span }
            | Expr::Field { span, .. }
            | Expr::Call { span, .. }
            | Expr::Proceed { span, .. }
            | Expr::Binary { span, .. }
            | Expr::Not { span, .. } => span,
        }
    }
}
