//! Resolves parsed syntax trees into a typed program model: classes and
//! aspects with their member tables, inter-type members applied to their
//! targets, advice pointcuts with named references inlined, and every
//! statement body lowered to a resolved form the analyses and the
//! interpreter share.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use crate::pointcuts::Pointcut;
use crate::span::{Diagnostic, Severity, Span};
use crate::syntax::ast::{
    AdviceKind, AspectMember, AssignTarget, BinOp, Block, ClassMember, Decl, Expr, Param,
    PointcutExprNode, SyntaxTree, TypeName, Visibility,
};

/// A method identified by owning class (or aspect) and name. Method
/// names are unique within their owner, so no signature is needed.
#[derive(Clone, Debug, Eq, PartialEq, Ord, PartialOrd, Hash)]
pub struct MethodRef {
    pub owner: String,
    pub name: String,
}

impl MethodRef {
    pub fn new(owner: impl Into<String>, name: impl Into<String>) -> Self {
        MethodRef { owner: owner.into(), name: name.into() }
    }
}

impl fmt::Display for MethodRef {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}.{}", self.owner, self.name)
    }
}

#[derive(Clone, Debug, Eq, PartialEq, Ord, PartialOrd, Hash)]
pub struct FieldRef {
    pub owner: String,
    pub name: String,
}

impl FieldRef {
    pub fn new(owner: impl Into<String>, name: impl Into<String>) -> Self {
        FieldRef { owner: owner.into(), name: name.into() }
    }
}

impl fmt::Display for FieldRef {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}.{}", self.owner, self.name)
    }
}

/// Identifies one advice as (aspect, position within the aspect).
#[derive(Clone, Debug, Eq, PartialEq, Ord, PartialOrd, Hash)]
pub struct AdviceId {
    pub aspect: String,
    pub ordinal: usize,
}

impl fmt::Display for AdviceId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}.advice{}", self.aspect, self.ordinal + 1)
    }
}

/// Literal value allowed as a field initializer.
#[derive(Clone, Debug, Eq, PartialEq)]
pub enum Literal {
    Int(i64),
    Str(String),
    Bool(bool),
    Null,
}

#[derive(Clone, Debug, Eq, PartialEq)]
pub struct FieldDecl {
    pub name: String,
    pub ty: TypeName,
    pub visibility: Visibility,
    pub init: Option<Literal>,
    pub span: Span,
    /// Name of the introducing aspect for inter-type fields.
    pub introduced_by: Option<String>,
}

#[derive(Clone, Debug, Eq, PartialEq)]
pub struct MethodDecl {
    pub owner: String,
    pub name: String,
    pub return_type: TypeName,
    pub visibility: Visibility,
    pub params: Vec<Param>,
    pub body: RBody,
    pub span: Span,
    pub introduced_by: Option<String>,
}

impl MethodDecl {
    pub fn method_ref(&self) -> MethodRef {
        MethodRef::new(self.owner.clone(), self.name.clone())
    }
}

#[derive(Clone, Debug, Eq, PartialEq)]
pub struct ParentDecl {
    pub interface: String,
    pub introduced_by: Option<String>,
    pub span: Span,
}

#[derive(Clone, Debug, Eq, PartialEq)]
pub struct ClassDecl {
    pub name: String,
    pub span: Span,
    pub declared_parents: Vec<ParentDecl>,
    pub fields: Vec<FieldDecl>,
    pub methods: Vec<MethodDecl>,
}

impl ClassDecl {
    pub fn field(&self, name: &str) -> Option<&FieldDecl> {
        self.fields.iter().find(|f| f.name == name)
    }

    pub fn method(&self, name: &str) -> Option<&MethodDecl> {
        self.methods.iter().find(|m| m.name == name)
    }
}

/// Summary of one inter-type field declaration for reporting.
#[derive(Clone, Debug, Eq, PartialEq)]
pub struct InterTypeFieldDecl {
    pub target: String,
    pub name: String,
    pub ty: TypeName,
    pub span: Span,
}

#[derive(Clone, Debug, Eq, PartialEq)]
pub struct InterTypeMethodDecl {
    pub target: String,
    pub name: String,
    pub span: Span,
}

#[derive(Clone, Debug, Eq, PartialEq)]
pub struct ParentDeclSummary {
    pub target: String,
    pub interface: String,
    pub span: Span,
}

#[derive(Clone, Debug, Eq, PartialEq)]
pub struct AdviceDecl {
    pub id: AdviceId,
    pub kind: AdviceKind,
    /// Around advice only.
    pub return_type: Option<TypeName>,
    pub bound_params: Vec<Param>,
    pub pointcut: Pointcut,
    pub pointcut_span: Span,
    pub body: RBody,
    pub span: Span,
}

#[derive(Clone, Debug, Eq, PartialEq)]
pub struct PointcutDef {
    pub name: String,
    pub params: Vec<Param>,
    pub expr: PointcutExprNode,
    pub span: Span,
}

#[derive(Clone, Debug, Eq, PartialEq)]
pub struct AspectDecl {
    pub name: String,
    pub privileged: bool,
    pub span: Span,
    pub advices: Vec<AdviceDecl>,
    pub fields: Vec<FieldDecl>,
    pub methods: Vec<MethodDecl>,
    pub inter_type_fields: Vec<InterTypeFieldDecl>,
    pub inter_type_methods: Vec<InterTypeMethodDecl>,
    pub parent_decls: Vec<ParentDeclSummary>,
    pub pointcuts: BTreeMap<String, PointcutDef>,
}

/// A call from one class method body to another; the static universe of
/// call join-point shadows.
#[derive(Clone, Debug, Eq, PartialEq, Ord, PartialOrd)]
pub struct CallSite {
    pub caller: MethodRef,
    pub callee: MethodRef,
    pub span: Span,
}

#[derive(Clone, Debug, Default)]
pub struct ProgramModel {
    pub classes: BTreeMap<String, ClassDecl>,
    pub aspects: BTreeMap<String, AspectDecl>,
    /// Aspect names in file order, then declaration order; fixes the
    /// advice precedence used by the interpreter.
    pub aspect_order: Vec<String>,
    pub call_sites: Vec<CallSite>,
    pub diagnostics: Vec<Diagnostic>,
}

impl ProgramModel {
    pub fn has_errors(&self) -> bool {
        self.diagnostics.iter().any(|d| d.severity == Severity::Error)
    }

    pub fn errors(&self) -> impl Iterator<Item = &Diagnostic> {
        self.diagnostics.iter().filter(|d| d.severity == Severity::Error)
    }

    pub fn advice(&self, id: &AdviceId) -> Option<&AdviceDecl> {
        self.aspects.get(&id.aspect).and_then(|a| a.advices.get(id.ordinal))
    }

    /// All advices in precedence order (file order, then declaration order).
    pub fn advices_in_order(&self) -> Vec<&AdviceDecl> {
        self.aspect_order
            .iter()
            .filter_map(|name| self.aspects.get(name))
            .flat_map(|a| a.advices.iter())
            .collect()
    }

    pub fn class_method(&self, m: &MethodRef) -> Option<&MethodDecl> {
        self.classes.get(&m.owner).and_then(|c| c.method(&m.name))
    }

    pub fn aspect_method(&self, m: &MethodRef) -> Option<&MethodDecl> {
        self.aspects.get(&m.owner).and_then(|a| a.methods.iter().find(|d| d.name == m.name))
    }

    /// Resolves an interpreter entry point: either `Class.method` or a
    /// bare method name that is unique among zero-parameter class methods.
    pub fn find_entry(&self, entry: &str) -> Result<MethodRef, String> {
        if let Some((class, method)) = entry.split_once('.') {
            let decl = self
                .classes
                .get(class)
                .and_then(|c| c.method(method))
                .ok_or_else(|| format!("entry method '{entry}' not found"))?;
            if !decl.params.is_empty() {
                return Err(format!("entry method '{entry}' must take no parameters"));
            }
            return Ok(decl.method_ref());
        }
        let mut candidates = Vec::new();
        for class in self.classes.values() {
            if let Some(m) = class.method(entry) {
                if m.params.is_empty() {
                    candidates.push(m.method_ref());
                }
            }
        }
        match candidates.len() {
            0 => Err(format!("no zero-parameter method named '{entry}' found")),
            1 => Ok(candidates.remove(0)),
            _ => Err(format!(
                "entry '{entry}' is ambiguous; qualify it as Class.method (candidates: {})",
                candidates.iter().map(|m| m.to_string()).collect::<Vec<_>>().join(", ")
            )),
        }
    }
}

// --- resolved body form ----------------------------------------------------

/// A resolved statement body. Slots 0..param_count hold parameters.
#[derive(Clone, Debug, Eq, PartialEq)]
pub struct RBody {
    pub param_count: usize,
    pub slot_names: Vec<String>,
    pub block: RBlock,
}

#[derive(Clone, Debug, Eq, PartialEq)]
pub struct RBlock {
    pub stmts: Vec<RStmt>,
}

#[derive(Clone, Debug, Eq, PartialEq)]
pub enum RStmt {
    Local { slot: usize, init: Option<RExpr>, span: Span },
    Assign { target: RTarget, value: RExpr, span: Span },
    If { cond: RExpr, then_block: RBlock, else_block: Option<RBlock>, span: Span },
    While { cond: RExpr, body: RBlock, span: Span },
    Return { value: Option<RExpr>, span: Span },
    Expr { expr: RExpr, span: Span },
}

#[derive(Clone, Debug, Eq, PartialEq)]
pub enum RTarget {
    Slot { slot: usize, span: Span },
    AspectField { aspect: String, name: String, span: Span },
    ClassField { recv: RExpr, field: FieldRef, span: Span },
}

impl RTarget {
    pub fn span(&self) -> &Span {
        match self {
            RTarget::Slot { span, .. }
            | RTarget::AspectField { span, .. }
            | RTarget::ClassField { span, .. } => span,
        }
    }
}

#[derive(Clone, Copy, Debug, Eq, PartialEq)]
pub enum Intrinsic {
    Print,
    Log,
}

#[derive(Clone, Copy, Debug, Eq, PartialEq)]
pub enum CalleeKind {
    /// Target is a class method (declared or introduced).
    ClassMethod,
    /// Target is a helper method of the enclosing aspect.
    AspectHelper,
}

#[derive(Clone, Debug, Eq, PartialEq)]
pub struct RExpr {
    pub kind: RExprKind,
    pub span: Span,
}

#[derive(Clone, Debug, Eq, PartialEq)]
pub enum RExprKind {
    Slot { slot: usize },
    AspectField { aspect: String, name: String },
    ClassField { recv: Box<RExpr>, field: FieldRef },
    /// A class name used as a value: the class singleton instance.
    Singleton { class: String },
    Int(i64),
    Str(String),
    Bool(bool),
    Null,
    Call { recv: Option<Box<RExpr>>, method: MethodRef, callee: CalleeKind, args: Vec<RExpr> },
    Intrinsic { which: Intrinsic, args: Vec<RExpr> },
    Proceed { args: Vec<RExpr> },
    Binary { op: BinOp, lhs: Box<RExpr>, rhs: Box<RExpr> },
    Not { operand: Box<RExpr> },
}

// --- static types used during resolution ------------------------------------

#[derive(Clone, Debug, Eq, PartialEq)]
enum STy {
    Int,
    Bool,
    Str,
    Null,
    Void,
    Object,
    Class(String),
    /// A named type with no known declaration (interfaces, externals).
    Opaque,
}

fn sty_of(ty: &TypeName, classes: &BTreeMap<String, RawClass>) -> STy {
    match ty {
        TypeName::Int => STy::Int,
        TypeName::Boolean => STy::Bool,
        TypeName::Void => STy::Void,
        TypeName::Named(n) if n == "String" => STy::Str,
        TypeName::Named(n) if n == "Object" => STy::Object,
        TypeName::Named(n) if classes.contains_key(n) => STy::Class(n.clone()),
        TypeName::Named(_) => STy::Opaque,
    }
}

// --- model construction ------------------------------------------------------

/// Working copy of a class while members are being collected.
struct RawClass {
    name: String,
    span: Span,
    declared_parents: Vec<ParentDecl>,
    fields: Vec<FieldDecl>,
    // (decl metadata, unresolved body, introducing aspect)
    methods: Vec<(MethodHeader, Block, Option<String>)>,
}

#[derive(Clone)]
struct MethodHeader {
    owner: String,
    name: String,
    return_type: TypeName,
    visibility: Visibility,
    params: Vec<Param>,
    span: Span,
}

/// Builds the program model from one or more parsed files. All semantic
/// diagnostics are aggregated on the returned model; the model is usable
/// for inspection even when errors are present.
pub fn build_model(trees: &[SyntaxTree]) -> ProgramModel {
    Builder::default().run(trees)
}

#[derive(Default)]
struct Builder {
    diagnostics: Vec<Diagnostic>,
    call_sites: Vec<CallSite>,
}

impl Builder {
    fn error(&mut self, message: impl Into<String>, span: Span) {
        self.diagnostics.push(Diagnostic::error(message, span));
    }

    fn run(mut self, trees: &[SyntaxTree]) -> ProgramModel {
        // Phase 1: collect class and aspect declarations, checking for
        // duplicate names across all files.
        let mut classes: BTreeMap<String, RawClass> = BTreeMap::new();
        let mut aspect_nodes = Vec::new();
        let mut seen: BTreeMap<String, Span> = BTreeMap::new();
        for tree in trees {
            for decl in &tree.decls {
                let (name, span) = match decl {
                    Decl::Class(c) => (&c.name.name, &c.span),
                    Decl::Aspect(a) => (&a.name.name, &a.span),
                };
                if let Some(first) = seen.get(name) {
                    self.error(
                        format!("duplicate declaration of '{name}' (first declared at {first})"),
                        span.clone(),
                    );
                    continue;
                }
                seen.insert(name.clone(), span.clone());
                match decl {
                    Decl::Class(c) => {
                        let raw = self.collect_class(c);
                        classes.insert(c.name.name.clone(), raw);
                    }
                    Decl::Aspect(a) => aspect_nodes.push(a),
                }
            }
        }

        // Phase 2: apply inter-type declarations to their targets, in
        // aspect order, and collect aspect-local members.
        let mut raw_aspects = Vec::new();
        for node in &aspect_nodes {
            let raw = self.collect_aspect(node, &mut classes);
            raw_aspects.push(raw);
        }

        // Phase 3: resolve all bodies now that member tables are complete.
        let mut model_classes = BTreeMap::new();
        let resolution = ResolutionTables {
            classes: &classes,
            aspects: &raw_aspects,
        };
        for raw in classes.values() {
            let mut methods = Vec::new();
            for (header, body, introduced_by) in &raw.methods {
                let ctx = match introduced_by {
                    Some(aspect) => BodyKind::ItdMethod {
                        aspect: aspect.clone(),
                        target: raw.name.clone(),
                        method: header.name.clone(),
                    },
                    None => BodyKind::ClassMethod {
                        class: raw.name.clone(),
                        method: header.name.clone(),
                    },
                };
                let rbody = self.resolve_body(&resolution, ctx, &header.params, body);
                methods.push(MethodDecl {
                    owner: header.owner.clone(),
                    name: header.name.clone(),
                    return_type: header.return_type.clone(),
                    visibility: header.visibility,
                    params: header.params.clone(),
                    body: rbody,
                    span: header.span.clone(),
                    introduced_by: introduced_by.clone(),
                });
            }
            model_classes.insert(
                raw.name.clone(),
                ClassDecl {
                    name: raw.name.clone(),
                    span: raw.span.clone(),
                    declared_parents: raw.declared_parents.clone(),
                    fields: raw.fields.clone(),
                    methods,
                },
            );
        }

        let mut model_aspects = BTreeMap::new();
        let mut aspect_order = Vec::new();
        for raw in &raw_aspects {
            let decl = self.resolve_aspect(&resolution, raw);
            aspect_order.push(decl.name.clone());
            model_aspects.insert(decl.name.clone(), decl);
        }

        ProgramModel {
            classes: model_classes,
            aspects: model_aspects,
            aspect_order,
            call_sites: std::mem::take(&mut self.call_sites),
            diagnostics: self.diagnostics,
        }
    }

    fn literal_init(&mut self, init: &Option<Expr>, what: &str) -> Option<Literal> {
        match init {
            None => None,
            Some(Expr::IntLit { value, .. }) => Some(Literal::Int(*value)),
            Some(Expr::StrLit { value, .. }) => Some(Literal::Str(value.clone())),
            Some(Expr::BoolLit { value, .. }) => Some(Literal::Bool(*value)),
            Some(Expr::NullLit { .. }) => Some(Literal::Null),
            Some(other) => {
                self.error(format!("{what} initializer must be a literal"), other.span().clone());
                None
            }
        }
    }

    fn collect_class(&mut self, node: &crate::syntax::ast::ClassNode) -> RawClass {
        let mut raw = RawClass {
            name: node.name.name.clone(),
            span: node.span.clone(),
            declared_parents: Vec::new(),
            fields: Vec::new(),
            methods: Vec::new(),
        };
        let mut member_names: BTreeSet<String> = BTreeSet::new();
        for member in &node.members {
            match member {
                ClassMember::Field(f) => {
                    if !member_names.insert(f.name.name.clone()) {
                        self.error(
                            format!("duplicate member '{}' in class '{}'", f.name.name, raw.name),
                            f.span.clone(),
                        );
                        continue;
                    }
                    let init = self.literal_init(&f.init, "field");
                    raw.fields.push(FieldDecl {
                        name: f.name.name.clone(),
                        ty: f.ty.clone(),
                        visibility: f.visibility,
                        init,
                        span: f.span.clone(),
                        introduced_by: None,
                    });
                }
                ClassMember::Method(m) => {
                    if !member_names.insert(m.name.name.clone()) {
                        self.error(
                            format!("duplicate member '{}' in class '{}'", m.name.name, raw.name),
                            m.span.clone(),
                        );
                        continue;
                    }
                    self.check_param_names(&m.params);
                    raw.methods.push((
                        MethodHeader {
                            owner: raw.name.clone(),
                            name: m.name.name.clone(),
                            return_type: m.return_type.clone(),
                            visibility: m.visibility,
                            params: m.params.clone(),
                            span: m.span.clone(),
                        },
                        m.body.clone(),
                        None,
                    ));
                }
            }
        }
        raw
    }

    fn check_param_names(&mut self, params: &[Param]) {
        let mut seen = BTreeSet::new();
        for p in params {
            if !seen.insert(p.name.name.clone()) {
                self.error(format!("duplicate parameter '{}'", p.name.name. clone()), p.span.clone());
            }
        }
    }

    fn collect_aspect(
        &mut self,
        node: &crate::syntax::ast::AspectNode,
        classes: &mut BTreeMap<String, RawClass>,
    ) -> RawAspect {
        let mut raw = RawAspect {
            name: node.name.name.clone(),
            privileged: node.privileged,
            span: node.span.clone(),
            fields: Vec::new(),
            methods: Vec::new(),
            advices: Vec::new(),
            inter_type_fields: Vec::new(),
            inter_type_methods: Vec::new(),
            parent_decls: Vec::new(),
            pointcuts: BTreeMap::new(),
        };
        let mut member_names: BTreeSet<String> = BTreeSet::new();
        for member in &node.members {
            match member {
                AspectMember::Field(f) => {
                    if !member_names.insert(f.name.name.clone()) {
                        self.error(
                            format!("duplicate member '{}' in aspect '{}'", f.name.name, raw.name),
                            f.span.clone(),
                        );
                        continue;
                    }
                    let init = self.literal_init(&f.init, "field");
                    raw.fields.push(FieldDecl {
                        name: f.name.name.clone(),
                        ty: f.ty.clone(),
                        visibility: f.visibility,
                        init,
                        span: f.span.clone(),
                        introduced_by: None,
                    });
                }
                AspectMember::Method(m) => {
                    if !member_names.insert(m.name.name.clone()) {
                        self.error(
                            format!("duplicate member '{}' in aspect '{}'", m.name.name, raw.name),
                            m.span.clone(),
                        );
                        continue;
                    }
                    self.check_param_names(&m.params);
                    raw.methods.push((
                        MethodHeader {
                            owner: raw.name.clone(),
                            name: m.name.name.clone(),
                            return_type: m.return_type.clone(),
                            visibility: m.visibility,
                            params: m.params.clone(),
                            span: m.span.clone(),
                        },
                        m.body.clone(),
                    ));
                }
                AspectMember::Advice(a) => {
                    self.check_param_names(&a.params);
                    raw.advices.push(a.clone());
                }
                AspectMember::Pointcut(p) => {
                    if raw.pointcuts.contains_key(&p.name.name) {
                        self.error(
                            format!("duplicate pointcut '{}' in aspect '{}'", p.name.name, raw.name),
                            p.span.clone(),
                        );
                        continue;
                    }
                    self.check_param_names(&p.params);
                    raw.pointcuts.insert(
                        p.name.name.clone(),
                        PointcutDef {
                            name: p.name.name.clone(),
                            params: p.params.clone(),
                            expr: p.expr.clone(),
                            span: p.span.clone(),
                        },
                    );
                }
                AspectMember::InterTypeField(f) => {
                    raw.inter_type_fields.push(InterTypeFieldDecl {
                        target: f.target.name.clone(),
                        name: f.name.name.clone(),
                        ty: f.ty.clone(),
                        span: f.span.clone(),
                    });
                    let init = self.literal_init(&f.init, "inter-type field");
                    match classes.get_mut(&f.target.name) {
                        None => self.error(
                            format!("unknown inter-type target class '{}'", f.target.name),
                            f.span.clone(),
                        ),
                        Some(class) => {
                            let collides = class.fields.iter().any(|x| x.name == f.name.name)
                                || class.methods.iter().any(|(h, _, _)| h.name == f.name.name);
                            if collides {
                                self.error(
                                    format!(
                                        "duplicate member introduction '{}.{}'",
                                        f.target.name, f.name.name
                                    ),
                                    f.span.clone(),
                                );
                            } else {
                                class.fields.push(FieldDecl {
                                    name: f.name.name.clone(),
                                    ty: f.ty.clone(),
                                    visibility: f.visibility,
                                    init,
                                    span: f.span.clone(),
                                    introduced_by: Some(raw.name.clone()),
                                });
                            }
                        }
                    }
                }
                AspectMember::InterTypeMethod(m) => {
                    raw.inter_type_methods.push(InterTypeMethodDecl {
                        target: m.target.name.clone(),
                        name: m.name.name.clone(),
                        span: m.span.clone(),
                    });
                    self.check_param_names(&m.params);
                    match classes.get_mut(&m.target.name) {
                        None => self.error(
                            format!("unknown inter-type target class '{}'", m.target.name),
                            m.span.clone(),
                        ),
                        Some(class) => {
                            let collides = class.fields.iter().any(|x| x.name == m.name.name)
                                || class.methods.iter().any(|(h, _, _)| h.name == m.name.name);
                            if collides {
                                self.error(
                                    format!(
                                        "duplicate member introduction '{}.{}'",
                                        m.target.name, m.name.name
                                    ),
                                    m.span.clone(),
                                );
                            } else {
                                class.methods.push((
                                    MethodHeader {
                                        owner: m.target.name.clone(),
                                        name: m.name.name.clone(),
                                        return_type: m.return_type.clone(),
                                        visibility: m.visibility,
                                        params: m.params.clone(),
                                        span: m.span.clone(),
                                    },
                                    m.body.clone(),
                                    Some(raw.name.clone()),
                                ));
                            }
                        }
                    }
                }
                AspectMember::DeclareParents(d) => {
                    raw.parent_decls.push(ParentDeclSummary {
                        target: d.target.name.clone(),
                        interface: d.interface.name.clone(),
                        span: d.span.clone(),
                    });
                    match classes.get_mut(&d.target.name) {
                        None => self.error(
                            format!("unknown declare-parents target class '{}'", d.target.name),
                            d.span.clone(),
                        ),
                        Some(class) => class.declared_parents.push(ParentDecl {
                            interface: d.interface.name.clone(),
                            introduced_by: Some(raw.name.clone()),
                            span: d.span.clone(),
                        }),
                    }
                }
            }
        }
        raw
    }

    fn resolve_aspect(&mut self, tables: &ResolutionTables<'_>, raw: &RawAspect) -> AspectDecl {
        let mut methods = Vec::new();
        for (header, body) in &raw.methods {
            let ctx = BodyKind::AspectHelper { aspect: raw.name.clone() };
            let rbody = self.resolve_body(tables, ctx, &header.params, body);
            methods.push(MethodDecl {
                owner: header.owner.clone(),
                name: header.name.clone(),
                return_type: header.return_type.clone(),
                visibility: header.visibility,
                params: header.params.clone(),
                body: rbody,
                span: header.span.clone(),
                introduced_by: None,
            });
        }

        let mut advices = Vec::new();
        for (ordinal, node) in raw.advices.iter().enumerate() {
            let id = AdviceId { aspect: raw.name.clone(), ordinal };
            let pointcut = self.resolve_pointcut(raw, &node.pointcut, &node.params, &mut Vec::new());
            let ctx = BodyKind::Advice {
                aspect: raw.name.clone(),
                advice_kind: node.kind,
                bound_params: node.params.clone(),
            };
            let body = self.resolve_body(tables, ctx, &node.params, &node.body);
            advices.push(AdviceDecl {
                id,
                kind: node.kind,
                return_type: node.return_type.clone(),
                bound_params: node.params.clone(),
                pointcut,
                pointcut_span: node.pointcut.span().clone(),
                body,
                span: node.span.clone(),
            });
        }

        AspectDecl {
            name: raw.name.clone(),
            privileged: raw.privileged,
            span: raw.span.clone(),
            advices,
            fields: raw.fields.clone(),
            methods,
            inter_type_fields: raw.inter_type_fields.clone(),
            inter_type_methods: raw.inter_type_methods.clone(),
            parent_decls: raw.parent_decls.clone(),
            pointcuts: raw.pointcuts.clone(),
        }
    }

    /// Inlines named pointcut references and validates `args(...)` lists
    /// against the advice's bound parameters.
    fn resolve_pointcut(
        &mut self,
        aspect: &RawAspect,
        node: &PointcutExprNode,
        bound_params: &[Param],
        stack: &mut Vec<String>,
    ) -> Pointcut {
        let resolved = self.inline_pointcut(aspect, node, &BTreeMap::new(), stack);
        self.validate_args_lists(&resolved, bound_params, node.span());
        resolved
    }

    fn inline_pointcut(
        &mut self,
        aspect: &RawAspect,
        node: &PointcutExprNode,
        subst: &BTreeMap<String, String>,
        stack: &mut Vec<String>,
    ) -> Pointcut {
        match node {
            PointcutExprNode::Execution(sig, _) => Pointcut::Execution(sig.clone()),
            PointcutExprNode::Call(sig, _) => Pointcut::Call(sig.clone()),
            PointcutExprNode::Args(ids, _) => Pointcut::Args(
                ids.iter()
                    .map(|id| subst.get(&id.name).cloned().unwrap_or_else(|| id.name.clone()))
                    .collect(),
            ),
            PointcutExprNode::Not(inner, _) => {
                Pointcut::Not(Box::new(self.inline_pointcut(aspect, inner, subst, stack)))
            }
            PointcutExprNode::And(l, r, _) => Pointcut::And(
                Box::new(self.inline_pointcut(aspect, l, subst, stack)),
                Box::new(self.inline_pointcut(aspect, r, subst, stack)),
            ),
            PointcutExprNode::Or(l, r, _) => Pointcut::Or(
                Box::new(self.inline_pointcut(aspect, l, subst, stack)),
                Box::new(self.inline_pointcut(aspect, r, subst, stack)),
            ),
            PointcutExprNode::Named { name, args, span } => {
                let def = match aspect.pointcuts.get(&name.name) {
                    Some(def) => def.clone(),
                    None => {
                        self.error(
                            format!("unknown pointcut '{}' in aspect '{}'", name.name, aspect.name),
                            span.clone(),
                        );
                        return Pointcut::Args(Vec::new());
                    }
                };
                if stack.contains(&name.name) {
                    self.error(
                        format!("cyclic pointcut reference through '{}'", name.name),
                        span.clone(),
                    );
                    return Pointcut::Args(Vec::new());
                }
                if def.params.len() != args.len() {
                    self.error(
                        format!(
                            "pointcut '{}' expects {} argument(s), got {}",
                            name.name,
                            def.params.len(),
                            args.len()
                        ),
                        span.clone(),
                    );
                    return Pointcut::Args(Vec::new());
                }
                // Map the pointcut's own parameter names to the caller's
                // identifiers (which may themselves be substituted).
                let mut inner_subst = BTreeMap::new();
                for (param, arg) in def.params.iter().zip(args) {
                    let target =
                        subst.get(&arg.name).cloned().unwrap_or_else(|| arg.name.clone());
                    inner_subst.insert(param.name.name.clone(), target);
                }
                stack.push(name.name.clone());
                let result = self.inline_pointcut(aspect, &def.expr, &inner_subst, stack);
                stack.pop();
                result
            }
        }
    }

    fn validate_args_lists(&mut self, pc: &Pointcut, bound_params: &[Param], span: &Span) {
        match pc {
            Pointcut::Args(names) => {
                let expected: Vec<&str> =
                    bound_params.iter().map(|p| p.name.name.as_str()).collect();
                let actual: Vec<&str> = names.iter().map(|n| n.as_str()).collect();
                if actual != expected {
                    self.error(
                        format!(
                            "args({}) must list the advice's bound parameters ({})",
                            actual.join(", "),
                            if expected.is_empty() { "none".to_string() } else { expected.join(", ") }
                        ),
                        span.clone(),
                    );
                }
            }
            Pointcut::Not(inner) => self.validate_args_lists(inner, bound_params, span),
            Pointcut::And(l, r) | Pointcut::Or(l, r) => {
                self.validate_args_lists(l, bound_params, span);
                self.validate_args_lists(r, bound_params, span);
            }
            Pointcut::Execution(_) | Pointcut::Call(_) => {}
        }
    }

    // --- body resolution -----------------------------------------------------

    fn resolve_body(
        &mut self,
        tables: &ResolutionTables<'_>,
        ctx: BodyKind,
        params: &[Param],
        body: &Block,
    ) -> RBody {
        let mut resolver = BodyResolver {
            builder: self,
            tables,
            ctx,
            slots: params
                .iter()
                .map(|p| SlotInfo { name: p.name.name.clone(), ty: p.ty.clone() })
                .collect(),
        };
        let block = resolver.block(body);
        let slot_names = resolver.slots.iter().map(|s| s.name.clone()).collect();
        RBody { param_count: params.len(), slot_names, block }
    }
}

struct RawAspect {
    name: String,
    privileged: bool,
    span: Span,
    fields: Vec<FieldDecl>,
    methods: Vec<(MethodHeader, Block)>,
    advices: Vec<crate::syntax::ast::AdviceNode>,
    inter_type_fields: Vec<InterTypeFieldDecl>,
    inter_type_methods: Vec<InterTypeMethodDecl>,
    parent_decls: Vec<ParentDeclSummary>,
    pointcuts: BTreeMap<String, PointcutDef>,
}

struct ResolutionTables<'a> {
    classes: &'a BTreeMap<String, RawClass>,
    aspects: &'a [RawAspect],
}

impl<'a> ResolutionTables<'a> {
    fn class_field(&self, class: &str, name: &str) -> Option<&FieldDecl> {
        self.classes.get(class)?.fields.iter().find(|f| f.name == name)
    }

    fn class_method(&self, class: &str, name: &str) -> Option<&MethodHeader> {
        self.classes
            .get(class)?
            .methods
            .iter()
            .map(|(h, _, _)| h)
            .find(|h| h.name == name)
    }

    fn aspect(&self, name: &str) -> Option<&RawAspect> {
        self.aspects.iter().find(|a| a.name == name)
    }

    fn aspect_field(&self, aspect: &str, name: &str) -> Option<&FieldDecl> {
        self.aspect(aspect)?.fields.iter().find(|f| f.name == name)
    }

    fn aspect_method(&self, aspect: &str, name: &str) -> Option<&MethodHeader> {
        self.aspect(aspect)?.methods.iter().map(|(h, _)| h).find(|h| h.name == name)
    }
}

#[derive(Clone)]
enum BodyKind {
    ClassMethod { class: String, method: String },
    AspectHelper { aspect: String },
    ItdMethod { aspect: String, target: String, method: String },
    Advice { aspect: String, advice_kind: AdviceKind, bound_params: Vec<Param> },
}

impl BodyKind {
    fn owning_aspect(&self) -> Option<&str> {
        match self {
            BodyKind::ClassMethod { .. } => None,
            BodyKind::AspectHelper { aspect }
            | BodyKind::ItdMethod { aspect, .. }
            | BodyKind::Advice { aspect, .. } => Some(aspect),
        }
    }

    fn field_home(&self) -> FieldHome {
        match self {
            BodyKind::ClassMethod { class, .. } => FieldHome::Class(class.clone()),
            BodyKind::ItdMethod { target, .. } => FieldHome::Class(target.clone()),
            BodyKind::AspectHelper { aspect } | BodyKind::Advice { aspect, .. } => {
                FieldHome::Aspect(aspect.clone())
            }
        }
    }

    /// Method acting as the caller for call-shadow purposes; only class
    /// method bodies (declared or introduced) produce call shadows.
    fn call_shadow_caller(&self) -> Option<MethodRef> {
        match self {
            BodyKind::ClassMethod { class, method } => {
                Some(MethodRef::new(class.clone(), method.clone()))
            }
            BodyKind::ItdMethod { target, method, .. } => {
                Some(MethodRef::new(target.clone(), method.clone()))
            }
            _ => None,
        }
    }
}

enum FieldHome {
    Class(String),
    Aspect(String),
}

struct SlotInfo {
    name: String,
    ty: TypeName,
}

struct BodyResolver<'b, 'a> {
    builder: &'b mut Builder,
    tables: &'b ResolutionTables<'a>,
    ctx: BodyKind,
    slots: Vec<SlotInfo>,
}

impl BodyResolver<'_, '_> {
    fn error(&mut self, message: impl Into<String>, span: Span) {
        self.builder.error(message, span);
    }

    fn slot_of(&self, name: &str) -> Option<usize> {
        self.slots.iter().position(|s| s.name == name)
    }

    fn block(&mut self, block: &Block) -> RBlock {
        let stmts = block.stmts.iter().map(|s| self.stmt(s)).collect();
        RBlock { stmts }
    }

    fn stmt(&mut self, stmt: &crate::syntax::ast::Stmt) -> RStmt {
        use crate::syntax::ast::Stmt;
        match stmt {
            Stmt::Local { ty, name, init, span } => {
                if self.slot_of(&name.name).is_some() {
                    self.error(
                        format!("duplicate local '{}' in this body", name.name),
                        name.span.clone(),
                    );
                }
                let init = init.as_ref().map(|e| self.expr(e).0);
                self.slots.push(SlotInfo { name: name.name.clone(), ty: ty.clone() });
                let slot = self.slots.len() - 1;
                RStmt::Local { slot, init, span: span.clone() }
            }
            Stmt::Assign { target, value, span } => {
                let value = self.expr(value).0;
                let target = self.assign_target(target);
                RStmt::Assign { target, value, span: span.clone() }
            }
            Stmt::If { cond, then_block, else_block, span } => RStmt::If {
                cond: self.expr(cond).0,
                then_block: self.block(then_block),
                else_block: else_block.as_ref().map(|b| self.block(b)),
                span: span.clone(),
            },
            Stmt::While { cond, body, span } => RStmt::While {
                cond: self.expr(cond).0,
                body: self.block(body),
                span: span.clone(),
            },
            Stmt::Return { value, span } => RStmt::Return {
                value: value.as_ref().map(|e| self.expr(e).0),
                span: span.clone(),
            },
            Stmt::Expr { expr, span } => {
                RStmt::Expr { expr: self.expr(expr).0, span: span.clone() }
            }
        }
    }

    fn assign_target(&mut self, target: &AssignTarget) -> RTarget {
        match target {
            AssignTarget::Name(id) => {
                if let Some(slot) = self.slot_of(&id.name) {
                    return RTarget::Slot { slot, span: id.span.clone() };
                }
                match self.ctx.field_home() {
                    FieldHome::Class(class) => {
                        if self.tables.class_field(&class, &id.name).is_some() {
                            let field = FieldRef::new(class.clone(), id.name.clone());
                            self.check_field_access(&field, &id.span);
                            return RTarget::ClassField {
                                recv: RExpr {
                                    kind: RExprKind::Singleton { class },
                                    span: id.span.clone(),
                                },
                                field,
                                span: id.span.clone(),
                            };
                        }
                    }
                    FieldHome::Aspect(aspect) => {
                        if self.tables.aspect_field(&aspect, &id.name).is_some() {
                            return RTarget::AspectField {
                                aspect,
                                name: id.name.clone(),
                                span: id.span.clone(),
                            };
                        }
                    }
                }
                self.error(format!("unresolved name '{}'", id.name), id.span.clone());
                RTarget::Slot { slot: usize::MAX, span: id.span.clone() }
            }
            AssignTarget::Field { recv, name, span } => {
                let (recv, ty) = self.expr(recv);
                match ty {
                    STy::Class(class) => {
                        if self.tables.class_field(&class, &name.name).is_some() {
                            let field = FieldRef::new(class, name.name.clone());
                            self.check_field_access(&field, span);
                            RTarget::ClassField { recv, field, span: span.clone() }
                        } else {
                            self.error(
                                format!("unresolved field '{}.{}'", class, name.name),
                                span.clone(),
                            );
                            RTarget::Slot { slot: usize::MAX, span: span.clone() }
                        }
                    }
                    _ => {
                        self.error(
                            format!("cannot resolve field '{}' on this receiver", name.name),
                            span.clone(),
                        );
                        RTarget::Slot { slot: usize::MAX, span: span.clone() }
                    }
                }
            }
        }
    }

    /// Enforces the privileged-aspect rule: aspect code may touch a
    /// private base-class field only when the aspect is privileged or
    /// itself introduced the field.
    fn check_field_access(&mut self, field: &FieldRef, span: &Span) {
        let aspect_name = match self.ctx.owning_aspect() {
            Some(a) => a.to_string(),
            None => return,
        };
        let decl = match self.tables.class_field(&field.owner, &field.name) {
            Some(d) => d,
            None => return,
        };
        if decl.visibility != Visibility::Private {
            return;
        }
        if decl.introduced_by.as_deref() == Some(aspect_name.as_str()) {
            return;
        }
        let privileged =
            self.tables.aspect(&aspect_name).map(|a| a.privileged).unwrap_or(false);
        if !privileged {
            self.error(
                format!(
                    "private field access requires privileged aspect: '{}' accesses '{}'",
                    aspect_name, field
                ),
                span.clone(),
            );
        }
    }

    fn sty(&self, ty: &TypeName) -> STy {
        sty_of(ty, self.tables.classes)
    }

    fn expr(&mut self, expr: &Expr) -> (RExpr, STy) {
        match expr {
            Expr::Name(id) => {
                if let Some(slot) = self.slot_of(&id.name) {
                    let ty = self.sty(&self.slots[slot].ty.clone());
                    return (
                        RExpr { kind: RExprKind::Slot { slot }, span: id.span.clone() },
                        ty,
                    );
                }
                match self.ctx.field_home() {
                    FieldHome::Class(class) => {
                        if let Some(f) = self.tables.class_field(&class, &id.name) {
                            let fty = self.sty(&f.ty.clone());
                            let field = FieldRef::new(class.clone(), id.name.clone());
                            self.check_field_access(&field, &id.span);
                            return (
                                RExpr {
                                    kind: RExprKind::ClassField {
                                        recv: Box::new(RExpr {
                                            kind: RExprKind::Singleton { class },
                                            span: id.span.clone(),
                                        }),
                                        field,
                                    },
                                    span: id.span.clone(),
                                },
                                fty,
                            );
                        }
                    }
                    FieldHome::Aspect(aspect) => {
                        if let Some(f) = self.tables.aspect_field(&aspect, &id.name) {
                            let fty = self.sty(&f.ty.clone());
                            return (
                                RExpr {
                                    kind: RExprKind::AspectField {
                                        aspect,
                                        name: id.name.clone(),
                                    },
                                    span: id.span.clone(),
                                },
                                fty,
                            );
                        }
                    }
                }
                if self.tables.classes.contains_key(&id.name) {
                    return (
                        RExpr {
                            kind: RExprKind::Singleton { class: id.name.clone() },
                            span: id.span.clone(),
                        },
                        STy::Class(id.name.clone()),
                    );
                }
                self.error(format!("unresolved name '{}'", id.name), id.span.clone());
                (RExpr { kind: RExprKind::Null, span: id.span.clone() }, STy::Null)
            }
            Expr::IntLit { value, span } => {
                (RExpr { kind: RExprKind::Int(*value), span: span.clone() }, STy::Int)
            }
            Expr::StrLit { value, span } => {
                (RExpr { kind: RExprKind::Str(value.clone()), span: span.clone() }, STy::Str)
            }
            Expr::BoolLit { value, span } => {
                (RExpr { kind: RExprKind::Bool(*value), span: span.clone() }, STy::Bool)
            }
            Expr::NullLit { span } => {
                (RExpr { kind: RExprKind::Null, span: span.clone() }, STy::Null)
            }
            Expr::Field { recv, name, span } => {
                let (recv, ty) = self.expr(recv);
                match ty {
                    STy::Class(class) => {
                        if let Some(f) = self.tables.class_field(&class, &name.name) {
                            let fty = self.sty(&f.ty.clone());
                            let field = FieldRef::new(class, name.name.clone());
                            self.check_field_access(&field, span);
                            (
                                RExpr {
                                    kind: RExprKind::ClassField { recv: Box::new(recv), field },
                                    span: span.clone(),
                                },
                                fty,
                            )
                        } else {
                            self.error(
                                format!("unresolved field '{}.{}'", class, name.name),
                                span.clone(),
                            );
                            (RExpr { kind: RExprKind::Null, span: span.clone() }, STy::Null)
                        }
                    }
                    _ => {
                        self.error(
                            format!("cannot resolve field '{}' on this receiver", name.name),
                            span.clone(),
                        );
                        (RExpr { kind: RExprKind::Null, span: span.clone() }, STy::Null)
                    }
                }
            }
            Expr::Call { recv, name, args, span } => self.call(recv, name, args, span),
            Expr::Proceed { args, span } => {
                let bound = match &self.ctx {
                    BodyKind::Advice { advice_kind: AdviceKind::Around, bound_params, .. } => {
                        Some(bound_params.len())
                    }
                    _ => None,
                };
                match bound {
                    None => {
                        self.error("proceed only legal in around advice", span.clone());
                    }
                    Some(expected) if args.len() != expected => {
                        self.error(
                            format!(
                                "proceed expects {} argument(s) (the advice's bound parameters), got {}",
                                expected,
                                args.len()
                            ),
                            span.clone(),
                        );
                    }
                    Some(_) => {}
                }
                let args = args.iter().map(|a| self.expr(a).0).collect();
                let ty = match &self.ctx {
                    BodyKind::Advice { advice_kind: AdviceKind::Around, .. } => STy::Object,
                    _ => STy::Null,
                };
                (RExpr { kind: RExprKind::Proceed { args }, span: span.clone() }, ty)
            }
            Expr::Binary { op, lhs, rhs, span } => {
                let (l, lt) = self.expr(lhs);
                let (r, rt) = self.expr(rhs);
                let ty = match op {
                    BinOp::Eq | BinOp::Ne | BinOp::Lt | BinOp::Le | BinOp::Gt | BinOp::Ge => {
                        STy::Bool
                    }
                    BinOp::Add if lt == STy::Str || rt == STy::Str => STy::Str,
                    _ => STy::Int,
                };
                (
                    RExpr {
                        kind: RExprKind::Binary { op: *op, lhs: Box::new(l), rhs: Box::new(r) },
                        span: span.clone(),
                    },
                    ty,
                )
            }
            Expr::Not { operand, span } => {
                let (inner, _) = self.expr(operand);
                (
                    RExpr {
                        kind: RExprKind::Not { operand: Box::new(inner) },
                        span: span.clone(),
                    },
                    STy::Bool,
                )
            }
        }
    }

    fn call(
        &mut self,
        recv: &Option<Box<Expr>>,
        name: &crate::syntax::ast::Ident,
        args: &[Expr],
        span: &Span,
    ) -> (RExpr, STy) {
        let rargs: Vec<RExpr> = args.iter().map(|a| self.expr(a).0).collect();
        match recv {
            Some(recv_expr) => {
                let (recv_resolved, ty) = self.expr(recv_expr);
                match ty {
                    STy::Class(class) => {
                        match self.tables.class_method(&class, &name.name) {
                            Some(header) => {
                                let header = header.clone();
                                self.check_call_arity(&header, args.len(), span);
                                let method = MethodRef::new(class, name.name.clone());
                                self.record_call_site(&method, span);
                                let ret = self.sty(&header.return_type);
                                (
                                    RExpr {
                                        kind: RExprKind::Call {
                                            recv: Some(Box::new(recv_resolved)),
                                            method,
                                            callee: CalleeKind::ClassMethod,
                                            args: rargs,
                                        },
                                        span: span.clone(),
                                    },
                                    ret,
                                )
                            }
                            None => {
                                self.error(
                                    format!("unresolved method '{}.{}'", class, name.name),
                                    span.clone(),
                                );
                                (RExpr { kind: RExprKind::Null, span: span.clone() }, STy::Null)
                            }
                        }
                    }
                    _ => {
                        self.error(
                            format!("cannot resolve method '{}' on this receiver", name.name),
                            span.clone(),
                        );
                        (RExpr { kind: RExprKind::Null, span: span.clone() }, STy::Null)
                    }
                }
            }
            None => {
                // Bare call: enclosing type's methods first, then intrinsics.
                let home_method = match self.ctx.field_home() {
                    FieldHome::Class(class) => self
                        .tables
                        .class_method(&class, &name.name)
                        .map(|h| (h.clone(), CalleeKind::ClassMethod)),
                    FieldHome::Aspect(aspect) => self
                        .tables
                        .aspect_method(&aspect, &name.name)
                        .map(|h| (h.clone(), CalleeKind::AspectHelper)),
                };
                if let Some((header, callee)) = home_method {
                    self.check_call_arity(&header, args.len(), span);
                    let method = MethodRef::new(header.owner.clone(), name.name.clone());
                    if callee == CalleeKind::ClassMethod {
                        self.record_call_site(&method, span);
                    }
                    let ret = self.sty(&header.return_type);
                    return (
                        RExpr {
                            kind: RExprKind::Call { recv: None, method, callee, args: rargs },
                            span: span.clone(),
                        },
                        ret,
                    );
                }
                let intrinsic = match name.name.as_str() {
                    "print" => Some(Intrinsic::Print),
                    "log" => Some(Intrinsic::Log),
                    _ => None,
                };
                if let Some(which) = intrinsic {
                    if args.len() != 1 {
                        self.error(
                            format!("intrinsic '{}' expects 1 argument, got {}", name.name, args.len()),
                            span.clone(),
                        );
                    }
                    return (
                        RExpr {
                            kind: RExprKind::Intrinsic { which, args: rargs },
                            span: span.clone(),
                        },
                        STy::Void,
                    );
                }
                self.error(format!("unresolved call '{}'", name.name), span.clone());
                (RExpr { kind: RExprKind::Null, span: span.clone() }, STy::Null)
            }
        }
    }

    fn check_call_arity(&mut self, header: &MethodHeader, got: usize, span: &Span) {
        if header.params.len() != got {
            self.error(
                format!(
                    "method '{}.{}' expects {} argument(s), got {}",
                    header.owner,
                    header.name,
                    header.params.len(),
                    got
                ),
                span.clone(),
            );
        }
    }

    /// Calls made from class method bodies (including inter-type methods)
    /// are join-point shadows; calls from advice or helper bodies are not.
    fn record_call_site(&mut self, callee: &MethodRef, span: &Span) {
        if let Some(caller) = self.ctx.call_shadow_caller() {
            self.builder.call_sites.push(CallSite {
                caller,
                callee: callee.clone(),
                span: span.clone(),
            });
        }
    }
}
